#pragma once

// One experiment draw: base-station beams, BS->IRS channel, IRS->user channel
// and the cascaded quantities the far-user SINR is built from.

#include <cmath>
#include <stdexcept>
#include <string>

#include "irsnoma/linalg.hpp"
#include "irsnoma/random.hpp"

namespace irsnoma {

struct SystemConfig {
    int bs_antennas = 4;       // M
    int beams = 1;             // K near users / orthonormal beams, K <= M
    int irs_elements = 4;      // N
    int onoff_blocks = 4;      // P
    int onoff_block_size = 1;  // Q, with N = P*Q
    double alpha1_sq = 0.8;    // power share of the far user's useful term
    double alpha2_sq = 0.2;
    double snr = 1.0;          // transmit SNR rho, linear
    double rate_bpcu = 1.0;    // far-user target rate

    void validate() const {
        if (beams < 1 || bs_antennas < beams) {
            throw std::invalid_argument("SystemConfig: need M >= K >= 1 (M=" +
                                        std::to_string(bs_antennas) +
                                        ", K=" + std::to_string(beams) + ")");
        }
        if (irs_elements < 1) {
            throw std::invalid_argument("SystemConfig: need N >= 1");
        }
        if (onoff_blocks < 1 || onoff_block_size < 1 ||
            onoff_blocks * onoff_block_size != irs_elements) {
            throw std::invalid_argument("SystemConfig: need N = P*Q (N=" +
                                        std::to_string(irs_elements) +
                                        ", P=" + std::to_string(onoff_blocks) +
                                        ", Q=" + std::to_string(onoff_block_size) + ")");
        }
        if (std::abs(alpha1_sq + alpha2_sq - 1.0) > 1e-12 || alpha1_sq < 0.0 || alpha2_sq < 0.0) {
            throw std::invalid_argument("SystemConfig: power coefficients must be "
                                        "nonnegative with alpha1_sq + alpha2_sq = 1");
        }
        if (!(snr > 0.0)) {
            throw std::invalid_argument("SystemConfig: need rho > 0");
        }
        if (!(rate_bpcu > 0.0)) {
            throw std::invalid_argument("SystemConfig: need target rate > 0");
        }
    }

    bool operator==(const SystemConfig&) const = default;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct ChannelRealization {
    ComplexMatrix beams;         // W, M x K, orthonormal columns
    ComplexMatrix bs_to_irs;     // G, N x M, i.i.d. CN(0,1)
    ComplexVector irs_to_user;   // h_{k'}, N, i.i.d. CN(0,1)
    ComplexVector d_diag;        // diagonal of D = diag(conj(h_{k'}))
    ComplexMatrix h_eff;         // N x K, column i = G * W.col(i)
    ComplexMatrix cascaded_all;  // N x K, column i = D h_i
    int served_beam = 1;         // k, 1-based

    // D * h_i for beam i (1-based): the cascaded IRS channel of beam i.
    ComplexVector cascaded(int beam) const { return cascaded_all.col(beam - 1); }

    // Recomputes the derived fields from beams / bs_to_irs / irs_to_user.
    void refresh_derived() {
        d_diag = irs_to_user.conjugate();
        h_eff.noalias() = bs_to_irs * beams;
        cascaded_all.noalias() = d_diag.asDiagonal() * h_eff;
    }
};

// Assembles a realization from explicit channel components.
inline ChannelRealization make_realization(ComplexMatrix beams, ComplexMatrix bs_to_irs,
                                           ComplexVector irs_to_user, int served_beam) {
    ChannelRealization real;
    real.beams = std::move(beams);
    real.bs_to_irs = std::move(bs_to_irs);
    real.irs_to_user = std::move(irs_to_user);
    real.served_beam = served_beam;
    real.refresh_derived();
    return real;
}

// Draws into an existing realization without reallocating when the shapes
// repeat (the Monte Carlo engine calls this once per trial).
inline void draw_realization_into(const SystemConfig& cfg, int served_beam, RandomStream& stream,
                                  ChannelRealization& real) {
    cfg.validate();
    if (served_beam < 1 || served_beam > cfg.beams) {
        throw std::invalid_argument("draw_realization: served beam index out of range");
    }
    if (cfg.beams == 1) {
        sample_cn_into(real.beams, cfg.bs_antennas, 1, stream);
        real.beams.col(0).normalize();
    } else {
        real.beams = orthonormal_columns(cfg.bs_antennas, cfg.beams, stream);
    }
    sample_cn_into(real.bs_to_irs, cfg.irs_elements, cfg.bs_antennas, stream);
    sample_cn_into(real.irs_to_user, cfg.irs_elements, 1, stream);
    real.served_beam = served_beam;
    real.refresh_derived();
}

inline ChannelRealization draw_realization(const SystemConfig& cfg, int served_beam,
                                           RandomStream& stream) {
    ChannelRealization real;
    draw_realization_into(cfg, served_beam, stream, real);
    return real;
}

}  // namespace irsnoma
