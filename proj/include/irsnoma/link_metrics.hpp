#pragma once

// Far-user SINR and the outage predicate.

#include <cmath>
#include <stdexcept>

#include "irsnoma/channel.hpp"

namespace irsnoma {

struct SinrBreakdown {
    double useful = 0.0;             // |theta^H D h_k|^2 alpha1^2
    double self_interference = 0.0;  // |theta^H D h_k|^2 alpha2^2
    double inter_pair = 0.0;         // sum_{i != k} |theta^H D h_i|^2
    double noise = 0.0;              // 1/rho
    double sinr = 0.0;
};

// SINR of the far user for a given reflection vector (theta holds the
// conjugated diagonal of Theta as an N-vector).
inline SinrBreakdown sinr_far(const ComplexVector& theta, const ChannelRealization& real,
                              const SystemConfig& cfg) {
    if (theta.size() != real.h_eff.rows()) {
        throw std::invalid_argument("sinr_far: reflection vector length does not match N");
    }
    SinrBreakdown out;
    const int k = real.served_beam;
    for (int i = 1; i <= static_cast<int>(real.h_eff.cols()); ++i) {
        const double gain = std::norm(theta.dot(real.cascaded_all.col(i - 1)));
        if (i == k) {
            out.useful = gain * cfg.alpha1_sq;
            out.self_interference = gain * cfg.alpha2_sq;
        } else {
            out.inter_pair += gain;
        }
    }
    out.noise = 1.0 / cfg.snr;
    out.sinr = out.useful / (out.self_interference + out.inter_pair + out.noise);
    return out;
}

// Outage iff log2(1 + sinr) < rate, i.e. sinr < 2^rate - 1 (strict).
inline bool is_outage(double sinr_linear, double rate_bpcu) {
    return sinr_linear < std::exp2(rate_bpcu) - 1.0;
}

}  // namespace irsnoma
