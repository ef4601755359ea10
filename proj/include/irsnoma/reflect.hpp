#pragma once

// Reflection-vector design: ideal zero-forcing beamforming and the two
// finite-resolution codebooks (DFT columns, on-off blocks).

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "irsnoma/channel.hpp"
#include "irsnoma/linalg.hpp"
#include "irsnoma/link_metrics.hpp"

namespace irsnoma {

enum class Scheme { ideal, dft, onoff };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::ideal: return "ideal";
        case Scheme::dft: return "dft";
        case Scheme::onoff: return "onoff";
    }
    return "?";
}

struct ReflectVector {
    ComplexVector values;
    Scheme scheme = Scheme::ideal;
    int selected_index = -1;  // 0-based codebook index; -1 for the ideal design
};

struct Codebook {
    std::vector<ComplexVector> vectors;
    Scheme kind = Scheme::dft;
    int elements = 0;    // N
    int blocks = 0;      // P (on-off only)
    int block_size = 0;  // Q (on-off only)
};

// Zero-forcing design: theta lies in the null space of the interference
// directions {D h_i, i != k} and is matched to D h_k inside it, which
// maximizes the SINR among all unit-norm vectors satisfying the constraints.
inline ReflectVector ideal_theta(const ChannelRealization& real) {
    const Eigen::Index n = real.h_eff.rows();
    const Eigen::Index k_total = real.h_eff.cols();
    if (n < k_total) {
        throw std::invalid_argument("ideal_theta: infeasible, need N >= K (N=" +
                                    std::to_string(n) + ", K=" + std::to_string(k_total) + ")");
    }

    ReflectVector out;
    out.scheme = Scheme::ideal;
    if (k_total == 1) {
        // No interference constraints: matched filter on the cascaded channel.
        const auto dh = real.cascaded_all.col(real.served_beam - 1);
        const double norm = dh.norm();
        if (norm == 0.0) throw std::runtime_error("ideal_theta: degenerate channel");
        out.values = dh / norm;
        return out;
    }

    ComplexMatrix constraints(n, k_total - 1);
    Eigen::Index col = 0;
    for (int i = 1; i <= static_cast<int>(k_total); ++i) {
        if (i == real.served_beam) continue;
        constraints.col(col++) = real.cascaded_all.col(i - 1);
    }
    const ComplexMatrix basis = null_space(constraints);
    const ComplexVector projected = basis.adjoint() * real.cascaded_all.col(real.served_beam - 1);
    const double norm = projected.norm();
    if (norm == 0.0) {
        throw std::runtime_error("ideal_theta: signal direction lies in the interference span");
    }
    out.values = basis * (projected / norm);
    return out;
}

// N x N DFT columns scaled to unit Euclidean norm: entry (n, p) is
// exp(-j 2 pi n p / N) / sqrt(N).
inline Codebook build_dft_codebook(int n) {
    if (n < 1) throw std::invalid_argument("build_dft_codebook: need N >= 1");
    Codebook book;
    book.kind = Scheme::dft;
    book.elements = n;
    book.vectors.reserve(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int p = 0; p < n; ++p) {
        ComplexVector v(n);
        for (int row = 0; row < n; ++row) {
            const double angle = -2.0 * 3.141592653589793238462643383279502884 *
                                 static_cast<double>(row) * p / n;
            v(row) = std::polar(scale, angle);
        }
        book.vectors.push_back(std::move(v));
    }
    return book;
}

// On-off codebook (1/sqrt(Q)) I_P (x) 1_Q: vector p activates the Q elements
// of block p with amplitude 1/sqrt(Q) and switches the rest off.
inline Codebook build_onoff_codebook(int n, int p, int q) {
    if (p < 1 || q < 1 || p * q != n) {
        throw std::invalid_argument("build_onoff_codebook: need N = P*Q (N=" +
                                    std::to_string(n) + ", P=" + std::to_string(p) +
                                    ", Q=" + std::to_string(q) + ")");
    }
    Codebook book;
    book.kind = Scheme::onoff;
    book.elements = n;
    book.blocks = p;
    book.block_size = q;
    book.vectors.reserve(p);
    const double amp = 1.0 / std::sqrt(static_cast<double>(q));
    for (int b = 0; b < p; ++b) {
        ComplexVector v = ComplexVector::Zero(n);
        v.segment(static_cast<Eigen::Index>(b) * q, q).setConstant(amp);
        book.vectors.push_back(std::move(v));
    }
    return book;
}

// Exhaustive search over the codebook for the SINR-maximizing member.
// Ties resolve to the lowest index.
inline ReflectVector select_theta(const Codebook& book, const ChannelRealization& real,
                                  const SystemConfig& cfg) {
    if (book.vectors.empty()) {
        throw std::invalid_argument("select_theta: empty codebook");
    }
    int best = 0;
    double best_sinr = sinr_far(book.vectors[0], real, cfg).sinr;
    for (int i = 1; i < static_cast<int>(book.vectors.size()); ++i) {
        const double s = sinr_far(book.vectors[i], real, cfg).sinr;
        if (s > best_sinr) {
            best = i;
            best_sinr = s;
        }
    }
    ReflectVector out;
    out.values = book.vectors[best];
    out.scheme = book.kind;
    out.selected_index = best;
    return out;
}

inline SinrBreakdown sinr_far(const ReflectVector& theta, const ChannelRealization& real,
                              const SystemConfig& cfg) {
    return sinr_far(theta.values, real, cfg);
}

}  // namespace irsnoma
