#pragma once

// Closed-form outage expressions for the on-off scheme, their high-SNR
// approximations, the per-branch channel-power pdf, and diversity-slope
// extraction from an outage curve.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include "irsnoma/bessel.hpp"
#include "irsnoma/channel.hpp"

namespace irsnoma {

struct AnalyticParams {
    double epsilon = 0.0;  // 2^R - 1
    double tau = 0.0;      // alpha1^2 - epsilon * alpha2^2
    double xi = 0.0;       // Q epsilon / (rho tau), defined only when tau > 0

    static AnalyticParams from(const SystemConfig& cfg) {
        AnalyticParams p;
        p.epsilon = std::exp2(cfg.rate_bpcu) - 1.0;
        p.tau = cfg.alpha1_sq - p.epsilon * cfg.alpha2_sq;
        p.xi = p.tau > 0.0 ? cfg.onoff_block_size * p.epsilon / (cfg.snr * p.tau)
                           : std::numeric_limits<double>::quiet_NaN();
        return p;
    }
};

namespace detail {
inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }
}  // namespace detail

// Outage probability of a single on-off branch of size Q at threshold xi:
// 1 - 2 xi^{Q/2} K_Q(2 sqrt(xi)) / Gamma(Q). This per-branch form avoids the
// cancellation the xi^{N/2}-prefactored product form suffers at small xi.
inline double onoff_branch_outage(double xi, int q) {
    if (!(xi > 0.0)) throw std::domain_error("onoff_branch_outage: need xi > 0");
    if (q < 1) throw std::domain_error("onoff_branch_outage: need Q >= 1");
    const double kq = bessel_k_int(q, 2.0 * std::sqrt(xi));
    if (kq == 0.0) return 1.0;  // K_Q underflowed: xi far beyond the outage knee
    const double survive = 2.0 * std::pow(xi, 0.5 * q) * kq / gamma_int(q);
    return detail::clamp01(1.0 - survive);
}

// Single-pair (K = 1) on-off outage probability: the best of P i.i.d.
// branches fails only if all of them do.
inline double onoff_outage_single(const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.beams != 1) {
        throw std::invalid_argument("onoff_outage_single: defined for the single-pair case K = 1");
    }
    const AnalyticParams p = AnalyticParams::from(cfg);
    if (p.tau <= 0.0) return 1.0;
    return std::pow(onoff_branch_outage(p.xi, cfg.onoff_block_size), cfg.onoff_blocks);
}

// High-SNR approximation of onoff_outage_single. Empty when out of regime:
// tau <= 0, or xi >= 1 in the Q = 1 branch where the -ln(xi) factor flips sign.
inline std::optional<double> onoff_outage_single_approx(const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.beams != 1) {
        throw std::invalid_argument("onoff_outage_single_approx: defined for the single-pair case K = 1");
    }
    const AnalyticParams p = AnalyticParams::from(cfg);
    if (p.tau <= 0.0) return std::nullopt;
    if (cfg.onoff_block_size == 1) {
        if (p.xi >= 1.0) return std::nullopt;
        const int n = cfg.irs_elements;
        return std::pow(p.xi * (-std::log(p.xi)), n);
    }
    return std::pow(p.xi / (cfg.onoff_block_size - 1), cfg.onoff_blocks);
}

// Per-branch outage for the multi-user case with Q = 1.
inline double onoff_multi_branch_outage(const SystemConfig& cfg) {
    const AnalyticParams p = AnalyticParams::from(cfg);
    if (p.tau <= 0.0) return 1.0;
    const double x = p.epsilon / (cfg.snr * p.tau);
    const double root = 2.0 * std::sqrt(x);
    const double survive = root * bessel_k_int(1, root) /
                           std::pow(1.0 + p.epsilon / p.tau, cfg.beams - 1);
    return detail::clamp01(1.0 - survive);
}

// Multi-user (K >= 2) on-off outage probability for Q = 1.
inline double onoff_outage_multi(const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.beams < 2 || cfg.onoff_block_size != 1) {
        throw std::invalid_argument("onoff_outage_multi: defined for K >= 2 with Q = 1");
    }
    return std::pow(onoff_multi_branch_outage(cfg), cfg.irs_elements);
}

// rho -> infinity limit of onoff_outage_multi: the inter-pair interference floor.
inline double onoff_outage_floor(const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.beams < 2 || cfg.onoff_block_size != 1) {
        throw std::invalid_argument("onoff_outage_floor: defined for K >= 2 with Q = 1");
    }
    const AnalyticParams p = AnalyticParams::from(cfg);
    if (p.tau <= 0.0) return 1.0;
    const double branch = 1.0 - std::pow(1.0 + p.epsilon / p.tau, -(cfg.beams - 1));
    return std::pow(branch, cfg.irs_elements);
}

// pdf of the scaled branch power Q |v_p^H D h_k|^2:
// f(x) = 2 x^{(Q-1)/2} K_{Q-1}(2 sqrt(x)) / Gamma(Q).
// At x = 0 the density is finite for Q >= 2 (value 1/(Q-1)) and diverges
// logarithmically for Q = 1.
inline double branch_pdf(int q, double x) {
    if (q < 1) throw std::domain_error("branch_pdf: need Q >= 1");
    if (x < 0.0) throw std::domain_error("branch_pdf: need x >= 0");
    if (x == 0.0) {
        if (q == 1) return std::numeric_limits<double>::infinity();
        return 1.0 / (q - 1);
    }
    return 2.0 * std::pow(x, 0.5 * (q - 1)) * bessel_k_int(q - 1, 2.0 * std::sqrt(x)) /
           gamma_int(q);
}

// Closed-form CDF of the same branch power (used as a KS reference).
inline double branch_cdf(int q, double x) {
    if (x <= 0.0) return 0.0;
    return onoff_branch_outage(x, q);
}

// Least-squares slope of -log10(outage) against log10(rho) on an evenly
// spaced dB grid. The high-SNR slope is the diversity order.
inline double diversity_slope(const std::function<double(double)>& outage_at_db,
                              double rho_low_db, double rho_high_db, int points = 9) {
    if (!(rho_high_db > rho_low_db)) {
        throw std::invalid_argument("diversity_slope: need rho_high_db > rho_low_db");
    }
    if (points < 5) throw std::invalid_argument("diversity_slope: need at least 5 grid points");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < points; ++i) {
        const double db = rho_low_db + (rho_high_db - rho_low_db) * i / (points - 1);
        const double p = outage_at_db(db);
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw std::domain_error("diversity_slope: outage must be positive on the range");
        }
        const double x = db / 10.0;  // log10(rho)
        const double y = -std::log10(p);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = points;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace irsnoma
