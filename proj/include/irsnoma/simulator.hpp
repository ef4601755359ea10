#pragma once

// Monte Carlo outage estimation: repeated channel draws, scheme-specific
// reflection vectors, SINR, outage counting. Trial t always draws from
// stream index t, so results are bitwise reproducible for any worker count,
// and all schemes at a grid point share the same channel realizations.

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "irsnoma/analytics.hpp"
#include "irsnoma/channel.hpp"
#include "irsnoma/link_metrics.hpp"
#include "irsnoma/reflect.hpp"

namespace irsnoma {

struct OutageEstimate {
    double p_hat = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    double ci_low = 0.0;   // Wilson score interval, 95%
    double ci_high = 0.0;
    Scheme scheme = Scheme::onoff;
    SystemConfig config;
    std::uint64_t seed = 0;
    bool low_failure_count = false;  // fewer than 50 failures: consider more trials
};

// Joint outcome counts for two schemes evaluated on common realizations.
struct PairedComparison {
    Scheme first = Scheme::ideal;
    Scheme second = Scheme::onoff;
    std::uint64_t trials = 0;
    std::uint64_t both_fail = 0;
    std::uint64_t only_first = 0;
    std::uint64_t only_second = 0;

    // p_hat(first) - p_hat(second) and its paired standard error.
    double mean_diff() const {
        return (static_cast<double>(only_first) - static_cast<double>(only_second)) / trials;
    }
    double diff_stderr() const {
        const double n = static_cast<double>(trials);
        const double m = mean_diff();
        const double msq = (static_cast<double>(only_first) + static_cast<double>(only_second)) / n;
        const double var = std::max(0.0, msq - m * m);
        return std::sqrt(var / n);
    }
};

struct MultiEstimate {
    std::vector<OutageEstimate> estimates;      // one per requested scheme
    std::vector<PairedComparison> comparisons;  // one per scheme pair (i < j)
};

struct SweepPoint {
    double rho_db = 0.0;
    std::vector<OutageEstimate> estimates;
    std::vector<PairedComparison> comparisons;
    std::optional<double> analytic;     // exact closed form where one exists
    std::optional<double> floor_value;  // high-SNR floor (K >= 2, Q = 1)
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

inline unsigned default_worker_count() {
    if (const char* env = std::getenv("IRSNOMA_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace detail {

inline void wilson_interval(std::uint64_t failures, std::uint64_t trials, double& lo, double& hi) {
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(failures) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    lo = std::max(0.0, center - half);
    hi = std::min(1.0, center + half);
}

struct TrialCounts {
    std::vector<std::uint64_t> failures;             // per scheme
    std::vector<std::vector<std::uint64_t>> joint;   // joint failures, i < j

    explicit TrialCounts(std::size_t schemes)
        : failures(schemes, 0), joint(schemes, std::vector<std::uint64_t>(schemes, 0)) {}

    void add(const TrialCounts& other) {
        for (std::size_t i = 0; i < failures.size(); ++i) {
            failures[i] += other.failures[i];
            for (std::size_t j = 0; j < failures.size(); ++j) joint[i][j] += other.joint[i][j];
        }
    }
};

inline void run_trial_range(const SystemConfig& cfg, const std::vector<Scheme>& schemes,
                            const Codebook* dft, const Codebook* onoff, std::uint64_t begin,
                            std::uint64_t end, std::uint64_t seed, TrialCounts& counts) {
    const double threshold = std::exp2(cfg.rate_bpcu) - 1.0;
    std::vector<bool> fails(schemes.size());
    ChannelRealization real;  // workspace reused across trials
    for (std::uint64_t t = begin; t < end; ++t) {
        RandomStream stream(seed, t);
        draw_realization_into(cfg, 1, stream, real);
        for (std::size_t s = 0; s < schemes.size(); ++s) {
            ReflectVector theta;
            switch (schemes[s]) {
                case Scheme::ideal: theta = ideal_theta(real); break;
                case Scheme::dft: theta = select_theta(*dft, real, cfg); break;
                case Scheme::onoff: theta = select_theta(*onoff, real, cfg); break;
            }
            fails[s] = sinr_far(theta, real, cfg).sinr < threshold;
            if (fails[s]) ++counts.failures[s];
        }
        for (std::size_t i = 0; i < schemes.size(); ++i) {
            for (std::size_t j = i + 1; j < schemes.size(); ++j) {
                if (fails[i] && fails[j]) ++counts.joint[i][j];
            }
        }
    }
}

}  // namespace detail

// Estimates outage for several schemes on common channel draws.
inline MultiEstimate estimate_outage_multi(const SystemConfig& cfg,
                                           const std::vector<Scheme>& schemes,
                                           std::uint64_t trials, std::uint64_t seed,
                                           unsigned workers = 0) {
    cfg.validate();
    if (schemes.empty()) throw std::invalid_argument("estimate_outage_multi: no schemes");
    if (trials < 1) throw std::invalid_argument("estimate_outage_multi: need trials >= 1");
    for (Scheme s : schemes) {
        if (s == Scheme::ideal && cfg.irs_elements < cfg.beams) {
            throw std::invalid_argument("estimate_outage_multi: ideal scheme needs N >= K");
        }
    }

    Codebook dft, onoff;
    const Codebook* dft_ptr = nullptr;
    const Codebook* onoff_ptr = nullptr;
    for (Scheme s : schemes) {
        if (s == Scheme::dft && !dft_ptr) {
            dft = build_dft_codebook(cfg.irs_elements);
            dft_ptr = &dft;
        }
        if (s == Scheme::onoff && !onoff_ptr) {
            onoff = build_onoff_codebook(cfg.irs_elements, cfg.onoff_blocks, cfg.onoff_block_size);
            onoff_ptr = &onoff;
        }
    }

    unsigned nworkers = workers > 0 ? workers : default_worker_count();
    if (static_cast<std::uint64_t>(nworkers) > trials) nworkers = static_cast<unsigned>(trials);

    detail::TrialCounts total(schemes.size());
    if (nworkers <= 1) {
        detail::run_trial_range(cfg, schemes, dft_ptr, onoff_ptr, 0, trials, seed, total);
    } else {
        std::vector<detail::TrialCounts> partial(nworkers, detail::TrialCounts(schemes.size()));
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(nworkers);
        const std::uint64_t chunk = trials / nworkers;
        const std::uint64_t rem = trials % nworkers;
        std::uint64_t begin = 0;
        for (unsigned w = 0; w < nworkers; ++w) {
            const std::uint64_t end = begin + chunk + (w < rem ? 1 : 0);
            pool.emplace_back([&, w, begin, end]() {
                try {
                    detail::run_trial_range(cfg, schemes, dft_ptr, onoff_ptr, begin, end, seed,
                                            partial[w]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
            begin = end;
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
        for (const auto& p : partial) total.add(p);
    }

    MultiEstimate out;
    for (std::size_t s = 0; s < schemes.size(); ++s) {
        OutageEstimate est;
        est.trials = trials;
        est.failures = total.failures[s];
        est.p_hat = static_cast<double>(est.failures) / trials;
        detail::wilson_interval(est.failures, trials, est.ci_low, est.ci_high);
        est.scheme = schemes[s];
        est.config = cfg;
        est.seed = seed;
        est.low_failure_count = est.failures < 50;
        out.estimates.push_back(std::move(est));
    }
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        for (std::size_t j = i + 1; j < schemes.size(); ++j) {
            PairedComparison cmp;
            cmp.first = schemes[i];
            cmp.second = schemes[j];
            cmp.trials = trials;
            cmp.both_fail = total.joint[i][j];
            cmp.only_first = total.failures[i] - cmp.both_fail;
            cmp.only_second = total.failures[j] - cmp.both_fail;
            out.comparisons.push_back(cmp);
        }
    }
    return out;
}

inline OutageEstimate estimate_outage(const SystemConfig& cfg, Scheme scheme, std::uint64_t trials,
                                      std::uint64_t seed, unsigned workers = 0) {
    return estimate_outage_multi(cfg, {scheme}, trials, seed, workers).estimates.front();
}

inline bool analytic_applies(const SystemConfig& cfg) {
    return cfg.beams == 1 || cfg.onoff_block_size == 1;
}

inline double analytic_outage(const SystemConfig& cfg) {
    return cfg.beams == 1 ? onoff_outage_single(cfg) : onoff_outage_multi(cfg);
}

// Runs the schemes over an SNR grid (dB, strictly increasing), attaching the
// closed-form values where they exist (on-off: K = 1 any Q, or K >= 2 Q = 1).
inline SweepResult sweep(SystemConfig cfg, const std::vector<Scheme>& schemes,
                         const std::vector<double>& rho_db_grid, std::uint64_t trials,
                         std::uint64_t seed, unsigned workers = 0) {
    if (rho_db_grid.empty()) throw std::invalid_argument("sweep: empty SNR grid");
    for (std::size_t i = 1; i < rho_db_grid.size(); ++i) {
        if (!(rho_db_grid[i] > rho_db_grid[i - 1])) {
            throw std::invalid_argument("sweep: SNR grid must be strictly increasing");
        }
    }
    SweepResult result;
    for (double db : rho_db_grid) {
        cfg.snr = db_to_linear(db);
        SweepPoint point;
        point.rho_db = db;
        MultiEstimate multi = estimate_outage_multi(cfg, schemes, trials, seed, workers);
        point.estimates = std::move(multi.estimates);
        point.comparisons = std::move(multi.comparisons);
        if (analytic_applies(cfg)) {
            point.analytic = analytic_outage(cfg);
            if (cfg.beams >= 2 && cfg.onoff_block_size == 1) {
                point.floor_value = onoff_outage_floor(cfg);
            }
        }
        result.points.push_back(std::move(point));
    }
    return result;
}

}  // namespace irsnoma
