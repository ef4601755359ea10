#pragma once

// Experiment plumbing behind the CLI: spec files (flat key = value), the
// figure presets, CSV emission, and the simulate / analytic / validate
// commands.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "irsnoma/simulator.hpp"

namespace irsnoma {

struct ExperimentSpec {
    SystemConfig config;
    std::vector<Scheme> schemes{Scheme::onoff};
    double snr_start_db = 0.0;
    double snr_stop_db = 30.0;
    double snr_step_db = 3.0;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    std::string out_path = "outage.csv";

    bool operator==(const ExperimentSpec&) const = default;

    void validate() const {
        config.validate();
        if (schemes.empty()) throw std::invalid_argument("spec: no schemes selected");
        if (!(snr_step_db > 0.0)) throw std::invalid_argument("spec: SNR step must be > 0");
        if (snr_stop_db < snr_start_db) {
            throw std::invalid_argument("spec: SNR stop must be >= start");
        }
        if (trials < 1) throw std::invalid_argument("spec: need trials >= 1");
    }

    std::vector<double> grid() const {
        const int count =
            static_cast<int>(std::floor((snr_stop_db - snr_start_db) / snr_step_db + 1e-9)) + 1;
        std::vector<double> g;
        g.reserve(count);
        for (int i = 0; i < count; ++i) g.push_back(snr_start_db + i * snr_step_db);
        return g;
    }
};

inline Scheme parse_scheme(std::string_view s) {
    if (s == "ideal") return Scheme::ideal;
    if (s == "dft") return Scheme::dft;
    if (s == "onoff") return Scheme::onoff;
    throw std::invalid_argument("unknown scheme '" + std::string(s) +
                                "' (expected ideal, dft or onoff)");
}

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline double parse_double(std::string_view s, const std::string& where) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument(where + ": invalid number '" + std::string(s) + "'");
    }
    return v;
}

inline std::uint64_t parse_u64(std::string_view s, const std::string& where) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument(where + ": invalid unsigned integer '" + std::string(s) + "'");
    }
    return v;
}

inline int parse_int(std::string_view s, const std::string& where) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument(where + ": invalid integer '" + std::string(s) + "'");
    }
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(trim(s.substr(start)));
            break;
        }
        parts.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
    return parts;
}

}  // namespace detail

// Parses "start:stop:step" (dB values) into the spec's three SNR fields.
inline void parse_snr_range(std::string_view text, ExperimentSpec& spec,
                            const std::string& where = "snr_db") {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3) {
        throw std::invalid_argument(where + ": expected START:STOP:STEP, got '" +
                                    std::string(text) + "'");
    }
    spec.snr_start_db = detail::parse_double(parts[0], where);
    spec.snr_stop_db = detail::parse_double(parts[1], where);
    spec.snr_step_db = detail::parse_double(parts[2], where);
}

// Flat key = value experiment file. '#' starts a comment, blank lines are
// ignored, unknown keys are errors. Messages carry "<name>:<line>:".
inline ExperimentSpec parse_spec_text(std::string_view text, const std::string& name = "<spec>") {
    ExperimentSpec spec;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++lineno;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) continue;

        const std::string where = name + ":" + std::to_string(lineno);
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument(where + ": expected 'key = value'");
        }
        const std::string_view key = detail::trim(line.substr(0, eq));
        const std::string_view value = detail::trim(line.substr(eq + 1));

        if (key == "m") {
            spec.config.bs_antennas = detail::parse_int(value, where);
        } else if (key == "k") {
            spec.config.beams = detail::parse_int(value, where);
        } else if (key == "n") {
            spec.config.irs_elements = detail::parse_int(value, where);
        } else if (key == "p") {
            spec.config.onoff_blocks = detail::parse_int(value, where);
        } else if (key == "q") {
            spec.config.onoff_block_size = detail::parse_int(value, where);
        } else if (key == "alpha1_sq") {
            spec.config.alpha1_sq = detail::parse_double(value, where);
        } else if (key == "alpha2_sq") {
            spec.config.alpha2_sq = detail::parse_double(value, where);
        } else if (key == "rate_bpcu") {
            spec.config.rate_bpcu = detail::parse_double(value, where);
        } else if (key == "snr_db") {
            parse_snr_range(value, spec, where);
        } else if (key == "schemes") {
            spec.schemes.clear();
            for (const auto part : detail::split(value, ',')) {
                if (part.empty()) throw std::invalid_argument(where + ": empty scheme name");
                spec.schemes.push_back(parse_scheme(part));
            }
        } else if (key == "trials") {
            spec.trials = detail::parse_u64(value, where);
        } else if (key == "seed") {
            spec.seed = detail::parse_u64(value, where);
        } else if (key == "out") {
            spec.out_path = std::string(value);
        } else {
            throw std::invalid_argument(where + ": unknown key '" + std::string(key) + "'");
        }
    }
    spec.config.snr = db_to_linear(spec.snr_start_db);
    return spec;
}

inline ExperimentSpec parse_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open spec file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec_text(buf.str(), path);
}

inline std::string emit_spec(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << "m = " << spec.config.bs_antennas << "\n";
    out << "k = " << spec.config.beams << "\n";
    out << "n = " << spec.config.irs_elements << "\n";
    out << "p = " << spec.config.onoff_blocks << "\n";
    out << "q = " << spec.config.onoff_block_size << "\n";
    out << "alpha1_sq = " << detail::format_double(spec.config.alpha1_sq) << "\n";
    out << "alpha2_sq = " << detail::format_double(spec.config.alpha2_sq) << "\n";
    out << "rate_bpcu = " << detail::format_double(spec.config.rate_bpcu) << "\n";
    out << "snr_db = " << detail::format_double(spec.snr_start_db) << ":"
        << detail::format_double(spec.snr_stop_db) << ":"
        << detail::format_double(spec.snr_step_db) << "\n";
    out << "schemes = ";
    for (std::size_t i = 0; i < spec.schemes.size(); ++i) {
        if (i) out << ",";
        out << scheme_name(spec.schemes[i]);
    }
    out << "\n";
    out << "trials = " << spec.trials << "\n";
    out << "seed = " << spec.seed << "\n";
    out << "out = " << spec.out_path << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Presets mirroring the standard experiment setups (alpha1^2 = 4/5,
// alpha2^2 = 1/5, M = 4 throughout).

struct Preset {
    std::string name;
    std::string description;
    std::vector<ExperimentSpec> specs;
};

namespace detail {

inline ExperimentSpec make_spec(int k, int n, int p, int q, double rate,
                                std::vector<Scheme> schemes, double start_db, double stop_db,
                                double step_db, std::uint64_t trials, const std::string& out) {
    ExperimentSpec spec;
    spec.config.bs_antennas = 4;
    spec.config.beams = k;
    spec.config.irs_elements = n;
    spec.config.onoff_blocks = p;
    spec.config.onoff_block_size = q;
    spec.config.alpha1_sq = 0.8;
    spec.config.alpha2_sq = 0.2;
    spec.config.rate_bpcu = rate;
    spec.schemes = std::move(schemes);
    spec.snr_start_db = start_db;
    spec.snr_stop_db = stop_db;
    spec.snr_step_db = step_db;
    spec.trials = trials;
    spec.seed = 1;
    spec.out_path = out;
    spec.config.snr = db_to_linear(start_db);
    return spec;
}

}  // namespace detail

inline const std::vector<Preset>& builtin_presets() {
    static const std::vector<Preset> presets = [] {
        using detail::make_spec;
        const std::vector<Scheme> all{Scheme::ideal, Scheme::dft, Scheme::onoff};
        const std::vector<Scheme> onoff{Scheme::onoff};
        std::vector<Preset> p;
        p.push_back({"fig2a",
                     "single pair (K=1), N=12, Q=1: all three schemes, R=2 BPCU",
                     {make_spec(1, 12, 12, 1, 2.0, all, 0, 30, 3, 1000000, "fig2a.csv")}});
        p.push_back({"fig2b",
                     "single pair (K=1), N=12: on-off with Q in {1,2,3}, R=2 BPCU",
                     {make_spec(1, 12, 12, 1, 2.0, onoff, 0, 60, 5, 1000000, "fig2b.csv"),
                      make_spec(1, 12, 6, 2, 2.0, onoff, 0, 60, 5, 1000000, "fig2b.csv"),
                      make_spec(1, 12, 4, 3, 2.0, onoff, 0, 60, 5, 1000000, "fig2b.csv")}});
        p.push_back({"fig3a",
                     "two pairs (K=2), N=4, Q=1: all three schemes, R=1 BPCU",
                     {make_spec(2, 4, 4, 1, 1.0, all, 0, 50, 5, 1000000, "fig3a.csv")}});
        p.push_back({"fig3b",
                     "two pairs (K=2), Q=1: on-off with N in {4,8,12}, R=1 BPCU",
                     {make_spec(2, 4, 4, 1, 1.0, onoff, 0, 50, 5, 1000000, "fig3b.csv"),
                      make_spec(2, 8, 8, 1, 1.0, onoff, 0, 50, 5, 1000000, "fig3b.csv"),
                      make_spec(2, 12, 12, 1, 1.0, onoff, 0, 50, 5, 1000000, "fig3b.csv")}});
        p.push_back({"fig3c",
                     "two pairs (K=2), N=20: on-off with Q in {1,2,4}, R=1 BPCU",
                     {make_spec(2, 20, 20, 1, 1.0, onoff, 0, 50, 5, 1000000, "fig3c.csv"),
                      make_spec(2, 20, 10, 2, 1.0, onoff, 0, 50, 5, 1000000, "fig3c.csv"),
                      make_spec(2, 20, 5, 4, 1.0, onoff, 0, 50, 5, 1000000, "fig3c.csv")}});
        return p;
    }();
    return presets;
}

inline const Preset* find_preset(const std::string& name) {
    for (const auto& p : builtin_presets()) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// CSV emission. Deterministic: shortest round-trip decimal for doubles,
// LF line endings, empty cells where a value does not apply.

namespace detail {

inline bool analytic_cell_applies(const SystemConfig& cfg, Scheme scheme) {
    return scheme == Scheme::onoff && analytic_applies(cfg);
}

inline bool floor_cell_applies(const SystemConfig& cfg, Scheme scheme) {
    return scheme == Scheme::onoff && cfg.beams >= 2 && cfg.onoff_block_size == 1;
}

inline void write_config_cells(std::ostream& out, const SystemConfig& cfg) {
    out << cfg.beams << "," << cfg.bs_antennas << "," << cfg.irs_elements << ","
        << cfg.onoff_blocks << "," << cfg.onoff_block_size << ","
        << format_double(cfg.alpha1_sq) << "," << format_double(cfg.alpha2_sq) << ","
        << format_double(cfg.rate_bpcu);
}

}  // namespace detail

inline void write_simulate_csv(const std::vector<ExperimentSpec>& plan, std::ostream& out,
                               unsigned workers = 0) {
    out << "scheme,rho_db,K,M,N,P,Q,alpha1_sq,alpha2_sq,rate_bpcu,trials,failures,"
           "outage_mc,ci_low,ci_high,outage_analytic,floor\n";
    for (const auto& spec : plan) {
        const SweepResult result =
            sweep(spec.config, spec.schemes, spec.grid(), spec.trials, spec.seed, workers);
        for (const auto& point : result.points) {
            SystemConfig cfg = spec.config;
            cfg.snr = db_to_linear(point.rho_db);
            for (const auto& est : point.estimates) {
                out << scheme_name(est.scheme) << "," << detail::format_double(point.rho_db)
                    << ",";
                detail::write_config_cells(out, cfg);
                out << "," << est.trials << "," << est.failures << ","
                    << detail::format_double(est.p_hat) << ","
                    << detail::format_double(est.ci_low) << ","
                    << detail::format_double(est.ci_high) << ",";
                if (point.analytic && detail::analytic_cell_applies(cfg, est.scheme)) {
                    out << detail::format_double(*point.analytic);
                }
                out << ",";
                if (point.floor_value && detail::floor_cell_applies(cfg, est.scheme)) {
                    out << detail::format_double(*point.floor_value);
                }
                out << "\n";
            }
        }
    }
}

// Analytic-only rows (no Monte Carlo columns). Specs without a closed form
// are skipped with a note; the plan must contain at least one that applies.
inline void write_analytic_csv(const std::vector<ExperimentSpec>& plan, std::ostream& out,
                               std::ostream& diag) {
    bool any = false;
    for (const auto& spec : plan) {
        if (analytic_applies(spec.config)) {
            any = true;
        }
    }
    if (!any) {
        throw std::invalid_argument(
            "analytic: no closed form applies to any spec in the plan "
            "(need K = 1, or K >= 2 with Q = 1)");
    }
    out << "scheme,rho_db,K,M,N,P,Q,alpha1_sq,alpha2_sq,rate_bpcu,outage_analytic,floor\n";
    for (const auto& spec : plan) {
        if (!analytic_applies(spec.config)) {
            diag << "note: skipping K=" << spec.config.beams
                 << " Q=" << spec.config.onoff_block_size
                 << " spec: no closed form for K >= 2 with Q >= 2\n";
            continue;
        }
        SystemConfig cfg = spec.config;
        for (double db : spec.grid()) {
            cfg.snr = db_to_linear(db);
            out << "onoff," << detail::format_double(db) << ",";
            detail::write_config_cells(out, cfg);
            out << "," << detail::format_double(analytic_outage(cfg)) << ",";
            if (cfg.beams >= 2 && cfg.onoff_block_size == 1) {
                out << detail::format_double(onoff_outage_floor(cfg));
            }
            out << "\n";
        }
    }
}

// ---------------------------------------------------------------------------
// Validation: Monte Carlo vs closed form, z-scored per grid point.

inline double z_score(const OutageEstimate& est, double analytic) {
    const double n = static_cast<double>(est.trials);
    const double var = analytic * (1.0 - analytic) / n;
    if (var <= 0.0) {
        return est.p_hat == analytic ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return (est.p_hat - analytic) / std::sqrt(var);
}

struct ValidationPoint {
    OutageEstimate estimate;
    double analytic = 0.0;
    double rho_db = 0.0;
};

// Shared gate: prints one line per point and returns nonzero if any |z|
// exceeds 4.
inline int validate_points(const std::vector<ValidationPoint>& points, std::ostream& report) {
    int status = 0;
    double worst = 0.0;
    for (const auto& [est, analytic, rho_db] : points) {
        const double z = z_score(est, analytic);
        const bool ok = std::abs(z) <= 4.0;
        if (!ok) status = 1;
        report << (ok ? "ok   " : "FAIL ") << "scheme=" << scheme_name(est.scheme)
               << " K=" << est.config.beams << " N=" << est.config.irs_elements
               << " Q=" << est.config.onoff_block_size
               << " rho_db=" << detail::format_double(rho_db)
               << " mc=" << detail::format_double(est.p_hat)
               << " analytic=" << detail::format_double(analytic)
               << " z=" << detail::format_double(z);
        if (est.low_failure_count) report << " (low failure count; consider more trials)";
        report << "\n";
        if (std::abs(z) > std::abs(worst)) worst = z;
    }
    report << (status == 0 ? "PASS" : "FAIL") << ": worst z = " << detail::format_double(worst)
           << " over " << points.size() << " points\n";
    return status;
}

inline int cmd_validate(const std::vector<ExperimentSpec>& plan, std::ostream& report,
                        unsigned workers = 0) {
    std::vector<ValidationPoint> points;
    for (const auto& spec : plan) {
        spec.validate();
        if (!analytic_applies(spec.config)) {
            throw std::invalid_argument(
                "validate: no closed form applies (need K = 1, or K >= 2 with Q = 1)");
        }
        SystemConfig cfg = spec.config;
        for (double db : spec.grid()) {
            cfg.snr = db_to_linear(db);
            points.push_back({estimate_outage(cfg, Scheme::onoff, spec.trials, spec.seed, workers),
                              analytic_outage(cfg), db});
        }
    }
    return validate_points(points, report);
}

namespace detail {

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

}  // namespace detail

inline int cmd_simulate(const std::vector<ExperimentSpec>& plan, unsigned workers = 0) {
    if (plan.empty()) throw std::invalid_argument("simulate: empty plan");
    for (const auto& spec : plan) spec.validate();
    std::ofstream out = detail::open_output(plan.front().out_path);
    write_simulate_csv(plan, out, workers);
    if (!out) throw std::runtime_error("write failed: " + plan.front().out_path);
    return 0;
}

inline int cmd_analytic(const std::vector<ExperimentSpec>& plan, std::ostream& diag) {
    if (plan.empty()) throw std::invalid_argument("analytic: empty plan");
    for (const auto& spec : plan) spec.validate();
    std::ofstream out = detail::open_output(plan.front().out_path);
    write_analytic_csv(plan, out, diag);
    if (!out) throw std::runtime_error("write failed: " + plan.front().out_path);
    return 0;
}

}  // namespace irsnoma
