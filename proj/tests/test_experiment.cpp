#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "irsnoma/experiment.hpp"

using irsnoma::ExperimentSpec;
using irsnoma::Scheme;

namespace fs = std::filesystem;

namespace {

ExperimentSpec tiny_spec() {
    ExperimentSpec spec;
    spec.config.bs_antennas = 4;
    spec.config.beams = 1;
    spec.config.irs_elements = 4;
    spec.config.onoff_blocks = 4;
    spec.config.onoff_block_size = 1;
    spec.config.rate_bpcu = 2.0;
    spec.schemes = {Scheme::onoff};
    spec.snr_start_db = 0.0;
    spec.snr_stop_db = 10.0;
    spec.snr_step_db = 5.0;
    spec.trials = 2000;
    spec.seed = 12;
    spec.out_path = "tiny.csv";
    spec.config.snr = irsnoma::db_to_linear(spec.snr_start_db);
    return spec;
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("spec text parses and every preset round-trips through emit/parse") {
    const std::string text =
        "# fig-2a style run\n"
        "m = 4\n"
        "k = 1\n"
        "n = 12\n"
        "p = 12\n"
        "q = 1\n"
        "alpha1_sq = 0.8\n"
        "alpha2_sq = 0.2\n"
        "rate_bpcu = 2\n"
        "snr_db = 0:30:3\n"
        "schemes = ideal,dft,onoff\n"
        "trials = 1000\n"
        "seed = 7\n"
        "out = run.csv\n";
    const ExperimentSpec spec = irsnoma::parse_spec_text(text);
    CHECK(spec.config.irs_elements == 12);
    CHECK(spec.schemes.size() == 3);
    CHECK(spec.trials == 1000);
    CHECK(spec.grid().size() == 11);
    CHECK(spec.out_path == "run.csv");
    CHECK(irsnoma::parse_spec_text(irsnoma::emit_spec(spec)) == spec);

    for (const auto& preset : irsnoma::builtin_presets()) {
        for (const auto& ps : preset.specs) {
            CHECK(irsnoma::parse_spec_text(irsnoma::emit_spec(ps)) == ps);
            CHECK_NOTHROW(ps.validate());
        }
    }
}

TEST_CASE("spec parse errors carry file and line") {
    const auto check_message = [](const std::string& text, const std::string& needle) {
        try {
            irsnoma::parse_spec_text(text, "run.cfg");
            FAIL("expected a parse error");
        } catch (const std::invalid_argument& e) {
            INFO(e.what());
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    check_message("m = 4\nbogus_key = 3\n", "run.cfg:2");
    check_message("m = four\n", "run.cfg:1");
    check_message("m 4\n", "expected 'key = value'");
    check_message("schemes = onoff,warp\n", "unknown scheme");
    check_message("snr_db = 0:30\n", "START:STOP:STEP");
}

TEST_CASE("spec validation catches bad grids and trial counts") {
    ExperimentSpec spec = tiny_spec();
    CHECK_NOTHROW(spec.validate());

    spec.snr_step_db = 0.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = tiny_spec();
    spec.snr_stop_db = -5.0;  // stop below start: no grid
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = tiny_spec();
    spec.trials = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = tiny_spec();
    spec.schemes.clear();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("builtin presets cover the five figure setups") {
    REQUIRE(irsnoma::builtin_presets().size() == 5);
    CHECK(irsnoma::find_preset("missing") == nullptr);

    const irsnoma::Preset* fig2a = irsnoma::find_preset("fig2a");
    REQUIRE(fig2a != nullptr);
    REQUIRE(fig2a->specs.size() == 1);
    CHECK(fig2a->specs[0].config.beams == 1);
    CHECK(fig2a->specs[0].config.irs_elements == 12);
    CHECK(fig2a->specs[0].schemes.size() == 3);
    CHECK(fig2a->specs[0].config.rate_bpcu == 2.0);

    const irsnoma::Preset* fig3b = irsnoma::find_preset("fig3b");
    REQUIRE(fig3b != nullptr);
    REQUIRE(fig3b->specs.size() == 3);
    CHECK(fig3b->specs[0].config.irs_elements == 4);
    CHECK(fig3b->specs[1].config.irs_elements == 8);
    CHECK(fig3b->specs[2].config.irs_elements == 12);
    for (const auto& s : fig3b->specs) {
        CHECK(s.config.beams == 2);
        CHECK(s.config.onoff_block_size == 1);
        CHECK(s.config.rate_bpcu == 1.0);
    }
}

TEST_CASE("simulate CSV: header, shape, cell rules, determinism") {
    ExperimentSpec spec = tiny_spec();
    std::ostringstream out1, out2;
    irsnoma::write_simulate_csv({spec}, out1, 2);
    irsnoma::write_simulate_csv({spec}, out2, 1);

    // Byte-identical regardless of worker count and across runs.
    CHECK(out1.str() == out2.str());

    const std::string header = first_line(out1.str());
    CHECK(header ==
          "scheme,rho_db,K,M,N,P,Q,alpha1_sq,alpha2_sq,rate_bpcu,trials,failures,"
          "outage_mc,ci_low,ci_high,outage_analytic,floor");

    std::istringstream lines(out1.str());
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        // K=1 on-off rows carry an analytic value but no floor.
        CHECK(line.find("onoff,") == 0);
        CHECK(line.back() == ',');  // empty floor cell
    }
    CHECK(rows == 3);  // 3 grid points x 1 scheme
}

TEST_CASE("simulate CSV floor column appears only for K>=2 with Q=1") {
    ExperimentSpec spec = tiny_spec();
    spec.config.beams = 2;
    spec.config.rate_bpcu = 1.0;
    spec.schemes = {Scheme::ideal, Scheme::onoff};
    std::ostringstream out;
    irsnoma::write_simulate_csv({spec}, out, 2);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        const bool is_onoff = line.rfind("onoff,", 0) == 0;
        if (is_onoff) {
            CHECK(line.back() != ',');  // floor cell filled
        } else {
            // Non-analytic schemes leave both trailing cells empty.
            CHECK(line.substr(line.size() - 2) == ",,");
        }
    }
}

TEST_CASE("analytic CSV: column set, sure-outage column, no-closed-form guard") {
    ExperimentSpec spec = tiny_spec();
    std::ostringstream out, diag;
    irsnoma::write_analytic_csv({spec}, out, diag);
    CHECK(first_line(out.str()) ==
          "scheme,rho_db,K,M,N,P,Q,alpha1_sq,alpha2_sq,rate_bpcu,outage_analytic,floor");

    // tau <= 0 everywhere: the outage column is identically 1.
    ExperimentSpec sure = tiny_spec();
    sure.config.alpha1_sq = 0.2;
    sure.config.alpha2_sq = 0.8;  // eps = 3 > alpha1^2/alpha2^2
    std::ostringstream out_sure, diag_sure;
    irsnoma::write_analytic_csv({sure}, out_sure, diag_sure);
    std::istringstream lines(out_sure.str());
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        // outage_analytic cell is exactly 1, floor cell empty (K = 1).
        CHECK(line.rfind(",1,") == line.size() - 3);
    }
    CHECK(rows == 3);

    // K >= 2 with Q >= 2 has no closed form at all.
    ExperimentSpec none = tiny_spec();
    none.config.beams = 2;
    none.config.irs_elements = 4;
    none.config.onoff_blocks = 2;
    none.config.onoff_block_size = 2;
    std::ostringstream out_none, diag_none;
    CHECK_THROWS_AS(irsnoma::write_analytic_csv({none}, out_none, diag_none),
                    std::invalid_argument);

    // K >= 2, Q = 1 rows fill both exact and floor columns.
    ExperimentSpec multi = tiny_spec();
    multi.config.beams = 2;
    multi.config.rate_bpcu = 1.0;
    std::ostringstream out_multi, diag_multi;
    irsnoma::write_analytic_csv({multi}, out_multi, diag_multi);
    std::istringstream mlines(out_multi.str());
    std::getline(mlines, line);
    while (std::getline(mlines, line)) {
        CHECK(line.back() != ',');
    }
}

TEST_CASE("fig2a preset yields a three-scheme sweep CSV") {
    std::vector<ExperimentSpec> plan = irsnoma::find_preset("fig2a")->specs;
    plan[0].trials = 200;
    plan[0].snr_stop_db = 6.0;
    plan[0].snr_step_db = 6.0;
    std::ostringstream out;
    irsnoma::write_simulate_csv(plan, out, 2);
    CHECK(out.str().find("\nideal,") != std::string::npos);
    CHECK(out.str().find("\ndft,") != std::string::npos);
    CHECK(out.str().find("\nonoff,") != std::string::npos);
}

TEST_CASE("fig3b preset: the analytic floor shrinks as N grows") {
    const std::vector<ExperimentSpec>& plan = irsnoma::find_preset("fig3b")->specs;
    std::vector<double> floors;
    for (const auto& spec : plan) {
        irsnoma::SystemConfig cfg = spec.config;
        cfg.snr = irsnoma::db_to_linear(50.0);
        floors.push_back(irsnoma::onoff_outage_floor(cfg));
    }
    REQUIRE(floors.size() == 3);
    CHECK(floors[0] > floors[1]);
    CHECK(floors[1] > floors[2]);
}

TEST_CASE("cmd_simulate writes the CSV file; invalid specs fail before I/O") {
    const fs::path dir = fs::temp_directory_path() / "irsnoma_test_csv";
    fs::create_directories(dir);
    const fs::path csv = dir / "out.csv";
    fs::remove(csv);

    ExperimentSpec spec = tiny_spec();
    spec.out_path = csv.string();
    CHECK(irsnoma::cmd_simulate({spec}, 2) == 0);
    REQUIRE(fs::exists(csv));
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("scheme,rho_db", 0) == 0);

    const fs::path absent = dir / "never.csv";
    ExperimentSpec bad = tiny_spec();
    bad.out_path = absent.string();
    bad.snr_step_db = -1.0;
    CHECK_THROWS_AS(irsnoma::cmd_simulate({bad}, 2), std::invalid_argument);
    CHECK_FALSE(fs::exists(absent));

    fs::remove_all(dir);
}

TEST_CASE("cmd_validate passes coherent comparisons and flags mismatches") {
    ExperimentSpec spec = tiny_spec();
    spec.trials = 100000;
    std::ostringstream report;
    CHECK(irsnoma::cmd_validate({spec}, report, 2) == 0);
    CHECK(report.str().find("PASS") != std::string::npos);

    // K=2, Q=1 against the multi-pair closed form.
    ExperimentSpec multi = tiny_spec();
    multi.config.beams = 2;
    multi.config.rate_bpcu = 1.0;
    multi.trials = 100000;
    std::ostringstream report2;
    CHECK(irsnoma::cmd_validate({multi}, report2, 2) == 0);

    // Sure-outage spec: every trial fails, z is exactly zero.
    ExperimentSpec sure = tiny_spec();
    sure.config.alpha1_sq = 0.2;
    sure.config.alpha2_sq = 0.8;
    sure.trials = 5000;
    std::ostringstream report3;
    CHECK(irsnoma::cmd_validate({sure}, report3, 2) == 0);

    // No closed form: precondition failure.
    ExperimentSpec none = tiny_spec();
    none.config.beams = 2;
    none.config.irs_elements = 4;
    none.config.onoff_blocks = 2;
    none.config.onoff_block_size = 2;
    std::ostringstream report4;
    CHECK_THROWS_AS(irsnoma::cmd_validate({none}, report4, 2), std::invalid_argument);

    // Deliberate mismatch: K=2 simulation z-scored against the K=1 closed
    // form must trip the gate.
    irsnoma::SystemConfig sim_cfg = multi.config;
    sim_cfg.snr = irsnoma::db_to_linear(30.0);
    const irsnoma::OutageEstimate est =
        irsnoma::estimate_outage(sim_cfg, Scheme::onoff, 100000, 3, 2);
    irsnoma::SystemConfig ana_cfg = sim_cfg;
    ana_cfg.beams = 1;
    std::ostringstream report5;
    CHECK(irsnoma::validate_points({{est, irsnoma::onoff_outage_single(ana_cfg), 30.0}}, report5) != 0);
    CHECK(report5.str().find("FAIL") != std::string::npos);
}
