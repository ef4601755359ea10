#include <catch_amalgamated.hpp>

#include <cmath>

#include "irsnoma/channel.hpp"
#include "irsnoma/link_metrics.hpp"
#include "irsnoma/reflect.hpp"

using irsnoma::ChannelRealization;
using irsnoma::ComplexMatrix;
using irsnoma::ComplexVector;
using irsnoma::RandomStream;
using irsnoma::SinrBreakdown;
using irsnoma::SystemConfig;

namespace {

// N = 1 channel with unit cascaded gain on the served beam and a chosen
// inter-pair gain; keeps the SINR arithmetic exact.
ChannelRealization unit_gain_channel(int beams, double inter_gain_sq) {
    ComplexMatrix g = ComplexMatrix::Zero(1, beams);
    g(0, 0) = 1.0;
    if (beams > 1) g(0, 1) = std::sqrt(inter_gain_sq);
    return irsnoma::make_realization(ComplexMatrix::Identity(beams, beams), g,
                                     ComplexVector::Ones(1), 1);
}

SystemConfig config_for(int m, int k, int n, double rho) {
    SystemConfig cfg;
    cfg.bs_antennas = m;
    cfg.beams = k;
    cfg.irs_elements = n;
    cfg.onoff_blocks = n;
    cfg.onoff_block_size = 1;
    cfg.alpha1_sq = 0.8;
    cfg.alpha2_sq = 0.2;
    cfg.snr = rho;
    cfg.rate_bpcu = 2.0;
    return cfg;
}

}  // namespace

TEST_CASE("sinr_far arithmetic on unit-gain channels") {
    ComplexVector theta = ComplexVector::Ones(1);

    SECTION("no interference: 0.8 / (0.2 + 0.1)") {
        const SystemConfig cfg = config_for(1, 1, 1, 10.0);
        const ChannelRealization real = unit_gain_channel(1, 0.0);
        const SinrBreakdown s = irsnoma::sinr_far(theta, real, cfg);
        CHECK(s.useful == Catch::Approx(0.8).epsilon(1e-14));
        CHECK(s.self_interference == Catch::Approx(0.2).epsilon(1e-14));
        CHECK(s.inter_pair == 0.0);
        CHECK(s.noise == Catch::Approx(0.1).epsilon(1e-14));
        CHECK(s.sinr == Catch::Approx(8.0 / 3.0).epsilon(1e-12));
    }

    SECTION("inter-pair term 0.5 drops the SINR to 1") {
        const SystemConfig cfg = config_for(2, 2, 1, 10.0);
        const ChannelRealization real = unit_gain_channel(2, 0.5);
        const SinrBreakdown s = irsnoma::sinr_far(theta, real, cfg);
        CHECK(s.inter_pair == Catch::Approx(0.5).epsilon(1e-12));
        CHECK(s.sinr == Catch::Approx(1.0).epsilon(1e-12));
    }

    SECTION("theta orthogonal to the served cascaded channel: zero SINR") {
        const SystemConfig cfg = config_for(1, 1, 2, 10.0);
        ComplexMatrix g = ComplexMatrix::Zero(2, 1);
        g(0, 0) = 1.0;
        const ChannelRealization real =
            irsnoma::make_realization(ComplexMatrix::Identity(1, 1), g, ComplexVector::Ones(2), 1);
        ComplexVector orth = ComplexVector::Zero(2);
        orth(1) = 1.0;
        const SinrBreakdown s = irsnoma::sinr_far(orth, real, cfg);
        CHECK(s.useful == 0.0);
        CHECK(s.sinr == 0.0);
    }

    SECTION("dimension mismatch is rejected") {
        const SystemConfig cfg = config_for(1, 1, 1, 10.0);
        const ChannelRealization real = unit_gain_channel(1, 0.0);
        ComplexVector wrong = ComplexVector::Ones(3);
        CHECK_THROWS_AS(irsnoma::sinr_far(wrong, real, cfg), std::invalid_argument);
    }
}

TEST_CASE("sinr identity holds on random draws") {
    const SystemConfig cfg = config_for(4, 2, 6, 50.0);
    SystemConfig cfg6 = cfg;
    cfg6.onoff_blocks = 6;
    for (int rep = 0; rep < 100; ++rep) {
        RandomStream stream(8, rep);
        const ChannelRealization real = irsnoma::draw_realization(cfg6, 1, stream);
        ComplexVector theta = irsnoma::sample_cn_matrix(6, 1, stream);
        theta.normalize();
        const SinrBreakdown s = irsnoma::sinr_far(theta, real, cfg6);
        CHECK(s.useful >= 0.0);
        CHECK(s.self_interference >= 0.0);
        CHECK(s.inter_pair >= 0.0);
        CHECK(s.noise > 0.0);
        const double recomputed = s.useful / (s.self_interference + s.inter_pair + s.noise);
        CHECK(std::abs(s.sinr - recomputed) <= 1e-12 * std::abs(recomputed));
    }
}

TEST_CASE("sinr_far is strictly increasing in rho when useful power is positive") {
    SystemConfig cfg = config_for(4, 2, 6, 1.0);
    cfg.onoff_blocks = 6;
    RandomStream stream(21, 3);
    const ChannelRealization real = irsnoma::draw_realization(cfg, 1, stream);
    ComplexVector theta = irsnoma::sample_cn_matrix(6, 1, stream);
    theta.normalize();
    double prev = -1.0;
    for (double rho : {0.1, 1.0, 10.0, 100.0, 1e4, 1e6}) {
        cfg.snr = rho;
        const double s = irsnoma::sinr_far(theta, real, cfg).sinr;
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("ideal zero-forcing suppresses inter-pair power below 1e-9 relative") {
    const SystemConfig cfg = config_for(4, 3, 8, 100.0);
    SystemConfig cfg8 = cfg;
    cfg8.onoff_blocks = 8;
    for (int rep = 0; rep < 300; ++rep) {
        RandomStream stream(606, rep);
        const ChannelRealization real = irsnoma::draw_realization(cfg8, 1, stream);
        const SinrBreakdown s = irsnoma::sinr_far(irsnoma::ideal_theta(real), real, cfg8);
        CHECK(s.inter_pair < 1e-9 * (s.useful + s.noise));
    }
}

TEST_CASE("outage predicate uses a strict base-2 threshold") {
    CHECK_FALSE(irsnoma::is_outage(3.0, 2.0));  // log2(4) == 2, not below
    CHECK(irsnoma::is_outage(2.999, 2.0));
    CHECK(irsnoma::is_outage(0.0, 2.0));
    CHECK(irsnoma::is_outage(0.0, 0.001));
    CHECK_FALSE(irsnoma::is_outage(1.0, 1.0));  // boundary again at R = 1
}
