#include <doctest.h>

#include <cmath>
#include <memory>

#include "bwex/errors.hpp"
#include "bwex/kmc.hpp"

using namespace bwex;

namespace {

std::shared_ptr<const Model> make(std::size_t n, std::size_t ell, BetaFunction beta = BetaFunction::ssep()) {
    return std::make_shared<const Model>(ModelParams{.n = n, .ell = ell, .beta = std::move(beta)});
}

}  // namespace

TEST_CASE("local equilibrium sampling") {
    Engine rng = make_stream(1, 0);
    CHECK(sample_initial([](double) { return 0.0; }, 50, rng).particles() == 0);
    CHECK(sample_initial([](double) { return 1.0; }, 50, rng).particles() == 50);
    CHECK_THROWS_AS((void)sample_initial([](double) { return 1.2; }, 50, rng), DomainError);

    double mean = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        mean += static_cast<double>(sample_initial([](double) { return 0.5; }, 256, rng).particles()) / 256.0;
    }
    mean /= 100.0;
    // standard error 0.5 / sqrt(25600), so 0.01 is over 3 sigma
    CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("initial state") {
    const auto model = make(32, 4);
    const auto empty = build_state(Configuration(32), model, 1);
    CHECK(empty.total_rate() == 0.0);
    CHECK(empty.frozen());
    CHECK(empty.clock() == 0.0);

    Configuration alt(32);
    for (std::size_t x = 0; x < 32; x += 2) {
        alt.set(x, true);
    }
    const auto state = build_state(alt, model, 1);
    CHECK(state.total_rate() == 32.0);
    CHECK(state.audit() == 0.0);
}

TEST_CASE("frozen lattices advance the clock without events") {
    auto state = build_state(Configuration::filled(16, true), make(16, 3), 2);
    CHECK_FALSE(state.step().has_value());
    state.run_until(0.7);
    CHECK(state.clock() == 0.7);
    CHECK(state.events() == 0);
}

TEST_CASE("run_until") {
    Engine rng = make_stream(3, 0);
    auto cfg = sample_initial([](double) { return 0.4; }, 64, rng);
    const std::size_t particles = cfg.particles();
    auto state = build_state(cfg, make(64, 8, BetaFunction::cosine_preset()), 3);
    state.run_until(0.0);
    CHECK(state.config() == cfg);
    CHECK(state.events() == 0);
    state.run_until(0.01);
    CHECK(state.clock() == 0.01);
    CHECK(state.events() > 0);
    CHECK(state.config().particles() == particles);
    CHECK_THROWS_AS(state.run_until(0.005), DomainError);
}

TEST_CASE("rate cache is refreshed exactly after every event") {
    Engine rng = make_stream(4, 0);
    const auto cfg = sample_initial([](double) { return 0.5; }, 64, rng);
    for (const auto& beta : {BetaFunction::ssep(), BetaFunction::affine_preset(), BetaFunction::cosine_preset()}) {
        auto state = build_state(cfg, make(64, 8, beta), 4);
        for (int k = 0; k < 1000; ++k) {
            REQUIRE(state.step().has_value());
            REQUIRE(state.audit() == 0.0);
        }
        double sum = 0.0;
        for (double r : state.rates()) {
            sum += r;
        }
        CHECK(state.total_rate() == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("debug audit over many events") {
    Engine rng = make_stream(5, 0);
    const auto cfg = sample_initial([](double) { return 0.5; }, 128, rng);
    auto state = build_state(cfg, make(128, 12, BetaFunction::cosine_preset()), 5);
    state.set_debug_audit(true);
    for (int k = 0; k < 10000; ++k) {
        (void)state.step();
    }
    CHECK(state.audit() <= 1e-9);
    for (int k = 0; k < (1 << 16); ++k) {
        (void)state.step();
    }
    CHECK(state.events() > SimState::kAuditInterval);
    CHECK(state.audit() <= 1e-9);
}

TEST_CASE("a single SSEP particle diffuses with variance 2t") {
    const std::size_t n = 64;
    const auto model = make(n, 8);
    const double t = 0.01;
    const int walkers = 2000;
    double second_moment = 0.0;
    for (int w = 0; w < walkers; ++w) {
        Configuration cfg(n);
        cfg.set(0, true);
        auto state = build_state(cfg, model, 1000 + static_cast<std::uint64_t>(w));
        state.run_until(t);
        std::size_t pos = 0;
        while (!state.config().get(pos)) {
            ++pos;
        }
        const double d = pos <= n / 2 ? static_cast<double>(pos) : static_cast<double>(pos) - static_cast<double>(n);
        second_moment += (d / n) * (d / n);
    }
    second_moment /= walkers;
    // relative standard error of a variance estimate is about sqrt(2 / walkers)
    CHECK(second_moment == doctest::Approx(2.0 * t).epsilon(4.0 * std::sqrt(2.0 / walkers)));
}

TEST_CASE("epsilon snapping and coarse density") {
    const auto g = snap_epsilon(0.3, 10);
    CHECK(g.sites_per_cell == 3);
    CHECK(g.cells == 4);
    CHECK(g.epsilon == doctest::Approx(0.3));
    CHECK(snap_epsilon(0.001, 10).sites_per_cell == 1);
    CHECK_THROWS_AS((void)snap_epsilon(0.0, 10), DomainError);
    CHECK_THROWS_AS((void)snap_epsilon(1.0, 10), DomainError);

    const auto half = Configuration::parse("1111111100000000");
    const auto f = coarse_density(half, 0.25);
    REQUIRE(f.size() == 4);
    CHECK(f[0] == 1.0);
    CHECK(f[1] == 1.0);
    CHECK(f[2] == 0.0);
    CHECK(f[3] == 0.0);

    CHECK(coarse_density(Configuration(16), 0.125).max() == 0.0);
    const auto whole = coarse_density(half, 0.99);
    REQUIRE(whole.size() == 1);
    CHECK(whole[0] == 0.5);

    // partial last cell keeps exact mass accounting
    const auto cfg = Configuration::parse("1011001110");
    const auto p = coarse_density(cfg, 0.3);
    REQUIRE(p.size() == 4);
    CHECK_FALSE(p.uniform());
    CHECK(p[3] == 0.0);
    CHECK(p.mass() == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("block gap diagnostic") {
    CHECK(block_gap_diagnostic(Configuration::filled(64, true), 4, 9, 3) == 0.0);
    Engine rng = make_stream(6, 0);
    const auto cfg = sample_initial([](double) { return 0.5; }, 64, rng);
    CHECK(block_gap_diagnostic(cfg, 5, 5, 0) == 0.0);
    CHECK_THROWS_AS((void)block_gap_diagnostic(cfg, 0, 5, 0), DomainError);

    double big = 0.0;
    double small = 0.0;
    for (int draw = 0; draw < 50; ++draw) {
        const auto eq = sample_initial([](double) { return 0.5; }, 256, rng);
        big += block_gap_diagnostic(eq, 32, 8, 40);
        small += block_gap_diagnostic(eq, 8, 2, 40);
    }
    CHECK(big < small);
}

TEST_CASE("same seed, same trajectory") {
    const auto model = make(64, 8, BetaFunction::affine_preset());
    Engine rng = make_stream(7, 0);
    const auto cfg = sample_initial([](double) { return 0.3; }, 64, rng);
    auto a = build_state(cfg, model, 99);
    auto b = build_state(cfg, model, 99);
    a.run_until(0.02);
    b.run_until(0.02);
    CHECK(a.config() == b.config());
    CHECK(a.events() == b.events());
}
