#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bwex/ensemble.hpp"
#include "bwex/errors.hpp"

using namespace bwex;

namespace {

EnsembleSpec base_spec(std::size_t n, BetaFunction beta) {
    EnsembleSpec spec;
    spec.params = ModelParams{.n = n, .ell = default_window(n), .beta = std::move(beta)};
    spec.replicas = 40;
    spec.times = {0.0, 0.01, 0.05};
    spec.epsilon = 1.0 / 16.0;
    spec.master_seed = 12345;
    return spec;
}

}  // namespace

TEST_CASE("input guards") {
    auto spec = base_spec(64, BetaFunction::ssep());
    spec.replicas = 1;
    CHECK_THROWS_AS((void)ensemble_profile(spec), DomainError);
    spec.replicas = 4;
    spec.times = {0.02, 0.01};
    CHECK_THROWS_AS((void)ensemble_profile(spec), DomainError);
}

TEST_CASE("equilibrium profiles stay flat") {
    for (const auto& beta : {BetaFunction::ssep(), BetaFunction::affine_preset(), BetaFunction::cosine_preset()}) {
        auto spec = base_spec(64, beta);
        spec.initial = [](double) { return 0.35; };
        const auto res = ensemble_profile(spec);
        REQUIRE(res.mean.size() == 3);
        for (std::size_t ti = 1; ti < 3; ++ti) {
            for (std::size_t c = 0; c < res.grid.cells; ++c) {
                CHECK(std::abs(res.mean[ti][c] - 0.35) <= 4.0 * res.std_error[ti][c] + 1e-12);
            }
        }
    }
}

TEST_CASE("result does not depend on the worker count") {
    auto spec = base_spec(64, BetaFunction::cosine_preset());
    spec.initial = [](double u) { return 0.5 + 0.25 * std::cos(2.0 * std::numbers::pi * u); };
    spec.replicas = 12;
    spec.workers = 1;
    const auto serial = ensemble_profile(spec);
    spec.workers = 5;
    const auto parallel = ensemble_profile(spec);
    CHECK(serial.replica_events == parallel.replica_events);
    for (std::size_t ti = 0; ti < spec.times.size(); ++ti) {
        CHECK(serial.mean[ti].cells() == parallel.mean[ti].cells());
        CHECK(serial.std_error[ti].cells() == parallel.std_error[ti].cells());
    }
}

TEST_CASE("SSEP step profile spreads symmetrically") {
    auto spec = base_spec(128, BetaFunction::ssep());
    spec.initial = [](double u) { return (u >= 0.25 && u < 0.75) ? 1.0 : 0.0; };
    spec.replicas = 100;
    spec.times = {0.01};
    spec.workers = 2;
    const auto res = ensemble_profile(spec);
    const auto& mean = res.mean[0];
    const auto& err = res.std_error[0];
    // reflection about the step at u = 1/4 maps cell 4+i to cell 3-i and rho to 1-rho
    for (std::size_t i = 0; i < 4; ++i) {
        const double s = mean[4 + i] + mean[3 - i];
        const double se = std::hypot(err[4 + i], err[3 - i]);
        CHECK(std::abs(s - 1.0) <= 4.0 * se + 1e-12);
    }
    CHECK(mean.mass() == doctest::Approx(0.5).epsilon(1e-12));
}
