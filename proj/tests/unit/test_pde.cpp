#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bwex/bernstein.hpp"
#include "bwex/errors.hpp"
#include "bwex/pde.hpp"

using namespace bwex;
using namespace bwex::pde;

namespace {

constexpr double kPi = std::numbers::pi;

const HeatSolution kCosine(0.5, {{1, 0.25}});

double heat_max_error(std::size_t cells, double t) {
    const auto rho0 = kCosine.on_grid(0.0, uniform_edges(cells));
    const auto sol = solve(DensityField(rho0.cells()), t, SolverParams{.cells = cells, .sup_slope = 1.0});
    const auto exact = kCosine.on_grid(t, uniform_edges(cells));
    return distance(DensityField(sol.snapshots.back().cells()), DensityField(exact.cells()), Norm::linf);
}

PhiFn limit_of(const BetaFunction& beta) {
    return [beta](double r) { return phi_limit(beta, r); };
}

}  // namespace

TEST_CASE("single explicit steps") {
    const auto phi = [](double r) { return r; };
    const DensityField flat(std::vector<double>(32, 0.3));
    CHECK(step_explicit(flat, 1e-4, phi, 1.0).cells() == flat.cells());

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit;
    std::vector<double> v(128);
    for (auto& x : v) {
        x = unit(rng);
    }
    const DensityField f(v);
    const double dt = cfl_limit(128, 1.0);
    const auto next = step_explicit(f, dt, phi, 1.0);
    const double lambda = dt * 128.0 * 128.0;
    for (std::size_t i = 0; i < 128; ++i) {
        const double expect = v[i] + lambda * (v[(i + 1) % 128] - 2.0 * v[i] + v[(i + 127) % 128]);
        CHECK(next[i] == doctest::Approx(expect).epsilon(1e-14));
    }
    CHECK(std::abs(next.mass() - f.mass()) <= 1e-15);

    const auto cosine = BetaFunction::cosine_preset();
    const auto nonlinear = step_explicit(f, 0.9 * dt, limit_of(cosine), 1.0);
    CHECK(std::abs(nonlinear.mass() - f.mass()) <= 1e-15);
    CHECK_THROWS_AS((void)step_explicit(f, 1.01 * dt, phi, 1.0), ParameterError);
}

TEST_CASE("step size selection") {
    CHECK(estimate_sup_slope([](double r) { return r; }) == doctest::Approx(1.0));
    CHECK(estimate_sup_slope(limit_of(BetaFunction::affine_preset())) == doctest::Approx(1.0).epsilon(1e-3));
    const auto sol = solve(DensityField(std::vector<double>(64, 0.4)), 0.01, SolverParams{.cells = 64});
    CHECK(sol.dt <= 0.9 * cfl_limit(64, 1.0) * (1.0 + 1e-12));
    CHECK(sol.dt * static_cast<double>(sol.steps) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(sol.times.back() == 0.01);
    for (const auto& snap : sol.snapshots) {
        for (double c : snap.cells()) {
            CHECK(c == doctest::Approx(0.4).epsilon(1e-15));
        }
    }
    CHECK_THROWS_AS((void)solve(DensityField(std::vector<double>(64, 0.4)), 0.0, SolverParams{.cells = 64}),
                    DomainError);
    CHECK_THROWS_AS((void)solve(DensityField(std::vector<double>(32, 0.4)), 0.1, SolverParams{.cells = 64}),
                    ParameterError);
}

TEST_CASE("analytic heat reference") {
    CHECK(kCosine.value(0.0, 0.3) == doctest::Approx(0.5 + 0.25 * std::cos(2.0 * kPi * 0.3)));
    CHECK(kCosine.value(50.0, 0.3) == doctest::Approx(0.5));
    const double t_half = std::log(2.0) / (4.0 * kPi * kPi);
    CHECK(kCosine.value(t_half, 0.0) - 0.5 == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(heat_analytic({{1, 0.25}}, 0.5, t_half, 0.0) == doctest::Approx(0.625).epsilon(1e-14));
    CHECK_THROWS_AS(HeatSolution(0.5, {{1, 0.6}}), DomainError);
    // closed-form cell averages agree with quadrature
    const auto avg = cell_averages([](double u) { return kCosine.value(0.0, u); }, 16);
    const auto closed = kCosine.on_grid(0.0, uniform_edges(16));
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(avg[i] == doctest::Approx(closed[i]).epsilon(1e-13));
    }
}

TEST_CASE("heat case accuracy and second-order convergence") {
    const double e256 = heat_max_error(256, 0.05);
    const double e128 = heat_max_error(128, 0.05);
    CHECK(e256 <= 5e-4);
    CHECK(e128 / e256 >= 3.0);
    CHECK(e128 / e256 <= 5.0);
}

TEST_CASE("conservation and maximum principle for nonlinear diffusivity") {
    for (const auto& beta : {BetaFunction::affine_preset(), BetaFunction::cosine_preset()}) {
        const auto rho0 = cell_averages(
            [](double u) { return 0.5 + 0.3 * std::sin(2.0 * kPi * u) + 0.15 * std::cos(6.0 * kPi * u); }, 128);
        const auto sol = solve(rho0, 0.02, SolverParams{.cells = 128, .phi = limit_of(beta), .sup_slope = 1.0,
                                                        .snapshot_stride = 16});
        for (const auto& snap : sol.snapshots) {
            CHECK(std::abs(snap.mass() - rho0.mass()) <= 1e-12);
            CHECK(snap.min() >= rho0.min() - 1e-14);
            CHECK(snap.max() <= rho0.max() + 1e-14);
        }
    }
}

TEST_CASE("requested output times are interpolated") {
    const auto rho0 = kCosine.on_grid(0.0, uniform_edges(64));
    const auto sol = solve(DensityField(rho0.cells()), 0.01, SolverParams{.cells = 64, .sup_slope = 1.0},
                           {0.00123, 0.005});
    bool found = false;
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
        if (sol.times[k] == 0.00123) {
            found = true;
        }
        if (k > 0) {
            CHECK(sol.times[k] > sol.times[k - 1]);
        }
    }
    CHECK(found);
    const auto mid = sol.at(0.00123);
    const auto exact = kCosine.on_grid(0.00123, uniform_edges(64));
    CHECK(distance(DensityField(mid.cells()), DensityField(exact.cells()), Norm::linf) < 1e-3);
}

TEST_CASE("faster diffusion damps the first mode faster") {
    const auto rho0 = kCosine.on_grid(0.0, uniform_edges(128));
    const DensityField start(rho0.cells());
    const auto fast = solve(start, 0.02, SolverParams{.cells = 128, .sup_slope = 1.0});
    const auto slow = solve(start, 0.02, SolverParams{.cells = 128, .phi = limit_of(BetaFunction::cosine_preset()),
                                                      .sup_slope = 1.0});
    CHECK(cosine_amplitude(fast.snapshots.back(), 1) <= cosine_amplitude(slow.snapshots.back(), 1) + 1e-6);
    // cell averaging and the projection each contribute one sinc factor
    const double sinc = std::sin(kPi / 128) / (kPi / 128);
    CHECK(cosine_amplitude(start, 1) == doctest::Approx(0.25 * sinc * sinc).epsilon(1e-12));
}

TEST_CASE("weak residual") {
    const auto rho0 = DensityField(kCosine.on_grid(0.0, uniform_edges(256)).cells());
    const PhiFn identity = [](double r) { return r; };
    const auto sol = solve(rho0, 0.05, SolverParams{.cells = 256, .sup_slope = 1.0});
    CHECK(std::abs(weak_residual(sol, rho0, cosine_test(0), 0.05, identity)) <= 1e-12);
    CHECK(weak_residual(sol, rho0, cosine_test(1), 0.0, identity) == 0.0);
    for (const auto& g : {cosine_test(1), sine_test(1), cosine_test(2)}) {
        CHECK(std::abs(weak_residual(sol, rho0, g, 0.05, identity)) <= 1e-3);
        CHECK(std::abs(weak_residual(sol, rho0, g, 0.0314, identity)) <= 1e-3);
    }
    CHECK_THROWS_AS((void)weak_residual(sol, rho0, cosine_test(1), 0.06, identity), DomainError);
}

TEST_CASE("weak residual shrinks under refinement") {
    const auto phi = limit_of(BetaFunction::cosine_preset());
    double prev = 1.0;
    for (std::size_t cells : {64UL, 128UL, 256UL}) {
        const auto rho0 = cell_averages([](double u) { return 0.5 + 0.25 * std::cos(2.0 * kPi * u); }, cells);
        const auto sol = solve(rho0, 0.02, SolverParams{.cells = cells, .phi = phi, .sup_slope = 1.0});
        const double r = std::abs(weak_residual(sol, rho0, cosine_test(1), 0.02, phi));
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("discrete diffusivities converge to the limit one") {
    const auto beta = BetaFunction::cosine_preset();
    const auto rho0 = cell_averages([](double u) { return 0.5 + 0.25 * std::cos(2.0 * kPi * u); }, 64);
    auto run = [&](std::size_t degree) {
        return solve(rho0, 0.01, SolverParams{.cells = 64,
                                              .phi = [&beta, degree](double r) { return phi_discrete(beta, degree, r); },
                                              .sup_slope = 1.0})
            .snapshots.back();
    };
    const auto ref = run(64);
    CHECK(distance(run(16), ref, Norm::l1) < distance(run(4), ref, Norm::l1));
}
