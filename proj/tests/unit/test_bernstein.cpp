#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bwex/bernstein.hpp"
#include "bwex/errors.hpp"

using namespace bwex;

TEST_CASE("binomials") {
    const auto& t = BinomialTable::instance();
    CHECK(t.exact(10, 3) == 120);
    CHECK(t.exact(66, 33) == 7219428434016265740ULL);
    CHECK(t.choose(5, 0) == 1.0);
    CHECK(t.choose(5, 6) == 0.0);
    // log-space beyond the exact rows: C(100, 50) ~ 1.0089134454556417e29
    CHECK(t.choose(100, 50) == doctest::Approx(1.0089134454556417e29).epsilon(1e-12));
    CHECK(std::exp(t.log_choose(40, 20)) == doctest::Approx(137846528820.0).epsilon(1e-12));
}

TEST_CASE("bernstein basis values") {
    CHECK(bernstein_basis(0, 7, 0.0) == 1.0);
    CHECK(bernstein_basis(3, 7, 0.0) == 0.0);
    CHECK(bernstein_basis(7, 7, 1.0) == 1.0);
    CHECK(bernstein_basis(1, 2, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(bernstein_basis(2, 5, 0.3) == doctest::Approx(10 * 0.09 * std::pow(0.7, 3)).epsilon(1e-14));
    CHECK_THROWS_AS((void)bernstein_basis(4, 3, 0.5), DomainError);
    CHECK_THROWS_AS((void)bernstein_basis(1, 3, 1.5), DomainError);
    CHECK_THROWS_AS((void)bernstein_basis(1, 3, -0.1), DomainError);
}

TEST_CASE("partition of unity and nonnegativity") {
    double worst = 0.0;
    for (std::size_t degree : {1UL, 2UL, 5UL, 16UL, 64UL, 100UL, 256UL}) {
        for (int i = 0; i < 1024; ++i) {
            const double rho = i / 1023.0;
            const auto all = bernstein_all(degree, rho);
            double sum = 0.0;
            double sum_direct = 0.0;
            for (std::size_t n = 0; n <= degree; ++n) {
                CHECK(all[n] >= 0.0);
                sum += all[n];
                sum_direct += bernstein_basis(n, degree, rho);
            }
            worst = std::max({worst, std::abs(sum - 1.0), std::abs(sum_direct - 1.0)});
        }
    }
    CHECK(worst <= 1e-12);
    // recurrence agrees with the closed form
    const auto all = bernstein_all(40, 0.37);
    for (std::size_t n = 0; n <= 40; ++n) {
        CHECK(all[n] == doctest::Approx(bernstein_basis(n, 40, 0.37)).epsilon(1e-12));
    }
}

TEST_CASE("bezier sum") {
    const auto c = BetaFunction::constant(0.4);
    const auto affine = BetaFunction::affine_preset();
    for (double rho : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        CHECK(bezier_sum(c, 9, rho) == doctest::Approx(0.4).epsilon(1e-14));
        // Bernstein operators reproduce affine functions
        CHECK(bezier_sum(affine, 9, rho) == doctest::Approx((1.0 + rho) / 2.0).epsilon(1e-14));
    }
    const auto cosine = BetaFunction::cosine_preset();
    CHECK(bezier_sup_gap(cosine, 64, 512) < bezier_sup_gap(cosine, 16, 512));
    // Bernstein error for a C^2 function is at most sup|beta''| / (8 L)
    const double second = std::pow(2.0 * std::numbers::pi, 2) / 4.0;
    for (std::size_t degree : {8UL, 32UL, 128UL}) {
        CHECK(bezier_sup_gap(cosine, degree, 512) <= second / (8.0 * static_cast<double>(degree)));
    }
}

TEST_CASE("explicit H") {
    for (double u : {0.0, 0.1, 0.5, 0.8, 1.0}) {
        CHECK(H_explicit(0, 1, u) == doctest::Approx(u - u * u / 2.0).epsilon(1e-15));
    }
    for (std::size_t degree : {1UL, 4UL, 17UL, 32UL}) {
        for (std::size_t n = 0; n <= degree; ++n) {
            CHECK(H_explicit(n, degree, 0.0) == 0.0);
            CHECK(H_explicit(n, degree, 1.0) == doctest::Approx(1.0 / static_cast<double>(degree + 1)));
            double prev = 0.0;
            for (int i = 1; i <= 20; ++i) {
                const double v = H_explicit(n, degree, i / 20.0);
                CHECK(v >= prev - 1e-15);  // flat near u = 1 up to rounding
                prev = v;
            }
        }
    }
}

TEST_CASE("primitive of the basis") {
    for (std::size_t m : {0UL, 3UL, 10UL}) {
        CHECK(H_primitive(m, 10, 1.0) == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
    }
    CHECK(H_primitive(2, 5, 0.0) == 0.0);
    for (double v : {0.2, 0.6, 1.0}) {
        CHECK(H_primitive(1, 1, v) == doctest::Approx(v * v / 2.0).epsilon(1e-12));
        CHECK(H_explicit(1, 1, v) == doctest::Approx(v * v / 2.0).epsilon(1e-15));
    }
}

TEST_CASE("explicit and integral forms agree") {
    double worst = 0.0;
    for (std::size_t degree = 1; degree <= 32; ++degree) {
        for (std::size_t n = 0; n <= degree; ++n) {
            for (int i = 0; i < 64; ++i) {
                const double u = i / 63.0;
                worst = std::max(worst, std::abs(H_explicit(n, degree, u) - H_primitive(n, degree, u)));
            }
        }
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("discrete diffusivity") {
    const auto ssep = BetaFunction::ssep();
    const auto cosine = BetaFunction::cosine_preset();
    for (std::size_t degree : {1UL, 4UL, 64UL}) {
        CHECK(phi_discrete(cosine, degree, 0.0) == 0.0);
        for (int i = 0; i <= 16; ++i) {
            const double u = i / 16.0;
            CHECK(phi_discrete(ssep, degree, u) == doctest::Approx(u).epsilon(1e-14));
            CHECK(phi_discrete(cosine, degree, u) ==
                  doctest::Approx(phi_discrete_explicit(cosine, degree, u)).epsilon(1e-13));
        }
    }
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double v = phi_discrete(cosine, 12, i / 200.0);
        CHECK(v > prev);
        prev = v;
    }
    // right end point is the Riemann sum of beta on the grid n/L
    for (std::size_t degree : {4UL, 16UL, 64UL}) {
        double riemann = 0.0;
        for (std::size_t k = 0; k <= degree; ++k) {
            riemann += cosine(static_cast<double>(k) / static_cast<double>(degree));
        }
        riemann /= static_cast<double>(degree + 1);
        CHECK(phi_discrete(cosine, degree, 1.0) == doctest::Approx(riemann).epsilon(1e-14));
    }
    const double limit = phi_limit(cosine, 1.0);
    CHECK(std::abs(phi_discrete(cosine, 64, 1.0) - limit) < std::abs(phi_discrete(cosine, 4, 1.0) - limit));
}

TEST_CASE("derivative of the discrete diffusivity is the Bezier sum") {
    const auto cosine = BetaFunction::cosine_preset();
    const std::size_t degree = 16;
    for (double u : {0.2, 0.45, 0.7}) {
        auto err = [&](double d) {
            const double fd = (phi_discrete(cosine, degree, u + d) - phi_discrete(cosine, degree, u - d)) / (2.0 * d);
            return std::abs(fd - bezier_sum(cosine, degree, u));
        };
        CHECK(err(1e-4) < 1e-6);
        CHECK(err(1e-3) / err(5e-4) == doctest::Approx(4.0).epsilon(0.02));
        CHECK(err(1e-3) / err(1e-4) == doctest::Approx(100.0).epsilon(0.05));
    }
}

TEST_CASE("limit diffusivity") {
    const auto affine = BetaFunction::affine_preset();
    for (double rho : {0.0, 0.3, 0.6, 1.0}) {
        CHECK(phi_limit(BetaFunction::ssep(), rho) == doctest::Approx(rho).epsilon(1e-12));
        CHECK(phi_limit(affine, rho) == doctest::Approx(rho / 2.0 + rho * rho / 4.0).epsilon(1e-10));
    }
    CHECK(phi_limit(affine, 0.0) == 0.0);
    CHECK(phi_limit(BetaFunction::cosine_preset(), 1.0) == doctest::Approx(0.75).epsilon(1e-10));
    CHECK_THROWS_AS((void)phi_limit(affine, 1.2), DomainError);
}

TEST_CASE("sup gap") {
    const auto cosine = BetaFunction::cosine_preset();
    CHECK(sup_gap(BetaFunction::ssep(), 8, 257) <= 1e-13);
    CHECK(sup_gap(BetaFunction::ssep(), 64, 257) <= 1e-13);
    double prev = 1.0;
    for (std::size_t degree : {8UL, 16UL, 32UL, 64UL}) {
        const double g = sup_gap(cosine, degree, 257);
        CHECK(g >= 0.0);
        CHECK(g < prev);
        prev = g;
    }
    CHECK_THROWS_AS((void)sup_gap(cosine, 8, 1), DomainError);
}
