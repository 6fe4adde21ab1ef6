#include "bwex/bernstein.hpp"

#include <algorithm>
#include <cmath>

#include "bwex/errors.hpp"
#include "bwex/quadrature.hpp"

namespace bwex {

namespace {

void check_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError(std::string(what) + ": argument must lie in [0,1]");
    }
}

void check_degree(std::size_t degree) {
    if (degree > BinomialTable::kMaxDegree) {
        throw CapabilityError("Bernstein degree exceeds 1000");
    }
}

// x^k with 0^0 = 1.
double ipow(double x, std::size_t k) { return k == 0 ? 1.0 : std::pow(x, static_cast<double>(k)); }

// C(m,k) u^k (1-u)^(m-k) for every k = 0..m.
std::vector<double> binomial_pmf(std::size_t m, double u) {
    std::vector<double> pmf(m + 1, 0.0);
    if (u == 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (u == 1.0) {
        pmf[m] = 1.0;
        return pmf;
    }
    const auto& binom = BinomialTable::instance();
    if (m <= BinomialTable::kExactBinomialRows) {
        for (std::size_t k = 0; k <= m; ++k) {
            pmf[k] = static_cast<double>(binom.exact(m, k)) * ipow(u, k) * ipow(1.0 - u, m - k);
        }
        return pmf;
    }
    const double lu = std::log(u);
    const double lv = std::log1p(-u);
    for (std::size_t k = 0; k <= m; ++k) {
        pmf[k] = std::exp(binom.log_choose(m, k) + static_cast<double>(k) * lu + static_cast<double>(m - k) * lv);
    }
    return pmf;
}

}  // namespace

BinomialTable::BinomialTable() {
    rows_.resize(kExactBinomialRows + 1);
    for (std::size_t n = 0; n <= kExactBinomialRows; ++n) {
        rows_[n].assign(n + 1, 1);
        for (std::size_t k = 1; k < n; ++k) {
            rows_[n][k] = rows_[n - 1][k - 1] + rows_[n - 1][k];
        }
    }
}

const BinomialTable& BinomialTable::instance() {
    static const BinomialTable table;
    return table;
}

std::uint64_t BinomialTable::exact(std::size_t n, std::size_t k) const {
    if (n > kExactBinomialRows) {
        throw CapabilityError("exact binomial requested beyond the integer triangle");
    }
    return k > n ? 0 : rows_[n][k];
}

double BinomialTable::log_choose(std::size_t n, std::size_t k) const {
    if (k > n) {
        return -INFINITY;
    }
    if (n <= kExactBinomialRows) {
        return std::log(static_cast<double>(rows_[n][k]));
    }
    if (n > kMaxDegree + 1) {
        throw CapabilityError("binomial degree exceeds the supported range");
    }
    const auto dn = static_cast<double>(n);
    const auto dk = static_cast<double>(k);
    return std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0);
}

double BinomialTable::choose(std::size_t n, std::size_t k) const {
    if (k > n) {
        return 0.0;
    }
    if (n <= kExactBinomialRows) {
        return static_cast<double>(rows_[n][k]);
    }
    return std::exp(log_choose(n, k));
}

std::vector<double> bernstein_all(std::size_t degree, double rho) {
    check_unit(rho, "bernstein_all");
    check_degree(degree);
    std::vector<double> b(degree + 1, 0.0);
    b[0] = 1.0;
    const double s = 1.0 - rho;
    for (std::size_t d = 1; d <= degree; ++d) {
        for (std::size_t k = d; k >= 1; --k) {
            b[k] = s * b[k] + rho * b[k - 1];
        }
        b[0] *= s;
    }
    return b;
}

double bernstein_basis(std::size_t n, std::size_t degree, double rho) {
    if (n > degree) {
        throw DomainError("bernstein_basis: n must satisfy 0 <= n <= L");
    }
    check_unit(rho, "bernstein_basis");
    check_degree(degree);
    const auto& binom = BinomialTable::instance();
    if (degree <= BinomialTable::kExactBinomialRows) {
        return binom.choose(degree, n) * ipow(rho, n) * ipow(1.0 - rho, degree - n);
    }
    if ((rho == 0.0 && n > 0) || (rho == 1.0 && n < degree)) {
        return 0.0;
    }
    const double log_val = binom.log_choose(degree, n) + (n == 0 ? 0.0 : static_cast<double>(n) * std::log(rho)) +
                           (n == degree ? 0.0 : static_cast<double>(degree - n) * std::log1p(-rho));
    return std::exp(log_val);
}

double bezier_sum(const BetaFunction& beta, std::size_t degree, double rho) {
    if (degree < 1) {
        throw DomainError("bezier_sum: L must be >= 1");
    }
    check_unit(rho, "bezier_sum");
    check_degree(degree);
    std::vector<double> c(degree + 1);
    for (std::size_t n = 0; n <= degree; ++n) {
        c[n] = beta(static_cast<double>(n) / static_cast<double>(degree));
    }
    const double s = 1.0 - rho;
    for (std::size_t r = 1; r <= degree; ++r) {
        for (std::size_t i = 0; i + r <= degree; ++i) {
            c[i] = s * c[i] + rho * c[i + 1];
        }
    }
    return c[0];
}

double H_explicit(std::size_t n, std::size_t degree, double u) {
    if (n > degree) {
        throw DomainError("H_explicit: n must satisfy 0 <= n <= L");
    }
    check_unit(u, "H_explicit");
    check_degree(degree);
    const auto& binom = BinomialTable::instance();
    const double lead = ipow(u, n + 1);
    double sum = 0.0;
    for (std::size_t i = n; i <= degree; ++i) {
        sum += binom.choose(i, n) * ipow(1.0 - u, i - n);
    }
    return lead * sum / static_cast<double>(degree + 1);
}

double H_primitive(std::size_t n, std::size_t degree, double v) {
    if (n > degree) {
        throw DomainError("H_primitive: n must satisfy 0 <= n <= L");
    }
    check_unit(v, "H_primitive");
    return adaptive_simpson([&](double t) { return bernstein_basis(n, degree, t); }, 0.0, v,
                            {.abs_tol = 1e-12, .max_depth = 40});
}

double phi_discrete(const BetaFunction& beta, std::size_t degree, double u) {
    if (degree < 1) {
        throw DomainError("phi_discrete: L must be >= 1");
    }
    check_unit(u, "phi_discrete");
    check_degree(degree);
    const std::vector<double> pmf = binomial_pmf(degree + 1, u);
    // tail[n] = P[Bin(L+1, u) >= n+1], accumulated from the top
    double tail = 0.0;
    double sum = 0.0;
    for (std::size_t n = degree + 1; n-- > 0;) {
        tail += pmf[n + 1];
        sum += beta(static_cast<double>(n) / static_cast<double>(degree)) * tail;
    }
    return sum / static_cast<double>(degree + 1);
}

double phi_discrete_explicit(const BetaFunction& beta, std::size_t degree, double u) {
    if (degree < 1) {
        throw DomainError("phi_discrete: L must be >= 1");
    }
    double sum = 0.0;
    for (std::size_t n = 0; n <= degree; ++n) {
        sum += beta(static_cast<double>(n) / static_cast<double>(degree)) * H_explicit(n, degree, u);
    }
    return sum;
}

double phi_limit(const BetaFunction& beta, double rho) {
    check_unit(rho, "phi_limit");
    return adaptive_simpson([&](double t) { return beta(t); }, 0.0, rho, {.abs_tol = 1e-10, .max_depth = 40});
}

double sup_gap(const BetaFunction& beta, std::size_t degree, std::size_t gridsize) {
    if (gridsize < 2) {
        throw DomainError("sup_gap: gridsize must be >= 2");
    }
    double gap = 0.0;
    for (std::size_t i = 0; i < gridsize; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(gridsize - 1);
        gap = std::max(gap, std::abs(phi_discrete(beta, degree, u) - phi_limit(beta, u)));
    }
    return gap;
}

double bezier_sup_gap(const BetaFunction& beta, std::size_t degree, std::size_t gridsize) {
    if (gridsize < 2) {
        throw DomainError("bezier_sup_gap: gridsize must be >= 2");
    }
    double gap = 0.0;
    for (std::size_t i = 0; i < gridsize; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(gridsize - 1);
        gap = std::max(gap, std::abs(bezier_sum(beta, degree, u) - beta(u)));
    }
    return gap;
}

}  // namespace bwex
