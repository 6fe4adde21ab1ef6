#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bwex/beta.hpp"

namespace bwex {

/// Binomial coefficients: exact integer Pascal triangle through
/// `kExactBinomialRows`, log-gamma beyond. Degrees are capped at
/// `kMaxDegree`.
class BinomialTable {
public:
    static constexpr std::size_t kExactBinomialRows = 66;
    static constexpr std::size_t kMaxDegree = 1000;

    static const BinomialTable& instance();

    /// Exact C(n, k); requires n <= kExactBinomialRows.
    [[nodiscard]] std::uint64_t exact(std::size_t n, std::size_t k) const;
    /// log C(n, k) for any n <= kMaxDegree + 1.
    [[nodiscard]] double log_choose(std::size_t n, std::size_t k) const;
    /// C(n, k) as a double.
    [[nodiscard]] double choose(std::size_t n, std::size_t k) const;

private:
    BinomialTable();
    std::vector<std::vector<std::uint64_t>> rows_;
};

/// All L+1 basis values B_{n,L}(rho), n = 0..L, by the convex-combination
/// (de Casteljau) recurrence. Entries are nonnegative and sum to one.
[[nodiscard]] std::vector<double> bernstein_all(std::size_t degree, double rho);

/// B_{n,L}(rho) = C(L,n) rho^n (1-rho)^(L-n).
[[nodiscard]] double bernstein_basis(std::size_t n, std::size_t degree, double rho);

/// Bezier combination sum_n beta(n/L) B_{n,L}(rho), evaluated by de Casteljau.
[[nodiscard]] double bezier_sum(const BetaFunction& beta, std::size_t degree, double rho);

/// Closed form (1/(L+1)) sum_{i=n}^{L} C(i,n) u^(n+1) (1-u)^(i-n).
[[nodiscard]] double H_explicit(std::size_t n, std::size_t degree, double u);

/// int_0^v B_{n,L}(t) dt by adaptive quadrature (abs tol 1e-12).
[[nodiscard]] double H_primitive(std::size_t n, std::size_t degree, double v);

/// Discretized diffusivity Phi_{beta,L}(u) = sum_n beta(n/L) H_{n,L}(u).
///
/// Evaluated in O(L) through the equivalent tail form
/// (1/(L+1)) sum_n beta(n/L) P[Bin(L+1, u) >= n+1].
[[nodiscard]] double phi_discrete(const BetaFunction& beta, std::size_t degree, double u);

/// Phi_{beta,L} through the explicit H_{n,L} sums; O(L^2), reference only.
[[nodiscard]] double phi_discrete_explicit(const BetaFunction& beta, std::size_t degree, double u);

/// Phi(rho) = int_0^rho beta(u) du by adaptive Simpson (abs tol 1e-10).
[[nodiscard]] double phi_limit(const BetaFunction& beta, double rho);

/// max over a uniform grid of |Phi_{beta,L} - Phi|.
[[nodiscard]] double sup_gap(const BetaFunction& beta, std::size_t degree, std::size_t gridsize);

/// max over a uniform grid of |B_{beta,L} - beta|.
[[nodiscard]] double bezier_sup_gap(const BetaFunction& beta, std::size_t degree, std::size_t gridsize);

}  // namespace bwex
