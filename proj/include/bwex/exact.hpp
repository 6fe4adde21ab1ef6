#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bwex/model.hpp"

namespace bwex {

/// Exact verification on the full state space {0,1}^N.
///
/// States are indexed by their N-bit integer value (bit x = eta(x)); every
/// function or measure on the state space is a dense vector of length 2^N.
namespace exact {

inline constexpr std::size_t kMaxGeneratorSites = 20;
inline constexpr std::size_t kMaxGradientSites = 14;
inline constexpr std::size_t kMaxDirichletSites = 16;

using StateVector = std::vector<double>;

/// Rate matrix of the unscaled dynamics. Off-diagonal entries live on the
/// transitions eta -> theta_{x,x+1} eta, stored as rate(state, x); the
/// diagonal is minus the row sum.
class GeneratorMatrix {
public:
    GeneratorMatrix(std::size_t n, std::vector<double> rates);

    [[nodiscard]] std::size_t sites() const noexcept { return n_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return std::size_t{1} << n_; }

    /// Rate of the exchange across bond {x, x+1} from `state`.
    [[nodiscard]] double rate(std::uint64_t state, std::size_t x) const noexcept { return rates_[state * n_ + x]; }
    /// State reached by the exchange across bond {x, x+1}.
    [[nodiscard]] std::uint64_t target(std::uint64_t state, std::size_t x) const noexcept;

    /// Q(from, to); zero for pairs not connected by a single exchange.
    [[nodiscard]] double entry(std::uint64_t from, std::uint64_t to) const;
    [[nodiscard]] double diagonal(std::uint64_t state) const;

    /// (Q f)(eta).
    [[nodiscard]] StateVector apply(const StateVector& f) const;
    /// (mu Q)(eta) = sum_{eta'} mu(eta') Q(eta', eta).
    [[nodiscard]] StateVector left_apply(const StateVector& mu) const;

    /// max over states of |sum_{eta'} Q(eta, eta')|.
    [[nodiscard]] double max_row_sum() const;

private:
    std::size_t n_;
    std::vector<double> rates_;
};

[[nodiscard]] Configuration state_config(std::uint64_t state, std::size_t n);

/// Bernoulli product measure nu_alpha on {0,1}^N.
class ProductMeasure {
public:
    ProductMeasure(double alpha, std::size_t n);
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double weight(std::uint64_t state) const noexcept;
    [[nodiscard]] StateVector weights() const;

private:
    double alpha_;
    std::size_t n_;
    std::vector<double> by_count_;
};

/// Product measure with site-dependent marginals profile[x].
[[nodiscard]] StateVector product_distribution(const std::vector<double>& profile);

[[nodiscard]] GeneratorMatrix build_generator(const Model& model);

/// max_eta |(nu_alpha Q)(eta)|.
[[nodiscard]] double stationarity_residual(const GeneratorMatrix& q, double alpha);

/// max over transitions of |nu(eta) q(eta, eta') - nu(eta') q(eta', eta)|.
[[nodiscard]] double detailed_balance_residual(const GeneratorMatrix& q, double alpha);

struct GradientResiduals {
    double current = 0.0;    // max |J(eta,0) + H(eta,1) - H(eta,0)|
    double generator = 0.0;  // max |L[pi_0](eta) - (J(eta,-1) - J(eta,0))|
};

[[nodiscard]] GradientResiduals gradient_identity_residual(const Model& model);

/// Generator decomposition residual:
/// max over states and the observables in `observables` of
/// |L f - sum_n beta(n/ell) B^{n,ell} f|.
[[nodiscard]] double decomposition_residual(const Model& model, const std::vector<StateVector>& observables);

/// max over states of |h - h_alt| at node 0.
[[nodiscard]] double h_representation_residual(const Model& model);

/// Quadratic form <g, -N^2 Q g> in L^2(nu_alpha), i.e. half the average
/// Dirichlet form of the diffusively scaled generator.
[[nodiscard]] double dirichlet_form(const StateVector& g, double alpha, const Model& model);
[[nodiscard]] double dirichlet_form(const StateVector& g, double alpha, const GeneratorMatrix& q);

/// sum mu log(mu / nu_alpha), with 0 log 0 = 0.
[[nodiscard]] double relative_entropy(const StateVector& mu, double alpha);

/// Per-site bound c_alpha = max_{rho in [delta, 1-delta]} KL(Bern(rho) | Bern(alpha)),
/// so that H(mu | nu_alpha) <= c_alpha N for product mu with profile in [delta, 1-delta].
[[nodiscard]] double entropy_constant(double alpha, double delta);

[[nodiscard]] double exact_expectation(const StateVector& f, double alpha);
[[nodiscard]] double exact_expectation(const std::function<double(const Configuration&)>& f, double alpha,
                                       std::size_t n);

/// Tabulates an observable on every state.
[[nodiscard]] StateVector tabulate(const std::function<double(const Configuration&)>& f, std::size_t n);

/// |int phi (eta(x)-eta(y)) g dnu + (1/2) int phi (eta(x)-eta(y)) grad_{x,y} g dnu|.
/// phi must be invariant under theta_{x,y}.
[[nodiscard]] double byparts_residual(const StateVector& phi, const StateVector& g, std::size_t x, std::size_t y,
                                      double alpha, std::size_t n);

/// Worst by-parts residual over `trials` random (phi, g) pairs, phi drawn
/// independent of sites x and y.
[[nodiscard]] double byparts_identity_check(std::size_t n, std::size_t x, std::size_t y, double alpha,
                                            std::size_t trials, std::uint64_t seed);

}  // namespace exact
}  // namespace bwex
