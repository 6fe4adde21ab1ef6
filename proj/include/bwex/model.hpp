#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "bwex/beta.hpp"
#include "bwex/lattice.hpp"

namespace bwex {

/// How the exclusion indicators e01/e10 are read off a node.
///
/// `standard`: e01 = eta(0)(1 - eta(1)), e10 = (1 - eta(0)) eta(1).
/// `doubled_left`: e01 additionally carries the left-hop term
/// (1 - eta(0)) eta(1). It breaks the gradient identity and exists only so
/// the verifier can demonstrate that it does.
enum class ExclusionRule { standard, doubled_left };

struct ModelParams {
    std::size_t n = 0;
    std::size_t ell = 1;
    BetaFunction beta = BetaFunction::ssep();
    std::uint64_t seed = 0;
    ExclusionRule exclusion = ExclusionRule::standard;
};

/// ell = ceil(N^exponent), exponent in (0,1).
[[nodiscard]] std::size_t default_window(std::size_t n, double exponent = 0.5);

/// Validated parameters plus the memoized table beta(k / ell), k = 0..ell.
/// Immutable after construction.
class Model {
public:
    explicit Model(ModelParams params);

    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] std::size_t size() const noexcept { return params_.n; }
    [[nodiscard]] std::size_t ell() const noexcept { return params_.ell; }
    [[nodiscard]] const BetaFunction& beta() const noexcept { return params_.beta; }
    /// beta(k / ell).
    [[nodiscard]] double beta_at(std::size_t k) const noexcept { return beta_table_[k]; }
    [[nodiscard]] const std::vector<double>& beta_table() const noexcept { return beta_table_; }

    /// Node rate at {x, x+1} using running window sums; O(ell). Same
    /// summation order as `node_rate`, so the two agree bit for bit under
    /// the standard exclusion rule.
    [[nodiscard]] double fast_rate(const Configuration& cfg, std::size_t x) const noexcept;

private:
    ModelParams params_;
    std::vector<double> beta_table_;
};

struct ExclusionPair {
    int e01 = 0;
    int e10 = 0;
};

/// The ell+2 sites [[x-j, x-j+ell+1]] that contain window j of node x.
[[nodiscard]] Interval window_span(TorusIndex x, std::size_t j, std::size_t ell);

/// x + W_j with W_j = [[-j, -j+ell+1]] \ {0, 1}; always ell sites.
[[nodiscard]] std::vector<TorusIndex> window_sites(TorusIndex x, std::size_t j, std::size_t ell);

/// Particles in window j of node x (numerator of its exact density over ell).
[[nodiscard]] std::size_t window_count(const Configuration& cfg, TorusIndex x, std::size_t j, std::size_t ell);

[[nodiscard]] double constraint_c(const Configuration& cfg, TorusIndex x, const Model& model);

[[nodiscard]] ExclusionPair exclusion_indicators(const Configuration& cfg, TorusIndex x,
                                                 ExclusionRule rule = ExclusionRule::standard);

/// Exchange rate across the bond {x, x+1}: (e01 + e10) c.
[[nodiscard]] double node_rate(const Configuration& cfg, TorusIndex x, const Model& model);

/// Fraction of the ell+1 windows of node x whose density equals n / ell.
[[nodiscard]] double bernstein_constraint(const Configuration& cfg, TorusIndex x, std::size_t n, std::size_t ell);

/// Single-window current J^j = beta(<eta>_j)(e01 - e10) at node x.
[[nodiscard]] double current_window(const Configuration& cfg, TorusIndex x, std::size_t j, const Model& model);

/// Algebraic current across {x, x+1}, averaged over windows j = 0..ell.
[[nodiscard]] double current_J(const Configuration& cfg, TorusIndex x, const Model& model);

/// h evaluated on tau^x eta: (1/(ell+1)) sum_{n < P} beta(n / ell), P the
/// number of particles in [[x, x+ell]].
[[nodiscard]] double potential_h(const Configuration& cfg, TorusIndex x, const Model& model);

/// The same quantity through the subset-sum representation. Enumerates
/// subsets explicitly, so ell is capped at `kSubsetEnumerationLimit`.
[[nodiscard]] double potential_h_alt(const Configuration& cfg, TorusIndex x, const Model& model);
inline constexpr std::size_t kSubsetEnumerationLimit = 20;

/// g = (1/(ell+1)) sum_{j=1}^{ell} sum_{i=0}^{j-1} J^j(x + i).
[[nodiscard]] double potential_g(const Configuration& cfg, TorusIndex x, const Model& model);

/// H = h + g, so that J(x) = H(x) - H(x+1).
[[nodiscard]] double potential_H(const Configuration& cfg, TorusIndex x, const Model& model);

using ObservableFn = std::function<double(const Configuration&)>;
using ConstraintFn = std::function<double(const Configuration&, TorusIndex)>;

/// sum_x rate(x) (f(theta_{x,x+1} eta) - f(eta)); unscaled (no N^2).
[[nodiscard]] double generator_apply(const ObservableFn& f, const Configuration& cfg, const Model& model);

/// Generator with the constraint replaced by an arbitrary one, exclusion
/// indicators unchanged. Used for the Bernstein decomposition.
[[nodiscard]] double generator_apply_with(const ObservableFn& f, const Configuration& cfg, const Model& model,
                                          const ConstraintFn& constraint);

}  // namespace bwex
