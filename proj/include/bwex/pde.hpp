#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "bwex/density_field.hpp"

namespace bwex {

/// Conservative explicit finite differences for d_t rho = d_uu Phi(rho) on
/// the unit torus.
namespace pde {

using PhiFn = std::function<double(double)>;

struct SolverParams {
    std::size_t cells = 256;
    double sigma = 0.9;  // CFL safety factor in (0,1]
    PhiFn phi = [](double r) { return r; };
    /// sup Phi'; estimated from Phi on a 4096-point grid when absent.
    std::optional<double> sup_slope;
    std::size_t snapshot_stride = 64;
};

/// max of forward differences of Phi on a uniform grid of `points` samples.
[[nodiscard]] double estimate_sup_slope(const PhiFn& phi, int points = 4096);

/// Largest stable step du^2 / (2 sup Phi').
[[nodiscard]] double cfl_limit(std::size_t cells, double sup_slope);

/// rho_i += dt/du^2 (Phi(rho_{i+1}) - 2 Phi(rho_i) + Phi(rho_{i-1})) in flux
/// form. Throws ParameterError if dt exceeds the CFL limit.
[[nodiscard]] DensityField step_explicit(const DensityField& field, double dt, const PhiFn& phi, double sup_slope);

struct Solution {
    double dt = 0.0;
    std::size_t steps = 0;
    std::vector<double> times;  // every snapshot_stride steps, plus t = 0 and t = T
    std::vector<DensityField> snapshots;

    /// Field at time t by linear interpolation between stored snapshots.
    [[nodiscard]] DensityField at(double t) const;
};

/// Integrates from rho0 to T with uniform dt = T / ceil(T / (sigma * cfl)).
/// Snapshots are stored every `snapshot_stride` steps; every requested
/// output time is added as an interpolated snapshot between the two
/// bracketing steps.
[[nodiscard]] Solution solve(const DensityField& rho0, double horizon, const SolverParams& params,
                             const std::vector<double>& output_times = {});

/// Cell averages of a profile on the uniform K-cell grid.
[[nodiscard]] DensityField cell_averages(const std::function<double(double)>& profile, std::size_t cells);

/// Superposition of cosine modes solving the heat equation d_t rho = d_uu rho:
/// mean + sum_k amp_k e^{-4 pi^2 k^2 t} cos(2 pi k u).
class HeatSolution {
public:
    HeatSolution(double mean, std::vector<std::pair<int, double>> modes);

    [[nodiscard]] double value(double t, double u) const;
    /// (1/(b-a)) int_a^b rho(t, u) du, in closed form.
    [[nodiscard]] double cell_average(double t, double a, double b) const;
    [[nodiscard]] DensityField on_grid(double t, const std::vector<double>& edges) const;
    [[nodiscard]] double mean() const noexcept { return mean_; }
    [[nodiscard]] const std::vector<std::pair<int, double>>& modes() const noexcept { return modes_; }

private:
    double mean_;
    std::vector<std::pair<int, double>> modes_;
};

[[nodiscard]] double heat_analytic(const std::vector<std::pair<int, double>>& modes, double mean, double t, double u);

/// Smooth space-time test function with the derivatives the weak form needs.
struct TestFunction {
    std::function<double(double, double)> value;    // G(s, u)
    std::function<double(double, double)> d_time;   // d_s G
    std::function<double(double, double)> d_space2; // d_uu G
};

/// Time-independent G = cos(2 pi k u) or sin(2 pi k u); k = 0 gives G = 1.
[[nodiscard]] TestFunction cosine_test(int k);
[[nodiscard]] TestFunction sine_test(int k);

/// <rho_t,G_t> - <rho_0,G_0> - int_0^t <rho_s, d_s G_s> + <Phi(rho_s), d_uu G_s> ds,
/// with midpoint rule in space and the trapezoid rule over the stored
/// snapshots in time (t must not exceed the solution horizon).
[[nodiscard]] double weak_residual(const Solution& solution, const DensityField& rho0, const TestFunction& g,
                                   double t, const PhiFn& phi);

/// Amplitude of cos(2 pi k u) in a field: 2 int rho cos(2 pi k u) du.
[[nodiscard]] double cosine_amplitude(const DensityField& field, int k);

}  // namespace pde
}  // namespace bwex
