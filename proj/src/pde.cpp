#include "bwex/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bwex/errors.hpp"
#include "bwex/quadrature.hpp"

namespace bwex::pde {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double pairing(const DensityField& field, const std::function<double(double)>& g) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < field.size(); ++i) {
        acc.add(field[i] * g(field.center(i)) * field.width(i));
    }
    return acc.value();
}

DensityField blend(const DensityField& a, const DensityField& b, double theta) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = (1.0 - theta) * a[i] + theta * b[i];
    }
    return DensityField(std::move(out));
}

}  // namespace

double estimate_sup_slope(const PhiFn& phi, int points) {
    if (points < 2) {
        throw DomainError("estimate_sup_slope: need at least two points");
    }
    const double h = 1.0 / (points - 1);
    double best = 0.0;
    double prev = phi(0.0);
    for (int i = 1; i < points; ++i) {
        const double cur = phi(static_cast<double>(i) * h);
        best = std::max(best, (cur - prev) / h);
        prev = cur;
    }
    return best;
}

double cfl_limit(std::size_t cells, double sup_slope) {
    if (!(sup_slope > 0.0)) {
        throw ParameterError("sup Phi' must be positive");
    }
    const double du = 1.0 / static_cast<double>(cells);
    return du * du / (2.0 * sup_slope);
}

DensityField step_explicit(const DensityField& field, double dt, const PhiFn& phi, double sup_slope) {
    const std::size_t k = field.size();
    if (k < 3 || !field.uniform()) {
        throw ParameterError("step_explicit: needs a uniform grid with at least 3 cells");
    }
    if (!(dt >= 0.0) || dt > cfl_limit(k, sup_slope) * (1.0 + 1e-12)) {
        throw ParameterError("step_explicit: time step violates the CFL bound du^2 / (2 sup Phi')");
    }
    const double du = 1.0 / static_cast<double>(k);
    const double lambda = dt / (du * du);
    std::vector<double> p(k);
    for (std::size_t i = 0; i < k; ++i) {
        p[i] = phi(field[i]);
    }
    // flux[i] lives on the face between cells i and i+1
    std::vector<double> flux(k);
    for (std::size_t i = 0; i < k; ++i) {
        flux[i] = p[i + 1 == k ? 0 : i + 1] - p[i];
    }
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        out[i] = field[i] + lambda * (flux[i] - flux[i == 0 ? k - 1 : i - 1]);
    }
    return DensityField(std::move(out));
}

DensityField Solution::at(double t) const {
    if (times.empty()) {
        throw DomainError("Solution::at: empty solution");
    }
    if (t <= times.front()) {
        return snapshots.front();
    }
    if (t >= times.back()) {
        return snapshots.back();
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    const double theta = (t - times[lo]) / (times[hi] - times[lo]);
    return blend(snapshots[lo], snapshots[hi], theta);
}

Solution solve(const DensityField& rho0, double horizon, const SolverParams& params,
               const std::vector<double>& output_times) {
    if (!(horizon > 0.0)) {
        throw DomainError("solve: horizon must be positive");
    }
    if (rho0.size() != params.cells) {
        throw ParameterError("solve: initial field does not match the grid size");
    }
    if (!(params.sigma > 0.0 && params.sigma <= 1.0)) {
        throw ParameterError("solve: CFL safety factor must lie in (0,1]");
    }
    if (params.snapshot_stride == 0) {
        throw ParameterError("solve: snapshot stride must be positive");
    }
    std::vector<double> requested = output_times;
    std::sort(requested.begin(), requested.end());
    const double sup = params.sup_slope ? *params.sup_slope : estimate_sup_slope(params.phi);
    const double dt_max = params.sigma * cfl_limit(params.cells, sup);

    Solution sol;
    sol.steps = static_cast<std::size_t>(std::ceil(horizon / dt_max));
    sol.dt = horizon / static_cast<double>(sol.steps);
    sol.times.push_back(0.0);
    sol.snapshots.push_back(rho0);

    std::size_t next_request = 0;
    while (next_request < requested.size() && requested[next_request] <= 0.0) {
        ++next_request;
    }
    DensityField current = rho0;
    for (std::size_t m = 1; m <= sol.steps; ++m) {
        DensityField advanced = step_explicit(current, sol.dt, params.phi, sup);
        const double t_prev = static_cast<double>(m - 1) * sol.dt;
        const double t_now = m == sol.steps ? horizon : static_cast<double>(m) * sol.dt;
        while (next_request < requested.size() && requested[next_request] <= t_now) {
            const double tr = requested[next_request++];
            if (tr < t_now) {
                sol.times.push_back(tr);
                sol.snapshots.push_back(blend(current, advanced, (tr - t_prev) / (t_now - t_prev)));
            }
        }
        const bool on_request = next_request > 0 && requested[next_request - 1] == t_now;
        if (m % params.snapshot_stride == 0 || m == sol.steps || on_request) {
            sol.times.push_back(t_now);
            sol.snapshots.push_back(advanced);
        }
        current = std::move(advanced);
    }
    return sol;
}

DensityField cell_averages(const std::function<double(double)>& profile, std::size_t cells) {
    std::vector<double> out(cells);
    const auto k = static_cast<double>(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const double a = static_cast<double>(i) / k;
        const double b = static_cast<double>(i + 1) / k;
        out[i] = adaptive_simpson(profile, a, b, {.abs_tol = 1e-15, .max_depth = 30}) * k;
    }
    return DensityField(std::move(out));
}

HeatSolution::HeatSolution(double mean, std::vector<std::pair<int, double>> modes)
    : mean_(mean), modes_(std::move(modes)) {
    constexpr int kCheckPoints = 4096;
    for (int i = 0; i < kCheckPoints; ++i) {
        const double v = value(0.0, static_cast<double>(i) / kCheckPoints);
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("heat profile leaves [0,1]");
        }
    }
}

double HeatSolution::value(double t, double u) const {
    double v = mean_;
    for (const auto& [k, amp] : modes_) {
        const double kk = static_cast<double>(k);
        v += amp * std::exp(-kTwoPi * kTwoPi * kk * kk * t) * std::cos(kTwoPi * kk * u);
    }
    return v;
}

double HeatSolution::cell_average(double t, double a, double b) const {
    double v = mean_;
    for (const auto& [k, amp] : modes_) {
        if (k == 0) {
            v += amp;
            continue;
        }
        const double kk = static_cast<double>(k);
        const double avg = (std::sin(kTwoPi * kk * b) - std::sin(kTwoPi * kk * a)) / (kTwoPi * kk * (b - a));
        v += amp * std::exp(-kTwoPi * kTwoPi * kk * kk * t) * avg;
    }
    return v;
}

DensityField HeatSolution::on_grid(double t, const std::vector<double>& edges) const {
    std::vector<double> out(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        out[i] = cell_average(t, edges[i], edges[i + 1]);
    }
    return {std::move(out), edges};
}

double heat_analytic(const std::vector<std::pair<int, double>>& modes, double mean, double t, double u) {
    return HeatSolution(mean, modes).value(t, u);
}

TestFunction cosine_test(int k) {
    const double w = kTwoPi * k;
    return {[w](double, double u) { return std::cos(w * u); }, [](double, double) { return 0.0; },
            [w](double, double u) { return -w * w * std::cos(w * u); }};
}

TestFunction sine_test(int k) {
    const double w = kTwoPi * k;
    return {[w](double, double u) { return std::sin(w * u); }, [](double, double) { return 0.0; },
            [w](double, double u) { return -w * w * std::sin(w * u); }};
}

double weak_residual(const Solution& solution, const DensityField& rho0, const TestFunction& g, double t,
                     const PhiFn& phi) {
    if (solution.times.empty() || t < 0.0 || t > solution.times.back()) {
        throw DomainError("weak_residual: t outside the solution horizon");
    }
    auto integrand = [&](double s, const DensityField& rho) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < rho.size(); ++i) {
            const double u = rho.center(i);
            acc.add((rho[i] * g.d_time(s, u) + phi(rho[i]) * g.d_space2(s, u)) * rho.width(i));
        }
        return acc.value();
    };

    CompensatedSum time_integral;
    double prev_s = 0.0;
    double prev_f = integrand(0.0, rho0);
    DensityField last = rho0;
    for (std::size_t k = 1; k < solution.times.size() && prev_s < t; ++k) {
        double s = solution.times[k];
        DensityField rho = solution.snapshots[k];
        if (s > t) {
            s = t;
            rho = solution.at(t);
        }
        const double f = integrand(s, rho);
        time_integral.add(0.5 * (s - prev_s) * (f + prev_f));
        prev_s = s;
        prev_f = f;
        last = std::move(rho);
    }
    const double end = pairing(last, [&](double u) { return g.value(t, u); });
    const double start = pairing(rho0, [&](double u) { return g.value(0.0, u); });
    return end - start - time_integral.value();
}

double cosine_amplitude(const DensityField& field, int k) {
    const double w = kTwoPi * k;
    CompensatedSum acc;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double a = field.edges()[i];
        const double b = field.edges()[i + 1];
        acc.add(field[i] * (std::sin(w * b) - std::sin(w * a)) / w);
    }
    return 2.0 * acc.value();
}

}  // namespace bwex::pde
