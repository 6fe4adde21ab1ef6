#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace bwex {

/// Continuous rate profile beta: [0,1] -> (0,1].
///
/// Four families are supported:
///  - constant:        beta(u) = c
///  - affine (clamped) beta(u) = clamp(a + b u, lo, hi)
///  - trigonometric:   beta(u) = mean + amplitude * cos(2 pi k u + phase)
///  - table:           piecewise-linear interpolation of sorted (u, beta) pairs
///
/// Every factory validates 0 < beta <= 1 on a 10^4-point uniform grid.
class BetaFunction {
public:
    enum class Kind { constant, affine, trigonometric, table };

    static BetaFunction constant(double value);
    static BetaFunction affine(double intercept, double slope, double lo = 0.0, double hi = 1.0);
    static BetaFunction trigonometric(double mean, double amplitude, int frequency = 1, double phase = 0.0);
    static BetaFunction table(std::vector<std::pair<double, double>> points);

    /// beta(u) = 1: the symmetric simple exclusion process.
    static BetaFunction ssep() { return constant(1.0); }
    /// beta(u) = (1 + u) / 2.
    static BetaFunction affine_preset() { return affine(0.5, 0.5); }
    /// beta(u) = (3 + cos 2 pi u) / 4.
    static BetaFunction cosine_preset() { return trigonometric(0.75, 0.25); }

    /// Accepts either a preset name ("const", "ssep", "affine", "cosine")
    /// or an object {"kind": ..., parameters...}.
    static BetaFunction from_json(const nlohmann::json& block);
    [[nodiscard]] nlohmann::json to_json() const;

    [[nodiscard]] double operator()(double u) const;

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] bool is_constant() const noexcept { return kind_ == Kind::constant; }
    /// Human-readable one-line descriptor used in metadata files.
    [[nodiscard]] std::string describe() const;

    /// Largest value on a uniform grid of `points` samples.
    [[nodiscard]] double sup_on_grid(int points = 4096) const;

    /// Optional lint: |beta(0) - beta(1)| <= tol, i.e. beta is continuous
    /// when read as a function on the circle.
    [[nodiscard]] bool periodic(double tol = 1e-12) const;

private:
    BetaFunction() = default;
    void validate() const;

    Kind kind_ = Kind::constant;
    std::vector<double> par_;
    std::vector<std::pair<double, double>> points_;
};

}  // namespace bwex
