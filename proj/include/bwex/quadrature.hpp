#pragma once

#include <functional>

namespace bwex {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_depth = 40;
};

/// Adaptive Simpson integral of f over [a, b] with Richardson correction.
[[nodiscard]] double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                      QuadratureOptions opts = {});

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (abs(sum_) >= abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    static double abs(double v) noexcept { return v < 0 ? -v : v; }
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace bwex
