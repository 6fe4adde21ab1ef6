#pragma once

#include <cstddef>
#include <vector>

namespace bwex {

/// Binary indexed tree over nonnegative weights: O(log n) point update,
/// prefix sum and proportional search.
class FenwickSampler {
public:
    FenwickSampler() = default;
    explicit FenwickSampler(std::vector<double> weights) { rebuild(std::move(weights)); }

    /// Replaces all weights and recomputes the tree from scratch (no drift).
    void rebuild(std::vector<double> weights);

    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
    [[nodiscard]] double weight(std::size_t i) const noexcept { return weights_[i]; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }

    void set(std::size_t i, double w);
    [[nodiscard]] double total() const noexcept;
    /// Sum of weights[0..i).
    [[nodiscard]] double prefix(std::size_t i) const noexcept;

    /// Index i with prefix(i) <= target < prefix(i+1). `target` must lie in
    /// [0, total()). Accumulated rounding can land on a zero-weight slot;
    /// callers draw again in that case.
    [[nodiscard]] std::size_t find(double target) const noexcept;

private:
    std::vector<double> weights_;
    std::vector<double> tree_;  // 1-based
    std::size_t top_bit_ = 0;
};

}  // namespace bwex
