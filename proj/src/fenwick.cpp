#include "bwex/fenwick.hpp"

#include <bit>

namespace bwex {

void FenwickSampler::rebuild(std::vector<double> weights) {
    weights_ = std::move(weights);
    const std::size_t n = weights_.size();
    tree_.assign(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        tree_[i] += weights_[i - 1];
        const std::size_t parent = i + (i & (~i + 1));
        if (parent <= n) {
            tree_[parent] += tree_[i];
        }
    }
    top_bit_ = n == 0 ? 0 : std::bit_floor(n);
}

void FenwickSampler::set(std::size_t i, double w) {
    const double delta = w - weights_[i];
    if (delta == 0.0) {
        return;
    }
    weights_[i] = w;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) {
        tree_[k] += delta;
    }
}

double FenwickSampler::prefix(std::size_t i) const noexcept {
    double s = 0.0;
    for (std::size_t k = i; k > 0; k -= k & (~k + 1)) {
        s += tree_[k];
    }
    return s;
}

double FenwickSampler::total() const noexcept { return prefix(weights_.size()); }

std::size_t FenwickSampler::find(double target) const noexcept {
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step > 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next < tree_.size() && tree_[next] <= target) {
            pos = next;
            target -= tree_[next];
        }
    }
    return pos < weights_.size() ? pos : weights_.size() - 1;
}

}  // namespace bwex
