#include "bwex/density_field.hpp"

#include <algorithm>
#include <cmath>

#include "bwex/errors.hpp"
#include "bwex/quadrature.hpp"

namespace bwex {

std::vector<double> uniform_edges(std::size_t cells) {
    std::vector<double> edges(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        edges[i] = static_cast<double>(i) / static_cast<double>(cells);
    }
    return edges;
}

DensityField::DensityField(std::vector<double> values) : cells_(std::move(values)), edges_(uniform_edges(cells_.size())) {}

DensityField::DensityField(std::vector<double> values, std::vector<double> edges)
    : cells_(std::move(values)), edges_(std::move(edges)), uniform_(false) {
    if (edges_.size() != cells_.size() + 1 || edges_.front() != 0.0 || edges_.back() != 1.0) {
        throw DomainError("DensityField: edges must partition [0,1] into one interval per cell");
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (!(edges_[i + 1] > edges_[i])) {
            throw DomainError("DensityField: edges must be strictly increasing");
        }
    }
}

double DensityField::mass() const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        acc.add(cells_[i] * width(i));
    }
    return acc.value();
}

double DensityField::min() const { return cells_.empty() ? 0.0 : *std::min_element(cells_.begin(), cells_.end()); }
double DensityField::max() const { return cells_.empty() ? 0.0 : *std::max_element(cells_.begin(), cells_.end()); }

DensityField DensityField::restrict_to(const std::vector<double>& edges) const {
    const std::size_t k = edges.size() - 1;
    std::vector<double> out(k, 0.0);
    std::size_t fine = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const double lo = edges[c];
        const double hi = edges[c + 1];
        while (fine < cells_.size() && edges_[fine + 1] <= lo) {
            ++fine;
        }
        CompensatedSum acc;
        for (std::size_t f = fine; f < cells_.size() && edges_[f] < hi; ++f) {
            const double overlap = std::min(hi, edges_[f + 1]) - std::max(lo, edges_[f]);
            if (overlap > 0.0) {
                acc.add(cells_[f] * overlap);
            }
        }
        out[c] = acc.value() / (hi - lo);
    }
    return {std::move(out), edges};
}

double distance(const DensityField& a, const DensityField& b, Norm norm) {
    if (a.size() != b.size()) {
        throw DomainError("distance: fields live on different grids");
    }
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        if (norm == Norm::l1) {
            out += d * a.width(i);
        } else {
            out = std::max(out, d);
        }
    }
    return out;
}

}  // namespace bwex
