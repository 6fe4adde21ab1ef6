#pragma once

#include <cstddef>
#include <vector>

namespace bwex {

/// Cell-averaged density on the unit torus. Cells are uniform unless
/// explicit edges are given (a coarse-graining grid whose last cell is
/// shorter).
class DensityField {
public:
    DensityField() = default;
    /// Uniform grid with K = values.size() cells of width 1/K.
    explicit DensityField(std::vector<double> values);
    /// Arbitrary partition 0 = edges[0] < ... < edges[K] = 1.
    DensityField(std::vector<double> values, std::vector<double> edges);

    [[nodiscard]] std::size_t size() const noexcept { return cells_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return cells_[i]; }
    [[nodiscard]] double& operator[](std::size_t i) noexcept { return cells_[i]; }
    [[nodiscard]] const std::vector<double>& cells() const noexcept { return cells_; }
    [[nodiscard]] std::vector<double>& cells() noexcept { return cells_; }
    [[nodiscard]] const std::vector<double>& edges() const noexcept { return edges_; }
    [[nodiscard]] double width(std::size_t i) const noexcept { return edges_[i + 1] - edges_[i]; }
    [[nodiscard]] double center(std::size_t i) const noexcept { return 0.5 * (edges_[i] + edges_[i + 1]); }
    [[nodiscard]] bool uniform() const noexcept { return uniform_; }

    /// int rho du = sum_i rho_i |cell_i|, compensated.
    [[nodiscard]] double mass() const;
    [[nodiscard]] double min() const;
    [[nodiscard]] double max() const;

    /// Average of this (piecewise-constant) field over each cell of `grid`.
    [[nodiscard]] DensityField restrict_to(const std::vector<double>& edges) const;

private:
    std::vector<double> cells_;
    std::vector<double> edges_;
    bool uniform_ = true;
};

[[nodiscard]] std::vector<double> uniform_edges(std::size_t cells);

enum class Norm { l1, linf };

/// L1: sum_i |a_i - b_i| |cell_i|; Linf: max_i |a_i - b_i|. Grids must match.
[[nodiscard]] double distance(const DensityField& a, const DensityField& b, Norm norm);

}  // namespace bwex
