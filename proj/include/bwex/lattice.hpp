#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace bwex {

/// Site of the discrete torus Z/NZ, always held in canonical form {0,...,N-1}.
class TorusIndex {
public:
    TorusIndex(std::int64_t value, std::size_t n);

    [[nodiscard]] std::size_t value() const noexcept { return value_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    [[nodiscard]] TorusIndex operator+(std::int64_t k) const { return {static_cast<std::int64_t>(value_) + k, n_}; }
    [[nodiscard]] TorusIndex operator-(std::int64_t k) const { return {static_cast<std::int64_t>(value_) - k, n_}; }

    friend bool operator==(const TorusIndex&, const TorusIndex&) = default;

private:
    std::size_t value_;
    std::size_t n_;
};

/// Canonical representative of k modulo n.
[[nodiscard]] inline std::size_t wrap(std::int64_t k, std::size_t n) noexcept {
    const auto m = static_cast<std::int64_t>(n);
    const std::int64_t r = k % m;
    return static_cast<std::size_t>(r < 0 ? r + m : r);
}

/// Discrete interval [[start, start+length-1]] on the torus. Stored as
/// (start, length) so that wrapped intervals are unambiguous.
struct Interval {
    std::size_t start = 0;
    std::size_t length = 0;
};

/// Exact density num/den of a box.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    [[nodiscard]] double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Ratio& a, const Ratio& b) noexcept { return a.num * b.den == b.num * a.den; }
};

/// Bit-packed occupation vector on the torus of size N.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(std::size_t n);

    /// Configuration whose occupation at x is bit x of `bits` (N <= 64).
    static Configuration from_bits(std::uint64_t bits, std::size_t n);
    /// Parses one line of '0'/'1' characters.
    static Configuration parse(std::string_view line);
    static Configuration filled(std::size_t n, bool occupied);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    [[nodiscard]] bool get(std::size_t x) const noexcept { return (words_[x >> 6] >> (x & 63)) & 1U; }
    [[nodiscard]] int at(std::int64_t x) const noexcept { return get(wrap(x, n_)) ? 1 : 0; }
    void set(std::size_t x, bool v) noexcept {
        const std::uint64_t mask = std::uint64_t{1} << (x & 63);
        if (v) {
            words_[x >> 6] |= mask;
        } else {
            words_[x >> 6] &= ~mask;
        }
    }
    void flip(std::size_t x) noexcept { words_[x >> 6] ^= std::uint64_t{1} << (x & 63); }

    /// Swaps the occupations of sites x and y in place.
    void swap_sites(std::size_t x, std::size_t y) noexcept {
        if (get(x) != get(y)) {
            flip(x);
            flip(y);
        }
    }

    [[nodiscard]] std::size_t particles() const noexcept;
    /// Number of particles in the interval; word-level popcount with wrap.
    [[nodiscard]] std::size_t count(Interval iv) const noexcept;
    /// Bits packed into an integer (N <= 64).
    [[nodiscard]] std::uint64_t to_bits() const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    [[nodiscard]] std::size_t count_linear(std::size_t begin, std::size_t end) const noexcept;

    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

/// result(x) = cfg(x + k mod N).
[[nodiscard]] Configuration shift(const Configuration& cfg, std::int64_t k);

/// Swaps the occupation values at x and y.
[[nodiscard]] Configuration exchange(const Configuration& cfg, TorusIndex x, TorusIndex y);

/// Exact average occupation over a non-empty set of sites.
[[nodiscard]] Ratio box_density(const Configuration& cfg, const std::vector<TorusIndex>& sites);

/// Number of particles in [[0, ell]].
[[nodiscard]] std::size_t particle_count(const Configuration& cfg, std::size_t ell);

/// (1/N) sum_x G(x/N) cfg(x).
[[nodiscard]] double empirical_pairing(const Configuration& cfg, const std::function<double(double)>& test_fn);

}  // namespace bwex
