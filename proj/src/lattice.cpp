#include "bwex/lattice.hpp"

#include <algorithm>
#include <bit>

#include "bwex/errors.hpp"

namespace bwex {

TorusIndex::TorusIndex(std::int64_t value, std::size_t n) : value_(0), n_(n) {
    if (n == 0) {
        throw DomainError("torus size must be positive");
    }
    value_ = wrap(value, n);
}

Configuration::Configuration(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

Configuration Configuration::from_bits(std::uint64_t bits, std::size_t n) {
    if (n > 64) {
        throw DomainError("from_bits requires N <= 64");
    }
    Configuration cfg(n);
    if (n > 0) {
        cfg.words_[0] = n == 64 ? bits : bits & ((std::uint64_t{1} << n) - 1);
    }
    return cfg;
}

Configuration Configuration::parse(std::string_view line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
        line.remove_suffix(1);
    }
    Configuration cfg(line.size());
    for (std::size_t x = 0; x < line.size(); ++x) {
        if (line[x] == '1') {
            cfg.set(x, true);
        } else if (line[x] != '0') {
            throw DomainError("configuration line may only contain '0' and '1'");
        }
    }
    return cfg;
}

Configuration Configuration::filled(std::size_t n, bool occupied) {
    Configuration cfg(n);
    if (occupied) {
        for (std::size_t x = 0; x < n; ++x) {
            cfg.set(x, true);
        }
    }
    return cfg;
}

std::size_t Configuration::particles() const noexcept {
    std::size_t total = 0;
    for (auto w : words_) {
        total += static_cast<std::size_t>(std::popcount(w));
    }
    return total;
}

std::size_t Configuration::count_linear(std::size_t begin, std::size_t end) const noexcept {
    // sites [begin, end), no wrap
    std::size_t total = 0;
    while (begin < end) {
        const std::size_t word = begin >> 6;
        const std::size_t offset = begin & 63;
        const std::size_t take = std::min<std::size_t>(64 - offset, end - begin);
        std::uint64_t w = words_[word] >> offset;
        if (take < 64) {
            w &= (std::uint64_t{1} << take) - 1;
        }
        total += static_cast<std::size_t>(std::popcount(w));
        begin += take;
    }
    return total;
}

std::size_t Configuration::count(Interval iv) const noexcept {
    if (iv.length >= n_) {
        return particles();
    }
    const std::size_t start = iv.start % n_;
    const std::size_t end = start + iv.length;
    if (end <= n_) {
        return count_linear(start, end);
    }
    return count_linear(start, n_) + count_linear(0, end - n_);
}

std::uint64_t Configuration::to_bits() const {
    if (n_ > 64) {
        throw DomainError("to_bits requires N <= 64");
    }
    return words_.empty() ? 0 : words_[0];
}

std::string Configuration::to_string() const {
    std::string out(n_, '0');
    for (std::size_t x = 0; x < n_; ++x) {
        if (get(x)) {
            out[x] = '1';
        }
    }
    return out;
}

Configuration shift(const Configuration& cfg, std::int64_t k) {
    const std::size_t n = cfg.size();
    Configuration out(n);
    for (std::size_t x = 0; x < n; ++x) {
        out.set(x, cfg.get(wrap(static_cast<std::int64_t>(x) + k, n)));
    }
    return out;
}

Configuration exchange(const Configuration& cfg, TorusIndex x, TorusIndex y) {
    Configuration out = cfg;
    out.swap_sites(x.value(), y.value());
    return out;
}

Ratio box_density(const Configuration& cfg, const std::vector<TorusIndex>& sites) {
    if (sites.empty()) {
        throw DomainError("box_density: empty site set");
    }
    std::int64_t occupied = 0;
    for (const auto& s : sites) {
        occupied += cfg.get(s.value()) ? 1 : 0;
    }
    return {occupied, static_cast<std::int64_t>(sites.size())};
}

std::size_t particle_count(const Configuration& cfg, std::size_t ell) {
    if (ell >= cfg.size()) {
        throw DomainError("particle_count: box [[0, ell]] must be shorter than the torus");
    }
    return cfg.count({0, ell + 1});
}

double empirical_pairing(const Configuration& cfg, const std::function<double(double)>& test_fn) {
    const std::size_t n = cfg.size();
    double sum = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        if (cfg.get(x)) {
            sum += test_fn(static_cast<double>(x) / static_cast<double>(n));
        }
    }
    return sum / static_cast<double>(n);
}

}  // namespace bwex
