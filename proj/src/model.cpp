#include "bwex/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "bwex/errors.hpp"

namespace bwex {

std::size_t default_window(std::size_t n, double exponent) {
    if (!(exponent > 0.0 && exponent < 1.0)) {
        throw ParameterError("window exponent must lie in (0,1)");
    }
    auto ell = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), exponent) - 1e-12));
    return std::max<std::size_t>(ell, 1);
}

Model::Model(ModelParams params) : params_(std::move(params)) {
    if (params_.ell < 1) {
        throw ParameterError("window parameter ell must be >= 1");
    }
    if (params_.ell + 2 > params_.n) {
        std::ostringstream msg;
        msg << "window does not fit the torus: ell + 2 = " << params_.ell + 2 << " > N = " << params_.n;
        throw ParameterError(msg.str());
    }
    beta_table_.resize(params_.ell + 1);
    for (std::size_t k = 0; k <= params_.ell; ++k) {
        const double v = params_.beta(static_cast<double>(k) / static_cast<double>(params_.ell));
        if (!(v > 0.0 && v <= 1.0)) {
            throw ParameterError("beta must lie in (0,1] on the window grid");
        }
        beta_table_[k] = v;
    }
}

double Model::fast_rate(const Configuration& cfg, std::size_t x) const noexcept {
    const std::size_t n = params_.n;
    const std::size_t ell = params_.ell;
    const std::size_t xp = x + 1 == n ? 0 : x + 1;
    const bool a = cfg.get(x);
    const bool b = cfg.get(xp);
    if (a == b) {
        return 0.0;
    }
    // With eta(x) != eta(x+1) the span [[x-j, x-j+ell+1]] holds exactly one
    // particle on the bond, so window count = span count - 1.
    auto span = static_cast<std::int64_t>(cfg.count({x, ell + 2}));
    double sum = beta_table_[static_cast<std::size_t>(span - 1)];
    const auto xi = static_cast<std::int64_t>(x);
    for (std::size_t j = 1; j <= ell; ++j) {
        const auto jj = static_cast<std::int64_t>(j);
        span += cfg.at(xi - jj) - cfg.at(xi - jj + static_cast<std::int64_t>(ell) + 2);
        sum += beta_table_[static_cast<std::size_t>(span - 1)];
    }
    const double c = sum / static_cast<double>(ell + 1);
    if (params_.exclusion == ExclusionRule::doubled_left && !a) {
        return 2.0 * c;
    }
    return c;
}

Interval window_span(TorusIndex x, std::size_t j, std::size_t ell) {
    if (j > ell) {
        throw DomainError("window index j must satisfy 0 <= j <= ell");
    }
    return {(x - static_cast<std::int64_t>(j)).value(), ell + 2};
}

std::vector<TorusIndex> window_sites(TorusIndex x, std::size_t j, std::size_t ell) {
    const Interval span = window_span(x, j, ell);
    std::vector<TorusIndex> sites;
    sites.reserve(ell);
    const TorusIndex xp = x + 1;
    for (std::size_t k = 0; k < span.length; ++k) {
        TorusIndex s(static_cast<std::int64_t>(span.start + k), x.size());
        if (s != x && s != xp) {
            sites.push_back(s);
        }
    }
    return sites;
}

std::size_t window_count(const Configuration& cfg, TorusIndex x, std::size_t j, std::size_t ell) {
    const Interval span = window_span(x, j, ell);
    const std::size_t on_bond = (cfg.get(x.value()) ? 1 : 0) + (cfg.get((x + 1).value()) ? 1 : 0);
    return cfg.count(span) - on_bond;
}

double constraint_c(const Configuration& cfg, TorusIndex x, const Model& model) {
    const std::size_t ell = model.ell();
    double sum = 0.0;
    for (std::size_t j = 0; j <= ell; ++j) {
        sum += model.beta_at(window_count(cfg, x, j, ell));
    }
    return sum / static_cast<double>(ell + 1);
}

ExclusionPair exclusion_indicators(const Configuration& cfg, TorusIndex x, ExclusionRule rule) {
    const int a = cfg.get(x.value()) ? 1 : 0;
    const int b = cfg.get((x + 1).value()) ? 1 : 0;
    ExclusionPair e{a * (1 - b), (1 - a) * b};
    if (rule == ExclusionRule::doubled_left) {
        e.e01 += (1 - a) * b;
    }
    return e;
}

double node_rate(const Configuration& cfg, TorusIndex x, const Model& model) {
    const auto e = exclusion_indicators(cfg, x, model.params().exclusion);
    const int open = e.e01 + e.e10;
    if (open == 0) {
        return 0.0;
    }
    return static_cast<double>(open) * constraint_c(cfg, x, model);
}

double bernstein_constraint(const Configuration& cfg, TorusIndex x, std::size_t n, std::size_t ell) {
    if (n > ell) {
        throw DomainError("bernstein_constraint: n must satisfy 0 <= n <= ell");
    }
    std::size_t hits = 0;
    for (std::size_t j = 0; j <= ell; ++j) {
        if (window_count(cfg, x, j, ell) == n) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(ell + 1);
}

double current_window(const Configuration& cfg, TorusIndex x, std::size_t j, const Model& model) {
    const auto e = exclusion_indicators(cfg, x, model.params().exclusion);
    const int diff = e.e01 - e.e10;
    if (diff == 0) {
        return 0.0;
    }
    return static_cast<double>(diff) * model.beta_at(window_count(cfg, x, j, model.ell()));
}

double current_J(const Configuration& cfg, TorusIndex x, const Model& model) {
    const std::size_t ell = model.ell();
    double sum = 0.0;
    for (std::size_t j = 0; j <= ell; ++j) {
        sum += current_window(cfg, x, j, model);
    }
    return sum / static_cast<double>(ell + 1);
}

double potential_h(const Configuration& cfg, TorusIndex x, const Model& model) {
    const std::size_t ell = model.ell();
    const std::size_t p = cfg.count({x.value(), ell + 1});
    double sum = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        sum += model.beta_at(k);
    }
    return sum / static_cast<double>(ell + 1);
}

double potential_h_alt(const Configuration& cfg, TorusIndex x, const Model& model) {
    const std::size_t ell = model.ell();
    if (ell > kSubsetEnumerationLimit) {
        throw CapabilityError("potential_h_alt: subset enumeration limited to ell <= 20");
    }
    const auto base = static_cast<std::int64_t>(x.value());
    auto occ = [&](std::size_t p) { return cfg.at(base + static_cast<std::int64_t>(p)); };

    double total = 0.0;
    for (std::size_t n = 0; n <= ell; ++n) {
        double weight = 0.0;
        for (std::size_t i = n; i <= ell; ++i) {
            // P ranges over the (i-n)-subsets of [[0, i-1]], encoded as bitmasks.
            const std::size_t k = i - n;
            const std::uint64_t limit = std::uint64_t{1} << i;
            std::uint64_t mask = (std::uint64_t{1} << k) - 1;
            while (mask < limit) {
                double prod = 1.0;
                for (std::size_t q = 0; q <= i && prod != 0.0; ++q) {
                    const bool in_p = q < i && ((mask >> q) & 1U);
                    prod *= in_p ? static_cast<double>(1 - occ(q)) : static_cast<double>(occ(q));
                }
                weight += prod;
                if (mask == 0) {
                    break;
                }
                // next bitmask with the same popcount
                const std::uint64_t low = mask & (~mask + 1);
                const std::uint64_t ripple = mask + low;
                mask = (((ripple ^ mask) >> 2) / low) | ripple;
            }
        }
        total += model.beta_at(n) * weight;
    }
    return total / static_cast<double>(ell + 1);
}

double potential_g(const Configuration& cfg, TorusIndex x, const Model& model) {
    const std::size_t ell = model.ell();
    double sum = 0.0;
    for (std::size_t j = 1; j <= ell; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            sum += current_window(cfg, x + static_cast<std::int64_t>(i), j, model);
        }
    }
    return sum / static_cast<double>(ell + 1);
}

double potential_H(const Configuration& cfg, TorusIndex x, const Model& model) {
    return potential_h(cfg, x, model) + potential_g(cfg, x, model);
}

double generator_apply(const ObservableFn& f, const Configuration& cfg, const Model& model) {
    const std::size_t n = cfg.size();
    const double base = f(cfg);
    double sum = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        const TorusIndex xi(static_cast<std::int64_t>(x), n);
        const double r = node_rate(cfg, xi, model);
        if (r != 0.0) {
            sum += r * (f(exchange(cfg, xi, xi + 1)) - base);
        }
    }
    return sum;
}

double generator_apply_with(const ObservableFn& f, const Configuration& cfg, const Model& model,
                            const ConstraintFn& constraint) {
    const std::size_t n = cfg.size();
    const double base = f(cfg);
    double sum = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        const TorusIndex xi(static_cast<std::int64_t>(x), n);
        const auto e = exclusion_indicators(cfg, xi, model.params().exclusion);
        const int open = e.e01 + e.e10;
        if (open != 0) {
            sum += static_cast<double>(open) * constraint(cfg, xi) * (f(exchange(cfg, xi, xi + 1)) - base);
        }
    }
    return sum;
}

}  // namespace bwex
