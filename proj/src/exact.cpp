#include "bwex/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "bwex/errors.hpp"
#include "bwex/quadrature.hpp"
#include "bwex/rng.hpp"

namespace bwex::exact {

namespace {

void require_sites(std::size_t n, std::size_t limit, const char* what) {
    if (n > limit) {
        throw CapabilityError(std::string(what) + ": N = " + std::to_string(n) + " exceeds the enumeration limit " +
                              std::to_string(limit));
    }
}

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("alpha must lie in (0,1)");
    }
}

std::size_t sites_of(std::size_t dim) {
    if (dim == 0 || !std::has_single_bit(dim)) {
        throw DomainError("state vector length must be a power of two");
    }
    return static_cast<std::size_t>(std::countr_zero(dim));
}

double kl_bernoulli(double p, double q) {
    double v = 0.0;
    if (p > 0.0) {
        v += p * std::log(p / q);
    }
    if (p < 1.0) {
        v += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    }
    return v;
}

}  // namespace

Configuration state_config(std::uint64_t state, std::size_t n) { return Configuration::from_bits(state, n); }

GeneratorMatrix::GeneratorMatrix(std::size_t n, std::vector<double> rates) : n_(n), rates_(std::move(rates)) {
    if (rates_.size() != dimension() * n_) {
        throw DomainError("generator rate table has the wrong size");
    }
}

std::uint64_t GeneratorMatrix::target(std::uint64_t state, std::size_t x) const noexcept {
    const std::size_t xp = x + 1 == n_ ? 0 : x + 1;
    const bool a = (state >> x) & 1U;
    const bool b = (state >> xp) & 1U;
    if (a == b) {
        return state;
    }
    return state ^ ((std::uint64_t{1} << x) | (std::uint64_t{1} << xp));
}

double GeneratorMatrix::entry(std::uint64_t from, std::uint64_t to) const {
    if (from == to) {
        return diagonal(from);
    }
    double q = 0.0;
    for (std::size_t x = 0; x < n_; ++x) {
        if (target(from, x) == to) {
            q += rate(from, x);
        }
    }
    return q;
}

double GeneratorMatrix::diagonal(std::uint64_t state) const {
    double out = 0.0;
    for (std::size_t x = 0; x < n_; ++x) {
        if (target(state, x) != state) {
            out += rate(state, x);
        }
    }
    return -out;
}

StateVector GeneratorMatrix::apply(const StateVector& f) const {
    const std::size_t dim = dimension();
    StateVector out(dim, 0.0);
    for (std::uint64_t s = 0; s < dim; ++s) {
        double acc = 0.0;
        for (std::size_t x = 0; x < n_; ++x) {
            const double r = rate(s, x);
            if (r != 0.0) {
                acc += r * (f[target(s, x)] - f[s]);
            }
        }
        out[s] = acc;
    }
    return out;
}

StateVector GeneratorMatrix::left_apply(const StateVector& mu) const {
    const std::size_t dim = dimension();
    StateVector out(dim, 0.0);
    for (std::uint64_t s = 0; s < dim; ++s) {
        for (std::size_t x = 0; x < n_; ++x) {
            const double r = rate(s, x);
            if (r != 0.0) {
                const double flow = mu[s] * r;
                out[target(s, x)] += flow;
                out[s] -= flow;
            }
        }
    }
    return out;
}

double GeneratorMatrix::max_row_sum() const {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < dimension(); ++s) {
        double off = 0.0;
        for (std::size_t x = 0; x < n_; ++x) {
            if (target(s, x) != s) {
                off += rate(s, x);
            }
        }
        worst = std::max(worst, std::abs(off + diagonal(s)));
    }
    return worst;
}

ProductMeasure::ProductMeasure(double alpha, std::size_t n) : alpha_(alpha), n_(n), by_count_(n + 1) {
    require_alpha(alpha);
    require_sites(n, kMaxGeneratorSites, "ProductMeasure");
    for (std::size_t k = 0; k <= n; ++k) {
        by_count_[k] = std::pow(alpha, static_cast<double>(k)) * std::pow(1.0 - alpha, static_cast<double>(n - k));
    }
}

double ProductMeasure::weight(std::uint64_t state) const noexcept {
    return by_count_[static_cast<std::size_t>(std::popcount(state))];
}

StateVector ProductMeasure::weights() const {
    StateVector w(std::size_t{1} << n_);
    for (std::uint64_t s = 0; s < w.size(); ++s) {
        w[s] = weight(s);
    }
    return w;
}

StateVector product_distribution(const std::vector<double>& profile) {
    const std::size_t n = profile.size();
    require_sites(n, kMaxGeneratorSites, "product_distribution");
    for (double p : profile) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError("product_distribution: marginals must lie in [0,1]");
        }
    }
    StateVector mu(std::size_t{1} << n);
    for (std::uint64_t s = 0; s < mu.size(); ++s) {
        double w = 1.0;
        for (std::size_t x = 0; x < n; ++x) {
            w *= ((s >> x) & 1U) ? profile[x] : 1.0 - profile[x];
        }
        mu[s] = w;
    }
    return mu;
}

GeneratorMatrix build_generator(const Model& model) {
    const std::size_t n = model.size();
    require_sites(n, kMaxGeneratorSites, "build_generator");
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> rates(dim * n, 0.0);
    for (std::uint64_t s = 0; s < dim; ++s) {
        const Configuration cfg = state_config(s, n);
        for (std::size_t x = 0; x < n; ++x) {
            rates[s * n + x] = node_rate(cfg, TorusIndex(static_cast<std::int64_t>(x), n), model);
        }
    }
    return {n, std::move(rates)};
}

double stationarity_residual(const GeneratorMatrix& q, double alpha) {
    const ProductMeasure nu(alpha, q.sites());
    const StateVector flow = q.left_apply(nu.weights());
    double worst = 0.0;
    for (double v : flow) {
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

double detailed_balance_residual(const GeneratorMatrix& q, double alpha) {
    const ProductMeasure nu(alpha, q.sites());
    double worst = 0.0;
    for (std::uint64_t s = 0; s < q.dimension(); ++s) {
        for (std::size_t x = 0; x < q.sites(); ++x) {
            const std::uint64_t t = q.target(s, x);
            if (t == s) {
                continue;
            }
            // theta_{x,x+1} is an involution, so the reverse move uses the same bond
            worst = std::max(worst, std::abs(nu.weight(s) * q.rate(s, x) - nu.weight(t) * q.rate(t, x)));
        }
    }
    return worst;
}

GradientResiduals gradient_identity_residual(const Model& model) {
    const std::size_t n = model.size();
    require_sites(n, kMaxGradientSites, "gradient_identity_residual");
    const TorusIndex origin(0, n);
    const ObservableFn pi0 = [](const Configuration& c) { return static_cast<double>(c.at(0)); };
    GradientResiduals res;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        const Configuration cfg = state_config(s, n);
        const double j0 = current_J(cfg, origin, model);
        const double jm = current_J(cfg, origin - 1, model);
        const double h0 = potential_H(cfg, origin, model);
        const double h1 = potential_H(cfg, origin + 1, model);
        res.current = std::max(res.current, std::abs(j0 + h1 - h0));
        res.generator = std::max(res.generator, std::abs(generator_apply(pi0, cfg, model) - (jm - j0)));
    }
    return res;
}

double decomposition_residual(const Model& model, const std::vector<StateVector>& observables) {
    const std::size_t n = model.size();
    require_sites(n, kMaxGradientSites, "decomposition_residual");
    const std::size_t ell = model.ell();
    double worst = 0.0;
    for (const auto& table : observables) {
        if (table.size() != (std::size_t{1} << n)) {
            throw DomainError("decomposition_residual: observable has the wrong length");
        }
        const ObservableFn f = [&table](const Configuration& c) { return table[c.to_bits()]; };
        for (std::uint64_t s = 0; s < table.size(); ++s) {
            const Configuration cfg = state_config(s, n);
            const double full = generator_apply(f, cfg, model);
            double mix = 0.0;
            for (std::size_t k = 0; k <= ell; ++k) {
                mix += model.beta_at(k) *
                       generator_apply_with(f, cfg, model, [k, ell](const Configuration& c, TorusIndex x) {
                           return bernstein_constraint(c, x, k, ell);
                       });
            }
            worst = std::max(worst, std::abs(full - mix));
        }
    }
    return worst;
}

double h_representation_residual(const Model& model) {
    const std::size_t n = model.size();
    require_sites(n, kMaxGeneratorSites, "h_representation_residual");
    const TorusIndex origin(0, n);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        const Configuration cfg = state_config(s, n);
        worst = std::max(worst, std::abs(potential_h(cfg, origin, model) - potential_h_alt(cfg, origin, model)));
    }
    return worst;
}

double dirichlet_form(const StateVector& g, double alpha, const GeneratorMatrix& q) {
    if (g.size() != q.dimension()) {
        throw DomainError("dirichlet_form: function has the wrong length");
    }
    const ProductMeasure nu(alpha, q.sites());
    const StateVector qg = q.apply(g);
    CompensatedSum acc;
    for (std::uint64_t s = 0; s < g.size(); ++s) {
        acc.add(nu.weight(s) * g[s] * qg[s]);
    }
    const auto n2 = static_cast<double>(q.sites() * q.sites());
    return -n2 * acc.value();
}

double dirichlet_form(const StateVector& g, double alpha, const Model& model) {
    require_sites(model.size(), kMaxDirichletSites, "dirichlet_form");
    return dirichlet_form(g, alpha, build_generator(model));
}

double relative_entropy(const StateVector& mu, double alpha) {
    const std::size_t n = sites_of(mu.size());
    const ProductMeasure nu(alpha, n);
    CompensatedSum total;
    for (double m : mu) {
        if (m < 0.0) {
            throw DomainError("relative_entropy: negative probability");
        }
        total.add(m);
    }
    if (std::abs(total.value() - 1.0) > 1e-9) {
        throw DomainError("relative_entropy: mu does not sum to one");
    }
    CompensatedSum h;
    for (std::uint64_t s = 0; s < mu.size(); ++s) {
        if (mu[s] > 0.0) {
            h.add(mu[s] * std::log(mu[s] / nu.weight(s)));
        }
    }
    return h.value();
}

double entropy_constant(double alpha, double delta) {
    require_alpha(alpha);
    if (!(delta >= 0.0 && delta <= 0.5)) {
        throw DomainError("entropy_constant: delta must lie in [0, 1/2]");
    }
    // KL(. | alpha) is convex, so its maximum on an interval sits at an endpoint
    return std::max(kl_bernoulli(delta, alpha), kl_bernoulli(1.0 - delta, alpha));
}

double exact_expectation(const StateVector& f, double alpha) {
    const std::size_t n = sites_of(f.size());
    const ProductMeasure nu(alpha, n);
    CompensatedSum acc;
    for (std::uint64_t s = 0; s < f.size(); ++s) {
        acc.add(nu.weight(s) * f[s]);
    }
    return acc.value();
}

double exact_expectation(const std::function<double(const Configuration&)>& f, double alpha, std::size_t n) {
    return exact_expectation(tabulate(f, n), alpha);
}

StateVector tabulate(const std::function<double(const Configuration&)>& f, std::size_t n) {
    require_sites(n, kMaxGeneratorSites, "tabulate");
    StateVector out(std::size_t{1} << n);
    for (std::uint64_t s = 0; s < out.size(); ++s) {
        out[s] = f(state_config(s, n));
    }
    return out;
}

double byparts_residual(const StateVector& phi, const StateVector& g, std::size_t x, std::size_t y, double alpha,
                        std::size_t n) {
    if (phi.size() != (std::size_t{1} << n) || g.size() != phi.size()) {
        throw DomainError("byparts_residual: vectors have the wrong length");
    }
    const ProductMeasure nu(alpha, n);
    CompensatedSum lhs;
    CompensatedSum rhs;
    for (std::uint64_t s = 0; s < phi.size(); ++s) {
        const int ex = static_cast<int>((s >> x) & 1U);
        const int ey = static_cast<int>((s >> y) & 1U);
        const int d = ex - ey;
        if (d == 0) {
            continue;
        }
        const std::uint64_t swapped = s ^ ((std::uint64_t{1} << x) | (std::uint64_t{1} << y));
        const double w = nu.weight(s) * phi[s] * static_cast<double>(d);
        lhs.add(w * g[s]);
        rhs.add(-0.5 * w * (g[swapped] - g[s]));
    }
    return std::abs(lhs.value() - rhs.value());
}

double byparts_identity_check(std::size_t n, std::size_t x, std::size_t y, double alpha, std::size_t trials,
                              std::uint64_t seed) {
    require_sites(n, kMaxGeneratorSites, "byparts_identity_check");
    if (x >= n || y >= n) {
        throw DomainError("byparts_identity_check: sites out of range");
    }
    Engine rng = make_stream(seed, 0);
    const std::size_t dim = std::size_t{1} << n;
    const std::uint64_t mask = ~((std::uint64_t{1} << x) | (std::uint64_t{1} << y));
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        StateVector base(dim);
        StateVector g(dim);
        for (std::size_t s = 0; s < dim; ++s) {
            base[s] = 2.0 * uniform01(rng) - 1.0;
            g[s] = 2.0 * uniform01(rng) - 1.0;
        }
        StateVector phi(dim);
        for (std::uint64_t s = 0; s < dim; ++s) {
            phi[s] = base[s & mask];
        }
        worst = std::max(worst, byparts_residual(phi, g, x, y, alpha, n));
    }
    return worst;
}

}  // namespace bwex::exact
