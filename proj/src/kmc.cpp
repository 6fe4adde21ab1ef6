#include "bwex/kmc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bwex/errors.hpp"

namespace bwex {

Configuration sample_initial(const Profile& profile, std::size_t n, Engine& rng) {
    Configuration cfg(n);
    for (std::size_t x = 0; x < n; ++x) {
        const double p = profile(static_cast<double>(x) / static_cast<double>(n));
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError("sample_initial: profile must take values in [0,1]");
        }
        // one draw per site keeps the stream layout independent of the profile
        const double u = uniform01(rng);
        cfg.set(x, u < p);
    }
    return cfg;
}

SimState::SimState(Configuration cfg, std::shared_ptr<const Model> model, Engine rng)
    : cfg_(std::move(cfg)), model_(std::move(model)), rng_(std::move(rng)) {
    if (cfg_.size() != model_->size()) {
        throw ParameterError("configuration size does not match the model");
    }
    const auto n = static_cast<double>(cfg_.size());
    time_scale_ = n * n;
    const std::size_t particles = cfg_.particles();
    frozen_ = particles == 0 || particles == cfg_.size();
    rebuild();
}

void SimState::rebuild() {
    const std::size_t n = cfg_.size();
    std::vector<double> rates(n);
    for (std::size_t x = 0; x < n; ++x) {
        rates[x] = model_->fast_rate(cfg_, x);
    }
    sampler_.rebuild(std::move(rates));
    since_rebuild_ = 0;
}

double SimState::audit() const {
    const std::size_t n = cfg_.size();
    double worst = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        const double ref = node_rate(cfg_, TorusIndex(static_cast<std::int64_t>(x), n), *model_);
        worst = std::max(worst, std::abs(ref - sampler_.weight(x)));
    }
    return worst;
}

std::size_t SimState::draw_node() {
    for (;;) {
        const double total = sampler_.total();
        const double target = uniform01(rng_) * total;
        const std::size_t node = sampler_.find(target);
        if (sampler_.weight(node) > 0.0) {
            return node;
        }
    }
}

void SimState::apply(std::size_t node) {
    const std::size_t n = cfg_.size();
    const std::size_t ell = model_->ell();
    cfg_.swap_sites(node, node + 1 == n ? 0 : node + 1);
    // bonds whose windows or exclusion pair touch node or node+1
    const std::size_t span = std::min(n, 2 * ell + 3);
    const auto start = static_cast<std::int64_t>(node) - static_cast<std::int64_t>(ell) - 1;
    for (std::size_t k = 0; k < span; ++k) {
        const std::size_t y = wrap(start + static_cast<std::int64_t>(k), n);
        sampler_.set(y, model_->fast_rate(cfg_, y));
    }
    ++events_;
    if (++since_rebuild_ >= kRebuildInterval) {
        rebuild();
    }
    if (debug_audit_ && events_ % kAuditInterval == 0) {
        const double gap = audit();
        if (gap > kAuditTolerance) {
            std::ostringstream msg;
            msg << "rate cache audit failed after " << events_ << " events: max deviation " << gap;
            throw std::logic_error(msg.str());
        }
    }
}

std::optional<Event> SimState::step() {
    if (frozen_) {
        return std::nullopt;
    }
    const double total = sampler_.total();
    const double dt = exponential1(rng_) / (time_scale_ * total);
    const std::size_t node = draw_node();
    apply(node);
    clock_ += dt;
    return Event{dt, node};
}

void SimState::run_until(double t) {
    if (t < clock_) {
        throw DomainError("run_until: target time lies in the past");
    }
    if (frozen_) {
        clock_ = t;
        return;
    }
    for (;;) {
        const double total = sampler_.total();
        const double dt = exponential1(rng_) / (time_scale_ * total);
        if (clock_ + dt > t) {
            // memoryless holding time: the residual wait is redrawn next call
            clock_ = t;
            return;
        }
        apply(draw_node());
        clock_ += dt;
    }
}

SimState build_state(Configuration cfg, std::shared_ptr<const Model> model, std::uint64_t seed) {
    return {std::move(cfg), std::move(model), make_stream(seed, 0)};
}

std::vector<double> CoarseGrid::edges(std::size_t n) const {
    std::vector<double> e(cells + 1);
    for (std::size_t i = 0; i < cells; ++i) {
        e[i] = static_cast<double>(i * sites_per_cell) / static_cast<double>(n);
    }
    e[cells] = 1.0;
    return e;
}

CoarseGrid snap_epsilon(double epsilon, std::size_t n) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw DomainError("coarse-graining width epsilon must lie in (0,1)");
    }
    const auto k = static_cast<std::size_t>(
        std::clamp(std::llround(epsilon * static_cast<double>(n)), 1LL, static_cast<long long>(n)));
    CoarseGrid grid;
    grid.sites_per_cell = k;
    grid.cells = (n + k - 1) / k;
    grid.epsilon = static_cast<double>(k) / static_cast<double>(n);
    return grid;
}

DensityField coarse_density(const Configuration& cfg, double epsilon) {
    const std::size_t n = cfg.size();
    const CoarseGrid grid = snap_epsilon(epsilon, n);
    std::vector<double> values(grid.cells);
    for (std::size_t i = 0; i < grid.cells; ++i) {
        const std::size_t start = i * grid.sites_per_cell;
        const std::size_t len = std::min(grid.sites_per_cell, n - start);
        values[i] = static_cast<double>(cfg.count({start, len})) / static_cast<double>(len);
    }
    if (n % grid.sites_per_cell == 0) {
        return DensityField(std::move(values));
    }
    return {std::move(values), grid.edges(n)};
}

double block_gap_diagnostic(const Configuration& cfg, std::size_t small, std::size_t large,
                            std::size_t separation) {
    const std::size_t n = cfg.size();
    if (small < 1 || large < 1) {
        throw DomainError("block sizes must be >= 1");
    }
    if (small > n || large > n) {
        throw DomainError("block sizes must not exceed N");
    }
    double sum = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        const double a = static_cast<double>(cfg.count({x, small})) / static_cast<double>(small);
        const double b =
            static_cast<double>(cfg.count({(x + separation) % n, large})) / static_cast<double>(large);
        sum += std::abs(a - b);
    }
    return sum / static_cast<double>(n);
}

}  // namespace bwex
