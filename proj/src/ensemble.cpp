#include "bwex/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "bwex/errors.hpp"
#include "bwex/quadrature.hpp"

namespace bwex {

namespace {

struct ReplicaOutput {
    std::vector<std::vector<double>> fields;  // per time
    std::uint64_t events = 0;
};

ReplicaOutput run_replica(const EnsembleSpec& spec, const std::shared_ptr<const Model>& model, std::size_t index) {
    Engine rng = make_stream(spec.master_seed, index);
    Configuration cfg = sample_initial(spec.initial, spec.params.n, rng);
    const std::size_t particles = cfg.particles();
    SimState state(std::move(cfg), model, std::move(rng));
    state.set_debug_audit(spec.debug_audit);

    ReplicaOutput out;
    out.fields.reserve(spec.times.size());
    for (double t : spec.times) {
        state.run_until(t);
        out.fields.push_back(coarse_density(state.config(), spec.epsilon).cells());
    }
    if (state.config().particles() != particles) {
        throw std::logic_error("particle count changed along a trajectory");
    }
    out.events = state.events();
    return out;
}

}  // namespace

EnsembleResult ensemble_profile(const EnsembleSpec& spec) {
    if (spec.replicas < 2) {
        throw DomainError("ensemble_profile: at least two replicas are needed for a standard error");
    }
    for (std::size_t i = 0; i < spec.times.size(); ++i) {
        if (spec.times[i] < 0.0 || (i > 0 && spec.times[i] < spec.times[i - 1])) {
            throw DomainError("ensemble_profile: observation times must be nonnegative and nondecreasing");
        }
    }
    const auto model = std::make_shared<const Model>(spec.params);
    const CoarseGrid grid = snap_epsilon(spec.epsilon, spec.params.n);

    std::vector<ReplicaOutput> outputs(spec.replicas);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= spec.replicas) {
                return;
            }
            try {
                outputs[r] = run_replica(spec, model, r);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = spec.replicas;
                return;
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(spec.workers, spec.replicas));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    EnsembleResult result;
    result.grid = grid;
    result.times = spec.times;
    const auto m = static_cast<double>(spec.replicas);
    const std::vector<double> edges = grid.edges(spec.params.n);
    const bool uniform = spec.params.n % grid.sites_per_cell == 0;
    for (std::size_t ti = 0; ti < spec.times.size(); ++ti) {
        std::vector<double> mean(grid.cells);
        std::vector<double> err(grid.cells);
        for (std::size_t c = 0; c < grid.cells; ++c) {
            CompensatedSum sum;
            for (const auto& out : outputs) {
                sum.add(out.fields[ti][c]);
            }
            const double mu = sum.value() / m;
            CompensatedSum sq;
            for (const auto& out : outputs) {
                const double d = out.fields[ti][c] - mu;
                sq.add(d * d);
            }
            mean[c] = mu;
            err[c] = std::sqrt(sq.value() / (m - 1.0) / m);
        }
        if (uniform) {
            result.mean.emplace_back(std::move(mean));
            result.std_error.emplace_back(std::move(err));
        } else {
            result.mean.emplace_back(std::move(mean), edges);
            result.std_error.emplace_back(std::move(err), edges);
        }
    }
    for (const auto& out : outputs) {
        result.replica_events.push_back(out.events);
    }
    return result;
}

}  // namespace bwex
