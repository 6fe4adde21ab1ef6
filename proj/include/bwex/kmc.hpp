#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "bwex/density_field.hpp"
#include "bwex/fenwick.hpp"
#include "bwex/lattice.hpp"
#include "bwex/model.hpp"
#include "bwex/rng.hpp"

namespace bwex {

using Profile = std::function<double(double)>;

/// Bernoulli product configuration with marginals profile(x/N).
[[nodiscard]] Configuration sample_initial(const Profile& profile, std::size_t n, Engine& rng);

struct Event {
    double dt = 0.0;       // macroscopic time increment
    std::size_t node = 0;  // bond {node, node+1} that was exchanged
};

/// Continuous-time simulation of the diffusively accelerated dynamics.
///
/// Holding times are exponential with rate N^2 * total_rate; the bond is
/// drawn proportionally to its rate from a Fenwick index. After an exchange
/// at bond x only bonds in [[x-ell-1, x+ell+1]] can change rate, and only
/// those are recomputed.
class SimState {
public:
    static constexpr std::uint64_t kRebuildInterval = std::uint64_t{1} << 20;
    static constexpr std::uint64_t kAuditInterval = std::uint64_t{1} << 16;
    static constexpr double kAuditTolerance = 1e-9;

    SimState(Configuration cfg, std::shared_ptr<const Model> model, Engine rng);

    [[nodiscard]] const Configuration& config() const noexcept { return cfg_; }
    [[nodiscard]] const Model& model() const noexcept { return *model_; }
    [[nodiscard]] double clock() const noexcept { return clock_; }
    [[nodiscard]] std::uint64_t events() const noexcept { return events_; }
    [[nodiscard]] const std::vector<double>& rates() const noexcept { return sampler_.weights(); }
    [[nodiscard]] double total_rate() const noexcept { return sampler_.total(); }
    /// Empty or full lattice: no bond can ever fire.
    [[nodiscard]] bool frozen() const noexcept { return frozen_; }

    /// Turns on the periodic cache audit (every kAuditInterval events);
    /// a failed audit throws std::logic_error.
    void set_debug_audit(bool on) noexcept { debug_audit_ = on; }

    /// One event. Returns nullopt (and leaves the state unchanged) when frozen.
    std::optional<Event> step();

    /// Advances to macroscopic time t; the clock ends exactly at t.
    void run_until(double t);

    /// max_x |cached rate - node_rate(cfg, x)| by full recomputation.
    [[nodiscard]] double audit() const;

    /// Exact recomputation of every rate and of the sampling index.
    void rebuild();

private:
    void apply(std::size_t node);
    std::size_t draw_node();

    Configuration cfg_;
    std::shared_ptr<const Model> model_;
    Engine rng_;
    FenwickSampler sampler_;
    double clock_ = 0.0;
    double time_scale_ = 1.0;  // N^2
    std::uint64_t events_ = 0;
    std::uint64_t since_rebuild_ = 0;
    bool frozen_ = false;
    bool debug_audit_ = false;
};

/// Builds the rate cache for `cfg`, seeding the event stream from `seed`.
[[nodiscard]] SimState build_state(Configuration cfg, std::shared_ptr<const Model> model, std::uint64_t seed);

/// epsilon snapped to the nearest k/N with integer k >= 1.
struct CoarseGrid {
    std::size_t sites_per_cell = 1;
    std::size_t cells = 1;
    double epsilon = 1.0;
    [[nodiscard]] std::vector<double> edges(std::size_t n) const;
};

[[nodiscard]] CoarseGrid snap_epsilon(double epsilon, std::size_t n);

/// Box averages over [i eps, (i+1) eps) on the snapped grid.
[[nodiscard]] DensityField coarse_density(const Configuration& cfg, double epsilon);

/// (1/N) sum_x |<tau^x eta>_small - <tau^{x+sep} eta>_large| with
/// <eta>_l the average over [[0, l-1]].
[[nodiscard]] double block_gap_diagnostic(const Configuration& cfg, std::size_t small, std::size_t large,
                                          std::size_t separation);

}  // namespace bwex
