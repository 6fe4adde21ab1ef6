#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bwex/density_field.hpp"
#include "bwex/kmc.hpp"
#include "bwex/model.hpp"

namespace bwex {

struct EnsembleSpec {
    ModelParams params;
    std::size_t replicas = 2;
    std::vector<double> times;  // nondecreasing macroscopic observation times
    double epsilon = 1.0 / 16.0;
    std::uint64_t master_seed = 0;
    Profile initial = [](double) { return 0.5; };
    std::size_t workers = 1;
    bool debug_audit = false;
};

struct EnsembleResult {
    CoarseGrid grid;
    std::vector<double> times;
    std::vector<DensityField> mean;       // one per time
    std::vector<DensityField> std_error;  // sample standard error of the mean
    std::vector<std::uint64_t> replica_events;
};

/// Runs `replicas` independent trajectories (stream r seeded by
/// (master_seed, r)) and reduces the coarse-grained profiles in replica
/// order, so the result is the same for any worker count.
[[nodiscard]] EnsembleResult ensemble_profile(const EnsembleSpec& spec);

}  // namespace bwex
