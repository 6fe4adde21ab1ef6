#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bwex/beta.hpp"
#include "bwex/density_field.hpp"
#include "bwex/io.hpp"
#include "bwex/kmc.hpp"
#include "bwex/model.hpp"

namespace bwex::harness {

enum ExitCode : int { kOk = 0, kMetricFailure = 1, kConfigError = 2, kIoError = 3 };

/// Macroscopic initial profile rho0 on the unit torus.
///  - constant: value
///  - cosine:   mean + amplitude cos(2 pi mode u)
///  - step:     high on [from, to), low elsewhere
struct InitialProfile {
    std::string kind = "cosine";
    double value = 0.5;
    double mean = 0.5;
    double amplitude = 0.25;
    int mode = 1;
    double low = 0.0;
    double high = 1.0;
    double from = 0.25;
    double to = 0.75;

    [[nodiscard]] Profile function() const;
    /// Exact average over [a, b].
    [[nodiscard]] double average(double a, double b) const;
    [[nodiscard]] DensityField on_grid(const std::vector<double>& edges) const;
    [[nodiscard]] nlohmann::json to_json() const;
    static InitialProfile from_json(const nlohmann::json& block);
};

struct ModelBlock {
    std::vector<std::size_t> sizes{64, 128, 256};
    std::optional<std::size_t> window;  // fixed ell; otherwise ceil(N^exponent)
    double window_exponent = 0.5;
    BetaFunction beta = BetaFunction::ssep();

    [[nodiscard]] std::size_t window_for(std::size_t n) const;
};

struct EnsembleBlock {
    std::size_t replicas = 200;
    std::vector<double> times{0.01};
    double epsilon = 1.0 / 16.0;
    std::uint64_t master_seed = 20240601;
    InitialProfile initial;
    std::size_t workers = 1;
    bool debug_audit = false;
};

struct PdeBlock {
    std::size_t cells = 512;
    double sigma = 0.9;
    std::size_t snapshot_stride = 64;
    std::string phi_source = "limit";  // limit | discrete
    std::size_t phi_degree = 16;       // L for the discrete source
    bool weak_residual = true;
    std::size_t phi_table_points = 101;
};

struct ComparisonBlock {
    Norm norm = Norm::l1;
    double tolerance = 0.03;
    std::string reference = "auto";  // auto | heat | pde
};

struct VerifyBlock {
    std::vector<BetaFunction> betas{BetaFunction::ssep(), BetaFunction::affine_preset(),
                                    BetaFunction::cosine_preset()};
    std::vector<std::size_t> sizes{8, 10};
    std::vector<std::size_t> windows{3, 4};
    std::vector<double> alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    bool corrupt_exclusion = false;
    double identity_tolerance = 1e-12;
    double stationarity_tolerance = 1e-10;
    std::size_t byparts_trials = 20;
};

struct BenchBlock {
    std::vector<std::size_t> sizes{256, 1024, 4096};
    std::uint64_t events = 200000;
    bool audit = true;
};

struct ExperimentConfig {
    ModelBlock model;
    EnsembleBlock ensemble;
    PdeBlock pde;
    ComparisonBlock comparison;
    VerifyBlock verify;
    BenchBlock bench;
    std::filesystem::path output = "out";

    /// Unknown keys anywhere in the tree raise ConfigError.
    static ExperimentConfig from_json(const nlohmann::json& doc);
    [[nodiscard]] nlohmann::json to_json() const;
};

[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

struct Overrides {
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    bool debug_audit = false;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

struct Metric {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

struct VerifyResult {
    std::vector<Metric> metrics;
    [[nodiscard]] bool pass() const;
    [[nodiscard]] std::vector<std::string> failures() const;
};

/// Exact-identity suite over the verify matrix plus the Bernstein checks.
[[nodiscard]] VerifyResult run_verify(const ExperimentConfig& cfg);

struct ComparisonRow {
    std::size_t n = 0;
    std::size_t ell = 0;
    double time = 0.0;
    double distance = 0.0;
    double max_std_error = 0.0;
    std::uint64_t events = 0;
};

struct ComparisonReport {
    std::string reference;  // heat | pde
    double epsilon_requested = 0.0;
    std::vector<ComparisonRow> rows;
    std::vector<double> terminal;  // distance at the last time, per size
    bool monotone = false;
    bool within_tolerance = false;
};

/// Particle ensembles against the macroscopic reference, one row per
/// (N, time); distances are taken on the snapped epsilon-grid of each N.
[[nodiscard]] ComparisonReport run_comparison(const ExperimentConfig& cfg);

/// Reference profile on the coarse grid `edges` at time t.
class Reference {
public:
    explicit Reference(const ExperimentConfig& cfg);
    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }
    [[nodiscard]] DensityField at(double t, const std::vector<double>& edges) const;

private:
    std::string kind_;
    InitialProfile initial_;
    std::vector<double> times_;
    std::vector<DensityField> fields_;
};

/// The diffusivity selected by the pde block.
[[nodiscard]] std::function<double(double)> make_phi(const ExperimentConfig& cfg);

/// Subcommands. Each writes its outputs, the resolved config, a metadata
/// sidecar and the manifest into cfg.output, logs to `log`, and returns an
/// ExitCode.
int cmd_verify(const ExperimentConfig& cfg, std::ostream& log);
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_pde(const ExperimentConfig& cfg, std::ostream& log);
int cmd_converge(const ExperimentConfig& cfg, std::ostream& log);
int cmd_bench(const ExperimentConfig& cfg, std::ostream& log);

/// Dispatches by name and maps exceptions to exit codes.
int run_command(const std::string& name, const ExperimentConfig& cfg, std::ostream& log);

}  // namespace bwex::harness
