#include "bwex/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "bwex/bernstein.hpp"
#include "bwex/ensemble.hpp"
#include "bwex/errors.hpp"
#include "bwex/exact.hpp"
#include "bwex/pde.hpp"

namespace bwex::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

template <class T>
T read(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        const json& v = obj.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                throw ConfigError(where + "." + key + ": expected a boolean");
            }
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned()) {
                throw ConfigError(where + "." + key + ": expected a nonnegative integer");
            }
        } else if constexpr (std::is_arithmetic_v<T>) {
            if (!v.is_number()) {
                throw ConfigError(where + "." + key + ": expected a number");
            }
        }
        return v.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <class T>
std::vector<T> read_list(const json& obj, const char* key, std::vector<T> fallback, const std::string& where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_array()) {
        throw ConfigError(where + "." + key + ": expected an array");
    }
    std::vector<T> out;
    for (const auto& item : v) {
        if constexpr (std::is_unsigned_v<T>) {
            if (!item.is_number_unsigned()) {
                throw ConfigError(where + "." + key + ": entries must be nonnegative integers");
            }
        } else {
            if (!item.is_number()) {
                throw ConfigError(where + "." + key + ": entries must be numbers");
            }
        }
        out.push_back(item.get<T>());
    }
    return out;
}

void require(bool ok, const std::string& msg) {
    if (!ok) {
        throw ConfigError(msg);
    }
}

std::string beta_label(const BetaFunction& beta) {
    const json j = beta.to_json();
    if (j == BetaFunction::ssep().to_json()) {
        return "const";
    }
    if (j == BetaFunction::affine_preset().to_json()) {
        return "affine";
    }
    if (j == BetaFunction::cosine_preset().to_json()) {
        return "cosine";
    }
    return beta.describe();
}

json beta_to_json(const BetaFunction& beta) {
    const std::string label = beta_label(beta);
    if (label == "const" || label == "affine" || label == "cosine") {
        return label;
    }
    return beta.to_json();
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_run_files(const ExperimentConfig& cfg, const std::string& command, double wall_seconds) {
    // execution details stay out of the hashed config so results compare across runs
    json resolved = cfg.to_json();
    resolved.erase("output");
    resolved["ensemble"].erase("workers");
    io::write_file(cfg.output / "config.resolved.json", resolved.dump(2) + "\n");
    io::KeyValueReport meta;
    meta.add("command", command);
    meta.add("output", cfg.output.string());
    meta.add("workers", static_cast<std::uint64_t>(cfg.ensemble.workers));
    meta.add("finished_utc", utc_timestamp());
    meta.add("wall_seconds", wall_seconds);
    io::write_file(cfg.output / "run.meta.txt", meta.str());
    io::write_manifest(cfg.output);
}

ModelParams params_for(const ExperimentConfig& cfg, std::size_t n) {
    return ModelParams{.n = n, .ell = cfg.model.window_for(n), .beta = cfg.model.beta, .seed = cfg.ensemble.master_seed};
}

EnsembleSpec spec_for(const ExperimentConfig& cfg, std::size_t n) {
    EnsembleSpec spec;
    spec.params = params_for(cfg, n);
    spec.replicas = cfg.ensemble.replicas;
    spec.times = cfg.ensemble.times;
    spec.epsilon = cfg.ensemble.epsilon;
    spec.master_seed = cfg.ensemble.master_seed;
    spec.initial = cfg.ensemble.initial.function();
    spec.workers = cfg.ensemble.workers;
    spec.debug_audit = cfg.ensemble.debug_audit;
    return spec;
}

void write_ensemble(const ExperimentConfig& cfg, const EnsembleSpec& spec, const EnsembleResult& res,
                    double wall_seconds) {
    const std::string stem = "ensemble_N" + std::to_string(spec.params.n);
    io::write_file(cfg.output / (stem + ".csv"), io::ensemble_csv(res.times, res.mean, res.std_error));
    std::uint64_t total = 0;
    std::uint64_t lo = res.replica_events.empty() ? 0 : res.replica_events.front();
    std::uint64_t hi = 0;
    for (auto e : res.replica_events) {
        total += e;
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    io::KeyValueReport meta;
    meta.add("N", static_cast<std::uint64_t>(spec.params.n));
    meta.add("ell", static_cast<std::uint64_t>(spec.params.ell));
    meta.add("beta", spec.params.beta.describe());
    meta.add("epsilon_requested", spec.epsilon);
    meta.add("epsilon_snapped", res.grid.epsilon);
    meta.add("sites_per_cell", static_cast<std::uint64_t>(res.grid.sites_per_cell));
    meta.add("cells", static_cast<std::uint64_t>(res.grid.cells));
    meta.add("replicas", static_cast<std::uint64_t>(spec.replicas));
    meta.add("master_seed", spec.master_seed);
    meta.add("stream_seeds", std::string("(master_seed, replica index 0..M-1)"));
    meta.add("initial", cfg.ensemble.initial.to_json().dump());
    meta.add("events_total", total);
    meta.add("events_min", lo);
    meta.add("events_max", hi);
    meta.add("workers", static_cast<std::uint64_t>(spec.workers));
    meta.add("wall_seconds", wall_seconds);
    io::write_file(cfg.output / (stem + ".meta.txt"), meta.str());
}

std::string metric_key(const std::string& base, const std::string& beta, std::size_t n, std::size_t ell) {
    std::ostringstream out;
    out << base << "[beta=" << beta << ",N=" << n << ",ell=" << ell << "]";
    return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

Profile InitialProfile::function() const {
    if (kind == "constant") {
        return [v = value](double) { return v; };
    }
    if (kind == "cosine") {
        return [m = mean, a = amplitude, k = mode](double u) { return m + a * std::cos(kTwoPi * k * u); };
    }
    return [*this](double u) { return (u >= from && u < to) ? high : low; };
}

double InitialProfile::average(double a, double b) const {
    if (kind == "constant") {
        return value;
    }
    if (kind == "cosine") {
        const double w = kTwoPi * mode;
        return mean + amplitude * (std::sin(w * b) - std::sin(w * a)) / (w * (b - a));
    }
    const double overlap = std::max(0.0, std::min(b, to) - std::max(a, from));
    return low + (high - low) * overlap / (b - a);
}

DensityField InitialProfile::on_grid(const std::vector<double>& edges) const {
    std::vector<double> v(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        v[i] = average(edges[i], edges[i + 1]);
    }
    return {std::move(v), edges};
}

json InitialProfile::to_json() const {
    if (kind == "constant") {
        return {{"kind", kind}, {"value", value}};
    }
    if (kind == "cosine") {
        return {{"kind", kind}, {"mean", mean}, {"amplitude", amplitude}, {"mode", mode}};
    }
    return {{"kind", kind}, {"low", low}, {"high", high}, {"from", from}, {"to", to}};
}

InitialProfile InitialProfile::from_json(const json& block) {
    const std::string where = "ensemble.initial";
    InitialProfile p;
    reject_unknown(block, {"kind", "value", "mean", "amplitude", "mode", "low", "high", "from", "to"}, where);
    p.kind = read<std::string>(block, "kind", "cosine", where);
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (p.kind == "constant") {
        reject_unknown(block, {"kind", "value"}, where);
        p.value = read<double>(block, "value", 0.5, where);
        require(in_unit(p.value), where + ": value must lie in [0,1]");
    } else if (p.kind == "cosine") {
        reject_unknown(block, {"kind", "mean", "amplitude", "mode"}, where);
        p.mean = read<double>(block, "mean", 0.5, where);
        p.amplitude = read<double>(block, "amplitude", 0.25, where);
        p.mode = read<int>(block, "mode", 1, where);
        require(p.mode >= 1, where + ": mode must be >= 1");
        require(in_unit(p.mean - std::abs(p.amplitude)) && in_unit(p.mean + std::abs(p.amplitude)),
                where + ": profile must stay in [0,1]");
    } else if (p.kind == "step") {
        reject_unknown(block, {"kind", "low", "high", "from", "to"}, where);
        p.low = read<double>(block, "low", 0.0, where);
        p.high = read<double>(block, "high", 1.0, where);
        p.from = read<double>(block, "from", 0.25, where);
        p.to = read<double>(block, "to", 0.75, where);
        require(in_unit(p.low) && in_unit(p.high), where + ": levels must lie in [0,1]");
        require(p.from >= 0.0 && p.from < p.to && p.to <= 1.0, where + ": need 0 <= from < to <= 1");
    } else {
        throw ConfigError(where + ": unknown kind '" + p.kind + "'");
    }
    return p;
}

std::size_t ModelBlock::window_for(std::size_t n) const { return window ? *window : default_window(n, window_exponent); }

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
    ExperimentConfig c;
    reject_unknown(doc, {"model", "ensemble", "pde", "comparison", "verify", "bench", "output"}, "config");

    try {
        if (doc.contains("model")) {
            const json& m = doc.at("model");
            reject_unknown(m, {"sizes", "window", "window_exponent", "beta"}, "model");
            c.model.sizes = read_list<std::size_t>(m, "sizes", c.model.sizes, "model");
            if (m.contains("window")) {
                c.model.window = read<std::size_t>(m, "window", 1, "model");
            }
            c.model.window_exponent = read<double>(m, "window_exponent", 0.5, "model");
            require(c.model.window_exponent > 0.0 && c.model.window_exponent < 1.0,
                    "model.window_exponent must lie in (0,1)");
            if (m.contains("beta")) {
                c.model.beta = BetaFunction::from_json(m.at("beta"));
            }
        }
        if (doc.contains("ensemble")) {
            const json& e = doc.at("ensemble");
            reject_unknown(e, {"replicas", "times", "epsilon", "master_seed", "initial", "workers", "debug_audit"},
                           "ensemble");
            c.ensemble.replicas = read<std::size_t>(e, "replicas", c.ensemble.replicas, "ensemble");
            c.ensemble.times = read_list<double>(e, "times", c.ensemble.times, "ensemble");
            c.ensemble.epsilon = read<double>(e, "epsilon", c.ensemble.epsilon, "ensemble");
            c.ensemble.master_seed = read<std::uint64_t>(e, "master_seed", c.ensemble.master_seed, "ensemble");
            if (e.contains("initial")) {
                c.ensemble.initial = InitialProfile::from_json(e.at("initial"));
            }
            c.ensemble.workers = read<std::size_t>(e, "workers", c.ensemble.workers, "ensemble");
            c.ensemble.debug_audit = read<bool>(e, "debug_audit", false, "ensemble");
        }
        if (doc.contains("pde")) {
            const json& p = doc.at("pde");
            reject_unknown(p, {"cells", "sigma", "snapshot_stride", "phi", "phi_degree", "weak_residual",
                               "phi_table_points"},
                           "pde");
            c.pde.cells = read<std::size_t>(p, "cells", c.pde.cells, "pde");
            c.pde.sigma = read<double>(p, "sigma", c.pde.sigma, "pde");
            c.pde.snapshot_stride = read<std::size_t>(p, "snapshot_stride", c.pde.snapshot_stride, "pde");
            c.pde.phi_source = read<std::string>(p, "phi", c.pde.phi_source, "pde");
            c.pde.phi_degree = read<std::size_t>(p, "phi_degree", c.pde.phi_degree, "pde");
            c.pde.weak_residual = read<bool>(p, "weak_residual", c.pde.weak_residual, "pde");
            c.pde.phi_table_points = read<std::size_t>(p, "phi_table_points", c.pde.phi_table_points, "pde");
        }
        if (doc.contains("comparison")) {
            const json& p = doc.at("comparison");
            reject_unknown(p, {"norm", "tolerance", "reference"}, "comparison");
            const auto norm = read<std::string>(p, "norm", "l1", "comparison");
            require(norm == "l1" || norm == "linf", "comparison.norm must be 'l1' or 'linf'");
            c.comparison.norm = norm == "l1" ? Norm::l1 : Norm::linf;
            c.comparison.tolerance = read<double>(p, "tolerance", c.comparison.tolerance, "comparison");
            c.comparison.reference = read<std::string>(p, "reference", c.comparison.reference, "comparison");
        }
        if (doc.contains("verify")) {
            const json& v = doc.at("verify");
            reject_unknown(v, {"betas", "sizes", "windows", "alphas", "corrupt_exclusion", "identity_tolerance",
                               "stationarity_tolerance", "byparts_trials"},
                           "verify");
            if (v.contains("betas")) {
                require(v.at("betas").is_array(), "verify.betas: expected an array");
                c.verify.betas.clear();
                for (const auto& b : v.at("betas")) {
                    c.verify.betas.push_back(BetaFunction::from_json(b));
                }
            }
            c.verify.sizes = read_list<std::size_t>(v, "sizes", c.verify.sizes, "verify");
            c.verify.windows = read_list<std::size_t>(v, "windows", c.verify.windows, "verify");
            c.verify.alphas = read_list<double>(v, "alphas", c.verify.alphas, "verify");
            c.verify.corrupt_exclusion = read<bool>(v, "corrupt_exclusion", false, "verify");
            c.verify.identity_tolerance =
                read<double>(v, "identity_tolerance", c.verify.identity_tolerance, "verify");
            c.verify.stationarity_tolerance =
                read<double>(v, "stationarity_tolerance", c.verify.stationarity_tolerance, "verify");
            c.verify.byparts_trials = read<std::size_t>(v, "byparts_trials", c.verify.byparts_trials, "verify");
        }
        if (doc.contains("bench")) {
            const json& b = doc.at("bench");
            reject_unknown(b, {"sizes", "events", "audit"}, "bench");
            c.bench.sizes = read_list<std::size_t>(b, "sizes", c.bench.sizes, "bench");
            c.bench.events = read<std::uint64_t>(b, "events", c.bench.events, "bench");
            c.bench.audit = read<bool>(b, "audit", c.bench.audit, "bench");
        }
        if (doc.contains("output")) {
            c.output = read<std::string>(doc, "output", "out", "config");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    // structural checks
    require(!c.model.sizes.empty(), "model.sizes must not be empty");
    for (std::size_t n : c.model.sizes) {
        try {
            (void)Model(ModelParams{.n = n, .ell = c.model.window_for(n), .beta = c.model.beta});
        } catch (const std::invalid_argument& e) {
            throw ConfigError("model: N=" + std::to_string(n) + ": " + e.what());
        }
    }
    require(c.ensemble.replicas >= 2, "ensemble.replicas must be >= 2");
    require(!c.ensemble.times.empty(), "ensemble.times must not be empty");
    for (std::size_t i = 0; i < c.ensemble.times.size(); ++i) {
        require(c.ensemble.times[i] >= 0.0 && (i == 0 || c.ensemble.times[i] >= c.ensemble.times[i - 1]),
                "ensemble.times must be nonnegative and nondecreasing");
    }
    require(c.ensemble.epsilon > 0.0 && c.ensemble.epsilon < 1.0, "ensemble.epsilon must lie in (0,1)");
    require(c.ensemble.workers >= 1, "ensemble.workers must be >= 1");
    require(c.pde.cells >= 3, "pde.cells must be >= 3");
    require(c.pde.sigma > 0.0 && c.pde.sigma <= 1.0, "pde.sigma must lie in (0,1]");
    require(c.pde.snapshot_stride >= 1, "pde.snapshot_stride must be >= 1");
    require(c.pde.phi_source == "limit" || c.pde.phi_source == "discrete", "pde.phi must be 'limit' or 'discrete'");
    require(c.pde.phi_degree >= 1 && c.pde.phi_degree <= BinomialTable::kMaxDegree,
            "pde.phi_degree must lie in [1, 1000]");
    require(c.pde.phi_table_points >= 2, "pde.phi_table_points must be >= 2");
    require(c.comparison.tolerance > 0.0, "comparison.tolerance must be positive");
    require(c.comparison.reference == "auto" || c.comparison.reference == "heat" || c.comparison.reference == "pde",
            "comparison.reference must be 'auto', 'heat' or 'pde'");
    for (double a : c.verify.alphas) {
        require(a > 0.0 && a < 1.0, "verify.alphas must lie in (0,1)");
    }
    for (std::size_t n : c.bench.sizes) {
        require(n >= 3, "bench.sizes must be >= 3");
        (void)c.model.window_for(n);
    }
    return c;
}

json ExperimentConfig::to_json() const {
    json model_j = {{"sizes", model.sizes}, {"window_exponent", model.window_exponent},
                    {"beta", beta_to_json(model.beta)}};
    if (model.window) {
        model_j["window"] = *model.window;
    }
    json betas = json::array();
    for (const auto& b : verify.betas) {
        betas.push_back(beta_to_json(b));
    }
    return {
        {"model", model_j},
        {"ensemble",
         {{"replicas", ensemble.replicas},
          {"times", ensemble.times},
          {"epsilon", ensemble.epsilon},
          {"master_seed", ensemble.master_seed},
          {"initial", ensemble.initial.to_json()},
          {"workers", ensemble.workers},
          {"debug_audit", ensemble.debug_audit}}},
        {"pde",
         {{"cells", pde.cells},
          {"sigma", pde.sigma},
          {"snapshot_stride", pde.snapshot_stride},
          {"phi", pde.phi_source},
          {"phi_degree", pde.phi_degree},
          {"weak_residual", pde.weak_residual},
          {"phi_table_points", pde.phi_table_points}}},
        {"comparison",
         {{"norm", comparison.norm == Norm::l1 ? "l1" : "linf"},
          {"tolerance", comparison.tolerance},
          {"reference", comparison.reference}}},
        {"verify",
         {{"betas", betas},
          {"sizes", verify.sizes},
          {"windows", verify.windows},
          {"alphas", verify.alphas},
          {"corrupt_exclusion", verify.corrupt_exclusion},
          {"identity_tolerance", verify.identity_tolerance},
          {"stationarity_tolerance", verify.stationarity_tolerance},
          {"byparts_trials", verify.byparts_trials}}},
        {"bench", {{"sizes", bench.sizes}, {"events", bench.events}, {"audit", bench.audit}}},
        {"output", output.string()},
    };
}

ExperimentConfig load_config(const fs::path& path) {
    const std::string text = io::read_file(path);
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return ExperimentConfig::from_json(doc);
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
    if (o.out) {
        cfg.output = *o.out;
    }
    if (o.seed) {
        cfg.ensemble.master_seed = *o.seed;
    }
    if (o.workers) {
        require(*o.workers >= 1, "--workers must be >= 1");
        cfg.ensemble.workers = *o.workers;
    }
    if (o.debug_audit) {
        cfg.ensemble.debug_audit = true;
    }
}

// ---------------------------------------------------------------------------
// verify

bool VerifyResult::pass() const {
    return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass; });
}

std::vector<std::string> VerifyResult::failures() const {
    std::vector<std::string> out;
    for (const auto& m : metrics) {
        if (!m.pass) {
            out.push_back(m.name);
        }
    }
    return out;
}

VerifyResult run_verify(const ExperimentConfig& cfg) {
    const VerifyBlock& v = cfg.verify;
    require(!v.betas.empty() && !v.sizes.empty() && !v.windows.empty(), "verify: empty test matrix");
    for (std::size_t n : v.sizes) {
        require(n <= 12, "verify: exact checks are limited to N <= 12");
    }

    VerifyResult result;
    auto record = [&](std::string name, double value, double limit) {
        result.metrics.push_back({std::move(name), value, limit, std::isfinite(value) && value <= limit});
    };
    const double tol = v.identity_tolerance;
    const double stol = v.stationarity_tolerance;
    const ExclusionRule rule = v.corrupt_exclusion ? ExclusionRule::doubled_left : ExclusionRule::standard;

    std::size_t combos = 0;
    for (const auto& beta : v.betas) {
        const std::string label = beta_label(beta);
        for (std::size_t n : v.sizes) {
            for (std::size_t ell : v.windows) {
                if (ell < 1 || ell + 2 > n) {
                    continue;
                }
                ++combos;
                const Model model(ModelParams{.n = n, .ell = ell, .beta = beta, .exclusion = rule});
                const auto grad = exact::gradient_identity_residual(model);
                record(metric_key("gradient.current", label, n, ell), grad.current, tol);
                record(metric_key("gradient.generator", label, n, ell), grad.generator, tol);

                std::mt19937_64 rng(cfg.ensemble.master_seed ^ (n * 131 + ell));
                std::normal_distribution<double> gauss;
                std::vector<exact::StateVector> obs{exact::tabulate([](const Configuration& c) { return c.at(0); }, n)};
                for (int k = 0; k < 2; ++k) {
                    exact::StateVector f(std::size_t{1} << n);
                    for (auto& x : f) {
                        x = gauss(rng);
                    }
                    obs.push_back(std::move(f));
                }
                record(metric_key("decomposition", label, n, ell), exact::decomposition_residual(model, obs), tol);

                const auto q = exact::build_generator(model);
                double stat = 0.0;
                double balance = 0.0;
                double mean_g = 0.0;
                for (double alpha : v.alphas) {
                    stat = std::max(stat, exact::stationarity_residual(q, alpha));
                    balance = std::max(balance, exact::detailed_balance_residual(q, alpha));
                    mean_g = std::max(mean_g, std::abs(exact::exact_expectation(
                                                  [&](const Configuration& c) {
                                                      return potential_g(c, TorusIndex(0, n), model);
                                                  },
                                                  alpha, n)));
                }
                record(metric_key("stationarity", label, n, ell), stat, stol);
                record(metric_key("detailed_balance", label, n, ell), balance, stol);
                record(metric_key("mean_g", label, n, ell), mean_g, tol);
                if (ell <= kSubsetEnumerationLimit) {
                    record(metric_key("h_representation", label, n, ell), exact::h_representation_residual(model),
                           tol);
                }
            }
        }
    }
    require(combos > 0, "verify: no (N, ell) pair in the matrix satisfies ell + 2 <= N");

    // integration by parts under nu_alpha
    double byparts = 0.0;
    std::uint64_t seed = cfg.ensemble.master_seed;
    for (auto [x, y] : {std::pair<std::size_t, std::size_t>{1, 5}, {0, 1}, {3, 3}, {7, 2}}) {
        for (double alpha : {0.3, 0.5}) {
            byparts = std::max(byparts, exact::byparts_identity_check(8, x, y, alpha, v.byparts_trials, ++seed));
        }
    }
    record("byparts", byparts, tol);

    // Bernstein invariants
    double unity = 0.0;
    for (std::size_t degree : {1UL, 8UL, 64UL, 256UL}) {
        for (int i = 0; i < 1024; ++i) {
            double s = 0.0;
            for (double b : bernstein_all(degree, i / 1023.0)) {
                s += b;
            }
            unity = std::max(unity, std::abs(s - 1.0));
        }
    }
    record("bernstein.partition_of_unity", unity, 1e-12);

    double representation = 0.0;
    for (std::size_t degree = 1; degree <= 32; ++degree) {
        for (std::size_t n = 0; n <= degree; ++n) {
            for (int i = 0; i < 64; ++i) {
                const double u = i / 63.0;
                representation = std::max(representation, std::abs(H_explicit(n, degree, u) - H_primitive(n, degree, u)));
            }
        }
    }
    record("bernstein.H_explicit_vs_primitive", representation, 1e-9);

    for (const auto& beta : v.betas) {
        const std::string label = beta_label(beta);
        const Model model(ModelParams{.n = 8, .ell = 4, .beta = beta});
        double consistency = 0.0;
        for (double alpha : {0.25, 0.5, 0.75}) {
            const double e = exact::exact_expectation(
                [&](const Configuration& c) { return potential_h(c, TorusIndex(0, 8), model); }, alpha, 8);
            consistency = std::max(consistency, std::abs(e - phi_discrete(beta, 4, alpha)));
        }
        record("phi_consistency[beta=" + label + "]", consistency, tol);

        const double g8 = sup_gap(beta, 8, 257);
        const double g64 = sup_gap(beta, 64, 257);
        if (g8 <= 1e-13) {
            record("sup_gap.L64[beta=" + label + "]", g64, 1e-13);
        } else {
            // g64 must improve on g8
            record("sup_gap.L64_over_L8[beta=" + label + "]", g64 / g8, 1.0 - 1e-12);
        }

        double derivative = 0.0;
        for (double u : {0.2, 0.5, 0.8}) {
            const double d = 1e-4;
            const double fd = (phi_discrete(beta, 16, u + d) - phi_discrete(beta, 16, u - d)) / (2.0 * d);
            derivative = std::max(derivative, std::abs(fd - bezier_sum(beta, 16, u)));
        }
        record("phi_derivative[beta=" + label + "]", derivative, 1e-6);
    }
    return result;
}

// ---------------------------------------------------------------------------
// comparison

std::function<double(double)> make_phi(const ExperimentConfig& cfg) {
    const BetaFunction beta = cfg.model.beta;
    if (beta.is_constant()) {
        const double c = beta(0.0);
        return [c](double r) { return c * r; };
    }
    if (cfg.pde.phi_source == "discrete") {
        return [beta, degree = cfg.pde.phi_degree](double r) { return phi_discrete(beta, degree, r); };
    }
    return [beta](double r) { return phi_limit(beta, r); };
}

namespace {

double phi_sup_slope(const ExperimentConfig& cfg) {
    const BetaFunction& beta = cfg.model.beta;
    if (cfg.pde.phi_source == "discrete" && !beta.is_constant()) {
        // B_{beta,L} is a convex combination of the grid values beta(n/L)
        double best = 0.0;
        for (std::size_t n = 0; n <= cfg.pde.phi_degree; ++n) {
            best = std::max(best, beta(static_cast<double>(n) / static_cast<double>(cfg.pde.phi_degree)));
        }
        return best;
    }
    return beta.sup_on_grid();
}

pde::Solution solve_reference(const ExperimentConfig& cfg, const std::vector<double>& times) {
    const double horizon = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
    require(horizon > 0.0, "pde: the largest ensemble time must be positive");
    const DensityField rho0(cfg.ensemble.initial.on_grid(uniform_edges(cfg.pde.cells)).cells());
    pde::SolverParams params{.cells = cfg.pde.cells,
                             .sigma = cfg.pde.sigma,
                             .phi = make_phi(cfg),
                             .sup_slope = phi_sup_slope(cfg),
                             .snapshot_stride = cfg.pde.snapshot_stride};
    return pde::solve(rho0, horizon, params, times);
}

}  // namespace

Reference::Reference(const ExperimentConfig& cfg) : initial_(cfg.ensemble.initial), times_(cfg.ensemble.times) {
    const BetaFunction& beta = cfg.model.beta;
    const bool heat_ok = beta.is_constant() && (initial_.kind == "cosine" || initial_.kind == "constant");
    kind_ = cfg.comparison.reference;
    if (kind_ == "auto") {
        kind_ = heat_ok ? "heat" : "pde";
    }
    if (kind_ == "heat") {
        require(heat_ok, "comparison.reference 'heat' needs a constant beta and a cosine or constant profile");
        // time is rescaled by the constant diffusivity
        for (auto& t : times_) {
            t *= beta(0.0);
        }
        return;
    }
    const auto sol = solve_reference(cfg, times_);
    for (double t : times_) {
        fields_.push_back(sol.at(t));
    }
}

DensityField Reference::at(double t, const std::vector<double>& edges) const {
    const auto it = std::find(times_.begin(), times_.end(), t);
    if (kind_ == "heat") {
        const double scaled = it == times_.end() ? t : *it;
        if (initial_.kind == "constant") {
            return {std::vector<double>(edges.size() - 1, initial_.value), edges};
        }
        return pde::HeatSolution(initial_.mean, {{initial_.mode, initial_.amplitude}}).on_grid(scaled, edges);
    }
    if (it == times_.end()) {
        throw DomainError("reference: time not among the requested output times");
    }
    return fields_[static_cast<std::size_t>(it - times_.begin())].restrict_to(edges);
}

ComparisonReport run_comparison(const ExperimentConfig& cfg) {
    require(cfg.model.sizes.size() >= 2, "converge: at least two lattice sizes are required");
    ComparisonReport report;
    report.epsilon_requested = cfg.ensemble.epsilon;

    const Reference reference(cfg);
    report.reference = reference.kind();
    const double time_scale = reference.kind() == "heat" ? cfg.model.beta(0.0) : 1.0;

    for (std::size_t n : cfg.model.sizes) {
        const auto spec = spec_for(cfg, n);
        const auto res = ensemble_profile(spec);
        const auto edges = res.grid.edges(n);
        std::uint64_t events = 0;
        for (auto e : res.replica_events) {
            events += e;
        }
        for (std::size_t ti = 0; ti < res.times.size(); ++ti) {
            const double t = res.times[ti];
            const DensityField ref = reference.at(t * time_scale, edges);
            const DensityField mean(res.mean[ti].cells(), edges);
            ComparisonRow row;
            row.n = n;
            row.ell = spec.params.ell;
            row.time = t;
            row.distance = distance(mean, ref, cfg.comparison.norm);
            row.max_std_error = res.std_error[ti].max();
            row.events = events;
            report.rows.push_back(row);
        }
        report.terminal.push_back(report.rows.back().distance);
    }
    report.monotone = true;
    for (std::size_t i = 1; i < report.terminal.size(); ++i) {
        report.monotone = report.monotone && report.terminal[i] < report.terminal[i - 1];
    }
    report.within_tolerance = report.terminal.back() <= cfg.comparison.tolerance;
    return report;
}

// ---------------------------------------------------------------------------
// commands

int cmd_verify(const ExperimentConfig& cfg, std::ostream& log) {
    const Stopwatch clock;
    const VerifyResult result = run_verify(cfg);
    io::KeyValueReport report;
    for (const auto& m : result.metrics) {
        report.add(m.name, m.value);
        report.add(m.name + ".limit", m.limit);
    }
    const auto failed = result.failures();
    std::string failed_list;
    for (const auto& f : failed) {
        failed_list += (failed_list.empty() ? "" : ",") + f;
    }
    report.add("metrics", static_cast<std::uint64_t>(result.metrics.size()));
    report.add("failed", failed_list.empty() ? std::string("none") : failed_list);
    report.add("status", std::string(result.pass() ? "pass" : "fail"));
    io::write_file(cfg.output / "verify_report.txt", report.str());
    write_run_files(cfg, "verify", clock.seconds());

    log << "verify: " << result.metrics.size() << " metrics, " << failed.size() << " failed\n";
    for (const auto& m : result.metrics) {
        if (!m.pass) {
            log << "  FAIL " << m.name << " = " << io::format_double(m.value) << " (limit " << m.limit << ")\n";
        }
    }
    return result.pass() ? kOk : kMetricFailure;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
    const Stopwatch clock;
    for (std::size_t n : cfg.model.sizes) {
        const Stopwatch run;
        const auto spec = spec_for(cfg, n);
        const auto res = ensemble_profile(spec);
        write_ensemble(cfg, spec, res, run.seconds());
        log << "simulate: N=" << n << " ell=" << spec.params.ell << " replicas=" << spec.replicas << " done in "
            << run.seconds() << " s\n";
    }
    write_run_files(cfg, "simulate", clock.seconds());
    return kOk;
}

int cmd_pde(const ExperimentConfig& cfg, std::ostream& log) {
    const Stopwatch clock;
    const auto phi = make_phi(cfg);
    const auto sol = solve_reference(cfg, cfg.ensemble.times);
    const DensityField rho0(cfg.ensemble.initial.on_grid(uniform_edges(cfg.pde.cells)).cells());

    std::vector<double> times{0.0};
    std::vector<DensityField> fields{rho0};
    for (double t : cfg.ensemble.times) {
        if (t > times.back()) {
            times.push_back(t);
            fields.push_back(sol.at(t));
        }
    }
    io::write_file(cfg.output / "pde.csv", io::trajectory_csv(times, fields));

    io::KeyValueReport report;
    report.add("cells", static_cast<std::uint64_t>(cfg.pde.cells));
    report.add("phi", cfg.pde.phi_source == "discrete" && !cfg.model.beta.is_constant()
                          ? "discrete(L=" + std::to_string(cfg.pde.phi_degree) + ")"
                          : std::string("limit"));
    report.add("dt", sol.dt);
    report.add("steps", static_cast<std::uint64_t>(sol.steps));
    double drift = 0.0;
    double lo = rho0.min();
    double hi = rho0.max();
    for (const auto& s : sol.snapshots) {
        drift = std::max(drift, std::abs(s.mass() - rho0.mass()));
        lo = std::min(lo, s.min());
        hi = std::max(hi, s.max());
    }
    report.add("mass_drift", drift);
    report.add("max_principle_ok", std::string(lo >= rho0.min() && hi <= rho0.max() ? "true" : "false"));
    if (cfg.pde.weak_residual) {
        const std::vector<std::pair<std::string, pde::TestFunction>> tests{
            {"one", pde::cosine_test(0)},
            {"cos1", pde::cosine_test(1)},
            {"sin1", pde::sine_test(1)},
            {"cos2", pde::cosine_test(2)}};
        for (std::size_t k = 1; k < times.size(); ++k) {
            for (const auto& [name, g] : tests) {
                report.add("weak_residual[G=" + name + ",t=" + io::format_double(times[k]) + "]",
                           pde::weak_residual(sol, rho0, g, times[k], phi));
            }
        }
    }
    io::write_file(cfg.output / "pde_report.txt", report.str());

    // phi-table export
    const BetaFunction& beta = cfg.model.beta;
    const std::size_t degree = cfg.pde.phi_degree;
    std::string table = "u,phi_discrete,phi_limit,bezier,beta\n";
    for (std::size_t i = 0; i < cfg.pde.phi_table_points; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(cfg.pde.phi_table_points - 1);
        table += io::format_double(u) + ',' + io::format_double(phi_discrete(beta, degree, u)) + ',' +
                 io::format_double(phi_limit(beta, u)) + ',' + io::format_double(bezier_sum(beta, degree, u)) + ',' +
                 io::format_double(beta(u)) + '\n';
    }
    io::write_file(cfg.output / "phi_table.csv", table);
    write_run_files(cfg, "pde", clock.seconds());
    log << "pde: K=" << cfg.pde.cells << " steps=" << sol.steps << " dt=" << sol.dt << "\n";
    return kOk;
}

int cmd_converge(const ExperimentConfig& cfg, std::ostream& log) {
    const Stopwatch clock;
    const ComparisonReport report = run_comparison(cfg);
    std::string csv = "N,ell,time,distance,max_stderr,events\n";
    for (const auto& r : report.rows) {
        csv += std::to_string(r.n) + ',' + std::to_string(r.ell) + ',' + io::format_double(r.time) + ',' +
               io::format_double(r.distance) + ',' + io::format_double(r.max_std_error) + ',' +
               std::to_string(r.events) + '\n';
    }
    io::write_file(cfg.output / "converge.csv", csv);

    io::KeyValueReport kv;
    kv.add("reference", report.reference);
    kv.add("norm", std::string(cfg.comparison.norm == Norm::l1 ? "l1" : "linf"));
    kv.add("epsilon_requested", report.epsilon_requested);
    for (std::size_t i = 0; i < cfg.model.sizes.size(); ++i) {
        const std::size_t n = cfg.model.sizes[i];
        kv.add("epsilon_snapped[N=" + std::to_string(n) + "]", snap_epsilon(cfg.ensemble.epsilon, n).epsilon);
        kv.add("distance_terminal[N=" + std::to_string(n) + "]", report.terminal[i]);
    }
    kv.add("tolerance", cfg.comparison.tolerance);
    kv.add("monotone", std::string(report.monotone ? "true" : "false"));
    kv.add("within_tolerance", std::string(report.within_tolerance ? "true" : "false"));
    const bool ok = report.monotone && report.within_tolerance;
    kv.add("status", std::string(ok ? "pass" : "fail"));
    io::write_file(cfg.output / "converge_report.txt", kv.str());
    write_run_files(cfg, "converge", clock.seconds());

    log << "converge (" << report.reference << " reference):\n";
    for (std::size_t i = 0; i < report.terminal.size(); ++i) {
        log << "  N=" << cfg.model.sizes[i] << " d=" << io::format_double(report.terminal[i]) << "\n";
    }
    log << "  monotone=" << (report.monotone ? "true" : "false")
        << " within_tolerance=" << (report.within_tolerance ? "true" : "false") << "\n";
    return ok ? kOk : kMetricFailure;
}

int cmd_bench(const ExperimentConfig& cfg, std::ostream& log) {
    const Stopwatch clock;
    std::string csv = "N,ell,events,seconds,events_per_second,ns_per_event,refresh_bonds,refresh_ns,audit_max_deviation\n";
    io::KeyValueReport report;
    bool audit_ok = true;

    {
        // frozen lattice: no events, finite wall time
        const std::size_t n = cfg.bench.sizes.empty() ? 256 : cfg.bench.sizes.front();
        const auto model = std::make_shared<const Model>(params_for(cfg, n));
        auto state = build_state(Configuration(n), model, cfg.ensemble.master_seed);
        const Stopwatch w;
        state.run_until(1.0);
        report.add("empty.events", state.events());
        report.add("empty.wall_finite", std::string(std::isfinite(w.seconds()) ? "true" : "false"));
    }

    for (std::size_t n : cfg.bench.sizes) {
        const auto model = std::make_shared<const Model>(params_for(cfg, n));
        Engine rng = make_stream(cfg.ensemble.master_seed, n);
        auto state = SimState(sample_initial([](double) { return 0.5; }, n, rng), model, std::move(rng));
        state.set_debug_audit(cfg.bench.audit);
        const Stopwatch w;
        std::uint64_t done = 0;
        while (done < cfg.bench.events && state.step()) {
            ++done;
        }
        const double secs = w.seconds();
        const double deviation = state.audit();
        audit_ok = audit_ok && deviation <= SimState::kAuditTolerance;

        // cost of recomputing the refresh span once, measured in isolation
        const std::size_t span = std::min(n, 2 * model->ell() + 3);
        const int reps = 2000;
        double sink = 0.0;
        const Stopwatch rw;
        for (int r = 0; r < reps; ++r) {
            for (std::size_t k = 0; k < span; ++k) {
                sink += model->fast_rate(state.config(), (static_cast<std::size_t>(r) * 7 + k) % n);
            }
        }
        const double refresh_ns = rw.seconds() * 1e9 / reps + (sink < 0.0 ? 1.0 : 0.0);

        csv += std::to_string(n) + ',' + std::to_string(model->ell()) + ',' + std::to_string(done) + ',' +
               io::format_double(secs) + ',' + io::format_double(done / std::max(secs, 1e-12)) + ',' +
               io::format_double(secs * 1e9 / std::max<double>(1.0, static_cast<double>(done))) + ',' +
               std::to_string(span) + ',' + io::format_double(refresh_ns) + ',' + io::format_double(deviation) + '\n';
        const std::string key = "[N=" + std::to_string(n) + "]";
        report.add("ell" + key, static_cast<std::uint64_t>(model->ell()));
        report.add("events" + key, done);
        report.add("refresh_bonds" + key, static_cast<std::uint64_t>(span));
        report.add("audit_max_deviation" + key, deviation);
        log << "bench: N=" << n << " ell=" << model->ell() << " " << done << " events in " << secs << " s ("
            << done / std::max(secs, 1e-12) << " ev/s)\n";
    }
    report.add("audit_pass", std::string(audit_ok ? "true" : "false"));
    io::write_file(cfg.output / "bench.csv", csv);
    io::write_file(cfg.output / "bench_report.txt", report.str());
    write_run_files(cfg, "bench", clock.seconds());
    return audit_ok ? kOk : kMetricFailure;
}

int run_command(const std::string& name, const ExperimentConfig& cfg, std::ostream& log) {
    try {
        if (name == "verify") {
            return cmd_verify(cfg, log);
        }
        if (name == "simulate") {
            return cmd_simulate(cfg, log);
        }
        if (name == "pde") {
            return cmd_pde(cfg, log);
        }
        if (name == "converge") {
            return cmd_converge(cfg, log);
        }
        if (name == "bench") {
            return cmd_bench(cfg, log);
        }
        throw ConfigError("unknown command '" + name + "'");
    } catch (const IoError& e) {
        log << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::domain_error& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kMetricFailure;
    }
}

}  // namespace bwex::harness
