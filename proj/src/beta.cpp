#include "bwex/beta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "bwex/errors.hpp"

namespace bwex {

namespace {

constexpr int kValidationPoints = 10000;

double get_number(const nlohmann::json& block, const char* key, double fallback) {
    if (!block.contains(key)) {
        return fallback;
    }
    if (!block.at(key).is_number()) {
        throw ConfigError(std::string("beta: '") + key + "' must be a number");
    }
    return block.at(key).get<double>();
}

void reject_unknown(const nlohmann::json& block, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : block.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("beta: unknown key '" + key + "'");
        }
    }
}

}  // namespace

BetaFunction BetaFunction::constant(double value) {
    BetaFunction b;
    b.kind_ = Kind::constant;
    b.par_ = {value};
    b.validate();
    return b;
}

BetaFunction BetaFunction::affine(double intercept, double slope, double lo, double hi) {
    BetaFunction b;
    b.kind_ = Kind::affine;
    b.par_ = {intercept, slope, lo, hi};
    b.validate();
    return b;
}

BetaFunction BetaFunction::trigonometric(double mean, double amplitude, int frequency, double phase) {
    BetaFunction b;
    b.kind_ = Kind::trigonometric;
    b.par_ = {mean, amplitude, static_cast<double>(frequency), phase};
    b.validate();
    return b;
}

BetaFunction BetaFunction::table(std::vector<std::pair<double, double>> points) {
    if (points.size() < 2) {
        throw DomainError("beta table needs at least two points");
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].first > points[i - 1].first)) {
            throw DomainError("beta table abscissae must be strictly increasing");
        }
    }
    if (points.front().first > 0.0 || points.back().first < 1.0) {
        throw DomainError("beta table must cover [0,1]");
    }
    BetaFunction b;
    b.kind_ = Kind::table;
    b.points_ = std::move(points);
    b.validate();
    return b;
}

double BetaFunction::operator()(double u) const {
    switch (kind_) {
        case Kind::constant:
            return par_[0];
        case Kind::affine:
            return std::clamp(par_[0] + par_[1] * u, par_[2], par_[3]);
        case Kind::trigonometric:
            return par_[0] + par_[1] * std::cos(2.0 * std::numbers::pi * par_[2] * u + par_[3]);
        case Kind::table: {
            auto it = std::upper_bound(points_.begin(), points_.end(), u,
                                       [](double v, const auto& p) { return v < p.first; });
            if (it == points_.begin()) {
                return points_.front().second;
            }
            if (it == points_.end()) {
                return points_.back().second;
            }
            const auto& [u1, b1] = *it;
            const auto& [u0, b0] = *(it - 1);
            return b0 + (b1 - b0) * (u - u0) / (u1 - u0);
        }
    }
    return 0.0;
}

void BetaFunction::validate() const {
    for (int i = 0; i <= kValidationPoints; ++i) {
        const double u = static_cast<double>(i) / kValidationPoints;
        const double v = (*this)(u);
        if (!(v > 0.0 && v <= 1.0)) {
            std::ostringstream msg;
            msg << "beta must satisfy 0 < beta(u) <= 1; beta(" << u << ") = " << v;
            throw DomainError(msg.str());
        }
    }
}

double BetaFunction::sup_on_grid(int points) const {
    double best = 0.0;
    for (int i = 0; i < points; ++i) {
        best = std::max(best, (*this)(static_cast<double>(i) / (points - 1)));
    }
    return best;
}

bool BetaFunction::periodic(double tol) const { return std::abs((*this)(0.0) - (*this)(1.0)) <= tol; }

std::string BetaFunction::describe() const {
    std::ostringstream out;
    out.precision(17);
    switch (kind_) {
        case Kind::constant:
            out << "constant(" << par_[0] << ")";
            break;
        case Kind::affine:
            out << "affine(a=" << par_[0] << ",b=" << par_[1] << ",lo=" << par_[2] << ",hi=" << par_[3] << ")";
            break;
        case Kind::trigonometric:
            out << "trigonometric(mean=" << par_[0] << ",amplitude=" << par_[1] << ",frequency=" << par_[2]
                << ",phase=" << par_[3] << ")";
            break;
        case Kind::table:
            out << "table(" << points_.size() << " points)";
            break;
    }
    return out.str();
}

BetaFunction BetaFunction::from_json(const nlohmann::json& block) {
    try {
        if (block.is_string()) {
            const auto name = block.get<std::string>();
            if (name == "const" || name == "constant" || name == "ssep") {
                return ssep();
            }
            if (name == "affine") {
                return affine_preset();
            }
            if (name == "cosine") {
                return cosine_preset();
            }
            throw ConfigError("beta: unknown preset '" + name + "'");
        }
        if (!block.is_object() || !block.contains("kind") || !block.at("kind").is_string()) {
            throw ConfigError("beta: expected a preset name or an object with a 'kind' string");
        }
        const auto kind = block.at("kind").get<std::string>();
        if (kind == "constant") {
            reject_unknown(block, {"kind", "value"});
            return constant(get_number(block, "value", 1.0));
        }
        if (kind == "affine") {
            reject_unknown(block, {"kind", "intercept", "slope", "lo", "hi"});
            return affine(get_number(block, "intercept", 0.5), get_number(block, "slope", 0.5),
                          get_number(block, "lo", 0.0), get_number(block, "hi", 1.0));
        }
        if (kind == "trigonometric") {
            reject_unknown(block, {"kind", "mean", "amplitude", "frequency", "phase"});
            return trigonometric(get_number(block, "mean", 0.75), get_number(block, "amplitude", 0.25),
                                 static_cast<int>(get_number(block, "frequency", 1.0)),
                                 get_number(block, "phase", 0.0));
        }
        if (kind == "table") {
            reject_unknown(block, {"kind", "points"});
            std::vector<std::pair<double, double>> pts;
            for (const auto& p : block.at("points")) {
                if (!p.is_array() || p.size() != 2) {
                    throw ConfigError("beta: table points must be [u, beta] pairs");
                }
                pts.emplace_back(p[0].get<double>(), p[1].get<double>());
            }
            return table(std::move(pts));
        }
        throw ConfigError("beta: unknown kind '" + kind + "'");
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("beta: ") + e.what());
    }
}

nlohmann::json BetaFunction::to_json() const {
    switch (kind_) {
        case Kind::constant:
            return {{"kind", "constant"}, {"value", par_[0]}};
        case Kind::affine:
            return {{"kind", "affine"}, {"intercept", par_[0]}, {"slope", par_[1]}, {"lo", par_[2]}, {"hi", par_[3]}};
        case Kind::trigonometric:
            return {{"kind", "trigonometric"},
                    {"mean", par_[0]},
                    {"amplitude", par_[1]},
                    {"frequency", static_cast<int>(par_[2])},
                    {"phase", par_[3]}};
        case Kind::table: {
            nlohmann::json pts = nlohmann::json::array();
            for (const auto& [u, b] : points_) {
                pts.push_back({u, b});
            }
            return {{"kind", "table"}, {"points", pts}};
        }
    }
    return {};
}

}  // namespace bwex
