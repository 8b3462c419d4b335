#include "fpc/schedules.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "fpc/errors.hpp"

namespace fpc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest text that parses back to the same double.
std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}
}  // namespace

const char* to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Constant: return "constant";
        case ScheduleKind::Power: return "power";
        case ScheduleKind::GeometricFloor: return "geometric-floor";
        case ScheduleKind::GeometricOffset: return "geometric-offset";
        case ScheduleKind::Custom: return "custom";
    }
    return "unknown";
}

LambdaSchedule LambdaSchedule::constant(double target) {
    LambdaSchedule s;
    s.kind_ = ScheduleKind::Constant;
    s.target_ = target;
    return s;
}

LambdaSchedule LambdaSchedule::power(double target, double beta, double theta) {
    LambdaSchedule s;
    s.kind_ = ScheduleKind::Power;
    s.target_ = target;
    s.beta_ = beta;
    s.theta_ = theta;
    return s;
}

LambdaSchedule LambdaSchedule::geometric_floor(double target, double mu, double beta) {
    LambdaSchedule s;
    s.kind_ = ScheduleKind::GeometricFloor;
    s.target_ = target;
    s.mu_ = mu;
    s.beta_ = beta;
    return s;
}

LambdaSchedule LambdaSchedule::geometric_offset(double target, double mu, double beta) {
    LambdaSchedule s;
    s.kind_ = ScheduleKind::GeometricOffset;
    s.target_ = target;
    s.mu_ = mu;
    s.beta_ = beta;
    return s;
}

LambdaSchedule LambdaSchedule::custom(std::vector<double> values, double target) {
    if (values.empty()) throw ConfigError("custom schedule: no values");
    LambdaSchedule s;
    s.kind_ = ScheduleKind::Custom;
    s.target_ = std::isnan(target) ? values.back() : target;
    s.values_ = std::move(values);
    return s;
}

double LambdaSchedule::eval(std::size_t n) const {
    const double nd = static_cast<double>(n);
    switch (kind_) {
        case ScheduleKind::Constant: return target_;
        case ScheduleKind::Power: return target_ * (1.0 + beta_ / std::pow(nd + 1.0, theta_));
        case ScheduleKind::GeometricFloor: return std::max(target_, mu_ * std::pow(beta_, nd));
        case ScheduleKind::GeometricOffset: return target_ * (1.0 + mu_ * std::pow(beta_, nd));
        case ScheduleKind::Custom: return values_[std::min(n, values_.size() - 1)];
    }
    return target_;
}

LambdaSchedule LambdaSchedule::retargeted(double new_target) const {
    LambdaSchedule s = *this;
    const double ratio = new_target / target_;
    s.target_ = new_target;
    if (kind_ == ScheduleKind::GeometricFloor) s.mu_ = mu_ * ratio;
    if (kind_ == ScheduleKind::Custom)
        for (double& v : s.values_) v *= ratio;
    return s;
}

std::string LambdaSchedule::describe() const {
    std::string out = std::string(to_string(kind_)) + ":lambda=" + format_double(target_);
    switch (kind_) {
        case ScheduleKind::Constant: break;
        case ScheduleKind::Power:
            out += ",beta=" + format_double(beta_) + ",theta=" + format_double(theta_);
            break;
        case ScheduleKind::GeometricFloor:
        case ScheduleKind::GeometricOffset:
            out += ",mu=" + format_double(mu_) + ",beta=" + format_double(beta_);
            break;
        case ScheduleKind::Custom: out += ",count=" + std::to_string(values_.size()); break;
    }
    return out;
}

double summability(const LambdaSchedule& s) {
    const double lam = s.target();
    switch (s.kind()) {
        case ScheduleKind::Constant: return 0.0;
        case ScheduleKind::Power: {
            if (s.beta() == 0.0) return 0.0;
            if (!(s.theta() > 1.0)) return kInf;
            // Σ_{k>=1} k^-θ <= 1 + ∫_1^∞ x^-θ dx
            return std::abs(lam * s.beta()) * (1.0 + 1.0 / (s.theta() - 1.0));
        }
        case ScheduleKind::GeometricFloor: {
            if (s.mu() <= lam && s.beta() <= 1.0 && s.beta() >= 0.0) return 0.0;
            if (!(s.beta() > 0.0 && s.beta() < 1.0)) return kInf;
            return s.mu() / (1.0 - s.beta());
        }
        case ScheduleKind::GeometricOffset: {
            if (s.mu() == 0.0) return 0.0;
            if (!(std::abs(s.beta()) < 1.0)) return kInf;
            return std::abs(lam * s.mu()) / (1.0 - std::abs(s.beta()));
        }
        case ScheduleKind::Custom: {
            if (s.values().back() != lam) return kInf;
            double sum = 0.0;
            for (double v : s.values()) sum += std::abs(v - lam);
            return sum;
        }
    }
    return kInf;
}

std::size_t floor_crossover(const LambdaSchedule& s) {
    if (s.kind() != ScheduleKind::GeometricFloor) throw ConfigError("floor_crossover: not a geometric-floor schedule");
    if (s.mu() <= s.target()) return 0;
    if (!(s.beta() > 0.0 && s.beta() < 1.0)) return std::numeric_limits<std::size_t>::max();
    // smallest n with μ β^n <= λ
    auto n = static_cast<std::size_t>(std::ceil(std::log(s.target() / s.mu()) / std::log(s.beta())));
    while (n > 0 && s.mu() * std::pow(s.beta(), static_cast<double>(n - 1)) <= s.target()) --n;
    while (s.mu() * std::pow(s.beta(), static_cast<double>(n)) > s.target()) ++n;
    return n;
}

ScheduleReport validate(const LambdaSchedule& s) {
    ScheduleReport r;
    if (!(s.target() > 0.0) || !std::isfinite(s.target())) r.issues.push_back("non-positive target");

    switch (s.kind()) {
        case ScheduleKind::Constant: break;
        case ScheduleKind::Power:
            if (s.beta() <= -1.0) r.issues.push_back("non-positive values: beta <= -1");
            break;
        case ScheduleKind::GeometricFloor:
            if (!(s.beta() > 0.0 && s.beta() < 1.0)) r.issues.push_back("beta out of range (0,1)");
            break;
        case ScheduleKind::GeometricOffset:
            if (!(s.beta() > 0.0 && s.beta() < 1.0)) r.issues.push_back("beta out of range (0,1)");
            if (s.mu() <= -1.0) r.issues.push_back("non-positive values: mu <= -1");
            break;
        case ScheduleKind::Custom:
            if (std::any_of(s.values().begin(), s.values().end(), [](double v) { return !(v > 0.0); }))
                r.issues.push_back("non-positive values");
            break;
    }

    if (!std::isfinite(summability(s))) {
        r.summable = false;
        r.issues.push_back("not summable: sum |lambda_n - lambda| diverges");
    }
    return r;
}

LambdaSchedule lambda1(double target) { return LambdaSchedule::power(target, 9.0, 1.01); }
LambdaSchedule lambda2(double target) { return LambdaSchedule::geometric_floor(target, 10.0 * target, 0.99); }
LambdaSchedule lambda3(double target) { return LambdaSchedule::geometric_offset(target, 9.0, 0.9); }
LambdaSchedule lambda4() { return LambdaSchedule::geometric_offset(1e-3, 99.0, 0.9); }

std::vector<double> read_lambda_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("custom schedule: cannot open " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v;
        if (!(ls >> v)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ConfigError("custom schedule: bad value on line " + std::to_string(lineno) + " of " + path.string());
        }
        std::string rest;
        if (ls >> rest) throw ConfigError("custom schedule: trailing text on line " + std::to_string(lineno));
        values.push_back(v);
    }
    if (values.empty()) throw ConfigError("custom schedule: no values in " + path.string());
    return values;
}

LambdaSchedule parse_schedule(const std::string& spec, double target) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    std::map<std::string, std::string> raw;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("schedule: expected key=value, got '" + item + "'");
            raw[item.substr(0, eq)] = item.substr(eq + 1);
        }
    }

    auto number = [&](const std::string& key, double fallback) {
        const auto it = raw.find(key);
        if (it == raw.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("schedule: bad number for '" + key + "': '" + it->second + "'");
        }
    };
    auto require = [&](const std::string& key) {
        if (!raw.count(key)) throw ConfigError("schedule '" + kind + "' requires '" + key + "='");
        return number(key, 0.0);
    };
    auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [k, v] : raw) {
            if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
                throw ConfigError("schedule '" + kind + "': unknown key '" + k + "'");
        }
    };

    const double lam = number("lambda", target);
    if (kind == "constant") {
        reject_unknown({"lambda"});
        return LambdaSchedule::constant(lam);
    }
    if (kind == "power") {
        reject_unknown({"lambda", "beta", "theta"});
        return LambdaSchedule::power(lam, require("beta"), require("theta"));
    }
    if (kind == "geometric-floor") {
        reject_unknown({"lambda", "mu", "beta"});
        return LambdaSchedule::geometric_floor(lam, require("mu"), require("beta"));
    }
    if (kind == "geometric-offset") {
        reject_unknown({"lambda", "mu", "beta"});
        return LambdaSchedule::geometric_offset(lam, require("mu"), require("beta"));
    }
    if (kind == "custom") {
        reject_unknown({"lambda", "file"});
        if (!raw.count("file")) throw ConfigError("schedule 'custom' requires 'file='");
        const double t = raw.count("lambda") ? lam : std::numeric_limits<double>::quiet_NaN();
        return LambdaSchedule::custom(read_lambda_file(raw["file"]), t);
    }
    if (kind == "lambda1") {
        reject_unknown({"lambda"});
        return lambda1(lam);
    }
    if (kind == "lambda2") {
        reject_unknown({"lambda"});
        return lambda2(lam);
    }
    if (kind == "lambda3") {
        reject_unknown({"lambda"});
        return lambda3(lam);
    }
    if (kind == "lambda4") {
        reject_unknown({});
        return lambda4();
    }
    throw ConfigError("schedule: unknown kind '" + kind + "'");
}

}  // namespace fpc
