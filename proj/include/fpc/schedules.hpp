#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fpc {

enum class ScheduleKind { Constant, Power, GeometricFloor, GeometricOffset, Custom };

const char* to_string(ScheduleKind kind);

/// Regularization sequence λ_n converging to a target λ.
///
///   constant          λ_n = λ
///   power             λ_n = λ (1 + β / (n+1)^θ)
///   geometric-floor   λ_n = max(λ, μ β^n)
///   geometric-offset  λ_n = λ (1 + μ β^n)
///   custom            explicit values; the last value repeats forever
///
/// The power kind is indexed on n+1 so λ_0 = λ(1+β) is defined.
class LambdaSchedule {
public:
    static LambdaSchedule constant(double target);
    static LambdaSchedule power(double target, double beta, double theta);
    static LambdaSchedule geometric_floor(double target, double mu, double beta);
    static LambdaSchedule geometric_offset(double target, double mu, double beta);
    /// `target` defaults to the last listed value when NaN.
    static LambdaSchedule custom(std::vector<double> values, double target);

    ScheduleKind kind() const { return kind_; }
    double target() const { return target_; }
    double beta() const { return beta_; }
    double theta() const { return theta_; }
    double mu() const { return mu_; }
    const std::vector<double>& values() const { return values_; }

    double eval(std::size_t n) const;

    /// Same schedule shape aimed at a different target. Geometric-floor keeps
    /// μ/λ fixed; custom values are scaled by the target ratio.
    LambdaSchedule retargeted(double new_target) const;

    /// "kind:param=value,..." form accepted by parse_schedule.
    std::string describe() const;

private:
    LambdaSchedule() = default;

    ScheduleKind kind_ = ScheduleKind::Constant;
    double target_ = 1.0;
    double beta_ = 0.0;
    double theta_ = 0.0;
    double mu_ = 0.0;
    std::vector<double> values_;
};

/// λ̄ = Σ_n |λ_n - λ|. Exact for constant, geometric-offset and custom kinds,
/// an upper bound for power and geometric-floor; +inf when not summable.
double summability(const LambdaSchedule& s);

/// Index at which a geometric-floor schedule reaches its floor.
std::size_t floor_crossover(const LambdaSchedule& s);

struct ScheduleReport {
    bool summable = true;
    std::vector<std::string> issues;  ///< empty when the schedule is valid
    bool valid() const { return issues.empty(); }
};

/// Report-only check of the convergence hypotheses. Never throws.
ScheduleReport validate(const LambdaSchedule& s);

/// Parses "kind:key=value,...". Recognized kinds: constant, power,
/// geometric-floor, geometric-offset, custom (key `file`), and the named
/// experiment schedules lambda1..lambda4. `target` supplies λ when the string
/// has no `lambda=` key (lambda4 ignores it and always targets 1e-3).
/// Throws ConfigError on malformed input.
LambdaSchedule parse_schedule(const std::string& spec, double target);

/// One λ value per line; blank lines and '#' comments skipped.
std::vector<double> read_lambda_file(const std::filesystem::path& path);

/// The four experiment schedules. λ¹: power θ=1.01, β=9; λ²: floor β=0.99, μ=10λ;
/// λ³: offset β=0.9, μ=9; λ⁴: offset with λ=1e-3, μ=99, β=0.9.
LambdaSchedule lambda1(double target);
LambdaSchedule lambda2(double target);
LambdaSchedule lambda3(double target);
LambdaSchedule lambda4();

}  // namespace fpc
