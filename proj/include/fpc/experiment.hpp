#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpc/image.hpp"
#include "fpc/linops.hpp"
#include "fpc/objective.hpp"
#include "fpc/pareto.hpp"
#include "fpc/solver.hpp"

namespace fpc {

/// Settings of the wavelet-ℓ1 deblurring study.
struct ExperimentConfig {
    std::size_t image_size = 128;
    std::size_t kernel_size = 5;
    double kernel_sigma = 1.0;  ///< Gaussian blur width in pixels
    double noise_sigma = 0.03;
    std::uint64_t seed = 0;
    int wavelet_levels = 3;
    double alpha_frac = 1.0;  ///< α = alpha_frac / (1.01 L)
    double lambda = std::numeric_limits<double>::quiet_NaN();  ///< NaN: L-curve corner of the reference curve
    std::vector<std::string> schedules = {"lambda1", "lambda2", "lambda3", "lambda4"};
    double grid_min = 1e-3;
    double grid_max = 1e-1;
    std::size_t grid_count = 30;
    std::size_t grid_iters = 500;
    double grid_tol = 1e-10;
    std::size_t iters = 5000;
    double tol = 1e-10;
    bool certificate_monitor = false;
    std::string image_path;  ///< optional PGM replacing the phantom
    std::string out_dir = "out";

    /// Throws ConfigError when the grid is not divisible by 2^levels, or other
    /// settings are out of range.
    void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Missing keys keep their defaults; unknown keys raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Seeded piecewise-constant test image: rectangles and discs on a flat
/// background, values in [0, 1]. Throws ConfigError for size < 16.
Image make_phantom(std::size_t size, std::uint64_t seed);

/// conv2d_periodic(x, kernel) + noise_sigma · N(0, 1) per pixel.
Image degrade(const Image& x, const ConvKernel& kernel, double noise_sigma, std::uint64_t seed);

ConvKernel experiment_kernel(const ExperimentConfig& cfg);

/// Everything needed to run solves on one degraded image.
struct DeblurInstance {
    Image truth;
    Image degraded;  ///< x0
    OperatorPtr blur;     ///< A
    OperatorPtr wavelet;  ///< W
    OperatorPtr forward;  ///< A W*
    std::shared_ptr<const LeastSquaresTerm> misfit;  ///< ||A W* u - x0||²
    double blur_norm_sq = 0.0;  ///< ||A||²
    double lipschitz = 0.0;     ///< 2 ||A||²
    double alpha = 0.0;         ///< alpha_frac / (1.01 L)
    Vector u0;                  ///< W x0

    CompositeProblem problem(double lambda) const { return {misfit, l1_term(), lambda}; }
    Image restore(std::span<const double> u) const;  ///< W* u as an image
};

DeblurInstance build_deblur_instance(const ExperimentConfig& cfg);

struct ScheduleOutcome {
    std::string name;
    LambdaSchedule schedule;
    SolveResult result;
    PathReport path;
    double lambda_bar = 0.0;
    double final_f = 0.0;
    double final_g = 0.0;
    double final_F = 0.0;
};

struct DemoResult {
    nlohmann::json summary;
    ParetoCurve curve;
    double chosen_lambda = 0.0;
    std::vector<ScheduleOutcome> outcomes;
    std::vector<std::filesystem::path> files;
};

/// Runs the full study and writes: reference_curve.csv, trace_<name>.csv,
/// restored_<name>.pgm, truth.pgm, degraded.pgm and summary.json into
/// cfg.out_dir. On failure every file written so far is removed.
DemoResult run_demo_deblur(const ExperimentConfig& cfg);

/// Schedule by experiment name (lambda1..lambda4) or explicit spec string.
LambdaSchedule experiment_schedule(const std::string& name, double lambda);

}  // namespace fpc
