#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpc/pareto.hpp"
#include "fpc/schedules.hpp"
#include "fpc/solver.hpp"

namespace fpc {

/// Header of the trace CSV. Monitor columns are empty when the monitor was off.
inline constexpr const char* kTraceCsvHeader = "n,lambda_n,f,g,F_lambda,step_norm,eps_n,gap_n";
inline constexpr const char* kCurveCsvHeader = "lambda,tau,f,iterations";

void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace);
void write_trace_csv(const std::filesystem::path& path, std::span<const TracePoint> trace);
/// Throws InputError on a wrong header or malformed row.
std::vector<TracePoint> read_trace_csv(std::istream& in);
std::vector<TracePoint> read_trace_csv(const std::filesystem::path& path);

void write_curve_csv(const std::filesystem::path& path, const ParetoCurve& curve);
ParetoCurve read_curve_csv(const std::filesystem::path& path);

/// Ingredients for re-checking the rate bound offline.
struct RateContext {
    double dist0_sq = 0.0;  ///< ||u0 - û||²
    double F_ref = 0.0;     ///< F_λ(û)
    double M = 0.0;
};

/// JSON form of a solve: config, schedule metadata and all TracePoint fields.
nlohmann::json trace_to_json(const SolveResult& result, const SolverConfig& cfg, const LambdaSchedule& schedule,
                             double lipschitz, const std::optional<RateContext>& rate = std::nullopt);

struct LoadedTrace {
    std::vector<TracePoint> trace;
    std::optional<double> lambda;
    std::optional<double> alpha;
    std::optional<double> lipschitz;
    std::optional<double> lambda_bar;
    std::optional<RateContext> rate;
};

LoadedTrace trace_from_json(const nlohmann::json& j);
/// Dispatches on the extension: .json or .csv.
LoadedTrace load_trace(const std::filesystem::path& path);

nlohmann::json path_report_to_json(const PathReport& report);
nlohmann::json curve_to_json(const ParetoCurve& curve);
/// Accepts the point array of curve_to_json or an object holding it under "curve".
ParetoCurve curve_from_json(const nlohmann::json& j);
/// Dispatches on the extension: .json or .csv.
ParetoCurve load_curve(const std::filesystem::path& path);

/// Writes `j` with 2-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace fpc
