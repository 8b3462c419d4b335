#include "fpc/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "fpc/errors.hpp"

namespace fpc {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t lineno) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw InputError("csv line " + std::to_string(lineno) + ": bad number '" + s + "'");
    }
}

std::optional<double> parse_optional(const std::string& s, std::size_t lineno) {
    if (s.empty()) return std::nullopt;
    return parse_double(s, lineno);
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

// JSON has no infinity; +inf is stored as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_inf(const json& j) { return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>(); }

template <class T>
std::optional<T> optional_field(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

ParetoCurve sorted_curve(ParetoCurve curve) {
    if (curve.points.empty()) throw InputError("curve has no points");
    std::stable_sort(curve.points.begin(), curve.points.end(),
                     [](const ParetoPoint& a, const ParetoPoint& b) { return a.tau < b.tau; });
    for (const auto& p : curve.points) curve.lambda_grid.push_back(p.lambda);
    std::sort(curve.lambda_grid.rbegin(), curve.lambda_grid.rend());
    return curve;
}

}  // namespace

void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace) {
    out << kTraceCsvHeader << '\n';
    for (const TracePoint& tp : trace) {
        out << tp.n << ',' << fmt(tp.lambda_n) << ',' << fmt(tp.f_val) << ',' << fmt(tp.g_val) << ','
            << fmt(tp.F_lambda_val) << ',' << fmt(tp.step_norm) << ',' << fmt(tp.eps_n) << ',' << fmt(tp.gap_n)
            << '\n';
    }
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TracePoint> trace) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_trace_csv(out, trace);
}

std::vector<TracePoint> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kTraceCsvHeader)
        throw InputError("trace csv: expected header '" + std::string(kTraceCsvHeader) + "'");
    std::vector<TracePoint> trace;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 8) throw InputError("trace csv line " + std::to_string(lineno) + ": expected 8 fields");
        TracePoint tp;
        tp.n = static_cast<std::size_t>(parse_double(cells[0], lineno));
        tp.lambda_n = parse_double(cells[1], lineno);
        tp.f_val = parse_double(cells[2], lineno);
        tp.g_val = parse_double(cells[3], lineno);
        tp.F_lambda_val = parse_double(cells[4], lineno);
        tp.step_norm = parse_double(cells[5], lineno);
        tp.eps_n = parse_optional(cells[6], lineno);
        tp.gap_n = parse_optional(cells[7], lineno);
        trace.push_back(tp);
    }
    return trace;
}

std::vector<TracePoint> read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return read_trace_csv(in);
}

void write_curve_csv(const std::filesystem::path& path, const ParetoCurve& curve) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << kCurveCsvHeader << '\n';
    for (const ParetoPoint& p : curve.points)
        out << fmt(p.lambda) << ',' << fmt(p.tau) << ',' << fmt(p.f_val) << ',' << p.solve_iterations << '\n';
}

ParetoCurve read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kCurveCsvHeader)
        throw InputError("curve csv: expected header '" + std::string(kCurveCsvHeader) + "'");
    ParetoCurve curve;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 4) throw InputError("curve csv line " + std::to_string(lineno) + ": expected 4 fields");
        ParetoPoint p;
        p.lambda = parse_double(cells[0], lineno);
        p.tau = parse_double(cells[1], lineno);
        p.f_val = parse_double(cells[2], lineno);
        p.solve_iterations = static_cast<std::size_t>(parse_double(cells[3], lineno));
        curve.points.push_back(p);
    }
    return sorted_curve(std::move(curve));
}

json trace_to_json(const SolveResult& result, const SolverConfig& cfg, const LambdaSchedule& schedule,
                   double lipschitz, const std::optional<RateContext>& rate) {
    json j;
    j["config"] = {
        {"alpha", cfg.alpha},
        {"max_iter", cfg.max_iter},
        {"step_tol", cfg.step_tol},
        {"lambda_rtol", cfg.lambda_rtol},
        {"record_every", cfg.record_every},
        {"rate_monitor", cfg.rate_monitor},
        {"certificate_monitor", cfg.certificate_monitor},
    };
    const ScheduleReport report = validate(schedule);
    j["schedule"] = {
        {"spec", schedule.describe()},
        {"kind", to_string(schedule.kind())},
        {"lambda", schedule.target()},
        {"lambda_bar", number_or_null(summability(schedule))},
        {"valid", report.valid()},
        {"issues", report.issues},
    };
    j["lipschitz"] = lipschitz;
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["M_running"] = result.M_running;
    j["M_certificate"] = result.M_certificate;
    j["f0"] = result.f0;
    j["g0"] = result.g0;
    j["step_sq_sum"] = result.step_sq_sum;
    j["warnings"] = result.warnings;
    if (rate) j["rate"] = {{"dist0_sq", rate->dist0_sq}, {"F_ref", rate->F_ref}, {"M", rate->M}};

    json pts = json::array();
    for (const TracePoint& tp : result.trace) {
        json p = {{"n", tp.n},
                  {"lambda_n", tp.lambda_n},
                  {"f", tp.f_val},
                  {"g", tp.g_val},
                  {"F_lambda", tp.F_lambda_val},
                  {"step_norm", tp.step_norm}};
        p["eps_n"] = tp.eps_n ? json(*tp.eps_n) : json(nullptr);
        p["gap_n"] = tp.gap_n ? json(*tp.gap_n) : json(nullptr);
        p["F_avg"] = tp.F_avg ? json(*tp.F_avg) : json(nullptr);
        pts.push_back(std::move(p));
    }
    j["trace"] = std::move(pts);
    return j;
}

LoadedTrace trace_from_json(const json& j) {
    LoadedTrace t;
    try {
        for (const json& p : j.at("trace")) {
            TracePoint tp;
            tp.n = p.at("n").get<std::size_t>();
            tp.lambda_n = p.at("lambda_n").get<double>();
            tp.f_val = p.at("f").get<double>();
            tp.g_val = p.at("g").get<double>();
            tp.F_lambda_val = p.at("F_lambda").get<double>();
            tp.step_norm = p.at("step_norm").get<double>();
            tp.eps_n = optional_field<double>(p, "eps_n");
            tp.gap_n = optional_field<double>(p, "gap_n");
            tp.F_avg = optional_field<double>(p, "F_avg");
            t.trace.push_back(tp);
        }
        if (j.contains("schedule")) {
            const json& s = j.at("schedule");
            t.lambda = optional_field<double>(s, "lambda");
            if (s.contains("lambda_bar")) t.lambda_bar = number_or_inf(s.at("lambda_bar"));
        }
        if (j.contains("config")) t.alpha = optional_field<double>(j.at("config"), "alpha");
        t.lipschitz = optional_field<double>(j, "lipschitz");
        if (j.contains("rate")) {
            const json& r = j.at("rate");
            t.rate = RateContext{r.at("dist0_sq").get<double>(), r.at("F_ref").get<double>(), r.at("M").get<double>()};
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("trace json: ") + e.what());
    }
    return t;
}

LoadedTrace load_trace(const std::filesystem::path& path) {
    if (path.extension() == ".json") return trace_from_json(read_json(path));
    if (path.extension() == ".csv") {
        LoadedTrace t;
        t.trace = read_trace_csv(path);
        return t;
    }
    throw InputError("unsupported trace file (expected .json or .csv): " + path.string());
}

json path_report_to_json(const PathReport& report) {
    json entries = json::array();
    for (const PathEntry& e : report.entries) {
        entries.push_back({{"n", e.n},
                           {"g", e.g},
                           {"f", e.f},
                           {"f_curve", e.f_curve},
                           {"excess", e.excess},
                           {"rel_excess", e.rel_excess},
                           {"clipped", e.clipped}});
    }
    return {{"max_rel_excess", report.max_rel_excess},
            {"mean_rel_excess", report.mean_rel_excess},
            {"min_rel_excess", report.min_rel_excess},
            {"in_range", report.in_range},
            {"clipped", report.clipped},
            {"warnings", report.warnings},
            {"entries", std::move(entries)}};
}

json curve_to_json(const ParetoCurve& curve) {
    json pts = json::array();
    for (const ParetoPoint& p : curve.points)
        pts.push_back({{"lambda", p.lambda}, {"tau", p.tau}, {"f", p.f_val}, {"iterations", p.solve_iterations}});
    return pts;
}

ParetoCurve curve_from_json(const json& j) {
    const json& pts = j.is_object() && j.contains("curve") ? j.at("curve") : j;
    if (!pts.is_array()) throw InputError("curve json: expected an array of points");
    ParetoCurve curve;
    try {
        for (const json& e : pts) {
            ParetoPoint p;
            p.lambda = e.at("lambda").get<double>();
            p.tau = e.at("tau").get<double>();
            p.f_val = e.at("f").get<double>();
            p.solve_iterations = e.value("iterations", std::size_t{0});
            curve.points.push_back(p);
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("curve json: ") + e.what());
    }
    return sorted_curve(std::move(curve));
}

ParetoCurve load_curve(const std::filesystem::path& path) {
    if (path.extension() == ".json") return curve_from_json(read_json(path));
    return read_curve_csv(path);
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace fpc
