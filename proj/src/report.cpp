#include "fepi/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "fepi/dataio.hpp"
#include "fepi/errors.hpp"

namespace fepi {

namespace {

double number_or_nan(const Json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Json nan_to_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

Json require(const Json& j, const char* key) {
    if (!j.contains(key))
        throw DataError(std::string("report: missing field '") + key + "'");
    return j.at(key);
}

}  // namespace

Json to_json(const ModelParams& params) {
    Json j;
    if (const auto* p = std::get_if<Ar1Params>(&params)) {
        j["model"] = "ar1";
        j["rho"] = p->rho;
        j["tau2"] = p->tau2;
    } else if (const auto* p = std::get_if<GaussParams>(&params)) {
        j["model"] = "gauss";
        j["mu"] = p->mu;
        j["gamma0"] = p->gamma0;
        j["gamma1"] = p->gamma1;
        j["theta"] = p->theta;
    } else {
        const auto& q = std::get<QrParams>(params);
        j["model"] = "qr";
        j["theta"] = q.theta;
        j["levels"] = q.levels;
        Json coeffs = Json::array();
        for (const auto& c : q.coeffs) coeffs.push_back({{"beta0", c.beta0}, {"beta1", c.beta1}});
        j["coeffs"] = coeffs;
    }
    return j;
}

ModelParams model_params_from_json(const Json& j) {
    const std::string kind = require(j, "model").get<std::string>();
    if (kind == "ar1") {
        return Ar1Params{require(j, "rho").get<double>(), require(j, "tau2").get<double>()};
    }
    if (kind == "gauss") {
        return GaussParams{require(j, "mu").get<double>(), require(j, "gamma0").get<double>(),
                           require(j, "gamma1").get<double>(),
                           require(j, "theta").get<double>()};
    }
    if (kind == "qr") {
        QrParams p;
        p.theta = require(j, "theta").get<double>();
        p.levels = require(j, "levels").get<std::vector<double>>();
        for (std::size_t i = 0; i < p.levels.size(); ++i) {
            if (!(p.levels[i] > 0.0 && p.levels[i] < 1.0) ||
                (i > 0 && !(p.levels[i] > p.levels[i - 1])))
                throw DataError("report: qr levels must be increasing within (0, 1)");
        }
        for (const Json& c : require(j, "coeffs"))
            p.coeffs.push_back({c.at("beta0").get<double>(), c.at("beta1").get<double>()});
        if (p.coeffs.size() != p.levels.size())
            throw DataError("report: qr levels/coeffs size mismatch");
        return p;
    }
    throw DataError("report: unknown model kind '" + kind + "'");
}

Json to_json(const FitResult& fit) {
    Json j;
    j["params"] = to_json(fit.params);
    j["train_objective"] = fit.train_objective;
    Json profile = Json::array();
    for (const auto& p : fit.theta_profile)
        profile.push_back({{"theta", p.theta}, {"objective", p.objective}});
    j["theta_profile"] = profile;
    j["diagnostics"] = {{"objective_evaluations", fit.diagnostics.objective_evaluations},
                        {"simplex_runs", fit.diagnostics.simplex_runs},
                        {"restart_values", fit.diagnostics.restart_values},
                        {"single_horizon", fit.diagnostics.single_horizon}};
    return j;
}

FitResult fit_result_from_json(const Json& j) {
    FitResult fit;
    fit.params = model_params_from_json(require(j, "params"));
    fit.train_objective = require(j, "train_objective").get<double>();
    for (const Json& p : require(j, "theta_profile"))
        fit.theta_profile.push_back(
            {p.at("theta").get<double>(), p.at("objective").get<double>()});
    const Json d = require(j, "diagnostics");
    fit.diagnostics.objective_evaluations = d.at("objective_evaluations").get<int>();
    fit.diagnostics.simplex_runs = d.at("simplex_runs").get<int>();
    fit.diagnostics.restart_values = d.at("restart_values").get<std::vector<double>>();
    fit.diagnostics.single_horizon = d.at("single_horizon").get<bool>();
    return fit;
}

Json to_json(const std::vector<CaseInterval>& intervals, double level) {
    Json j;
    j["level"] = level;
    Json list = Json::array();
    for (const CaseInterval& ci : intervals)
        list.push_back({{"case_id", ci.case_id},
                        {"target_year", ci.target_year},
                        {"horizon", ci.horizon},
                        {"lower", ci.interval.lower},
                        {"upper", ci.interval.upper},
                        {"crossed", ci.interval.crossed}});
    j["intervals"] = list;
    return j;
}

std::vector<CaseInterval> case_intervals_from_json(const Json& j, double* level_out) {
    const double level = require(j, "level").get<double>();
    if (level_out) *level_out = level;
    std::vector<CaseInterval> intervals;
    for (const Json& e : require(j, "intervals")) {
        CaseInterval ci;
        ci.case_id = e.at("case_id").get<std::string>();
        ci.target_year = e.at("target_year").get<int>();
        ci.horizon = e.at("horizon").get<double>();
        ci.interval.lower = e.at("lower").get<double>();
        ci.interval.upper = e.at("upper").get<double>();
        ci.interval.crossed = e.value("crossed", false);
        ci.interval.nominal_level = level;
        if (ci.interval.lower > ci.interval.upper)
            throw DataError("intervals: lower > upper for case '" + ci.case_id + "'");
        intervals.push_back(std::move(ci));
    }
    return intervals;
}

Json to_json(const EvalReport& report, bool include_cases) {
    Json j;
    j["n"] = report.n;
    j["coverage"] = report.coverage;
    j["mean_length"] = report.mean_length;
    j["mean_interval_score"] = report.mean_interval_score;
    Json rows = Json::array();
    for (const auto& row : report.per_horizon)
        rows.push_back({{"horizon", row.horizon},
                        {"n", row.n},
                        {"coverage", row.coverage},
                        {"mean_length", row.mean_length},
                        {"mean_interval_score", row.mean_interval_score}});
    j["per_horizon"] = rows;
    if (include_cases) {
        Json cases = Json::array();
        for (const ScoredCase& c : report.cases)
            cases.push_back({{"case_id", c.case_id},
                             {"target_year", c.target_year},
                             {"horizon", c.horizon},
                             {"lower", c.lower},
                             {"upper", c.upper},
                             {"outcome_error", c.outcome_error},
                             {"interval_score", c.interval_score},
                             {"covered", c.covered},
                             {"length", c.length}});
        j["cases"] = cases;
    }
    return j;
}

EvalReport eval_report_from_json(const Json& j) {
    EvalReport report;
    report.n = require(j, "n").get<std::size_t>();
    report.coverage = require(j, "coverage").get<double>();
    report.mean_length = require(j, "mean_length").get<double>();
    report.mean_interval_score = require(j, "mean_interval_score").get<double>();
    for (const Json& row : require(j, "per_horizon")) {
        HorizonBreakdownRow r;
        r.horizon = row.at("horizon").get<double>();
        r.n = row.at("n").get<std::size_t>();
        r.coverage = row.at("coverage").get<double>();
        r.mean_length = row.at("mean_length").get<double>();
        r.mean_interval_score = row.at("mean_interval_score").get<double>();
        report.per_horizon.push_back(r);
    }
    if (j.contains("cases")) {
        for (const Json& e : j.at("cases")) {
            ScoredCase c;
            c.case_id = e.at("case_id").get<std::string>();
            c.target_year = e.at("target_year").get<int>();
            c.horizon = e.at("horizon").get<double>();
            c.lower = e.at("lower").get<double>();
            c.upper = e.at("upper").get<double>();
            c.outcome_error = e.at("outcome_error").get<double>();
            c.interval_score = e.at("interval_score").get<double>();
            c.covered = e.at("covered").get<bool>();
            c.length = e.at("length").get<double>();
            report.cases.push_back(std::move(c));
        }
    }
    return report;
}

Json to_json(const DmTestResult& dm) {
    return Json{{"t_basic", dm.t_basic},
                {"t_clustered", dm.t_clustered},
                {"n_cases", dm.n_cases},
                {"n_clusters", dm.n_clusters},
                {"mean_score_diff", dm.mean_score_diff}};
}

DmTestResult dm_test_from_json(const Json& j) {
    DmTestResult dm;
    dm.t_basic = require(j, "t_basic").get<double>();
    dm.t_clustered = require(j, "t_clustered").get<double>();
    dm.n_cases = require(j, "n_cases").get<std::size_t>();
    dm.n_clusters = require(j, "n_clusters").get<std::size_t>();
    dm.mean_score_diff = require(j, "mean_score_diff").get<double>();
    return dm;
}

Json to_json(const CvSummary& summary) {
    Json j;
    j["level"] = summary.level;
    j["n_iterations"] = summary.n_iterations;
    j["baseline"] = summary.baseline_label;
    Json models = Json::array();
    for (const CvModelSummary& m : summary.models) {
        Json jm;
        jm["label"] = m.label;
        jm["theta_estimated"] = m.theta_estimated;
        jm["eval"] = to_json(m.eval, /*include_cases=*/false);
        jm["n_crossed"] = m.n_crossed;
        jm["theta_min"] = m.theta_min ? Json(*m.theta_min) : Json(nullptr);
        jm["theta_max"] = m.theta_max ? Json(*m.theta_max) : Json(nullptr);
        Json by_year = Json::array();
        for (double t : m.theta_by_year) by_year.push_back(nan_to_null(t));
        jm["theta_by_year"] = by_year;
        models.push_back(std::move(jm));
    }
    j["models"] = models;
    Json dm = Json::array();
    for (const auto& test : summary.dm_vs_baseline)
        dm.push_back(test ? to_json(*test) : Json(nullptr));
    j["dm_vs_baseline"] = dm;
    return j;
}

CvSummary cv_summary_from_json(const Json& j) {
    CvSummary summary;
    summary.level = require(j, "level").get<double>();
    summary.n_iterations = require(j, "n_iterations").get<std::size_t>();
    summary.baseline_label = require(j, "baseline").get<std::string>();
    for (const Json& jm : require(j, "models")) {
        CvModelSummary m;
        m.label = jm.at("label").get<std::string>();
        m.theta_estimated = jm.at("theta_estimated").get<bool>();
        m.eval = eval_report_from_json(jm.at("eval"));
        m.n_crossed = jm.value("n_crossed", std::size_t{0});
        if (!jm.at("theta_min").is_null()) m.theta_min = jm.at("theta_min").get<double>();
        if (!jm.at("theta_max").is_null()) m.theta_max = jm.at("theta_max").get<double>();
        for (const Json& t : jm.at("theta_by_year"))
            m.theta_by_year.push_back(number_or_nan(t));
        summary.models.push_back(std::move(m));
    }
    for (const Json& test : require(j, "dm_vs_baseline")) {
        if (test.is_null())
            summary.dm_vs_baseline.emplace_back(std::nullopt);
        else
            summary.dm_vs_baseline.emplace_back(dm_test_from_json(test));
    }
    return summary;
}

Json to_json(const SimResult& result) {
    Json j;
    j["replications"] = result.replications;
    j["level"] = result.level;
    Json cells = Json::array();
    for (const SimCell& cell : result.cells) {
        Json jc;
        jc["n"] = cell.n;
        jc["t_max"] = cell.t_max;
        jc["rho"] = cell.rho;
        jc["tau2"] = cell.tau2;
        Json methods = Json::array();
        for (const SimMethodResult& m : cell.methods)
            methods.push_back({{"label", m.label},
                               {"mean_interval_score", m.mean_interval_score},
                               {"mc_se", m.mc_se},
                               {"coverage", m.coverage},
                               {"mean_length", m.mean_length}});
        jc["methods"] = methods;
        cells.push_back(std::move(jc));
    }
    j["cells"] = cells;
    return j;
}

SimResult sim_result_from_json(const Json& j) {
    SimResult result;
    result.replications = require(j, "replications").get<int>();
    result.level = require(j, "level").get<double>();
    for (const Json& jc : require(j, "cells")) {
        SimCell cell;
        cell.n = jc.at("n").get<std::size_t>();
        cell.t_max = jc.at("t_max").get<int>();
        cell.rho = jc.at("rho").get<double>();
        cell.tau2 = jc.at("tau2").get<double>();
        for (const Json& jm : jc.at("methods")) {
            SimMethodResult m;
            m.label = jm.at("label").get<std::string>();
            m.mean_interval_score = jm.at("mean_interval_score").get<double>();
            m.mc_se = jm.at("mc_se").get<double>();
            m.coverage = jm.at("coverage").get<double>();
            m.mean_length = jm.at("mean_length").get<double>();
            cell.methods.push_back(std::move(m));
        }
        result.cells.push_back(std::move(cell));
    }
    return result;
}

void write_json_file(const std::string& path, const Json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const std::exception& e) {
        throw DataError("file '" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace fepi
