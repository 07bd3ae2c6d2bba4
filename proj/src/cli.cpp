#include "fepi/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>

#include "fepi/crossval.hpp"
#include "fepi/dataio.hpp"
#include "fepi/errors.hpp"
#include "fepi/report.hpp"
#include "fepi/simstudy.hpp"

namespace fepi {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

HorizonMode parse_horizon_mode(const std::string& s) {
    if (s == "half") return HorizonMode::half;
    if (s == "ceiling") return HorizonMode::ceiling;
    throw UsageError("--horizon-mode must be 'half' or 'ceiling', got '" + s + "'");
}

/// "--theta grid" or "--theta fixed:<value>".
FitConfig parse_theta(const std::string& s) {
    FitConfig config;
    if (s == "grid") return config;
    if (s.rfind("fixed:", 0) == 0) {
        config.theta_mode = FitConfig::ThetaMode::fixed;
        try {
            config.theta_fixed = std::stod(s.substr(6));
        } catch (const std::exception&) {
            throw UsageError("--theta fixed:<value> needs a number, got '" + s + "'");
        }
        return config;
    }
    throw UsageError("--theta must be 'grid' or 'fixed:<value>', got '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, sep)) parts.push_back(part);
    return parts;
}

ErrorSample load_dataset(const std::string& data_path, const std::string& outcomes_path,
                         HorizonMode mode) {
    return build_dataset(load_forecast_csv(data_path), load_outcomes_csv(outcomes_path),
                         mode);
}

ModelSpec make_spec(const std::string& token, const FitConfig& estimated_config) {
    FitConfig fixed12;
    fixed12.theta_mode = FitConfig::ThetaMode::fixed;
    fixed12.theta_fixed = 12.0;
    if (token == "ar1") return {ModelSpec::Kind::ar1, estimated_config, "ar1"};
    if (token == "gauss") return {ModelSpec::Kind::gauss, estimated_config, "gauss"};
    if (token == "gauss12") return {ModelSpec::Kind::gauss, fixed12, "gauss12"};
    if (token == "qr") return {ModelSpec::Kind::qr, estimated_config, "qr"};
    if (token == "qr12") return {ModelSpec::Kind::qr, fixed12, "qr12"};
    throw UsageError("unknown model '" + token +
                     "' (expected ar1, gauss, gauss12, qr or qr12)");
}

int command_fit(const std::string& data, const std::string& outcomes,
                const std::string& model, const std::string& theta,
                const std::string& horizon_mode, double level, const std::string& out) {
    const ErrorSample sample = load_dataset(data, outcomes, parse_horizon_mode(horizon_mode));
    const FitConfig config = parse_theta(theta);
    FitResult fit;
    if (model == "ar1")
        fit = fit_ar1(sample, config);
    else if (model == "gauss")
        fit = fit_gauss(sample, config);
    else if (model == "qr")
        fit = fit_qr(sample, config, {(1.0 - level) / 2.0, (1.0 + level) / 2.0});
    else
        throw UsageError("--model must be ar1, gauss or qr, got '" + model + "'");
    write_json_file(out, to_json(fit));
    std::cout << "fit: " << model << " train objective " << fit.train_objective
              << " -> " << out << "\n";
    return kExitOk;
}

int command_predict(const std::string& params_path, const std::string& horizons,
                    const std::string& data, const std::string& outcomes,
                    const std::string& horizon_mode, double level,
                    const std::string& out) {
    const FitResult fit = fit_result_from_json(load_json_file(params_path));
    std::vector<CaseInterval> intervals;
    if (!horizons.empty()) {
        for (const std::string& token : split(horizons, ',')) {
            double h = 0.0;
            try {
                h = std::stod(token);
            } catch (const std::exception&) {
                throw UsageError("--horizons must be a comma list of numbers, got '" +
                                 token + "'");
            }
            CaseInterval ci;
            ci.case_id = "h=" + token;
            ci.horizon = h;
            ci.interval = central_interval(fit.params, h, level);
            intervals.push_back(std::move(ci));
        }
    } else if (!data.empty() && !outcomes.empty()) {
        const ErrorSample sample =
            load_dataset(data, outcomes, parse_horizon_mode(horizon_mode));
        for (const ErrorObservation& obs : sample) {
            CaseInterval ci;
            ci.case_id = obs.case_id;
            ci.target_year = obs.target_year;
            ci.horizon = obs.horizon;
            ci.interval = central_interval(fit.params, obs.horizon, level);
            intervals.push_back(std::move(ci));
        }
    } else {
        throw UsageError("predict needs either --horizons or --data with --outcomes");
    }
    write_json_file(out, to_json(intervals, level));
    std::cout << "predict: " << intervals.size() << " intervals -> " << out << "\n";
    return kExitOk;
}

int command_evaluate(const std::string& intervals_path, const std::string& data,
                     const std::string& outcomes, const std::string& horizon_mode,
                     const std::string& out) {
    double level = 0.8;
    const std::vector<CaseInterval> intervals =
        case_intervals_from_json(load_json_file(intervals_path), &level);
    const ErrorSample sample =
        load_dataset(data, outcomes, parse_horizon_mode(horizon_mode));
    const EvalReport report = evaluate_model(intervals, sample);
    write_json_file(out, to_json(report));
    std::cout << "evaluate: n=" << report.n << " coverage=" << report.coverage
              << " mean IS=" << report.mean_interval_score << " -> " << out << "\n";
    return kExitOk;
}

int command_cv(const std::string& data, const std::string& outcomes,
               const std::string& models, const std::string& theta,
               const std::string& horizon_mode, double level, const std::string& out) {
    const ErrorSample sample = load_dataset(data, outcomes, parse_horizon_mode(horizon_mode));
    const FitConfig estimated_config = parse_theta(theta);
    CvPlan plan;
    plan.level = level;
    for (const std::string& token : split(models, ','))
        plan.specs.push_back(make_spec(token, estimated_config));
    if (plan.specs.empty()) throw UsageError("--models must list at least one model");
    const CvOutput output = run_cv(sample, plan);
    audit_separation(output, sample);
    const CvSummary summary = summarize_cv(output, sample);
    write_json_file(out, to_json(summary));
    std::cout << "cv: " << summary.n_iterations << " iterations, "
              << summary.models.size() << " models -> " << out << "\n";
    return kExitOk;
}

int command_simulate(int replications, const std::string& settings, const std::string& rhos,
                     double tau2, double level, std::uint64_t seed, unsigned threads,
                     const std::string& out) {
    SimConfig config;
    config.replications = replications;
    config.tau2 = tau2;
    config.level = level;
    config.master_seed = seed;
    config.settings.clear();
    for (const std::string& token : split(settings, ',')) {
        const auto parts = split(token, ':');
        if (parts.size() != 2)
            throw UsageError("--settings must look like '300:20,600:40', got '" + token +
                             "'");
        try {
            config.settings.push_back({static_cast<std::size_t>(std::stoul(parts[0])),
                                       std::stoi(parts[1])});
        } catch (const std::exception&) {
            throw UsageError("--settings must be numeric 'n:t_max' pairs, got '" + token +
                             "'");
        }
    }
    config.rho_values.clear();
    for (const std::string& token : split(rhos, ',')) {
        try {
            config.rho_values.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw UsageError("--rho must be a comma list of numbers, got '" + token + "'");
        }
    }
    const SimResult result = run_simstudy(config, threads);
    write_json_file(out, to_json(result));
    std::cout << "simulate: " << result.replications << " replications x "
              << result.cells.size() << " cells -> " << out << "\n";
    return kExitOk;
}

int command_benchmark(const std::string& data, const std::string& outcomes,
                      const std::string& benchmark_path, const std::string& intervals_path,
                      const std::string& horizon_mode, const std::string& out) {
    const ErrorSample sample = load_dataset(data, outcomes, parse_horizon_mode(horizon_mode));
    double level = 0.8;
    const std::vector<CaseInterval> model_intervals =
        case_intervals_from_json(load_json_file(intervals_path), &level);

    // Benchmark intervals are stated for the outcome itself; shift them by
    // the case's point forecast to express them in error space.
    std::unordered_map<std::string, const ErrorObservation*> by_id;
    for (const ErrorObservation& obs : sample) by_id[obs.case_id] = &obs;
    std::vector<CaseInterval> bench_intervals;
    for (const BenchmarkInterval& bi : load_benchmark_csv(benchmark_path)) {
        const auto it = by_id.find(bi.case_id);
        if (it == by_id.end())
            throw DataError("benchmark: case id '" + bi.case_id +
                            "' does not match any dataset case");
        const ErrorObservation& obs = *it->second;
        if (!obs.point_forecast)
            throw DataError("benchmark: dataset case '" + bi.case_id +
                            "' has no point forecast");
        CaseInterval ci;
        ci.case_id = bi.case_id;
        ci.target_year = obs.target_year;
        ci.horizon = obs.horizon;
        ci.interval = IntervalForecast{bi.lower - *obs.point_forecast,
                                       bi.upper - *obs.point_forecast, level, false};
        bench_intervals.push_back(std::move(ci));
    }
    if (bench_intervals.size() != sample.size())
        throw DataError("benchmark: intervals cover " +
                        std::to_string(bench_intervals.size()) + " of " +
                        std::to_string(sample.size()) + " dataset cases");

    const EvalReport bench_eval = evaluate_model(bench_intervals, sample);
    const EvalReport model_eval = evaluate_model(model_intervals, sample);

    // Align scores in dataset order for the DM test.
    std::unordered_map<std::string, double> bench_scores, model_scores;
    for (const ScoredCase& c : bench_eval.cases) bench_scores[c.case_id] = c.interval_score;
    for (const ScoredCase& c : model_eval.cases) model_scores[c.case_id] = c.interval_score;
    std::vector<double> a, b;
    std::vector<int> clusters;
    for (const ErrorObservation& obs : sample) {
        a.push_back(bench_scores.at(obs.case_id));
        b.push_back(model_scores.at(obs.case_id));
        clusters.push_back(obs.target_year);
    }
    const DmTestResult dm = dm_test(a, b, clusters);

    Json j;
    j["level"] = level;
    j["benchmark_eval"] = to_json(bench_eval, /*include_cases=*/false);
    j["model_eval"] = to_json(model_eval, /*include_cases=*/false);
    j["dm_benchmark_vs_model"] = to_json(dm);
    write_json_file(out, j);
    std::cout << "benchmark: t_basic=" << dm.t_basic << " t_clustered=" << dm.t_clustered
              << " -> " << out << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Prediction intervals for fixed-event point forecasts"};
    app.require_subcommand(1);

    std::string data, outcomes, out = "out.json";
    std::string horizon_mode = "half", theta = "grid";
    double level = 0.8;
    std::uint64_t seed = 1;

    auto* fit = app.add_subcommand("fit", "fit an error model to a dataset");
    std::string fit_model = "ar1";
    fit->add_option("--data", data, "forecast archive CSV")->required();
    fit->add_option("--outcomes", outcomes, "per-year outcomes CSV")->required();
    fit->add_option("--model", fit_model, "ar1 | gauss | qr");
    fit->add_option("--theta", theta, "grid | fixed:<value>");
    fit->add_option("--level", level, "nominal interval level (sets qr levels)");
    fit->add_option("--horizon-mode", horizon_mode, "half | ceiling");
    fit->add_option("--seed", seed, "unused for fit; accepted for uniformity");
    fit->add_option("--out", out, "output file")->required();

    auto* predict = app.add_subcommand("predict", "intervals from a fitted model");
    std::string params_path, horizons;
    predict->add_option("--params", params_path, "fit output JSON")->required();
    predict->add_option("--horizons", horizons, "comma list of horizons");
    predict->add_option("--data", data, "forecast archive CSV (per-case mode)");
    predict->add_option("--outcomes", outcomes, "outcomes CSV (per-case mode)");
    predict->add_option("--level", level, "nominal interval level");
    predict->add_option("--horizon-mode", horizon_mode, "half | ceiling");
    predict->add_option("--out", out, "output file")->required();

    auto* evaluate = app.add_subcommand("evaluate", "score intervals against outcomes");
    std::string intervals_path;
    evaluate->add_option("--intervals", intervals_path, "intervals JSON")->required();
    evaluate->add_option("--data", data, "forecast archive CSV")->required();
    evaluate->add_option("--outcomes", outcomes, "outcomes CSV")->required();
    evaluate->add_option("--horizon-mode", horizon_mode, "half | ceiling");
    evaluate->add_option("--out", out, "output file")->required();

    auto* cv = app.add_subcommand("cv", "leave-one-year-out comparison report");
    std::string models = "ar1,gauss,gauss12,qr,qr12";
    cv->add_option("--data", data, "forecast archive CSV")->required();
    cv->add_option("--outcomes", outcomes, "outcomes CSV")->required();
    cv->add_option("--models", models, "comma list: ar1,gauss,gauss12,qr,qr12");
    cv->add_option("--level", level, "nominal interval level");
    cv->add_option("--theta", theta, "grid | fixed:<value> for estimated variants");
    cv->add_option("--horizon-mode", horizon_mode, "half | ceiling");
    cv->add_option("--seed", seed, "unused for cv; accepted for uniformity");
    cv->add_option("--out", out, "output file")->required();

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo study");
    int replications = 200;
    std::string settings = "300:20,600:40", rhos = "0.5,0.9";
    double tau2 = 0.1;
    unsigned threads = 0;
    simulate->add_option("--replications", replications, "Monte Carlo replications");
    simulate->add_option("--settings", settings, "n:t_max pairs, comma separated");
    simulate->add_option("--rho", rhos, "persistence values, comma separated");
    simulate->add_option("--tau2", tau2, "monthly shock variance");
    simulate->add_option("--level", level, "nominal interval level");
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--threads", threads, "worker threads (0 = all cores)");
    simulate->add_option("--out", out, "output file")->required();

    auto* benchmark = app.add_subcommand("benchmark",
                                         "compare external intervals with model intervals");
    std::string benchmark_path;
    benchmark->add_option("--data", data, "forecast archive CSV")->required();
    benchmark->add_option("--outcomes", outcomes, "outcomes CSV")->required();
    benchmark->add_option("--benchmark", benchmark_path, "benchmark intervals CSV")
        ->required();
    benchmark->add_option("--intervals", intervals_path, "model intervals JSON")
        ->required();
    benchmark->add_option("--horizon-mode", horizon_mode, "half | ceiling");
    benchmark->add_option("--out", out, "output file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (fit->parsed())
            return command_fit(data, outcomes, fit_model, theta, horizon_mode, level, out);
        if (predict->parsed())
            return command_predict(params_path, horizons, data, outcomes, horizon_mode,
                                   level, out);
        if (evaluate->parsed())
            return command_evaluate(intervals_path, data, outcomes, horizon_mode, out);
        if (cv->parsed())
            return command_cv(data, outcomes, models, theta, horizon_mode, level, out);
        if (simulate->parsed())
            return command_simulate(replications, settings, rhos, tau2, level, seed,
                                    threads, out);
        if (benchmark->parsed())
            return command_benchmark(data, outcomes, benchmark_path, intervals_path,
                                     horizon_mode, out);
        std::cerr << "error: usage: no subcommand given\n";
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace fepi
