#include "fepi/simstudy.hpp"

#include <cmath>
#include <stdexcept>

#include "fepi/crossval.hpp"
#include "fepi/errors.hpp"
#include "fepi/parallel.hpp"
#include "fepi/rng.hpp"

namespace fepi {

void SimConfig::validate() const {
    if (replications < 1) throw std::invalid_argument("SimConfig: replications >= 1");
    if (settings.empty()) throw std::invalid_argument("SimConfig: no settings");
    if (rho_values.empty()) throw std::invalid_argument("SimConfig: no rho values");
    if (!(tau2 > 0.0)) throw std::invalid_argument("SimConfig: tau2 must be positive");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("SimConfig: level must lie in (0, 1)");
}

const std::vector<std::string>& simstudy_method_labels() {
    static const std::vector<std::string> labels = {"truth",    "truth_est", "gauss_est",
                                                    "gauss_12", "qr_est",    "qr_12"};
    return labels;
}

const SimMethodResult& SimCell::method(const std::string& label) const {
    for (const SimMethodResult& m : methods)
        if (m.label == label) return m;
    throw std::invalid_argument("SimCell: unknown method label '" + label + "'");
}

namespace {

struct RepStats {
    double mean_is = 0.0;
    double coverage = 0.0;
    double mean_length = 0.0;
};

RepStats stats_of(const EvalReport& report) {
    return {report.mean_interval_score, report.coverage, report.mean_length};
}

CvPlan fitted_methods_plan(double level) {
    CvPlan plan;
    plan.level = level;
    FitConfig estimated;  // theta profiled over the default grid
    FitConfig fixed12;
    fixed12.theta_mode = FitConfig::ThetaMode::fixed;
    fixed12.theta_fixed = 12.0;
    plan.specs = {
        {ModelSpec::Kind::ar1, estimated, "truth_est"},
        {ModelSpec::Kind::gauss, estimated, "gauss_est"},
        {ModelSpec::Kind::gauss, fixed12, "gauss_12"},
        {ModelSpec::Kind::qr, estimated, "qr_est"},
        {ModelSpec::Kind::qr, fixed12, "qr_12"},
    };
    return plan;
}

/// One replication: simulate, evaluate the true model directly, evaluate
/// the fitted variants out of sample via leave-one-year-out CV.
std::vector<RepStats> run_replication(const Ar1Params& params, const SimSetting& setting,
                                      double level, std::uint64_t seed) {
    ErrorSampleDesign design;
    design.n = setting.n;
    design.t_max = setting.t_max;
    design.seed = seed;
    const ErrorSample sample = simulate_errors(params, design);

    // True model: known parameters, integer horizons, no fitting.
    std::vector<CaseInterval> truth_intervals;
    truth_intervals.reserve(sample.size());
    const double z_hi = normal_quantile((1.0 + level) / 2.0);
    for (const ErrorObservation& obs : sample) {
        CaseInterval ci;
        ci.case_id = obs.case_id;
        ci.target_year = obs.target_year;
        ci.horizon = obs.horizon;
        const double half = z_hi * sigma_h(params, static_cast<int>(obs.horizon));
        ci.interval = IntervalForecast{-half, half, level, false};
        truth_intervals.push_back(std::move(ci));
    }

    std::vector<RepStats> stats;
    stats.reserve(6);
    stats.push_back(stats_of(evaluate_model(truth_intervals, sample)));

    const CvOutput cv = run_cv(sample, fitted_methods_plan(level));
    for (const auto& predictions : cv.predictions)
        stats.push_back(stats_of(evaluate_model(predictions, sample)));
    return stats;
}

}  // namespace

SimResult run_simstudy(const SimConfig& config, unsigned threads) {
    config.validate();
    const auto& labels = simstudy_method_labels();

    struct CellSpec {
        SimSetting setting;
        double rho = 0.0;
    };
    std::vector<CellSpec> cells;
    for (const SimSetting& setting : config.settings)
        for (const double rho : config.rho_values) cells.push_back({setting, rho});

    const std::size_t reps = static_cast<std::size_t>(config.replications);
    // per (cell, rep, method) statistics, filled independently
    std::vector<std::vector<std::vector<RepStats>>> results(
        cells.size(), std::vector<std::vector<RepStats>>(reps));

    parallel_for(cells.size() * reps, threads, [&](std::size_t item) {
        const std::size_t cell_idx = item / reps;
        const std::size_t rep = item % reps;
        const CellSpec& cell = cells[cell_idx];
        const Ar1Params params{cell.rho, config.tau2};
        const std::uint64_t seed =
            derive_seed(config.master_seed, cell_idx * 1000003ULL + rep);
        try {
            results[cell_idx][rep] =
                run_replication(params, cell.setting, config.level, seed);
        } catch (const std::exception& e) {
            throw NumericError("simstudy: replication " + std::to_string(rep) +
                               " of cell " + std::to_string(cell_idx) +
                               " failed: " + e.what());
        }
    });

    SimResult sim;
    sim.replications = config.replications;
    sim.level = config.level;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        SimCell cell;
        cell.n = cells[c].setting.n;
        cell.t_max = cells[c].setting.t_max;
        cell.rho = cells[c].rho;
        cell.tau2 = config.tau2;
        for (std::size_t m = 0; m < labels.size(); ++m) {
            SimMethodResult method;
            method.label = labels[m];
            double mean = 0.0;
            for (std::size_t r = 0; r < reps; ++r) mean += results[c][r][m].mean_is;
            mean /= static_cast<double>(reps);
            double ss = 0.0, cov = 0.0, len = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                const RepStats& s = results[c][r][m];
                ss += (s.mean_is - mean) * (s.mean_is - mean);
                cov += s.coverage;
                len += s.mean_length;
            }
            method.mean_interval_score = mean;
            method.mc_se = reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1) /
                                                static_cast<double>(reps))
                                    : 0.0;
            method.coverage = cov / static_cast<double>(reps);
            method.mean_length = len / static_cast<double>(reps);
            cell.methods.push_back(std::move(method));
        }
        sim.cells.push_back(std::move(cell));
    }
    return sim;
}

}  // namespace fepi
