#include "fepi/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "fepi/errors.hpp"

namespace fepi {

namespace {

std::vector<double> interval_levels(double level) {
    return {(1.0 - level) / 2.0, (1.0 + level) / 2.0};
}

/// Warm-start bookkeeping carried from fold to fold; folds share almost
/// all training data, so the previous solutions are excellent starts.
struct SpecWarm {
    Ar1Params ar1;
    bool have_ar1 = false;
    GaussWarmState gauss;
    QrWarmState qr;
};

FitResult fit_spec(const ModelSpec& spec, const ErrorSample& train, double level,
                   SpecWarm& warm) {
    switch (spec.kind) {
        case ModelSpec::Kind::ar1: {
            FitResult fit = fit_ar1(train, spec.config, warm.have_ar1 ? &warm.ar1 : nullptr);
            warm.ar1 = std::get<Ar1Params>(fit.params);
            warm.have_ar1 = true;
            return fit;
        }
        case ModelSpec::Kind::gauss:
            return fit_gauss(train, spec.config, &warm.gauss);
        case ModelSpec::Kind::qr:
            return fit_qr(train, spec.config, interval_levels(level), &warm.qr);
    }
    throw std::logic_error("fit_spec: unknown model kind");
}

}  // namespace

CvOutput run_cv(const ErrorSample& dataset, const CvPlan& plan) {
    if (dataset.empty()) throw std::invalid_argument("run_cv: empty dataset");
    if (plan.specs.empty()) throw std::invalid_argument("run_cv: no model specs");
    if (!(plan.level > 0.0 && plan.level < 1.0))
        throw std::invalid_argument("run_cv: level must lie in (0, 1)");

    std::set<int> year_set;
    for (const ErrorObservation& obs : dataset) year_set.insert(obs.target_year);
    if (year_set.size() < 2)
        throw std::invalid_argument("run_cv: needs at least 2 distinct target years");

    CvOutput out;
    out.level = plan.level;
    out.years.assign(year_set.begin(), year_set.end());
    for (const ModelSpec& spec : plan.specs) out.labels.push_back(spec.label);
    out.fits.resize(plan.specs.size());
    out.predictions.assign(plan.specs.size(),
                           std::vector<CaseInterval>(dataset.size()));

    std::vector<SpecWarm> warm(plan.specs.size());

    for (const int year : out.years) {
        ErrorSample train;
        std::vector<std::size_t> test_idx;
        CvFold fold;
        fold.held_out_year = year;
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            if (dataset[i].target_year == year) {
                test_idx.push_back(i);
                fold.test_case_ids.push_back(dataset[i].case_id);
            } else {
                train.push_back(dataset[i]);
                fold.train_case_ids.push_back(dataset[i].case_id);
            }
        }
        if (train.size() < plan.min_train_cases)
            throw DataError("run_cv: training fold for year " + std::to_string(year) +
                            " has " + std::to_string(train.size()) +
                            " cases (minimum " + std::to_string(plan.min_train_cases) +
                            ")");

        for (std::size_t s = 0; s < plan.specs.size(); ++s) {
            FitResult fit = fit_spec(plan.specs[s], train, plan.level, warm[s]);
            for (const std::size_t i : test_idx) {
                CaseInterval ci;
                ci.case_id = dataset[i].case_id;
                ci.target_year = dataset[i].target_year;
                ci.horizon = dataset[i].horizon;
                ci.interval = central_interval(fit.params, dataset[i].horizon, plan.level);
                out.predictions[s][i] = std::move(ci);
            }
            out.fits[s].push_back(std::move(fit));
        }
        out.folds.push_back(std::move(fold));
    }
    return out;
}

void audit_separation(const CvOutput& output, const ErrorSample& dataset) {
    std::unordered_map<std::string, int> year_of;
    year_of.reserve(dataset.size());
    for (const ErrorObservation& obs : dataset) year_of[obs.case_id] = obs.target_year;

    for (const CvFold& fold : output.folds) {
        std::unordered_set<std::string> train_ids(fold.train_case_ids.begin(),
                                                  fold.train_case_ids.end());
        for (const std::string& id : fold.train_case_ids) {
            const auto it = year_of.find(id);
            if (it == year_of.end())
                throw DataError("audit_separation: unknown training case id '" + id + "'");
            if (it->second == fold.held_out_year)
                throw DataError("audit_separation: case '" + id +
                                "' of held-out year " +
                                std::to_string(fold.held_out_year) +
                                " leaked into its training fold");
        }
        for (const std::string& id : fold.test_case_ids) {
            const auto it = year_of.find(id);
            if (it == year_of.end() || it->second != fold.held_out_year)
                throw DataError("audit_separation: test case '" + id +
                                "' does not belong to held-out year " +
                                std::to_string(fold.held_out_year));
            if (train_ids.count(id))
                throw DataError("audit_separation: test case '" + id +
                                "' also appears in the training fold");
        }
    }
}

CvSummary summarize_cv(const CvOutput& output, const ErrorSample& dataset) {
    if (output.predictions.size() != output.labels.size())
        throw std::invalid_argument("summarize_cv: malformed CvOutput");
    for (const auto& preds : output.predictions)
        if (preds.size() != dataset.size())
            throw DataError("summarize_cv: predictions do not cover all cases");

    CvSummary summary;
    summary.level = output.level;
    summary.n_iterations = output.folds.size();
    summary.baseline_label = output.labels.front();

    for (std::size_t s = 0; s < output.labels.size(); ++s) {
        CvModelSummary model;
        model.label = output.labels[s];
        model.eval = evaluate_model(output.predictions[s], dataset);
        for (const CaseInterval& ci : output.predictions[s])
            if (ci.interval.crossed) ++model.n_crossed;
        double tmin = std::numeric_limits<double>::infinity();
        double tmax = -std::numeric_limits<double>::infinity();
        bool any_theta = false;
        for (const FitResult& fit : output.fits[s]) {
            const double theta = fit.theta();
            model.theta_by_year.push_back(theta);
            if (std::isfinite(theta)) {
                any_theta = true;
                tmin = std::min(tmin, theta);
                tmax = std::max(tmax, theta);
            }
            model.theta_estimated =
                model.theta_estimated || fit.theta_profile.size() > 1;
        }
        if (any_theta) {
            model.theta_min = tmin;
            model.theta_max = tmax;
        }
        summary.models.push_back(std::move(model));
    }

    // DM tests against the baseline, clustered by target year. Cases are in
    // dataset order for every model, so the score series align.
    std::vector<int> clusters;
    clusters.reserve(dataset.size());
    for (const ErrorObservation& obs : dataset) clusters.push_back(obs.target_year);
    std::vector<double> base_scores;
    for (const ScoredCase& c : summary.models.front().eval.cases)
        base_scores.push_back(c.interval_score);

    summary.dm_vs_baseline.resize(summary.models.size());
    for (std::size_t s = 1; s < summary.models.size(); ++s) {
        std::vector<double> scores;
        for (const ScoredCase& c : summary.models[s].eval.cases)
            scores.push_back(c.interval_score);
        try {
            summary.dm_vs_baseline[s] = dm_test(scores, base_scores, clusters);
        } catch (const NumericError&) {
            summary.dm_vs_baseline[s] = std::nullopt;  // degenerate comparison
        }
    }
    return summary;
}

}  // namespace fepi
