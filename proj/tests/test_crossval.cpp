#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fepi/crossval.hpp"
#include "fepi/errors.hpp"
#include "fepi/rng.hpp"

using namespace fepi;

namespace {

CvPlan small_plan() {
    CvPlan plan;
    plan.level = 0.8;
    FitConfig fixed12;
    fixed12.theta_mode = FitConfig::ThetaMode::fixed;
    FitConfig small_grid;
    small_grid.theta_grid = {8.0, 12.0, 16.0};
    plan.specs = {
        {ModelSpec::Kind::ar1, FitConfig{}, "ar1"},
        {ModelSpec::Kind::gauss, small_grid, "gauss"},
        {ModelSpec::Kind::qr, fixed12, "qr12"},
    };
    return plan;
}

ErrorSample simulated_dataset(std::size_t n, int t_max, std::uint64_t seed) {
    ErrorSampleDesign design;
    design.n = n;
    design.t_max = t_max;
    design.seed = seed;
    return simulate_errors(Ar1Params{0.5, 0.1}, design);
}

}  // namespace

TEST_CASE("run_cv trains strictly on the other years") {
    const ErrorSample dataset = simulated_dataset(120, 6, 99);
    const CvOutput out = run_cv(dataset, small_plan());
    CHECK(out.years.size() == 6);
    CHECK(out.folds.size() == 6);

    std::set<int> years(out.years.begin(), out.years.end());
    for (const CvFold& fold : out.folds) {
        for (const std::string& id : fold.train_case_ids) {
            const auto it = std::find_if(dataset.begin(), dataset.end(),
                                         [&](const ErrorObservation& o) {
                                             return o.case_id == id;
                                         });
            REQUIRE(it != dataset.end());
            CHECK(it->target_year != fold.held_out_year);
        }
        CHECK(fold.train_case_ids.size() + fold.test_case_ids.size() == dataset.size());
    }
    CHECK_NOTHROW(audit_separation(out, dataset));
}

TEST_CASE("audit_separation detects leaks") {
    const ErrorSample dataset = simulated_dataset(60, 4, 123);
    CvOutput out = run_cv(dataset, small_plan());
    // Plant a leak: move a held-out case into its own training fold.
    out.folds[1].train_case_ids.push_back(out.folds[1].test_case_ids.front());
    CHECK_THROWS_AS(audit_separation(out, dataset), DataError);
}

TEST_CASE("run_cv is deterministic") {
    const ErrorSample dataset = simulated_dataset(90, 5, 2024);
    const CvOutput a = run_cv(dataset, small_plan());
    const CvOutput b = run_cv(dataset, small_plan());
    REQUIRE(a.predictions.size() == b.predictions.size());
    for (std::size_t s = 0; s < a.predictions.size(); ++s) {
        for (std::size_t i = 0; i < a.predictions[s].size(); ++i) {
            CHECK(a.predictions[s][i].interval.lower == b.predictions[s][i].interval.lower);
            CHECK(a.predictions[s][i].interval.upper == b.predictions[s][i].interval.upper);
        }
    }
}

TEST_CASE("summarize_cv pools cases and runs the score tests") {
    const ErrorSample dataset = simulated_dataset(150, 6, 7);
    const CvOutput out = run_cv(dataset, small_plan());
    const CvSummary summary = summarize_cv(out, dataset);
    CHECK(summary.n_iterations == 6);
    CHECK(summary.baseline_label == "ar1");
    REQUIRE(summary.models.size() == 3);

    // Pooled aggregates equal a direct evaluation of the same predictions.
    for (std::size_t s = 0; s < summary.models.size(); ++s) {
        const EvalReport direct = evaluate_model(out.predictions[s], dataset);
        CHECK(summary.models[s].eval.mean_interval_score ==
              doctest::Approx(direct.mean_interval_score).epsilon(1e-12));
        CHECK(summary.models[s].eval.coverage == direct.coverage);
    }

    // Baseline has no self-test; the others test against it.
    CHECK(!summary.dm_vs_baseline[0].has_value());
    CHECK(summary.dm_vs_baseline[1].has_value());
    CHECK(summary.dm_vs_baseline[2].has_value());
    CHECK(summary.dm_vs_baseline[1]->n_clusters == 6);

    // theta bookkeeping: the Gaussian profile range lies inside its grid.
    const CvModelSummary& gauss = summary.models[1];
    CHECK(gauss.theta_estimated);
    REQUIRE(gauss.theta_min.has_value());
    CHECK(*gauss.theta_min >= 8.0);
    CHECK(*gauss.theta_max <= 16.0);
    CHECK(gauss.theta_by_year.size() == 6);

    // AR1 reports no theta.
    CHECK(!summary.models[0].theta_min.has_value());

    // A duplicated spec compares a model with itself: degenerate, reported
    // as not applicable.
    CvPlan dup = small_plan();
    dup.specs = {dup.specs[0], dup.specs[0]};
    dup.specs[1].label = "ar1_again";
    const CvSummary dup_summary = summarize_cv(run_cv(dataset, dup), dataset);
    CHECK(!dup_summary.dm_vs_baseline[1].has_value());
}

TEST_CASE("run_cv fails loudly on undersized folds") {
    // 3 distinct years but almost all cases in year 1.
    ErrorSample dataset;
    for (int i = 0; i < 12; ++i) {
        ErrorObservation obs;
        obs.case_id = "c" + std::to_string(i);
        obs.target_year = i < 10 ? 1 : (i == 10 ? 2 : 3);
        obs.horizon = 1.0 + static_cast<double>(i % 6);
        obs.error = 0.1 * static_cast<double>(i % 5) - 0.2;
        dataset.push_back(obs);
    }
    CvPlan plan = small_plan();
    plan.min_train_cases = 8;
    CHECK_THROWS_WITH_AS(run_cv(dataset, plan), doctest::Contains("year 1"), DataError);

    CHECK_THROWS_AS(run_cv(ErrorSample{}, plan), std::invalid_argument);
    ErrorSample one_year = simulated_dataset(30, 1, 3);
    CHECK_THROWS_AS(run_cv(one_year, plan), std::invalid_argument);
}

TEST_CASE("true-parameter intervals beat fitted models through the same pipeline") {
    // Small-scale version of the simulation claim: the true model's mean
    // interval score is no worse than a fitted competitor's, up to Monte
    // Carlo noise.
    const Ar1Params truth{0.5, 0.1};
    const double z = normal_quantile(0.9);
    const int reps = 12;
    std::vector<double> truth_means, fitted_means;
    for (int rep = 0; rep < reps; ++rep) {
        const ErrorSample dataset = simulated_dataset(120, 8, derive_seed(555, rep));
        CvPlan plan;
        plan.level = 0.8;
        FitConfig fixed12;
        fixed12.theta_mode = FitConfig::ThetaMode::fixed;
        plan.specs = {{ModelSpec::Kind::gauss, fixed12, "gauss12"}};
        const CvOutput out = run_cv(dataset, plan);

        std::vector<CaseInterval> truth_preds;
        for (const ErrorObservation& obs : dataset) {
            CaseInterval ci;
            ci.case_id = obs.case_id;
            ci.target_year = obs.target_year;
            ci.horizon = obs.horizon;
            const double half = z * sigma_h(truth, static_cast<int>(obs.horizon));
            ci.interval = IntervalForecast{-half, half, 0.8, false};
            truth_preds.push_back(ci);
        }
        truth_means.push_back(evaluate_model(truth_preds, dataset).mean_interval_score);
        fitted_means.push_back(
            evaluate_model(out.predictions[0], dataset).mean_interval_score);
    }
    double truth_mean = 0.0, fitted_mean = 0.0;
    for (int r = 0; r < reps; ++r) {
        truth_mean += truth_means[r] / reps;
        fitted_mean += fitted_means[r] / reps;
    }
    double sd = 0.0;
    for (int r = 0; r < reps; ++r)
        sd += (truth_means[r] - truth_mean) * (truth_means[r] - truth_mean);
    sd = std::sqrt(sd / (reps - 1));
    CHECK(truth_mean <= fitted_mean + 2.0 * sd / std::sqrt(static_cast<double>(reps)));
}
