#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fepi/errors.hpp"
#include "fepi/evaluate.hpp"
#include "fepi/rng.hpp"

using namespace fepi;

namespace {

std::vector<CaseInterval> constant_intervals(const ErrorSample& outcomes, double lo,
                                             double hi, double level) {
    std::vector<CaseInterval> out;
    for (const auto& obs : outcomes) {
        CaseInterval ci;
        ci.case_id = obs.case_id;
        ci.target_year = obs.target_year;
        ci.horizon = obs.horizon;
        ci.interval = IntervalForecast{lo, hi, level, false};
        out.push_back(ci);
    }
    return out;
}

ErrorSample simple_outcomes(const std::vector<double>& errors) {
    ErrorSample sample;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        ErrorObservation obs;
        obs.case_id = "k" + std::to_string(i);
        obs.target_year = 2000 + static_cast<int>(i / 2);
        obs.horizon = static_cast<double>(1 + i % 4);
        obs.error = errors[i];
        sample.push_back(obs);
    }
    return sample;
}

}  // namespace

TEST_CASE("interval score basics") {
    CHECK(interval_score(0.0, 1.0, 0.5, 0.8) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(interval_score(0.0, 1.0, 2.0, 0.8) == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(interval_score(0.0, 1.0, -1.0, 0.8) == doctest::Approx(11.0).epsilon(1e-12));
    CHECK_THROWS_AS(interval_score(1.0, 0.0, 0.5, 0.8), std::invalid_argument);
    CHECK_THROWS_AS(interval_score(0.0, 1.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("interval score decomposes into weighted quantile scores") {
    Rng rng(60601);
    std::uniform_real_distribution<double> draw(-4.0, 4.0);
    for (int rep = 0; rep < 1000; ++rep) {
        double l = draw(rng), u = draw(rng), y = draw(rng);
        if (l > u) std::swap(l, u);
        const double is = interval_score(l, u, y, 0.8);
        const double qs = 10.0 * (tick_loss(0.1, l, y) + tick_loss(0.9, u, y));
        CHECK(std::abs(is - qs) <= 1e-12);
        // Weight generalization 2/(1 - level) at other levels.
        for (const double level : {0.5, 0.9}) {
            const double w = 2.0 / (1.0 - level);
            const double a_lo = (1.0 - level) / 2.0, a_hi = (1.0 + level) / 2.0;
            const double sum = 0.5 * w *
                               (quantile_score(a_lo, l, y) + quantile_score(a_hi, u, y));
            CHECK(std::abs(interval_score(l, u, y, level) - sum) <= 1e-12);
        }
    }
    CHECK(quantile_score(0.5, 1.25, 1.25) == 0.0);
    CHECK(quantile_score(0.9, 0.0, 1.0) == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("interval score is proper for the true central interval") {
    Rng rng(13579);
    std::normal_distribution<double> outcome(0.0, 1.0);
    const double z = 1.2815515655446004;
    double true_score = 0.0, shifted = 0.0, wider = 0.0, narrower = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double y = outcome(rng);
        true_score += interval_score(-z, z, y, 0.8);
        shifted += interval_score(-z + 0.4, z + 0.4, y, 0.8);
        wider += interval_score(-1.3 * z, 1.3 * z, y, 0.8);
        narrower += interval_score(-0.7 * z, 0.7 * z, y, 0.8);
    }
    CHECK(true_score < shifted);
    CHECK(true_score < wider);
    CHECK(true_score < narrower);
}

TEST_CASE("coverage, length and score aggregation") {
    ErrorSample outcomes = simple_outcomes({0.5, 0.5, 0.5, 0.5});
    const EvalReport all_in =
        evaluate_model(constant_intervals(outcomes, 0.0, 1.0, 0.8), outcomes);
    CHECK(all_in.coverage == 1.0);
    CHECK(all_in.mean_length == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(all_in.mean_interval_score == doctest::Approx(1.0).epsilon(1e-12));

    // Omniscient forecast: zero-width at the outcome.
    ErrorSample outcomes2 = simple_outcomes({0.3, -0.7});
    std::vector<CaseInterval> omniscient;
    for (const auto& obs : outcomes2) {
        CaseInterval ci;
        ci.case_id = obs.case_id;
        ci.target_year = obs.target_year;
        ci.horizon = obs.horizon;
        ci.interval = IntervalForecast{obs.error, obs.error, 0.8, false};
        omniscient.push_back(ci);
    }
    const EvalReport perfect = evaluate_model(omniscient, outcomes2);
    CHECK(perfect.coverage == 1.0);
    CHECK(perfect.mean_length == 0.0);
    CHECK(perfect.mean_interval_score == 0.0);

    // One covered, one missed.
    ErrorSample outcomes3 = simple_outcomes({0.5, 9.0});
    const EvalReport half =
        evaluate_model(constant_intervals(outcomes3, 0.0, 1.0, 0.8), outcomes3);
    CHECK(half.coverage == 0.5);

    CHECK_THROWS_AS(coverage_and_length({}), std::invalid_argument);
}

TEST_CASE("evaluate_model joins by case id and groups by horizon") {
    Rng rng(4242);
    std::normal_distribution<double> draw(0.0, 1.0);
    std::vector<double> errors(40);
    for (auto& e : errors) e = draw(rng);
    const ErrorSample outcomes = simple_outcomes(errors);
    const auto preds = constant_intervals(outcomes, -1.0, 1.0, 0.8);
    const EvalReport report = evaluate_model(preds, outcomes);

    // Per-horizon rows aggregate back to the overall means.
    double n_total = 0.0, is_total = 0.0, cov_total = 0.0, len_total = 0.0;
    for (const auto& row : report.per_horizon) {
        n_total += static_cast<double>(row.n);
        is_total += row.mean_interval_score * static_cast<double>(row.n);
        cov_total += row.coverage * static_cast<double>(row.n);
        len_total += row.mean_length * static_cast<double>(row.n);
    }
    CHECK(n_total == static_cast<double>(report.n));
    CHECK(is_total / n_total == doctest::Approx(report.mean_interval_score).epsilon(1e-12));
    CHECK(cov_total / n_total == doctest::Approx(report.coverage).epsilon(1e-12));
    CHECK(len_total / n_total == doctest::Approx(report.mean_length).epsilon(1e-12));

    // Case order does not change the aggregates.
    auto shuffled = preds;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const EvalReport report2 = evaluate_model(shuffled, outcomes);
    CHECK(report2.coverage == report.coverage);
    CHECK(report2.mean_interval_score ==
          doctest::Approx(report.mean_interval_score).epsilon(1e-12));

    // Misaligned ids are a join error.
    auto broken = preds;
    broken.front().case_id = "nope";
    CHECK_THROWS_AS(evaluate_model(broken, outcomes), DataError);
    auto extra = preds;
    extra.pop_back();
    CHECK_THROWS_AS(evaluate_model(extra, outcomes), DataError);
}

TEST_CASE("dm test statistics") {
    // Zero-mean differences give t = 0.
    const std::vector<double> a{1.0, 0.0, 1.0, 0.0};
    const std::vector<double> b{0.0, 1.0, 0.0, 1.0};
    const std::vector<int> clusters{1, 2, 3, 4};
    const DmTestResult r = dm_test(a, b, clusters);
    CHECK(r.t_basic == 0.0);
    CHECK(r.t_clustered == 0.0);
    CHECK(r.mean_score_diff == 0.0);
    CHECK(r.n_cases == 4);
    CHECK(r.n_clusters == 4);

    // Identical inputs: degenerate variance.
    CHECK_THROWS_AS(dm_test(a, a, clusters), NumericError);

    // One case per cluster: clustered and basic agree exactly.
    Rng rng(8181);
    std::normal_distribution<double> draw(0.3, 1.0);
    std::vector<double> sa(60), sb(60);
    std::vector<int> ids(60);
    for (int i = 0; i < 60; ++i) {
        sa[i] = draw(rng);
        sb[i] = draw(rng);
        ids[i] = i;
    }
    const DmTestResult solo = dm_test(sa, sb, ids);
    CHECK(solo.t_clustered == doctest::Approx(solo.t_basic).epsilon(1e-12));

    // Antisymmetry is exact.
    std::vector<int> grouped(60);
    for (int i = 0; i < 60; ++i) grouped[i] = i / 5;
    const DmTestResult ab = dm_test(sa, sb, grouped);
    const DmTestResult ba = dm_test(sb, sa, grouped);
    CHECK(ab.t_basic == -ba.t_basic);
    CHECK(ab.t_clustered == -ba.t_clustered);
    CHECK(ab.mean_score_diff == -ba.mean_score_diff);

    // Positive t when A scores worse (higher) than B.
    std::vector<double> worse(60);
    for (int i = 0; i < 60; ++i) worse[i] = sb[i] + 0.8 + 0.01 * (i % 3);
    CHECK(dm_test(worse, sb, grouped).t_basic > 0.0);

    CHECK_THROWS_AS(dm_test({1.0}, {0.0}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(dm_test(sa, sb, std::vector<int>(60, 7)), std::invalid_argument);
}

TEST_CASE("dm test: empirical size under the null") {
    Rng rng(515151);
    std::normal_distribution<double> draw(0.0, 1.0);
    int rejections = 0;
    const int sims = 1000, n = 50;
    for (int s = 0; s < sims; ++s) {
        std::vector<double> diffs(n), zeros(n, 0.0);
        std::vector<int> ids(n);
        for (int i = 0; i < n; ++i) {
            diffs[i] = draw(rng);
            ids[i] = i;
        }
        if (std::abs(dm_test(diffs, zeros, ids).t_basic) > 1.96) ++rejections;
    }
    const double size = static_cast<double>(rejections) / sims;
    CHECK(size >= 0.02);
    CHECK(size <= 0.09);
}
