#include "fepi/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "fepi/errors.hpp"

namespace fepi {

double interval_score(double lower, double upper, double y, double nominal_level) {
    if (lower > upper)
        throw std::invalid_argument("interval_score: lower bound exceeds upper bound");
    if (!(nominal_level > 0.0 && nominal_level < 1.0))
        throw std::invalid_argument("interval_score: level must lie in (0, 1)");
    const double weight = 2.0 / (1.0 - nominal_level);
    double score = upper - lower;
    if (y < lower) score += weight * (lower - y);
    if (y > upper) score += weight * (y - upper);
    return score;
}

double quantile_score(double alpha, double q, double y) {
    return 2.0 * tick_loss(alpha, q, y);
}

EvalAggregates coverage_and_length(const std::vector<ScoredCase>& cases) {
    if (cases.empty())
        throw std::invalid_argument("coverage_and_length: empty case list");
    EvalAggregates agg;
    for (const ScoredCase& c : cases) {
        agg.coverage += c.covered ? 1.0 : 0.0;
        agg.mean_length += c.length;
        agg.mean_interval_score += c.interval_score;
    }
    const double n = static_cast<double>(cases.size());
    agg.coverage /= n;
    agg.mean_length /= n;
    agg.mean_interval_score /= n;
    return agg;
}

DmTestResult dm_test(const std::vector<double>& scores_a,
                     const std::vector<double>& scores_b,
                     const std::vector<int>& cluster_ids) {
    const std::size_t n = scores_a.size();
    if (n < 2 || scores_b.size() != n || cluster_ids.size() != n)
        throw std::invalid_argument("dm_test: inputs must be aligned with length >= 2");

    std::vector<double> d(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = scores_a[i] - scores_b[i];
        mean += d[i];
    }
    mean /= static_cast<double>(n);

    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    if (ss == 0.0)
        throw NumericError("dm_test: degenerate score differences (zero variance)");
    const double var_basic = ss / static_cast<double>(n - 1) / static_cast<double>(n);

    std::map<int, double> cluster_sum;
    for (std::size_t i = 0; i < n; ++i) cluster_sum[cluster_ids[i]] += d[i] - mean;
    const std::size_t g = cluster_sum.size();
    if (g < 2)
        throw std::invalid_argument("dm_test: clustered variant needs >= 2 clusters");
    double cluster_ss = 0.0;
    for (const auto& [id, s] : cluster_sum) cluster_ss += s * s;
    // G/(G-1) finite-cluster factor; with one case per cluster this makes
    // the clustered and basic statistics identical.
    const double var_clustered = cluster_ss / static_cast<double>(n) /
                                 static_cast<double>(n) * static_cast<double>(g) /
                                 static_cast<double>(g - 1);
    if (var_clustered == 0.0)
        throw NumericError("dm_test: degenerate clustered variance");

    DmTestResult result;
    result.n_cases = n;
    result.n_clusters = g;
    result.mean_score_diff = mean;
    result.t_basic = mean / std::sqrt(var_basic);
    result.t_clustered = mean / std::sqrt(var_clustered);
    return result;
}

EvalReport evaluate_model(const std::vector<CaseInterval>& predictions,
                          const ErrorSample& outcomes) {
    if (predictions.empty())
        throw std::invalid_argument("evaluate_model: no predictions");
    std::unordered_map<std::string, const ErrorObservation*> by_id;
    by_id.reserve(outcomes.size());
    for (const ErrorObservation& obs : outcomes) {
        if (!by_id.emplace(obs.case_id, &obs).second)
            throw DataError("evaluate_model: duplicate case id '" + obs.case_id + "'");
    }
    if (by_id.size() != predictions.size())
        throw DataError("evaluate_model: prediction/outcome case ids do not align");

    EvalReport report;
    report.cases.reserve(predictions.size());
    std::unordered_map<std::string, bool> seen;
    for (const CaseInterval& p : predictions) {
        const auto it = by_id.find(p.case_id);
        if (it == by_id.end())
            throw DataError("evaluate_model: no outcome for case id '" + p.case_id + "'");
        if (!seen.emplace(p.case_id, true).second)
            throw DataError("evaluate_model: duplicate prediction for case id '" +
                            p.case_id + "'");
        const ErrorObservation& obs = *it->second;
        ScoredCase scored;
        scored.case_id = p.case_id;
        scored.target_year = obs.target_year;
        scored.horizon = obs.horizon;
        scored.lower = p.interval.lower;
        scored.upper = p.interval.upper;
        scored.outcome_error = obs.error;
        scored.length = p.interval.length();
        scored.covered = p.interval.covers(obs.error);
        scored.interval_score =
            interval_score(p.interval.lower, p.interval.upper, obs.error,
                           p.interval.nominal_level);
        report.cases.push_back(std::move(scored));
    }

    report.n = report.cases.size();
    const EvalAggregates agg = coverage_and_length(report.cases);
    report.coverage = agg.coverage;
    report.mean_length = agg.mean_length;
    report.mean_interval_score = agg.mean_interval_score;

    std::map<double, std::vector<const ScoredCase*>> groups;
    for (const ScoredCase& c : report.cases) groups[c.horizon].push_back(&c);
    for (const auto& [h, group] : groups) {
        HorizonBreakdownRow row;
        row.horizon = h;
        row.n = group.size();
        for (const ScoredCase* c : group) {
            row.coverage += c->covered ? 1.0 : 0.0;
            row.mean_length += c->length;
            row.mean_interval_score += c->interval_score;
        }
        row.coverage /= static_cast<double>(row.n);
        row.mean_length /= static_cast<double>(row.n);
        row.mean_interval_score /= static_cast<double>(row.n);
        report.per_horizon.push_back(row);
    }
    return report;
}

}  // namespace fepi
