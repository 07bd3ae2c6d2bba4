#pragma once

#include <string>
#include <vector>

#include "fepi/models.hpp"
#include "fepi/types.hpp"

namespace fepi {

/// One scored forecast case: interval, realized error, and the derived
/// score components.
struct ScoredCase {
    std::string case_id;
    int target_year = 0;
    double horizon = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double outcome_error = 0.0;
    double interval_score = 0.0;
    bool covered = false;
    double length = 0.0;
};

/// Diebold-Mariano type test of equal interval scores; positive statistics
/// mean method A scored worse than method B.
struct DmTestResult {
    double t_basic = 0.0;
    double t_clustered = 0.0;
    std::size_t n_cases = 0;
    std::size_t n_clusters = 0;
    double mean_score_diff = 0.0;
};

struct HorizonBreakdownRow {
    double horizon = 0.0;
    std::size_t n = 0;
    double coverage = 0.0;
    double mean_length = 0.0;
    double mean_interval_score = 0.0;
};

struct EvalReport {
    std::vector<ScoredCase> cases;
    std::size_t n = 0;
    double coverage = 0.0;
    double mean_length = 0.0;
    double mean_interval_score = 0.0;
    std::vector<HorizonBreakdownRow> per_horizon;
};

/// Interval score (u - l) + W(l - y)1{y < l} + W(y - u)1{y > u} with
/// W = 2/(1 - nominal_level); W = 10 at the 80% level.
double interval_score(double lower, double upper, double y, double nominal_level);

/// Quantile score 2 * tick_loss, normalized so that the interval score
/// decomposes exactly as W/2 * (qs(alpha_lo, l, y) + qs(alpha_hi, u, y)).
double quantile_score(double alpha, double q, double y);

struct EvalAggregates {
    double coverage = 0.0;
    double mean_length = 0.0;
    double mean_interval_score = 0.0;
};

/// Aggregate coverage rate, mean interval length and mean interval score.
EvalAggregates coverage_and_length(const std::vector<ScoredCase>& cases);

/// DM test from per-case scores of two methods, with iid (basic) standard
/// errors and standard errors clustered by `cluster_ids`. The clustered
/// variance carries the G/(G-1) finite-cluster factor so that with one case
/// per cluster both statistics coincide exactly.
DmTestResult dm_test(const std::vector<double>& scores_a,
                     const std::vector<double>& scores_b,
                     const std::vector<int>& cluster_ids);

/// Interval prediction for a concrete forecast case.
struct CaseInterval {
    std::string case_id;
    int target_year = 0;
    double horizon = 0.0;
    IntervalForecast interval;
};

/// Score predictions against realized errors, joined by case_id (the two
/// id sets must match exactly), and aggregate overall and per horizon.
EvalReport evaluate_model(const std::vector<CaseInterval>& predictions,
                          const ErrorSample& outcomes);

}  // namespace fepi
