#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fepi/estimate.hpp"
#include "fepi/evaluate.hpp"
#include "fepi/types.hpp"

namespace fepi {

/// One model variant entered into the cross-validated comparison.
struct ModelSpec {
    enum class Kind { ar1, gauss, qr };

    Kind kind = Kind::ar1;
    FitConfig config;
    std::string label;
};

/// Leave-one-target-year-out evaluation plan. The first spec serves as the
/// baseline of the pairwise score tests.
struct CvPlan {
    double level = 0.8;
    std::vector<ModelSpec> specs;
    std::size_t min_train_cases = 8;
};

struct CvFold {
    int held_out_year = 0;
    std::vector<std::string> train_case_ids;
    std::vector<std::string> test_case_ids;
};

struct CvOutput {
    double level = 0.8;
    std::vector<std::string> labels;
    std::vector<int> years;  ///< ascending; one fold per year
    std::vector<CvFold> folds;
    std::vector<std::vector<FitResult>> fits;  ///< [spec][fold]
    /// Out-of-sample interval per case, in dataset order: [spec][case].
    std::vector<std::vector<CaseInterval>> predictions;
};

/// For each year: fit every spec on all other years' cases, predict central
/// intervals for the held-out cases. Folds run serially in year order so
/// results are reproducible; fits warm-start from the previous fold.
/// Throws DataError when a fold's training sample is too small.
CvOutput run_cv(const ErrorSample& dataset, const CvPlan& plan);

/// Verifies training/test separation: no held-out-year case may appear in
/// its fold's training ids, and test ids must belong to the held-out year.
/// Throws DataError on any violation.
void audit_separation(const CvOutput& output, const ErrorSample& dataset);

struct CvModelSummary {
    std::string label;
    bool theta_estimated = false;
    EvalReport eval;
    std::size_t n_crossed = 0;  ///< predictions whose raw quantiles crossed
    std::optional<double> theta_min;  ///< over iterations; empty for AR1
    std::optional<double> theta_max;
    std::vector<double> theta_by_year;
};

struct CvSummary {
    double level = 0.8;
    std::size_t n_iterations = 0;
    std::string baseline_label;
    std::vector<CvModelSummary> models;
    /// DM test of each model against the baseline (empty for the baseline
    /// itself or when the comparison is degenerate).
    std::vector<std::optional<DmTestResult>> dm_vs_baseline;
};

/// Pooled evaluation per model plus DM tests against the baseline, with
/// score differences clustered by target year.
CvSummary summarize_cv(const CvOutput& output, const ErrorSample& dataset);

}  // namespace fepi
