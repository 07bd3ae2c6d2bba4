#pragma once

#include <optional>
#include <vector>

#include "fepi/models.hpp"
#include "fepi/types.hpp"

namespace fepi {

/// How the leveling horizon theta is chosen during fitting.
struct FitConfig {
    enum class ThetaMode { estimated, fixed };

    ThetaMode theta_mode = ThetaMode::estimated;
    double theta_fixed = 12.0;
    std::vector<double> theta_grid = default_theta_grid();  // 5, 5.5, ..., 20
    int optimizer_restarts = 5;
    double tolerance = 1e-8;

    static std::vector<double> default_theta_grid();
    std::vector<double> thetas() const;  ///< grid or the single fixed value
};

struct ThetaProfilePoint {
    double theta = 0.0;
    double objective = 0.0;
};

struct FitDiagnostics {
    int objective_evaluations = 0;
    int simplex_runs = 0;
    std::vector<double> restart_values;  ///< per-run best at the selected theta
    bool single_horizon = false;  ///< all horizons equal; slope/persistence unidentified
};

struct FitResult {
    ModelParams params;
    double train_objective = 0.0;  ///< min over theta_profile when theta is estimated
    std::vector<ThetaProfilePoint> theta_profile;
    FitDiagnostics diagnostics;

    double theta() const;  ///< leveling horizon of the fitted model (AR1: NaN)
};

/// Reusable warm state for a sequence of closely related fits (e.g. the
/// folds of a cross-validation run): per-theta solutions of the previous
/// fit. Updated in place; pass nullptr for a cold fit.
struct GaussWarmState {
    std::vector<std::vector<double>> argmin_by_theta;  ///< aligned with config grid
};
struct QrWarmState {
    std::vector<std::vector<double>> slope_by_theta;  ///< [theta][level]
};

/// Fit the AR(1) error model by minimum CRPS over rho in [0, 0.99] and
/// tau > 0. Optional warm start from a previous fit on similar data.
FitResult fit_ar1(const ErrorSample& sample, const FitConfig& config = {},
                  const Ar1Params* warm = nullptr);

/// Fit the heteroscedastic Gaussian model by minimum CRPS, profiling theta
/// over the config grid (smallest theta wins ties).
FitResult fit_gauss(const ErrorSample& sample, const FitConfig& config = {},
                    GaussWarmState* warm = nullptr);

/// Fit the quantile-regression model exactly (linear-program structure) at
/// the given levels; theta minimizes the tick loss summed over levels.
FitResult fit_qr(const ErrorSample& sample, const FitConfig& config = {},
                 const std::vector<double>& levels = {0.1, 0.9},
                 QrWarmState* warm = nullptr);

namespace qr {

/// Exact solution of min_{b0,b1} sum_i tick(alpha, b0 + b1*x[i], y[i]).
struct Line {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double loss = 0.0;
    bool slope_unidentified = false;  ///< all x equal; beta1 fixed at 0
};

/// Exact minimizer. The profiled objective min_b0 sum tick(...) is convex
/// piecewise linear in the slope with kinks at pairwise slopes
/// (y_j - y_i)/(x_j - x_i); a subgradient bisection brackets the optimum,
/// and the few candidate kinks inside the final bracket are evaluated
/// exhaustively. Warm slope hints are checked first and returned directly
/// when already optimal; they can never change the minimal loss.
Line solve_level(const std::vector<double>& x, const std::vector<double>& y,
                 double alpha, const double* warm_slope = nullptr,
                 const double* warm_slope2 = nullptr);

/// Convenience wrapper owning its own slope pool.
Line solve(const std::vector<double>& x, const std::vector<double>& y, double alpha);

}  // namespace qr

}  // namespace fepi
