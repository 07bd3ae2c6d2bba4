#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fepi/types.hpp"

namespace fepi {

/// Parameters of the latent monthly AR(1) growth process: y_m = rho*y_{m-1}
/// + eps_m with iid N(0, tau2) shocks. The annual rate is the sum of the 12
/// monthly values.
struct Ar1Params {
    double rho = 0.0;   ///< persistence, 0 <= rho < 1
    double tau2 = 0.1;  ///< monthly shock variance, > 0

    void validate() const;
};

/// Sampling design for a simulated collection of forecast errors: n cases
/// with target years drawn uniformly from {1..t_max} and horizons drawn
/// uniformly from horizon_set.
struct ErrorSampleDesign {
    std::size_t n = 300;
    int t_max = 20;
    std::vector<int> horizon_set = default_horizons();
    std::uint64_t seed = 1;

    static std::vector<int> default_horizons();  // {1..24}
    void validate() const;
};

/// One simulated monthly path: shocks eps_m and values y_m = rho*y_{m-1} +
/// eps_m, in forward time order. values[0] includes the stationary start.
struct MonthlyPath {
    std::vector<double> shocks;
    std::vector<double> values;
};

/// Minimal dense row-major matrix, enough for the accumulation matrix and
/// its tests.
class Matrix {
  public:
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

  private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

/// Lower-triangular L x L matrix mapping the next L monthly shocks to the
/// corresponding multi-step forecast errors of the monthly process; element
/// (r, c) is rho^(r-c) for r >= c (0-based here, same values as 1-based).
/// Throws std::invalid_argument for L = 0.
Matrix accumulation_matrix(double rho, std::size_t length);

/// Shock-loading weights of an annual-rate forecast error in reverse time:
/// entry j (1-based) multiplies the shock j-1 months before the target
/// year's end. Independent of the horizon except for its length h.
/// weight(j) = sum_{l=0}^{j-1} rho^l for j <= 12, and decays by rho per
/// additional month beyond 12 (shocks before the target year only enter
/// through persistence).
std::vector<double> kappa_weights(double rho, std::size_t h);

/// Forecast-error standard deviation at integer horizon h (months). h = 0
/// returns 0 (year fully observed). Equals sqrt(tau2 * w'AA'w) where A is
/// the accumulation matrix and w picks the 12 target-year months (the last
/// min(h,12) of the h forecast steps).
double sigma_h(const Ar1Params& params, int h);

/// sigma at a half-month-grid horizon: integer horizons pass through,
/// half-integers average the two neighboring integer horizons.
double sigma_h_halfgrid(const Ar1Params& params, double h);

/// Row vector of length total_months such that error = kappa . shocks for
/// the reverse-time shock vector (entry 1 = last month of year t_max).
/// Requires 1 <= h <= 24 and total_months >= (t_max - t)*12 + h.
std::vector<double> kappa_vector(double rho, int t, int h, int t_max,
                                 std::size_t total_months);

/// Covariance of two forecast errors e_{t1,h1}, e_{t2,h2} (t2 >= t1) for
/// optimal forecasts under the AR(1) process. Zero whenever
/// 12*(t2 - t1) >= h2; horizons must lie in [1, 24].
double analytic_error_covariance(double rho, double tau2, int t1, int h1, int t2,
                                 int h2);

/// Simulate one monthly path covering design.t_max years plus 24 lead
/// months, then draw n forecast cases (t_i, h_i) uniformly and compute each
/// error as kappa . shocks, so within-year and neighboring-year error
/// correlations arise automatically. Deterministic given design.seed.
ErrorSample simulate_errors(const Ar1Params& params, const ErrorSampleDesign& design);

/// As simulate_errors, but also returns the simulated path (for tests and
/// diagnostics).
ErrorSample simulate_errors(const Ar1Params& params, const ErrorSampleDesign& design,
                            MonthlyPath& path_out);

namespace detail {
/// sigma_h(params, h) for all h = 0..h_max at tau = 1, via prefix sums of
/// squared kappa weights. Hot-path helper for estimation.
std::vector<double> unit_sigma_table(double rho, int h_max);
}  // namespace detail

}  // namespace fepi
