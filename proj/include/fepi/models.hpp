#pragma once

#include <variant>
#include <vector>

#include "fepi/ar1.hpp"

namespace fepi {

/// Heteroscedastic Gaussian error model: error at horizon h is
/// N(mu, (gamma0 + gamma1*min(h, theta))^2).
struct GaussParams {
    double mu = 0.0;      ///< mean error (pp)
    double gamma0 = 0.5;  ///< base standard deviation (pp)
    double gamma1 = 0.0;  ///< sd slope (pp per month)
    double theta = 12.0;  ///< horizon where uncertainty levels off

    double sigma(double h) const;  ///< implied sd; throws if nonpositive
};

/// Quantile-regression error model: separate line beta0 + beta1*min(h,
/// theta) per quantile level, sharing the leveling horizon theta.
struct QrParams {
    struct Coeff {
        double beta0 = 0.0;
        double beta1 = 0.0;
    };
    double theta = 12.0;
    std::vector<double> levels;  ///< strictly increasing, each in (0, 1)
    std::vector<Coeff> coeffs;   ///< aligned with levels
};

/// Central prediction interval for a forecast error. `crossed` records that
/// the raw model quantiles had to be swapped to restore lower <= upper.
struct IntervalForecast {
    double lower = 0.0;
    double upper = 0.0;
    double nominal_level = 0.8;
    bool crossed = false;

    double length() const { return upper - lower; }
    bool covers(double y) const { return lower <= y && y <= upper; }
};

/// Any of the three estimable error models.
using ModelParams = std::variant<Ar1Params, GaussParams, QrParams>;

/// Quantile of the standard normal distribution; alpha in (0, 1).
double normal_quantile(double alpha);
double normal_cdf(double z);
double normal_pdf(double z);

/// Error quantile implied by the AR(1) model: z_alpha * sigma(h), with the
/// half-grid floor/ceiling averaging for non-integer horizons. Symmetric
/// around zero.
double ar1_quantile(const Ar1Params& params, double h, double alpha);

/// Error quantile of the Gaussian model: mu + z_alpha * sigma(h). Constant
/// in h beyond theta. Throws NumericError when the implied sd is
/// nonpositive.
double gauss_quantile(const GaussParams& params, double h, double alpha);

/// Fitted quantile line evaluated at min(h, theta). The level must be one
/// of the fitted ones; otherwise a missing-coefficient error is thrown.
double qr_quantile(const QrParams& params, double h, double alpha);

/// Quantile of `model` at (h, alpha), dispatching on the model kind.
double model_quantile(const ModelParams& model, double h, double alpha);

/// Central interval at the given nominal level: quantiles at (1 -/+
/// level)/2. Crossed raw quantiles are swapped and flagged.
IntervalForecast central_interval(const ModelParams& model, double h,
                                  double nominal_level);

/// Closed-form CRPS of N(mu, sigma^2) against outcome y; the point-mass
/// limit |y - mu| at sigma = 0. Throws for sigma < 0.
double crps_gaussian(double mu, double sigma, double y);

/// Tick (pinball) loss for quantile level alpha: (y - q)(alpha - 1{y < q}).
double tick_loss(double alpha, double q, double y);

}  // namespace fepi
