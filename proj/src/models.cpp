#include "fepi/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "fepi/errors.hpp"

namespace fepi {

namespace {
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
constexpr double kInvSqrtPi = 0.5641895835477562869;   // 1/sqrt(pi)
constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)
constexpr double kInvSqrt2 = 0.7071067811865475244;    // 1/sqrt(2)
}  // namespace

double normal_quantile(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("normal_quantile: level must lie in (0, 1), got " +
                                    std::to_string(alpha));
    // Evaluate on the lower tail and reflect, keeping q(a) = -q(1-a) tight.
    if (alpha > 0.5) return -boost::math::quantile(kStdNormal, 1.0 - alpha);
    return boost::math::quantile(kStdNormal, alpha);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double GaussParams::sigma(double h) const {
    if (h < 0.0) throw std::invalid_argument("GaussParams::sigma: horizon must be >= 0");
    const double s = gamma0 + gamma1 * std::min(h, theta);
    if (!(s > 0.0))
        throw NumericError("GaussParams: implied sd is nonpositive at h = " +
                           std::to_string(h));
    return s;
}

double ar1_quantile(const Ar1Params& params, double h, double alpha) {
    return normal_quantile(alpha) * sigma_h_halfgrid(params, h);
}

double gauss_quantile(const GaussParams& params, double h, double alpha) {
    return params.mu + normal_quantile(alpha) * params.sigma(h);
}

double qr_quantile(const QrParams& params, double h, double alpha) {
    if (h < 0.0) throw std::invalid_argument("qr_quantile: horizon must be >= 0");
    for (std::size_t i = 0; i < params.levels.size(); ++i) {
        if (std::abs(params.levels[i] - alpha) <= 1e-9) {
            const QrParams::Coeff& c = params.coeffs.at(i);
            return c.beta0 + c.beta1 * std::min(h, params.theta);
        }
    }
    throw std::invalid_argument("qr_quantile: no coefficients fitted for level " +
                                std::to_string(alpha));
}

namespace {
double quantile_of(const Ar1Params& m, double h, double a) { return ar1_quantile(m, h, a); }
double quantile_of(const GaussParams& m, double h, double a) { return gauss_quantile(m, h, a); }
double quantile_of(const QrParams& m, double h, double a) { return qr_quantile(m, h, a); }
}  // namespace

double model_quantile(const ModelParams& model, double h, double alpha) {
    return std::visit(
        [&](const auto& m) { return quantile_of(m, h, alpha); }, model);
}

IntervalForecast central_interval(const ModelParams& model, double h,
                                  double nominal_level) {
    if (!(nominal_level > 0.0 && nominal_level < 1.0))
        throw std::invalid_argument("central_interval: level must lie in (0, 1)");
    const double alpha_lo = (1.0 - nominal_level) / 2.0;
    const double alpha_hi = (1.0 + nominal_level) / 2.0;
    double lo = model_quantile(model, h, alpha_lo);
    double hi = model_quantile(model, h, alpha_hi);
    IntervalForecast iv;
    iv.nominal_level = nominal_level;
    if (lo > hi) {
        std::swap(lo, hi);
        iv.crossed = true;
    }
    iv.lower = lo;
    iv.upper = hi;
    return iv;
}

double crps_gaussian(double mu, double sigma, double y) {
    if (sigma < 0.0)
        throw std::invalid_argument("crps_gaussian: sigma must be >= 0, got " +
                                    std::to_string(sigma));
    if (sigma == 0.0) return std::abs(y - mu);
    const double z = (y - mu) / sigma;
    return sigma * (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z) - kInvSqrtPi);
}

double tick_loss(double alpha, double q, double y) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("tick_loss: level must lie in (0, 1)");
    return (y - q) * (alpha - (y < q ? 1.0 : 0.0));
}

}  // namespace fepi
