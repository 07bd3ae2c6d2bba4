#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fepi/errors.hpp"
#include "fepi/models.hpp"

using namespace fepi;

namespace {

// Test-local standard normal helpers built on libm only, independent of the
// production implementation.
double phi(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::acos(-1.0)); }
double Phi(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

// Inverse normal CDF by bisection, the independent quantile oracle.
double z_oracle(double alpha) {
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (Phi(mid) < alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// CRPS as the unweighted integral of quantile scores over all levels,
// computed by Simpson quadrature split at the kink.
double crps_by_quantile_integral(double mu, double sigma, double y) {
    const double t_star = (y - mu) / sigma;
    auto integrand = [&](double t) {
        const double alpha = std::clamp(Phi(t), 1e-300, 1.0 - 1e-16);
        return 2.0 * tick_loss(alpha, mu + sigma * t, y) * phi(t);
    };
    auto simpson = [&](double a, double b) {
        const int n = 4000;  // even
        const double h = (b - a) / n;
        double acc = integrand(a) + integrand(b);
        for (int i = 1; i < n; ++i) acc += integrand(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return acc * h / 3.0;
    };
    const double lo = std::min(-12.0, t_star - 1.0);
    const double hi = std::max(12.0, t_star + 1.0);
    return simpson(lo, t_star) + simpson(t_star, hi);
}

}  // namespace

TEST_CASE("normal quantile against the bisection oracle") {
    for (double alpha : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99})
        CHECK(normal_quantile(alpha) == doctest::Approx(z_oracle(alpha)).epsilon(1e-9));
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("ar1 quantiles") {
    const Ar1Params params{0.0, 0.1};
    CHECK(ar1_quantile(params, 7.5, 0.5) == 0.0);
    const double q = ar1_quantile(params, 12.0, 0.9);
    CHECK(q == doctest::Approx(z_oracle(0.9) * std::sqrt(1.2)).epsilon(1e-9));
    CHECK(q == doctest::Approx(1.4040).epsilon(2e-3));
    // Symmetry at complementary levels.
    const Ar1Params p2{0.6, 0.3};
    for (double alpha : {0.05, 0.1, 0.25})
        CHECK(ar1_quantile(p2, 9.5, alpha) ==
              doctest::Approx(-ar1_quantile(p2, 9.5, 1.0 - alpha)).epsilon(1e-13));
}

TEST_CASE("gauss quantiles") {
    GaussParams params;
    params.mu = 0.3;
    params.gamma0 = 0.4;
    params.gamma1 = 0.05;
    params.theta = 12.0;
    CHECK(gauss_quantile(params, 9.0, 0.5) == doctest::Approx(0.3).epsilon(1e-12));

    GaussParams p2{0.0, 0.5, 0.1, 12.0};
    CHECK(gauss_quantile(p2, 20.0, 0.9) ==
          doctest::Approx(z_oracle(0.9) * 1.7).epsilon(1e-9));
    CHECK(gauss_quantile(p2, 20.0, 0.9) == doctest::Approx(2.1787).epsilon(1e-3));
    // min(h, theta) saturates.
    CHECK(gauss_quantile(p2, 15.0, 0.8) == gauss_quantile(p2, 25.0, 0.8));

    GaussParams bad{0.0, 0.1, -0.05, 12.0};
    CHECK_THROWS_AS(gauss_quantile(bad, 10.0, 0.9), NumericError);
}

TEST_CASE("qr quantiles") {
    QrParams params;
    params.theta = 12.0;
    params.levels = {0.1, 0.9};
    params.coeffs = {{-1.0, -0.1}, {1.0, 0.2}};
    CHECK(qr_quantile(params, 6.0, 0.1) == doctest::Approx(-1.6).epsilon(1e-12));
    CHECK(qr_quantile(params, 12.0, 0.9) == qr_quantile(params, 17.0, 0.9));
    QrParams flat = params;
    flat.coeffs[1].beta1 = 0.0;
    CHECK(qr_quantile(flat, 3.0, 0.9) == qr_quantile(flat, 23.0, 0.9));
    CHECK_THROWS_AS(qr_quantile(params, 6.0, 0.25), std::invalid_argument);
}

TEST_CASE("central intervals") {
    GaussParams gauss{0.2, 0.3, 0.08, 12.0};
    const IntervalForecast iv = central_interval(gauss, 8.0, 0.8);
    const double sigma = 0.3 + 0.08 * 8.0;
    CHECK(iv.lower == doctest::Approx(0.2 - z_oracle(0.9) * sigma).epsilon(1e-9));
    CHECK(iv.upper == doctest::Approx(0.2 + z_oracle(0.9) * sigma).epsilon(1e-9));
    CHECK(!iv.crossed);

    const Ar1Params ar1{0.5, 0.1};
    const IntervalForecast iv2 = central_interval(ar1, 6.0, 0.8);
    CHECK(iv2.length() ==
          doctest::Approx(2.0 * ar1_quantile(ar1, 6.0, 0.9)).epsilon(1e-12));

    // Crossed fitted quantiles are swapped and flagged.
    QrParams crossed;
    crossed.theta = 12.0;
    crossed.levels = {0.1, 0.9};
    crossed.coeffs = {{0.5, 0.0}, {-0.5, 0.0}};
    const IntervalForecast iv3 = central_interval(crossed, 5.0, 0.8);
    CHECK(iv3.lower == -0.5);
    CHECK(iv3.upper == 0.5);
    CHECK(iv3.crossed);
}

TEST_CASE("gaussian crps closed form") {
    CHECK(crps_gaussian(0.0, 1.0, 0.0) == doctest::Approx(0.23370).epsilon(5e-4));
    CHECK(crps_gaussian(0.4, 0.0, -1.0) == doctest::Approx(1.4).epsilon(1e-12));
    // Positive homogeneity.
    for (double c : {0.5, 2.0, 7.0})
        CHECK(crps_gaussian(0.0, c * 0.8, c * 1.3) ==
              doctest::Approx(c * crps_gaussian(0.0, 0.8, 1.3)).epsilon(1e-12));
    CHECK_THROWS_AS(crps_gaussian(0.0, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("crps equals the quantile-score integral") {
    const double cases[][3] = {{0.0, 1.0, 0.0}, {0.3, 0.7, -0.2}, {-1.0, 2.0, 3.0},
                               {0.0, 0.2, 0.05}, {1.5, 1.0, 1.5}};
    for (const auto& c : cases) {
        const double closed = crps_gaussian(c[0], c[1], c[2]);
        const double integral = crps_by_quantile_integral(c[0], c[1], c[2]);
        CHECK(std::abs(closed - integral) < 1e-6);
    }
}

TEST_CASE("tick loss") {
    CHECK(tick_loss(0.9, 0.0, 1.0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(tick_loss(0.1, 1.0, 0.0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(tick_loss(0.37, 1.25, 1.25) == 0.0);
    CHECK(tick_loss(0.5, -1.0, 2.0) >= 0.0);
    CHECK_THROWS_AS(tick_loss(0.0, 0.0, 0.0), std::invalid_argument);
}
