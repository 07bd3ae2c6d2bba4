#include "fepi/ar1.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fepi/rng.hpp"

namespace fepi {

void Ar1Params::validate() const {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("Ar1Params: rho must lie in [0, 1), got " +
                                    std::to_string(rho));
    if (!(tau2 > 0.0))
        throw std::invalid_argument("Ar1Params: tau2 must be positive, got " +
                                    std::to_string(tau2));
}

std::vector<int> ErrorSampleDesign::default_horizons() {
    std::vector<int> h(24);
    for (int i = 0; i < 24; ++i) h[i] = i + 1;
    return h;
}

void ErrorSampleDesign::validate() const {
    if (n < 1) throw std::invalid_argument("ErrorSampleDesign: n must be >= 1");
    if (t_max < 1) throw std::invalid_argument("ErrorSampleDesign: t_max must be >= 1");
    if (horizon_set.empty())
        throw std::invalid_argument("ErrorSampleDesign: horizon_set is empty");
    for (int h : horizon_set)
        if (h < 1 || h > 24)
            throw std::invalid_argument(
                "ErrorSampleDesign: horizons must lie in [1, 24], got " +
                std::to_string(h));
}

Matrix accumulation_matrix(double rho, std::size_t length) {
    if (length == 0)
        throw std::invalid_argument("accumulation_matrix: dimension must be >= 1");
    Matrix a(length, length);
    for (std::size_t r = 0; r < length; ++r) {
        double p = 1.0;
        for (std::size_t k = 0; k <= r; ++k) {  // column r-k
            a(r, r - k) = p;
            p *= rho;
        }
    }
    return a;
}

std::vector<double> kappa_weights(double rho, std::size_t h) {
    std::vector<double> w(h);
    double geo = 0.0;  // sum_{l=0}^{j-1} rho^l
    double p = 1.0;    // rho^j
    for (std::size_t j = 0; j < h && j < 12; ++j) {
        geo += p;
        p *= rho;
        w[j] = geo;
    }
    double tail = geo;  // full 12-month sum once j >= 12
    for (std::size_t j = 12; j < h; ++j) {
        tail *= rho;
        w[j] = tail;
    }
    return w;
}

namespace detail {
std::vector<double> unit_sigma_table(double rho, int h_max) {
    std::vector<double> table(static_cast<std::size_t>(h_max) + 1, 0.0);
    const std::vector<double> w = kappa_weights(rho, static_cast<std::size_t>(h_max));
    double acc = 0.0;
    for (int h = 1; h <= h_max; ++h) {
        acc += w[static_cast<std::size_t>(h - 1)] * w[static_cast<std::size_t>(h - 1)];
        table[static_cast<std::size_t>(h)] = std::sqrt(acc);
    }
    return table;
}
}  // namespace detail

double sigma_h(const Ar1Params& params, int h) {
    params.validate();
    if (h < 0) throw std::invalid_argument("sigma_h: horizon must be >= 0");
    if (h == 0) return 0.0;
    const std::vector<double> w = kappa_weights(params.rho, static_cast<std::size_t>(h));
    double acc = 0.0;
    for (double v : w) acc += v * v;
    return std::sqrt(params.tau2 * acc);
}

double sigma_h_halfgrid(const Ar1Params& params, double h) {
    if (h < 0.0) throw std::invalid_argument("sigma_h_halfgrid: horizon must be >= 0");
    const double twice = h * 2.0;
    if (std::abs(twice - std::round(twice)) > 1e-9)
        throw std::invalid_argument(
            "sigma_h_halfgrid: horizon must be a multiple of 0.5, got " +
            std::to_string(h));
    const int lo = static_cast<int>(std::floor(h + 1e-9));
    const int hi = static_cast<int>(std::ceil(h - 1e-9));
    if (lo == hi) return sigma_h(params, lo);
    return 0.5 * (sigma_h(params, lo) + sigma_h(params, hi));
}

std::vector<double> kappa_vector(double rho, int t, int h, int t_max,
                                 std::size_t total_months) {
    if (h < 1 || h > 24)
        throw std::invalid_argument("kappa_vector: horizon must lie in [1, 24]");
    if (t < 1 || t > t_max)
        throw std::invalid_argument("kappa_vector: target year out of range");
    const std::size_t offset = static_cast<std::size_t>(t_max - t) * 12;
    if (total_months < offset + static_cast<std::size_t>(h))
        throw std::invalid_argument(
            "kappa_vector: shock vector too short for requested placement");
    std::vector<double> kappa(total_months, 0.0);
    const std::vector<double> w = kappa_weights(rho, static_cast<std::size_t>(h));
    for (std::size_t j = 0; j < w.size(); ++j) kappa[offset + j] = w[j];
    return kappa;
}

double analytic_error_covariance(double rho, double tau2, int t1, int h1, int t2,
                                 int h2) {
    Ar1Params{rho, tau2}.validate();
    if (h1 < 1 || h1 > 24 || h2 < 1 || h2 > 24)
        throw std::invalid_argument(
            "analytic_error_covariance: horizons must lie in [1, 24]");
    if (t2 < t1)
        throw std::invalid_argument("analytic_error_covariance: requires t2 >= t1");
    const int lag_months = 12 * (t2 - t1);
    if (lag_months >= h2) return 0.0;  // windows do not overlap
    const int overlap = std::min(h1, h2 - lag_months);
    const std::vector<double> w =
        kappa_weights(rho, static_cast<std::size_t>(h2));  // covers j + lag
    double acc = 0.0;
    for (int j = 1; j <= overlap; ++j)
        acc += w[static_cast<std::size_t>(j - 1)] *
               w[static_cast<std::size_t>(j + lag_months - 1)];
    return tau2 * acc;
}

ErrorSample simulate_errors(const Ar1Params& params, const ErrorSampleDesign& design) {
    MonthlyPath unused;
    return simulate_errors(params, design, unused);
}

ErrorSample simulate_errors(const Ar1Params& params, const ErrorSampleDesign& design,
                            MonthlyPath& path_out) {
    params.validate();
    design.validate();
    const std::size_t lead = 24;  // months before year 1, enough for h <= 24
    const std::size_t total = lead + static_cast<std::size_t>(design.t_max) * 12;

    Rng rng(design.seed);
    std::normal_distribution<double> shock(0.0, std::sqrt(params.tau2));

    // Forward pass: stationary start, then y_m = rho*y_{m-1} + eps_m.
    path_out.shocks.assign(total, 0.0);
    path_out.values.assign(total, 0.0);
    const double stat_sd = std::sqrt(params.tau2 / (1.0 - params.rho * params.rho));
    double prev = stat_sd * std::normal_distribution<double>(0.0, 1.0)(rng);
    for (std::size_t m = 0; m < total; ++m) {
        const double eps = shock(rng);
        path_out.shocks[m] = eps;
        path_out.values[m] = params.rho * prev + eps;
        prev = path_out.values[m];
    }

    // Reverse-time view of the shocks: entry 0 = last month of year t_max.
    std::vector<double> rev(total);
    for (std::size_t m = 0; m < total; ++m) rev[m] = path_out.shocks[total - 1 - m];

    const std::vector<double> weights = kappa_weights(params.rho, 24);

    std::uniform_int_distribution<int> year_draw(1, design.t_max);
    std::uniform_int_distribution<std::size_t> horizon_draw(0, design.horizon_set.size() - 1);

    ErrorSample sample;
    sample.reserve(design.n);
    for (std::size_t i = 0; i < design.n; ++i) {
        const int t = year_draw(rng);
        const int h = design.horizon_set[horizon_draw(rng)];
        const std::size_t offset = static_cast<std::size_t>(design.t_max - t) * 12;
        double err = 0.0;
        for (int j = 0; j < h; ++j)
            err += weights[static_cast<std::size_t>(j)] * rev[offset + static_cast<std::size_t>(j)];

        double annual = 0.0;  // realized annual rate of year t
        const std::size_t year_start = lead + static_cast<std::size_t>(t - 1) * 12;
        for (std::size_t m = year_start; m < year_start + 12; ++m)
            annual += path_out.values[m];

        ErrorObservation obs;
        obs.case_id = "sim" + std::to_string(i + 1);
        obs.target_year = t;
        obs.horizon = static_cast<double>(h);
        obs.error = err;
        obs.realization = annual;
        obs.point_forecast = annual - err;
        sample.push_back(std::move(obs));
    }
    return sample;
}

}  // namespace fepi
