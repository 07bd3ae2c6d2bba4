#include "fepi/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fepi/errors.hpp"
#include "fepi/optim.hpp"

namespace fepi {

std::vector<double> FitConfig::default_theta_grid() {
    std::vector<double> grid;
    for (double t = 5.0; t <= 20.0 + 1e-9; t += 0.5) grid.push_back(t);
    return grid;
}

std::vector<double> FitConfig::thetas() const {
    std::vector<double> values;
    if (theta_mode == ThetaMode::fixed) {
        values = {theta_fixed};
    } else {
        if (theta_grid.empty())
            throw std::invalid_argument("FitConfig: empty theta grid");
        values = theta_grid;
    }
    for (const double theta : values)
        if (!(theta >= 5.0 && theta <= 20.0))
            throw std::invalid_argument(
                "FitConfig: leveling horizon must lie in [5, 20], got " +
                std::to_string(theta));
    return values;
}

double FitResult::theta() const {
    if (std::holds_alternative<GaussParams>(params))
        return std::get<GaussParams>(params).theta;
    if (std::holds_alternative<QrParams>(params))
        return std::get<QrParams>(params).theta;
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

void check_sample(const ErrorSample& sample) {
    if (sample.empty()) throw std::invalid_argument("fit: empty training sample");
    double max_abs = 0.0;
    for (const auto& obs : sample) {
        if (obs.horizon < 0.0)
            throw std::invalid_argument("fit: negative horizon in training sample");
        max_abs = std::max(max_abs, std::abs(obs.error));
    }
    if (max_abs == 0.0)
        throw NumericError("fit: degenerate sample, all errors are zero");
}

bool all_horizons_equal(const ErrorSample& sample) {
    for (const auto& obs : sample)
        if (obs.horizon != sample.front().horizon) return false;
    return true;
}

double sample_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = sample_mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// AR(1) model, minimum CRPS over (rho, tau)
// ---------------------------------------------------------------------------

namespace {

/// Precomputed horizon lookup: each case maps to one or two integer table
/// slots (the half-grid average).
struct HorizonIndex {
    std::vector<int> lo, hi;
    int h_max = 1;
};

HorizonIndex index_horizons(const ErrorSample& sample) {
    HorizonIndex idx;
    idx.lo.reserve(sample.size());
    idx.hi.reserve(sample.size());
    for (const auto& obs : sample) {
        const double h = obs.horizon;
        const double twice = h * 2.0;
        if (h < 0.0 || std::abs(twice - std::round(twice)) > 1e-9)
            throw std::invalid_argument(
                "fit_ar1: horizons must lie on the half-month grid");
        const int lo = static_cast<int>(std::floor(h + 1e-9));
        const int hi = static_cast<int>(std::ceil(h - 1e-9));
        idx.lo.push_back(lo);
        idx.hi.push_back(hi);
        idx.h_max = std::max(idx.h_max, hi);
    }
    return idx;
}

}  // namespace

FitResult fit_ar1(const ErrorSample& sample, const FitConfig& config,
                  const Ar1Params* warm) {
    check_sample(sample);
    const HorizonIndex idx = index_horizons(sample);
    const std::size_t n = sample.size();

    std::vector<double> errors(n);
    for (std::size_t i = 0; i < n; ++i) errors[i] = sample[i].error;

    int evals = 0;
    auto objective = [&](const std::vector<double>& p) {
        ++evals;
        const double rho = p[0], tau = p[1];
        const std::vector<double> unit = detail::unit_sigma_table(rho, idx.h_max);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = idx.lo[i] == idx.hi[i]
                                 ? unit[static_cast<std::size_t>(idx.lo[i])]
                                 : 0.5 * (unit[static_cast<std::size_t>(idx.lo[i])] +
                                          unit[static_cast<std::size_t>(idx.hi[i])]);
            acc += crps_gaussian(0.0, tau * u, errors[i]);
        }
        return acc / static_cast<double>(n);
    };

    // Short-horizon sd pins the scale of the tau starts.
    std::vector<double> short_errors;
    std::vector<double> short_horizons;
    for (const auto& obs : sample)
        if (obs.horizon <= 12.0) {
            short_errors.push_back(obs.error);
            short_horizons.push_back(obs.horizon);
        }
    if (short_errors.size() < 5) {
        short_errors = errors;
        short_horizons.clear();
        for (const auto& obs : sample) short_horizons.push_back(obs.horizon);
    }
    double s_short = sample_sd(short_errors);
    if (s_short <= 0.0) s_short = sample_sd(errors);
    if (s_short <= 0.0) s_short = 1.0;
    std::nth_element(short_horizons.begin(),
                     short_horizons.begin() + static_cast<std::ptrdiff_t>(short_horizons.size() / 2),
                     short_horizons.end());
    double h_ref = std::max(1.0, short_horizons[short_horizons.size() / 2]);
    h_ref = std::round(h_ref * 2.0) / 2.0;

    const double sd_all = std::max(sample_sd(errors), 1e-3);
    Bounds bounds{{0.0, 1e-6}, {0.99, 10.0 * sd_all + 1.0}};

    std::vector<std::vector<double>> starts;
    if (warm) starts.push_back(bounds.clamp({warm->rho, std::sqrt(warm->tau2)}));
    for (double rho0 : {0.1, 0.5, 0.9}) {
        const double unit = sigma_h_halfgrid(Ar1Params{rho0, 1.0}, h_ref);
        starts.push_back({rho0, std::clamp(s_short / std::max(unit, 1e-6),
                                           bounds.lower[1], bounds.upper[1])});
    }

    MinimizeOptions opt;
    // Warm starts substitute for the perturbed restarts.
    opt.restarts = warm ? static_cast<int>(starts.size())
                        : std::max<int>(config.optimizer_restarts,
                                        static_cast<int>(starts.size()));
    opt.tolerance = config.tolerance;
    MinimizeResult best = minimize(objective, starts, bounds, opt);

    FitResult result;
    result.params = Ar1Params{best.argmin[0], best.argmin[1] * best.argmin[1]};
    result.train_objective = best.value;
    result.diagnostics.objective_evaluations = evals;
    result.diagnostics.simplex_runs = best.runs;
    result.diagnostics.restart_values = best.restart_values;
    result.diagnostics.single_horizon = all_horizons_equal(sample);
    return result;
}

// ---------------------------------------------------------------------------
// Gaussian model, minimum CRPS over (mu, gamma0, gamma1), theta profiled
// ---------------------------------------------------------------------------

namespace {

/// Moment-based start: mu from the mean error, (gamma0, gamma1) from a
/// least-squares fit of |e - mean|*sqrt(pi/2) on min(h, theta).
std::vector<double> gauss_start(const std::vector<double>& x, const std::vector<double>& e,
                                const Bounds& bounds) {
    const double mu0 = sample_mean(e);
    const double root_half_pi = std::sqrt(std::acos(-1.0) / 2.0);
    std::vector<double> z(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) z[i] = std::abs(e[i] - mu0) * root_half_pi;
    const double xbar = sample_mean(x), zbar = sample_mean(z);
    double sxx = 0.0, sxz = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxz += (x[i] - xbar) * (z[i] - zbar);
    }
    const double slope = sxx > 0.0 ? sxz / sxx : 0.0;
    const double intercept = zbar - slope * xbar;
    std::vector<double> start{mu0, std::max(intercept, 1e-3), std::max(slope, 0.0)};
    return bounds.clamp(std::move(start));
}

}  // namespace

FitResult fit_gauss(const ErrorSample& sample, const FitConfig& config,
                    GaussWarmState* warm) {
    check_sample(sample);
    const std::size_t n = sample.size();
    std::vector<double> errors(n), horizons(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (sample[i].horizon < 0.0)
            throw std::invalid_argument("fit_gauss: negative horizon");
        errors[i] = sample[i].error;
        horizons[i] = sample[i].horizon;
    }

    const double mu0 = sample_mean(errors);
    const double sd = std::max(sample_sd(errors), 1e-3);
    Bounds bounds{{mu0 - 10.0 * sd - 1.0, 1e-6, 0.0},
                  {mu0 + 10.0 * sd + 1.0, 10.0 * sd + 1.0, 5.0 * sd + 1.0}};

    int evals = 0;
    std::vector<double> x(n);
    auto objective = [&](const std::vector<double>& p) {
        ++evals;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += crps_gaussian(p[0], p[1] + p[2] * x[i], errors[i]);
        return acc / static_cast<double>(n);
    };

    const std::vector<double> thetas = config.thetas();
    const bool use_warm = warm && warm->argmin_by_theta.size() == thetas.size();
    if (warm && !use_warm)
        warm->argmin_by_theta.assign(thetas.size(), {});

    std::vector<ThetaProfilePoint> profile;
    profile.reserve(thetas.size());
    std::vector<double> best_x;  // argmin at the incumbent theta
    double best_obj = std::numeric_limits<double>::infinity();
    double best_theta = thetas.front();
    std::vector<double> prev_argmin;
    int total_runs = 0;
    std::vector<double> restart_values;

    MinimizeOptions opt;
    opt.tolerance = config.tolerance;

    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const double theta = thetas[k];
        for (std::size_t i = 0; i < n; ++i) x[i] = std::min(horizons[i], theta);

        // The CRPS objective is jointly convex in (mu, gamma0, gamma1):
        // the full multistart runs once per fit, warm-started grid points
        // need a single simplex run.
        std::vector<std::vector<double>> starts;
        if (use_warm && !warm->argmin_by_theta[k].empty())
            starts.push_back(warm->argmin_by_theta[k]);
        else if (!prev_argmin.empty())
            starts.push_back(prev_argmin);
        const bool cold = starts.empty();
        if (cold) starts.push_back(gauss_start(x, errors, bounds));
        opt.restarts = cold ? config.optimizer_restarts : 1;
        opt.initial_step = cold ? 0.10 : 0.005;

        MinimizeResult res = minimize(objective, starts, bounds, opt);
        total_runs += res.runs;
        profile.push_back({theta, res.value});
        if (res.value < best_obj) {
            best_obj = res.value;
            best_theta = theta;
            best_x = res.argmin;
        }
        prev_argmin = res.argmin;
        if (warm) warm->argmin_by_theta[k] = res.argmin;
        if (thetas.size() == 1) restart_values = res.restart_values;
    }

    // Polish the selected theta from its own argmin plus a fresh start.
    if (thetas.size() > 1) {
        const double theta = best_theta;
        for (std::size_t i = 0; i < n; ++i) x[i] = std::min(horizons[i], theta);
        std::vector<std::vector<double>> starts{best_x, gauss_start(x, errors, bounds)};
        opt.restarts = 2;
        opt.initial_step = 0.02;
        MinimizeResult res = minimize(objective, starts, bounds, opt);
        total_runs += res.runs;
        restart_values = res.restart_values;
        if (res.value < best_obj) {
            best_obj = res.value;
            best_x = res.argmin;
            for (auto& point : profile)
                if (point.theta == best_theta)
                    point.objective = std::min(point.objective, res.value);
        }
    }

    FitResult result;
    result.params = GaussParams{best_x[0], best_x[1], best_x[2], best_theta};
    result.train_objective = best_obj;
    result.theta_profile = std::move(profile);
    result.diagnostics.objective_evaluations = evals;
    result.diagnostics.simplex_runs = total_runs;
    result.diagnostics.restart_values = std::move(restart_values);
    result.diagnostics.single_horizon = all_horizons_equal(sample);
    return result;
}

// ---------------------------------------------------------------------------
// Exact quantile regression
// ---------------------------------------------------------------------------

namespace qr {

namespace {

/// Index of the tick-loss-optimal intercept among n sorted residuals:
/// the ceil(n*alpha)-th order statistic (1-based), with a guard for
/// floating products that should be integers.
std::size_t quantile_rank(std::size_t n, double alpha) {
    const double na = static_cast<double>(n) * alpha;
    std::size_t k = static_cast<std::size_t>(std::ceil(na - 1e-9));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return k;
}

/// Whether n*alpha is (numerically) an integer, in which case the optimal
/// intercept is a whole interval [r_(k), r_(k+1)].
bool rank_is_interval(std::size_t n, double alpha) {
    const double na = static_cast<double>(n) * alpha;
    return std::abs(na - std::round(na)) <= 1e-9;
}

enum class Side { left, contains, right };

/// Exact one-sided subgradient range of the beta0-profiled objective at
/// slope s, plus the objective value there. The optimum lies left/right of
/// s, or s itself is optimal (`contains`).
Side side_of_slope(const std::vector<double>& x, const std::vector<double>& y,
                   double alpha, double s, double* loss_out, double* beta0_out) {
    const std::size_t n = x.size();
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - s * x[i];
    std::vector<double> part = r;
    const std::size_t k = quantile_rank(n, alpha);
    std::nth_element(part.begin(), part.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     part.end());
    const double b1 = part[k - 1];
    double b2 = b1;
    if (rank_is_interval(n, alpha) && k < n)
        b2 = *std::min_element(part.begin() + static_cast<std::ptrdiff_t>(k), part.end());

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss += tick_loss(alpha, b1 + s * x[i], y[i]);
    if (loss_out) *loss_out = loss;
    if (beta0_out) *beta0_out = b1;

    double d_lo = std::numeric_limits<double>::infinity();
    double d_hi = -std::numeric_limits<double>::infinity();
    // Residuals within a few ulps of the pivot count as ties; at a
    // float-rounded vertex the interpolated points differ by one ulp.
    constexpr double tie_eps = 8.0 * std::numeric_limits<double>::epsilon();
    for (double b : {b1, b2}) {
        double base = 0.0;
        std::vector<double> tie_coef;  // -x for ties
        std::size_t n_above = 0, n_below = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double tol = tie_eps * (std::abs(r[i]) + std::abs(b));
            if (std::abs(r[i] - b) <= tol) {
                tie_coef.push_back(-x[i]);
            } else if (r[i] > b) {
                base += -x[i] * alpha;
                ++n_above;
            } else {
                base += x[i] * (1.0 - alpha);
                ++n_below;
            }
        }
        // Tie weights u_i in [alpha-1, alpha] must sum to the budget that
        // keeps b optimal for the intercept.
        const double budget = -(alpha * static_cast<double>(n_above) +
                                (alpha - 1.0) * static_cast<double>(n_below));
        std::sort(tie_coef.begin(), tie_coef.end());
        auto extreme = [&](bool maximize) {
            // Raisable mass above the lower weight bound alpha-1.
            double total = budget - (alpha - 1.0) * static_cast<double>(tie_coef.size());
            total = std::clamp(total, 0.0, static_cast<double>(tie_coef.size()));
            double value = 0.0;
            for (double c : tie_coef) value += c * (alpha - 1.0);
            // Raise weights on the most favorable coefficients first.
            if (maximize) {
                for (auto it = tie_coef.rbegin(); it != tie_coef.rend() && total > 0.0; ++it) {
                    const double take = std::min(total, 1.0);
                    value += *it * take;
                    total -= take;
                }
            } else {
                for (auto it = tie_coef.begin(); it != tie_coef.end() && total > 0.0; ++it) {
                    const double take = std::min(total, 1.0);
                    value += *it * take;
                    total -= take;
                }
            }
            return value;
        };
        d_lo = std::min(d_lo, base + extreme(false));
        d_hi = std::max(d_hi, base + extreme(true));
        if (b2 == b1) break;
    }
    if (d_hi < 0.0) return Side::right;
    if (d_lo > 0.0) return Side::left;
    return Side::contains;
}

/// Objective at slope s with the exact optimal intercept.
Line line_at_slope(const std::vector<double>& x, const std::vector<double>& y,
                   double alpha, double s) {
    const std::size_t n = x.size();
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - s * x[i];
    const std::size_t k = quantile_rank(n, alpha);
    std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k - 1), r.end());
    const double b = r[k - 1];
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss += tick_loss(alpha, b + s * x[i], y[i]);
    return Line{b, s, loss, false};
}

Line intercept_only(const std::vector<double>& y, double alpha) {
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    const double b = sorted[quantile_rank(y.size(), alpha) - 1];
    double loss = 0.0;
    for (double v : y) loss += tick_loss(alpha, b, v);
    return Line{b, 0.0, loss, true};
}

}  // namespace

namespace {

/// Pairwise slopes within [lo, hi], deduplicated and sorted. The range
/// check multiplies through by the (positive) regressor gap so the
/// division only happens for accepted pairs.
std::vector<double> slopes_in_range(const std::vector<double>& x,
                                    const std::vector<double>& y, double lo,
                                    double hi) {
    std::vector<double> out;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double xi = x[i], yi = y[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[j] - xi;
            const double dy = y[j] - yi;
            if (dx > 0.0) {
                if (dy >= lo * dx && dy <= hi * dx) out.push_back(dy / dx);
            } else if (dx < 0.0) {
                if (dy <= lo * dx && dy >= hi * dx) out.push_back(dy / dx);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Best line among the candidate slopes (ties keep the smaller slope).
Line best_over_slopes(const std::vector<double>& x, const std::vector<double>& y,
                      double alpha, const std::vector<double>& candidates) {
    Line best;
    best.loss = std::numeric_limits<double>::infinity();
    for (const double s : candidates) {
        const Line cand = line_at_slope(x, y, alpha, s);
        if (cand.loss < best.loss) best = cand;
    }
    return best;
}

}  // namespace

Line solve_level(const std::vector<double>& x, const std::vector<double>& y,
                 double alpha, const double* warm_slope, const double* warm_slope2) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("qr::solve_level: bad input sizes");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("qr::solve_level: level must lie in (0, 1)");

    const bool all_equal =
        std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
    if (all_equal) return intercept_only(y, alpha);

    // Every candidate slope satisfies |s| <= (y range)/(smallest gap
    // between distinct regressor values).
    std::vector<double> xs = x;
    std::sort(xs.begin(), xs.end());
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] != xs[i - 1]) min_gap = std::min(min_gap, xs[i] - xs[i - 1]);
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    const double bound = (*ymax - *ymin) / min_gap + 1.0;
    double lo = -bound, hi = bound;

    // Warm hints either hit the optimum outright or clip the bracket.
    for (const double* hint : {warm_slope, warm_slope2}) {
        if (!hint || !std::isfinite(*hint) || *hint <= lo || *hint >= hi) continue;
        double loss = 0.0, beta0 = 0.0;
        const Side side = side_of_slope(x, y, alpha, *hint, &loss, &beta0);
        if (side == Side::contains) return Line{beta0, *hint, loss, false};
        if (side == Side::right)
            lo = *hint;
        else
            hi = *hint;
    }

    // Bisect until the bracket is narrow enough that few kinks remain.
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;  // bracket at float resolution
        double loss = 0.0, beta0 = 0.0;
        const Side side = side_of_slope(x, y, alpha, mid, &loss, &beta0);
        if (side == Side::contains) return Line{beta0, mid, loss, false};
        if (side == Side::right)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 2e-4 * (1.0 + std::abs(lo) + std::abs(hi))) break;
    }

    const double pad = 16.0 * std::numeric_limits<double>::epsilon() *
                       (1.0 + std::abs(lo) + std::abs(hi));
    std::vector<double> candidates = slopes_in_range(x, y, lo - pad, hi + pad);
    if (candidates.size() > 2048) {
        // Pathologically clustered kinks: rank-bisect the small candidate
        // set, which is exact.
        std::size_t a = 0, b = candidates.size();
        while (b - a > 48) {
            const std::size_t mid = a + (b - a) / 2;
            double loss = 0.0, beta0 = 0.0;
            const Side side = side_of_slope(x, y, alpha, candidates[mid], &loss, &beta0);
            if (side == Side::contains) return Line{beta0, candidates[mid], loss, false};
            if (side == Side::right)
                a = mid + 1;
            else
                b = mid;
        }
        if (a < b)
            candidates.assign(candidates.begin() + static_cast<std::ptrdiff_t>(a),
                              candidates.begin() + static_cast<std::ptrdiff_t>(b));
    }
    if (candidates.empty())  // numerical corner, never expected
        candidates = slopes_in_range(x, y, -bound, bound);
    return best_over_slopes(x, y, alpha, candidates);
}

Line solve(const std::vector<double>& x, const std::vector<double>& y, double alpha) {
    return solve_level(x, y, alpha);
}

}  // namespace qr

FitResult fit_qr(const ErrorSample& sample, const FitConfig& config,
                 const std::vector<double>& levels, QrWarmState* warm) {
    check_sample(sample);
    if (levels.empty()) throw std::invalid_argument("fit_qr: no quantile levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0 && levels[i] < 1.0))
            throw std::invalid_argument("fit_qr: levels must lie in (0, 1)");
        if (i > 0 && !(levels[i] > levels[i - 1]))
            throw std::invalid_argument("fit_qr: levels must be strictly increasing");
    }

    const std::size_t n = sample.size();
    std::vector<double> errors(n), horizons(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (sample[i].horizon < 0.0)
            throw std::invalid_argument("fit_qr: negative horizon");
        errors[i] = sample[i].error;
        horizons[i] = sample[i].horizon;
    }

    const std::vector<double> thetas = config.thetas();
    std::vector<ThetaProfilePoint> profile;
    profile.reserve(thetas.size());

    const bool use_warm = warm && warm->slope_by_theta.size() == thetas.size();
    if (warm && !use_warm)
        warm->slope_by_theta.assign(
            thetas.size(),
            std::vector<double>(levels.size(), std::numeric_limits<double>::quiet_NaN()));

    double best_obj = std::numeric_limits<double>::infinity();
    double best_theta = thetas.front();
    std::vector<qr::Line> best_lines;
    std::vector<double> prev_slopes(levels.size(),
                                    std::numeric_limits<double>::quiet_NaN());

    std::vector<double> x(n);
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const double theta = thetas[k];
        for (std::size_t i = 0; i < n; ++i) x[i] = std::min(horizons[i], theta);
        double total = 0.0;
        std::vector<qr::Line> lines;
        lines.reserve(levels.size());
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const double* state_hint =
                use_warm && warm->slope_by_theta[k].size() == levels.size()
                    ? &warm->slope_by_theta[k][l]
                    : nullptr;
            qr::Line line =
                qr::solve_level(x, errors, levels[l], state_hint, &prev_slopes[l]);
            total += line.loss;
            prev_slopes[l] = line.beta1;
            if (warm) warm->slope_by_theta[k][l] = line.beta1;
            lines.push_back(line);
        }
        profile.push_back({theta, total});
        if (total < best_obj) {
            best_obj = total;
            best_theta = theta;
            best_lines = std::move(lines);
        }
    }

    QrParams params;
    params.theta = best_theta;
    params.levels = levels;
    bool unidentified = false;
    for (const qr::Line& line : best_lines) {
        params.coeffs.push_back({line.beta0, line.beta1});
        unidentified = unidentified || line.slope_unidentified;
    }

    FitResult result;
    result.params = std::move(params);
    result.train_objective = best_obj;
    result.theta_profile = std::move(profile);
    result.diagnostics.single_horizon = all_horizons_equal(sample) || unidentified;
    return result;
}

}  // namespace fepi
