#include "fepi/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fepi/errors.hpp"
#include "fepi/rng.hpp"

namespace fepi {

void Bounds::validate(std::size_t dim) const {
    if (lower.size() != dim || upper.size() != dim)
        throw std::invalid_argument("Bounds: dimension mismatch");
    for (std::size_t i = 0; i < dim; ++i)
        if (!(lower[i] <= upper[i]))
            throw std::invalid_argument("Bounds: lower > upper in coordinate " +
                                        std::to_string(i));
}

std::vector<double> Bounds::clamp(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::min(std::max(x[i], lower[i]), upper[i]);
    return x;
}

namespace {

struct Vertex {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
};

double safe_eval(const Objective& objective, const std::vector<double>& x, int& evals) {
    ++evals;
    const double f = objective(x);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
}

/// One Nelder-Mead run from `start`, projected onto the box.
Vertex simplex_run(const Objective& objective, const std::vector<double>& start,
                   const Bounds& bounds, const MinimizeOptions& opt, int& evals) {
    const std::size_t dim = start.size();
    std::vector<Vertex> simplex(dim + 1);
    simplex[0].x = bounds.clamp(start);
    simplex[0].f = safe_eval(objective, simplex[0].x, evals);
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> x = simplex[0].x;
        const double width = bounds.upper[i] - bounds.lower[i];
        double step = opt.initial_step * width;
        if (step == 0.0) step = 1e-8;
        if (x[i] + step > bounds.upper[i]) step = -step;  // step inward at the edge
        x[i] += step;
        simplex[i + 1].x = bounds.clamp(std::move(x));
        simplex[i + 1].f = safe_eval(objective, simplex[i + 1].x, evals);
    }

    const int max_iter = opt.max_iterations * static_cast<int>(dim);
    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    for (int iter = 0; iter < max_iter; ++iter) {
        std::sort(simplex.begin(), simplex.end(), by_value);
        const double spread = simplex.back().f - simplex.front().f;
        if (spread <= opt.tolerance * (1.0 + std::abs(simplex.front().f))) break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t v = 0; v < dim; ++v)
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v].x[i] / dim;

        const Vertex& worst = simplex.back();
        auto blend = [&](double coef) {
            std::vector<double> x(dim);
            for (std::size_t i = 0; i < dim; ++i)
                x[i] = centroid[i] + coef * (centroid[i] - worst.x[i]);
            return bounds.clamp(std::move(x));
        };

        Vertex reflected{blend(1.0), 0.0};
        reflected.f = safe_eval(objective, reflected.x, evals);
        if (reflected.f < simplex.front().f) {
            Vertex expanded{blend(2.0), 0.0};
            expanded.f = safe_eval(objective, expanded.x, evals);
            simplex.back() = expanded.f < reflected.f ? expanded : reflected;
            continue;
        }
        if (reflected.f < simplex[dim - 1].f) {
            simplex.back() = reflected;
            continue;
        }
        const bool outside = reflected.f < worst.f;
        Vertex contracted{blend(outside ? 0.5 : -0.5), 0.0};
        contracted.f = safe_eval(objective, contracted.x, evals);
        if (contracted.f < std::min(reflected.f, worst.f)) {
            simplex.back() = contracted;
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t v = 1; v <= dim; ++v) {
            for (std::size_t i = 0; i < dim; ++i)
                simplex[v].x[i] = 0.5 * (simplex[v].x[i] + simplex[0].x[i]);
            simplex[v].x = bounds.clamp(std::move(simplex[v].x));
            simplex[v].f = safe_eval(objective, simplex[v].x, evals);
        }
    }
    std::sort(simplex.begin(), simplex.end(), by_value);
    return simplex.front();
}

}  // namespace

MinimizeResult minimize(const Objective& objective,
                        const std::vector<std::vector<double>>& starts,
                        const Bounds& bounds, const MinimizeOptions& options) {
    if (starts.empty()) throw std::invalid_argument("minimize: no start points");
    const std::size_t dim = starts.front().size();
    bounds.validate(dim);
    for (const auto& s : starts)
        if (s.size() != dim) throw std::invalid_argument("minimize: start dimension mismatch");

    MinimizeResult result;

    // Run list: the given starts, then perturbed copies of them until
    // options.restarts runs are reached.
    std::vector<std::vector<double>> runs = starts;
    Rng rng(options.perturb_seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    while (static_cast<int>(runs.size()) < options.restarts) {
        std::vector<double> x = starts[runs.size() % starts.size()];
        for (std::size_t i = 0; i < dim; ++i)
            x[i] += options.perturb_scale * (bounds.upper[i] - bounds.lower[i]) * unit(rng);
        runs.push_back(bounds.clamp(std::move(x)));
    }

    result.value = std::numeric_limits<double>::infinity();
    for (const auto& start : runs) {
        Vertex best = simplex_run(objective, start, bounds, options, result.evaluations);
        result.restart_values.push_back(best.f);
        ++result.runs;
        if (best.f < result.value) {
            result.value = best.f;
            result.argmin = best.x;
        }
    }
    if (!std::isfinite(result.value))
        throw NumericError("minimize: objective is non-finite at every start point");
    return result;
}

MinimizeResult minimize(const Objective& objective, const std::vector<double>& start,
                        const Bounds& bounds, const MinimizeOptions& options) {
    return minimize(objective, std::vector<std::vector<double>>{start}, bounds, options);
}

}  // namespace fepi
