#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace fepi {

/// Axis-aligned box constraints for the derivative-free minimizer.
struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    void validate(std::size_t dim) const;
    std::vector<double> clamp(std::vector<double> x) const;
};

struct MinimizeOptions {
    int restarts = 5;          ///< total simplex runs (start + perturbed copies)
    double tolerance = 1e-8;   ///< stop when the simplex objective spread falls below
    int max_iterations = 400;  ///< per simplex run, scaled by dimension
    double initial_step = 0.10;     ///< simplex edge as a fraction of box width
    std::uint64_t perturb_seed = 0x9e3779b97f4a7c15ULL;
    double perturb_scale = 0.10;    ///< perturbation as a fraction of box width
};

struct MinimizeResult {
    std::vector<double> argmin;
    double value = 0.0;
    int evaluations = 0;
    int runs = 0;
    std::vector<double> restart_values;  ///< best value per simplex run
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Nelder-Mead local search restricted to `bounds` (candidate points are
/// projected onto the box), restarted from `starts` plus deterministic
/// perturbations until options.restarts runs have been made. Returns the
/// best point seen; its value is never worse than at any start. Throws
/// NumericError if the objective is non-finite at every start.
MinimizeResult minimize(const Objective& objective, const std::vector<std::vector<double>>& starts,
                        const Bounds& bounds, const MinimizeOptions& options = {});

/// Single-start convenience overload.
MinimizeResult minimize(const Objective& objective, const std::vector<double>& start,
                        const Bounds& bounds, const MinimizeOptions& options = {});

}  // namespace fepi
