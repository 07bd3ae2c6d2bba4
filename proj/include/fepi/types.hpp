#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fepi {

/// One forecast case: the error of a point forecast for `target_year` made
/// `horizon` months before that year's end. Horizons live on a half-month
/// grid (or integers after ceiling coding). `error = realization -
/// point_forecast` whenever both sides are known.
struct ErrorObservation {
    std::string case_id;
    int target_year = 0;
    double horizon = 0.0;
    double error = 0.0;
    std::optional<double> point_forecast;
    std::optional<double> realization;
};

using ErrorSample = std::vector<ErrorObservation>;

}  // namespace fepi
