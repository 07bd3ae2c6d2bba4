#pragma once

#include <map>
#include <string>
#include <vector>

#include "fepi/types.hpp"

namespace fepi {

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    static Date parse(const std::string& iso);  ///< "YYYY-MM-DD"
    static int days_in_month(int year, int month);
};

/// One row of a forecast archive: who forecast what, when, for which year.
struct RawForecastRecord {
    std::string institution;
    Date forecast_date;
    int target_year = 0;
    double point_forecast = 0.0;
};

/// Externally supplied interval for a forecast case, stated for the
/// outcome variable itself (converted to error space on ingestion).
struct BenchmarkInterval {
    std::string case_id;
    double lower = 0.0;
    double upper = 0.0;
    std::string source;
};

enum class HorizonMode { half, ceiling };

/// Horizon in months on the half-month grid: the date is classified to the
/// beginning/middle/end of its month (nearest of day 1 / day 15 / last day,
/// ties to the earlier anchor), contributing +1.0/+0.5/+0.0 on top of the
/// whole months between that month's end and the target year's December.
/// Throws DataError for dates after the target year.
double code_horizon(const Date& forecast_date, int target_year);

/// Smallest integer >= h.
int ceiling_horizon(double h);

/// Stable case id, e.g. "2018:10.0"; always built from the half-grid
/// horizon so that both horizon modes share ids.
std::string format_case_id(int target_year, double half_horizon);

/// Code horizons, average point forecasts sharing the same (target year,
/// coded horizon) across institutions, and compute errors against the
/// per-year outcomes. Output is sorted by (year, horizon) and therefore
/// invariant to record order. Under ceiling mode the same cases carry
/// ceil(h) as their horizon. Throws DataError when an outcome is missing.
ErrorSample build_dataset(const std::vector<RawForecastRecord>& records,
                          const std::map<int, double>& outcomes,
                          HorizonMode mode = HorizonMode::half);

// CSV ingestion. All files are comma separated with a mandatory header;
// parse failures raise DataError naming the line.
std::vector<RawForecastRecord> load_forecast_csv(const std::string& path);
std::map<int, double> load_outcomes_csv(const std::string& path);
std::vector<BenchmarkInterval> load_benchmark_csv(const std::string& path);

/// Write-then-rename so readers never observe partial files.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace fepi
