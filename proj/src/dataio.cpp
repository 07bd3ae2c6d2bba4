#include "fepi/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fepi/errors.hpp"

namespace fepi {

int Date::days_in_month(int year, int month) {
    static const int days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12)
        throw DataError("Date: month out of range: " + std::to_string(month));
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return days[month - 1];
}

Date Date::parse(const std::string& iso) {
    Date d;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(iso);
    if (!(in >> d.year >> sep1 >> d.month >> sep2 >> d.day) || sep1 != '-' ||
        sep2 != '-' || !in.eof())
        throw DataError("Date: expected YYYY-MM-DD, got '" + iso + "'");
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
        throw DataError("Date: invalid calendar date '" + iso + "'");
    return d;
}

double code_horizon(const Date& date, int target_year) {
    if (date.year > target_year)
        throw DataError("code_horizon: forecast date " + std::to_string(date.year) +
                        "-" + std::to_string(date.month) +
                        " lies after the end of target year " +
                        std::to_string(target_year) + " (negative horizon)");
    const int last = Date::days_in_month(date.year, date.month);
    const int d_begin = std::abs(date.day - 1);
    const int d_middle = std::abs(date.day - 15);
    const int d_end = std::abs(date.day - last);
    // Nearest anchor; ties go to the earlier anchor (the larger horizon).
    double bonus;
    if (d_begin <= d_middle && d_begin <= d_end)
        bonus = 1.0;
    else if (d_middle <= d_end)
        bonus = 0.5;
    else
        bonus = 0.0;
    const int whole_months = (target_year - date.year) * 12 + (12 - date.month);
    return static_cast<double>(whole_months) + bonus;
}

int ceiling_horizon(double h) {
    if (h < 0.0) throw std::invalid_argument("ceiling_horizon: horizon must be >= 0");
    return static_cast<int>(std::ceil(h));
}

std::string format_case_id(int target_year, double half_horizon) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%d:%.1f", target_year, half_horizon);
    return buf;
}

ErrorSample build_dataset(const std::vector<RawForecastRecord>& records,
                          const std::map<int, double>& outcomes, HorizonMode mode) {
    if (records.empty()) throw DataError("build_dataset: no forecast records");

    struct Group {
        double forecast_sum = 0.0;
        std::size_t count = 0;
    };
    // Key: (target year, horizon in half-month ticks); map keeps the output
    // sorted by year then horizon regardless of record order.
    std::map<std::pair<int, int>, Group> groups;
    for (const RawForecastRecord& rec : records) {
        if (!outcomes.count(rec.target_year))
            throw DataError("build_dataset: no outcome for target year " +
                            std::to_string(rec.target_year));
        const double h = code_horizon(rec.forecast_date, rec.target_year);
        const int ticks = static_cast<int>(std::lround(h * 2.0));
        Group& g = groups[{rec.target_year, ticks}];
        g.forecast_sum += rec.point_forecast;
        g.count += 1;
    }

    ErrorSample sample;
    sample.reserve(groups.size());
    for (const auto& [key, group] : groups) {
        const int year = key.first;
        const double half_h = static_cast<double>(key.second) / 2.0;
        const double forecast = group.forecast_sum / static_cast<double>(group.count);
        const double outcome = outcomes.at(year);
        ErrorObservation obs;
        obs.case_id = format_case_id(year, half_h);
        obs.target_year = year;
        obs.horizon = mode == HorizonMode::half
                          ? half_h
                          : static_cast<double>(ceiling_horizon(half_h));
        obs.point_forecast = forecast;
        obs.realization = outcome;
        obs.error = outcome - forecast;
        sample.push_back(std::move(obs));
    }
    return sample;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        // trim surrounding whitespace
        const auto begin = field.find_first_not_of(" \t\r");
        const auto end = field.find_last_not_of(" \t\r");
        fields.push_back(begin == std::string::npos
                             ? std::string()
                             : field.substr(begin, end - begin + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw DataError("file '" + path + "' is empty (missing header)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::vector<std::string> header = split_csv_line(line);
        std::string joined;
        for (std::size_t i = 0; i < header.size(); ++i)
            joined += (i ? "," : "") + header[i];
        if (joined != expected_header)
            throw DataError("file '" + path + "': expected header '" + expected_header +
                            "', got '" + joined + "'");
    }
    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        const std::size_t expected =
            static_cast<std::size_t>(std::count(expected_header.begin(),
                                                expected_header.end(), ',')) + 1;
        if (fields.size() != expected)
            throw DataError("file '" + path + "' line " + std::to_string(line_no) +
                            ": expected " + std::to_string(expected) + " fields, got " +
                            std::to_string(fields.size()));
        rows.push_back(std::move(fields));
    }
    return rows;
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(context + ": not a number: '" + s + "'");
    }
}

int parse_int(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(context + ": not an integer: '" + s + "'");
    }
}

}  // namespace

std::vector<RawForecastRecord> load_forecast_csv(const std::string& path) {
    const auto rows =
        read_csv(path, "institution,forecast_date,target_year,point_forecast");
    std::vector<RawForecastRecord> records;
    records.reserve(rows.size());
    for (const auto& row : rows) {
        RawForecastRecord rec;
        rec.institution = row[0];
        rec.forecast_date = Date::parse(row[1]);
        rec.target_year = parse_int(row[2], path);
        rec.point_forecast = parse_double(row[3], path);
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw DataError("file '" + path + "' has no data rows");
    return records;
}

std::map<int, double> load_outcomes_csv(const std::string& path) {
    const auto rows = read_csv(path, "target_year,realization");
    std::map<int, double> outcomes;
    for (const auto& row : rows) {
        const int year = parse_int(row[0], path);
        if (!outcomes.emplace(year, parse_double(row[1], path)).second)
            throw DataError("file '" + path + "': duplicate outcome for year " +
                            std::to_string(year));
    }
    if (outcomes.empty()) throw DataError("file '" + path + "' has no data rows");
    return outcomes;
}

std::vector<BenchmarkInterval> load_benchmark_csv(const std::string& path) {
    const auto rows = read_csv(path, "case_id,lower,upper,source");
    std::vector<BenchmarkInterval> intervals;
    intervals.reserve(rows.size());
    for (const auto& row : rows) {
        BenchmarkInterval bi;
        bi.case_id = row[0];
        bi.lower = parse_double(row[1], path);
        bi.upper = parse_double(row[2], path);
        bi.source = row[3];
        if (bi.lower > bi.upper)
            throw DataError("file '" + path + "': lower > upper for case '" +
                            bi.case_id + "'");
        intervals.push_back(std::move(bi));
    }
    if (intervals.empty()) throw DataError("file '" + path + "' has no data rows");
    return intervals;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write file '" + tmp + "'");
        out << content;
        if (!out) throw DataError("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw DataError("cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace fepi
