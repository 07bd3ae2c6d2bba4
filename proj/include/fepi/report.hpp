#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fepi/crossval.hpp"
#include "fepi/estimate.hpp"
#include "fepi/evaluate.hpp"
#include "fepi/simstudy.hpp"

namespace fepi {

using Json = nlohmann::ordered_json;

// Artifact serialization. Every emitted artifact parses back to an
// equivalent value (round-trip identity is part of the test suite).

Json to_json(const ModelParams& params);
ModelParams model_params_from_json(const Json& j);

Json to_json(const FitResult& fit);
FitResult fit_result_from_json(const Json& j);

Json to_json(const std::vector<CaseInterval>& intervals, double level);
std::vector<CaseInterval> case_intervals_from_json(const Json& j, double* level_out);

Json to_json(const EvalReport& report, bool include_cases = true);
EvalReport eval_report_from_json(const Json& j);

Json to_json(const DmTestResult& dm);
DmTestResult dm_test_from_json(const Json& j);

Json to_json(const CvSummary& summary);
CvSummary cv_summary_from_json(const Json& j);

Json to_json(const SimResult& result);
SimResult sim_result_from_json(const Json& j);

/// Serialize with a stable layout and write atomically (tmp + rename).
void write_json_file(const std::string& path, const Json& j);
Json load_json_file(const std::string& path);

}  // namespace fepi
