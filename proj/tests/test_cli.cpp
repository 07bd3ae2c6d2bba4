#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fepi/cli.hpp"
#include "fepi/report.hpp"

using namespace fepi;

namespace {

const std::string kDataDir = FEPI_DATA_DIR;
const std::string kGerman = kDataDir + "/german_forecasts.csv";
const std::string kGermanOut = kDataDir + "/german_outcomes.csv";

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("cli: fit, predict, evaluate pipeline") {
    TempFile fit_out("cli_tmp_fit.json");
    CHECK(run_cli({"fit", "--data", kGerman, "--outcomes", kGermanOut, "--model",
                   "gauss", "--theta", "fixed:12", "--out", fit_out.path}) == 0);
    const Json fit = load_json_file(fit_out.path);
    CHECK(fit.at("params").at("model") == "gauss");
    CHECK(fit.at("params").at("theta") == 12.0);

    TempFile curve_out("cli_tmp_curve.json");
    CHECK(run_cli({"predict", "--params", fit_out.path, "--horizons", "1,6.5,24",
                   "--out", curve_out.path}) == 0);
    const Json curve = load_json_file(curve_out.path);
    CHECK(curve.at("intervals").size() == 3);

    TempFile pred_out("cli_tmp_pred.json");
    CHECK(run_cli({"predict", "--params", fit_out.path, "--data", kGerman,
                   "--outcomes", kGermanOut, "--out", pred_out.path}) == 0);
    TempFile eval_out("cli_tmp_eval.json");
    CHECK(run_cli({"evaluate", "--intervals", pred_out.path, "--data", kGerman,
                   "--outcomes", kGermanOut, "--out", eval_out.path}) == 0);
    const Json eval = load_json_file(eval_out.path);
    CHECK(eval.at("n").get<int>() > 250);
    CHECK(eval.at("coverage").get<double>() > 0.5);
}

TEST_CASE("cli: exit codes for bad usage and bad data") {
    CHECK(run_cli({"frobnicate"}) == 2);
    CHECK(run_cli({"fit", "--data", kGerman}) == 2);  // missing required flags
    CHECK(run_cli({"fit", "--data", kGerman, "--outcomes", kGermanOut, "--model",
                   "nope", "--out", "x.json"}) == 2);
    CHECK(run_cli({"fit", "--data", "no_such.csv", "--outcomes", kGermanOut,
                   "--model", "ar1", "--out", "x.json"}) == 3);
    CHECK(run_cli({"cv", "--data", kGerman, "--outcomes", kGermanOut, "--models",
                   "ar1", "--theta", "banana", "--out", "x.json"}) == 2);

    // Misaligned ids in evaluate are a data error (exit 3).
    TempFile intervals("cli_tmp_bad_intervals.json");
    write_json_file(intervals.path,
                    Json{{"level", 0.8},
                         {"intervals", Json::array({Json{{"case_id", "nope"},
                                                         {"target_year", 2000},
                                                         {"horizon", 1.0},
                                                         {"lower", -1.0},
                                                         {"upper", 1.0}}})}});
    CHECK(run_cli({"evaluate", "--intervals", intervals.path, "--data", kGerman,
                   "--outcomes", kGermanOut, "--out", "x.json"}) == 3);
}

TEST_CASE("cli: simulate runs are byte-identical under one seed") {
    TempFile a("cli_tmp_sim_a.json"), b("cli_tmp_sim_b.json");
    const std::vector<std::string> args{"simulate", "--replications", "2",
                                        "--settings", "60:5", "--rho", "0.5",
                                        "--seed", "7", "--threads", "1"};
    auto with_out = [&](const std::string& out) {
        std::vector<std::string> v = args;
        v.push_back("--out");
        v.push_back(out);
        return v;
    };
    CHECK(run_cli(with_out(a.path)) == 0);
    CHECK(run_cli(with_out(b.path)) == 0);
    std::ifstream fa(a.path), fb(b.path);
    const std::string ca((std::istreambuf_iterator<char>(fa)),
                         std::istreambuf_iterator<char>());
    const std::string cb((std::istreambuf_iterator<char>(fb)),
                         std::istreambuf_iterator<char>());
    CHECK(ca == cb);
    CHECK(!ca.empty());
}

TEST_CASE("cli: benchmark compares external intervals to model intervals") {
    const std::string us = kDataDir + "/us_forecasts.csv";
    const std::string us_out = kDataDir + "/us_outcomes.csv";
    const std::string bench = kDataDir + "/us_benchmark.csv";

    TempFile fit_out("cli_tmp_usfit.json");
    CHECK(run_cli({"fit", "--data", us, "--outcomes", us_out, "--model", "ar1",
                   "--out", fit_out.path}) == 0);
    TempFile pred_out("cli_tmp_uspred.json");
    CHECK(run_cli({"predict", "--params", fit_out.path, "--data", us, "--outcomes",
                   us_out, "--out", pred_out.path}) == 0);
    TempFile bench_out("cli_tmp_usbench.json");
    CHECK(run_cli({"benchmark", "--data", us, "--outcomes", us_out, "--benchmark",
                   bench, "--intervals", pred_out.path, "--out", bench_out.path}) == 0);
    const Json report = load_json_file(bench_out.path);
    CHECK(report.contains("dm_benchmark_vs_model"));
    CHECK(report.at("benchmark_eval").at("n") == report.at("model_eval").at("n"));
}
