#include <doctest.h>

#include <cmath>
#include <limits>

#include "fepi/errors.hpp"
#include "fepi/optim.hpp"

using namespace fepi;

TEST_CASE("minimize: quadratic in one dimension") {
    const auto res = minimize([](const std::vector<double>& x) { return (x[0] - 3.0) * (x[0] - 3.0); },
                              std::vector<double>{0.0}, Bounds{{-10.0}, {10.0}});
    CHECK(std::abs(res.argmin[0] - 3.0) < 1e-4);
    CHECK(res.value < 1e-7);
}

TEST_CASE("minimize: separable quadratic in two dimensions") {
    const auto res = minimize(
        [](const std::vector<double>& x) {
            return (x[0] - 1.0) * (x[0] - 1.0) + 10.0 * (x[1] + 2.0) * (x[1] + 2.0);
        },
        std::vector<double>{0.0, 0.0}, Bounds{{-10.0, -10.0}, {10.0, 10.0}});
    CHECK(std::abs(res.argmin[0] - 1.0) < 1e-4);
    CHECK(std::abs(res.argmin[1] + 2.0) < 1e-4);
}

TEST_CASE("minimize: boundary minimum") {
    const auto res = minimize([](const std::vector<double>& x) { return x[0]; }, std::vector<double>{0.7},
                              Bounds{{0.0}, {1.0}});
    CHECK(std::abs(res.argmin[0]) < 1e-4);
}

TEST_CASE("minimize: result never worse than any start") {
    auto f = [](const std::vector<double>& x) {
        return std::sin(5.0 * x[0]) + 0.1 * x[0] * x[0];
    };
    const std::vector<std::vector<double>> starts{{-3.0}, {0.5}, {2.0}};
    const auto res = minimize(f, starts, Bounds{{-4.0}, {4.0}});
    for (const auto& s : starts) CHECK(res.value <= f(s) + 1e-12);
    CHECK(res.runs >= 5);
}

TEST_CASE("minimize: non-finite objective everywhere fails") {
    CHECK_THROWS_AS(minimize(
                        [](const std::vector<double>&) {
                            return std::numeric_limits<double>::quiet_NaN();
                        },
                        std::vector<double>{0.0}, Bounds{{-1.0}, {1.0}}),
                    NumericError);
}

TEST_CASE("minimize: deterministic across calls") {
    auto f = [](const std::vector<double>& x) {
        return std::cos(3.0 * x[0]) + x[1] * x[1];
    };
    const Bounds box{{-2.0, -2.0}, {2.0, 2.0}};
    const auto a = minimize(f, std::vector<double>{0.1, 0.3}, box);
    const auto b = minimize(f, std::vector<double>{0.1, 0.3}, box);
    CHECK(a.value == b.value);
    CHECK(a.argmin == b.argmin);
}
