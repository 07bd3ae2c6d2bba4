#pragma once

#include <string>
#include <vector>

namespace fepi {

/// Full command-line entry point, callable in-process for tests. Returns
/// the process exit code: 0 success, 2 usage error, 3 data error,
/// 4 numerical failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace fepi
