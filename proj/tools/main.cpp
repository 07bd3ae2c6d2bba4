#include <string>
#include <vector>

#include "fepi/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fepi::run_cli(args);
}
