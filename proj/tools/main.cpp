// SPDX-License-Identifier: Apache-2.0
#include <vector>

#include "cicdec/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cicdec::run_cli(args);
}
