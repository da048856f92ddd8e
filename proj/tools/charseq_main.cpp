#include <iostream>
#include <string>
#include <vector>

#include "charseq/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    charseq::cli::RunResult res = charseq::cli::run(args);
    std::cout << res.output;
    return res.exit_code;
}
