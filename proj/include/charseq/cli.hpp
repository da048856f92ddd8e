#pragma once

#include <string>
#include <vector>

namespace charseq::cli {

struct RunResult {
    int exit_code = 0;
    std::string output;
};

// Executes one command line (arguments without the program name) and returns
// what would be printed on standard output together with the process exit
// code: 0 for definite answers, 2 for honest cannot-decide outcomes
// (Inconclusive verdicts, exhausted searches), 1 for errors and refuted
// preconditions. Pure apart from reading --config files and writing the
// --csv / --svg artifacts.
RunResult run(const std::vector<std::string>& args);

}  // namespace charseq::cli
