#pragma once

#include <string>
#include <vector>

namespace lowrank::cli {

/// Parses and executes one command line (without the program name). Returns
/// the process exit code: 0 success, 1 certificate guarantee not met,
/// 2 usage/config error, 3 divergence or non-convergence, 4 numerical failure.
/// Never calls std::exit, so it is safe to invoke repeatedly in-process.
int run(std::vector<std::string> args);
int run(int argc, char** argv);

}  // namespace lowrank::cli
