// Command-line entry point: train, eval, predict, ablate, synth.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace emocnn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// `args[0]` is the program name. Output goes to `out`; diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace emocnn::cli
