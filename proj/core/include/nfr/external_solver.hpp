#pragma once

#include <filesystem>
#include <string>

#include "nfr/lp_problem.hpp"

namespace nfr {

/// Subprocess solver hook. The problem is written as an LP file, `command`
/// is run through the shell with "{lp}" and "{sol}" replaced by the file
/// paths (appended as two arguments when the placeholders are absent), and
/// the resulting "name=value" file is read back.
struct ExternalSolverOptions {
  std::string command;
  std::filesystem::path work_dir;  ///< empty: a fresh directory under temp
  bool keep_files = false;
};

/// Throws SolverError if the command fails or the result is incomplete.
LpSolution solve_external(const LpProblem& lp, const ExternalSolverOptions& opts);

}  // namespace nfr
