#pragma once

// Plain-text LP interchange in the CPLEX LP file format, readable by most
// external solvers (HiGHS, GLPK, CBC, CPLEX, Gurobi).

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "nfr/lp_problem.hpp"

namespace nfr {

void write_lp(std::ostream& out, const LpProblem& lp);
void write_lp_file(const std::filesystem::path& path, const LpProblem& lp);

/// Parses the subset of the format produced by write_lp: one objective,
/// "=", "<=" and ">=" rows, and a Bounds section. ">=" rows are stored as
/// negated "<=" rows. Throws IoError with the offending line on failure.
LpProblem read_lp(std::istream& in);
LpProblem read_lp_file(const std::filesystem::path& path);

/// A solver result file: "name=value" lines, plus optional "status=..." and
/// "objective=..." entries. Blank lines and '#' comments are ignored.
struct SolutionFile {
  std::string status = "optimal";
  std::map<std::string, double> values;
};

SolutionFile read_solution(std::istream& in);
void write_solution(std::ostream& out, const LpProblem& lp, const LpSolution& sol);

}  // namespace nfr
