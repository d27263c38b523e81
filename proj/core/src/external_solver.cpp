#include "nfr/external_solver.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <unistd.h>

#include "nfr/error.hpp"
#include "nfr/lp_format.hpp"

namespace nfr {
namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

std::string quoted(const std::filesystem::path& p) { return "'" + replace_all(p.string(), "'", "'\\''") + "'"; }

std::filesystem::path fresh_dir() {
  static std::atomic<unsigned> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("nfr-lp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

LpSolution solve_external(const LpProblem& lp, const ExternalSolverOptions& opts) {
  if (opts.command.empty()) throw InvalidArgument("external solver command is empty");
  const bool own_dir = opts.work_dir.empty();
  const auto dir = own_dir ? fresh_dir() : opts.work_dir;
  if (!own_dir) std::filesystem::create_directories(dir);
  const auto lp_path = dir / "problem.lp";
  const auto sol_path = dir / "solution.txt";
  std::filesystem::remove(sol_path);
  write_lp_file(lp_path, lp);

  std::string cmd = opts.command;
  if (cmd.find("{lp}") == std::string::npos && cmd.find("{sol}") == std::string::npos)
    cmd += " {lp} {sol}";
  cmd = replace_all(replace_all(cmd, "{lp}", quoted(lp_path)), "{sol}", quoted(sol_path));

  const int rc = std::system(cmd.c_str());
  auto cleanup = [&] {
    if (own_dir && !opts.keep_files) {
      std::error_code ec;
      std::filesystem::remove_all(dir, ec);
    }
  };
  if (rc != 0) {
    cleanup();
    throw SolverError("external solver exited with status " + std::to_string(rc));
  }
  std::ifstream in(sol_path);
  if (!in) {
    cleanup();
    throw SolverError("external solver produced no result file");
  }
  SolutionFile file;
  try {
    file = read_solution(in);
  } catch (...) {
    cleanup();
    throw;
  }
  cleanup();

  LpSolution sol;
  if (file.status == "infeasible") {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  if (file.status == "unbounded") {
    sol.status = LpStatus::Unbounded;
    return sol;
  }
  if (file.status != "optimal") throw SolverError("external solver reported status " + file.status);
  sol.status = LpStatus::Optimal;
  sol.x.assign(static_cast<std::size_t>(lp.num_variables()), 0.0);
  for (int j = 0; j < lp.num_variables(); ++j) {
    const auto& name = lp.names()[static_cast<std::size_t>(j)];
    auto it = file.values.find(name);
    if (it != file.values.end())
      sol.x[static_cast<std::size_t>(j)] = it->second;
    else if (lp.lower()[static_cast<std::size_t>(j)] > 0.0 || lp.upper()[static_cast<std::size_t>(j)] < 0.0)
      throw SolverError("external solver result is missing variable " + name);
  }
  sol.objective = lp.evaluate(sol.x);
  sol.max_residual = lp.max_violation(sol.x);
  return sol;
}

}  // namespace nfr
