// nfrc: build scenarios, solve for network-friendly recommendation
// policies, evaluate and simulate them, and run parameter sweeps.
//
// Exit codes: 0 ok, 1 usage/config error, 2 infeasible, 3 solver failure,
// 4 I/O error.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nfr/amc.hpp"
#include "nfr/config.hpp"
#include "nfr/data.hpp"
#include "nfr/error.hpp"
#include "nfr/experiment.hpp"
#include "nfr/lp_format.hpp"
#include "nfr/lp_solve.hpp"
#include "nfr/policy_io.hpp"
#include "nfr/sim.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kSolver = 3, kIo = 4 };

// Flags that override keys of the scenario config.
struct Overrides {
  std::optional<int> items;
  std::optional<int> slots;
  std::optional<double> alpha;
  std::optional<double> quality;
  std::optional<double> zipf;
  std::optional<int> cached;
  std::optional<std::string> clicks;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* app) {
    app->add_option("--K", items, "catalog size");
    app->add_option("--N", slots, "slate size");
    app->add_option("--alpha", alpha, "probability of following a recommendation");
    app->add_option("--q", quality, "quality fraction of q_max");
    app->add_option("--s", zipf, "Zipf exponent of the popularity");
    app->add_option("--C", cached, "number of cached items");
    app->add_option("--v", clicks, "click model: uniform, zipf:<s> or comma-separated probabilities");
    app->add_option("--seed", seed, "graph seed");
  }

  void apply(nfr::ScenarioConfig& c) const {
    if (items) c.items = *items;
    if (slots) c.slots = *slots;
    if (alpha) c.alpha = *alpha;
    if (quality) c.quality = *quality;
    if (zipf) {
      c.zipf_exponent = *zipf;
      c.popularity.resize(0);
    }
    if (cached) {
      c.cached = *cached;
      c.cost.resize(0);
    }
    if (seed) c.seed = *seed;
    if (clicks) {
      const std::string& v = *clicks;
      if (v == "uniform") {
        c.clicks.kind = nfr::ClickSpec::Kind::Uniform;
      } else if (v.rfind("zipf:", 0) == 0) {
        c.clicks.kind = nfr::ClickSpec::Kind::Zipf;
        c.clicks.exponent = std::stod(v.substr(5));
      } else {
        const auto values = parse_list(v);
        c.clicks.kind = nfr::ClickSpec::Kind::Explicit;
        c.clicks.values = Eigen::Map<const nfr::Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
      }
    }
  }

  static std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
      std::size_t pos = 0;
      double x = 0.0;
      try {
        x = std::stod(item, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos == 0 || item.find_first_not_of(" \t", pos) != std::string::npos)
        throw nfr::InvalidArgument("cannot parse '" + item + "' as a number");
      out.push_back(x);
    }
    if (out.empty()) throw nfr::InvalidArgument("empty value list");
    return out;
  }
};

struct SolverFlags {
  std::string solver = "builtin";
  std::string external_cmd;
  bool keep_files = false;

  void add_to(CLI::App* app) {
    app->add_option("--solver", solver,
                    "builtin (column generation for long-session LPs), dense, decomposition or external")
        ->capture_default_str();
    app->add_option("--external-cmd", external_cmd, "external LP solver command; {lp} and {sol} are replaced");
    app->add_flag("--keep-lp-files", keep_files, "keep the files exchanged with the external solver");
  }

  nfr::SolveOptions options() const {
    nfr::SolveOptions o;
    o.backend = nfr::parse_backend(solver);
    if (o.backend == nfr::Backend::External && external_cmd.empty())
      throw nfr::InvalidArgument("--solver external needs --external-cmd");
    o.external.command = external_cmd;
    o.external.keep_files = keep_files;
    return o;
  }
};

nfr::ScenarioConfig load(const std::string& path, const Overrides& ov) {
  nfr::ScenarioConfig c = path.empty() ? nfr::ScenarioConfig{} : nfr::load_config(path);
  ov.apply(c);
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw nfr::IoError("cannot write " + path);
  out << text;
  if (!out) throw nfr::IoError("failed writing " + path);
}

void print_stats(const nfr::GraphStats& st) {
  std::cout << "nodes=" << st.nodes << "\narcs=" << st.arcs << "\nmean_neighbors=" << st.mean_neighbors
            << "\nstd_neighbors=" << st.std_neighbors << "\n";
}

void print_eval(const nfr::EvalReport& r) {
  std::cout << "ltec=" << r.ltec << "\n";
  if (r.chr) std::cout << "chr=" << *r.chr << "\n";
  std::cout << "cycle_length=" << r.cycle_length << "\n";
}

void print_quality(const nfr::Vector& achieved, const nfr::Vector& target) {
  double lo = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  int rows = 0;
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    if (target(i) <= 0.0) continue;
    const double ratio = achieved(i) / target(i);
    lo = std::min(lo, ratio);
    sum += ratio;
    ++rows;
  }
  if (rows == 0) {
    std::cout << "quality_min=NA\nquality_mean=NA\n";
    return;
  }
  std::cout << "quality_min=" << lo << "\nquality_mean=" << sum / rows << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network-friendly recommendation policies"};
  app.require_subcommand(1);
  std::cout << std::setprecision(12);

  std::function<void()> action;

  // gen
  std::string gen_config, gen_out;
  Overrides gen_ov;
  auto* gen = app.add_subcommand("gen", "materialize a scenario (graph, popularity, cache) as explicit JSON");
  gen->add_option("--config", gen_config, "scenario config");
  gen->add_option("--out", gen_out, "output scenario file (default stdout)");
  gen_ov.add_to(gen);
  gen->callback([&] {
    action = [&] {
      const auto cfg = load(gen_config, gen_ov);
      const auto inst = nfr::build_instance(cfg);
      write_text(gen_out, nfr::dump_config(nfr::explicit_config(inst.scenario, cfg.seed)));
      if (!gen_out.empty() && gen_out != "-") print_stats(inst.stats);
    };
  });

  // ingest
  std::string ing_edges, ing_config, ing_out;
  nfr::EdgeListOptions ing_opts;
  Overrides ing_ov;
  auto* ingest = app.add_subcommand("ingest", "build a scenario from a weighted edge list");
  ingest->add_option("--edgelist", ing_edges, "edge list with lines \"i j [w]\"")->required();
  ingest->add_option("--threshold", ing_opts.threshold, "saturation threshold; negative keeps raw weights")
      ->capture_default_str();
  ingest->add_flag("--component-first", ing_opts.component_first, "extract the largest component before saturating");
  ingest->add_option("--config", ing_config, "config supplying N, alpha, q, s, C and v");
  ingest->add_option("--out", ing_out, "output scenario file (default stdout)");
  ing_ov.add_to(ingest);
  ingest->callback([&] {
    action = [&] {
      auto cfg = load(ing_config, ing_ov);
      cfg.graph.type = nfr::GraphSpec::Type::EdgeList;
      cfg.graph.path = ing_edges;
      cfg.graph.edgelist = ing_opts;
      cfg.items.reset();
      const auto inst = nfr::build_instance(cfg);
      write_text(ing_out, nfr::dump_config(nfr::explicit_config(inst.scenario, cfg.seed)));
      if (!ing_out.empty() && ing_out != "-") print_stats(inst.stats);
    };
  });

  // solve
  std::string sol_config, sol_out, sol_problem = "uni", sol_lp_dump;
  Overrides sol_ov;
  SolverFlags sol_flags;
  auto* solve = app.add_subcommand("solve", "compute a policy: greedy (P1), uni (P2), pref (P3) or baseline");
  solve->add_option("--config", sol_config, "scenario config")->required();
  solve->add_option("--problem", sol_problem, "greedy, uni, pref or baseline")->capture_default_str();
  solve->add_option("--out", sol_out, "policy CSV");
  solve->add_option("--lp-dump", sol_lp_dump, "also write the full LP in LP format");
  sol_ov.add_to(solve);
  sol_flags.add_to(solve);
  solve->callback([&] {
    action = [&] {
      const auto cfg = load(sol_config, sol_ov);
      const auto inst = nfr::build_instance(cfg);
      const auto& s = inst.scenario;
      const auto kind = nfr::parse_policy_kind(sol_problem);
      if (!sol_lp_dump.empty()) {
        if (kind == nfr::PolicyKind::LongSession)
          nfr::write_lp_file(sol_lp_dump, nfr::build_op_uni(s));
        else if (kind == nfr::PolicyKind::PositionAware)
          nfr::write_lp_file(sol_lp_dump, nfr::build_op_pref(s));
        else
          throw nfr::InvalidArgument("--lp-dump applies to uni and pref");
      }
      const auto out = nfr::compute_policy(kind, s, sol_flags.options());
      std::cout << "problem=" << nfr::to_string(kind) << "\n";
      if (out.backend) std::cout << "backend=" << nfr::to_string(*out.backend) << "\n";
      if (out.lp_objective) std::cout << "lp_objective=" << *out.lp_objective << "\niterations=" << out.iterations << "\n";
      print_eval(out.eval);
      print_quality(out.achieved_quality, out.quality_target);
      if (!sol_out.empty()) {
        nfr::Metadata meta{{"problem", nfr::to_string(kind)}, {"ltec", std::to_string(out.eval.ltec)}};
        nfr::write_policy_file(sol_out, out.policy, s.slots(), meta);
      }
    };
  });

  // eval
  std::string ev_config, ev_policy;
  Overrides ev_ov;
  auto* eval = app.add_subcommand("eval", "analytic LTEC and CHR of a policy file");
  eval->add_option("--config", ev_config, "scenario config")->required();
  eval->add_option("--policy", ev_policy, "policy CSV")->required();
  ev_ov.add_to(eval);
  eval->callback([&] {
    action = [&] {
      const auto inst = nfr::build_instance(load(ev_config, ev_ov));
      const auto& s = inst.scenario;
      const auto pf = nfr::read_policy_file(ev_policy);
      const auto report = nfr::ltec(pf.policy, s);
      print_eval(report);
      print_quality(nfr::quality_of(pf.policy, s), s.quality() * nfr::quality_ceiling(s, pf.policy.is_positional()));
    };
  });

  // sim
  std::string sim_config, sim_policy;
  std::int64_t sim_steps = 1'000'000;
  std::uint64_t sim_seed = 1;
  int sim_reps = 1, sim_workers = 1;
  Overrides sim_ov;
  auto* sim = app.add_subcommand("sim", "Monte Carlo estimate of a policy's cost rate");
  sim->add_option("--config", sim_config, "scenario config")->required();
  sim->add_option("--policy", sim_policy, "policy CSV (default: baseline)");
  sim->add_option("--steps", sim_steps, "requests per replication")->capture_default_str();
  sim->add_option("--sim-seed", sim_seed, "simulation seed")->capture_default_str();
  sim->add_option("--replications", sim_reps, "independent replications")->capture_default_str();
  sim->add_option("--workers", sim_workers, "threads")->capture_default_str();
  sim_ov.add_to(sim);
  sim->callback([&] {
    action = [&] {
      const auto inst = nfr::build_instance(load(sim_config, sim_ov));
      const auto& s = inst.scenario;
      const nfr::Policy policy = sim_policy.empty()
                                     ? nfr::baseline_policy(s.similarity(), s.slots(),
                                                            s.uniform_clicks() ? nfr::Vector() : s.clicks())
                                     : nfr::read_policy_file(sim_policy).policy;
      const auto r = nfr::simulate_replicated(policy, s, sim_steps, sim_reps, sim_seed, sim_workers);
      const auto analytic = nfr::ltec(policy, s);
      std::cout << "steps=" << r.steps << "\nseed=" << r.seed << "\ncost_rate=" << r.empirical_cost_rate
                << "\nstderr=" << r.std_error << "\n";
      if (r.empirical_chr) std::cout << "chr=" << *r.empirical_chr << "\n";
      std::cout << "cycles=" << r.cycles << "\nmean_cycle_length=" << r.mean_cycle_length
                << "\ncycle_length_stderr=" << r.cycle_length_std_error << "\nanalytic_ltec=" << analytic.ltec
                << "\nanalytic_cycle_length=" << analytic.cycle_length << "\n";
    };
  });

  // sweep
  std::string sw_config, sw_out, sw_axis = "q", sw_values, sw_policies = "P1,P2", sw_seeds, sw_reference = "P1";
  int sw_workers = 1;
  bool sw_timing = false;
  Overrides sw_ov;
  SolverFlags sw_flags;
  auto* sweep = app.add_subcommand("sweep", "compare policies along one parameter axis (CSV)");
  sweep->add_option("--config", sw_config, "scenario config")->required();
  sweep->add_option("--axis", sw_axis, "q, N, alpha, s, Hv or C")->capture_default_str();
  sweep->add_option("--values", sw_values, "comma-separated axis values")->required();
  sweep->add_option("--policies", sw_policies, "comma-separated subset of P1,P2,P3,baseline")->capture_default_str();
  sweep->add_option("--seeds", sw_seeds, "comma-separated graph seeds (default: the config seed)");
  sweep->add_option("--reference", sw_reference, "policy the gain is measured against")->capture_default_str();
  sweep->add_option("--workers", sw_workers, "concurrent cells")->capture_default_str();
  sweep->add_flag("--timing", sw_timing, "add a wall-time column (output is then not reproducible)");
  sweep->add_option("--out", sw_out, "CSV path (default stdout)");
  sw_ov.add_to(sweep);
  sw_flags.add_to(sweep);
  sweep->callback([&] {
    action = [&] {
      nfr::SweepSpec spec;
      spec.base = load(sw_config, sw_ov);
      spec.axis = nfr::parse_axis(sw_axis);
      spec.values = Overrides::parse_list(sw_values);
      spec.policies.clear();
      std::stringstream ps(sw_policies);
      for (std::string p; std::getline(ps, p, ',');) spec.policies.push_back(nfr::parse_policy_kind(p));
      if (!sw_seeds.empty())
        for (double x : Overrides::parse_list(sw_seeds)) spec.seeds.push_back(static_cast<std::uint64_t>(x));
      spec.reference = nfr::parse_policy_kind(sw_reference);
      spec.workers = sw_workers;
      spec.timing = sw_timing;
      spec.solve = sw_flags.options();
      const auto rows = nfr::run_sweep(spec);
      std::ostringstream os;
      nfr::write_sweep_csv(os, spec, rows);
      write_text(sw_out, os.str());
    };
  });

  // oracle
  std::string or_config;
  std::int64_t or_cap = 1'000'000;
  Overrides or_ov;
  auto* oracle = app.add_subcommand("oracle", "brute-force optimum over deterministic policies (tiny K)");
  oracle->add_option("--config", or_config, "scenario config")->required();
  oracle->add_option("--cap", or_cap, "maximum number of candidate policies")->capture_default_str();
  std::string or_out;
  oracle->add_option("--out", or_out, "policy CSV of the best deterministic policy");
  or_ov.add_to(oracle);
  oracle->callback([&] {
    action = [&] {
      const auto inst = nfr::build_instance(load(or_config, or_ov));
      const auto& s = inst.scenario;
      const auto r = nfr::brute_force_optimum(s, or_cap);
      if (!r.feasible) throw nfr::Infeasible("no deterministic policy meets the quality target");
      std::cout << "evaluated=" << r.evaluated << "\nltec=" << r.ltec << "\n";
      if (s.binary_costs()) std::cout << "chr=" << 1.0 - r.ltec << "\n";
      if (!or_out.empty()) nfr::write_policy_file(or_out, *r.policy, s.slots(), {{"problem", "oracle"}});
    };
  });

  // lpsolve
  std::string lp_in, lp_out;
  auto* lpsolve = app.add_subcommand("lpsolve", "solve an LP file with the bundled simplex (name=value output)");
  lpsolve->add_option("lp", lp_in, "LP file")->required();
  lpsolve->add_option("solution", lp_out, "solution file (default stdout)");
  lpsolve->callback([&] {
    action = [&] {
      const auto lp = nfr::read_lp_file(lp_in);
      const auto sol = nfr::solve_simplex(lp);
      std::ostringstream os;
      nfr::write_solution(os, lp, sol);
      write_text(lp_out, os.str());
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const nfr::Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const nfr::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const nfr::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
