#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cwe/cost_operator.hpp"
#include "cwe/equilibrium.hpp"
#include "cwe/guarantees.hpp"
#include "cwe/kernels.hpp"
#include "cwe/random.hpp"
#include "cwe/saa_pipeline.hpp"
#include "cwe/spec_io.hpp"

namespace cwe::cli {

namespace {

using nlohmann::json;

/// Input problem that maps to exit code 1.
struct InputError : Error {
  using Error::Error;
};

GameSpec load_valid_spec(const std::string& path, std::ostream& err) {
  GameSpec spec = load_game_spec(path);
  const ValidationReport report = validate_spec(spec);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  if (!report.ok()) {
    for (const auto& v : report.violations) err << "error: " << v.locus << ": " << v.message << '\n';
    throw InputError("invalid game spec '" + path + "'");
  }
  return spec;
}

void emit_json(const json& doc, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << doc.dump(2) << '\n';
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw InputError("cannot write '" + out_path + "'");
  f << doc.dump(2) << '\n';
}

std::string format_n(Eigen::Index n) { return std::to_string(n); }

struct SolveArgs {
  std::string spec;
  std::string mode = "exact";
  std::optional<std::int64_t> n;
  std::optional<std::uint64_t> seed;
  std::string out;
  int max_iters = 100'000;
  double tol = 1e-8;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const GameSpec spec = load_valid_spec(a.spec, err);
  SolverConfig cfg;
  cfg.max_iters = a.max_iters;
  cfg.residual_tol = a.tol;
  cfg.record_trace = false;

  json doc;
  EquilibriumResult result;
  if (a.mode == "exact") {
    result = solve_exact(spec, cfg);
    doc = to_json(result);
    doc["mode"] = "exact";
  } else {
    if (!a.n || !a.seed) throw InputError("--mode saa requires --n and --seed");
    if (*a.n < 1) throw InputError("--n must be >= 1");
    const SampleSet samples = sample(spec.uncertainty, *a.n, *a.seed);
    SaaResult saa = solve_saa(spec, samples, cfg);
    result = std::move(saa.equilibrium);
    doc = to_json(result);
    doc["mode"] = "saa";
    doc["n"] = saa.sample_count;
    doc["seed"] = saa.seed;
  }
  emit_json(doc, a.out, out);
  if (!result.converged) {
    err << "solver did not converge: " << result.diagnostic << '\n';
    return kNotConverged;
  }
  return kOk;
}

struct ExperimentArgs {
  std::string spec;
  std::vector<std::int64_t> sizes{50, 500, 5000};
  int runs = 100;
  std::uint64_t base_seed = 1;
  std::string out_dir = "experiment_out";
  std::string reference_flow;
  unsigned jobs = 0;
};

json summary_json(const ExperimentResult& r, const ExperimentArgs& a) {
  json doc;
  doc["base_seed"] = a.base_seed;
  doc["runs_per_size"] = a.runs;
  doc["reference_flow"] = json::array();
  for (Eigen::Index i = 0; i < r.reference_flow.size(); ++i) doc["reference_flow"].push_back(r.reference_flow[i]);
  doc["sizes"] = json::array();
  for (const SizeSummary& s : r.per_size) {
    json q;
    q["N"] = s.n;
    q["converged"] = s.sorted_distances.size();
    q["failures"] = s.failures;
    if (!s.sorted_distances.empty()) {
      q["q25"] = s.q25;
      q["median"] = s.q50;
      q["q75"] = s.q75;
      q["q95"] = s.q95;
    }
    doc["sizes"].push_back(std::move(q));
  }
  doc["failures"] = r.failures;
  doc["medians_strictly_decreasing"] = r.medians_decreasing();
  doc["quartiles_strictly_decreasing"] = r.quartiles_decreasing();
  return doc;
}

void write_experiment_files(const ExperimentResult& r, const ExperimentArgs& a, unsigned jobs) {
  namespace fs = std::filesystem;
  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create '" + dir.string() + "': " + ec.message());

  auto open = [&](const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw InputError("cannot write '" + p.string() + "'");
    return f;
  };
  {
    auto f = open(dir / "runs.csv");
    write_runs_csv(f, r);
  }
  for (const SizeSummary& s : r.per_size) {
    if (s.sorted_distances.empty()) continue;
    auto f = open(dir / ("cdf_N" + format_n(s.n) + ".csv"));
    write_cdf_csv(f, empirical_cdf(s.sorted_distances));
  }
  {
    auto f = open(dir / "summary.json");
    f << summary_json(r, a).dump(2) << '\n';
  }
  {
    // Execution details stay out of the result payloads.
    auto f = open(dir / "run_meta.json");
    const json meta = {{"kernel_isa", std::string(kernels::isa_name(kernels::active_isa()))},
                       {"jobs", jobs},
                       {"rng", Stream::kName}};
    f << meta.dump(2) << '\n';
  }
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  cfg.spec = load_valid_spec(a.spec, err);
  for (std::int64_t n : a.sizes) {
    if (n < 1) throw InputError("--sizes entries must be >= 1");
    cfg.sample_sizes.push_back(static_cast<Eigen::Index>(n));
  }
  if (a.runs < 1) throw InputError("--runs must be >= 1");
  cfg.runs_per_size = a.runs;
  cfg.base_seed = a.base_seed;
  cfg.jobs = a.jobs;
  cfg.solver.record_trace = false;
  if (!a.reference_flow.empty()) cfg.reference = parse_flow(read_json_file(a.reference_flow));

  try {
    const ExperimentResult r = run_experiment(cfg);
    write_experiment_files(r, a, a.jobs);
    out << summary_json(r, a).dump(2) << '\n';
    return kOk;
  } catch (const ExperimentFailure& e) {
    write_experiment_files(e.result(), a, a.jobs);
    err << "experiment failed: " << e.what() << '\n';
    for (const SizeSummary& s : e.result().per_size)
      err << "  N=" << s.n << ": " << s.failures << " failures\n";
    return kNotConverged;
  }
}

struct BoundsArgs {
  std::string spec;
  double epsilon = 0.0;
  double delta = 0.0;
  double zeta = 0.05;
};

int cmd_bounds(const BoundsArgs& a, std::ostream& out, std::ostream& err) {
  const GameSpec spec = load_valid_spec(a.spec, err);
  if (!(a.delta > 0.0)) throw DomainError("delta must be > 0");
  if (!(a.epsilon > 0.0)) throw DomainError("epsilon must be > 0");

  const BoundsReport b = compute_bounds_report(spec);
  json doc = to_json(b);
  doc["epsilon"] = a.epsilon;
  doc["delta"] = a.delta;
  doc["zeta"] = a.zeta;
  const Interval phi = phi_bounds(b.m, b.M, b.alpha);
  doc["phi_bounds"] = {phi.lo, phi.hi};

  const SampleComplexity n = sample_complexity(a.zeta, a.delta, b.L, b.diam_H, b.alpha, b.num_paths, b.m, b.M);
  doc["K"] = to_json(covering_number(b.L, b.diam_H, b.alpha, a.delta, b.num_paths));
  doc["gamma"] = to_json(n.gamma);
  doc["beta"] = n.beta;
  doc["N"] = n.samples;

  const ExponentialConstants at_eps = exponential_constants(b.L, b.diam_H, b.alpha, a.epsilon, b.num_paths, b.m, b.M);
  doc["at_epsilon"] = {{"K", to_json(covering_number(b.L, b.diam_H, b.alpha, a.epsilon, b.num_paths))},
                       {"gamma", to_json(at_eps.gamma)},
                       {"beta", at_eps.beta}};
  doc["delta_is_user_supplied"] = true;
  doc["caveat"] =
      "K, gamma, beta and N are evaluated at the supplied delta; the guarantee on dist(h^N, S) <= epsilon holds "
      "only if delta is a valid sensitivity margin for epsilon, which this tool does not compute";
  out << doc.dump(2) << '\n';
  return kOk;
}

struct CheckArgs {
  std::string spec;
  std::string flow;
  double tol = 0.5;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  const GameSpec spec = load_valid_spec(a.spec, err);
  const FlowVector h = parse_flow(read_json_file(a.flow));
  if (h.size() != spec.num_paths())
    throw InputError("flow has " + std::to_string(h.size()) + " entries, spec has " +
                     std::to_string(spec.num_paths()) + " paths");

  const FeasibleSet fs = FeasibleSet::from_spec(spec);
  const FeasibilityReport feas = is_feasible(h, fs);
  json doc;
  doc["feasible"] = feas.feasible;
  doc["max_feasibility_violation"] = feas.max_violation;
  if (!feas.feasible) {
    for (std::size_t w = 0; w < fs.num_groups(); ++w) {
      double s = 0.0;
      for (Eigen::Index p : fs.groups()[w]) s += h[p];
      err << "OD pair '" << spec.od_pairs[w].id << "': flow sum " << s << ", demand " << spec.od_pairs[w].demand << '\n';
    }
    if (h.minCoeff() < 0.0) err << "negative flow entry: " << h.minCoeff() << '\n';
    doc["satisfied"] = false;
    out << doc.dump(2) << '\n';
    return kCheckViolated;
  }

  const bool closed_form = has_closed_form_cvar(spec.cost, spec.uncertainty);
  const CostOperator op = closed_form ? CostOperator::exact(spec) : CostOperator::reference(spec);
  const Vector costs = op(h);
  const WardropReport rep = check_wardrop(fs, costs, h, a.tol);
  doc["operator"] = closed_form ? "exact" : "reference";
  doc["tol"] = a.tol;
  doc["satisfied"] = rep.satisfied;
  doc["path_risks"] = json::array();
  for (Eigen::Index p = 0; p < costs.size(); ++p) doc["path_risks"].push_back(costs[p]);
  doc["od_pairs"] = json::array();
  for (std::size_t w = 0; w < fs.num_groups(); ++w)
    doc["od_pairs"].push_back(
        {{"id", spec.od_pairs[w].id}, {"min_cost", rep.min_cost[w]}, {"max_violation", rep.max_violation[w]}});
  out << doc.dump(2) << '\n';
  return rep.satisfied ? kOk : kCheckViolated;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const GameSpec spec = load_game_spec(path);
  const ValidationReport report = validate_spec(spec);
  json doc;
  doc["valid"] = report.ok();
  doc["violations"] = json::array();
  for (const auto& v : report.violations) doc["violations"].push_back({{"locus", v.locus}, {"message", v.message}});
  doc["warnings"] = report.warnings;
  out << doc.dump(2) << '\n';
  return report.ok() ? kOk : kInputError;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"CVaR-based Wardrop equilibria: exact and sample average approximation"};
  app.require_subcommand(1);
  std::string isa = "auto";
  app.add_option("--isa", isa, "Kernel variant: auto, scalar or avx2")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Compute an equilibrium (exact CVaR or SAA)");
  solve_cmd->add_option("--spec", solve_args.spec, "Game spec JSON (or builtin:two-node)")->required();
  solve_cmd->add_option("--mode", solve_args.mode, "exact or saa")->check(CLI::IsMember({"exact", "saa"}));
  solve_cmd->add_option("--n", solve_args.n, "Sample count (saa)");
  solve_cmd->add_option("--seed", solve_args.seed, "Sample seed (saa)");
  solve_cmd->add_option("--out", solve_args.out, "Write result JSON here instead of stdout");
  solve_cmd->add_option("--max-iters", solve_args.max_iters, "Iteration cap");
  solve_cmd->add_option("--tol", solve_args.tol, "Natural-residual tolerance");

  ExperimentArgs exp_args;
  auto* exp_cmd = app.add_subcommand("experiment", "Monte Carlo distance-to-equilibrium experiment");
  exp_cmd->add_option("--spec", exp_args.spec, "Game spec JSON (or builtin:two-node)")->required();
  exp_cmd->add_option("--sizes", exp_args.sizes, "Sample sizes")->delimiter(',');
  exp_cmd->add_option("--runs", exp_args.runs, "Runs per sample size");
  exp_cmd->add_option("--base-seed", exp_args.base_seed, "Base seed");
  exp_cmd->add_option("--out-dir", exp_args.out_dir, "Output directory");
  exp_cmd->add_option("--reference-flow", exp_args.reference_flow, "Reference flow JSON (default: exact equilibrium)");
  exp_cmd->add_option("--jobs", exp_args.jobs, "Worker threads (0: all logical CPUs)");

  BoundsArgs bounds_args;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the theoretical constants and sample complexity");
  bounds_cmd->add_option("--spec", bounds_args.spec, "Game spec JSON (or builtin:two-node)")->required();
  bounds_cmd->add_option("--epsilon", bounds_args.epsilon, "Accuracy epsilon")->required();
  bounds_cmd->add_option("--delta", bounds_args.delta, "User-supplied delta(epsilon)")->required();
  bounds_cmd->add_option("--zeta", bounds_args.zeta, "Confidence parameter zeta in (0,1)");

  CheckArgs check_args;
  auto* check_cmd = app.add_subcommand("check", "Check the Wardrop condition for a flow");
  check_cmd->add_option("--spec", check_args.spec, "Game spec JSON (or builtin:two-node)")->required();
  check_cmd->add_option("--flow", check_args.flow, "Flow JSON: array or {\"flow\": [...]}")->required();
  check_cmd->add_option("--tol", check_args.tol, "Cost tolerance");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Validate a game spec");
  validate_cmd->add_option("--spec", validate_path, "Game spec JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  if (isa == "scalar")
    kernels::select_isa(kernels::Isa::Scalar);
  else if (isa == "auto")
    kernels::select_isa(kernels::Isa::Avx2);
  else if (isa == "avx2" && kernels::select_isa(kernels::Isa::Avx2) != kernels::Isa::Avx2)
    err << "warning: avx2 kernels unavailable, using scalar\n";

  try {
    if (*solve_cmd) return cmd_solve(solve_args, out, err);
    if (*exp_cmd) return cmd_experiment(exp_args, out, err);
    if (*bounds_cmd) return cmd_bounds(bounds_args, out, err);
    if (*check_cmd) return cmd_check(check_args, out, err);
    if (*validate_cmd) return cmd_validate(validate_path, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace cwe::cli
