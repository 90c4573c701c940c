#include "lumpchain/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "lumpchain/discovery.hpp"
#include "lumpchain/empirics.hpp"
#include "lumpchain/io.hpp"
#include "lumpchain/oracle.hpp"
#include "lumpchain/report.hpp"

namespace lumpchain::cli {

namespace {

using io::json;

struct Options {
  std::string matrix_path;
  std::string partition_text;
  std::string partition_file;
  std::string out_path;
  bool table = false;
  double tol_validate = kDefaultValidateTol;
  double tol_lump = kDefaultLumpTol;
  double tol_eig = kDefaultSpectralTol;
  double tol_group = kDefaultGroupTol;
  double tol_element = kDefaultElementTol;
  double zeta = kDefaultZeta;
  std::uint64_t guard = kDefaultGuard;
  std::size_t max_candidates = 100'000;
  std::size_t max_rotation_patterns = 10'000;
  bool eigenvectors = false;
  std::size_t x0 = 1;
  std::size_t steps = 100'000;
  std::uint64_t seed = 1;
  std::string trajectory_out;
};

struct Loaded {
  Eigen::MatrixXd raw;
  std::string digest;
};

bool is_domain_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotLumpable:
    case ErrorCode::GuardExceeded:
    case ErrorCode::NotDiagonalizable:
    case ErrorCode::EigenFailure:
    case ErrorCode::CandidateOverflow:
    case ErrorCode::Overflow:
    case ErrorCode::InsufficientData:
      return true;
    default:
      return false;
  }
}

Loaded load_matrix(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    text = io::read_file(path);
  }
  Loaded l;
  l.raw = io::parse_matrix(text);
  l.digest = io::matrix_digest(l.raw);
  return l;
}

Partition load_partition(const Options& o, std::size_t n) {
  if (!o.partition_file.empty()) return io::parse_partition(io::read_file(o.partition_file), n);
  if (o.partition_text.empty()) throw ParseError("a partition is required (-p or --partition-file)", 0, 0);
  return io::parse_partition(o.partition_text, n);
}

DiscoveryConfig discovery_config(const Options& o) {
  DiscoveryConfig cfg;
  cfg.element_tol = o.tol_element;
  cfg.group_tol = o.tol_group;
  cfg.spectral_tol = o.tol_eig;
  cfg.zeta = o.zeta;
  cfg.max_candidates = o.max_candidates;
  cfg.max_rotation_patterns = o.max_rotation_patterns;
  cfg.threads = thread_count_from_env();
  return cfg;
}

json base_config(const Options& o) {
  json c;
  c["tol_validate"] = o.tol_validate;
  c["tol_lump"] = o.tol_lump;
  return c;
}

json discovery_config_json(const Options& o) {
  json c = base_config(o);
  c["tol_eig"] = o.tol_eig;
  c["tol_group"] = o.tol_group;
  c["tol_element"] = o.tol_element;
  c["zeta"] = o.zeta;
  c["guard"] = o.guard;
  c["max_candidates"] = o.max_candidates;
  c["max_rotation_patterns"] = o.max_rotation_patterns;
  return c;
}

json generator_json(const GeneratorBlock& g) {
  json j;
  j["eigenvalue"] = io::to_json(g.eigenvalue);
  j["kind"] = to_string(g.kind);
  j["group_dimension"] = g.group_dimension;
  j["count"] = g.count;
  j["rotated"] = g.rotated;
  json coeffs = json::array();
  json vectors = json::array();
  for (Eigen::Index k = 0; k < g.coefficients.cols(); ++k) {
    coeffs.push_back(io::vector_to_json(g.coefficients.col(k)));
    vectors.push_back(io::vector_to_json(g.vectors.col(k)));
  }
  j["coefficients"] = std::move(coeffs);
  j["vectors"] = std::move(vectors);
  return j;
}

json lumping_json(const Partition& part, double max_deviation, const LumpingCandidate* cand) {
  json j = io::to_json(part);
  j["max_deviation"] = max_deviation;
  if (cand == nullptr) {
    j["generating_set"] = nullptr;
    j["complement"] = nullptr;
    return j;
  }
  json gens = json::array();
  for (const auto& g : cand->generating_set) gens.push_back(generator_json(g));
  json comp = json::array();
  for (const auto& a : cand->complement) {
    json c;
    c["eigenvalue"] = io::to_json(a.eigenvalue);
    c["count"] = a.left_vectors.rows();
    comp.push_back(std::move(c));
  }
  j["generating_set"] = std::move(gens);
  j["complement"] = std::move(comp);
  return j;
}

json spectrum_json(const DiscoveryResult& res, bool with_vectors) {
  json j;
  json values = json::array();
  for (Eigen::Index i = 0; i < res.eigensystem.eigenvalues.size(); ++i) {
    values.push_back(io::to_json(res.eigensystem.eigenvalues(i)));
  }
  j["eigenvalues"] = std::move(values);
  json groups = json::array();
  for (const auto& g : res.groups) {
    json gj;
    gj["eigenvalue"] = io::to_json(g.eigenvalue);
    gj["dimension"] = g.dimension;
    gj["kind"] = to_string(g.kind);
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  if (with_vectors) {
    json right = json::array(), left = json::array();
    for (Eigen::Index k = 0; k < res.eigensystem.right_vectors.cols(); ++k) {
      right.push_back(io::vector_to_json(res.eigensystem.right_vectors.col(k)));
      left.push_back(io::vector_to_json(res.eigensystem.left_vectors.row(k).transpose()));
    }
    j["right_vectors"] = std::move(right);
    j["left_vectors"] = std::move(left);
  }
  return j;
}

void print_lumping_table(std::ostream& os, const json& lumpings) {
  os << std::left << std::setw(6) << "lumps" << std::setw(40) << "partition" << "max_deviation\n";
  for (const auto& l : lumpings) {
    std::ostringstream blocks;
    for (const auto& b : l["blocks"]) {
      blocks << '{';
      for (std::size_t k = 0; k < b.size(); ++k) blocks << (k ? "," : "") << b[k].get<std::size_t>();
      blocks << '}';
    }
    os << std::setw(6) << l["lumps"].get<std::size_t>() << std::setw(40) << blocks.str()
       << l["max_deviation"].get<double>() << '\n';
  }
}

int cmd_check(const Options& o, RunReport& report, std::ostream& err) {
  const Loaded m = load_matrix(o.matrix_path);
  report.input_digest = m.digest;
  report.config = base_config(o);
  const StochasticMatrix p = validate_stochastic(m.raw, o.tol_validate);
  const Partition part = load_partition(o, p.n());
  const LumpabilityResult r = is_lumpable(p, part, o.tol_lump);
  report.results["partition"] = io::to_json(part);
  report.results["lumpable"] = r.lumpable;
  report.results["max_deviation"] = r.max_deviation;
  if (o.table) {
    err << io::format_blocks(part) << ": " << (r.lumpable ? "lumpable" : "not lumpable") << " (max deviation "
        << r.max_deviation << ")\n";
  }
  return r.lumpable ? kOk : kDomainError;
}

int cmd_reduce(const Options& o, RunReport& report, std::ostream& err) {
  const Loaded m = load_matrix(o.matrix_path);
  report.input_digest = m.digest;
  report.config = base_config(o);
  const StochasticMatrix p = validate_stochastic(m.raw, o.tol_validate);
  const Partition part = load_partition(o, p.n());
  report.results["partition"] = io::to_json(part);
  const ReducedChain r = reduce(p, part, o.tol_lump);
  report.results["max_deviation"] = is_lumpable(p, part, o.tol_lump).max_deviation;
  report.results["reduced"] = io::to_json(r.matrix);
  if (o.table) {
    err << "reduced chain for " << io::format_blocks(part) << ":\n";
    for (Eigen::Index i = 0; i < r.matrix.rows(); ++i) {
      for (Eigen::Index j = 0; j < r.matrix.cols(); ++j) err << (j ? " " : "") << r.matrix(i, j);
      err << '\n';
    }
  }
  return kOk;
}

void fill_oracle_results(const StochasticMatrix& p, const Options& o, RunReport& report) {
  const auto found = brute_force_lumpings(p, o.tol_lump, o.guard, thread_count_from_env());
  json lumpings = json::array();
  for (const auto& part : found) lumpings.push_back(lumping_json(part, is_lumpable(p, part, o.tol_lump).max_deviation, nullptr));
  report.results["n"] = p.n();
  report.results["bell_number"] = bell_number(p.n());
  report.results["count"] = found.size();
  report.results["lumpings"] = std::move(lumpings);
}

int cmd_discover(const Options& o, RunReport& report, std::ostream& err) {
  const Loaded m = load_matrix(o.matrix_path);
  report.input_digest = m.digest;
  report.config = discovery_config_json(o);
  const StochasticMatrix p = validate_stochastic(m.raw, o.tol_validate);
  DiscoveryResult res;
  try {
    res = discover(p, discovery_config(o), o.tol_lump);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotDiagonalizable) throw;
    // Spectral discovery needs a full eigenbasis; enumerate instead when affordable.
    const std::uint64_t b = p.n() <= 25 ? bell_number(p.n()) : o.guard + 1;
    if (b > o.guard) throw;
    report.warnings.push_back(std::string(e.what()) + "; fell back to exhaustive partition search");
    report.results["method"] = "oracle-fallback";
    fill_oracle_results(p, o, report);
    if (o.table) print_lumping_table(err, report.results["lumpings"]);
    return kOk;
  }
  report.results["method"] = "spectral";
  report.results["n"] = p.n();
  report.results["diagonalizable"] = res.eigensystem.diagonalizable;
  report.results["condition_estimate"] = res.eigensystem.condition_estimate;
  json pert;
  pert["applied"] = res.zeta_applied.has_value();
  pert["zeta"] = res.zeta_applied ? json(*res.zeta_applied) : json(nullptr);
  report.results["perturbation"] = std::move(pert);
  report.results["spectrum"] = spectrum_json(res, o.eigenvectors);
  report.results["seed_count"] = res.seed_count;
  report.results["lattice_size"] = res.lattice_size;
  report.results["candidates_examined"] = res.candidates_examined;
  report.results["degenerate"] = res.degenerate;
  report.results["overflow"] = res.overflow;
  report.results["rotation_capped"] = res.rotation_capped;
  report.results["completeness_guaranteed"] = res.completeness_guaranteed;
  json lumpings = json::array();
  for (const auto& c : res.lumpings) lumpings.push_back(lumping_json(c.partition, c.max_deviation, &c));
  report.results["count"] = res.lumpings.size();
  report.results["lumpings"] = std::move(lumpings);
  report.warnings.insert(report.warnings.end(), res.warnings.begin(), res.warnings.end());
  if (o.table) print_lumping_table(err, report.results["lumpings"]);
  return kOk;
}

int cmd_oracle(const Options& o, RunReport& report, std::ostream& err) {
  const Loaded m = load_matrix(o.matrix_path);
  report.input_digest = m.digest;
  json c = base_config(o);
  c["guard"] = o.guard;
  report.config = std::move(c);
  const StochasticMatrix p = validate_stochastic(m.raw, o.tol_validate);
  report.results["method"] = "oracle";
  fill_oracle_results(p, o, report);
  if (o.table) print_lumping_table(err, report.results["lumpings"]);
  return kOk;
}

int cmd_simulate(const Options& o, RunReport& report, std::ostream& err) {
  const Loaded m = load_matrix(o.matrix_path);
  report.input_digest = m.digest;
  json c = base_config(o);
  c["x0"] = o.x0;
  c["steps"] = o.steps;
  c["seed"] = o.seed;
  c["rng"] = kRngAlgorithm;
  report.config = std::move(c);
  const StochasticMatrix p = validate_stochastic(m.raw, o.tol_validate);
  if (o.x0 < 1 || o.x0 > p.n()) {
    throw Error(ErrorCode::InvalidArgument, "--x0 must lie in 1.." + std::to_string(p.n()));
  }
  const Trajectory traj = simulate(p, o.x0 - 1, o.steps, o.seed);
  report.results["rng"] = kRngAlgorithm;
  report.results["seed"] = traj.seed;
  report.results["steps"] = traj.states.size();
  report.results["transition_counts"] = io::to_json(transition_counts(traj, p.n()));
  if (!o.trajectory_out.empty()) {
    std::ofstream f(o.trajectory_out);
    if (!f) throw std::runtime_error("cannot write '" + o.trajectory_out + "'");
    for (std::size_t s : traj.states) f << s + 1 << '\n';
    report.results["trajectory_file"] = o.trajectory_out;
  }
  if (!o.partition_text.empty() || !o.partition_file.empty()) {
    const Partition part = load_partition(o, p.n());
    const MarkovTestResult t = markov_quotient_statistic(traj, part);
    json test;
    test["diagnostic"] = true;
    test["test"] = "likelihood-ratio second-order vs first-order on lumped trajectory";
    test["partition"] = io::to_json(part);
    test["statistic"] = t.statistic;
    test["dof"] = t.dof;
    test["pvalue"] = t.pvalue;
    report.results["markov_test"] = std::move(test);
    if (o.table) {
      err << "quotient Markov test (diagnostic) for " << io::format_blocks(part) << ": G=" << t.statistic
          << " dof=" << t.dof << " p=" << t.pvalue << '\n';
    }
  }
  report.warnings.push_back("simulation results are diagnostic; the exact row-sum check is the arbiter");
  return kOk;
}

void emit(const RunReport& report, const Options& o, std::ostream& out) {
  if (!o.out_path.empty()) {
    std::ofstream f(o.out_path);
    if (!f) throw std::runtime_error("cannot write '" + o.out_path + "'");
    f << report.dump();
    return;
  }
  if (!o.table) out << report.dump();
}

}  // namespace

std::size_t thread_count_from_env() {
  const char* env = std::getenv("LUMPCHAIN_THREADS");
  if (env == nullptr || *env == '\0') return std::max(1U, std::thread::hardware_concurrency());
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (end == env) return 0;
  return std::size_t(v);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Strong lumpability of finite Markov chains", "lumpchain"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-m,--matrix", o.matrix_path, "Matrix file (text rows or JSON), '-' for stdin")->required();
    sub->add_option("--tol-validate", o.tol_validate, "Row-sum / negativity tolerance")->capture_default_str();
    sub->add_option("--tol-lump", o.tol_lump, "Lumpability deviation tolerance")->capture_default_str();
    sub->add_option("--out", o.out_path, "Write the JSON report here instead of stdout");
    auto* json_flag = sub->add_flag("--json", "Emit the JSON report (default)");
    sub->add_flag("--table", o.table, "Print a human-readable table to stderr")->excludes(json_flag);
  };
  auto add_partition = [&](CLI::App* sub, bool required) {
    auto* grp = sub->add_option_group("partition");
    grp->add_option("-p,--partition", o.partition_text, "Partition: \"{1,2}{3}\" or \"0 0 1\"");
    grp->add_option("--partition-file", o.partition_file, "File holding the partition");
    if (required) grp->require_option(1);
    else grp->require_option(0, 1);
  };
  auto add_spectral = [&](CLI::App* sub) {
    sub->add_option("--tol-eig", o.tol_eig, "Spectral tolerance")->capture_default_str();
    sub->add_option("--tol-group", o.tol_group, "Eigenvalue grouping tolerance")->capture_default_str();
    sub->add_option("--tol-element", o.tol_element, "Eigenvector element equality tolerance")->capture_default_str();
    sub->add_option("--zeta", o.zeta, "Shift toward identity for rank-deficient input")->capture_default_str();
    sub->add_option("--max-candidates", o.max_candidates, "Cap on the candidate lattice")->capture_default_str();
    sub->add_option("--max-rotation-patterns", o.max_rotation_patterns, "Cap on rotation probes per eigenspace")
        ->capture_default_str();
    sub->add_option("--guard", o.guard, "Largest Bell number for the exhaustive fallback")->capture_default_str();
    sub->add_flag("--eigenvectors", o.eigenvectors, "Include eigenvectors in the report");
  };

  auto* check = app.add_subcommand("check", "Test whether a partition is a strong lumping");
  add_common(check);
  add_partition(check, true);
  auto* red = app.add_subcommand("reduce", "Build the lumped transition matrix");
  add_common(red);
  add_partition(red, true);
  auto* disc = app.add_subcommand("discover", "Find lumpings from the right eigenvectors");
  add_common(disc);
  add_spectral(disc);
  auto* orc = app.add_subcommand("oracle", "Enumerate all lumpings by exhaustive search");
  add_common(orc);
  orc->add_option("--guard", o.guard, "Largest Bell number to enumerate")->capture_default_str();
  auto* sim = app.add_subcommand("simulate", "Sample a trajectory; optionally test a partition");
  add_common(sim);
  add_partition(sim, false);
  sim->add_option("--x0", o.x0, "Initial state (1-based)")->capture_default_str();
  sim->add_option("-T,--steps", o.steps, "Trajectory length")->capture_default_str();
  sim->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sim->add_option("--trajectory-out", o.trajectory_out, "Write the trajectory, one state per line");

  try {
    if (args.empty()) throw CLI::CallForHelp();
    std::vector<std::string> argv_rev(args.rbegin(), args.rend() - 1);
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  RunReport report;
  int code = kOk;
  try {
    if (*check) report.command = "check", code = cmd_check(o, report, err);
    else if (*red) report.command = "reduce", code = cmd_reduce(o, report, err);
    else if (*disc) report.command = "discover", code = cmd_discover(o, report, err);
    else if (*orc) report.command = "oracle", code = cmd_oracle(o, report, err);
    else if (*sim) report.command = "simulate", code = cmd_simulate(o, report, err);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    if (!is_domain_error(e.code())) return kInputError;
    json ej;
    ej["code"] = to_string(e.code());
    ej["message"] = e.what();
    if (const auto* nl = dynamic_cast<const NotLumpableError*>(&e)) ej["max_deviation"] = nl->max_deviation();
    if (const auto* ge = dynamic_cast<const GuardExceededError*>(&e)) {
      ej["partitions"] = ge->overflowed() ? json(nullptr) : json(ge->partitions());
    }
    report.error = std::move(ej);
    code = kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  try {
    emit(report, o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return code;
}

}  // namespace lumpchain::cli
