#include "effilab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "effilab/expansions.hpp"
#include "effilab/mle_simulator.hpp"
#include "effilab/normal.hpp"
#include "effilab/np_envelope.hpp"

namespace effilab::cli {

namespace {

const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> names{
      {"etas", Command::Etas},           {"cf-quantile", Command::CfQuantile},
      {"epsilon", Command::Epsilon},     {"deficiency", Command::Deficiency},
      {"np-solve", Command::NpSolve},    {"simulate", Command::Simulate},
      {"verify", Command::Verify},       {"scan", Command::Scan},
  };
  return names;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double parse_double(const std::string& s, const std::string& flag) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw UsageError("--" + flag + ": not a number: '" + s + "'");
  }
}

std::size_t parse_count(const std::string& s, const std::string& flag) {
  const double x = parse_double(s, flag);
  if (!(x >= 1.0) || x != std::floor(x) || x > 1e15) {
    throw UsageError("--" + flag + ": expected a positive integer, got '" + s + "'");
  }
  return static_cast<std::size_t>(x);
}

struct RawOptions {
  std::string dist = "gumbel";
  double alpha = 0.0;
  double beta = 1.0;
  std::string etas;
  std::string n;
  std::string u;
  std::string v;
  std::string reps;
  std::string seed;
  double theta = 0.0;
  unsigned threads = 1;
  double rel_tol = QuadratureSpec{}.rel_tol;
  double abs_tol = QuadratureSpec{}.abs_tol;
  std::size_t max_refinements = QuadratureSpec{}.max_refinements;
  std::string domain = "cdf";
  std::string format = "csv";
  std::string out;
};

void add_common(CLI::App* sub, RawOptions& raw) {
  sub->add_option("--dist", raw.dist, "Density family: gumbel, normal, logistic");
  sub->add_option("--alpha", raw.alpha, "Location offset of the base density");
  sub->add_option("--beta", raw.beta, "Scale of the base density (> 0)");
  sub->add_option("--etas", raw.etas, "Hand-entered I,eta2,eta3,eta4,eta5,eta6");
  sub->add_option("--n", raw.n, "Sample size (comma-separated list for scan)");
  sub->add_option("--u", raw.u, "Lower probability (list for scan)");
  sub->add_option("--v", raw.v, "Upper probability (list for scan)");
  sub->add_option("--reps", raw.reps, "Monte Carlo replicates");
  sub->add_option("--seed", raw.seed, "RNG seed (fallback: EFFILAB_SEED)");
  sub->add_option("--theta", raw.theta, "True location for simulate");
  sub->add_option("--threads", raw.threads, "Worker threads (0 = all cores)");
  sub->add_option("--rel-tol", raw.rel_tol, "Quadrature relative tolerance");
  sub->add_option("--abs-tol", raw.abs_tol, "Quadrature absolute tolerance");
  sub->add_option("--max-refinements", raw.max_refinements, "Quadrature refinement cap");
  sub->add_option("--domain", raw.domain, "Quadrature domain map: cdf or exp");
  sub->add_option("--format", raw.format, "Output format: csv or json");
  sub->add_option("--out", raw.out, "Output path (default standard output)");
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& s, const std::string& flag, Parse parse) {
  std::vector<T> out;
  for (const auto& item : split_commas(s)) out.push_back(parse(item, flag));
  return out;
}

RunSpec finish(Command command, const RawOptions& raw) {
  RunSpec spec;
  spec.command = command;
  const auto family = parse_family(raw.dist);
  if (!family) throw UsageError("--dist: unknown family '" + raw.dist + "'");
  spec.family = *family;
  if (!(raw.beta > 0.0)) throw UsageError("--beta must be positive");
  spec.alpha = raw.alpha;
  spec.beta = raw.beta;

  if (!raw.etas.empty()) {
    const auto xs = parse_list<double>(raw.etas, "etas", parse_double);
    if (xs.size() != 6) throw UsageError("--etas expects six values: I,eta2,eta3,eta4,eta5,eta6");
    if (!(xs[0] > 0.0)) throw UsageError("--etas: I must be positive");
    spec.etas = EtaSet{xs[0], xs[1], xs[2], xs[3], xs[4], xs[5]};
  }
  spec.n = parse_list<std::size_t>(raw.n, "n", parse_count);
  spec.u = parse_list<double>(raw.u, "u", parse_double);
  spec.v = parse_list<double>(raw.v, "v", parse_double);
  for (double p : spec.u) {
    if (!(p > 0.0 && p < 1.0)) throw UsageError("--u values must lie in (0, 1)");
  }
  for (double p : spec.v) {
    if (!(p > 0.0 && p < 1.0)) throw UsageError("--v values must lie in (0, 1)");
  }
  if (!raw.reps.empty()) spec.reps = parse_count(raw.reps, "reps");

  std::string seed = raw.seed;
  if (seed.empty()) {
    if (const char* env = std::getenv("EFFILAB_SEED")) seed = env;
  }
  if (!seed.empty()) {
    try {
      std::size_t pos = 0;
      spec.seed = std::stoull(seed, &pos);
      if (pos != seed.size()) throw std::invalid_argument(seed);
    } catch (const std::exception&) {
      throw UsageError("seed must be a nonnegative integer, got '" + seed + "'");
    }
  }

  spec.theta = raw.theta;
  spec.threads = raw.threads;
  spec.quadrature.rel_tol = raw.rel_tol;
  spec.quadrature.abs_tol = raw.abs_tol;
  spec.quadrature.max_refinements = raw.max_refinements;
  if (raw.domain == "cdf") {
    spec.quadrature.domain = DomainMap::CdfSubstitution;
  } else if (raw.domain == "exp") {
    spec.quadrature.domain = DomainMap::TwoSidedExponential;
  } else {
    throw UsageError("--domain must be cdf or exp");
  }
  try {
    spec.quadrature.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (raw.format == "csv") {
    spec.format = Format::Csv;
  } else if (raw.format == "json") {
    spec.format = Format::Json;
  } else {
    throw UsageError("--format must be csv or json");
  }
  spec.out = raw.out;

  // Required values per command.
  auto need_single = [&](const auto& list, const char* flag) {
    if (list.size() != 1) throw UsageError(std::string("this command needs exactly one --") + flag);
  };
  switch (command) {
    case Command::Etas:
    case Command::Verify:
      break;
    case Command::CfQuantile:
      need_single(spec.n, "n");
      need_single(spec.v, "v");
      break;
    case Command::Epsilon:
    case Command::Deficiency:
    case Command::NpSolve:
      need_single(spec.n, "n");
      need_single(spec.u, "u");
      need_single(spec.v, "v");
      if (!(spec.u[0] <= spec.v[0])) throw UsageError("need u <= v");
      if (command == Command::Deficiency && !(spec.u[0] < spec.v[0])) {
        throw UsageError("deficiency needs u < v");
      }
      break;
    case Command::Simulate:
      need_single(spec.n, "n");
      if (spec.u.empty()) spec.u = {0.025};
      if (spec.v.empty()) spec.v = {0.975};
      need_single(spec.u, "u");
      need_single(spec.v, "v");
      break;
    case Command::Scan:
      if (spec.n.empty() || spec.u.empty() || spec.v.empty()) {
        throw UsageError("scan needs --n, --u and --v lists");
      }
      break;
  }
  return spec;
}

EtaSet etas_for(const RunSpec& spec) {
  if (spec.etas) return *spec.etas;
  return eta_set(LocationDensity(spec.family, spec.alpha, spec.beta), spec.quadrature);
}

Record deficiency_record(const DeficiencyReport& r) {
  Record rec;
  rec.add("n", r.n)
      .add("u", r.u)
      .add("v", r.v)
      .add("z_u", r.z_u)
      .add("z_v", r.z_v)
      .add("order_half", r.order_half)
      .add("order_one", r.order_one)
      .add("order_three_halves", r.order_three_halves)
      .add("total", r.total)
      .add("third_order_term", third_order_term(r.etas, r.n, r.u, r.v))
      .add("monotone", r.monotone);
  return rec;
}

struct Check {
  std::string name;
  double value;
  double expected;
  double tolerance;
  bool pass;
};

Check near(std::string name, double value, double expected, double tol) {
  return {std::move(name), value, expected, tol, std::abs(value - expected) <= tol};
}

std::vector<Check> verification_suite(const QuadratureSpec& q) {
  std::vector<Check> checks;
  const EtaSet g = eta_set(LocationDensity::gumbel_min(), q);
  const EtaSet ref = EtaSet::gumbel();
  checks.push_back(near("gumbel.I", g.fisher_information, ref.fisher_information, 1e-8));
  checks.push_back(near("gumbel.eta2", g.eta2, ref.eta2, 1e-8));
  checks.push_back(near("gumbel.eta3", g.eta3, ref.eta3, 1e-8));
  checks.push_back(near("gumbel.eta4", g.eta4, ref.eta4, 1e-8));
  checks.push_back(near("gumbel.eta5", g.eta5, ref.eta5, 1e-8));
  checks.push_back(near("gumbel.eta6", g.eta6, ref.eta6, 1e-8));

  const Family families[] = {Family::GumbelMin, Family::Normal, Family::Logistic};
  for (Family f : families) {
    const std::string name(to_string(f));
    const auto res = identity_suite(LocationDensity(f), q);
    checks.push_back(near(name + ".identity_suite.max_abs", res.max_abs(), 0.0, 1e-8));
    for (double alpha : {-1.0, 0.0, 2.0}) {
      for (double beta : {0.5, 1.0, 3.0}) {
        const EtaSet e = eta_set(LocationDensity(f, alpha, beta), q);
        const double gap = cs_gap(e);
        std::ostringstream tag;
        tag << name << "(" << alpha << "," << beta << ").cs_gap";
        checks.push_back({tag.str(), gap, 0.0, 1e-10, gap >= -1e-10});
      }
    }
    const EtaSet e = eta_set(LocationDensity(f), q);
    checks.push_back(
        near(name + ".third_order_plus_12gap", third_order_coeff(e) + 12.0 * cs_gap(e), 0.0, 1e-12));
  }
  checks.push_back(near("logistic.cs_gap", cs_gap(eta_set(LocationDensity::logistic(), q)), 0.2, 1e-8));

  double worst = 0.0;
  for (double u : {0.05, 0.1, 0.3}) {
    for (double v : {0.6, 0.8, 0.975}) {
      for (std::size_t n : {10u, 100u, 1000u}) {
        worst = std::max(worst, std::abs(deficiency(EtaSet::gumbel(), n, u, v).total));
      }
    }
  }
  checks.push_back(near("gumbel.deficiency.max_abs_total", worst, 0.0, 1e-12));

  double worst_sym = 0.0;
  for (const EtaSet& e : {EtaSet::logistic(), EtaSet::normal(), g}) {
    for (double u : {0.01, 0.05, 0.1, 0.25, 0.4}) {
      for (std::size_t n : {1u, 10u, 100u}) {
        worst_sym = std::max(worst_sym, std::abs(deficiency(e, n, u, 1.0 - u).total));
      }
    }
  }
  checks.push_back(near("symmetric_interval.deficiency.max_abs_total", worst_sym, 0.0, 1e-12));

  const double zu = std_normal_quantile(0.1);
  const double zv = std_normal_quantile(0.8);
  checks.push_back(near("normal.epsilon_tilde", epsilon_tilde(EtaSet::normal(), 50, 0.1, 0.8),
                        zv - zu, 1e-14));
  const double bracket = (zv - zu) * (zu + zv) * (zu + zv);
  checks.push_back(near("logistic.deficiency", deficiency(EtaSet::logistic(), 100, 0.1, 0.8).total,
                        2.4 / 9600.0 * bracket, 1e-12));
  return checks;
}

int dispatch(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  RecordWriter writer(out, spec.format);
  const LocationDensity density(spec.family, spec.alpha, spec.beta);

  switch (spec.command) {
    case Command::Etas: {
      const EtaSet e = etas_for(spec);
      Record rec;
      rec.add("dist", std::string(to_string(spec.family)))
          .add("alpha", spec.alpha)
          .add("beta", spec.beta)
          .add("I", e.fisher_information)
          .add("eta2", e.eta2)
          .add("eta3", e.eta3)
          .add("eta4", e.eta4)
          .add("eta5", e.eta5)
          .add("eta6", e.eta6)
          .add("cs_gap", cs_gap(e))
          .add("third_order_coeff", third_order_coeff(e));
      writer.write(rec);
      return kExitOk;
    }
    case Command::CfQuantile: {
      const EtaSet e = etas_for(spec);
      const std::size_t n = spec.n[0];
      const double v = spec.v[0];
      Record rec;
      rec.add("n", n)
          .add("v", v)
          .add("z_v", std_normal_quantile(v))
          .add("cf_quantile", cf_quantile(e, n, v))
          .add("slope", cf_quantile_slope(e, n, v));
      writer.write(rec);
      return kExitOk;
    }
    case Command::Epsilon: {
      const EtaSet e = etas_for(spec);
      const std::size_t n = spec.n[0];
      const double u = spec.u[0];
      const double v = spec.v[0];
      Record rec;
      rec.add("n", n)
          .add("u", u)
          .add("v", v)
          .add("z_u", std_normal_quantile(u))
          .add("z_v", std_normal_quantile(v))
          .add("eps_tilde", epsilon_tilde(e, n, u, v));
      writer.write(rec);
      return kExitOk;
    }
    case Command::Deficiency: {
      const EtaSet e = etas_for(spec);
      writer.write(deficiency_record(deficiency(e, spec.n[0], spec.u[0], spec.v[0])));
      return kExitOk;
    }
    case Command::Scan: {
      const EtaSet e = etas_for(spec);
      for (double u : spec.u) {
        for (double v : spec.v) {
          if (!(u < v)) continue;
          for (std::size_t n : spec.n) {
            const auto r = deficiency(e, n, u, v);
            Record rec;
            rec.add("u", u)
                .add("v", v)
                .add("n", n)
                .add("z_u", r.z_u)
                .add("z_v", r.z_v)
                .add("cf_v", cf_quantile(e, n, v))
                .add("cf_u", cf_quantile(e, n, u))
                .add("eps_tilde", epsilon_tilde(e, n, u, v))
                .add("order_one", r.order_one)
                .add("order_three_halves", r.order_three_halves)
                .add("total", r.total);
            writer.write(rec);
          }
        }
      }
      return kExitOk;
    }
    case Command::NpSolve: {
      NpOptions options;
      options.seed = spec.seed;
      options.threads = spec.threads;
      options.quadrature = spec.quadrature;
      const std::size_t n = spec.n[0];
      const double u = spec.u[0];
      const double v = spec.v[0];
      const NPSolution sol = solve_epsilon(density, n, u, v, spec.reps, options);
      const EtaSet e = etas_for(spec);
      if (sol.bracket_widened) err << "warning: epsilon bracket widened to 8 (z_v - z_u)\n";
      Record rec;
      rec.add("dist", std::string(to_string(spec.family)))
          .add("n", n)
          .add("u", u)
          .add("v", v)
          .add("reps", spec.reps)
          .add("seed", static_cast<std::int64_t>(spec.seed))
          .add("epsilon", sol.epsilon)
          .add("se_epsilon", sol.se_epsilon)
          .add("log_c", sol.log_c)
          .add("u_hat", sol.u_hat)
          .add("v_hat", sol.v_hat)
          .add("se_u", sol.se_u)
          .add("se_v", sol.se_v)
          .add("a_n", sol.a_n)
          .add("eps_tilde", epsilon_tilde(e, n, u, v))
          .add("bracket_widened", sol.bracket_widened)
          .add("monotone", sol.monotone)
          .add("steps", sol.trace.size());
      writer.write(rec);
      return kExitOk;
    }
    case Command::Simulate: {
      SimConfig cfg = SimConfig::make(density, spec.n[0], spec.reps, spec.seed, spec.theta,
                                      spec.quadrature);
      cfg.threads = spec.threads;
      const SimResult result = simulate(cfg);
      const auto& xs = result.standardized;
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      var /= static_cast<double>(xs.size() - 1);
      const EtaSet e = etas_for(spec);
      const double u = spec.u[0];
      const double v = spec.v[0];
      Record rec;
      rec.add("dist", std::string(to_string(spec.family)))
          .add("n", cfg.n)
          .add("reps", cfg.reps)
          .add("seed", static_cast<std::int64_t>(cfg.seed))
          .add("theta", cfg.theta)
          .add("a_n", cfg.a_n)
          .add("newton_failures", result.newton_failures)
          .add("mean", mean)
          .add("variance", var)
          .add("u", u)
          .add("q_u", empirical_quantile(result, u))
          .add("se_q_u", quantile_standard_error(xs, u))
          .add("cf_u", cf_quantile(e, cfg.n, u))
          .add("v", v)
          .add("q_v", empirical_quantile(result, v))
          .add("se_q_v", quantile_standard_error(xs, v))
          .add("cf_v", cf_quantile(e, cfg.n, v));
      writer.write(rec);
      return kExitOk;
    }
    case Command::Verify: {
      bool all = true;
      for (const auto& c : verification_suite(spec.quadrature)) {
        Record rec;
        rec.add("check", c.name)
            .add("value", c.value)
            .add("expected", c.expected)
            .add("tolerance", c.tolerance)
            .add("pass", c.pass);
        writer.write(rec);
        all = all && c.pass;
      }
      if (!all) err << "verification failed\n";
      return all ? kExitOk : kExitVerification;
    }
  }
  return kExitUsage;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    pairs.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return pairs;
}

std::optional<RunSpec> parse_args(const std::vector<std::string>& argv, std::ostream& out) {
  // Pull out --config and the subcommand name; the config values go first so
  // that flags given on the command line take precedence.
  std::vector<std::string> user;
  std::string config_path;
  std::string command_name;
  bool wants_help = false;
  for (std::size_t i = 1; i < argv.size(); ++i) {
    const std::string& a = argv[i];
    if (a == "--config") {
      if (i + 1 >= argv.size()) throw UsageError("--config needs a path");
      config_path = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else if (command_name.empty() && command_names().count(a)) {
      command_name = a;
    } else {
      if (a == "-h" || a == "--help") wants_help = true;
      user.push_back(a);
    }
  }
  std::vector<std::string> from_file;
  if (!config_path.empty()) {
    for (const auto& [key, value] : read_config(config_path)) {
      if (key == "command") {
        if (command_name.empty()) command_name = value;
        continue;
      }
      from_file.push_back("--" + key + "=" + value);
    }
  }

  CLI::App app{"Higher-order efficiency laboratory for location MLEs", "effilab"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(0, 1);
  RawOptions raw;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help{
      {"etas", "Fisher information and eta functionals of a density"},
      {"cf-quantile", "Cornish-Fisher quantile of the standardized MLE"},
      {"epsilon", "Expansion of the Neyman-Pearson length bound"},
      {"deficiency", "Per-order deficiency of the interval length"},
      {"np-solve", "Monte Carlo solution of the Neyman-Pearson system"},
      {"simulate", "Monte Carlo distribution of the standardized MLE"},
      {"verify", "Run the invariant suite; exit 3 on failure"},
      {"scan", "Deficiency grid over comma-separated u, v and n lists"},
  };
  for (const auto& [name, cmd] : command_names()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    add_common(sub, raw);
    subs[name] = sub;
  }

  std::vector<std::string> args;
  if (!command_name.empty()) args.push_back(command_name);
  args.insert(args.end(), from_file.begin(), from_file.end());
  args.insert(args.end(), user.begin(), user.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, out);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  if (command_name.empty()) {
    if (wants_help) return std::nullopt;
    throw UsageError("missing command; one of: etas, cf-quantile, epsilon, deficiency, np-solve, "
                     "simulate, verify, scan");
  }
  return finish(command_names().at(command_name), raw);
}

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (!spec.out.empty() && spec.out != "-") {
      std::ofstream file(spec.out, std::ios::binary);
      if (!file) {
        err << "error: cannot open '" << spec.out << "' for writing\n";
        return kExitUsage;
      }
      return dispatch(spec, file, err);
    }
    return dispatch(spec, out, err);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  std::optional<RunSpec> spec;
  try {
    spec = parse_args(argv, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!spec) return kExitOk;
  return run(*spec, out, err);
}

}  // namespace effilab::cli
