#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "heavytail/cli.hpp"
#include "heavytail/config.hpp"
#include "heavytail/cone.hpp"
#include "heavytail/csv.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/estimate.hpp"
#include "heavytail/products.hpp"
#include "heavytail/simulate.hpp"
#include "heavytail/verify.hpp"

namespace heavytail::cli {

using nlohmann::json;

namespace {

struct StatisticalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::uint64_t seed = 1;
  int workers = 1;
};

int effective_workers(int flag) {
  if (const char* env = std::getenv("HEAVYTAIL_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ValidationError("HEAVYTAIL_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  if (flag < 1) throw ValidationError("--workers must be at least 1");
  return flag;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw ValidationError(std::string("bad number in ") + what + ": '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(std::string(what) + " is empty");
  return out;
}

std::string join(const Vector& v, char sep) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += sep;
    s += format_double(v(i));
  }
  return s;
}

// ---------------------------------------------------------------------------
// JSON renderings of the reports
// ---------------------------------------------------------------------------

json to_json(const Estimate& e) { return {{"value", number(e.value)}, {"se", number(e.se)}}; }
json to_json(const MeanSe& e) { return {{"mean", number(e.mean)}, {"se", number(e.se)}}; }

json to_json(const MomentRow& r) {
  return {{"m", r.m},
          {"moment_alpha", number(r.moment_alpha)},
          {"se_alpha", number(r.se_alpha)},
          {"moment_beta", number(r.moment_beta)},
          {"se_beta", number(r.se_beta)}};
}

json to_json(const AssumptionReport& rep) {
  json horizons = json::array();
  for (const auto& h : rep.lambda_beta_by_horizon) {
    horizons.push_back({{"n", h.n}, {"value", number(h.lambda_beta.value)}, {"se", number(h.lambda_beta.se)}, {"stable", h.stable}});
  }
  json rows = json::array();
  for (const auto& r : rep.moment_rows) rows.push_back(to_json(r));
  return {{"lyapunov", to_json(rep.lyapunov)},
          {"a2_satisfied", rep.a2_satisfied},
          {"lambda_beta", to_json(rep.lambda_beta)},
          {"lambda_beta_by_horizon", horizons},
          {"lambda_beta_monotone", rep.lambda_beta_monotone},
          {"contraction_m", rep.contraction_m ? json(*rep.contraction_m) : json(nullptr)},
          {"witness", rep.witness ? to_json(rep.witness->row) : json(nullptr)},
          {"log_moment_ok", rep.log_moment_ok},
          {"log_moments",
           {{"log_plus_matrix", to_json(rep.log_moments.log_plus_matrix)},
            {"log_plus_innovation", to_json(rep.log_moments.log_plus_innovation)},
            {"log_plus_innovation_half", to_json(rep.log_moments.log_plus_innovation_half)}}},
          {"moment_rows", rows}};
}

json to_json(const TailReport& r) {
  json meta = json::object();
  for (const auto& [k, v] : r.meta) meta[k] = number(v);
  return {{"value", number(r.value)}, {"se", number(r.se)}, {"n", r.n}, {"meta", meta}, {"flags", r.flags}};
}

json to_json(const TheoremReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"cone_id", r.cone_id},
                    {"t", number(r.level)},
                    {"theo", number(r.theo)},
                    {"theo_se", number(r.theo_se)},
                    {"emp", number(r.emp)},
                    {"emp_se", number(r.emp_se)},
                    {"rel_err", number(r.rel_err)},
                    {"remainder_bound", number(r.remainder_bound)},
                    {"exceedances", r.exceedances},
                    {"flags", r.flags}});
  }
  return {{"alpha", number(rep.alpha)},
          {"depth", rep.depth},
          {"reps_theory", rep.reps_theory},
          {"reps_empirical", rep.reps_empirical},
          {"rows", rows},
          {"hill", rep.hill ? to_json(*rep.hill) : json(nullptr)}};
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

void write_moments_csv(const std::string& path, const std::string& hash, const std::vector<MomentRow>& rows) {
  CsvWriter csv(path, hash, {"m", "moment_alpha", "se_alpha", "moment_beta", "se_beta"});
  for (const auto& r : rows) {
    csv.row({std::to_string(r.m), format_double(r.moment_alpha), format_double(r.se_alpha),
             format_double(r.moment_beta), format_double(r.se_beta)});
  }
}

// ---------------------------------------------------------------------------
// Shared pipeline pieces
// ---------------------------------------------------------------------------

struct LoadedConfig {
  json raw;
  ModelSpec spec;
  std::string hash;
};

LoadedConfig load_config(const std::string& path, std::ostream& err) {
  json raw = read_json_file(path);
  std::vector<std::string> warnings;
  ModelSpec spec = validate_spec(raw, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  return {raw, std::move(spec), config_hash(raw)};
}

ContractionWitness require_contraction(const ModelSpec& spec, int m_max, std::size_t reps, Seed seed, Exec exec) {
  const auto scan = find_contraction_m(spec, m_max, reps, seed, exec);
  if (!scan.witness) throw StatisticalFailure("no contraction witness for m <= " + std::to_string(m_max));
  return *scan.witness;
}

int resolve_depth(const ModelSpec& spec, std::optional<int> depth, std::optional<double> tol,
                  const ContractionWitness& witness, std::size_t reps, Seed seed, Exec exec) {
  if (depth) {
    if (*depth < 0) throw ValidationError("--depth must be non-negative");
    return *depth;
  }
  return truncation_depth(spec, Tolerance{tol.value_or(1e-6)}, witness, reps, derive(seed, "depth"), exec).depth;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_validate(const Common& c, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(c.config, err);
  out << "valid: d=" << cfg.spec.d() << " regimes=" << cfg.spec.regime_count()
      << " pi=[" << join(cfg.spec.chain().pi(), ' ') << "] config_hash=" << cfg.hash << '\n';
  return kOk;
}

struct AssumptionFlags {
  int horizon = 100;
  std::size_t reps = 10000;
  int m_max = 20;
  std::string out_prefix;
  bool strict = false;
};

int cmd_verify_assumptions(const Common& c, const AssumptionFlags& f, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  const auto cfg = load_config(c.config, err);
  const Exec exec{effective_workers(c.workers)};
  RunManifest man{"verify-assumptions", cfg.hash, c.seed, exec.workers,
                  {{"horizon", f.horizon}, {"reps", f.reps}, {"m_max", f.m_max}}, {}};

  const auto rep = verify_assumptions(cfg.spec, {f.horizon, f.reps, f.m_max}, Seed{c.seed}, exec);
  const std::string json_path = f.out_prefix + "_assumptions.json";
  const std::string csv_path = f.out_prefix + "_moments.csv";
  write_json(json_path, to_json(rep));
  write_moments_csv(csv_path, man.hash(), rep.moment_rows);
  man.artifacts = {json_path, csv_path};
  man.wall_clock_seconds = clock.seconds();
  write_manifest(man, f.out_prefix + "_manifest.json");

  out << "lyapunov " << format_double(rep.lyapunov.value) << " (se " << format_double(rep.lyapunov.se) << ")\n";
  out << "lambda_beta " << format_double(rep.lambda_beta.value) << " (se " << format_double(rep.lambda_beta.se)
      << ")\n";
  out << "contraction_m " << (rep.contraction_m ? std::to_string(*rep.contraction_m) : "none") << '\n';
  if (f.strict && !(rep.a2_satisfied && rep.contraction_m && rep.log_moment_ok)) {
    err << "assumption check failed\n";
    return kStatistical;
  }
  return kOk;
}

struct SimulateFlags {
  std::string mode = "stationary";
  int steps = 10000;
  std::size_t reps = 10000;
  int burn_in = kDefaultBurnIn;
  std::optional<int> depth;
  std::optional<double> tol;
  int m_max = 20;
  std::size_t reps_contraction = 10000;
  std::string out;
};

int cmd_simulate(const Common& c, const SimulateFlags& f, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  const auto cfg = load_config(c.config, err);
  const auto& spec = cfg.spec;
  const Exec exec{effective_workers(c.workers)};
  const Seed seed{c.seed};
  RunManifest man{"simulate", cfg.hash, c.seed, exec.workers, {{"mode", f.mode}}, {}};

  std::vector<std::string> header;
  if (f.mode == "path") {
    header = {"step", "regime"};
  } else if (f.mode == "stationary") {
    header = {"replica"};
  } else {
    throw ValidationError("--mode must be path or stationary");
  }
  for (int i = 1; i <= spec.d(); ++i) header.push_back("X_" + std::to_string(i));
  header.push_back("norm");

  if (f.mode == "path") {
    man.params["steps"] = f.steps;
    man.params["burn_in"] = f.burn_in;
    Rng rng = replica_stream(derive(seed, "path"), 0);
    const auto path = simulate_path(spec, Vector::Zero(spec.d()), f.steps, f.burn_in, rng);
    CsvWriter csv(f.out, man.hash(), header);
    for (std::size_t i = 0; i < path.xs.size(); ++i) {
      const auto step = static_cast<std::size_t>(f.burn_in) + i;
      std::vector<std::string> row{std::to_string(step + 1), std::to_string(path.states[step])};
      for (Eigen::Index k = 0; k < path.xs[i].size(); ++k) row.push_back(format_double(path.xs[i](k)));
      row.push_back(format_double(sup_norm(path.xs[i])));
      csv.row(row);
    }
    out << "wrote " << path.xs.size() << " steps to " << f.out << '\n';
  } else {
    header.push_back("depth");
    int depth = 0;
    if (f.depth) {
      depth = resolve_depth(spec, f.depth, std::nullopt, ContractionWitness{}, 0, seed, exec);
      man.params["depth"] = depth;
    } else {
      const auto witness = require_contraction(spec, f.m_max, f.reps_contraction, derive(seed, "contraction"), exec);
      depth = resolve_depth(spec, std::nullopt, f.tol, witness, f.reps_contraction, seed, exec);
      man.params["tol"] = f.tol.value_or(1e-6);
      man.params["m_max"] = f.m_max;
      man.params["reps_contraction"] = f.reps_contraction;
    }
    man.params["reps"] = f.reps;
    const auto draws = sample_stationary(spec, depth, f.reps, derive(seed, "stationary"), exec);
    CsvWriter csv(f.out, man.hash(), header);
    for (std::size_t r = 0; r < draws.size(); ++r) {
      std::vector<std::string> row{std::to_string(r)};
      for (Eigen::Index k = 0; k < draws[r].x.size(); ++k) row.push_back(format_double(draws[r].x(k)));
      row.push_back(format_double(sup_norm(draws[r].x)));
      row.push_back(std::to_string(depth));
      csv.row(row);
    }
    out << "wrote " << draws.size() << " stationary draws (depth " << depth << ") to " << f.out << '\n';
  }
  man.artifacts = {f.out};
  man.wall_clock_seconds = clock.seconds();
  write_manifest(man, f.out + ".manifest.json");
  return kOk;
}

struct EstimateFlags {
  std::string in;
  std::optional<double> alpha;
  std::optional<std::size_t> hill_k;
  std::string hill_plot;
  std::string levels;
  std::string cones;
  std::vector<std::string> proj;
  std::optional<std::size_t> spectral_k;
  std::string out;
};

int cmd_estimate(const Common& c, const EstimateFlags& f, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  const auto table = read_csv(f.in);
  std::vector<std::size_t> xcols;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i].rfind("X_", 0) == 0) xcols.push_back(i);
  }
  if (xcols.empty()) throw ValidationError("no X_ columns in " + f.in);
  const int d = static_cast<int>(xcols.size());
  std::vector<Vector> xs;
  xs.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Vector x(d);
    for (int k = 0; k < d; ++k) x(k) = std::strtod(row[xcols[static_cast<std::size_t>(k)]].c_str(), nullptr);
    xs.push_back(std::move(x));
  }
  std::vector<double> ns(xs.size());
  std::transform(xs.begin(), xs.end(), ns.begin(), [](const Vector& x) { return sup_norm(x); });

  std::optional<double> alpha = f.alpha;
  std::string cfg_hash = "none";
  if (!c.config.empty()) {
    const auto cfg = load_config(c.config, err);
    if (cfg.spec.d() != d) throw ValidationError("config dimension does not match sample columns");
    if (!alpha) alpha = cfg.spec.alpha();
    cfg_hash = cfg.hash;
  }

  RunManifest man{"estimate", cfg_hash, c.seed, 1, {{"input_manifest", table.manifest_hash}}, {}};
  const std::size_t k = f.hill_k.value_or(default_k(ns.size()));
  man.params["hill_k"] = k;
  if (alpha) man.params["alpha"] = *alpha;
  man.params["levels"] = f.levels;
  man.params["proj"] = f.proj;
  man.params["hill_plot"] = f.hill_plot;
  man.params["cones"] = f.cones.empty() ? json(nullptr) : read_json_file(f.cones);

  auto need_alpha = [&]() {
    if (!alpha) throw ValidationError("--alpha or --config required for tail measures");
    return *alpha;
  };
  auto flag_of = [](const TailReport& r) {
    std::string s;
    for (const auto& fl : r.flags) s += (s.empty() ? "" : ";") + fl;
    return s;
  };

  CsvWriter csv(f.out, man.hash(), {"statistic", "params", "value", "se", "n", "flag"});
  auto emit = [&](const std::string& stat, const std::string& params, const TailReport& r) {
    csv.row({stat, params, format_double(r.value), format_double(r.se), std::to_string(r.n), flag_of(r)});
  };

  emit("hill", "k=" + std::to_string(k), hill_estimator(ns, k));
  if (!f.hill_plot.empty()) {
    std::vector<std::size_t> ks;
    for (double v : parse_list(f.hill_plot, "--hill-plot")) ks.push_back(static_cast<std::size_t>(v));
    const auto plot = hill_plot(ns, ks);
    for (std::size_t i = 0; i < ks.size(); ++i) emit("hill_plot", "k=" + std::to_string(ks[i]), plot[i]);
  }
  if (!f.levels.empty()) {
    const double a = need_alpha();
    for (double t : parse_list(f.levels, "--levels")) {
      emit("norm_tail", "t=" + format_double(t), empirical_cone_measure(xs, ConeSet{"all", t, AngularSet::all()}, a));
    }
  }
  if (!f.cones.empty()) {
    const double a = need_alpha();
    for (const auto& cone : load_cones_file(f.cones, d)) {
      emit("cone", "id=" + cone.id + ";t=" + format_double(cone.level), empirical_cone_measure(xs, cone, a));
    }
  }
  for (const auto& spec_text : f.proj) {
    // "y1 y2 ...@t" or "y1 y2 ..." at the first --levels value
    const auto at = spec_text.find('@');
    std::vector<double> y;
    std::stringstream in(spec_text.substr(0, at));
    for (double v; in >> v;) y.push_back(v);
    if (static_cast<int>(y.size()) != d) throw ValidationError("--proj vector must have " + std::to_string(d) + " entries");
    std::vector<double> ts;
    if (at != std::string::npos) {
      ts = parse_list(spec_text.substr(at + 1), "--proj level");
    } else if (!f.levels.empty()) {
      ts = parse_list(f.levels, "--levels");
    } else {
      throw ValidationError("--proj needs a level: 'y1 y2@t' or --levels");
    }
    const Vector yv = Eigen::Map<const Vector>(y.data(), d);
    for (double t : ts) {
      emit("projection", "y=" + join(yv, ' ') + ";t=" + format_double(t), projection_tail(xs, yv, t, need_alpha()));
    }
  }
  {
    const std::size_t sk = f.spectral_k.value_or(k);
    const auto sm = empirical_spectral_measure(xs, sk);
    for (std::size_t cell = 0; cell < sm.counts.size(); ++cell) {
      TailReport r;
      r.value = sm.used > 0 ? static_cast<double>(sm.counts[cell]) / static_cast<double>(sm.used) : 0.0;
      r.se = sm.used > 0 ? std::sqrt(r.value * (1.0 - r.value) / static_cast<double>(sm.used)) : 0.0;
      r.n = sm.used;
      const char sign = cell % 2 == 0 ? '+' : '-';
      emit("spectral", std::string("face=") + sign + "e" + std::to_string(cell / 2 + 1) + ";k=" + std::to_string(sk), r);
    }
  }
  man.artifacts = {f.out};
  man.wall_clock_seconds = clock.seconds();
  write_manifest(man, f.out + ".manifest.json");
  out << "wrote estimates for " << xs.size() << " samples to " << f.out << '\n';
  return kOk;
}

struct VerifyFlags {
  std::string cones;
  std::optional<int> depth;
  std::optional<double> tol;
  std::size_t reps_theory = 100000;
  std::size_t reps_empirical = 1000000;
  std::size_t reps_contraction = 10000;
  int m_max = 20;
  int horizon = 100;
  double delta = 0.1;
  double rel_tol = 0.10;
  bool strict = false;
  std::string out_prefix;
};

int cmd_verify(const Common& c, const VerifyFlags& f, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  const auto cfg = load_config(c.config, err);
  const auto& spec = cfg.spec;
  const auto cones = load_cones_file(f.cones, spec.d());
  const Exec exec{effective_workers(c.workers)};
  const Seed seed{c.seed};
  RunManifest man{"verify", cfg.hash, c.seed, exec.workers,
                  {{"cones", read_json_file(f.cones)},
                   {"reps_theory", f.reps_theory},
                   {"reps_empirical", f.reps_empirical},
                   {"reps_contraction", f.reps_contraction},
                   {"m_max", f.m_max},
                   {"horizon", f.horizon},
                   {"delta", f.delta}}, {}};
  if (f.depth) {
    man.params["depth"] = *f.depth;
  } else {
    man.params["tol"] = f.tol.value_or(1e-6);
  }
  const std::string hash = man.hash();
  const std::string p = f.out_prefix;

  const auto assumptions =
      verify_assumptions(spec, {f.horizon, f.reps_contraction, f.m_max}, derive(seed, "assumptions"), exec);
  write_json(p + "_assumptions.json", to_json(assumptions));
  write_moments_csv(p + "_moments.csv", hash, assumptions.moment_rows);
  man.artifacts = {p + "_assumptions.json", p + "_moments.csv"};
  if (!assumptions.witness) {
    man.wall_clock_seconds = clock.seconds();
    write_manifest(man, p + "_manifest.json");
    throw StatisticalFailure("no contraction witness for m <= " + std::to_string(f.m_max) +
                             "; theorem comparison skipped");
  }
  const auto& witness = *assumptions.witness;
  const int depth = resolve_depth(spec, f.depth, f.tol, witness, f.reps_contraction, seed, exec);

  const auto rep = verify_theorem(spec, cones, depth, f.reps_theory, f.reps_empirical, seed, witness, exec);
  bool passed = true;
  for (const auto& r : rep.rows) passed = passed && r.rel_err <= f.rel_tol;
  json doc = to_json(rep);
  doc["strict"] = {{"rel_tol", f.rel_tol}, {"passed", passed}};
  write_json(p + "_theorem.json", doc);
  {
    CsvWriter csv(p + "_theorem.csv", hash, {"cone_id", "t", "theo", "theo_se", "emp", "emp_se", "rel_err"});
    for (const auto& r : rep.rows) {
      csv.row({r.cone_id, format_double(r.level), format_double(r.theo), format_double(r.theo_se),
               format_double(r.emp), format_double(r.emp_se), format_double(r.rel_err)});
    }
  }

  std::set<int> lag_set{0, depth / 4, depth / 2};
  std::set<double> level_set;
  for (const auto& cone : cones) level_set.insert(cone.level);
  const auto remainder =
      remainder_diagnostic(spec, {lag_set.begin(), lag_set.end()}, f.delta, {level_set.begin(), level_set.end()},
                           depth, f.reps_empirical, derive(seed, "remainder"), witness, exec);
  {
    CsvWriter csv(p + "_remainder.csv", hash, {"lag", "t", "delta", "value", "se", "exceedances", "n"});
    for (const auto& r : remainder) {
      csv.row({std::to_string(r.lag), format_double(r.level), format_double(r.delta), format_double(r.value),
               format_double(r.se), std::to_string(r.exceedances), std::to_string(r.n)});
    }
  }
  man.artifacts.insert(man.artifacts.end(), {p + "_theorem.json", p + "_theorem.csv", p + "_remainder.csv"});
  man.wall_clock_seconds = clock.seconds();
  write_manifest(man, p + "_manifest.json");

  out << "depth " << depth << ", contraction m " << witness.m() << '\n';
  for (const auto& r : rep.rows) {
    out << r.cone_id << " t=" << format_double(r.level) << " theo=" << format_double(r.theo)
        << " emp=" << format_double(r.emp) << " rel_err=" << format_double(r.rel_err) << '\n';
  }
  if (f.strict && !passed) {
    err << "theorem comparison outside rel_tol " << format_double(f.rel_tol) << '\n';
    return kStatistical;
  }
  return kOk;
}

json csv_as_json(const std::string& path) {
  const auto table = read_csv(path);
  json rows = json::array();
  for (const auto& row : table.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& cell = row[i];
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      const bool numeric = !cell.empty() && *end == '\0' && std::isfinite(v);
      obj[table.header[i]] = numeric ? json(v) : json(cell);
    }
    rows.push_back(std::move(obj));
  }
  return {{"manifest_hash", table.manifest_hash}, {"columns", table.header}, {"rows", rows}};
}

int cmd_report(const std::string& prefix, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> required{"_theorem.json", "_assumptions.json", "_theorem.csv", "_moments.csv",
                                          "_remainder.csv"};
  std::vector<std::string> missing;
  for (const auto& suffix : required) {
    if (!std::ifstream(prefix + suffix)) missing.push_back(prefix + suffix);
  }
  if (!missing.empty()) {
    err << "missing inputs:\n";
    for (const auto& m : missing) err << "  " << m << '\n';
    return kValidation;
  }
  json summary = {{"assumptions", read_json_file(prefix + "_assumptions.json")},
                  {"theorem", read_json_file(prefix + "_theorem.json")},
                  {"tables",
                   {{"theorem", csv_as_json(prefix + "_theorem.csv")},
                    {"moments", csv_as_json(prefix + "_moments.csv")},
                    {"remainder", csv_as_json(prefix + "_remainder.csv")}}}};
  if (std::ifstream(prefix + "_estimates.csv")) {
    summary["tables"]["estimates"] = csv_as_json(prefix + "_estimates.csv");
  }
  write_json(prefix + "_summary.json", summary);
  out << "wrote " << prefix << "_summary.json\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regime-driven heavy-tailed linear recursion: simulation and verification"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&common](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", common.config, "model config (JSON)");
    if (config_required) opt->required();
    sub->add_option("--seed", common.seed, "master seed");
    sub->add_option("--workers", common.workers, "worker threads (HEAVYTAIL_WORKERS overrides)");
  };

  auto* validate = app.add_subcommand("validate", "check a model config");
  add_common(validate, true);

  AssumptionFlags af;
  auto* assume = app.add_subcommand("verify-assumptions", "Lyapunov exponent, moment scan and contraction lag");
  add_common(assume, true);
  assume->add_option("--horizon", af.horizon, "product horizon n");
  assume->add_option("--reps", af.reps, "replicas");
  assume->add_option("--m-max", af.m_max, "largest contraction lag scanned");
  assume->add_option("--out-prefix", af.out_prefix, "output prefix")->required();
  assume->add_flag("--strict", af.strict, "exit 2 unless every assumption check passes");

  SimulateFlags sf;
  auto* simulate = app.add_subcommand("simulate", "forward paths or stationary draws");
  add_common(simulate, true);
  simulate->add_option("--mode", sf.mode, "path or stationary")->check(CLI::IsMember({"path", "stationary"}));
  simulate->add_option("--steps", sf.steps, "path length");
  simulate->add_option("--reps", sf.reps, "stationary draws");
  simulate->add_option("--burn-in", sf.burn_in, "discarded leading steps");
  auto* depth_opt = simulate->add_option("--depth", sf.depth, "series truncation depth");
  simulate->add_option("--tol", sf.tol, "remainder-moment tolerance for the depth")->excludes(depth_opt);
  simulate->add_option("--m-max", sf.m_max, "largest contraction lag scanned");
  simulate->add_option("--reps-contraction", sf.reps_contraction, "replicas for the contraction scan");
  simulate->add_option("--out", sf.out, "output CSV")->required();

  EstimateFlags ef;
  auto* estimate = app.add_subcommand("estimate", "tail estimators on a stationary-sample CSV");
  add_common(estimate, false);
  estimate->add_option("--in", ef.in, "stationary-sample CSV")->required();
  estimate->add_option("--alpha", ef.alpha, "tail index used to scale tail measures");
  estimate->add_option("--hill-k", ef.hill_k, "Hill order statistic count");
  estimate->add_option("--hill-plot", ef.hill_plot, "comma-separated k values");
  estimate->add_option("--levels", ef.levels, "comma-separated norm levels");
  estimate->add_option("--cones", ef.cones, "cone file (JSON)");
  estimate->add_option("--proj", ef.proj, "projection vector 'y1 y2 ...[@t1,t2]'");
  estimate->add_option("--spectral-k", ef.spectral_k, "order statistics for the spectral measure");
  estimate->add_option("--out", ef.out, "output CSV")->required();

  VerifyFlags vf;
  auto* verify = app.add_subcommand("verify", "theoretical vs empirical tail measures");
  add_common(verify, true);
  verify->add_option("--cones", vf.cones, "cone file (JSON)")->required();
  auto* vdepth = verify->add_option("--depth", vf.depth, "series truncation depth");
  verify->add_option("--tol", vf.tol, "remainder-moment tolerance for the depth")->excludes(vdepth);
  verify->add_option("--reps-theory", vf.reps_theory, "replicas for the theoretical side");
  verify->add_option("--reps-empirical", vf.reps_empirical, "stationary draws for the empirical side");
  verify->add_option("--reps-contraction", vf.reps_contraction, "replicas for the assumption scan");
  verify->add_option("--m-max", vf.m_max, "largest contraction lag scanned");
  verify->add_option("--horizon", vf.horizon, "product horizon for the Lyapunov estimate");
  verify->add_option("--delta", vf.delta, "remainder threshold fraction");
  verify->add_option("--rel-tol", vf.rel_tol, "relative error allowed under --strict");
  verify->add_flag("--strict", vf.strict, "exit 2 if any cone exceeds --rel-tol");
  verify->add_option("--out-prefix", vf.out_prefix, "output prefix")->required();

  std::string report_prefix;
  auto* report = app.add_subcommand("report", "merge prior outputs into one summary");
  report->add_option("--out-prefix", report_prefix, "prefix used by earlier runs")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << e.what() << "\n\n" << app.help();
    return kValidation;
  }

  try {
    if (*validate) return cmd_validate(common, out, err);
    if (*assume) return cmd_verify_assumptions(common, af, out, err);
    if (*simulate) return cmd_simulate(common, sf, out, err);
    if (*estimate) return cmd_estimate(common, ef, out, err);
    if (*verify) return cmd_verify(common, vf, out, err);
    if (*report) return cmd_report(report_prefix, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const StatisticalFailure& e) {
    err << "statistical failure: " << e.what() << '\n';
    return kStatistical;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntime;
  }
  return kValidation;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace heavytail::cli
