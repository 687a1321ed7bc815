#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "experiments.hpp"
#include "harness.hpp"
#include "lomv/asymptotics.hpp"
#include "lomv/error.hpp"
#include "lomv/io.hpp"
#include "lomv/montecarlo.hpp"
#include "lomv/oracle.hpp"
#include "lomv/solver.hpp"

namespace lomv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Raised when a written artifact fails to re-parse under its schema.
class ArtifactError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// JSON has no infinities; non-finite values are written as strings.
json num(double x) {
  if (std::isfinite(x)) {
    return x;
  }
  return io::format_double(x);
}

json num(const std::optional<double>& x) {
  return x ? num(*x) : json(nullptr);
}

std::string utc_now(const char* format) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, format);
  return ss.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    return s;
  }
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') {
      quoted += '"';
    }
    quoted += c;
  }
  return quoted + "\"";
}

using Row = std::vector<std::string>;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

/// Output directory of one command run plus its manifest bookkeeping.
class RunOutput {
 public:
  RunOutput(const std::string& command, const std::optional<fs::path>& out,
            std::uint64_t seed)
      : started_at_(utc_now("%Y-%m-%dT%H:%M:%SZ")) {
    if (out) {
      dir_ = *out;
    } else {
      const fs::path parent = fs::path("runs") / command;
      const std::string stem =
          utc_now("%Y%m%dT%H%M%SZ") + "-" + std::to_string(seed);
      dir_ = parent / stem;
      for (int n = 1; fs::exists(dir_); ++n) {
        dir_ = parent / (stem + "-" + std::to_string(n));
      }
      link_latest_ = true;
    }
    fs::create_directories(dir_);
  }

  [[nodiscard]] const fs::path& dir() const noexcept { return dir_; }

  void write_csv(const std::string& name, const Row& header,
                 const std::vector<Row>& rows) {
    const fs::path path = dir_ / name;
    {
      std::ofstream f(path, std::ios::binary);
      write_row(f, header);
      for (const Row& r : rows) {
        write_row(f, r);
      }
      if (!f) {
        throw ArtifactError("failed writing " + path.string());
      }
    }
    validate_csv(path, header, rows.size());
    outputs_.push_back(name);
  }

  void write_json(const std::string& name, const json& value) {
    const fs::path path = dir_ / name;
    {
      std::ofstream f(path, std::ios::binary);
      f << value.dump(2) << '\n';
      if (!f) {
        throw ArtifactError("failed writing " + path.string());
      }
    }
    const json back = json::parse(io::read_text_file(path), nullptr, false);
    if (back.is_discarded() || back != value) {
      throw ArtifactError(path.string() + " does not round-trip");
    }
    outputs_.push_back(name);
  }

  /// Writes manifest.json and refreshes the `latest` link.
  void finish(const std::string& command, const std::vector<std::string>& args,
              const json& config, std::optional<std::uint64_t> seed,
              int exit_code) {
    json m;
    m["command"] = command;
    m["args"] = args;
    m["cwd"] = fs::current_path().string();
    m["config"] = config;
    m["version"] = kVersion;
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["started_at"] = started_at_;
    m["finished_at"] = utc_now("%Y-%m-%dT%H:%M:%SZ");
    m["exit_code"] = exit_code;
    m["outputs"] = outputs_;
    std::ofstream(dir_ / "manifest.json", std::ios::binary) << m.dump(2)
                                                             << '\n';
    if (link_latest_) {
      const fs::path link = dir_.parent_path() / "latest";
      std::error_code ec;
      fs::remove(link, ec);
      fs::create_directory_symlink(dir_.filename(), link, ec);
    }
  }

 private:
  static void write_row(std::ostream& f, const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      f << (i ? "," : "") << csv_field(r[i]);
    }
    f << '\n';
  }

  static void validate_csv(const fs::path& path, const Row& header,
                           std::size_t expected_rows) {
    std::istringstream in(io::read_text_file(path));
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      const auto fields = split_csv_line(line);
      if (n == 0 && fields != header) {
        throw ArtifactError(path.string() + ": header mismatch");
      }
      if (fields.size() != header.size()) {
        throw ArtifactError(path.string() + ": line " + std::to_string(n + 1) +
                            " has " + std::to_string(fields.size()) +
                            " fields");
      }
      ++n;
    }
    if (n != expected_rows + 1) {
      throw ArtifactError(path.string() + ": row count mismatch");
    }
  }

  fs::path dir_;
  bool link_latest_ = false;
  std::string started_at_;
  std::vector<std::string> outputs_;
};

std::string fmt(double x) { return io::format_double(x); }

std::string fmt(std::size_t x) { return std::to_string(x); }

json summary_json(const Summary& s) {
  return {{"mean", num(s.mean)},
          {"sd", num(s.sd)},
          {"q05", num(s.q05)},
          {"q50", num(s.q50)},
          {"q95", num(s.q95)}};
}

json delta_json(const DeltaModel& d) {
  if (d.kind == DeltaModel::Kind::kConstant) {
    return {{"kind", "constant"}, {"delta2", d.delta2}};
  }
  return {{"kind", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
}

json dist_json(const BetaDistribution& d) {
  json j{{"kind", d.kind_name()}};
  if (const auto* n = d.as_normal()) {
    j["mu"] = n->mu;
    j["s"] = n->s;
  } else if (const auto* u = d.as_uniform()) {
    j["a"] = u->a;
    j["b"] = u->b;
  } else if (const auto* a = d.as_discrete()) {
    json atoms = json::array();
    for (const Atom& at : a->atoms) {
      atoms.push_back({at.location, at.mass});
    }
    j["atoms"] = atoms;
  }
  return j;
}

json sim_config_json(const SimConfig& c) {
  return {{"dist", dist_json(c.dist)},   {"delta", delta_json(c.delta)},
          {"sigma2", c.sigma2},          {"p", c.p},
          {"trials", c.trials},          {"seed", c.seed},
          {"parallel", c.parallel}};
}

json report_json(const AsymptoticReport& r) {
  return {{"case", to_string(r.case_label)},
          {"beta_star", num(r.beta_star)},
          {"f_beta_star", num(r.f_beta_star)},
          {"f_beta_star_left", num(r.f_beta_star_left)},
          {"atom_mass", num(r.atom_at_beta_star)},
          {"liminf", num(r.liminf)},
          {"limsup", num(r.limsup)},
          {"limit", num(r.limit)},
          {"prob_negative", num(r.prob_negative)},
          {"mean", num(r.mean)},
          {"flipped", r.flipped}};
}

const Row kTrialHeader{"trial", "seed", "p", "k", "active_ratio",
                       "beta_star_p", "mode"};

std::vector<Row> trial_rows(const TrialBatch& b) {
  std::vector<Row> rows;
  rows.reserve(b.active_counts.size());
  for (std::size_t t = 0; t < b.active_counts.size(); ++t) {
    rows.push_back({fmt(t), std::to_string(b.trial_seeds[t]), fmt(b.p),
                    fmt(b.active_counts[t]), fmt(b.active_ratios[t]),
                    fmt(b.beta_star_p[t]), to_string(b.modes[t])});
  }
  return rows;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "on" || s == "yes") {
    return true;
  }
  if (s == "false" || s == "0" || s == "off" || s == "no") {
    return false;
  }
  throw InputError("--parallel expects true or false, got '" + s + "'");
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  std::string csv;
  std::optional<double> sigma2;
  double kkt_tolerance = 1e-8;
  std::optional<std::string> out;
};

int cmd_solve(const SolveOptions& o, const std::vector<std::string>& args,
              std::ostream& out) {
  const fs::path csv = o.csv;
  double sigma2 = 0.0;
  if (o.sigma2) {
    sigma2 = *o.sigma2;
  } else {
    fs::path sidecar = csv;
    sidecar.replace_extension(".json");
    if (!fs::exists(sidecar)) {
      throw InputError("no --sigma2 given and no sidecar " + sidecar.string());
    }
    sigma2 = io::read_sigma2_sidecar(sidecar);
  }
  const FactorModel model = io::read_instance_csv(csv, sigma2);
  RunOutput run("solve", o.out ? std::optional<fs::path>(*o.out) : std::nullopt,
                0);

  const LomvSolution sol = solve_lomv(model);
  const KktCertificate kkt = verify_kkt(model, sol.weights, o.kkt_tolerance);

  std::vector<Row> rows;
  for (std::size_t i = 0; i < model.size(); ++i) {
    rows.push_back({fmt(i), fmt(model.beta(i)), fmt(model.delta2(i)),
                    fmt(sol.weights[i]), sol.weights[i] > 0.0 ? "1" : "0"});
  }
  run.write_csv("weights.csv", {"index", "beta", "delta2", "weight", "active"},
                rows);
  const json solution{
      {"p", model.size()},
      {"sigma2", sigma2},
      {"k", sol.k},
      {"threshold_beta", num(sol.threshold_beta)},
      {"variance", num(sol.variance)},
      {"flipped", sol.flipped},
      {"active_indices", sol.active_original_indices},
      {"kkt",
       {{"stationarity_residual", num(kkt.stationarity_residual)},
        {"complementarity_residual", num(kkt.complementarity_residual)},
        {"min_lambda", num(kkt.min_lambda)},
        {"min_weight", num(kkt.min_weight)},
        {"budget_residual", num(kkt.budget_residual)},
        {"nu", num(kkt.nu)},
        {"tolerance", kkt.tolerance},
        {"passed", kkt.passed}}}};
  run.write_json("solution.json", solution);
  const int code = kkt.passed ? kExitOk : kExitVerification;
  run.finish("solve", args,
             {{"csv", o.csv}, {"sigma2", sigma2},
              {"kkt_tolerance", o.kkt_tolerance}},
             std::nullopt, code);
  out << "k=" << sol.k << " p=" << model.size()
      << " variance=" << fmt(sol.variance)
      << " kkt=" << (kkt.passed ? "PASS" : "FAIL") << " -> "
      << run.dir().string() << '\n';
  return code;
}

// --------------------------------------------------------- oracle-check

struct OracleOptions {
  std::size_t p_max = 12;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

int cmd_oracle_check(const OracleOptions& o,
                     const std::vector<std::string>& args, std::ostream& out) {
  if (o.trials == 0) {
    throw InputError("--trials must be positive");
  }
  if (o.p_max == 0 || o.p_max > kDefaultOracleCap) {
    throw InputError("--p-max must be in [1, " +
                     std::to_string(kDefaultOracleCap) + "]");
  }
  RunOutput run("oracle-check",
                o.out ? std::optional<fs::path>(*o.out) : std::nullopt, o.seed);
  std::mt19937_64 rng(o.seed);
  std::size_t mismatches = 0;
  double max_weight_diff = 0.0;
  double max_var_rel = 0.0;
  for (std::size_t t = 0; t < o.trials; ++t) {
    const FactorModel model = harness::random_oracle_instance(rng, o.p_max);
    const LomvSolution sol = solve_lomv(model);
    const OracleResult ref =
        oracle_solve(DenseCovariance::from_factor_model(model), o.p_max);
    if (sol.active_original_indices != ref.active_set) {
      ++mismatches;
    }
    for (std::size_t i = 0; i < model.size(); ++i) {
      max_weight_diff =
          std::max(max_weight_diff, std::abs(sol.weights[i] - ref.weights[i]));
    }
    max_var_rel = std::max(
        max_var_rel, std::abs(sol.variance - ref.variance) / ref.variance);
  }
  const bool passed = mismatches == 0 && max_weight_diff <= 1e-9;
  run.write_json("oracle_report.json",
                 {{"trials", o.trials},
                  {"p_max", o.p_max},
                  {"seed", o.seed},
                  {"active_set_mismatches", mismatches},
                  {"max_weight_discrepancy", num(max_weight_diff)},
                  {"max_variance_relative_discrepancy", num(max_var_rel)},
                  {"weight_tolerance", 1e-9},
                  {"passed", passed}});
  const int code = passed ? kExitOk : kExitVerification;
  run.finish("oracle-check", args,
             {{"p_max", o.p_max}, {"trials", o.trials}, {"seed", o.seed}},
             o.seed, code);
  out << "trials=" << o.trials << " mismatches=" << mismatches
      << " max_weight_discrepancy=" << fmt(max_weight_diff) << ' '
      << (passed ? "PASS" : "FAIL") << " -> " << run.dir().string() << '\n';
  return code;
}

// ------------------------------------------------------------ asymptote

struct AsymptoteOptions {
  std::string dist;
  std::optional<std::string> out;
};

std::optional<ThetaBound> bound_constants(const fs::path& path,
                                          const BetaDistribution& dist) {
  const json j = json::parse(io::read_text_file(path), nullptr, false);
  if (j.is_object() && j.contains("bound_constants")) {
    const json& c = j["bound_constants"];
    ThetaBound tb;
    try {
      tb.mu = c.at("mu").get<double>();
      tb.second_moment_c = c.at("C").get<double>();
      tb.cond_neg_second_k = c.at("K").get<double>();
      tb.concentration_m = c.at("M").get<double>();
    } catch (const json::exception& e) {
      throw InputError(std::string("bound_constants: ") + e.what());
    }
    return tb;
  }
  if (const auto* n = dist.as_normal(); n && n->mu > 0.0) {
    return normal_theta_constants(n->mu, n->s);
  }
  return std::nullopt;
}

int cmd_asymptote(const AsymptoteOptions& o,
                  const std::vector<std::string>& args, std::ostream& out) {
  const BetaDistribution dist = io::read_distribution_json(o.dist);
  const AsymptoticReport rep = classify_and_solve(dist);
  const auto constants = bound_constants(o.dist, dist);
  RunOutput run("asymptote",
                o.out ? std::optional<fs::path>(*o.out) : std::nullopt, 0);

  json j = report_json(rep);
  j["distribution"] = dist_json(dist);
  const double eps = dist.cdf(0.0);
  if (constants && eps > 0.0 && eps < 1.0) {
    const double bound = theta_bound(*constants, eps);
    j["theta_bound"] = {{"mu", constants->mu},
                        {"C", constants->second_moment_c},
                        {"K", constants->cond_neg_second_k},
                        {"M", num(constants->concentration_m)},
                        {"theta", num(constants->theta())},
                        {"epsilon", eps},
                        {"bound", num(bound)},
                        {"holds", rep.f_beta_star <= bound}};
  } else {
    j["theta_bound"] = nullptr;
  }
  run.write_json("asymptote.json", j);
  run.finish("asymptote", args, {{"dist", o.dist}}, std::nullopt, kExitOk);
  out << "case=" << to_string(rep.case_label)
      << " beta_star=" << fmt(rep.beta_star)
      << " F(beta*)=" << fmt(rep.f_beta_star)
      << " F(beta*-)=" << fmt(rep.f_beta_star_left) << " -> "
      << run.dir().string() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------- simulate

struct SimOverrides {
  std::optional<std::string> config;
  std::optional<std::string> dist;
  std::optional<double> delta2;
  std::optional<double> sigma2;
  std::optional<std::size_t> p;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> parallel;
  std::optional<std::string> out;
};

template <typename T>
T config_value(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config field '") + key + "': " + e.what());
  }
}

SimConfig load_sim_config(const SimOverrides& o) {
  SimConfig c;
  if (o.config) {
    const fs::path path = *o.config;
    json j;
    try {
      j = json::parse(io::read_text_file(path));
    } catch (const json::parse_error& e) {
      throw InputError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) {
      throw InputError(path.string() + ": config must be a JSON object");
    }
    if (j.contains("dist")) {
      c.dist = io::parse_distribution_json(j["dist"].dump(),
                                           path.parent_path());
    } else if (j.contains("dist_path")) {
      fs::path dp = config_value<std::string>(j, "dist_path");
      if (dp.is_relative()) {
        dp = path.parent_path() / dp;
      }
      c.dist = io::read_distribution_json(dp);
    }
    if (j.contains("delta2")) {
      c.delta = DeltaModel::constant(config_value<double>(j, "delta2"));
    } else if (j.contains("delta")) {
      const json& d = j["delta"];
      const std::string kind = config_value<std::string>(d, "kind");
      if (kind == "constant") {
        c.delta = DeltaModel::constant(config_value<double>(d, "delta2"));
      } else if (kind == "uniform") {
        c.delta = DeltaModel::uniform(config_value<double>(d, "lo"),
                                      config_value<double>(d, "hi"));
      } else {
        throw InputError("unsupported delta kind '" + kind + "'");
      }
    }
    if (j.contains("sigma2")) c.sigma2 = config_value<double>(j, "sigma2");
    if (j.contains("p")) c.p = config_value<std::size_t>(j, "p");
    if (j.contains("trials")) c.trials = config_value<std::size_t>(j, "trials");
    if (j.contains("seed")) c.seed = config_value<std::uint64_t>(j, "seed");
    if (j.contains("parallel")) c.parallel = config_value<bool>(j, "parallel");
  }
  if (o.dist) c.dist = io::read_distribution_json(*o.dist);
  if (o.delta2) c.delta = DeltaModel::constant(*o.delta2);
  if (o.sigma2) c.sigma2 = *o.sigma2;
  if (o.p) c.p = *o.p;
  if (o.trials) c.trials = *o.trials;
  if (o.seed) c.seed = *o.seed;
  if (o.parallel) c.parallel = parse_bool(*o.parallel);
  c.validate();
  return c;
}

int cmd_simulate(const SimOverrides& o, const std::vector<std::string>& args,
                 std::ostream& out) {
  const SimConfig cfg = load_sim_config(o);
  const AsymptoticReport rep = classify_and_solve(cfg.dist);
  RunOutput run("simulate",
                o.out ? std::optional<fs::path>(*o.out) : std::nullopt,
                cfg.seed);
  const TrialBatch batch = nonconvergence_experiment(cfg);
  const ModeCounts modes = count_modes(batch);

  run.write_csv("trials.csv", kTrialHeader, trial_rows(batch));
  json s = summary_json(batch.summary);
  s.update(report_json(rep));
  s["p"] = cfg.p;
  s["trials"] = cfg.trials;
  s["nu2"] = num(batch.nu2);
  s["mode_counts"] = {
      {"low", modes.low}, {"high", modes.high}, {"other", modes.other}};
  run.write_json("summary.json", s);
  run.finish("simulate", args, sim_config_json(cfg), cfg.seed, kExitOk);
  out << "p=" << cfg.p << " trials=" << cfg.trials
      << " mean=" << fmt(batch.summary.mean) << " sd=" << fmt(batch.summary.sd)
      << " F(beta*)=" << fmt(rep.f_beta_star) << " -> " << run.dir().string()
      << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ reproduce

struct ReproduceOptions {
  std::string target;
  std::uint64_t seed = 0;
  std::size_t trials = harness::kPublishedTrials;
  std::string parallel = "true";
  std::optional<std::string> out;
};

std::string cell_name(const harness::PublishedCell& c) {
  return "cell_s" + fmt(c.s) + "_d" + fmt(c.delta2) + "_p" + fmt(c.p) + ".csv";
}

int reproduce_table(const ReproduceOptions& o, std::optional<double> delta2,
                    RunOutput& run, std::ostream& out) {
  const auto cells =
      experiments::run_table(o.seed, o.trials, parse_bool(o.parallel), delta2);
  std::vector<Row> rows;
  json jcells = json::array();
  bool all_within = true;
  double max_abs_z = 0.0;
  for (const auto& c : cells) {
    run.write_csv(cell_name(c.published), kTrialHeader, trial_rows(c.batch));
    const Summary& s = c.batch.summary;
    rows.push_back({fmt(c.published.s), fmt(c.published.delta2),
                    fmt(c.published.p), fmt(c.f_beta_star), fmt(s.mean),
                    fmt(s.sd), fmt(s.q05), fmt(s.q50), fmt(s.q95),
                    fmt(c.published.mean), fmt(c.published.sd),
                    fmt(c.z_score), c.within_4se ? "1" : "0"});
    json jc = summary_json(s);
    jc["s"] = c.published.s;
    jc["delta2"] = c.published.delta2;
    jc["p"] = c.published.p;
    jc["f_beta_star"] = num(c.f_beta_star);
    jc["beta_star"] = num(c.beta_star);
    jc["published_mean"] = c.published.mean;
    jc["published_sd"] = c.published.sd;
    jc["z_score"] = num(c.z_score);
    jc["within_4se"] = c.within_4se;
    jc["trials_csv"] = cell_name(c.published);
    jcells.push_back(jc);
    all_within = all_within && c.within_4se;
    max_abs_z = std::max(max_abs_z, std::abs(c.z_score));
    out << "s=" << fmt(c.published.s) << " delta2=" << fmt(c.published.delta2)
        << " p=" << c.published.p << " mean=" << fmt(s.mean)
        << " sd=" << fmt(s.sd) << " published=" << fmt(c.published.mean)
        << " z=" << fmt(c.z_score) << '\n';
  }
  run.write_csv("cells.csv",
                {"s", "delta2", "p", "f_beta_star", "mean", "sd", "q05", "q50",
                 "q95", "published_mean", "published_sd", "z_score",
                 "within_4se"},
                rows);
  run.write_json("comparison.json",
                 {{"target", o.target},
                  {"reference", "published active-ratio table, 400 trials"},
                  {"trials", o.trials},
                  {"cells", jcells},
                  {"max_abs_z", num(max_abs_z)},
                  {"all_within_4se", all_within}});
  return all_within ? kExitOk : kExitVerification;
}

int reproduce_fig4(const ReproduceOptions& o, RunOutput& run,
                   std::ostream& out) {
  const BetaDistribution dist = harness::four_atom_distribution();
  const AsymptoticReport rep = classify_and_solve(dist);
  const auto runs =
      experiments::run_nonconvergence(o.seed, o.trials, parse_bool(o.parallel));
  json per_p = json::array();
  for (const auto& r : runs) {
    const std::string name = "trials_p" + fmt(r.p) + ".csv";
    run.write_csv(name, kTrialHeader, trial_rows(r.batch));
    json jp = summary_json(r.batch.summary);
    jp["p"] = r.p;
    jp["trials_csv"] = name;
    jp["mode_counts"] = {{"low", r.modes.low},
                         {"high", r.modes.high},
                         {"other", r.modes.other}};
    per_p.push_back(jp);
    out << "p=" << r.p << " low=" << r.modes.low << " high=" << r.modes.high
        << " other=" << r.modes.other << '\n';
  }
  const GCurve g(dist);
  std::vector<Row> grows;
  for (int i = 0; i <= 600; ++i) {
    const double y = i / 100.0;
    const double v = g(y);
    grows.push_back({fmt(y), fmt(v), v > 0.0 ? "1" : (v < 0.0 ? "-1" : "0")});
  }
  run.write_csv("g_curve.csv", {"y", "g", "sign"}, grows);
  json s = report_json(rep);
  s["distribution"] = dist_json(dist);
  s["g_at_beta_star"] = num(g(rep.beta_star));
  s["sigma2"] = 1.0;
  s["delta2"] = 0.1;
  s["trials"] = o.trials;
  s["per_p"] = per_p;
  run.write_json("summary.json", s);
  out << "beta_star=" << fmt(rep.beta_star) << '\n';
  return rep.beta_star == 2.0 ? kExitOk : kExitVerification;
}

int reproduce_fig1(const ReproduceOptions& o, RunOutput& run,
                   std::ostream& out) {
  const auto cmp = experiments::run_weight_comparison(o.seed);
  std::vector<Row> rows;
  for (std::size_t i = 0; i < cmp.model.size(); ++i) {
    rows.push_back({fmt(i), fmt(cmp.model.beta(i)), fmt(cmp.model.delta2(i)),
                    fmt(cmp.lomv.weights[i]), fmt(cmp.gmv[i]),
                    cmp.lomv.weights[i] > 0.0 ? "1" : "0"});
  }
  run.write_csv("weights.csv",
                {"index", "beta", "delta2", "lomv_weight", "gmv_weight",
                 "lomv_active"},
                rows);
  const double p = static_cast<double>(cmp.model.size());
  run.write_json(
      "counts.json",
      {{"p", cmp.model.size()},
       {"sigma2", 1.0},
       {"delta2", 0.25},
       {"lomv_active", cmp.lomv_active},
       {"lomv_active_negative_beta", cmp.lomv_active_negative_beta},
       {"lomv_threshold_beta", num(cmp.lomv.threshold_beta)},
       {"gmv_positive", cmp.gmv_positive},
       {"gmv_positive_fraction", static_cast<double>(cmp.gmv_positive) / p}});
  out << "lomv_active=" << cmp.lomv_active
      << " (negative beta: " << cmp.lomv_active_negative_beta
      << ") gmv_positive=" << cmp.gmv_positive << '\n';
  return kExitOk;
}

int cmd_reproduce(const ReproduceOptions& o,
                  const std::vector<std::string>& args, std::ostream& out) {
  static const std::vector<std::string> kTargets{"table1", "fig1", "fig2",
                                                 "fig3", "fig4"};
  if (std::find(kTargets.begin(), kTargets.end(), o.target) == kTargets.end()) {
    throw InputError("unknown target '" + o.target +
                     "' (expected table1, fig1, fig2, fig3 or fig4)");
  }
  if (o.trials == 0) {
    throw InputError("--trials must be positive");
  }
  parse_bool(o.parallel);
  RunOutput run("reproduce-" + o.target,
                o.out ? std::optional<fs::path>(*o.out) : std::nullopt, o.seed);
  int code = kExitOk;
  if (o.target == "table1") {
    code = reproduce_table(o, std::nullopt, run, out);
  } else if (o.target == "fig2") {
    code = reproduce_table(o, 0.5, run, out);
  } else if (o.target == "fig3") {
    code = reproduce_table(o, 0.1, run, out);
  } else if (o.target == "fig4") {
    code = reproduce_fig4(o, run, out);
  } else {
    code = reproduce_fig1(o, run, out);
  }
  run.finish("reproduce", args,
             {{"target", o.target},
              {"seed", o.seed},
              {"trials", o.trials},
              {"parallel", parse_bool(o.parallel)}},
             o.seed, code);
  out << "-> " << run.dir().string() << '\n';
  return code;
}

// --------------------------------------------------------------- replay

struct ReplayOptions {
  std::string manifest;
  std::optional<std::string> out;
};

int cmd_replay(const ReplayOptions& o, std::ostream& out, std::ostream& err) {
  const fs::path manifest_path = fs::absolute(o.manifest);
  json m;
  try {
    m = json::parse(io::read_text_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw InputError(manifest_path.string() + ": " + e.what());
  }
  if (!m.contains("args") || !m["args"].is_array() || !m.contains("outputs")) {
    throw InputError(manifest_path.string() + ": not a run manifest");
  }
  std::vector<std::string> args;
  const auto recorded = m["args"].get<std::vector<std::string>>();
  for (std::size_t i = 0; i < recorded.size(); ++i) {
    if (recorded[i] == "--out") {
      ++i;
      continue;
    }
    if (recorded[i].starts_with("--out=")) {
      continue;
    }
    args.push_back(recorded[i]);
  }
  if (args.empty() || args.front() == "replay") {
    throw InputError(manifest_path.string() + ": nothing to replay");
  }
  fs::path target;
  if (o.out) {
    target = fs::absolute(*o.out);
  } else {
    target = fs::absolute(fs::path("runs") / "replay" /
                          (utc_now("%Y%m%dT%H%M%SZ") + "-" +
                           manifest_path.parent_path().filename().string()));
  }
  args.push_back("--out");
  args.push_back(target.string());

  const fs::path here = fs::current_path();
  if (m.contains("cwd") && m["cwd"].is_string()) {
    fs::current_path(m["cwd"].get<std::string>());
  }
  int code = kExitOk;
  try {
    code = run(args, out, err);
  } catch (...) {
    fs::current_path(here);
    throw;
  }
  fs::current_path(here);

  const fs::path original = manifest_path.parent_path();
  std::size_t differing = 0;
  for (const auto& name : m["outputs"].get<std::vector<std::string>>()) {
    const fs::path a = original / name;
    const fs::path b = target / name;
    if (!fs::exists(b) || io::read_text_file(a) != io::read_text_file(b)) {
      ++differing;
      err << "differs: " << name << '\n';
    }
  }
  out << "replay: " << m["outputs"].size() - differing << "/"
      << m["outputs"].size() << " outputs identical\n";
  if (differing > 0) {
    return kExitVerification;
  }
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Long-only minimum variance portfolios under a one-factor model",
               "lomv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Solve one instance from a CSV file");
  s->add_option("csv", solve.csv, "Instance CSV (beta,delta2)")->required();
  s->add_option("--sigma2", solve.sigma2,
                "Factor variance (default: sidecar <csv>.json)");
  s->add_option("--kkt-tol", solve.kkt_tolerance, "KKT tolerance")
      ->capture_default_str();
  s->add_option("--out", solve.out, "Output directory");

  OracleOptions oracle;
  auto* oc = app.add_subcommand("oracle-check",
                                "Cross-check the solver against enumeration");
  oc->add_option("--p-max", oracle.p_max, "Largest instance size")
      ->capture_default_str();
  oc->add_option("--trials", oracle.trials, "Number of instances")
      ->capture_default_str();
  oc->add_option("--seed", oracle.seed, "Seed")->capture_default_str();
  oc->add_option("--out", oracle.out, "Output directory");

  AsymptoteOptions asym;
  std::optional<std::string> asym_pos;
  auto* a = app.add_subcommand("asymptote",
                               "Limiting active ratio of a beta distribution");
  a->add_option("dist_json", asym_pos, "Distribution JSON");
  a->add_option("--dist", asym.dist, "Distribution JSON");
  a->add_option("--out", asym.out, "Output directory");

  SimOverrides sim;
  auto* sm = app.add_subcommand("simulate", "Monte Carlo active-ratio batch");
  sm->add_option("config", sim.config, "Simulation config JSON");
  sm->add_option("--dist", sim.dist, "Distribution JSON");
  sm->add_option("--delta2", sim.delta2, "Constant idiosyncratic variance");
  sm->add_option("--sigma2", sim.sigma2, "Factor variance");
  sm->add_option("--p", sim.p, "Number of assets");
  sm->add_option("--trials", sim.trials, "Number of trials");
  sm->add_option("--seed", sim.seed, "Seed");
  sm->add_option("--parallel", sim.parallel, "true or false");
  sm->add_option("--out", sim.out, "Output directory");

  ReproduceOptions rep;
  auto* r = app.add_subcommand("reproduce", "Regenerate a published experiment");
  r->add_option("target", rep.target, "table1, fig1, fig2, fig3 or fig4")
      ->required();
  r->add_option("--seed", rep.seed, "Seed")->capture_default_str();
  r->add_option("--trials", rep.trials, "Trials per cell")
      ->capture_default_str();
  r->add_option("--parallel", rep.parallel, "true or false")
      ->capture_default_str();
  r->add_option("--out", rep.out, "Output directory");

  ReplayOptions replay;
  auto* rp = app.add_subcommand("replay", "Re-run a command from its manifest");
  rp->add_option("manifest", replay.manifest, "manifest.json")->required();
  rp->add_option("--out", replay.out, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (s->parsed()) {
      return cmd_solve(solve, args, out);
    }
    if (oc->parsed()) {
      return cmd_oracle_check(oracle, args, out);
    }
    if (a->parsed()) {
      if (asym_pos) {
        asym.dist = *asym_pos;
      }
      if (asym.dist.empty()) {
        throw InputError("asymptote needs a distribution JSON");
      }
      return cmd_asymptote(asym, args, out);
    }
    if (sm->parsed()) {
      return cmd_simulate(sim, args, out);
    }
    if (r->parsed()) {
      return cmd_reproduce(rep, args, out);
    }
    return cmd_replay(replay, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitVerification;
  } catch (const ArtifactError& e) {
    err << "artifact validation failed: " << e.what() << '\n';
    return kExitVerification;
  }
}

}  // namespace lomv::cli
