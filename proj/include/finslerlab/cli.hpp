#pragma once

// Config-driven front end shared by the finslerlab executable and its tests.
//
//   finslerlab <eval|classify|verify|geodesic> --config <path>
//              [--out <dir>] [--format json|csv] [--seed N] [--samples N]
//
// Exit codes: 0 everything passed, 1 numeric or identity failure, 2 bad
// command line or config. Reports are JSON objects with sorted keys; the same
// config and seed always produce the same bytes.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "finslerlab/connections.hpp"
#include "finslerlab/conventions.hpp"
#include "finslerlab/curvature.hpp"
#include "finslerlab/metrics.hpp"
#include "finslerlab/parallel.hpp"
#include "finslerlab/processes.hpp"
#include "finslerlab/sampling.hpp"
#include "finslerlab/spray.hpp"

namespace finslerlab::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

struct Tolerances {
  double exact = 1e-8;           // exact-path identities and "vanishes" thresholds
  double fd = 1e-5;              // identities that go through finite differences or long contractions
  double classification = 1e-7;  // normalized predicate threshold
  double diagram = 1e-9;         // coefficient equalities between connections
};

struct VerifyOptions {
  std::vector<ConnectionKind> connections{ConnectionKind::kCartan, ConnectionKind::kChern, ConnectionKind::kBerwald,
                                          ConnectionKind::kHashiguchi};
  std::vector<ProcessKind> processes{ProcessKind::kMatsumotoC, ProcessKind::kMatsumotoL, ProcessKind::kShenC,
                                     ProcessKind::kShenL};
};

struct GeodesicOptions {
  Vec x0, y0;
  double duration = 1.0;
  int steps = 200;
  std::vector<Vec> frame;  // U, V, W; defaults to coordinate vectors
};

struct RunConfig {
  MetricSpec metric;
  SamplePlan plan;
  Tolerances tol;
  VerifyOptions verify;
  GeodesicOptions geodesic;
  bool has_geodesic = false;
  json echo;  // the config document after command-line overrides
};

namespace detail {

// Numbers may be given as JSON numbers or as decimal strings.
inline double number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == s.size() && !s.empty()) return v;
  }
  throw ConfigError(path + ": expected a number");
}

inline int integer(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(path + ": expected an integer");
  return static_cast<int>(v);
}

inline Vec vec(const json& j, const std::string& path, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ConfigError(path + ": expected an array of " + std::to_string(n) + " numbers");
  Vec v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

// Expression entries: strings, or numbers which are kept verbatim.
inline std::string expr(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw ConfigError(path + ": expected an expression string or number");
}

inline void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(path + ": unknown key '" + key + "'");
  }
}

inline double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(path + ": must be positive");
  return v;
}

}  // namespace detail

inline RunConfig parse_config(const json& doc) {
  using detail::check_keys;
  using detail::number;
  RunConfig cfg;
  check_keys(doc, "config", {"schema_version", "metric", "samples", "tolerances", "verify", "geodesic"});
  if (!doc.contains("schema_version") || detail::integer(doc["schema_version"], "schema_version") != kSchemaVersion)
    throw ConfigError("schema_version: expected " + std::to_string(kSchemaVersion));
  if (!doc.contains("metric")) throw ConfigError("metric: missing");

  const json& m = doc["metric"];
  check_keys(m, "metric", {"family", "dimension", "domain", "a", "b", "phi", "b0"});
  if (!m.contains("family") || !m["family"].is_string()) throw ConfigError("metric.family: expected a string");
  cfg.metric.family = parse_family(m["family"].get<std::string>());
  if (!m.contains("dimension")) throw ConfigError("metric.dimension: missing");
  const int n = detail::integer(m["dimension"], "metric.dimension");
  if (n < 2 || n > 4) throw ConfigError("metric.dimension: must be 2, 3 or 4");
  cfg.metric.dimension = n;
  if (!m.contains("domain")) throw ConfigError("metric.domain: missing");
  check_keys(m["domain"], "metric.domain", {"lower", "upper"});
  if (!m["domain"].contains("lower") || !m["domain"].contains("upper"))
    throw ConfigError("metric.domain: needs lower and upper");
  cfg.metric.domain.lower = detail::vec(m["domain"]["lower"], "metric.domain.lower", n);
  cfg.metric.domain.upper = detail::vec(m["domain"]["upper"], "metric.domain.upper", n);
  for (int i = 0; i < n; ++i)
    if (!(cfg.metric.domain.lower[static_cast<std::size_t>(i)] < cfg.metric.domain.upper[static_cast<std::size_t>(i)]))
      throw ConfigError("metric.domain: lower must be below upper");
  if (m.contains("a")) {
    const json& a = m["a"];
    if (!a.is_array() || static_cast<int>(a.size()) != n) throw ConfigError("metric.a: expected an n x n array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_array() || static_cast<int>(a[i].size()) != n) throw ConfigError("metric.a: expected an n x n array");
      std::vector<std::string> row;
      for (std::size_t j = 0; j < a[i].size(); ++j)
        row.push_back(detail::expr(a[i][j], "metric.a[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
      cfg.metric.a.push_back(row);
    }
  }
  if (m.contains("b")) {
    const json& b = m["b"];
    if (!b.is_array() || static_cast<int>(b.size()) != n) throw ConfigError("metric.b: expected an array of n entries");
    for (std::size_t i = 0; i < b.size(); ++i) cfg.metric.b.push_back(detail::expr(b[i], "metric.b[" + std::to_string(i) + "]"));
  }
  if (m.contains("phi")) cfg.metric.phi = detail::expr(m["phi"], "metric.phi");
  if (m.contains("b0")) cfg.metric.b0 = detail::positive(m["b0"], "metric.b0");

  if (doc.contains("samples")) {
    const json& s = doc["samples"];
    check_keys(s, "samples", {"count", "seed", "fiber_floor"});
    if (s.contains("count")) cfg.plan.count = detail::integer(s["count"], "samples.count");
    if (s.contains("seed")) {
      const double v = number(s["seed"], "samples.seed");
      if (v < 0 || v != std::floor(v) || v > 9007199254740992.0) throw ConfigError("samples.seed: expected a non-negative integer");
      cfg.plan.seed = static_cast<std::uint64_t>(v);
    }
    if (s.contains("fiber_floor")) cfg.plan.fiber_floor = detail::positive(s["fiber_floor"], "samples.fiber_floor");
  }
  if (cfg.plan.count < 1) throw ConfigError("samples.count: must be at least 1");

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    check_keys(t, "tolerances", {"exact", "fd", "classification", "diagram"});
    if (t.contains("exact")) cfg.tol.exact = detail::positive(t["exact"], "tolerances.exact");
    if (t.contains("fd")) cfg.tol.fd = detail::positive(t["fd"], "tolerances.fd");
    if (t.contains("classification"))
      cfg.tol.classification = detail::positive(t["classification"], "tolerances.classification");
    if (t.contains("diagram")) cfg.tol.diagram = detail::positive(t["diagram"], "tolerances.diagram");
  }

  if (doc.contains("verify")) {
    const json& v = doc["verify"];
    check_keys(v, "verify", {"connection", "process"});
    if (v.contains("connection")) {
      if (!v["connection"].is_string()) throw ConfigError("verify.connection: expected a string");
      const auto s = v["connection"].get<std::string>();
      if (s != "all") cfg.verify.connections = {parse_connection(s)};
    }
    if (v.contains("process")) {
      if (!v["process"].is_string()) throw ConfigError("verify.process: expected a string");
      const auto s = v["process"].get<std::string>();
      if (s != "all") cfg.verify.processes = {parse_process(s)};
    }
  }

  if (doc.contains("geodesic")) {
    const json& g = doc["geodesic"];
    check_keys(g, "geodesic", {"x0", "y0", "duration", "steps", "frame"});
    if (!g.contains("x0") || !g.contains("y0")) throw ConfigError("geodesic: needs x0 and y0");
    cfg.has_geodesic = true;
    cfg.geodesic.x0 = detail::vec(g["x0"], "geodesic.x0", n);
    cfg.geodesic.y0 = detail::vec(g["y0"], "geodesic.y0", n);
    if (g.contains("duration")) cfg.geodesic.duration = detail::positive(g["duration"], "geodesic.duration");
    if (g.contains("steps")) cfg.geodesic.steps = detail::integer(g["steps"], "geodesic.steps");
    if (cfg.geodesic.steps < 4) throw ConfigError("geodesic.steps: must be at least 4");
    if (g.contains("frame")) {
      const json& f = g["frame"];
      if (!f.is_array() || f.size() != 3) throw ConfigError("geodesic.frame: expected three vectors");
      for (std::size_t i = 0; i < 3; ++i) cfg.geodesic.frame.push_back(detail::vec(f[i], "geodesic.frame", n));
    }
  }
  if (cfg.geodesic.frame.empty())
    for (int k = 0; k < 3; ++k) {
      Vec e(static_cast<std::size_t>(n), 0.0);
      e[static_cast<std::size_t>(std::min(k, n - 1))] = 1.0;
      cfg.geodesic.frame.push_back(e);
    }
  cfg.echo = doc;
  return cfg;
}

// ---- serialization ----

inline json tensor_json(const Tensor& t) {
  const auto n = static_cast<std::size_t>(t.dim());
  std::function<json(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t offset) -> json {
    if (depth == static_cast<std::size_t>(t.rank())) {
      const double v = t[offset];
      return std::isfinite(v) ? json(v) : json(nullptr);
    }
    json a = json::array();
    for (std::size_t i = 0; i < n; ++i) a.push_back(rec(depth + 1, offset * n + i));
    return a;
  };
  return rec(0, 0);
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CommandResult {
  json report;
  int status = kExitOk;
  std::string csv;         // the report in long CSV form
  std::string trajectory;  // geodesic only
};

namespace detail {

inline json header(const std::string& command, const RunConfig& cfg) {
  json r;
  r["command"] = command;
  r["version"] = std::string(kVersion);
  r["conventions_hash"] = conventions_hash();
  r["schema_version"] = kSchemaVersion;
  r["config"] = cfg.echo;
  r["seed"] = cfg.plan.seed;
  return r;
}

inline json sample_json(const Sample& s) {
  return json{{"index", s.index}, {"x", s.x}, {"y", s.y}, {"v", s.v}};
}

inline void finish(CommandResult& res) {
  res.report["status"] = res.status == kExitOk ? "pass" : "fail";
  res.report["exit_code"] = res.status;
}

}  // namespace detail

// ---- commands ----

inline CommandResult cmd_eval(const MetricModel& model, const RunConfig& cfg) {
  CommandResult res;
  res.report = detail::header("eval", cfg);
  const auto samples = draw_samples(model.domain(), cfg.plan);
  struct Row {
    json record;
    std::vector<std::pair<std::string, Tensor>> fields;
    double F = 0.0, K = 0.0;
    bool has_K = false;
    std::string error;
  };
  auto rows = parallel_map(static_cast<int>(samples.size()), [&](int i) {
    const Sample& s = samples[static_cast<std::size_t>(i)];
    Row row;
    row.record = detail::sample_json(s);
    try {
      LocalGeometry geo(model, s.x, s.y, LocalGeometry::kFullOrder, cfg.plan.fiber_floor);
      row.F = geo.F().value();
      row.fields = {{"g", evaluate(geo.g())},     {"h", evaluate(geo.h())},      {"C", evaluate(geo.C())},
                    {"I", evaluate(geo.I())},     {"M", evaluate(geo.M())},      {"G", evaluate(geo.G())},
                    {"N", evaluate(geo.N())},     {"B", evaluate(berwald_field(geo))},
                    {"R", evaluate(geo.riemann())}, {"L", evaluate(geo.L())},    {"J", evaluate(geo.J())},
                    {"Lbar", evaluate(geo.Lbar())}};
      try {
        row.K = flag_curvature(geo, s.v);
        row.has_K = true;
      } catch (const DegenerateFlag&) {
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    return row;
  });

  json records = json::array();
  json maxima = json::object();
  std::ostringstream csv;
  csv << "sample,field,index,value\n";
  int failures = 0;
  for (const auto& row : rows) {
    json rec = row.record;
    const int idx = rec["index"].get<int>();
    if (!row.error.empty()) {
      rec["error"] = row.error;
      ++failures;
      records.push_back(rec);
      continue;
    }
    rec["F"] = row.F;
    csv << idx << ",F,," << fmt(row.F) << "\n";
    rec["K"] = row.has_K ? json(row.K) : json(nullptr);
    if (row.has_K) csv << idx << ",K,," << fmt(row.K) << "\n";
    for (const auto& [name, t] : row.fields) {
      rec[name] = tensor_json(t);
      const double mx = max_abs(t);
      maxima[name] = maxima.contains(name) ? std::max(maxima[name].get<double>(), mx) : mx;
      for (std::size_t flat = 0; flat < t.size(); ++flat) {
        std::string index;
        for (int a : t.unflatten(flat)) index += (index.empty() ? "" : ".") + std::to_string(a);
        csv << idx << "," << name << "," << index << "," << fmt(t[flat]) << "\n";
      }
    }
    records.push_back(rec);
  }
  res.report["samples"] = records;
  res.report["summary"] = {{"max_abs", maxima}, {"failed_samples", failures}, {"sample_count", samples.size()}};
  res.status = failures ? kExitFailure : kExitOk;
  res.csv = csv.str();
  detail::finish(res);
  return res;
}

inline CommandResult cmd_classify(const MetricModel& model, const RunConfig& cfg) {
  CommandResult res;
  res.report = detail::header("classify", cfg);
  const ClassificationReport rep = classify_metric(model, cfg.plan, cfg.tol.classification);
  json preds = json::array();
  json verdicts = json::object();
  std::ostringstream csv;
  csv << "predicate,tensor,holds,max_normalized,witness\n";
  for (const auto& p : rep.predicates) {
    preds.push_back({{"name", p.name},
                     {"tensor", p.tensor},
                     {"holds", p.holds},
                     {"max_normalized", p.max_normalized},
                     {"witness", {{"index", p.witness}, {"x", p.witness_x}, {"y", p.witness_y}}}});
    verdicts[p.name] = p.holds;
    csv << p.name << "," << p.tensor << "," << (p.holds ? "true" : "false") << "," << fmt(p.max_normalized) << ","
        << p.witness << "\n";
  }
  res.report["predicates"] = preds;
  res.report["summary"] = {{"verdicts", verdicts},
                           {"warnings", rep.warnings},
                           {"tolerance", rep.tolerance},
                           {"sample_count", rep.samples}};
  res.csv = csv.str();
  detail::finish(res);
  return res;
}

inline CommandResult cmd_verify(const MetricModel& model, const RunConfig& cfg) {
  CommandResult res;
  res.report = detail::header("verify", cfg);
  const auto samples = draw_samples(model.domain(), cfg.plan);
  json sample_list = json::array();
  for (const auto& s : samples) sample_list.push_back(detail::sample_json(s));
  res.report["samples"] = sample_list;

  std::ostringstream csv;
  csv << "process,base,check,pass,value,witness\n";
  bool ok = true;

  json diagram = json::array();
  for (const auto& e : diagram_commutation(model, samples)) {
    const bool pass = e.residual < cfg.tol.diagram;
    ok = ok && pass;
    diagram.push_back({{"lhs", e.lhs}, {"rhs", e.rhs}, {"residual", e.residual}, {"pass", pass}});
    csv << "diagram,," << e.lhs << "=" << e.rhs << "," << (pass ? "true" : "false") << "," << fmt(e.residual) << ",\n";
  }
  res.report["diagram"] = diagram;

  VerifyTolerances vt;
  vt.identity = cfg.tol.exact;
  vt.zero = cfg.tol.exact;
  vt.structure = cfg.tol.fd;
  json reports = json::array();
  for (auto base : cfg.verify.connections)
    for (auto kind : cfg.verify.processes) {
      json r;
      r["process"] = to_string(kind);
      r["base"] = to_string(base);
      try {
        const DeltaReport d = verify_process_identities(model, base, kind, samples, vt);
        r["pass"] = d.pass;
        r["hv_change_expected"] = d.expected_hv_change;
        r["max_residual"] = {{"hh", d.max_residual_R}, {"hv", d.max_residual_P}, {"vv", d.max_residual_Q}};
        r["max_delta"] = {{"hh", d.max_delta_R}, {"hv", d.max_delta_P}, {"vv", d.max_delta_Q}};
        json cons = json::array();
        for (const auto& c : d.consequences) {
          cons.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"value", c.value},
                          {"witness", c.witness},
                          {"detail", c.detail}});
          csv << d.process << "," << d.base << "," << c.name << "," << (c.pass ? "true" : "false") << ","
              << fmt(c.value) << "," << c.witness << "\n";
        }
        r["checks"] = cons;
        json per = json::array();
        for (const auto& s : d.samples) {
          json structure = json::object();
          for (const auto& [name, v] : s.structure) structure[name] = v;
          per.push_back({{"index", s.index},
                         {"residual", {{"hh", s.residual_R}, {"hv", s.residual_P}, {"vv", s.residual_Q}}},
                         {"delta", {{"hh", s.delta_R}, {"hv", s.delta_P}, {"vv", s.delta_Q}}},
                         {"structure", structure}});
        }
        r["samples"] = per;
        ok = ok && d.pass;
      } catch (const Error& e) {
        r["pass"] = false;
        r["error"] = e.what();
        csv << to_string(kind) << "," << to_string(base) << ",error,false,,\n";
        ok = false;
      }
      reports.push_back(r);
    }
  res.report["processes"] = reports;
  res.report["summary"] = {{"pass", ok}, {"sample_count", samples.size()}};
  res.status = ok ? kExitOk : kExitFailure;
  res.csv = csv.str();
  detail::finish(res);
  return res;
}

inline std::string trajectory_csv(const MetricModel& m, const GeodesicTrajectory& traj, const CartanSamples& cs,
                                  double landsberg0) {
  const int n = m.dim();
  std::ostringstream out;
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  for (int i = 1; i <= n; ++i) out << ",v" << i;
  out << ",F\n";
  for (std::size_t q = 0; q < traj.size(); ++q) {
    out << fmt(traj.t[q]);
    for (double c : traj.x[q]) out << "," << fmt(c);
    for (double c : traj.v[q]) out << "," << fmt(c);
    out << "," << fmt(traj.speed[q]) << "\n";
  }
  out << "# fit_slope=" << fmt(cs.fit.slope) << "\n";
  out << "# fit_intercept=" << fmt(cs.fit.intercept) << "\n";
  out << "# fit_residual=" << fmt(cs.fit.residual) << "\n";
  out << "# slope_at_zero=" << fmt(cs.slope_at_zero) << "\n";
  out << "# landsberg_at_zero=" << fmt(landsberg0) << "\n";
  return out.str();
}

inline CommandResult cmd_geodesic(const MetricModel& model, const RunConfig& cfg) {
  CommandResult res;
  res.report = detail::header("geodesic", cfg);
  if (!cfg.has_geodesic) throw ConfigError("geodesic: section missing");
  const auto& g = cfg.geodesic;
  try {
    const auto traj = integrate_geodesic(model, ChartPoint{g.x0}, FiberVector{g.y0}, g.duration, g.steps);
    const auto frame = parallel_transport(model, traj, g.frame);
    const auto cs = cartan_along_geodesic(model, traj, frame);
    LocalGeometry geo0(model, traj.x.front(), traj.v.front(), 4, 0.0);
    const Tensor l0 = evaluate(geo0.L());
    const int n = model.dim();
    double landsberg0 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          landsberg0 += l0(i, j, k) * g.frame[0][static_cast<std::size_t>(i)] * g.frame[1][static_cast<std::size_t>(j)] *
                        g.frame[2][static_cast<std::size_t>(k)];
    double drift = 0.0;
    for (double s : traj.speed) drift = std::max(drift, std::abs(s - 1.0));
    const auto back = reverse_transport(model, traj, frame.vectors.back());
    double reverse_err = 0.0;
    for (std::size_t a = 0; a < back.size(); ++a)
      for (std::size_t i = 0; i < back[a].size(); ++i) reverse_err = std::max(reverse_err, std::abs(back[a][i] - g.frame[a][i]));

    res.report["trajectory"] = {{"steps", g.steps},
                                {"step", traj.step},
                                {"duration", g.duration},
                                {"speed_scale", traj.speed_scale},
                                {"x_end", traj.x.back()},
                                {"v_end", traj.v.back()},
                                {"speed_drift", drift},
                                {"reverse_transport_error", reverse_err}};
    res.report["cartan_fit"] = {{"slope", cs.fit.slope},
                                {"intercept", cs.fit.intercept},
                                {"residual", cs.fit.residual},
                                {"slope_at_zero", cs.slope_at_zero},
                                {"landsberg_at_zero", landsberg0}};
    res.report["frame"] = g.frame;
    res.trajectory = trajectory_csv(model, traj, cs, landsberg0);
    res.csv = res.trajectory;
  } catch (const ChartExit& e) {
    res.report["error"] = e.what();
    res.report["last_valid_t"] = e.last_valid_t;
    res.status = kExitFailure;
  } catch (const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    res.report["error"] = e.what();
    res.status = kExitFailure;
  }
  detail::finish(res);
  return res;
}

// ---- driver ----

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"finslerlab: numerical Finsler geometry"};
  std::string command, config_path, out_dir, format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  app.add_option("command", command, "eval | classify | verify | geodesic")
      ->required()
      ->check(CLI::IsMember({"eval", "classify", "verify", "geodesic"}));
  app.add_option("--config", config_path, "path to the JSON run config")->required();
  app.add_option("--out", out_dir, "directory for report files (default: stdout)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "override samples.seed");
  app.add_option("--samples", samples, "override samples.count");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "finslerlab: " << e.what() << "\n";
    return kExitConfig;
  }

  RunConfig cfg;
  std::optional<MetricModel> model;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config '" + config_path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (doc.is_object()) {
      if (seed) doc["samples"]["seed"] = *seed;
      if (samples) doc["samples"]["count"] = *samples;
    }
    cfg = parse_config(doc);
    model.emplace(build_metric(cfg.metric));
  } catch (const Error& e) {
    err << "finslerlab: config error: " << e.what() << "\n";
    return kExitConfig;
  }

  CommandResult res;
  try {
    if (command == "eval") res = cmd_eval(*model, cfg);
    if (command == "classify") res = cmd_classify(*model, cfg);
    if (command == "verify") res = cmd_verify(*model, cfg);
    if (command == "geodesic") res = cmd_geodesic(*model, cfg);
  } catch (const ConfigError& e) {
    err << "finslerlab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "finslerlab: " << command << " failed: " << e.what() << "\n";
    return kExitFailure;
  }

  const std::string body = format == "json" ? res.report.dump(2) + "\n" : res.csv;
  if (out_dir.empty()) {
    out << body;
  } else {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    auto write = [&](const std::string& name, const std::string& text) {
      std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
      f << text;
      return static_cast<bool>(f);
    };
    bool written = write(command + "." + format, body);
    if (command == "geodesic" && !res.trajectory.empty()) written = write("trajectory.csv", res.trajectory) && written;
    if (!written) {
      err << "finslerlab: cannot write to '" << out_dir << "'\n";
      return kExitFailure;
    }
  }
  if (res.status != kExitOk) err << "finslerlab: " << command << " reported failures\n";
  return res.status;
}

}  // namespace finslerlab::cli
