#include "gsc/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "gsc/errors.hpp"
#include "gsc/exit_time.hpp"
#include "gsc/extension.hpp"
#include "gsc/geometry.hpp"
#include "gsc/resistance.hpp"
#include "gsc/trace.hpp"
#include "gsc/util.hpp"

namespace gsc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---- config parsing -------------------------------------------------------

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* name : keys) known = known || k == name;
    if (!known) throw InputError("unknown config key '" + where + (where.empty() ? "" : ".") + k + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError("config key '" + where + "." + key + "' has the wrong type");
  }
}

void read_rho(const json& j, std::optional<double>& out, const std::string& where) {
  if (!j.contains("rho")) return;
  if (j.at("rho").is_null()) {
    out.reset();
    return;
  }
  double v = 0.0;
  read(j, "rho", v, where);
  out = v;
}

void require(bool ok, const std::string& key, const std::string& range) {
  if (!ok) throw InputError("config value '" + key + "' out of range (" + range + ")");
}

// ---- CSV helpers ----------------------------------------------------------

std::string num(double x) { return format_double(x); }

class Table {
 public:
  Table(const std::string& subcommand, const std::vector<std::string>& columns) {
    out_ << csv_header(subcommand);
    row(columns);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  // Write-then-rename keeps a single writer from leaving torn files.
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, p);
}

SolveOptions solve_options(double tol) {
  SolveOptions o;
  o.tol = tol;
  return o;
}

}  // namespace

// ---- config ---------------------------------------------------------------

void ExperimentConfig::check() const {
  require(threads >= 1 && threads <= 256, "threads", "1..256");
  require(resist.nmax >= 1 && resist.nmax <= 7, "resist.nmax", "1..7");
  require(resist.extra >= 0 && resist.extra <= 4, "resist.extra", "0..4");
  require(resist.tol > 0 && resist.tol <= 1e-3, "resist.tol", "(0, 1e-3]");
  require(resist.mode == "face" || resist.mode == "cell", "resist.mode", "face|cell");
  require(!trace.m.empty(), "trace.m", "non-empty");
  for (int m : trace.m) require(m >= 1 && m <= 7, "trace.m", "1..7");
  require(trace.nmax >= 1 && trace.nmax <= 6, "trace.nmax", "1..6");
  require(trace.random >= 0 && trace.random <= 16, "trace.random", "0..16");
  require(!trace.rho || *trace.rho > 0, "trace.rho", "> 0");
  require(decay.level >= 1 && decay.level <= decay.m, "decay.level", "1..decay.m");
  require(decay.m_prime >= decay.m && decay.m_prime <= 8, "decay.m_prime", "decay.m..8");
  require(decay.depth >= 1 && decay.depth <= 8, "decay.depth", "1..8");
  require(extend.n >= 0 && extend.m >= 1, "extend.n/extend.m", "n >= 0, m >= 1");
  require(extend.m_prime >= extend.n + extend.m && extend.m_prime <= 8, "extend.m_prime", "n+m..8");
  require(faces.n >= 0 && faces.m >= 0 && faces.n + faces.m <= 8, "faces.n/faces.m", "n, m >= 0, n+m <= 8");
  require(exit.nmax >= 1 && exit.nmax <= 6, "exit.nmax", "1..6");
  require(exit.extra >= 0 && exit.extra <= 4, "exit.extra", "0..4");
  require(!exit.rho || *exit.rho > 0, "exit.rho", "> 0");
  require(!dims_rho || *dims_rho > 0, "dims.rho", "> 0");
}

json ExperimentConfig::to_json() const {
  auto rho = [](const std::optional<double>& r) { return r ? json(*r) : json(nullptr); };
  return json{
      {"pattern", pattern_path.generic_string()},
      {"output", output.generic_string()},
      {"cache", cache.generic_string()},
      {"deterministic", deterministic},
      {"threads", threads},
      {"seed", seed},
      {"dims", {{"rho", rho(dims_rho)}}},
      {"resist", {{"nmax", resist.nmax}, {"extra", resist.extra}, {"tol", resist.tol}, {"mode", resist.mode}}},
      {"trace", {{"m", trace.m}, {"nmax", trace.nmax}, {"random", trace.random}, {"rho", rho(trace.rho)}}},
      {"decay",
       {{"level", decay.level}, {"cell", decay.cell}, {"m", decay.m}, {"m_prime", decay.m_prime},
        {"depth", decay.depth}}},
      {"extend", {{"n", extend.n}, {"m", extend.m}, {"m_prime", extend.m_prime}}},
      {"faces", {{"n", faces.n}, {"m", faces.m}, {"list", faces.list}}},
      {"exit", {{"nmax", exit.nmax}, {"extra", exit.extra}, {"rho", rho(exit.rho)}}},
  };
}

ExperimentConfig parse_config(const json& j, ExperimentConfig c) {
  reject_unknown(j,
                 {"pattern", "output", "cache", "deterministic", "threads", "seed", "dims", "resist", "trace",
                  "decay", "extend", "faces", "exit"},
                 "");
  std::string s;
  if (j.contains("pattern")) read(j, "pattern", s, ""), c.pattern_path = s;
  if (j.contains("output")) read(j, "output", s, ""), c.output = s;
  if (j.contains("cache")) read(j, "cache", s, ""), c.cache = s;
  read(j, "deterministic", c.deterministic, "");
  read(j, "threads", c.threads, "");
  read(j, "seed", c.seed, "");
  if (j.contains("dims")) {
    const auto& b = j.at("dims");
    reject_unknown(b, {"rho"}, "dims");
    read_rho(b, c.dims_rho, "dims");
  }
  if (j.contains("resist")) {
    const auto& b = j.at("resist");
    reject_unknown(b, {"nmax", "extra", "tol", "mode"}, "resist");
    read(b, "nmax", c.resist.nmax, "resist");
    read(b, "extra", c.resist.extra, "resist");
    read(b, "tol", c.resist.tol, "resist");
    read(b, "mode", c.resist.mode, "resist");
  }
  if (j.contains("trace")) {
    const auto& b = j.at("trace");
    reject_unknown(b, {"m", "nmax", "random", "rho"}, "trace");
    read(b, "m", c.trace.m, "trace");
    read(b, "nmax", c.trace.nmax, "trace");
    read(b, "random", c.trace.random, "trace");
    read_rho(b, c.trace.rho, "trace");
  }
  if (j.contains("decay")) {
    const auto& b = j.at("decay");
    reject_unknown(b, {"level", "cell", "m", "m_prime", "depth"}, "decay");
    read(b, "level", c.decay.level, "decay");
    read(b, "cell", c.decay.cell, "decay");
    read(b, "m", c.decay.m, "decay");
    read(b, "m_prime", c.decay.m_prime, "decay");
    read(b, "depth", c.decay.depth, "decay");
  }
  if (j.contains("extend")) {
    const auto& b = j.at("extend");
    reject_unknown(b, {"n", "m", "m_prime"}, "extend");
    read(b, "n", c.extend.n, "extend");
    read(b, "m", c.extend.m, "extend");
    read(b, "m_prime", c.extend.m_prime, "extend");
  }
  if (j.contains("faces")) {
    const auto& b = j.at("faces");
    reject_unknown(b, {"n", "m", "list"}, "faces");
    read(b, "n", c.faces.n, "faces");
    read(b, "m", c.faces.m, "faces");
    read(b, "list", c.faces.list, "faces");
  }
  if (j.contains("exit")) {
    const auto& b = j.at("exit");
    reject_unknown(b, {"nmax", "extra", "rho"}, "exit");
    read(b, "nmax", c.exit.nmax, "exit");
    read(b, "extra", c.exit.extra, "exit");
    read_rho(b, c.exit.rho, "exit");
  }
  c.check();
  return c;
}

ExperimentConfig load_config(const fs::path& path, ExperimentConfig base) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  auto c = parse_config(j, std::move(base));
  // Relative paths in a config file are relative to the file.
  const auto dir = path.parent_path();
  if (j.contains("pattern") && c.pattern_path.is_relative()) c.pattern_path = dir / c.pattern_path;
  return c;
}

// ---- stages ---------------------------------------------------------------

std::string csv_header(const std::string& subcommand) {
  return "# gsclab " GSC_VERSION " " + subcommand + "\n";
}

std::uint64_t extend_seed(std::uint64_t seed) { return counter_hash(seed, 0); }
std::uint64_t trace_seed(std::uint64_t seed, int k) {
  return counter_hash(seed, 1 + static_cast<std::uint64_t>(k));
}

double decay_boundary_data(const std::vector<double>& x) {
  double v = std::sin(3.0 * x[0] + 0.4) + 0.3 * x[0] * x[1];
  for (std::size_t a = 1; a < x.size(); ++a) v += x[a] * x[a];
  return v;
}

StageOutput stage_validate(const GscPattern& pattern) {
  const auto r = validate_pattern(pattern);
  Table t("validate", {"axiom", "pass", "witness"});
  const std::pair<const char*, const AxiomCheck*> rows[] = {{"Symmetry", &r.symmetry},
                                                           {"Connectedness", &r.connectedness},
                                                           {"Non-diagonality", &r.non_diagonality},
                                                           {"Borders included", &r.borders}};
  for (const auto& [name, check] : rows) t.row({name, check->pass ? "1" : "0", '"' + check->witness + '"'});
  StageOutput out{"validate", t.str()};
  out.summary = {{"valid", r.valid()}, {"degenerate", r.degenerate}, {"first_failure", r.first_failure()}};
  return out;
}

StageOutput stage_dims(const GscPattern& pattern, std::optional<double> rho_hat) {
  auto r = dims(pattern);
  if (rho_hat) attach_scaling(r, pattern, *rho_hat);
  const double nan = std::nan("");
  Table t("dims", {"quantity", "value"});
  t.row({"d", std::to_string(pattern.dim())});
  t.row({"L_F", std::to_string(pattern.scale())});
  t.row({"m_F", std::to_string(r.m_F)});
  t.row({"m_I", std::to_string(r.m_I)});
  t.row({"d_f", num(r.d_f)});
  t.row({"d_I", num(r.d_I)});
  t.row({"rho_hat", num(r.rho_hat.value_or(nan))});
  t.row({"rhobar_hat", num(r.rhobar_hat.value_or(nan))});
  t.row({"d_w_hat", num(r.dw_hat.value_or(nan))});
  t.row({"d_s_hat", num(r.ds_hat.value_or(nan))});
  StageOutput out{"dims", t.str()};
  out.summary = {{"m_F", r.m_F}, {"m_I", r.m_I}, {"d_f", r.d_f}, {"d_I", r.d_I}};
  if (rho_hat) {
    out.summary["rho_used"] = *rho_hat;
    out.summary["d_w_hat"] = *r.dw_hat;
    out.summary["d_s_hat"] = *r.ds_hat;
    out.summary["d_I_minus_d_f_plus_d_w"] = r.d_I - (r.d_f - *r.dw_hat);
  }
  return out;
}

StageOutput stage_faces(const GscPattern& pattern, const FacesParams& p) {
  const auto faces = average_faces(pattern, p.n, p.m);
  StageOutput out;
  out.name = "faces";
  if (p.list) {
    std::vector<std::string> cols{"face_id", "level", "axis", "plane"};
    for (int a = 0; a < pattern.dim(); ++a) cols.push_back("x" + std::to_string(a));
    Table t("faces", cols);
    for (std::size_t f = 0; f < faces.size(); ++f) {
      std::vector<std::string> row{std::to_string(f), std::to_string(faces[f].level),
                                   std::to_string(faces[f].axis), std::to_string(faces[f].plane)};
      for (auto x : faces[f].lower) row.push_back(std::to_string(x));
      t.row(row);
    }
    out.csv = t.str();
  } else {
    Table t("faces", {"n", "m", "level", "count"});
    t.row({std::to_string(p.n), std::to_string(p.m), std::to_string(p.n + p.m), std::to_string(faces.size())});
    out.csv = t.str();
  }
  out.summary = {{"count", faces.size()}, {"level", p.n + p.m}};
  return out;
}

StageOutput stage_resist(const GscPattern& pattern, const ResistParams& p, bool deterministic) {
  ResistanceOptions opt;
  opt.mode = p.mode == "cell" ? BoundaryMode::Cell : BoundaryMode::Face;
  opt.solve = solve_options(p.tol);
  const auto s = resistance_series(pattern, p.nmax, p.extra, opt);
  Table t("resist", {"n", "m_prime", "D", "ratio", "R_hat", "residual", "iterations", "seconds"});
  for (const auto& e : s.entries)
    t.row({std::to_string(e.n), std::to_string(e.m_prime), num(e.D), num(e.ratio), num(e.R_hat), num(e.residual),
           std::to_string(e.iterations), num(deterministic ? 0.0 : e.seconds)});
  StageOutput out{"resist", t.str()};
  out.summary = {{"D0", s.D0},
                 {"rho_hat", s.rho_hat},
                 {"rho_regression", s.rho_regression},
                 {"rhobar_hat", s.rhobar_hat},
                 {"d_w_hat", s.dw_hat},
                 {"d_s_hat", s.ds_hat},
                 {"complete", s.complete},
                 {"error", s.error}};
  return out;
}

StageOutput stage_trace(const GscPattern& pattern, const TraceParams& p, double rho_hat, std::uint64_t seed) {
  Table t("trace", {"m", "m_prime", "function", "n", "lambda", "shell_energy", "trace_ratio",
                    "extension_ratio", "violation", "k_max", "tail"});
  json per_m = json::object();
  bool violation = false;
  for (int m : p.m) {
    const auto dom = build_lattice(pattern, m, m + 1);
    std::vector<std::pair<std::string, HarmonicSolution>> family;
    family.emplace_back("minimizer", solve_dirichlet(dom, resistance_constraints(dom, 0, BoundaryMode::Cell)));
    for (int a = 0; a < pattern.dim(); ++a) {
      std::vector<double> data(dom.size());
      for (std::size_t i = 0; i < dom.size(); ++i) data[i] = dom.center(i)[static_cast<std::size_t>(a)];
      family.emplace_back("coord_x" + std::to_string(a + 1), harmonic_extension(dom, data));
    }
    for (int k = 0; k < p.random; ++k)
      family.emplace_back("random_" + std::to_string(k),
                          harmonic_extension(dom, random_boundary_data(dom, trace_seed(seed, k))));
    double max_trace = 0.0, min_ext = INFINITY, max_ext = 0.0;
    int k_max = 0;
    for (const auto& [name, sol] : family) {
      const auto prof = besov_profile(dom, sol.values, rho_hat);
      k_max = prof.k_max;
      if (prof.k_max < 1) throw ResolutionError("trace: m = " + std::to_string(m) + " resolves no sub-face level");
      // Only the minimizer differs from the extension of its own trace.
      const auto ext = name == "minimizer" ? harmonic_extension(dom, sol.values) : sol;
      const auto er = extension_ratio(dom, ext, rho_hat, prof);
      violation = violation || er.violation;
      min_ext = std::min(min_ext, er.ratio);
      max_ext = std::max(max_ext, er.ratio);
      for (int n = 1; n <= std::min(p.nmax, prof.k_max); ++n) {
        const auto tr = trace_ratio(dom, sol, n, rho_hat, prof);
        violation = violation || tr.violation;
        max_trace = std::max(max_trace, tr.ratio);
        t.row({std::to_string(m), std::to_string(m + 1), name, std::to_string(n), num(tr.numerator),
               num(tr.denominator), num(tr.ratio), num(er.ratio), (tr.violation || er.violation) ? "1" : "0",
               std::to_string(prof.k_max), num(prof.tail())});
      }
    }
    per_m[std::to_string(m)] = {
        {"max_trace_ratio", max_trace}, {"min_extension_ratio", min_ext}, {"max_extension_ratio", max_ext},
        {"k_max", k_max}};
  }
  StageOutput out{"trace", t.str()};
  out.summary = {{"rho_used", rho_hat}, {"per_m", per_m}, {"violation", violation}};
  return out;
}

StageOutput stage_decay(const GscPattern& pattern, const DecayParams& p, double tol) {
  CellIndex cell{p.level, {}};
  if (p.cell.empty()) {
    cell.coords.assign(static_cast<std::size_t>(pattern.dim()), 0);
    cell.coords[1] = 1;
  } else {
    if (p.cell.size() != static_cast<std::size_t>(pattern.dim()))
      throw InputError("decay.cell must have " + std::to_string(pattern.dim()) + " coordinates");
    cell.coords = p.cell;
  }
  const auto r = decay_experiment(
      pattern, cell, p.m, p.m_prime, p.depth,
      [](std::span<const double> x) { return decay_boundary_data({x.begin(), x.end()}); }, solve_options(tol));
  Table t("decay", {"n", "level", "cumulative"});
  bool monotone = true;
  for (std::size_t k = 0; k < r.entries.size(); ++k) {
    const auto& e = r.entries[k];
    if (k > 0 && e.cumulative > r.entries[k - 1].cumulative) monotone = false;
    t.row({std::to_string(e.n), std::to_string(p.level + e.n), num(e.cumulative)});
  }
  StageOutput out{"decay", t.str()};
  out.summary = {{"rate", r.rate},
                 {"prefactor", r.prefactor},
                 {"neighbourhood_energy", r.neighbourhood_energy},
                 {"depth", r.depth},
                 {"truncated", r.truncated},
                 {"degenerate", r.degenerate},
                 {"monotone", monotone},
                 {"iterations", r.iterations},
                 {"residual", r.residual}};
  return out;
}

StageOutput stage_extend(const GscPattern& pattern, const ExtendParams& p, std::uint64_t seed, double tol) {
  const auto faces = average_faces(pattern, p.n, p.m);
  std::vector<double> targets(faces.size());
  const auto s = extend_seed(seed);
  for (std::size_t f = 0; f < faces.size(); ++f) targets[f] = counter_uniform(s, f);
  const auto pe = prescribe_averages(pattern, p.n, p.m, targets, p.m_prime, solve_options(tol));
  Table t("extend", {"face_id", "level", "axis", "plane", "target", "achieved", "error"});
  for (std::size_t f = 0; f < faces.size(); ++f)
    t.row({std::to_string(f), std::to_string(faces[f].level), std::to_string(faces[f].axis),
           std::to_string(faces[f].plane), num(targets[f]), num(pe.achieved[f]),
           num(std::abs(pe.achieved[f] - targets[f]))});
  StageOutput out{"extend", t.str()};
  out.summary = {{"faces", faces.size()},
                 {"quadrature_error", pe.quadrature_error},
                 {"interior_residual", pe.interior_residual},
                 {"energy", pe.solution.energy},
                 {"iterations", pe.solution.iterations},
                 {"residual", pe.solution.residual},
                 {"seed", s}};
  return out;
}

StageOutput stage_exit(const GscPattern& pattern, const ExitParams& p, double rho_hat, double tol) {
  const auto s = exit_series(pattern, p.nmax, p.extra, rho_hat, solve_options(tol));
  Table t("exit", {"n", "m_prime", "steps", "t", "a", "alpha", "rel_change", "iterations", "residual"});
  for (const auto& e : s.entries)
    t.row({std::to_string(e.n), std::to_string(e.m_prime), num(e.steps), num(e.t), num(e.a), num(e.alpha),
           num(e.rel_change), std::to_string(e.iterations), num(e.residual)});
  StageOutput out{"exit", t.str()};
  out.summary = {{"rho_used", rho_hat},   {"rhobar_hat", s.rhobar_hat}, {"c0_hat", s.c0_hat},
                 {"complete", s.complete}, {"error", s.error}};
  return out;
}

// ---- orchestration --------------------------------------------------------

namespace {

class Runner {
 public:
  Runner(std::string subcommand, const ExperimentConfig& config, GscPattern pattern)
      : sub_(std::move(subcommand)), cfg_(config), pattern_(std::move(pattern)) {
    manifest_ = {{"tool", "gsclab"},
                 {"version", GSC_VERSION},
                 {"subcommand", sub_},
                 {"pattern",
                  {{"path", cfg_.pattern_path.generic_string()},
                   {"hash", pattern_.hash()},
                   {"d", pattern_.dim()},
                   {"L_F", pattern_.scale()},
                   {"m_F", pattern_.mass()}}},
                 {"config", cfg_.to_json()},
                 {"seed", cfg_.seed},
                 {"deterministic", cfg_.deterministic},
                 {"estimates", json::object()},
                 {"stages", json::array()},
                 {"complete", false}};
  }

  // Runs (or replays from the cache) one stage and writes its CSV.
  const StageOutput& stage(const std::string& name, const json& params, const std::function<StageOutput()>& fn) {
    const std::string key =
        sha256_hex(pattern_.hash() + "\n" + name + "\n" + params.dump() + "\n" GSC_VERSION);
    StageOutput out;
    bool hit = false;
    if (!cfg_.cache.empty()) {
      const auto csv = cfg_.cache / (key + ".csv");
      const auto meta = cfg_.cache / (key + ".json");
      if (fs::exists(csv) && fs::exists(meta)) {
        out.name = name;
        out.csv = read_file(csv);
        out.summary = json::parse(read_file(meta)).at("summary");
        out.cached = hit = true;
      }
    }
    if (!hit) {
      const auto t0 = std::chrono::steady_clock::now();
      out = fn();
      out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (!cfg_.cache.empty() && out.summary.value("complete", true)) {
        fs::create_directories(cfg_.cache);
        write_file(cfg_.cache / (key + ".csv"), out.csv);
        write_file(cfg_.cache / (key + ".json"),
                   json{{"version", GSC_VERSION}, {"stage", name}, {"params", params}, {"summary", out.summary},
                        {"seconds", out.seconds}}
                       .dump(2) +
                       "\n");
      }
    }
    std::cerr << "gsclab: " << name << (hit ? " (cached)" : "") << '\n';
    const std::string file = name + ".csv";
    write_file(cfg_.output / file, out.csv);
    json entry = {{"name", name},  {"csv", file},       {"sha256", sha256_hex(out.csv)},
                  {"params", params}, {"summary", out.summary}, {"status", "ok"}};
    if (!cfg_.deterministic) entry["seconds"] = out.seconds;
    if (!out.summary.value("complete", true)) entry["status"] = "incomplete";
    manifest_["stages"].push_back(entry);
    outputs_.push_back(std::move(out));
    return outputs_.back();
  }

  void estimate(const char* key, const json& v) { manifest_["estimates"][key] = v; }

  int finish(int status, const std::string& error = {}) {
    manifest_["complete"] = status == exit_code::ok;
    if (!error.empty()) manifest_["error"] = error;
    write_file(cfg_.output / (sub_ + ".manifest.json"), manifest_.dump(2) + "\n");
    return status;
  }

  const GscPattern& pattern() const { return pattern_; }

 private:
  std::string sub_;
  const ExperimentConfig& cfg_;
  GscPattern pattern_;
  json manifest_;
  std::vector<StageOutput> outputs_;
};

json resist_params(const ResistParams& p) {
  return {{"nmax", p.nmax}, {"extra", p.extra}, {"tol", p.tol}, {"mode", p.mode}};
}

int body(const std::string& sub, const ExperimentConfig& cfg, Runner& r) {
  const auto& pat = r.pattern();
  const double tol = cfg.resist.tol;

  const auto& v = r.stage("validate", json::object(), [&] { return stage_validate(pat); });
  if (!v.summary.at("valid").get<bool>()) {
    const auto axiom = v.summary.at("first_failure").get<std::string>();
    std::cerr << "gsclab: pattern fails axiom '" << axiom << "'\n";
    return r.finish(exit_code::validation, "pattern fails axiom '" + axiom + "'");
  }
  if (sub == "validate") return r.finish(exit_code::ok);

  std::optional<double> rho;
  std::string resist_error;
  auto resist = [&]() -> bool {
    const auto& s =
        r.stage("resist", resist_params(cfg.resist), [&] { return stage_resist(pat, cfg.resist, cfg.deterministic); });
    if (!s.summary.at("complete").get<bool>()) {
      resist_error = s.summary.at("error").get<std::string>();
      return false;
    }
    rho = s.summary.at("rho_hat").get<double>();
    r.estimate("rho_hat", *rho);
    r.estimate("rhobar_hat", s.summary.at("rhobar_hat"));
    r.estimate("d_w_hat", s.summary.at("d_w_hat"));
    r.estimate("d_s_hat", s.summary.at("d_s_hat"));
    return true;
  };
  auto resist_failed = [&] {
    const std::string msg = "resist stage incomplete: " + resist_error;
    std::cerr << "gsclab: " << msg << '\n';
    return r.finish(exit_code::solver, msg);
  };
  auto dims_stage = [&](std::optional<double> rh) {
    r.stage("dims", {{"rho", rh ? json(*rh) : json(nullptr)}}, [&] { return stage_dims(pat, rh); });
  };
  auto trace_stage = [&](double rh) {
    const json params = {{"m", cfg.trace.m}, {"nmax", cfg.trace.nmax}, {"random", cfg.trace.random},
                         {"rho", rh},        {"seed", cfg.seed}};
    r.stage("trace", params, [&] { return stage_trace(pat, cfg.trace, rh, cfg.seed); });
  };
  auto decay_stage = [&] {
    const json params = {{"level", cfg.decay.level}, {"cell", cfg.decay.cell},   {"m", cfg.decay.m},
                         {"m_prime", cfg.decay.m_prime}, {"depth", cfg.decay.depth}, {"tol", tol}};
    r.stage("decay", params, [&] { return stage_decay(pat, cfg.decay, tol); });
  };
  auto extend_stage = [&] {
    const json params = {{"n", cfg.extend.n}, {"m", cfg.extend.m}, {"m_prime", cfg.extend.m_prime},
                         {"seed", cfg.seed},  {"tol", tol}};
    r.stage("extend", params, [&] { return stage_extend(pat, cfg.extend, cfg.seed, tol); });
  };
  auto exit_stage = [&](double rh) -> bool {
    const json params = {{"nmax", cfg.exit.nmax}, {"extra", cfg.exit.extra}, {"rho", rh}, {"tol", tol}};
    const auto& s = r.stage("exit", params, [&] { return stage_exit(pat, cfg.exit, rh, tol); });
    r.estimate("c0_hat", s.summary.at("c0_hat"));
    return s.summary.at("complete").get<bool>();
  };
  // Stage-local rho: explicit override, else the resistance estimate.
  auto need_rho = [&](const std::optional<double>& override_rho) -> std::optional<double> {
    if (override_rho) return override_rho;
    if (!rho && !resist()) return std::nullopt;
    return rho;
  };

  if (sub == "dims") {
    dims_stage(cfg.dims_rho);
    return r.finish(exit_code::ok);
  }
  if (sub == "faces") {
    const json params = {{"n", cfg.faces.n}, {"m", cfg.faces.m}, {"list", cfg.faces.list}};
    r.stage("faces", params, [&] { return stage_faces(pat, cfg.faces); });
    return r.finish(exit_code::ok);
  }
  if (sub == "resist") return resist() ? r.finish(exit_code::ok) : resist_failed();
  if (sub == "trace") {
    const auto rh = need_rho(cfg.trace.rho);
    if (!rh) return resist_failed();
    trace_stage(*rh);
    return r.finish(exit_code::ok);
  }
  if (sub == "decay") {
    decay_stage();
    return r.finish(exit_code::ok);
  }
  if (sub == "extend") {
    extend_stage();
    return r.finish(exit_code::ok);
  }
  if (sub == "exit") {
    const auto rh = need_rho(cfg.exit.rho);
    if (!rh) return resist_failed();
    if (!exit_stage(*rh)) return r.finish(exit_code::solver, "solver failure in exit stage");
    return r.finish(exit_code::ok);
  }
  if (sub == "pipeline") {
    if (!resist()) return resist_failed();
    dims_stage(rho);
    trace_stage(cfg.trace.rho.value_or(*rho));
    decay_stage();
    extend_stage();
    if (!exit_stage(cfg.exit.rho.value_or(*rho))) return r.finish(exit_code::solver, "solver failure in exit stage");
    return r.finish(exit_code::ok);
  }
  throw InputError("unknown subcommand '" + sub + "'");
}

}  // namespace

int run(const std::string& subcommand, const ExperimentConfig& config) {
  GscPattern pattern = GscPattern::standard_carpet();
  try {
    config.check();
    if (config.pattern_path.empty()) throw InputError("no pattern given (--pattern or config 'pattern')");
    pattern = load_pattern(config.pattern_path);
    fs::create_directories(config.output);
  } catch (const std::exception& e) {
    std::cerr << "gsclab: " << e.what() << '\n';
    return exit_code::input;
  }
  Runner r(subcommand, config, pattern);
  try {
    return body(subcommand, config, r);
  } catch (const SolverError& e) {
    std::cerr << "gsclab: solver failure: " << e.what() << " (residual " << format_double(e.residual())
              << ", iterations " << e.iterations() << ")\n";
    return r.finish(exit_code::solver, std::string(e.what()) + " (residual " + format_double(e.residual()) + ")");
  } catch (const SizeLimitError& e) {
    std::cerr << "gsclab: " << e.what() << '\n';
    return r.finish(exit_code::resources, e.what());
  } catch (const ResolutionError& e) {
    std::cerr << "gsclab: " << e.what() << '\n';
    return r.finish(exit_code::resources, e.what());
  } catch (const std::exception& e) {
    std::cerr << "gsclab: " << e.what() << '\n';
    return r.finish(exit_code::input, e.what());
  }
}

}  // namespace gsc
