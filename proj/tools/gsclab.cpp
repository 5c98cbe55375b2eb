// gsclab: command-line front end for the carpet laboratory.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "gsc/errors.hpp"
#include "gsc/harness.hpp"

namespace {

struct Overrides {
  std::string pattern, output;
  int nmax = 0, extra = 0, depth = 0, level = 0, n = 0, m = 0, m_prime = 0, random = 0;
  double rho = 0.0, tol = 0.0;
  std::string mode;
  std::vector<int> ms;
  std::vector<std::int64_t> cell;
  std::uint64_t seed = 0;
  bool list = false;
};

bool given(CLI::App* app, const char* name) { return app->count(name) > 0; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gsclab: generalized Sierpinski carpet laboratory"};
  app.set_version_flag("--version", std::string(GSC_VERSION));
  app.require_subcommand(1);

  std::string config_file, cache_dir;
  bool deterministic = true;
  int threads = 1;
  app.add_option("--config", config_file, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--deterministic", deterministic, "Byte-identical reruns (zero timing columns)");
  app.add_option("--cache", cache_dir, "Result cache directory (GSC_CACHE overrides)");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 256));

  Overrides o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--pattern", o.pattern, "Pattern file");
    sub->add_option("--out", o.output, "Output directory");
    sub->add_option("--seed", o.seed, "Seed for randomized data");
  };
  auto* validate = app.add_subcommand("validate", "Check the carpet axioms");
  auto* dims = app.add_subcommand("dims", "Counts and dimensions");
  auto* faces = app.add_subcommand("faces", "Prescribed-average faces");
  auto* resist = app.add_subcommand("resist", "Resistance series and scaling estimates");
  auto* trace = app.add_subcommand("trace", "Trace and extension ratios");
  auto* decay = app.add_subcommand("decay", "Boundary decay of harmonic energy");
  auto* extend = app.add_subcommand("extend", "Prescribed sub-face averages");
  auto* exit_cmd = app.add_subcommand("exit", "Exit-time series");
  auto* pipeline = app.add_subcommand("pipeline", "Full study");
  for (auto* s : {validate, dims, faces, resist, trace, decay, extend, exit_cmd, pipeline}) common(s);

  dims->add_option("--rho", o.rho, "Resistance scaling estimate")->check(CLI::PositiveNumber);
  faces->add_flag("--list", o.list, "List every face");
  faces->add_option("--n", o.n, "Cell level");
  faces->add_option("--m", o.m, "Sub-face depth");
  resist->add_option("--nmax", o.nmax, "Largest level");
  resist->add_option("--extra", o.extra, "Grid refinement m' - n");
  resist->add_option("--tol", o.tol, "Relative solver tolerance");
  resist->add_option("--mode", o.mode, "Boundary mode")->check(CLI::IsMember({"face", "cell"}));
  trace->add_option("--m", o.ms, "Domain levels");
  trace->add_option("--nmax", o.nmax, "Largest Besov index");
  trace->add_option("--random", o.random, "Number of random test functions");
  trace->add_option("--rho", o.rho, "Resistance scaling override")->check(CLI::PositiveNumber);
  decay->add_option("--level", o.level, "Cell level");
  decay->add_option("--cell", o.cell, "Cell coordinates");
  decay->add_option("--m", o.m, "Domain level");
  decay->add_option("--mprime", o.m_prime, "Grid level");
  decay->add_option("--depth", o.depth, "Number of shells");
  extend->add_option("--n", o.n, "Cell level");
  extend->add_option("--m", o.m, "Sub-face depth");
  extend->add_option("--mprime", o.m_prime, "Grid level");
  exit_cmd->add_option("--nmax", o.nmax, "Largest level");
  exit_cmd->add_option("--extra", o.extra, "Grid refinement m' - n");
  exit_cmd->add_option("--rho", o.rho, "Resistance scaling override")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();

  gsc::ExperimentConfig cfg;
  try {
    if (!config_file.empty()) cfg = gsc::load_config(config_file);
    if (app.count("--deterministic")) cfg.deterministic = deterministic;
    if (app.count("--threads")) cfg.threads = threads;
    if (app.count("--cache")) cfg.cache = cache_dir;
    if (const char* env = std::getenv("GSC_CACHE"); env && *env) cfg.cache = env;
    if (given(sub, "--pattern")) cfg.pattern_path = o.pattern;
    if (given(sub, "--out")) cfg.output = o.output;
    if (given(sub, "--seed")) cfg.seed = o.seed;

    if (sub == dims && given(sub, "--rho")) cfg.dims_rho = o.rho;
    if (sub == faces) {
      cfg.faces.list = o.list;
      if (given(sub, "--n")) cfg.faces.n = o.n;
      if (given(sub, "--m")) cfg.faces.m = o.m;
    }
    if (sub == resist) {
      if (given(sub, "--nmax")) cfg.resist.nmax = o.nmax;
      if (given(sub, "--extra")) cfg.resist.extra = o.extra;
      if (given(sub, "--tol")) cfg.resist.tol = o.tol;
      if (given(sub, "--mode")) cfg.resist.mode = o.mode;
    }
    if (sub == trace) {
      if (given(sub, "--m")) cfg.trace.m = o.ms;
      if (given(sub, "--nmax")) cfg.trace.nmax = o.nmax;
      if (given(sub, "--random")) cfg.trace.random = o.random;
      if (given(sub, "--rho")) cfg.trace.rho = o.rho;
    }
    if (sub == decay) {
      if (given(sub, "--level")) cfg.decay.level = o.level;
      if (given(sub, "--cell")) cfg.decay.cell = o.cell;
      if (given(sub, "--m")) cfg.decay.m = o.m;
      if (given(sub, "--mprime")) cfg.decay.m_prime = o.m_prime;
      if (given(sub, "--depth")) cfg.decay.depth = o.depth;
    }
    if (sub == extend) {
      if (given(sub, "--n")) cfg.extend.n = o.n;
      if (given(sub, "--m")) cfg.extend.m = o.m;
      if (given(sub, "--mprime")) cfg.extend.m_prime = o.m_prime;
    }
    if (sub == exit_cmd) {
      if (given(sub, "--nmax")) cfg.exit.nmax = o.nmax;
      if (given(sub, "--extra")) cfg.exit.extra = o.extra;
      if (given(sub, "--rho")) cfg.exit.rho = o.rho;
    }
    cfg.check();
  } catch (const std::exception& e) {
    std::cerr << "gsclab: " << e.what() << '\n';
    return gsc::exit_code::input;
  }
  return gsc::run(name, cfg);
}
