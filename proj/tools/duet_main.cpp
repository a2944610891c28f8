// duet — command-line harness for the two-particle diffusive-limit experiments.
//
// Talks to the simulation library exclusively through its C API (duet.h).
// Exit status: 0 = success, 2 = a statistical bound failed, 1 = error.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "duet.h"

namespace {

struct ConfigDeleter {
  void operator()(duet_config* c) const { duet_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<duet_config, ConfigDeleter>;

int fail_with(duet_status st) {
  std::fprintf(stderr, "duet: %s\n", duet_last_error());
  return st == DUET_BOUND_FAILED ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"duet — Monte Carlo experiments for two stochastically forced "
               "particles on the circle, one damped, and the diffusive limit "
               "of the undamped momentum"};
  app.set_version_flag("--version", duet_version());
  app.require_subcommand(0, 1);

  std::string config_path, out_dir, potential;
  std::string seed_str, paths_str, workers_str;
  std::string dt_str, T_str, R_str, eps_str, beta_str, horizon_str;
  std::vector<std::string> sets;

  app.add_option("--config", config_path, "config file (flat key = value lines)");
  auto* opt_seed = app.add_option("--seed", seed_str, "master seed (uint64)");
  auto* opt_paths = app.add_option("--paths", paths_str, "number of trajectories");
  auto* opt_dt = app.add_option("--dt", dt_str, "integration step");
  auto* opt_T = app.add_option("--T", T_str, "diffusive time scale T");
  auto* opt_R = app.add_option("--R", R_str, "initial |r1| level R");
  auto* opt_eps = app.add_option("--epsilon", eps_str, "excursion level epsilon");
  auto* opt_beta = app.add_option("--beta", beta_str, "exit-interval shape beta");
  auto* opt_horizon = app.add_option("--horizon", horizon_str,
                                     "trajectory horizon (simulate)");
  auto* opt_workers = app.add_option("--workers", workers_str,
                                     "worker thread cap (0 = all cores; does not "
                                     "affect results)");
  auto* opt_out = app.add_option("--out", out_dir, "output directory");
  auto* opt_pot = app.add_option("--potential", potential,
                                 "coupling potential: cos, zero, mixed");
  app.add_option("--set", sets, "extra key=value overrides")->take_all();

  // one subcommand per experiment; --help lists each with its anchor
  std::vector<CLI::App*> subs;
  for (int i = 0; i < duet_experiment_count(); ++i) {
    const std::string name = duet_experiment_name(i);
    const std::string desc = std::string(duet_experiment_summary(i)) + " [" +
                             duet_experiment_anchor(i) + "]";
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  ConfigPtr cfg(duet_config_create());
  if (!cfg) {
    std::fprintf(stderr, "duet: out of memory\n");
    return 1;
  }

  // precedence: defaults < DUET_SEED < config file < flags
  if (const char* env_seed = std::getenv("DUET_SEED")) {
    if (duet_config_set(cfg.get(), "seed", env_seed) != DUET_OK) {
      return fail_with(DUET_INVALID_ARGUMENT);
    }
  }
  if (!config_path.empty()) {
    const duet_status st = duet_config_load_file(cfg.get(), config_path.c_str());
    if (st != DUET_OK) return fail_with(st);
  }

  std::string experiment;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) experiment = duet_experiment_name(static_cast<int>(i));
  }
  if (!experiment.empty()) {
    if (duet_config_set(cfg.get(), "experiment", experiment.c_str()) != DUET_OK) {
      return fail_with(DUET_INVALID_ARGUMENT);
    }
  }

  const std::pair<CLI::Option*, std::pair<const char*, const std::string*>> flags[] = {
      {opt_seed, {"seed", &seed_str}},
      {opt_paths, {"n_paths", &paths_str}},
      {opt_dt, {"dt", &dt_str}},
      {opt_T, {"T", &T_str}},
      {opt_R, {"R", &R_str}},
      {opt_eps, {"epsilon", &eps_str}},
      {opt_beta, {"beta", &beta_str}},
      {opt_horizon, {"horizon", &horizon_str}},
      {opt_workers, {"workers", &workers_str}},
      {opt_out, {"output_dir", &out_dir}},
      {opt_pot, {"potential", &potential}},
  };
  for (const auto& [opt, kv] : flags) {
    if (opt->count() > 0) {
      if (duet_config_set(cfg.get(), kv.first, kv.second->c_str()) != DUET_OK) {
        return fail_with(DUET_INVALID_ARGUMENT);
      }
    }
  }
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "duet: --set expects key=value, got '%s'\n", kv.c_str());
      return 1;
    }
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (duet_config_set(cfg.get(), key.c_str(), value.c_str()) != DUET_OK) {
      return fail_with(DUET_INVALID_ARGUMENT);
    }
  }

  duet_status st = duet_config_validate(cfg.get());
  if (st != DUET_OK) return fail_with(st);

  char digest[32], exp_name[32], outdir_buf[4096];
  duet_config_digest(cfg.get(), digest, sizeof digest);
  duet_config_get(cfg.get(), "experiment", exp_name, sizeof exp_name);
  duet_config_get(cfg.get(), "output_dir", outdir_buf, sizeof outdir_buf);
  std::printf("duet %s: experiment=%s digest=%s out=%s\n", duet_version(),
              exp_name, digest, outdir_buf);

  st = duet_run(cfg.get());
  if (st != DUET_OK) return fail_with(st);
  std::printf("duet: all bounds passed; summary written to %s/summary.json\n",
              outdir_buf);
  return 0;
}
