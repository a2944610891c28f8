#include "duet/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "duet/errors.hpp"
#include "duet/model.hpp"
#include "duet/oracle.hpp"

namespace duet::experiments {

namespace {

using config::Experiment;
using config::ExperimentConfig;
using verify::EnsembleSummary;
using verify::MeanSE;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

sde::Scheme scheme_of(const ExperimentConfig& cfg) {
  return cfg.integrator == "euler" ? sde::Scheme::kEuler : sde::Scheme::kSplit;
}

void fill_env(EnsembleSummary& s, const ExperimentConfig& cfg, double dt_eff) {
  s.experiment = config::to_string(cfg.experiment);
  s.master_seed = cfg.seed;
  s.n_paths = cfg.n_paths;
  s.config_digest = cfg.digest();
  s.dt = dt_eff;
  s.integrator = cfg.integrator;
  s.potential = cfg.potential;
}

// ---------------------------------------------------------------------------

RunOutput run_simulate(const ExperimentConfig& cfg) {
  const auto& pot = model::potential_by_name(cfg.potential);
  rng::NoiseStream ns(cfg.seed, 0);
  model::PhaseState init{cfg.r1_0, cfg.r2_0, cfg.theta1_0, cfg.theta2_0};
  RunOutput out;
  out.trajectory = sde::simulate(init, pot, cfg.horizon, cfg.dt, &ns, cfg.stride,
                                 {scheme_of(cfg), true, true});
  const sde::Trajectory& tr = *out.trajectory;

  // diagnostic: the decomposition r1 = r1(0) + W1 + Z must hold on the grid
  double ident = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    ident = std::max(ident, std::fabs(tr.r1[i] - (tr.r1[0] + tr.w1[i] + tr.z[i])));
  }
  fill_env(out.summary, cfg, cfg.dt);
  out.summary.n_paths = 1;
  const model::PhaseState last = tr.state_at(tr.size() - 1);
  out.summary.add_stat("r1_final", last.r1, 0.0, 1);
  out.summary.add_stat("r2_final", last.r2, 0.0, 1);
  out.summary.add_stat("energy_final", model::hamiltonian(last, pot), 0.0, 1);
  out.summary.add_stat("decomposition_residual_max", ident, 0.0, tr.size());

  PlotSeries ps{"r1_path", {}};
  for (std::size_t i = 0; i < tr.size(); ++i) {
    ps.rows.push_back({tr.times[i], tr.r1[i], 0.0});
  }
  out.plots.push_back(std::move(ps));
  return out;
}

RunOutput run_limit_experiment(const ExperimentConfig& cfg, bool with_defects) {
  const auto& pot = model::potential_by_name(cfg.potential);
  verify::LimitSettings s;
  s.T = cfg.T;
  s.dt = cfg.dt;
  s.n_paths = cfg.n_paths;
  s.seed = cfg.seed;
  s.workers = cfg.workers;
  s.pot = &pot;
  s.scheme = scheme_of(cfg);
  s.init = {cfg.r1_0, cfg.r2_0, cfg.theta1_0, cfg.theta2_0};
  s.with_defects = with_defects;
  const verify::LimitResult res = verify::run_limit(s);

  RunOutput out;
  fill_env(out.summary, cfg, cfg.dt);
  out.summary.add_stat("ks_statistic", res.ks_one, 0.0, cfg.n_paths);
  out.summary.add_stat("ks_statistic_half", res.ks_half, 0.0, cfg.n_paths);
  out.summary.add_stat("quad_var_increment", res.quad_var);

  if (!with_defects) {
    out.summary.add_bound("ks(|X_1|, half-normal var 1) <= 0.05", res.ks_one, 0.05);
    out.summary.add_bound("ks(|X_1/2|, half-normal var 1/2) <= 0.05", res.ks_half,
                          0.05);
    out.summary.add_bound(
        "|E(X_1 - X_1/2)^2 - 1/2| <= max(4 se, 5%)",
        std::fabs(res.quad_var.mean - 0.5),
        std::max(4.0 * res.quad_var.se, 0.025));

    // empirical CDF of |X_1| against the half-normal reference
    std::vector<double> sorted(res.x_one.size());
    for (std::size_t i = 0; i < res.x_one.size(); ++i) sorted[i] = std::fabs(res.x_one[i]);
    std::sort(sorted.begin(), sorted.end());
    PlotSeries emp{"empirical_cdf_abs_x1", {}};
    PlotSeries ref{"half_normal_cdf", {}};
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      emp.rows.push_back({sorted[i], (static_cast<double>(i) + 1.0) / n, 0.0});
      ref.rows.push_back({sorted[i], oracle::half_normal_cdf(sorted[i], 1.0), 0.0});
    }
    out.plots.push_back(std::move(emp));
    out.plots.push_back(std::move(ref));
  } else {
    out.summary.add_stat("defect_exp(-x^2)", res.defect_gauss);
    out.summary.add_stat("defect_1/(1+x^2)", res.defect_cauchy);
    out.summary.add_bound("|defect exp(-x^2)| <= 4 se + 0.02",
                          std::fabs(res.defect_gauss.mean),
                          4.0 * res.defect_gauss.se + 0.02);
    out.summary.add_bound("|defect 1/(1+x^2)| <= 4 se + 0.02",
                          std::fabs(res.defect_cauchy.mean),
                          4.0 * res.defect_cauchy.se + 0.02);

    // oracle control on exactly sampled reflected Brownian paths
    const std::size_t n_ctrl = std::max<std::size_t>(cfg.n_paths, 8192);
    for (const auto& spec : {verify::spec_gauss_bump(1.0, cfg.T),
                             verify::spec_cauchy_bump(1.0, cfg.T)}) {
      const MeanSE ctrl = verify::martingale_defect_reflected_bm(
          spec, n_ctrl, verify::sub_seed(cfg.seed, 21), cfg.workers, 1e-3);
      out.summary.add_stat("bm_control_defect_" + spec.name, ctrl);
      out.summary.add_bound("|bm control defect " + spec.name + "| <= 4 se + 0.01",
                            std::fabs(ctrl.mean), 4.0 * ctrl.se + 0.01);
    }

    PlotSeries ps{"defect_vs_T", {}};
    ps.rows.push_back({cfg.T, res.defect_gauss.mean, res.defect_gauss.se});
    ps.rows.push_back({cfg.T, res.defect_cauchy.mean, res.defect_cauchy.se});
    out.plots.push_back(std::move(ps));
  }

  if (cfg.write_paths) {
    out.paths_header = {"trajectory_index", "x_half", "x_one"};
    for (std::size_t i = 0; i < res.x_one.size(); ++i) {
      out.paths_rows.push_back(
          {static_cast<double>(i), res.x_half[i], res.x_one[i]});
    }
  }
  return out;
}

RunOutput run_expansion(const ExperimentConfig& cfg) {
  const auto& pot = model::potential_by_name(cfg.potential);
  verify::ExpansionSettings s;
  s.n_paths = cfg.n_paths;
  s.seed = cfg.seed;
  s.workers = cfg.workers;
  s.pot = &pot;
  s.scheme = scheme_of(cfg);

  // refined residual with r2(0) = 0, crude residual with r2(0) = 1
  s.r2_0 = 0.0;
  const verify::ExpansionResult refined = verify::expansion_residual(s);
  s.r2_0 = 1.0;
  s.seed = verify::sub_seed(cfg.seed, 7, 1);
  const verify::ExpansionResult crude = verify::expansion_residual(s);

  RunOutput out;
  fill_env(out.summary, cfg, 0.0);  // dt varies per R: sigma/steps
  out.summary.add_stat("slope_refined", refined.slope_refined, 0.0,
                       refined.points.size());
  out.summary.add_stat("slope_crude", crude.slope_crude, 0.0, crude.points.size());
  out.summary.add_bound("slope_refined >= 2.2", 2.2 - refined.slope_refined, 0.0);
  out.summary.add_bound("slope_refined <= 2.8", refined.slope_refined - 2.8, 0.0);
  out.summary.add_bound("slope_crude >= 1.8", 1.8 - crude.slope_crude, 0.0);
  out.summary.add_bound("slope_crude <= 2.3", crude.slope_crude - 2.3, 0.0);

  PlotSeries pr{"l2_residual_refined", {}}, pc{"l2_residual_crude", {}};
  for (const auto& p : refined.points) {
    pr.rows.push_back({p.sigma, p.l2_refined, p.se_refined});
    out.summary.add_stat("l2_refined_R" + std::to_string(static_cast<int>(p.R)),
                         p.l2_refined, p.se_refined, cfg.n_paths);
  }
  for (const auto& p : crude.points) {
    pc.rows.push_back({p.sigma, p.l2_crude, p.se_crude});
    out.summary.add_stat("l2_crude_R" + std::to_string(static_cast<int>(p.R)),
                         p.l2_crude, p.se_crude, cfg.n_paths);
  }
  out.plots.push_back(std::move(pr));
  out.plots.push_back(std::move(pc));
  return out;
}

RunOutput run_moments(const ExperimentConfig& cfg) {
  const auto& pot = model::potential_by_name(cfg.potential);
  verify::MomentSettings s;
  s.R = cfg.R;
  s.r2_0 = cfg.r2_0;
  s.alpha_t = cfg.alpha_t;
  s.dt = std::min(cfg.dt, 1.0 / (16.0 * cfg.R));
  s.n_paths = cfg.n_paths;
  s.seed = cfg.seed;
  s.workers = cfg.workers;
  s.pot = &pot;
  s.scheme = scheme_of(cfg);
  const verify::MomentResult res = verify::moment_drift_diffusion(s);

  RunOutput out;
  fill_env(out.summary, cfg, s.dt);
  out.summary.add_stat("t_R", res.t_R, 0.0, 1);
  out.summary.add_stat("drift", res.drift);
  out.summary.add_stat("second_moment", res.second);
  out.summary.add_bound("|E dr1| <= 4 se + 0.1 t(R)/R", std::fabs(res.drift.mean),
                        4.0 * res.drift.se + 0.1 * res.t_R / cfg.R);
  out.summary.add_bound("|E dr1^2 - t(R)| <= max(4 se, 5%)",
                        std::fabs(res.second.mean - res.t_R),
                        std::max(4.0 * res.second.se, 0.05 * res.t_R));

  PlotSeries ps{"increment_moments", {}};
  ps.rows.push_back({cfg.R, res.drift.mean, res.drift.se});
  ps.rows.push_back({cfg.R, res.second.mean, res.second.se});
  out.plots.push_back(std::move(ps));
  return out;
}

RunOutput run_decorrelation(const ExperimentConfig& cfg) {
  const auto& pot = model::potential_by_name(cfg.potential);
  verify::DecorrelationSettings s;
  s.R = cfg.R;
  s.r2_0 = cfg.r2_0;
  s.dt = std::min(cfg.dt, 1.0 / (16.0 * cfg.R));
  s.n_paths = cfg.n_paths;
  s.seed = cfg.seed;
  s.workers = cfg.workers;
  s.pot = &pot;
  s.scheme = scheme_of(cfg);
  const auto cells = verify::decorrelation(s);

  RunOutput out;
  fill_env(out.summary, cfg, s.dt);
  const double t_last = s.t_list.back();
  PlotSeries ps{"decorrelation_t" + std::to_string(static_cast<int>(t_last)), {}};
  for (const auto& c : cells) {
    char name[64];
    std::snprintf(name, sizeof name, "E[r2 V'(th2-th0)] t=%g th0=%.2f", c.t,
                  c.theta0);
    out.summary.add_stat(name, c.estimate);
    if (c.t == t_last) {
      ps.rows.push_back({c.theta0, c.estimate.mean, c.estimate.se});
      char bname[96];
      std::snprintf(bname, sizeof bname, "|E[r2 V']| <= 4 se + 0.02 (t=%g th0=%.2f)",
                    c.t, c.theta0);
      out.summary.add_bound(bname, std::fabs(c.estimate.mean),
                            4.0 * c.estimate.se + 0.02);
    }
  }
  out.plots.push_back(std::move(ps));
  return out;
}

RunOutput run_exit(const ExperimentConfig& cfg) {
  const auto& pot = model::potential_by_name(cfg.potential);
  verify::ExitSettings s;
  s.R = cfg.R;
  s.beta = cfg.beta;
  s.alpha = cfg.alpha;
  s.r2_0 = cfg.r2_0;
  s.dt = std::min(cfg.dt, 1.0 / (8.0 * cfg.R));
  s.n_paths = cfg.n_paths;
  s.seed = cfg.seed;
  s.workers = cfg.workers;
  s.pot = &pot;
  s.scheme = scheme_of(cfg);
  const verify::ExitStats res = verify::exit_interval_stats(s);

  const double R2 = cfg.R * cfg.R;
  const double lead =
      (std::pow(2.0, 1.0 / cfg.beta) - 1.0) * (1.0 - std::pow(0.5, 1.0 / cfg.beta));

  RunOutput out;
  fill_env(out.summary, cfg, s.dt);
  out.summary.add_stat("mean_exit_time", res.mean_time);
  out.summary.add_stat("lower_exit_prob", res.lower_prob);
  out.summary.add_stat("capped_paths", static_cast<double>(res.capped), 0.0,
                       cfg.n_paths);
  out.summary.add_stat("r2_stopped_paths", static_cast<double>(res.r2_stopped), 0.0,
                       cfg.n_paths);
  out.summary.add_bound("E tau <= (2^(1/b)-1)(1-2^(-1/b)) R^2 + 0.1 R^2 + 4 se",
                        res.mean_time.mean,
                        lead * R2 + 0.1 * R2 + 4.0 * res.mean_time.se);
  out.summary.add_bound("P(lower exit) <= 2/3 + 4 se", res.lower_prob.mean,
                        2.0 / 3.0 + 4.0 * res.lower_prob.se);

  PlotSeries ps{"exit_stats", {}};
  ps.rows.push_back({cfg.R, res.mean_time.mean, res.mean_time.se});
  ps.rows.push_back({cfg.R, res.lower_prob.mean, res.lower_prob.se});
  out.plots.push_back(std::move(ps));
  return out;
}

RunOutput run_excursions(const ExperimentConfig& cfg) {
  const auto& pot = model::potential_by_name(cfg.potential);
  verify::LaplaceSettings s;
  s.epsilon = cfg.epsilon;
  s.T = cfg.T;
  s.r2_0 = cfg.r2_0;
  s.dt = cfg.dt;
  s.n_paths = cfg.n_paths;
  s.seed = cfg.seed;
  s.workers = cfg.workers;
  s.pot = &pot;
  s.scheme = scheme_of(cfg);
  const verify::LaplaceResult sys = verify::excursion_laplace(s);

  const std::size_t n_ctrl = std::min<std::size_t>(cfg.n_paths, 8192);
  const verify::LaplaceResult ctrl = verify::excursion_laplace_reflected_bm(
      cfg.epsilon, n_ctrl, verify::sub_seed(cfg.seed, 31), cfg.workers, 1e-4);
  const double closed_form = std::exp(-std::sqrt(2.0) * cfg.epsilon);

  RunOutput out;
  fill_env(out.summary, cfg, cfg.dt);
  out.summary.add_stat("laplace_system", sys.laplace);
  out.summary.add_stat("laplace_bm_control", ctrl.laplace);
  out.summary.add_stat("laplace_bm_closed_form", closed_form, 0.0, 1);
  out.summary.add_stat("censored_system", static_cast<double>(sys.censored), 0.0,
                       cfg.n_paths);
  out.summary.add_stat("censored_bm", static_cast<double>(ctrl.censored), 0.0,
                       n_ctrl);
  out.summary.add_bound("E e^-eta <= 1 - 0.05 eps + 4 se", sys.laplace.mean,
                        1.0 - 0.05 * cfg.epsilon + 4.0 * sys.laplace.se);
  out.summary.add_bound("|bm control - closed form| <= 4 se",
                        std::fabs(ctrl.laplace.mean - closed_form),
                        4.0 * ctrl.laplace.se);
  out.summary.add_bound("system <= bm control + 4 se(combined)",
                        sys.laplace.mean - ctrl.laplace.mean,
                        4.0 * (sys.laplace.se + ctrl.laplace.se));

  // excursion ladder event table from a few recorded trajectories
  const double r2_cap = std::pow(std::log(cfg.T), cfg.alpha2);
  const std::size_t n_event_paths = std::min<std::size_t>(cfg.n_paths, 8);
  for (std::size_t i = 0; i < n_event_paths; ++i) {
    rng::NoiseStream ns(verify::sub_seed(cfg.seed, 11), i);
    model::PhaseState init{2.0 * cfg.epsilon * std::sqrt(cfg.T), cfg.r2_0,
                           ns.uniform_init(), ns.uniform_init()};
    const auto traj = sde::simulate(init, pot, cfg.T, cfg.dt, &ns, 16,
                                    {scheme_of(cfg), true, true});
    const auto xp = observe::scaled_process(traj, cfg.T);
    const observe::Path r2p{xp.times, traj.r2};
    const auto rec = observe::excursions(xp, cfg.epsilon, r2p, r2_cap, cfg.T);
    for (std::size_t k = 0; k < rec.eta.size(); ++k) {
      out.events.push_back({i, "eta", k + 1, rec.eta[k], cfg.epsilon});
    }
    for (std::size_t k = 0; k < rec.sigma_up.size(); ++k) {
      out.events.push_back({i, "sigma", k + 1, rec.sigma_up[k], 2.0 * cfg.epsilon});
    }
    if (rec.zeta) out.events.push_back({i, "zeta", 0, *rec.zeta, r2_cap});
    for (const auto& [lvl, t] : rec.tau_level) {
      out.events.push_back({i, "tau", 0, t, lvl});
    }
  }

  PlotSeries ps{"excursion_laplace", {}};
  ps.rows.push_back({cfg.epsilon, sys.laplace.mean, sys.laplace.se});
  ps.rows.push_back({cfg.epsilon, ctrl.laplace.mean, ctrl.laplace.se});
  out.plots.push_back(std::move(ps));
  return out;
}

RunOutput run_near_zero(const ExperimentConfig& cfg) {
  const auto& pot = model::potential_by_name(cfg.potential);
  verify::NearZeroSettings s;
  s.epsilon = cfg.epsilon;
  s.T = cfg.T;
  s.alpha2 = cfg.alpha2;
  s.r1_0 = cfg.r1_0;
  s.r2_0 = cfg.r2_0;
  s.dt = cfg.dt;
  s.n_paths = cfg.n_paths;
  s.seed = cfg.seed;
  s.workers = cfg.workers;
  s.pot = &pot;
  s.scheme = scheme_of(cfg);
  const verify::NearZeroResult res = verify::time_near_zero(s);

  const double budget = 10.0 * cfg.epsilon * cfg.epsilon * cfg.T;
  RunOutput out;
  fill_env(out.summary, cfg, cfg.dt);
  out.summary.add_stat("mean_time_near_zero", res.mean_time);
  out.summary.add_stat("capped_paths", static_cast<double>(res.capped), 0.0,
                       cfg.n_paths);
  out.summary.add_stat("zeta_stopped_paths", static_cast<double>(res.zeta_stopped),
                       0.0, cfg.n_paths);
  out.summary.add_bound("E tau(eps sqrt(T)) ^ zeta <= 10 eps^2 T + 4 se",
                        res.mean_time.mean, budget + 4.0 * res.mean_time.se);

  PlotSeries ps{"time_near_zero", {}};
  ps.rows.push_back({cfg.epsilon, res.mean_time.mean, res.mean_time.se});
  out.plots.push_back(std::move(ps));
  return out;
}

RunOutput run_supr2(const ExperimentConfig& cfg) {
  const auto& pot = model::potential_by_name(cfg.potential);
  verify::SupSettings s;
  s.t = 1.0;
  s.T = cfg.T;
  s.D = cfg.D;
  s.r1_0 = cfg.r1_0;
  s.r2_0 = cfg.r2_0;
  s.dt = cfg.dt;
  s.n_paths = cfg.n_paths;
  s.seed = cfg.seed;
  s.workers = cfg.workers;
  s.pot = &pot;
  s.scheme = scheme_of(cfg);
  const verify::SupResult res = verify::sup_r2_tail(s);

  RunOutput out;
  fill_env(out.summary, cfg, cfg.dt);
  out.summary.add_stat("violation_prob", res.violation_prob);
  out.summary.add_stat("doob_bound", res.bound, 0.0, 1);
  out.summary.add_stat("sup_max_observed", res.sup_max, 0.0, cfg.n_paths);
  out.summary.add_bound("P(sup |r2| > |r2(0)| + D) + 4 se <= bound",
                        res.violation_prob.mean + 4.0 * res.violation_prob.se,
                        res.bound);

  PlotSeries ps{"sup_tail", {}};
  ps.rows.push_back({cfg.D, res.violation_prob.mean, res.violation_prob.se});
  ps.rows.push_back({cfg.D, res.bound, 0.0});
  out.plots.push_back(std::move(ps));
  return out;
}

// ---------------------------------------------------------------------------
// output files

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open '" + p.string() + "' for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("write failed for '" + p.string() + "'");
}

std::string plotdata_tsv(const RunOutput& out, const ExperimentConfig& cfg) {
  std::string s;
  s += "# config_digest=" + cfg.digest() + "\n";
  s += "# experiment=" + std::string(config::to_string(cfg.experiment)) + "\n";
  s += "x\ty\ty_err\n";
  for (const auto& series : out.plots) {
    s += "# series: " + series.name + "\n";
    for (const auto& row : series.rows) {
      s += fmt(row[0]) + "\t" + fmt(row[1]) + "\t" + fmt(row[2]) + "\n";
    }
  }
  return s;
}

std::string trajectory_csv(const sde::Trajectory& tr, const ExperimentConfig& cfg) {
  std::string s;
  s += "# config_digest=" + cfg.digest() + "\n";
  s += "t,r1,r2,theta1,theta2,w1,w2,z\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    s += fmt(tr.times[i]) + "," + fmt(tr.r1[i]) + "," + fmt(tr.r2[i]) + "," +
         fmt(tr.theta1[i]) + "," + fmt(tr.theta2[i]) + "," + fmt(tr.w1[i]) + "," +
         fmt(tr.w2[i]) + "," + fmt(tr.z[i]) + "\n";
  }
  return s;
}

std::string observables_csv(const RunOutput& out, const ExperimentConfig& cfg) {
  std::string s;
  s += "# config_digest=" + cfg.digest() + "\n";
  for (std::size_t j = 0; j < out.paths_header.size(); ++j) {
    s += (j ? "," : "") + out.paths_header[j];
  }
  s += "\n";
  for (const auto& row : out.paths_rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      s += (j ? "," : "") + fmt(row[j]);
    }
    s += "\n";
  }
  return s;
}

std::string events_csv(const RunOutput& out, const ExperimentConfig& cfg) {
  std::string s;
  s += "# config_digest=" + cfg.digest() + "\n";
  s += "trajectory_index,kind,k,time,level\n";
  for (const auto& e : out.events) {
    s += std::to_string(e.trajectory_index) + "," + e.kind + "," +
         std::to_string(e.k) + "," + fmt(e.time) + "," + fmt(e.level) + "\n";
  }
  return s;
}

}  // namespace

RunOutput run_ensemble(const ExperimentConfig& cfg) {
  cfg.validate();
  switch (cfg.experiment) {
    case Experiment::kSimulate:
      return run_simulate(cfg);
    case Experiment::kLimit:
      return run_limit_experiment(cfg, false);
    case Experiment::kMartingale:
      return run_limit_experiment(cfg, true);
    case Experiment::kExpansion:
      return run_expansion(cfg);
    case Experiment::kMoments:
      return run_moments(cfg);
    case Experiment::kDecorrelation:
      return run_decorrelation(cfg);
    case Experiment::kExit:
      return run_exit(cfg);
    case Experiment::kExcursions:
      return run_excursions(cfg);
    case Experiment::kNearZero:
      return run_near_zero(cfg);
    case Experiment::kSupR2:
      return run_supr2(cfg);
  }
  throw std::logic_error("unhandled experiment");
}

namespace {

nlohmann::ordered_json summary_to_json(const RunOutput& out,
                                       const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema"] = "duet-summary-v1";
  j["experiment"] = out.summary.experiment;
  j["config_digest"] = out.summary.config_digest;
  j["master_seed"] = out.summary.master_seed;
  j["n_paths"] = out.summary.n_paths;
  nlohmann::ordered_json env;
  env["dt_effective"] = out.summary.dt;
  env["integrator"] = out.summary.integrator;
  env["gaussian_method"] = out.summary.gaussian_method;
  env["potential"] = out.summary.potential;
  j["environment"] = env;
  nlohmann::ordered_json conf;
  for (const auto& [k, v] : cfg.semantic_items()) conf[k] = v;
  j["config"] = conf;
  nlohmann::ordered_json stats = nlohmann::ordered_json::array();
  for (const auto& st : out.summary.statistics) {
    nlohmann::ordered_json s;
    s["name"] = st.name;
    s["estimate"] = st.estimate;
    s["se"] = st.se;
    s["n_effective"] = st.n_effective;
    stats.push_back(s);
  }
  j["statistics"] = stats;
  nlohmann::ordered_json bounds = nlohmann::ordered_json::array();
  for (const auto& b : out.summary.bounds) {
    nlohmann::ordered_json s;
    s["name"] = b.name;
    s["value"] = b.value;
    s["limit"] = b.limit;
    s["pass"] = b.pass;
    bounds.push_back(s);
  }
  j["bounds"] = bounds;
  j["passed"] = out.summary.passed();
  return j;
}

}  // namespace

std::string summary_json(const RunOutput& out, const ExperimentConfig& cfg) {
  return summary_to_json(out, cfg).dump(2);
}

verify::EnsembleSummary run_and_write(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::filesystem::path dir(cfg.output_dir);
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("output directory '" + dir.string() + "' does not exist");
  }

  const auto t0 = std::chrono::steady_clock::now();
  RunOutput out = run_ensemble(cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::ordered_json j = summary_to_json(out, cfg);
  nlohmann::ordered_json runtime;
  runtime["wall_clock_seconds"] = wall;
  runtime["workers"] = cfg.workers;
  runtime["output_dir"] = cfg.output_dir;
  j["runtime"] = runtime;
  write_file(dir / "summary.json", j.dump(2) + "\n");
  write_file(dir / "plotdata.tsv", plotdata_tsv(out, cfg));

  if (out.trajectory) {
    write_file(dir / "paths.csv", trajectory_csv(*out.trajectory, cfg));
  } else if (cfg.write_paths && !out.paths_rows.empty()) {
    write_file(dir / "paths.csv", observables_csv(out, cfg));
  }
  if (!out.events.empty()) {
    write_file(dir / "events.csv", events_csv(out, cfg));
  }
  return out.summary;
}

}  // namespace duet::experiments
