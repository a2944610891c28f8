#include "duet/config.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "duet/errors.hpp"
#include "duet/model.hpp"

namespace duet::config {

namespace {

struct ExperimentInfo {
  Experiment id;
  const char* name;
  const char* anchor;
  const char* summary;
};

constexpr ExperimentInfo kExperiments[] = {
    {Experiment::kSimulate, "simulate", "eq. (1.1)",
     "integrate one trajectory of the coupled system and export it as CSV"},
    {Experiment::kLimit, "limit", "Theorem 1.1",
     "KS test of |r1(tT)|/sqrt(T) against the half-normal law at t = 1/2, 1, "
     "plus the quadratic-variation proxy E[(X_1 - X_1/2)^2] = 1/2"},
    {Experiment::kExpansion, "expansion", "Lemma 2.1",
     "log-log slope of the L2 residual of the one-rotation expansion of Z"},
    {Experiment::kMoments, "moments", "Corollary 4.4",
     "drift and diffusion moments of r1 over the horizon t(R) = R^alpha_t"},
    {Experiment::kDecorrelation, "decorrelation", "Lemma 3.4",
     "decay of E[r2(t) V'(theta2(t) - theta0)] over a grid of theta0"},
    {Experiment::kExit, "exit", "Lemma 4.5",
     "mean exit time and exit-side probability of |r1|^beta from "
     "[R^beta/2, 2R^beta]"},
    {Experiment::kExcursions, "excursions", "Corollary 5.4",
     "excursion Laplace transform E[e^-eta] from |X| = 2 eps down to eps"},
    {Experiment::kNearZero, "near-zero", "Proposition 5.2",
     "expected time spent by |r1| below eps sqrt(T)"},
    {Experiment::kMartingale, "martingale", "Lemma 6.3",
     "martingale-problem defect E[f(|X_t|) - f(|X_0|) - 1/2 int f''(|X_s|) ds]"},
    {Experiment::kSupR2, "supr2", "Proposition 3.1",
     "tail of the running sup of |r2| against the explicit bound "
     "18 t T D e^{-(D-1)^2}"},
};

const ExperimentInfo& info(Experiment e) {
  for (const auto& x : kExperiments) {
    if (x.id == e) return x;
  }
  throw std::logic_error("unknown experiment enum value");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& v, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(ctx + "cannot parse '" + v + "' as a number");
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(ctx + "cannot parse '" + v + "' as an unsigned integer");
  }
}

bool parse_bool(const std::string& v, const std::string& ctx) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(ctx + "cannot parse '" + v + "' as a boolean");
}

}  // namespace

const char* to_string(Experiment e) { return info(e).name; }
const char* experiment_summary(Experiment e) { return info(e).summary; }
const char* experiment_anchor(Experiment e) { return info(e).anchor; }

std::optional<Experiment> experiment_from_string(const std::string& name) {
  for (const auto& x : kExperiments) {
    if (name == x.name) return x.id;
  }
  return std::nullopt;
}

std::vector<Experiment> all_experiments() {
  std::vector<Experiment> out;
  for (const auto& x : kExperiments) out.push_back(x.id);
  return out;
}

void ExperimentConfig::validate() const {
  scaling().validate();  // named inequalities for the exponent family
  model::potential_by_name(potential);
  if (integrator != "split" && integrator != "euler") {
    throw ConfigError("integrator must be 'split' or 'euler', got '" +
                      integrator + "'");
  }
  if (!(dt > 0.0)) throw ConfigError("dt must satisfy dt > 0");
  if (n_paths == 0) throw ConfigError("n_paths must satisfy n_paths >= 1");
  if (!(horizon > 0.0)) throw ConfigError("horizon must satisfy horizon > 0");
  if (stride == 0) throw ConfigError("stride must satisfy stride >= 1");
}

observe::ScalingParams ExperimentConfig::scaling() const {
  observe::ScalingParams p;
  p.R = R;
  p.alpha = alpha;
  p.alpha_t = alpha_t;
  p.alpha_c = alpha_c;
  p.beta = beta;
  p.epsilon = epsilon;
  p.T = T;
  p.D = D;
  p.alpha1 = alpha1;
  p.alpha2 = alpha2;
  return p;
}

std::vector<std::pair<std::string, std::string>>
ExperimentConfig::semantic_items() const {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"D", fmt_double(D)},
      {"R", fmt_double(R)},
      {"T", fmt_double(T)},
      {"alpha", fmt_double(alpha)},
      {"alpha1", fmt_double(alpha1)},
      {"alpha2", fmt_double(alpha2)},
      {"alpha_c", fmt_double(alpha_c)},
      {"alpha_t", fmt_double(alpha_t)},
      {"beta", fmt_double(beta)},
      {"dt", fmt_double(dt)},
      {"epsilon", fmt_double(epsilon)},
      {"experiment", to_string(experiment)},
      {"horizon", fmt_double(horizon)},
      {"integrator", integrator},
      {"n_paths", std::to_string(n_paths)},
      {"potential", potential},
      {"r1_0", fmt_double(r1_0)},
      {"r2_0", fmt_double(r2_0)},
      {"seed", std::to_string(seed)},
      {"stride", std::to_string(stride)},
      {"theta1_0", fmt_double(theta1_0)},
      {"theta2_0", fmt_double(theta2_0)},
      {"write_paths", write_paths ? "true" : "false"},
  };
  std::sort(kv.begin(), kv.end());
  return kv;
}

std::string ExperimentConfig::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  auto feed = [&h](const std::string& s) {
    for (const unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : semantic_items()) {
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

void apply_kv(ExperimentConfig& cfg, const std::string& key,
              const std::string& value, const std::string& context) {
  const std::string ctx = context.empty() ? "" : context + ": ";
  if (key == "experiment") {
    const auto e = experiment_from_string(value);
    if (!e) {
      std::string names;
      for (const auto& x : kExperiments) {
        if (!names.empty()) names += ", ";
        names += x.name;
      }
      throw ConfigError(ctx + "unknown experiment '" + value +
                        "' (known: " + names + ")");
    }
    cfg.experiment = *e;
  } else if (key == "potential") {
    cfg.potential = value;
  } else if (key == "integrator") {
    cfg.integrator = value;
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "T") {
    cfg.T = parse_double(value, ctx);
  } else if (key == "R") {
    cfg.R = parse_double(value, ctx);
  } else if (key == "epsilon") {
    cfg.epsilon = parse_double(value, ctx);
  } else if (key == "beta") {
    cfg.beta = parse_double(value, ctx);
  } else if (key == "alpha") {
    cfg.alpha = parse_double(value, ctx);
  } else if (key == "alpha_t") {
    cfg.alpha_t = parse_double(value, ctx);
  } else if (key == "alpha_c") {
    cfg.alpha_c = parse_double(value, ctx);
  } else if (key == "alpha1") {
    cfg.alpha1 = parse_double(value, ctx);
  } else if (key == "alpha2") {
    cfg.alpha2 = parse_double(value, ctx);
  } else if (key == "D") {
    cfg.D = parse_double(value, ctx);
  } else if (key == "dt") {
    cfg.dt = parse_double(value, ctx);
  } else if (key == "n_paths") {
    cfg.n_paths = static_cast<std::size_t>(parse_u64(value, ctx));
  } else if (key == "seed") {
    cfg.seed = parse_u64(value, ctx);
  } else if (key == "horizon") {
    cfg.horizon = parse_double(value, ctx);
  } else if (key == "stride") {
    cfg.stride = static_cast<std::size_t>(parse_u64(value, ctx));
  } else if (key == "r1_0") {
    cfg.r1_0 = parse_double(value, ctx);
  } else if (key == "r2_0") {
    cfg.r2_0 = parse_double(value, ctx);
  } else if (key == "theta1_0") {
    cfg.theta1_0 = parse_double(value, ctx);
  } else if (key == "theta2_0") {
    cfg.theta2_0 = parse_double(value, ctx);
  } else if (key == "write_paths") {
    cfg.write_paths = parse_bool(value, ctx);
  } else if (key == "workers") {
    cfg.workers = static_cast<unsigned>(parse_u64(value, ctx));
  } else {
    throw ConfigError(ctx + "unknown key '" + key + "'");
  }
}

std::string get_kv(const ExperimentConfig& cfg, const std::string& key) {
  if (key == "workers") return std::to_string(cfg.workers);
  if (key == "output_dir") return cfg.output_dir;
  if (key == "config_digest") return cfg.digest();
  for (const auto& [k, v] : cfg.semantic_items()) {
    if (k == key) return v;
  }
  throw ConfigError("unknown key '" + key + "'");
}

void load_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string ctx = path + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(ctx + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                              (value.front() == '\'' && value.back() == '\''))) {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw ConfigError(ctx + ": empty key");
    apply_kv(cfg, key, value, ctx);
  }
}

ExperimentConfig parse_file(const std::string& path) {
  ExperimentConfig cfg;
  load_file(cfg, path);
  cfg.validate();
  return cfg;
}

}  // namespace duet::config
