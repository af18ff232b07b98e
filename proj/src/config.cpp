#include "dgpo/config.hpp"

#include "dgpo/baselines.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dgpo {

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::kDgpo: return "dgpo";
    case Algo::kPpo: return "ppo";
    case Algo::kDiayn: return "diayn";
    case Algo::kSmerl: return "smerl";
    case Algo::kDgpoNoStage1: return "dgpo_no_stage1";
    case Algo::kDgpoNoStage2: return "dgpo_no_stage2";
    case Algo::kDgpoMiMetric: return "dgpo_mi_metric";
  }
  throw std::logic_error("algo_name: bad algo");
}

Algo algo_from_name(const std::string& name) {
  if (name == "dgpo") return Algo::kDgpo;
  if (name == "ppo") return Algo::kPpo;
  if (name == "diayn") return Algo::kDiayn;
  if (name == "smerl") return Algo::kSmerl;
  if (name == "dgpo_no_stage1") return Algo::kDgpoNoStage1;
  if (name == "dgpo_no_stage2") return Algo::kDgpoNoStage2;
  if (name == "dgpo_mi_metric") return Algo::kDgpoMiMetric;
  throw std::invalid_argument("unknown algo '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad real '" + v + "'");
  }
}

std::size_t parse_size(const std::string& v) {
  try {
    std::size_t pos = 0;
    unsigned long long u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return static_cast<std::size_t>(u);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad integer '" + v + "'");
  }
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("bad boolean '" + v + "'");
}

std::vector<std::size_t> parse_size_list(const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_size(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list '" + v + "'");
  return out;
}

std::string fmt_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"env", [](ExperimentConfig& c, const std::string& v) { c.env = env_kind_from_name(v); }},
      {"algo", [](ExperimentConfig& c, const std::string& v) { c.algo = algo_from_name(v); }},
      {"n_z", [](ExperimentConfig& c, const std::string& v) { c.n_z = parse_size(v); }},
      {"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = std::stoull(v); }},
      {"iterations", [](ExperimentConfig& c, const std::string& v) { c.iterations = parse_size(v); }},
      {"gamma", [](ExperimentConfig& c, const std::string& v) { c.gamma = parse_double(v); }},
      {"gae_lambda", [](ExperimentConfig& c, const std::string& v) { c.gae_lambda = parse_double(v); }},
      {"clip_eps", [](ExperimentConfig& c, const std::string& v) { c.clip_eps = parse_double(v); }},
      {"epochs", [](ExperimentConfig& c, const std::string& v) { c.epochs = parse_size(v); }},
      {"minibatches", [](ExperimentConfig& c, const std::string& v) { c.minibatches = parse_size(v); }},
      {"entropy_coef", [](ExperimentConfig& c, const std::string& v) { c.entropy_coef = parse_double(v); }},
      {"value_coef", [](ExperimentConfig& c, const std::string& v) { c.value_coef = parse_double(v); }},
      {"max_grad_norm", [](ExperimentConfig& c, const std::string& v) { c.max_grad_norm = parse_double(v); }},
      {"learning_rate", [](ExperimentConfig& c, const std::string& v) { c.learning_rate = parse_double(v); }},
      {"n_envs", [](ExperimentConfig& c, const std::string& v) { c.n_envs = parse_size(v); }},
      {"n_steps", [](ExperimentConfig& c, const std::string& v) { c.n_steps = parse_size(v); }},
      {"alpha", [](ExperimentConfig& c, const std::string& v) { c.alpha = parse_double(v); }},
      {"delta_step", [](ExperimentConfig& c, const std::string& v) { c.delta_step = parse_double(v); }},
      {"delta_step_mi", [](ExperimentConfig& c, const std::string& v) { c.delta_step_mi = parse_double(v); }},
      {"delta", [](ExperimentConfig& c, const std::string& v) { c.delta = parse_double(v); }},
      {"r_target_frac", [](ExperimentConfig& c, const std::string& v) { c.r_target_frac = parse_double(v); }},
      {"r_target", [](ExperimentConfig& c, const std::string& v) { c.r_target = parse_double(v); }},
      {"ema_momentum", [](ExperimentConfig& c, const std::string& v) { c.ema_momentum = parse_double(v); }},
      {"hysteresis_frac", [](ExperimentConfig& c, const std::string& v) { c.hysteresis_frac = parse_double(v); }},
      {"per_latent_gates", [](ExperimentConfig& c, const std::string& v) { c.per_latent_gates = parse_bool(v); }},
      {"disc_obs_noise", [](ExperimentConfig& c, const std::string& v) { c.disc_obs_noise = parse_double(v); }},
      {"latent_init_gain", [](ExperimentConfig& c, const std::string& v) { c.latent_init_gain = parse_double(v); }},
      {"disc_lr_scale", [](ExperimentConfig& c, const std::string& v) { c.disc_lr_scale = parse_double(v); }},
      {"absorbing_diversity",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "auto") c.absorbing_diversity = -1;
         else c.absorbing_diversity = parse_bool(v) ? 1 : 0;
       }},
      {"disc_smoothing", [](ExperimentConfig& c, const std::string& v) { c.disc_smoothing = parse_double(v); }},
      {"latent_sampling",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "round_robin") c.latent_sampling = LatentSampling::kRoundRobin;
         else if (v == "iid") c.latent_sampling = LatentSampling::kIid;
         else throw std::invalid_argument("bad latent_sampling '" + v + "'");
       }},
      {"hidden", [](ExperimentConfig& c, const std::string& v) { c.hidden = parse_size_list(v); }},
      {"activation",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "tanh") c.activation = Activation::kTanh;
         else if (v == "relu") c.activation = Activation::kRelu;
         else throw std::invalid_argument("bad activation '" + v + "'");
       }},
      {"checkpoint_every", [](ExperimentConfig& c, const std::string& v) { c.checkpoint_every = parse_size(v); }},
      {"eval_every", [](ExperimentConfig& c, const std::string& v) { c.eval_every = parse_size(v); }},
      {"eval_episodes", [](ExperimentConfig& c, const std::string& v) { c.eval_episodes = parse_size(v); }},
      {"output_dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }},
      {"resolved", [](ExperimentConfig& c, const std::string& v) { c.resolved = parse_bool(v); }},
  };
  return table;
}

void apply_assignment(ExperimentConfig& cfg, const std::string& key,
                      const std::string& value, const std::string& where) {
  auto it = setters().find(key);
  if (it == setters().end()) {
    throw std::invalid_argument(where + ": unknown config key '" + key + "'");
  }
  try {
    it->second(cfg, value);
  } catch (const std::exception& e) {
    throw std::invalid_argument(where + ": key '" + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      throw std::invalid_argument(where + ": expected 'key = value', got '" +
                                  line + "'");
    }
    apply_assignment(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                     where);
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str(), path);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("override '" + assignment +
                                "' is not of the form key=value");
  }
  apply_assignment(cfg, trim(assignment.substr(0, eq)),
                   trim(assignment.substr(eq + 1)), "--set " + assignment);
}

void resolve_config(ExperimentConfig& cfg) {
  if (cfg.n_z < 1) throw std::invalid_argument("config: n_z must be >= 1");
  if (cfg.gamma < 0.0 || cfg.gamma > 1.0 || cfg.gae_lambda < 0.0 ||
      cfg.gae_lambda > 1.0) {
    throw std::invalid_argument("config: gamma and gae_lambda must be in [0, 1]");
  }
  if (cfg.iterations < 1 || cfg.n_envs < 1 || cfg.n_steps < 1 ||
      cfg.epochs < 1 || cfg.minibatches < 1 || cfg.eval_episodes < 1) {
    throw std::invalid_argument("config: counts must be >= 1");
  }
  if (cfg.ema_momentum < 0.0 || cfg.ema_momentum >= 1.0) {
    throw std::invalid_argument("config: ema_momentum must be in [0, 1)");
  }
  if (cfg.eval_every < 1) cfg.eval_every = 1;
  if (cfg.resolved) return;

  // per-environment defaults for fields left on "auto": the continuous
  // field wants a hot policy and an early second stage, the gridworld a
  // crisp policy and tight return maintenance
  const bool grid = cfg.env == EnvKind::kTwoPaths;
  if (std::isnan(cfg.entropy_coef)) cfg.entropy_coef = grid ? 0.1 : 0.05;
  if (std::isnan(cfg.delta_step)) cfg.delta_step = grid ? -0.1 : -0.2;
  if (std::isnan(cfg.r_target_frac)) cfg.r_target_frac = grid ? 0.95 : 0.7;
  if (std::isnan(cfg.disc_obs_noise)) cfg.disc_obs_noise = grid ? 0.05 : 0.1;
  // mixing weight tracks the per-step extrinsic reward scale
  if (std::isnan(cfg.alpha)) cfg.alpha = grid ? 0.02 : 0.1;

  const auto env = make_env(cfg.env);
  if (cfg.absorbing_diversity < 0) {
    cfg.absorbing_diversity = env->terminal_intrinsic_baseline() == 0.0 ? 1 : 0;
  }
  const double horizon = static_cast<double>(env->horizon());
  const double discount_mass =
      cfg.gamma < 1.0 ? (1.0 - std::pow(cfg.gamma, horizon)) / (1.0 - cfg.gamma)
                      : horizon;

  if (cfg.delta == 0.0) {
    double step = cfg.delta_step;
    if (cfg.algo == Algo::kDgpoMiMetric) {
      // satisfiable once the policy set looks diverse on average, even when
      // two codes still coincide; that saturation is this metric's known
      // weakness and the reason the stricter pairwise score exists
      step = cfg.delta_step_mi != 0.0
                 ? cfg.delta_step_mi
                 : 0.25 * std::log(static_cast<double>(std::max<std::size_t>(cfg.n_z, 2)));
      step *= cfg.alpha;  // the stored rewards carry the mixing scale
    }
    cfg.delta = step * discount_mass;
  }
  if (cfg.r_target == 0.0) {
    // fraction of the way from a random policy's discounted return to the
    // oracle optimum, so mostly-negative reward scales behave sensibly
    const double j_opt = env->optimal_discounted_return(cfg.gamma);
    const double j_rand =
        random_policy_discounted_return(cfg.env, 1000, cfg.gamma, 1234567);
    cfg.r_target = j_rand + cfg.r_target_frac * (j_opt - j_rand);
  }
  cfg.resolved = true;
}

std::string config_to_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "env = " << env_kind_name(cfg.env) << "\n";
  os << "algo = " << algo_name(cfg.algo) << "\n";
  os << "n_z = " << cfg.n_z << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "iterations = " << cfg.iterations << "\n";
  os << "gamma = " << fmt_double(cfg.gamma) << "\n";
  os << "gae_lambda = " << fmt_double(cfg.gae_lambda) << "\n";
  os << "clip_eps = " << fmt_double(cfg.clip_eps) << "\n";
  os << "epochs = " << cfg.epochs << "\n";
  os << "minibatches = " << cfg.minibatches << "\n";
  os << "entropy_coef = " << fmt_double(cfg.entropy_coef) << "\n";
  os << "value_coef = " << fmt_double(cfg.value_coef) << "\n";
  os << "max_grad_norm = " << fmt_double(cfg.max_grad_norm) << "\n";
  os << "learning_rate = " << fmt_double(cfg.learning_rate) << "\n";
  os << "n_envs = " << cfg.n_envs << "\n";
  os << "n_steps = " << cfg.n_steps << "\n";
  os << "alpha = " << fmt_double(cfg.alpha) << "\n";
  os << "delta_step = " << fmt_double(cfg.delta_step) << "\n";
  os << "delta_step_mi = " << fmt_double(cfg.delta_step_mi) << "\n";
  os << "delta = " << fmt_double(cfg.delta) << "\n";
  os << "r_target_frac = " << fmt_double(cfg.r_target_frac) << "\n";
  os << "r_target = " << fmt_double(cfg.r_target) << "\n";
  os << "ema_momentum = " << fmt_double(cfg.ema_momentum) << "\n";
  os << "hysteresis_frac = " << fmt_double(cfg.hysteresis_frac) << "\n";
  os << "per_latent_gates = " << (cfg.per_latent_gates ? "true" : "false") << "\n";
  os << "disc_obs_noise = " << fmt_double(cfg.disc_obs_noise) << "\n";
  os << "latent_init_gain = " << fmt_double(cfg.latent_init_gain) << "\n";
  os << "disc_lr_scale = " << fmt_double(cfg.disc_lr_scale) << "\n";
  os << "absorbing_diversity = "
     << (cfg.absorbing_diversity < 0 ? "auto"
                                     : (cfg.absorbing_diversity ? "true" : "false"))
     << "\n";
  os << "disc_smoothing = " << fmt_double(cfg.disc_smoothing) << "\n";
  os << "latent_sampling = "
     << (cfg.latent_sampling == LatentSampling::kRoundRobin ? "round_robin" : "iid")
     << "\n";
  os << "hidden = ";
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i) {
    if (i) os << ",";
    os << cfg.hidden[i];
  }
  os << "\n";
  os << "activation = " << (cfg.activation == Activation::kTanh ? "tanh" : "relu")
     << "\n";
  os << "checkpoint_every = " << cfg.checkpoint_every << "\n";
  os << "eval_every = " << cfg.eval_every << "\n";
  os << "eval_episodes = " << cfg.eval_episodes << "\n";
  if (!cfg.output_dir.empty()) os << "output_dir = " << cfg.output_dir << "\n";
  os << "resolved = " << (cfg.resolved ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace dgpo
