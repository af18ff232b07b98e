#include "dgpo/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "dgpo/behavior.hpp"
#include "dgpo/rng.hpp"

namespace dgpo {

double m_div(const std::vector<std::vector<double>>& embeddings) {
  const std::size_t n = embeddings.size();
  if (n < 2) {
    throw std::invalid_argument("m_div: need at least 2 embeddings");
  }
  for (const auto& e : embeddings) {
    if (e.size() != embeddings[0].size()) {
      throw std::invalid_argument("m_div: embeddings differ in length");
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < embeddings[i].size(); ++k) {
        const double d = embeddings[i][k] - embeddings[j][k];
        sq += d * d;
      }
      total += std::log(std::max(std::sqrt(sq), 1e-6));
    }
  }
  return total / static_cast<double>(n);
}

double f_score(double mean_return, double m_div_value,
               const FScoreBounds& bounds) {
  if (!(bounds.j_rand < bounds.j_opt) || !(bounds.div_min < bounds.div_max)) {
    throw std::invalid_argument("f_score: degenerate normalization bounds");
  }
  const double rew = std::clamp(
      (mean_return - bounds.j_rand) / (bounds.j_opt - bounds.j_rand), 0.0, 1.0);
  const double div = std::clamp(
      (m_div_value - bounds.div_min) / (bounds.div_max - bounds.div_min), 0.0,
      1.0);
  if (rew + div == 0.0) return 0.0;
  return 2.0 * rew * div / (rew + div);
}

EvalResult evaluate_policy(const LatentPolicy& policy, EnvKind kind,
                           std::size_t episodes_per_latent) {
  if (episodes_per_latent < 1) {
    throw std::invalid_argument("evaluate_policy: need at least 1 episode");
  }
  const auto env = make_env(kind);
  const std::size_t n_z = policy.n_z;
  if (env->obs_dim() != policy.obs_dim) {
    throw std::invalid_argument("evaluate_policy: policy/environment mismatch");
  }

  EvalResult result;
  result.embeddings.resize(n_z);
  result.trajectories.resize(n_z);
  result.report.per_latent_mean_return.assign(n_z, 0.0);

  for (std::size_t z = 0; z < n_z; ++z) {
    std::vector<double> mean_embedding;
    double mean_return = 0.0;
    for (std::size_t ep = 0; ep < episodes_per_latent; ++ep) {
      EnvObs obs = env->reset(ep);
      std::vector<Vec2> positions;
      double ep_return = 0.0;
      bool record = ep == 0;
      for (std::size_t t = 0; t < env->horizon(); ++t) {
        const std::size_t action = greedy_action(policy, obs, z);
        const StepResult step = env->step(action);
        positions.push_back(step.position);
        ep_return += step.reward;
        if (record) {
          result.trajectories[z].push_back(
              {t, step.position.x, step.position.y, step.reward, step.done});
        }
        obs = step.obs;
        if (step.done) break;
      }
      const std::vector<double> emb =
          behavior_embedding(positions, env->horizon(), env->embedding_scale());
      if (mean_embedding.empty()) {
        mean_embedding.assign(emb.size(), 0.0);
      }
      for (std::size_t k = 0; k < emb.size(); ++k) mean_embedding[k] += emb[k];
      mean_return += ep_return;
    }
    const double inv = 1.0 / static_cast<double>(episodes_per_latent);
    for (double& v : mean_embedding) v *= inv;
    result.embeddings[z] = std::move(mean_embedding);
    result.report.per_latent_mean_return[z] = mean_return * inv;
  }

  result.report.pairwise_distances.assign(n_z, std::vector<double>(n_z, 0.0));
  for (std::size_t i = 0; i < n_z; ++i) {
    for (std::size_t j = i + 1; j < n_z; ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < result.embeddings[i].size(); ++k) {
        const double d = result.embeddings[i][k] - result.embeddings[j][k];
        sq += d * d;
      }
      const double dist = std::sqrt(sq);
      result.report.pairwise_distances[i][j] = dist;
      result.report.pairwise_distances[j][i] = dist;
    }
  }
  result.report.m_div = n_z >= 2 ? m_div(result.embeddings) : 0.0;
  result.report.coverage = solution_coverage(result.embeddings, kind);
  result.report.f_score = std::nan("");
  return result;
}

double random_policy_return(EnvKind kind, std::size_t n_episodes,
                            std::uint64_t seed) {
  const auto env = make_env(kind);
  Rng rng(seed);
  double total = 0.0;
  for (std::size_t ep = 0; ep < n_episodes; ++ep) {
    env->reset(ep);
    for (std::size_t t = 0; t < env->horizon(); ++t) {
      const StepResult step =
          env->step(static_cast<std::size_t>(rng.uniform_int(env->n_actions())));
      total += step.reward;
      if (step.done) break;
    }
  }
  return total / static_cast<double>(n_episodes);
}

std::string report_to_text(const DiversityReport& report) {
  std::ostringstream os;
  char buf[64];
  auto fmt = [&](double d) {
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return std::string(buf);
  };
  os << "m_div = " << fmt(report.m_div) << "\n";
  os << "coverage = " << report.coverage << "\n";
  os << "f_score = " << fmt(report.f_score) << "\n";
  os << "per_latent_mean_return =";
  for (double r : report.per_latent_mean_return) os << " " << fmt(r);
  os << "\n";
  os << "pairwise_distances:\n";
  for (const auto& row : report.pairwise_distances) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      os << (j ? " " : "") << fmt(row[j]);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace dgpo
