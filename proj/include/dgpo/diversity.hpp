#pragma once

#include <string>
#include <vector>

#include "dgpo/env.hpp"
#include "dgpo/latent_policy.hpp"

namespace dgpo {

// Mean of log pairwise Euclidean distances between behavior embeddings:
//   (1/n) * sum_{i<j} ln ||e_i - e_j||_2,
// with each norm floored at 1e-6 so identical behaviors stay finite.
// Requires at least two embeddings of equal length.
double m_div(const std::vector<std::vector<double>>& embeddings);

struct FScoreBounds {
  double j_rand = 0.0;   // random-policy return
  double j_opt = 1.0;    // oracle optimal return
  double div_min = 0.0;  // min-max bounds over the runs being compared
  double div_max = 1.0;
};

// Harmonic mean of the normalized return and normalized diversity, both
// clamped to [0, 1]; 0 when both normalized terms are 0. Throws on
// degenerate bounds.
double f_score(double mean_return, double m_div_value,
               const FScoreBounds& bounds);

struct DiversityReport {
  std::vector<std::vector<double>> pairwise_distances;  // n_z x n_z
  double m_div = 0.0;
  std::size_t coverage = 0;
  double f_score = 0.0;  // NaN when no bounds were supplied
  std::vector<double> per_latent_mean_return;  // undiscounted
};

struct EvalTrajectoryStep {
  std::size_t step = 0;
  double x = 0.0;
  double y = 0.0;
  double reward = 0.0;
  bool done = false;
};

struct EvalResult {
  DiversityReport report;
  std::vector<std::vector<double>> embeddings;  // one per latent (averaged)
  // first evaluation episode per latent, for the trajectory dump
  std::vector<std::vector<EvalTrajectoryStep>> trajectories;
};

// Rolls the greedy (argmax) policy episodes_per_latent times for every
// latent code and averages the behavior embeddings. Deterministic.
EvalResult evaluate_policy(const LatentPolicy& policy, EnvKind kind,
                           std::size_t episodes_per_latent);

// Mean undiscounted return of a uniform-random policy over n episodes,
// for the F-score reward normalization.
double random_policy_return(EnvKind kind, std::size_t n_episodes,
                            std::uint64_t seed);

// key = value lines plus a distance-matrix block.
std::string report_to_text(const DiversityReport& report);

}  // namespace dgpo
