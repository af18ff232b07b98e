#include "dgpo/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace dgpo {

namespace {

void check_logits(const std::vector<double>& logits) {
  if (logits.empty()) {
    throw std::invalid_argument("categorical: empty logits");
  }
  for (double l : logits) {
    if (!std::isfinite(l)) {
      throw std::invalid_argument("categorical: non-finite logit");
    }
  }
}

}  // namespace

double logsumexp(const std::vector<double>& logits) {
  check_logits(logits);
  double m = logits[0];
  for (double l : logits) m = l > m ? l : m;
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - m);
  return m + std::log(sum);
}

std::vector<double> softmax_probs(const std::vector<double>& logits) {
  check_logits(logits);
  double m = logits[0];
  for (double l : logits) m = l > m ? l : m;
  std::vector<double> probs(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - m);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

CategoricalSample categorical_sample(const std::vector<double>& logits,
                                     Rng& rng) {
  const std::vector<double> probs = softmax_probs(logits);
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t index = probs.size() - 1;  // guard against fp undershoot
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) {
      index = i;
      break;
    }
  }
  return {index, logits[index] - logsumexp(logits)};
}

double categorical_log_prob(const std::vector<double>& logits,
                            std::size_t index) {
  check_logits(logits);
  if (index >= logits.size()) {
    throw std::invalid_argument("categorical_log_prob: index out of range");
  }
  return logits[index] - logsumexp(logits);
}

double categorical_entropy(const std::vector<double>& logits) {
  const std::vector<double> probs = softmax_probs(logits);
  const double lse = logsumexp(logits);
  double h = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    h -= probs[i] * (logits[i] - lse);
  }
  return h;
}

std::size_t argmax(const std::vector<double>& logits) {
  check_logits(logits);
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

}  // namespace dgpo
