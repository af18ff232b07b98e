#pragma once

#include <cstddef>
#include <vector>

#include "dgpo/rng.hpp"

namespace dgpo {

// log(sum(exp(logits))) computed with max-subtraction.
double logsumexp(const std::vector<double>& logits);

// Softmax with max-subtraction; strictly positive components summing to 1.
std::vector<double> softmax_probs(const std::vector<double>& logits);

struct CategoricalSample {
  std::size_t index = 0;
  double log_prob = 0.0;
};

// Samples an index proportional to exp(logits); log_prob is
// logits[index] - logsumexp(logits). Throws on empty or non-finite logits.
CategoricalSample categorical_sample(const std::vector<double>& logits,
                                     Rng& rng);

// log pi(index) for the given logits.
double categorical_log_prob(const std::vector<double>& logits,
                            std::size_t index);

// Entropy of the softmax distribution.
double categorical_entropy(const std::vector<double>& logits);

// Index of the largest logit; ties broken by lowest index.
std::size_t argmax(const std::vector<double>& logits);

}  // namespace dgpo
