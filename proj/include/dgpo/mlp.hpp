#pragma once

#include <cstddef>
#include <vector>

#include "dgpo/param_vector.hpp"
#include "dgpo/rng.hpp"

namespace dgpo {

enum class Activation { kTanh, kRelu };

// Dense multilayer perceptron: input -> hidden... -> output. Hidden layers
// use the configured activation, the output layer is linear.
struct MlpSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;
  std::size_t output_dim = 0;
  Activation activation = Activation::kTanh;
};

// Throws std::invalid_argument unless the spec has at least one hidden layer
// and every dimension is >= 1.
void check_mlp_spec(const MlpSpec& spec);

// Layer sizes including input and output: {in, h0, ..., out}.
std::vector<std::size_t> mlp_layer_dims(const MlpSpec& spec);

// Parameter layout: per layer i, blocks "layer{i}.weight" (out x in,
// row-major) and "layer{i}.bias" (out).
std::vector<BlockShape> mlp_param_layout(const MlpSpec& spec);

// Scaled uniform init: weights ~ U(-g, g) with g = 1/sqrt(fan_in), biases
// zero. The last layer's weights are additionally multiplied by
// final_layer_scale (0.01 for policy heads keeps initial outputs near zero).
ParamVector mlp_init_params(const MlpSpec& spec, Rng& rng,
                            double final_layer_scale = 1.0);

// Reusable per-sample activation storage for forward/backward.
struct MlpWorkspace {
  // acts[l] holds the post-activation output of layer l-1 (acts[0] = input).
  std::vector<std::vector<double>> acts;
  // pre[l] holds the pre-activation of hidden layer l.
  std::vector<std::vector<double>> pre;
};

// Forward pass. Throws on any dimension mismatch.
std::vector<double> mlp_forward(const MlpSpec& spec, const ParamVector& params,
                                const std::vector<double>& input);

// Forward pass that retains intermediate activations for a later backward.
// Output is ws.acts.back().
void mlp_forward_ws(const MlpSpec& spec, const ParamVector& params,
                    const double* input, MlpWorkspace& ws);

struct MlpGradients {
  ParamVector param_grad;
  std::vector<double> input_grad;
};

// Reusable delta buffers for the backward pass.
struct MlpScratch {
  std::vector<double> delta;
  std::vector<double> next_delta;
};

// Exact reverse-mode gradients of dot(output, output_grad) w.r.t. parameters
// and input.
MlpGradients mlp_backward(const MlpSpec& spec, const ParamVector& params,
                          const std::vector<double>& input,
                          const std::vector<double>& output_grad);

// Backward using a workspace filled by mlp_forward_ws. Accumulates parameter
// gradients into grad_accum (which must share the spec's layout); writes the
// input gradient into input_grad when non-null.
void mlp_backward_ws(const MlpSpec& spec, const ParamVector& params,
                     const MlpWorkspace& ws, const double* output_grad,
                     ParamVector& grad_accum, double* input_grad,
                     MlpScratch& scratch);

}  // namespace dgpo
