#include "dgpo/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dgpo {

namespace {

void linear_forward(const double* weight, const double* bias, const double* in,
                    double* out, std::size_t in_dim, std::size_t out_dim) {
  for (std::size_t o = 0; o < out_dim; ++o) {
    const double* w = weight + o * in_dim;
    double acc = bias[o];
    for (std::size_t i = 0; i < in_dim; ++i) acc += w[i] * in[i];
    out[o] = acc;
  }
}

void apply_activation(Activation act, const double* pre, double* out,
                      std::size_t n) {
  if (act == Activation::kTanh) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(pre[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = pre[i] > 0.0 ? pre[i] : 0.0;
  }
}

// d(activation)/d(pre) given pre-activation and post-activation values.
double activation_grad(Activation act, double pre, double post) {
  if (act == Activation::kTanh) return 1.0 - post * post;
  return pre > 0.0 ? 1.0 : 0.0;
}

}  // namespace

void check_mlp_spec(const MlpSpec& spec) {
  if (spec.input_dim < 1 || spec.output_dim < 1) {
    throw std::invalid_argument("MlpSpec: input and output dims must be >= 1");
  }
  if (spec.hidden.empty()) {
    throw std::invalid_argument("MlpSpec: at least one hidden layer required");
  }
  for (std::size_t h : spec.hidden) {
    if (h < 1) throw std::invalid_argument("MlpSpec: hidden dims must be >= 1");
  }
}

std::vector<std::size_t> mlp_layer_dims(const MlpSpec& spec) {
  std::vector<std::size_t> dims;
  dims.reserve(spec.hidden.size() + 2);
  dims.push_back(spec.input_dim);
  dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
  dims.push_back(spec.output_dim);
  return dims;
}

std::vector<BlockShape> mlp_param_layout(const MlpSpec& spec) {
  check_mlp_spec(spec);
  const auto dims = mlp_layer_dims(spec);
  std::vector<BlockShape> layout;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::string prefix = "layer" + std::to_string(l);
    layout.push_back({prefix + ".weight", {dims[l + 1], dims[l]}});
    layout.push_back({prefix + ".bias", {dims[l + 1]}});
  }
  return layout;
}

ParamVector mlp_init_params(const MlpSpec& spec, Rng& rng,
                            double final_layer_scale) {
  ParamVector params = make_param_vector(mlp_param_layout(spec));
  const auto dims = mlp_layer_dims(spec);
  const std::size_t n_layers = dims.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t fan_in = dims[l];
    const std::size_t fan_out = dims[l + 1];
    double gain = 1.0 / std::sqrt(static_cast<double>(fan_in));
    if (l + 1 == n_layers) gain *= final_layer_scale;
    double* w = params.block_data("layer" + std::to_string(l) + ".weight");
    for (std::size_t i = 0; i < fan_out * fan_in; ++i) {
      w[i] = rng.uniform(-gain, gain);
    }
    // biases stay zero
  }
  return params;
}

static void check_forward_args(const MlpSpec& spec, const ParamVector& params,
                               std::size_t input_len) {
  check_mlp_spec(spec);
  if (input_len != spec.input_dim) {
    throw std::invalid_argument("mlp_forward: input length " +
                                std::to_string(input_len) + " != input_dim " +
                                std::to_string(spec.input_dim));
  }
  if (params.size() != layout_size(mlp_param_layout(spec))) {
    throw std::invalid_argument("mlp_forward: parameter count mismatch");
  }
}

void mlp_forward_ws(const MlpSpec& spec, const ParamVector& params,
                    const double* input, MlpWorkspace& ws) {
  const auto dims = mlp_layer_dims(spec);
  const std::size_t n_layers = dims.size() - 1;
  ws.acts.resize(n_layers + 1);
  ws.pre.resize(n_layers);
  ws.acts[0].assign(input, input + dims[0]);

  std::size_t offset = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in_dim = dims[l];
    const std::size_t out_dim = dims[l + 1];
    const double* weight = params.values.data() + offset;
    const double* bias = weight + out_dim * in_dim;
    offset += out_dim * in_dim + out_dim;

    ws.pre[l].resize(out_dim);
    ws.acts[l + 1].resize(out_dim);
    linear_forward(weight, bias, ws.acts[l].data(), ws.pre[l].data(), in_dim,
                   out_dim);
    if (l + 1 == n_layers) {
      ws.acts[l + 1] = ws.pre[l];  // linear output layer
    } else {
      apply_activation(spec.activation, ws.pre[l].data(),
                       ws.acts[l + 1].data(), out_dim);
    }
  }
}

std::vector<double> mlp_forward(const MlpSpec& spec, const ParamVector& params,
                                const std::vector<double>& input) {
  check_forward_args(spec, params, input.size());
  MlpWorkspace ws;
  mlp_forward_ws(spec, params, input.data(), ws);
  return ws.acts.back();
}

void mlp_backward_ws(const MlpSpec& spec, const ParamVector& params,
                     const MlpWorkspace& ws, const double* output_grad,
                     ParamVector& grad_accum, double* input_grad,
                     MlpScratch& scratch) {
  const auto dims = mlp_layer_dims(spec);
  const std::size_t n_layers = dims.size() - 1;

  // delta holds d(loss)/d(pre-activation of current layer)
  std::vector<double>& delta = scratch.delta;
  std::vector<double>& next_delta = scratch.next_delta;
  delta.assign(output_grad, output_grad + dims.back());

  for (std::size_t li = n_layers; li-- > 0;) {
    std::size_t offset = 0;
    for (std::size_t l = 0; l < li; ++l) {
      offset += dims[l + 1] * dims[l] + dims[l + 1];
    }
    const std::size_t in_dim = dims[li];
    const std::size_t out_dim = dims[li + 1];
    const double* weight = params.values.data() + offset;
    double* w_grad = grad_accum.values.data() + offset;
    double* b_grad = w_grad + out_dim * in_dim;
    const double* layer_in = ws.acts[li].data();

    // hidden layers: fold the activation derivative into delta
    if (li + 1 != n_layers) {
      for (std::size_t o = 0; o < out_dim; ++o) {
        delta[o] *= activation_grad(spec.activation, ws.pre[li][o],
                                    ws.acts[li + 1][o]);
      }
    }

    for (std::size_t o = 0; o < out_dim; ++o) {
      const double d = delta[o];
      b_grad[o] += d;
      double* wg = w_grad + o * in_dim;
      for (std::size_t i = 0; i < in_dim; ++i) wg[i] += d * layer_in[i];
    }

    const bool need_input_grad = li > 0 || input_grad != nullptr;
    if (need_input_grad) {
      next_delta.assign(in_dim, 0.0);
      for (std::size_t o = 0; o < out_dim; ++o) {
        const double d = delta[o];
        const double* w = weight + o * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) next_delta[i] += d * w[i];
      }
      if (li == 0) {
        for (std::size_t i = 0; i < in_dim; ++i) input_grad[i] = next_delta[i];
      }
      delta.swap(next_delta);
    }
  }
}

MlpGradients mlp_backward(const MlpSpec& spec, const ParamVector& params,
                          const std::vector<double>& input,
                          const std::vector<double>& output_grad) {
  check_forward_args(spec, params, input.size());
  if (output_grad.size() != spec.output_dim) {
    throw std::invalid_argument("mlp_backward: output_grad length mismatch");
  }
  MlpWorkspace ws;
  mlp_forward_ws(spec, params, input.data(), ws);

  MlpGradients grads;
  grads.param_grad = make_param_vector(mlp_param_layout(spec));
  grads.input_grad.assign(spec.input_dim, 0.0);
  MlpScratch scratch;
  mlp_backward_ws(spec, params, ws, output_grad.data(), grads.param_grad,
                  grads.input_grad.data(), scratch);
  return grads;
}

}  // namespace dgpo
