#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "dgpo/adam.hpp"
#include "dgpo/checkpoint.hpp"
#include "dgpo/distributions.hpp"
#include "dgpo/mlp.hpp"
#include "dgpo/rng.hpp"

using namespace dgpo;

namespace {

// Independent forward reimplementation: plain matrix-multiply-and-activate,
// structured differently from the library path on purpose.
std::vector<double> naive_forward(const MlpSpec& spec, const ParamVector& params,
                                  std::vector<double> x) {
  const auto dims = mlp_layer_dims(spec);
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::vector<double> y(dims[l + 1], 0.0);
    for (std::size_t o = 0; o < dims[l + 1]; ++o) {
      for (std::size_t i = 0; i < dims[l]; ++i) {
        y[o] += params.values[offset + o * dims[l] + i] * x[i];
      }
    }
    offset += dims[l + 1] * dims[l];
    for (std::size_t o = 0; o < dims[l + 1]; ++o) y[o] += params.values[offset + o];
    offset += dims[l + 1];
    if (l + 2 < dims.size()) {
      for (double& v : y) {
        v = spec.activation == Activation::kTanh ? std::tanh(v)
                                                 : (v > 0.0 ? v : 0.0);
      }
    }
    x = std::move(y);
  }
  return x;
}

MlpSpec random_spec(Rng& rng, std::size_t max_dim = 8) {
  MlpSpec spec;
  spec.input_dim = 1 + rng.uniform_int(max_dim);
  const std::size_t n_hidden = 1 + rng.uniform_int(2);
  for (std::size_t i = 0; i < n_hidden; ++i) {
    spec.hidden.push_back(1 + rng.uniform_int(max_dim));
  }
  spec.output_dim = 1 + rng.uniform_int(max_dim);
  spec.activation = rng.uniform() < 0.5 ? Activation::kTanh : Activation::kRelu;
  return spec;
}

ParamVector random_params(const MlpSpec& spec, Rng& rng) {
  ParamVector p = make_param_vector(mlp_param_layout(spec));
  for (double& v : p.values) v = rng.uniform(-1.0, 1.0);
  return p;
}

// dot(output, output_grad) as a scalar function of one perturbed entry
double probe_scalar(const MlpSpec& spec, const ParamVector& params,
                    const std::vector<double>& input,
                    const std::vector<double>& output_grad) {
  const std::vector<double> out = mlp_forward(spec, params, input);
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * output_grad[i];
  return s;
}

}  // namespace

TEST_CASE("mlp_forward zero parameters give zero output") {
  MlpSpec spec{3, {4, 4}, 2, Activation::kTanh};
  ParamVector params = make_param_vector(mlp_param_layout(spec));
  const auto out = mlp_forward(spec, params, {0.3, -0.7, 1.1});
  REQUIRE(out.size() == 2);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("mlp_forward relu identity layer") {
  MlpSpec spec{2, {2}, 2, Activation::kRelu};
  ParamVector params = make_param_vector(mlp_param_layout(spec));
  double* w0 = params.block_data("layer0.weight");
  w0[0] = 1.0;  // identity
  w0[3] = 1.0;
  double* w1 = params.block_data("layer1.weight");
  w1[0] = 1.0;
  w1[3] = 1.0;
  const auto out = mlp_forward(spec, params, {1.0, -1.0});
  CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("mlp_forward matches independent reimplementation") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const MlpSpec spec = random_spec(rng);
    const ParamVector params = random_params(spec, rng);
    std::vector<double> input(spec.input_dim);
    for (double& v : input) v = rng.uniform(-2.0, 2.0);

    const auto got = mlp_forward(spec, params, input);
    const auto want = naive_forward(spec, params, input);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("mlp_forward rejects dimension mismatches") {
  MlpSpec spec{3, {4}, 2, Activation::kTanh};
  ParamVector params = make_param_vector(mlp_param_layout(spec));
  CHECK_THROWS_AS(mlp_forward(spec, params, {1.0, 2.0}), std::invalid_argument);
  params.values.pop_back();
  CHECK_THROWS_AS(mlp_forward(spec, params, {1.0, 2.0, 3.0}),
                  std::invalid_argument);
  MlpSpec no_hidden{3, {}, 2, Activation::kTanh};
  CHECK_THROWS_AS(check_mlp_spec(no_hidden), std::invalid_argument);
}

TEST_CASE("mlp_backward zero output_grad gives zero gradients") {
  Rng rng(7);
  const MlpSpec spec = random_spec(rng);
  const ParamVector params = random_params(spec, rng);
  std::vector<double> input(spec.input_dim, 0.5);
  const auto grads =
      mlp_backward(spec, params, input, std::vector<double>(spec.output_dim, 0.0));
  for (double g : grads.param_grad.values) CHECK(g == 0.0);
  for (double g : grads.input_grad) CHECK(g == 0.0);
}

TEST_CASE("mlp_backward scalar linear identities") {
  // y = w2 * relu(w1 * x) with w1 = 1: reduces to y = w2 * x for x > 0
  MlpSpec spec{1, {1}, 1, Activation::kRelu};
  ParamVector params = make_param_vector(mlp_param_layout(spec));
  params.block_data("layer0.weight")[0] = 1.0;
  const double w = 0.75;
  params.block_data("layer1.weight")[0] = w;
  const double x = 1.3;

  const auto grads = mlp_backward(spec, params, {x}, {1.0});
  const std::size_t w1_off = grads.param_grad.block_offset("layer1.weight");
  CHECK(grads.param_grad.values[w1_off] == doctest::Approx(x).epsilon(1e-15));
  CHECK(grads.input_grad[0] == doctest::Approx(w).epsilon(1e-15));
}

TEST_CASE("mlp_backward matches central finite differences") {
  Rng rng(2024);
  const double step = 1e-5;
  int probes = 0;
  while (probes < 100) {
    const MlpSpec spec = random_spec(rng);
    ParamVector params = random_params(spec, rng);
    std::vector<double> input(spec.input_dim);
    for (double& v : input) v = rng.uniform(-1.5, 1.5);
    std::vector<double> output_grad(spec.output_dim);
    for (double& v : output_grad) v = rng.uniform(-1.0, 1.0);

    const auto grads = mlp_backward(spec, params, input, output_grad);

    // a few random parameter coordinates plus one input coordinate per net
    for (int k = 0; k < 5 && probes < 100; ++k, ++probes) {
      const std::size_t idx = rng.uniform_int(params.size());
      const double saved = params.values[idx];
      params.values[idx] = saved + step;
      const double plus = probe_scalar(spec, params, input, output_grad);
      params.values[idx] = saved - step;
      const double minus = probe_scalar(spec, params, input, output_grad);
      params.values[idx] = saved;
      const double fd = (plus - minus) / (2.0 * step);
      const double an = grads.param_grad.values[idx];
      CHECK(std::fabs(an - fd) <=
            1e-4 * std::max({std::fabs(an), std::fabs(fd), 1e-4}));
    }

    const std::size_t j = rng.uniform_int(input.size());
    const double saved = input[j];
    input[j] = saved + step;
    const double plus = probe_scalar(spec, params, input, output_grad);
    input[j] = saved - step;
    const double minus = probe_scalar(spec, params, input, output_grad);
    input[j] = saved;
    const double fd = (plus - minus) / (2.0 * step);
    CHECK(std::fabs(grads.input_grad[j] - fd) <=
          1e-4 * std::max({std::fabs(grads.input_grad[j]), std::fabs(fd), 1e-4}));
  }
}

TEST_CASE("adam zero gradients: parameters unchanged, moments decay") {
  MlpSpec spec{2, {2}, 1, Activation::kTanh};
  Rng rng(5);
  ParamVector params = mlp_init_params(spec, rng);
  ParamVector zero_grads = make_param_vector(params.layout);

  // fresh state: zero grads keep parameters fixed
  AdamState fresh = make_adam_state(params.size(), 1e-3);
  const std::vector<double> snapshot = params.values;
  adam_step(fresh, params, zero_grads);
  CHECK(params.values == snapshot);
  CHECK(fresh.step_count == 1);

  // seeded moments decay under a zero gradient
  AdamState seeded = make_adam_state(params.size(), 1e-3);
  ParamVector grads = make_param_vector(params.layout);
  grads.values.assign(grads.values.size(), 0.5);
  adam_step(seeded, params, grads);
  const std::vector<double> m_before = seeded.first_moment;
  const std::vector<double> v_before = seeded.second_moment;
  adam_step(seeded, params, zero_grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    CHECK(std::fabs(seeded.first_moment[i]) < std::fabs(m_before[i]));
    CHECK(seeded.second_moment[i] < v_before[i]);
  }
}

TEST_CASE("adam first step magnitude equals lr") {
  ParamVector params;
  params.layout = {{"w", {1}}};
  params.values = {0.0};
  ParamVector grads = params;
  grads.values = {1.0};
  const double lr = 1e-3;
  AdamState state = make_adam_state(1, lr);
  adam_step(state, params, grads);
  CHECK(std::fabs(params.values[0] + lr) < 1e-9);  // moved by exactly -lr
}

TEST_CASE("adam repeated identical gradients converge to lr-sized steps") {
  ParamVector params;
  params.layout = {{"w", {1}}};
  params.values = {0.0};
  ParamVector grads = params;
  grads.values = {2.5};
  const double lr = 1e-3;
  AdamState state = make_adam_state(1, lr);
  double prev = params.values[0];
  double update = 0.0;
  for (int i = 0; i < 500; ++i) {
    adam_step(state, params, grads);
    update = params.values[0] - prev;
    prev = params.values[0];
  }
  CHECK(update == doctest::Approx(-lr).epsilon(1e-2));
}

TEST_CASE("adam rejects non-finite gradients naming the block") {
  MlpSpec spec{2, {2}, 1, Activation::kTanh};
  ParamVector params = make_param_vector(mlp_param_layout(spec));
  ParamVector grads = make_param_vector(mlp_param_layout(spec));
  grads.values[grads.block_offset("layer1.weight")] =
      std::numeric_limits<double>::quiet_NaN();
  AdamState state = make_adam_state(params.size(), 1e-3);
  CHECK_THROWS_WITH_AS(adam_step(state, params, grads),
                       doctest::Contains("layer1.weight"), std::runtime_error);
}

TEST_CASE("softmax closed-form cases") {
  {
    const auto p = softmax_probs({0.0, 0.0});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  {
    const auto p = softmax_probs({std::log(9.0), 0.0});
    CHECK(p[0] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.1).epsilon(1e-12));
  }
  {
    const auto p = softmax_probs({1e4, 0.0});
    CHECK(std::isfinite(p[0]));
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[1] >= 0.0);
  }
}

TEST_CASE("softmax sums to one and stays positive") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> logits(1 + rng.uniform_int(8));
    for (double& l : logits) l = rng.uniform(-50.0, 50.0);
    const auto p = softmax_probs(logits);
    double sum = 0.0;
    for (double v : p) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("categorical_sample frequencies and log probs") {
  Rng rng(1234);
  {
    std::vector<std::size_t> counts(4, 0);
    const std::vector<double> logits(4, 0.7);
    for (int i = 0; i < 100000; ++i) {
      const auto s = categorical_sample(logits, rng);
      counts[s.index] += 1;
      CHECK(s.log_prob == doctest::Approx(std::log(0.25)).epsilon(1e-12));
    }
    for (std::size_t c : counts) {
      CHECK(static_cast<double>(c) / 100000.0 == doctest::Approx(0.25).epsilon(0.08));
    }
  }
  {
    const std::vector<double> logits = {1000.0, 0.0};
    for (int i = 0; i < 1000; ++i) {
      CHECK(categorical_sample(logits, rng).index == 0);
    }
  }
  {
    const std::vector<double> logits = {std::log(2.0), 0.0, 0.0};
    const auto p = softmax_probs(logits);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.25).epsilon(1e-12));
    std::vector<std::size_t> counts(3, 0);
    for (int i = 0; i < 100000; ++i) counts[categorical_sample(logits, rng).index]++;
    CHECK(counts[0] / 100000.0 == doctest::Approx(0.5).epsilon(0.04));
    CHECK(counts[1] / 100000.0 == doctest::Approx(0.25).epsilon(0.08));
  }
  CHECK_THROWS_AS(categorical_sample({}, rng), std::invalid_argument);
}

TEST_CASE("determinism: same seed, same outputs") {
  const std::vector<double> logits = {0.3, -0.2, 1.7};
  Rng a(77), b(77);
  for (int i = 0; i < 100; ++i) {
    CHECK(categorical_sample(logits, a).index ==
          categorical_sample(logits, b).index);
  }
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  Rng rng(31);
  Checkpoint ckpt;
  ckpt.n_z = 3;
  for (int s = 0; s < 2; ++s) {
    CheckpointSection sec;
    sec.name = s == 0 ? "actor" : "critic_ex";
    sec.spec = random_spec(rng);
    sec.params = random_params(sec.spec, rng);
    ckpt.sections.push_back(std::move(sec));
  }
  const std::string path =
      (std::filesystem::temp_directory_path() / "dgpo_ckpt_test.dgpo").string();
  save_checkpoint(path, ckpt);
  const Checkpoint loaded = load_checkpoint(path);
  REQUIRE(loaded.sections.size() == ckpt.sections.size());
  CHECK(loaded.n_z == ckpt.n_z);
  for (std::size_t s = 0; s < ckpt.sections.size(); ++s) {
    CHECK(loaded.sections[s].name == ckpt.sections[s].name);
    CHECK(loaded.sections[s].spec.hidden == ckpt.sections[s].spec.hidden);
    REQUIRE(loaded.sections[s].params.values.size() ==
            ckpt.sections[s].params.values.size());
    for (std::size_t i = 0; i < ckpt.sections[s].params.values.size(); ++i) {
      // bit-exact, not approximately equal
      CHECK(std::memcmp(&loaded.sections[s].params.values[i],
                        &ckpt.sections[s].params.values[i], 8) == 0);
    }
    REQUIRE(loaded.sections[s].params.layout.size() ==
            ckpt.sections[s].params.layout.size());
    for (std::size_t b = 0; b < ckpt.sections[s].params.layout.size(); ++b) {
      CHECK(loaded.sections[s].params.layout[b].name ==
            ckpt.sections[s].params.layout[b].name);
      CHECK(loaded.sections[s].params.layout[b].dims ==
            ckpt.sections[s].params.layout[b].dims);
    }
  }
  std::filesystem::remove(path);
}
