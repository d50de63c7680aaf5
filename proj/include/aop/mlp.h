// Copyright 2026 The aoplab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AOP_MLP_H_
#define AOP_MLP_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace aop {

// Batches are row-major: one sample per row.
using Batch = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Fully connected network: tanh on hidden layers, identity on the output.
//
// Parameters live in one flat vector. For each layer l (in order) the weight
// matrix W_l of shape (n_{l+1} x n_l) is stored column-major, followed by
// the bias b_l of length n_{l+1}. The JSON checkpoint format mirrors this
// layout; see docs/formats.md.
class Mlp {
 public:
  // Activations recorded by a forward pass; consumed by Backward.
  struct Tape {
    // activations[0] is the input (features x batch); activations[l] the
    // post-activation output of layer l.
    std::vector<Eigen::MatrixXd> activations;
  };

  Mlp() = default;
  // Zero-initialized network.
  explicit Mlp(std::vector<int> layer_sizes);

  // Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
  template <typename Rng>
  static Mlp Random(std::vector<int> layer_sizes, Rng& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::size_t parameter_count() const {
    return static_cast<std::size_t>(params_.size());
  }

  std::span<double> parameters() { return {params_.data(), parameter_count()}; }
  std::span<const double> parameters() const {
    return {params_.data(), parameter_count()};
  }
  const Vector& parameter_vector() const { return params_; }

  Vector Forward(std::span<const double> input) const;
  Batch Forward(const Batch& inputs) const;
  Batch Forward(const Batch& inputs, Tape* tape) const;

  // Accumulates dL/dparams into *grad (resized and zeroed when empty) for the
  // batch recorded in `tape`, given upstream dL/doutput (batch x out). When
  // `input_grad` is non-null it receives dL/dinput (batch x in).
  void Backward(const Tape& tape, const Batch& upstream, Vector* grad,
                Batch* input_grad = nullptr) const;

  // Polyak average: this <- (1 - rate) * this + rate * source.
  void SoftUpdateFrom(const Mlp& source, double rate);

  nlohmann::json ToJson() const;
  static Mlp FromJson(const nlohmann::json& j);

 private:
  std::size_t WeightOffset(std::size_t layer) const { return offsets_[layer]; }

  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;  // start of W_l in params_
  Vector params_;
};

std::size_t ParameterCount(std::span<const int> layer_sizes);

template <typename Rng>
Mlp Mlp::Random(std::vector<int> layer_sizes, Rng& rng) {
  Mlp net(std::move(layer_sizes));
  for (std::size_t l = 0; l + 1 < net.sizes_.size(); ++l) {
    const int fan_in = net.sizes_[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    const std::size_t n = static_cast<std::size_t>(fan_in) * net.sizes_[l + 1];
    double* w = net.params_.data() + net.offsets_[l];
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      w[i] = (2.0 * u - 1.0) * bound;
    }
  }
  return net;
}

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::uint64_t step_count = 0;
  Vector first_moment;
  Vector second_moment;
};

// Bias-corrected Adam. Throws kNonFinite (leaving params and state
// untouched) if any gradient entry is NaN or infinite.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t parameter_count, AdamConfig config = {});

  void Step(std::span<double> params, std::span<const double> grads);

  const AdamState& state() const { return state_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  AdamState state_;
};

}  // namespace aop

#endif  // AOP_MLP_H_
