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

#include "aop/mlp.h"

#include <cmath>
#include <string>
#include <utility>

#include "aop/errors.h"

namespace aop {

void ThrowDimensionMismatch(const char* where, long expected, long actual) {
  throw Error(ErrorCode::kDimensionMismatch,
              std::string(where) + ": expected size " +
                  std::to_string(expected) + ", got " +
                  std::to_string(actual));
}

std::size_t ParameterCount(std::span<const int> layer_sizes) {
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    count += static_cast<std::size_t>(layer_sizes[l] + 1) * layer_sizes[l + 1];
  }
  return count;
}

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "Mlp: need at least input and output layer sizes");
  }
  for (int n : sizes_) {
    if (n <= 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "Mlp: layer sizes must be positive");
    }
  }
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(offset);
    offset += static_cast<std::size_t>(sizes_[l] + 1) * sizes_[l + 1];
  }
  params_ = Vector::Zero(static_cast<Eigen::Index>(offset));
}

namespace {

using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

// tanh through the packet-vectorized exp; saturates cleanly to +-1.
template <typename Derived>
void TanhInPlace(Eigen::MatrixBase<Derived>& z) {
  z = (1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0)).matrix();
}

}  // namespace

Vector Mlp::Forward(std::span<const double> input) const {
  if (static_cast<long>(input.size()) != input_size()) {
    ThrowDimensionMismatch("Mlp::Forward", input_size(),
                           static_cast<long>(input.size()));
  }
  Vector a = ConstVectorMap(input.data(), input_size());
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* base = params_.data() + offsets_[l];
    ConstMatrixMap w(base, out, in);
    ConstVectorMap b(base + static_cast<std::size_t>(out) * in, out);
    Vector z = w * a + b;
    if (l + 1 < layers) TanhInPlace(z);
    a = std::move(z);
  }
  return a;
}

Batch Mlp::Forward(const Batch& inputs) const { return Forward(inputs, nullptr); }

Batch Mlp::Forward(const Batch& inputs, Tape* tape) const {
  if (inputs.cols() != input_size()) {
    ThrowDimensionMismatch("Mlp::Forward", input_size(), inputs.cols());
  }
  // Row-major (batch x in) has the memory layout of column-major (in x batch).
  Eigen::MatrixXd a = ConstMatrixMap(inputs.data(), inputs.cols(), inputs.rows());
  if (tape != nullptr) {
    tape->activations.clear();
    tape->activations.push_back(a);
  }
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* base = params_.data() + offsets_[l];
    ConstMatrixMap w(base, out, in);
    ConstVectorMap b(base + static_cast<std::size_t>(out) * in, out);
    Eigen::MatrixXd z = w * a;
    z.colwise() += b;
    if (l + 1 < layers) TanhInPlace(z);
    if (tape != nullptr) tape->activations.push_back(z);
    a = std::move(z);
  }
  Batch result(a.cols(), a.rows());
  Eigen::Map<Eigen::MatrixXd>(result.data(), a.rows(), a.cols()) = a;
  return result;
}

void Mlp::Backward(const Tape& tape, const Batch& upstream, Vector* grad,
                   Batch* input_grad) const {
  const std::size_t layers = sizes_.size() - 1;
  if (tape.activations.size() != layers + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "Mlp::Backward: tape does not match network depth");
  }
  const Eigen::Index batch = tape.activations.front().cols();
  if (upstream.cols() != output_size()) {
    ThrowDimensionMismatch("Mlp::Backward", output_size(), upstream.cols());
  }
  if (upstream.rows() != batch) {
    ThrowDimensionMismatch("Mlp::Backward batch", batch, upstream.rows());
  }
  if (grad->size() == 0) {
    *grad = Vector::Zero(params_.size());
  } else if (grad->size() != params_.size()) {
    ThrowDimensionMismatch("Mlp::Backward gradient", params_.size(),
                           grad->size());
  }

  Eigen::MatrixXd delta =
      ConstMatrixMap(upstream.data(), upstream.cols(), upstream.rows());
  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* base = params_.data() + offsets_[l];
    double* gbase = grad->data() + offsets_[l];
    Eigen::Map<Eigen::MatrixXd> gw(gbase, out, in);
    Eigen::Map<Eigen::VectorXd> gb(gbase + static_cast<std::size_t>(out) * in,
                                   out);
    const Eigen::MatrixXd& a_in = tape.activations[l];
    gw.noalias() += delta * a_in.transpose();
    gb += delta.rowwise().sum();
    if (l == 0 && input_grad == nullptr) break;
    ConstMatrixMap w(base, out, in);
    Eigen::MatrixXd prev = w.transpose() * delta;
    if (l > 0) {
      prev.array() *= 1.0 - a_in.array().square();
    } else {
      input_grad->resize(batch, in);
      Eigen::Map<Eigen::MatrixXd>(input_grad->data(), in, batch) = prev;
    }
    delta = std::move(prev);
  }
}

void Mlp::SoftUpdateFrom(const Mlp& source, double rate) {
  if (source.sizes_ != sizes_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "Mlp::SoftUpdateFrom: layer sizes differ");
  }
  params_ = (1.0 - rate) * params_ + rate * source.params_;
}

nlohmann::json Mlp::ToJson() const {
  nlohmann::json j;
  j["format"] = "aop-mlp";
  j["version"] = 1;
  j["layer_sizes"] = sizes_;
  j["activation"] = "tanh";
  j["parameters"] = std::vector<double>(params_.data(),
                                        params_.data() + params_.size());
  return j;
}

Mlp Mlp::FromJson(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "aop-mlp") {
      throw Error(ErrorCode::kParse, "Mlp::FromJson: not an aop-mlp record");
    }
    Mlp net(j.at("layer_sizes").get<std::vector<int>>());
    const auto params = j.at("parameters").get<std::vector<double>>();
    if (params.size() != net.parameter_count()) {
      ThrowDimensionMismatch("Mlp::FromJson parameters",
                             static_cast<long>(net.parameter_count()),
                             static_cast<long>(params.size()));
    }
    std::copy(params.begin(), params.end(), net.params_.data());
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("Mlp::FromJson: ") + e.what());
  }
}

Adam::Adam(std::size_t parameter_count, AdamConfig config) : config_(config) {
  state_.first_moment = Vector::Zero(static_cast<Eigen::Index>(parameter_count));
  state_.second_moment = Vector::Zero(static_cast<Eigen::Index>(parameter_count));
}

void Adam::Step(std::span<double> params, std::span<const double> grads) {
  const auto n = static_cast<Eigen::Index>(params.size());
  if (n != state_.first_moment.size()) {
    ThrowDimensionMismatch("Adam::Step params", state_.first_moment.size(), n);
  }
  if (static_cast<Eigen::Index>(grads.size()) != n) {
    ThrowDimensionMismatch("Adam::Step grads", n,
                           static_cast<long>(grads.size()));
  }
  ConstVectorMap g(grads.data(), n);
  if (!g.allFinite()) {
    throw Error(ErrorCode::kNonFinite,
                "Adam::Step: non-finite gradient (training diverged)");
  }
  ++state_.step_count;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  state_.first_moment = b1 * state_.first_moment + (1.0 - b1) * g;
  state_.second_moment =
      b2 * state_.second_moment + (1.0 - b2) * g.cwiseProduct(g);
  const double t = static_cast<double>(state_.step_count);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  Eigen::Map<Vector> p(params.data(), n);
  p.array() -= config_.learning_rate * (state_.first_moment.array() / c1) /
               ((state_.second_moment.array() / c2).sqrt() + config_.eps);
}

}  // namespace aop
