// Copyright 2026 The rbmkit Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rbmkit {

class Rng;

/// Binary assignment of one layer; entries are 0 or 1.
using BitVector = std::vector<std::uint8_t>;

/// Largest visible+hidden size the exact (enumerating) operations accept.
inline constexpr int kEnumerationBudget = 26;

/// Parameters of a binary RBM, stored in canonical form
///   p(v, h) ∝ exp(vᵀWh + bᵀv + cᵀh),
/// so that the joint energy is E(v, h) = -vᵀWh - bᵀv - cᵀh.
/// The class bit, when present, is the last visible unit.
struct RbmParams {
  Eigen::MatrixXd W;  // n_visible x n_hidden
  Eigen::VectorXd b;  // visible biases
  Eigen::VectorXd c;  // hidden biases

  RbmParams() = default;
  /// All-zero parameters.
  RbmParams(int n_visible, int n_hidden);
  RbmParams(Eigen::MatrixXd weights, Eigen::VectorXd visible_bias,
            Eigen::VectorXd hidden_bias);

  int n_visible() const { return static_cast<int>(W.rows()); }
  int n_hidden() const { return static_cast<int>(W.cols()); }
  int n_units() const { return n_visible() + n_hidden(); }

  /// Throws DimensionError / std::invalid_argument when the invariants fail.
  void validate() const;

  /// Every parameter multiplied by `factor` (coupling scaling A -> A/beta).
  RbmParams scaled(double factor) const;

  /// W ~ U(-0.1, 0.1)/sqrt(n_visible), zero biases.
  static RbmParams random_init(int n_visible, int n_hidden, Rng& rng);
  /// Entries drawn from N(0, scale^2); used for tests and benchmarks.
  static RbmParams random_normal(int n_visible, int n_hidden, double scale, Rng& rng);

  bool operator==(const RbmParams&) const = default;
};

double logistic(double x);
/// log(1 + exp(x)) without overflow.
double softplus(double x);

double energy(const RbmParams& params, const BitVector& v, const BitVector& h);

/// F(v) = -bᵀv - Σ_j softplus(c_j + (vᵀW)_j), so exp(-F(v)) = Σ_h exp(-E(v,h)).
double free_energy(const RbmParams& params, const BitVector& v);

/// p(h_j = 1 | v) at inverse temperature beta.
Eigen::VectorXd cond_hidden(const RbmParams& params, const BitVector& v, double beta = 1.0);
/// p(v_i = 1 | h) at inverse temperature beta.
Eigen::VectorXd cond_visible(const RbmParams& params, const BitVector& h, double beta = 1.0);

/// log Z by exact enumeration; refuses (BudgetExceeded) above kEnumerationBudget.
double log_partition_function(const RbmParams& params);

struct Prediction {
  std::uint8_t class_bit = 0;
  double free_energy_0 = 0.0;
  double free_energy_1 = 0.0;
  double posterior_1 = 0.5;
};

/// Compares F([image ‖ 0]) and F([image ‖ 1]); ties go to class 0.
Prediction classify(const RbmParams& params, const BitVector& image_bits);

/// Fraction of rows (class bit last) whose class classify() recovers.
double classification_accuracy(const RbmParams& params, const std::vector<BitVector>& rows);

/// Text format, version 1:
///
///     rbmkit-rbm 1
///     <n_visible> <n_hidden>
///     <W row 0: n_hidden values>
///     ...
///     <W row n_visible-1>
///     <b: n_visible values>
///     <c: n_hidden values>
///
/// Values are written with 17 significant digits so a save/load cycle is
/// lossless.
void save_params(const RbmParams& params, std::ostream& out);
RbmParams load_params(std::istream& in);
void save_params(const RbmParams& params, const std::string& path);
RbmParams load_params(const std::string& path);

/// Bit helpers.
BitVector bits_from_mask(std::uint64_t mask, int n);
std::uint64_t mask_from_bits(const BitVector& bits);
std::string bits_to_string(const BitVector& bits);
BitVector bits_from_string(const std::string& text);

}  // namespace rbmkit
