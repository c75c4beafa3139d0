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

#include <rbmkit/rbm.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace rbmkit {

class Rng;

/// First and second moments of the joint distribution.
struct ModelMoments {
  Eigen::VectorXd v;   // <v_i>
  Eigen::VectorXd h;   // <h_j>
  Eigen::MatrixXd vh;  // <v_i h_j>
};

struct GroundState {
  BitVector v;
  BitVector h;
  double energy = 0.0;
  /// Energy gap to the best state with a different visible configuration
  /// (or hidden, when the smaller layer is hidden). +inf for a 1-state layer.
  double gap = 0.0;
};

/// Exact Boltzmann distribution of a small RBM at beta = 1.
///
/// The smaller layer is enumerated in Gray-code order and the other layer is
/// summed analytically, so the cost is 2^min(n_v, n_h) while the result is
/// the full joint distribution. Construction refuses models with more than
/// kEnumerationBudget units.
class ExactModel {
 public:
  explicit ExactModel(const RbmParams& params);

  const RbmParams& params() const { return params_; }
  double log_partition() const { return log_z_; }
  ModelMoments moments() const;
  /// Marginal probability of a visible configuration.
  double marginal_visible(const BitVector& v) const;
  /// One i.i.d. draw from the joint distribution.
  std::pair<BitVector, BitVector> draw(Rng& rng) const;
  GroundState ground_state() const;

 private:
  bool enumerate_visible() const { return enum_visible_; }

  RbmParams params_;
  bool enum_visible_ = true;
  int n_enum_ = 0;
  double log_z_ = 0.0;
  std::vector<std::uint64_t> states_;  // Gray-code order
  std::vector<double> log_weight_;     // unnormalized log marginal per state
  std::vector<double> cdf_;
};

/// Calls fn(mask, projection) for every assignment of `rows.rows()` bits in
/// Gray-code order, where projection = Σ_{i: bit i set} rows.row(i).
template <class Fn>
void for_each_assignment(const Eigen::MatrixXd& rows, Fn&& fn) {
  const int n = static_cast<int>(rows.rows());
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(rows.cols());
  std::uint64_t gray = 0;
  fn(gray, acc);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int bit = __builtin_ctzll(k);
    const std::uint64_t flag = std::uint64_t{1} << bit;
    if (gray & flag) {
      acc -= rows.row(bit);
    } else {
      acc += rows.row(bit);
    }
    gray ^= flag;
    fn(gray, acc);
  }
}

}  // namespace rbmkit
