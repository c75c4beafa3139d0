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

#include <rbmkit/random.hpp>
#include <rbmkit/rbm.hpp>

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <vector>

namespace testdata {

/// Rows of n_bits random bits plus a class bit from a random hyperplane
/// through the centre of the cube. Rows closer than `margin` to the plane
/// are redrawn, so the classes are linearly separable with room to spare.
inline std::vector<rbmkit::BitVector> separable_rows(int n, int n_bits, std::uint64_t seed,
                                                     double margin = 0.5) {
  rbmkit::Rng rng(seed);
  Eigen::VectorXd w(n_bits);
  for (int i = 0; i < n_bits; ++i) w(i) = rng.normal();
  const double offset = -0.5 * w.sum();
  std::vector<rbmkit::BitVector> rows;
  while (static_cast<int>(rows.size()) < n) {
    rbmkit::BitVector r(n_bits + 1);
    double s = offset;
    for (int i = 0; i < n_bits; ++i) {
      r[i] = rng.bernoulli(0.5);
      if (r[i]) s += w(i);
    }
    if (std::abs(s) < margin) continue;
    r[n_bits] = s > 0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace testdata
