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

// Brute-force references used by the tests. Everything here is written
// from the definitions with plain loops over the full joint state space and
// deliberately shares no code with the library's enumeration.

#include <rbmkit/rbm.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using rbmkit::BitVector;
using rbmkit::RbmParams;

inline BitVector bits(std::uint64_t mask, int n) {
  BitVector out(n);
  for (int i = 0; i < n; ++i) out[i] = (mask >> i) & 1;
  return out;
}

inline double energy(const RbmParams& p, const BitVector& v, const BitVector& h) {
  double e = 0.0;
  for (int i = 0; i < p.n_visible(); ++i) {
    if (!v[i]) continue;
    e -= p.b(i);
    for (int j = 0; j < p.n_hidden(); ++j) {
      if (h[j]) e -= p.W(i, j);
    }
  }
  for (int j = 0; j < p.n_hidden(); ++j) {
    if (h[j]) e -= p.c(j);
  }
  return e;
}

inline double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

struct Joint {
  std::vector<BitVector> v;
  std::vector<BitVector> h;
  std::vector<double> energy;
  std::vector<double> prob;
  double log_z = 0.0;
};

/// Every (v, h) with its energy and normalized probability.
inline Joint enumerate(const RbmParams& p) {
  Joint out;
  const int nv = p.n_visible();
  const int nh = p.n_hidden();
  std::vector<double> neg;
  for (std::uint64_t a = 0; a < (1ULL << nv); ++a) {
    for (std::uint64_t b = 0; b < (1ULL << nh); ++b) {
      out.v.push_back(bits(a, nv));
      out.h.push_back(bits(b, nh));
      out.energy.push_back(oracle::energy(p, out.v.back(), out.h.back()));
      neg.push_back(-out.energy.back());
    }
  }
  out.log_z = log_sum_exp(neg);
  for (double x : neg) out.prob.push_back(std::exp(x - out.log_z));
  return out;
}

/// log Σ_h exp(-E(v, h)).
inline double log_unnormalized_marginal(const RbmParams& p, const BitVector& v) {
  std::vector<double> terms;
  for (std::uint64_t b = 0; b < (1ULL << p.n_hidden()); ++b) {
    terms.push_back(-oracle::energy(p, v, bits(b, p.n_hidden())));
  }
  return log_sum_exp(terms);
}

/// log p(class bit | image bits), class bit last, by summing hidden states.
inline double log_conditional(const RbmParams& p, const BitVector& row) {
  if (row.empty()) return 0.0;
  BitVector zero = row, one = row;
  zero.back() = 0;
  one.back() = 1;
  const double a = log_unnormalized_marginal(p, zero);
  const double b = log_unnormalized_marginal(p, one);
  const double own = row.back() ? b : a;
  return own - log_sum_exp({a, b});
}

inline double mean_log_likelihood(const RbmParams& p, const std::vector<BitVector>& rows) {
  const double log_z = enumerate(p).log_z;
  double s = 0.0;
  for (const auto& r : rows) s += log_unnormalized_marginal(p, r) - log_z;
  return s / rows.size();
}

inline double mean_log_conditional(const RbmParams& p, const std::vector<BitVector>& rows) {
  double s = 0.0;
  for (const auto& r : rows) s += log_conditional(p, r);
  return s / rows.size();
}

/// Central differences of f over every entry of W, b and c, in that order
/// (W row-major).
inline std::vector<double> finite_difference(RbmParams q,
                                             const std::function<double(const RbmParams&)>& f,
                                             double step) {
  std::vector<double> out;
  auto probe = [&](double* slot) {
    const double keep = *slot;
    *slot = keep + step;
    const double up = f(q);
    *slot = keep - step;
    const double down = f(q);
    *slot = keep;
    out.push_back((up - down) / (2.0 * step));
  };
  for (int i = 0; i < q.n_visible(); ++i) {
    for (int j = 0; j < q.n_hidden(); ++j) probe(&q.W(i, j));
  }
  for (int i = 0; i < q.n_visible(); ++i) probe(&q.b(i));
  for (int j = 0; j < q.n_hidden(); ++j) probe(&q.c(j));
  return out;
}

inline std::vector<double> flatten(const Eigen::MatrixXd& dW, const Eigen::VectorXd& db,
                                   const Eigen::VectorXd& dc) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < dW.rows(); ++i) {
    for (Eigen::Index j = 0; j < dW.cols(); ++j) out.push_back(dW(i, j));
  }
  for (Eigen::Index i = 0; i < db.size(); ++i) out.push_back(db(i));
  for (Eigen::Index j = 0; j < dc.size(); ++j) out.push_back(dc(j));
  return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Spearman rank correlation (average ranks on ties).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j) + 1.0;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
