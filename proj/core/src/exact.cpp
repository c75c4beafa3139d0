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

#include <rbmkit/exact.hpp>

#include <rbmkit/error.hpp>
#include <rbmkit/random.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rbmkit {

namespace {

// Rows of the enumerated layer's couplings, with that layer's bias appended
// as a final column so the Gray-code projection also carries the bias term.
Eigen::MatrixXd augmented_rows(const RbmParams& p, bool visible) {
  if (visible) {
    Eigen::MatrixXd rows(p.n_visible(), p.n_hidden() + 1);
    rows << p.W, p.b;
    return rows;
  }
  Eigen::MatrixXd rows(p.n_hidden(), p.n_visible() + 1);
  rows << p.W.transpose(), p.c;
  return rows;
}

}  // namespace

ExactModel::ExactModel(const RbmParams& params) : params_(params) {
  params_.validate();
  if (params_.n_units() > kEnumerationBudget) {
    std::ostringstream msg;
    msg << "exact enumeration refused: " << params_.n_units() << " units exceeds budget of "
        << kEnumerationBudget;
    throw BudgetExceeded(msg.str());
  }
  enum_visible_ = params_.n_visible() <= params_.n_hidden();
  n_enum_ = enum_visible_ ? params_.n_visible() : params_.n_hidden();
  const Eigen::VectorXd& other_bias = enum_visible_ ? params_.c : params_.b;
  const Eigen::Index n_other = other_bias.size();

  const std::size_t total = std::size_t{1} << n_enum_;
  states_.reserve(total);
  log_weight_.reserve(total);
  for_each_assignment(augmented_rows(params_, enum_visible_),
                      [&](std::uint64_t mask, const Eigen::RowVectorXd& acc) {
                        double lw = acc(n_other);
                        for (Eigen::Index j = 0; j < n_other; ++j) {
                          lw += softplus(other_bias(j) + acc(j));
                        }
                        states_.push_back(mask);
                        log_weight_.push_back(lw);
                      });

  const double max_lw = *std::max_element(log_weight_.begin(), log_weight_.end());
  double sum = 0.0;
  for (double lw : log_weight_) sum += std::exp(lw - max_lw);
  log_z_ = max_lw + std::log(sum);

  cdf_.resize(total);
  double running = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    running += std::exp(log_weight_[k] - log_z_);
    cdf_[k] = running;
  }
}

ModelMoments ExactModel::moments() const {
  const int nv = params_.n_visible();
  const int nh = params_.n_hidden();
  ModelMoments m{Eigen::VectorXd::Zero(nv), Eigen::VectorXd::Zero(nh),
                 Eigen::MatrixXd::Zero(nv, nh)};
  for (std::size_t k = 0; k < states_.size(); ++k) {
    const double p = std::exp(log_weight_[k] - log_z_);
    const BitVector fixed = bits_from_mask(states_[k], n_enum_);
    if (enum_visible_) {
      const Eigen::VectorXd sig = cond_hidden(params_, fixed);
      m.h += p * sig;
      for (int i = 0; i < nv; ++i) {
        if (!fixed[i]) continue;
        m.v(i) += p;
        m.vh.row(i) += p * sig.transpose();
      }
    } else {
      const Eigen::VectorXd sig = cond_visible(params_, fixed);
      m.v += p * sig;
      for (int j = 0; j < nh; ++j) {
        if (!fixed[j]) continue;
        m.h(j) += p;
        m.vh.col(j) += p * sig;
      }
    }
  }
  return m;
}

double ExactModel::marginal_visible(const BitVector& v) const {
  if (static_cast<int>(v.size()) != params_.n_visible()) {
    throw DimensionError("marginal_visible: wrong visible length");
  }
  return std::exp(-free_energy(params_, v) - log_z_);
}

std::pair<BitVector, BitVector> ExactModel::draw(Rng& rng) const {
  const double u = rng.uniform() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  const std::size_t k = static_cast<std::size_t>(it - cdf_.begin());
  BitVector fixed = bits_from_mask(states_[k], n_enum_);
  const Eigen::VectorXd prob =
      enum_visible_ ? cond_hidden(params_, fixed) : cond_visible(params_, fixed);
  BitVector other(prob.size());
  for (Eigen::Index j = 0; j < prob.size(); ++j) {
    other[j] = rng.bernoulli(prob(j)) ? 1 : 0;
  }
  if (enum_visible_) return {std::move(fixed), std::move(other)};
  return {std::move(other), std::move(fixed)};
}

GroundState ExactModel::ground_state() const {
  const Eigen::VectorXd& other_bias = enum_visible_ ? params_.c : params_.b;
  const Eigen::Index n_other = other_bias.size();
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0;
  for_each_assignment(augmented_rows(params_, enum_visible_),
                      [&](std::uint64_t mask, const Eigen::RowVectorXd& acc) {
                        double e = -acc(n_other);
                        for (Eigen::Index j = 0; j < n_other; ++j) {
                          e -= std::max(0.0, other_bias(j) + acc(j));
                        }
                        if (e < best) {
                          second = best;
                          best = e;
                          best_mask = mask;
                        } else if (e < second) {
                          second = e;
                        }
                      });
  GroundState gs;
  BitVector fixed = bits_from_mask(best_mask, n_enum_);
  const Eigen::VectorXd prob =
      enum_visible_ ? cond_hidden(params_, fixed) : cond_visible(params_, fixed);
  BitVector other(prob.size());
  for (Eigen::Index j = 0; j < prob.size(); ++j) other[j] = prob(j) > 0.5 ? 1 : 0;
  if (enum_visible_) {
    gs.v = std::move(fixed);
    gs.h = std::move(other);
  } else {
    gs.v = std::move(other);
    gs.h = std::move(fixed);
  }
  gs.energy = energy(params_, gs.v, gs.h);
  gs.gap = second - best;
  return gs;
}

}  // namespace rbmkit
