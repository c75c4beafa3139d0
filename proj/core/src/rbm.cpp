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

#include <rbmkit/rbm.hpp>

#include <rbmkit/error.hpp>
#include <rbmkit/exact.hpp>
#include <rbmkit/random.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rbmkit {

namespace {

void require_length(const BitVector& bits, int expected, const char* what) {
  if (static_cast<int>(bits.size()) != expected) {
    std::ostringstream msg;
    msg << what << ": expected " << expected << " bits, got " << bits.size();
    throw DimensionError(msg.str());
  }
}

// c + vᵀW, accumulated over the set visible bits.
Eigen::VectorXd hidden_field(const RbmParams& p, const BitVector& v) {
  Eigen::VectorXd field = p.c;
  for (int i = 0; i < p.n_visible(); ++i) {
    if (v[i]) field += p.W.row(i).transpose();
  }
  return field;
}

Eigen::VectorXd visible_field(const RbmParams& p, const BitVector& h) {
  Eigen::VectorXd field = p.b;
  for (int j = 0; j < p.n_hidden(); ++j) {
    if (h[j]) field += p.W.col(j);
  }
  return field;
}

}  // namespace

RbmParams::RbmParams(int n_visible, int n_hidden)
    : W(Eigen::MatrixXd::Zero(n_visible, n_hidden)),
      b(Eigen::VectorXd::Zero(n_visible)),
      c(Eigen::VectorXd::Zero(n_hidden)) {
  if (n_visible < 1 || n_hidden < 1) {
    throw std::invalid_argument("RbmParams: layer sizes must be positive");
  }
}

RbmParams::RbmParams(Eigen::MatrixXd weights, Eigen::VectorXd visible_bias,
                     Eigen::VectorXd hidden_bias)
    : W(std::move(weights)), b(std::move(visible_bias)), c(std::move(hidden_bias)) {
  validate();
}

void RbmParams::validate() const {
  if (W.rows() < 1 || W.cols() < 1) {
    throw std::invalid_argument("RbmParams: layer sizes must be positive");
  }
  if (b.size() != W.rows() || c.size() != W.cols()) {
    std::ostringstream msg;
    msg << "RbmParams: W is " << W.rows() << "x" << W.cols() << " but b has " << b.size()
        << " and c has " << c.size() << " entries";
    throw DimensionError(msg.str());
  }
  if (!W.allFinite() || !b.allFinite() || !c.allFinite()) {
    throw std::invalid_argument("RbmParams: non-finite parameter");
  }
}

RbmParams RbmParams::scaled(double factor) const {
  RbmParams out = *this;
  out.W *= factor;
  out.b *= factor;
  out.c *= factor;
  return out;
}

RbmParams RbmParams::random_init(int n_visible, int n_hidden, Rng& rng) {
  RbmParams p(n_visible, n_hidden);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_visible));
  for (int i = 0; i < n_visible; ++i) {
    for (int j = 0; j < n_hidden; ++j) p.W(i, j) = rng.uniform(-0.1, 0.1) * scale;
  }
  return p;
}

RbmParams RbmParams::random_normal(int n_visible, int n_hidden, double scale, Rng& rng) {
  RbmParams p(n_visible, n_hidden);
  for (int i = 0; i < n_visible; ++i) {
    for (int j = 0; j < n_hidden; ++j) p.W(i, j) = scale * rng.normal();
  }
  for (int i = 0; i < n_visible; ++i) p.b(i) = scale * rng.normal();
  for (int j = 0; j < n_hidden; ++j) p.c(j) = scale * rng.normal();
  return p;
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double energy(const RbmParams& params, const BitVector& v, const BitVector& h) {
  require_length(v, params.n_visible(), "energy: visible");
  require_length(h, params.n_hidden(), "energy: hidden");
  double e = 0.0;
  for (int i = 0; i < params.n_visible(); ++i) {
    if (!v[i]) continue;
    e -= params.b(i);
    for (int j = 0; j < params.n_hidden(); ++j) {
      if (h[j]) e -= params.W(i, j);
    }
  }
  for (int j = 0; j < params.n_hidden(); ++j) {
    if (h[j]) e -= params.c(j);
  }
  return e;
}

double free_energy(const RbmParams& params, const BitVector& v) {
  require_length(v, params.n_visible(), "free_energy");
  const Eigen::VectorXd field = hidden_field(params, v);
  double f = 0.0;
  for (int i = 0; i < params.n_visible(); ++i) {
    if (v[i]) f -= params.b(i);
  }
  for (int j = 0; j < params.n_hidden(); ++j) f -= softplus(field(j));
  return f;
}

Eigen::VectorXd cond_hidden(const RbmParams& params, const BitVector& v, double beta) {
  require_length(v, params.n_visible(), "cond_hidden");
  Eigen::VectorXd field = hidden_field(params, v);
  return field.unaryExpr([beta](double x) { return logistic(beta * x); });
}

Eigen::VectorXd cond_visible(const RbmParams& params, const BitVector& h, double beta) {
  require_length(h, params.n_hidden(), "cond_visible");
  Eigen::VectorXd field = visible_field(params, h);
  return field.unaryExpr([beta](double x) { return logistic(beta * x); });
}

double log_partition_function(const RbmParams& params) {
  return ExactModel(params).log_partition();
}

Prediction classify(const RbmParams& params, const BitVector& image_bits) {
  if (params.n_visible() < 2) {
    throw DimensionError("classify: model needs at least one image bit and one class bit");
  }
  require_length(image_bits, params.n_visible() - 1, "classify: image");
  BitVector v = image_bits;
  v.push_back(0);
  Prediction out;
  out.free_energy_0 = free_energy(params, v);
  v.back() = 1;
  out.free_energy_1 = free_energy(params, v);
  out.class_bit = out.free_energy_1 < out.free_energy_0 ? 1 : 0;
  out.posterior_1 = logistic(out.free_energy_0 - out.free_energy_1);
  return out;
}

double classification_accuracy(const RbmParams& params, const std::vector<BitVector>& rows) {
  if (rows.empty()) throw std::invalid_argument("classification_accuracy: no rows");
  std::size_t correct = 0;
  BitVector image;
  for (const auto& row : rows) {
    require_length(row, params.n_visible(), "classification_accuracy: row");
    image.assign(row.begin(), row.end() - 1);
    if (classify(params, image).class_bit == row.back()) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

void save_params(const RbmParams& params, std::ostream& out) {
  params.validate();
  out << "rbmkit-rbm 1\n" << params.n_visible() << ' ' << params.n_hidden() << '\n';
  out << std::setprecision(17);
  auto write_row = [&out](const auto& row) {
    for (Eigen::Index k = 0; k < row.size(); ++k) {
      if (k) out << ' ';
      out << row(k);
    }
    out << '\n';
  };
  for (int i = 0; i < params.n_visible(); ++i) write_row(params.W.row(i));
  write_row(params.b);
  write_row(params.c);
}

RbmParams load_params(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "rbmkit-rbm" || version != 1) {
    throw FormatError("load_params: missing 'rbmkit-rbm 1' header");
  }
  int nv = 0, nh = 0;
  if (!(in >> nv >> nh) || nv < 1 || nh < 1) {
    throw FormatError("load_params: bad layer sizes");
  }
  RbmParams p(nv, nh);
  auto read = [&in](double& x) {
    if (!(in >> x)) throw FormatError("load_params: truncated parameter data");
  };
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nh; ++j) read(p.W(i, j));
  }
  for (int i = 0; i < nv; ++i) read(p.b(i));
  for (int j = 0; j < nh; ++j) read(p.c(j));
  p.validate();
  return p;
}

void save_params(const RbmParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  save_params(params, out);
}

RbmParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return load_params(in);
}

BitVector bits_from_mask(std::uint64_t mask, int n) {
  BitVector bits(n);
  for (int i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
  return bits;
}

std::uint64_t mask_from_bits(const BitVector& bits) {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) mask |= std::uint64_t{1} << i;
  }
  return mask;
}

std::string bits_to_string(const BitVector& bits) {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) s[i] = '1';
  }
  return s;
}

BitVector bits_from_string(const std::string& text) {
  BitVector bits(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      bits[i] = 1;
    } else if (text[i] != '0') {
      throw FormatError("bit string contains '" + std::string(1, text[i]) + "'");
    }
  }
  return bits;
}

}  // namespace rbmkit
