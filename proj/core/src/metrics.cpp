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

#include <rbmkit/metrics.hpp>

#include <rbmkit/error.hpp>

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace rbmkit {

bool EpochMetrics::same_values(const EpochMetrics& o) const {
  return epoch == o.epoch && train_accuracy == o.train_accuracy &&
         test_accuracy == o.test_accuracy && mean_abs_coupling == o.mean_abs_coupling &&
         median_quadratic_coupling == o.median_quadratic_coupling && beta_eff == o.beta_eff;
}

namespace {

void write_optional(std::ostream& out, const std::optional<double>& value) {
  if (value) out << *value;
}

std::optional<double> parse_optional(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return std::stod(field);
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void write_metrics_csv(const std::vector<EpochMetrics>& metrics, std::ostream& out) {
  const auto old = out.precision(17);
  out << "epoch,split,accuracy,mean_abs_coupling,median_coupling,beta_eff,algorithm\n";
  for (const auto& m : metrics) {
    for (int split = 0; split < 2; ++split) {
      out << m.epoch << ',' << (split == 0 ? "train" : "test") << ','
          << (split == 0 ? m.train_accuracy : m.test_accuracy) << ',';
      write_optional(out, m.mean_abs_coupling);
      out << ',';
      write_optional(out, m.median_quadratic_coupling);
      out << ',';
      write_optional(out, m.beta_eff);
      out << ',' << m.algorithm << '\n';
    }
  }
  out.precision(old);
}

void write_metrics_csv(const std::vector<EpochMetrics>& metrics, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_metrics_csv(metrics, out);
}

std::vector<EpochMetrics> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("epoch,split,accuracy", 0) != 0) {
    throw FormatError("metrics CSV: missing header");
  }
  std::map<int, EpochMetrics> by_epoch;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw FormatError("metrics CSV: expected 7 fields in '" + line + "'");
    const int epoch = std::stoi(f[0]);
    EpochMetrics& m = by_epoch[epoch];
    m.epoch = epoch;
    if (f[1] == "train") {
      m.train_accuracy = std::stod(f[2]);
    } else if (f[1] == "test") {
      m.test_accuracy = std::stod(f[2]);
    } else {
      throw FormatError("metrics CSV: unknown split '" + f[1] + "'");
    }
    m.mean_abs_coupling = parse_optional(f[3]);
    m.median_quadratic_coupling = parse_optional(f[4]);
    m.beta_eff = parse_optional(f[5]);
    m.algorithm = f[6];
  }
  std::vector<EpochMetrics> out;
  out.reserve(by_epoch.size());
  for (auto& [epoch, m] : by_epoch) out.push_back(std::move(m));
  return out;
}

std::vector<EpochMetrics> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_metrics_csv(in);
}

}  // namespace rbmkit
