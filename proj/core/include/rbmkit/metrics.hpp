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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rbmkit {

/// One row of the accuracy-vs-epoch record shared by RBM training and the
/// classical baselines. For the tree baseline, "epoch" counts trees.
struct EpochMetrics {
  int epoch = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::optional<double> mean_abs_coupling;
  std::optional<double> median_quadratic_coupling;
  std::optional<double> beta_eff;
  std::string algorithm;
  double wall_time = 0.0;  // seconds; not written to CSV (outputs stay reproducible)

  bool same_values(const EpochMetrics& other) const;
};

/// Long format: one line per (epoch, split).
///   epoch,split,accuracy,mean_abs_coupling,median_coupling,beta_eff,algorithm
/// Missing optional values are written as empty fields.
void write_metrics_csv(const std::vector<EpochMetrics>& metrics, std::ostream& out);
void write_metrics_csv(const std::vector<EpochMetrics>& metrics, const std::string& path);
std::vector<EpochMetrics> read_metrics_csv(std::istream& in);
std::vector<EpochMetrics> read_metrics_csv(const std::string& path);

/// Splits a CSV line on commas (no quoting; none of our files need it).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace rbmkit
