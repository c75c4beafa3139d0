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

#include <rbmkit/pgm.hpp>
#include <rbmkit/rbm.hpp>

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rbmkit {

/// Flattened images, one per row, values in [0, 1].
struct ImageSet {
  Eigen::MatrixXd images;
  std::vector<std::uint8_t> labels;
  int side = 0;

  std::size_t size() const { return labels.size(); }
};

struct PcaModel {
  Eigen::VectorXd mean;                      // pixel space
  Eigen::MatrixXd components;                // k x pixels, rows orthonormal
  Eigen::VectorXd explained_variance_ratio;  // nonincreasing

  int n_components() const { return static_cast<int>(components.rows()); }
  int n_pixels() const { return static_cast<int>(components.cols()); }

  Eigen::VectorXd project(const Eigen::VectorXd& image) const;
  /// Row i of the result is the projection of row i of `images`.
  Eigen::MatrixXd project_rows(const Eigen::MatrixXd& images) const;
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& projection) const;
};

/// Top-k principal directions of the mean-centred rows. Each component's
/// largest-magnitude entry is made positive (first such entry on ties).
/// Throws std::invalid_argument when k exceeds the numerical rank.
PcaModel pca_fit(const Eigen::MatrixXd& images, int k);

/// Per-component linear map of the fitting-set range onto [15, 240].
struct Quantizer {
  static constexpr int kLow = 15;
  static constexpr int kHigh = 240;

  Eigen::VectorXd min;
  Eigen::VectorXd max;

  static Quantizer fit(const Eigen::MatrixXd& projections);

  int n_components() const { return static_cast<int>(min.size()); }
  /// round(15 + (p - min) 225 / (max - min)), half away from zero, clamped
  /// to [0, 255].
  std::uint8_t quantize(int component, double p) const;
  std::vector<std::uint8_t> quantize(const Eigen::VectorXd& projection) const;
  void validate() const;
};

/// MSB-first bits of each byte, concatenated.
BitVector encode_bytes(const std::vector<std::uint8_t>& bytes);
/// Inverse of encode_bytes; bit count must be a multiple of 8.
std::vector<std::uint8_t> decode_bytes(const BitVector& bits);

/// project, quantize, encode.
BitVector compress(const PcaModel& model, const Quantizer& quantizer,
                   const Eigen::VectorXd& image);

struct CompressedDataset {
  int n_feature_bits = 0;
  std::vector<BitVector> features;
  std::vector<std::uint8_t> labels;
  std::string provenance;

  std::size_t size() const { return labels.size(); }
  /// Feature bits with the class bit appended.
  BitVector visible_row(std::size_t i) const;
  std::vector<BitVector> visible_rows() const;
  void validate() const;

  bool operator==(const CompressedDataset&) const = default;
};

/// File format:
///
///     rbmkit-dataset 1
///     <n_rows> <n_feature_bits>
///     provenance <text>
///     <n_feature_bits + 1 characters of 0/1, class bit last>
///     ...
void save_dataset(const CompressedDataset& data, std::ostream& out);
void save_dataset(const CompressedDataset& data, const std::string& path);
CompressedDataset load_dataset(std::istream& in);
CompressedDataset load_dataset(const std::string& path);

void save_pca(const PcaModel& model, std::ostream& out);
void save_pca(const PcaModel& model, const std::string& path);
PcaModel load_pca(std::istream& in);
PcaModel load_pca(const std::string& path);

void save_quantizer(const Quantizer& q, std::ostream& out);
void save_quantizer(const Quantizer& q, const std::string& path);
Quantizer load_quantizer(std::istream& in);
Quantizer load_quantizer(const std::string& path);

/// FNV-1a 64 of the serialized form, as 16 hex digits.
std::string fingerprint_bytes(const std::string& bytes);
std::string fingerprint(const PcaModel& model);
std::string fingerprint(const Quantizer& q);

/// Two synthetic classes, interleaved (even index class 0):
/// class 0 is a round Gaussian blob, class 1 a two-arm logarithmic spiral
/// disc with a small bulge. Width, amplitude, pitch, rotation and noise are
/// drawn per image from a stream keyed by the image index.
ImageSet synth_generate(int n_per_class, int side, std::uint64_t seed);

/// Reads `manifest` (CSV rows "filename,class", optional header) and the
/// listed PGM files under `dir`; crops each to the centred `crop` x `crop`
/// square (crop 0 keeps square inputs whole) and scales to [0, 1].
ImageSet ingest(const std::string& dir, const std::string& manifest, int crop);

struct BuiltDataset {
  PcaModel pca;
  Quantizer quantizer;
  CompressedDataset train;
  CompressedDataset test;
};

/// Shuffles under `seed`, fits PCA and quantizer on the first
/// round(fit_fraction n) images, compresses the rest and splits them
/// train_fraction / (1 - train_fraction).
BuiltDataset build_dataset(const ImageSet& images, double fit_fraction, int n_feature_bits,
                           std::uint64_t seed, double train_fraction = 0.5);

struct Raster {
  GrayImage image;
  std::size_t bit_sum = 0;
  std::size_t max_bit_sum = 0;
  std::string caption;
};

/// Feature bits of rows [begin, end) as a binary raster, 0 dark and 1 bright.
Raster render_minibatch(const CompressedDataset& data, std::size_t begin, std::size_t end);

}  // namespace rbmkit
