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

#include <rbmkit/datapipe.hpp>

#include <rbmkit/error.hpp>
#include <rbmkit/random.hpp>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rbmkit {

// ---------------------------------------------------------------------------
// PCA

Eigen::VectorXd PcaModel::project(const Eigen::VectorXd& image) const {
  if (image.size() != mean.size()) {
    throw DimensionError("pca: image has " + std::to_string(image.size()) + " pixels, model has " +
                         std::to_string(mean.size()));
  }
  return components * (image - mean);
}

Eigen::MatrixXd PcaModel::project_rows(const Eigen::MatrixXd& images) const {
  if (images.cols() != mean.size()) throw DimensionError("pca: pixel count mismatch");
  return (images.rowwise() - mean.transpose()) * components.transpose();
}

Eigen::VectorXd PcaModel::reconstruct(const Eigen::VectorXd& projection) const {
  return mean + components.transpose() * projection;
}

PcaModel pca_fit(const Eigen::MatrixXd& images, int k) {
  if (k < 1) throw std::invalid_argument("pca_fit: k must be >= 1");
  if (images.rows() < k) throw std::invalid_argument("pca_fit: fewer rows than components");
  if (images.cols() < k) throw std::invalid_argument("pca_fit: fewer pixels than components");

  PcaModel model;
  model.mean = images.colwise().mean().transpose();
  const Eigen::MatrixXd centred = images.rowwise() - model.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();

  const double tol = static_cast<double>(std::max(centred.rows(), centred.cols())) *
                     std::numeric_limits<double>::epsilon() * (s.size() > 0 ? s(0) : 0.0);
  int rank = 0;
  while (rank < s.size() && s(rank) > tol) ++rank;
  if (k > rank) {
    throw std::invalid_argument("pca_fit: k = " + std::to_string(k) + " exceeds data rank " +
                                std::to_string(rank));
  }

  const double total = s.squaredNorm();
  model.components = svd.matrixV().leftCols(k).transpose();
  model.explained_variance_ratio = s.head(k).array().square() / total;
  for (int i = 0; i < k; ++i) {
    Eigen::Index arg = 0;
    model.components.row(i).cwiseAbs().maxCoeff(&arg);
    // maxCoeff returns the first maximum, which settles ties.
    if (model.components(i, arg) < 0.0) model.components.row(i) *= -1.0;
  }
  return model;
}

// ---------------------------------------------------------------------------
// Quantizer and bits

Quantizer Quantizer::fit(const Eigen::MatrixXd& projections) {
  if (projections.rows() < 1) throw std::invalid_argument("quantizer: no rows to fit");
  Quantizer q;
  q.min = projections.colwise().minCoeff().transpose();
  q.max = projections.colwise().maxCoeff().transpose();
  q.validate();
  return q;
}

void Quantizer::validate() const {
  if (min.size() != max.size()) throw DimensionError("quantizer: min/max size mismatch");
  for (Eigen::Index i = 0; i < min.size(); ++i) {
    if (!(min(i) < max(i))) {
      throw std::invalid_argument("quantizer: component " + std::to_string(i) +
                                  " has an empty range");
    }
  }
}

std::uint8_t Quantizer::quantize(int component, double p) const {
  const double lo = min(component);
  const double hi = max(component);
  const double raw = std::round(kLow + (p - lo) * (kHigh - kLow) / (hi - lo));
  return static_cast<std::uint8_t>(std::clamp(raw, 0.0, 255.0));
}

std::vector<std::uint8_t> Quantizer::quantize(const Eigen::VectorXd& projection) const {
  if (projection.size() != min.size()) throw DimensionError("quantizer: component count mismatch");
  std::vector<std::uint8_t> out(projection.size());
  for (Eigen::Index i = 0; i < projection.size(); ++i) out[i] = quantize(static_cast<int>(i), projection(i));
  return out;
}

BitVector encode_bytes(const std::vector<std::uint8_t>& bytes) {
  BitVector bits;
  bits.reserve(bytes.size() * 8);
  for (std::uint8_t byte : bytes) {
    for (int k = 7; k >= 0; --k) bits.push_back((byte >> k) & 1);
  }
  return bits;
}

std::vector<std::uint8_t> decode_bytes(const BitVector& bits) {
  if (bits.size() % 8 != 0) throw DimensionError("decode_bytes: bit count not a multiple of 8");
  std::vector<std::uint8_t> bytes(bits.size() / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bytes[i / 8] = static_cast<std::uint8_t>((bytes[i / 8] << 1) | (bits[i] & 1));
  }
  return bytes;
}

BitVector compress(const PcaModel& model, const Quantizer& quantizer,
                   const Eigen::VectorXd& image) {
  return encode_bytes(quantizer.quantize(model.project(image)));
}

// ---------------------------------------------------------------------------
// CompressedDataset

BitVector CompressedDataset::visible_row(std::size_t i) const {
  BitVector row = features.at(i);
  row.push_back(labels.at(i));
  return row;
}

std::vector<BitVector> CompressedDataset::visible_rows() const {
  std::vector<BitVector> rows;
  rows.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) rows.push_back(visible_row(i));
  return rows;
}

void CompressedDataset::validate() const {
  if (n_feature_bits < 1) throw DimensionError("dataset: n_feature_bits must be >= 1");
  if (features.size() != labels.size()) throw DimensionError("dataset: feature/label count mismatch");
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != static_cast<std::size_t>(n_feature_bits)) {
      throw DimensionError("dataset: row " + std::to_string(i) + " has " +
                           std::to_string(features[i].size()) + " feature bits, expected " +
                           std::to_string(n_feature_bits));
    }
    if (labels[i] > 1) throw DimensionError("dataset: label is not a bit");
  }
}

void save_dataset(const CompressedDataset& data, std::ostream& out) {
  data.validate();
  out << "rbmkit-dataset 1\n" << data.size() << ' ' << data.n_feature_bits << '\n';
  out << "provenance " << data.provenance << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) out << bits_to_string(data.visible_row(i)) << '\n';
}

CompressedDataset load_dataset(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "rbmkit-dataset" || version != 1) {
    throw FormatError("dataset: bad header");
  }
  std::size_t n_rows = 0;
  CompressedDataset data;
  if (!(in >> n_rows >> data.n_feature_bits)) throw FormatError("dataset: bad size line");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  if (line.rfind("provenance", 0) != 0) throw FormatError("dataset: missing provenance line");
  data.provenance = line.size() > 11 ? line.substr(11) : "";
  data.features.reserve(n_rows);
  data.labels.reserve(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (!std::getline(in, line)) throw FormatError("dataset: truncated at row " + std::to_string(i));
    if (line.size() != static_cast<std::size_t>(data.n_feature_bits) + 1) {
      throw FormatError("dataset: row " + std::to_string(i) + " has wrong length");
    }
    BitVector bits;
    try {
      bits = bits_from_string(line);
    } catch (const std::exception&) {
      throw FormatError("dataset: row " + std::to_string(i) + " is not a bit string");
    }
    data.labels.push_back(bits.back());
    bits.pop_back();
    data.features.push_back(std::move(bits));
  }
  return data;
}

namespace {

template <typename T, typename Fn>
void save_to_path(const T& value, const std::string& path, Fn fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  fn(value, out);
}

template <typename Fn>
auto load_from_path(const std::string& path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return fn(in);
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << v(i);
  out << '\n';
}

Eigen::VectorXd read_vector(std::istream& in, Eigen::Index n, const char* what) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(in >> v(i))) throw FormatError(std::string("truncated ") + what);
  }
  return v;
}

}  // namespace

void save_dataset(const CompressedDataset& data, const std::string& path) {
  save_to_path(data, path, [](const CompressedDataset& d, std::ostream& o) { save_dataset(d, o); });
}

CompressedDataset load_dataset(const std::string& path) {
  return load_from_path(path, [](std::istream& i) { return load_dataset(i); });
}

void save_pca(const PcaModel& model, std::ostream& out) {
  const auto old = out.precision(17);
  out << "rbmkit-pca 1\n" << model.n_components() << ' ' << model.n_pixels() << '\n';
  write_vector(out, model.mean);
  for (int i = 0; i < model.n_components(); ++i) write_vector(out, model.components.row(i).transpose());
  write_vector(out, model.explained_variance_ratio);
  out.precision(old);
}

PcaModel load_pca(std::istream& in) {
  std::string magic;
  int version = 0, k = 0, pixels = 0;
  if (!(in >> magic >> version) || magic != "rbmkit-pca" || version != 1) {
    throw FormatError("pca: bad header");
  }
  if (!(in >> k >> pixels) || k < 1 || pixels < 1) throw FormatError("pca: bad size line");
  PcaModel model;
  model.mean = read_vector(in, pixels, "pca mean");
  model.components.resize(k, pixels);
  for (int i = 0; i < k; ++i) model.components.row(i) = read_vector(in, pixels, "pca component").transpose();
  model.explained_variance_ratio = read_vector(in, k, "pca ratios");
  return model;
}

void save_pca(const PcaModel& model, const std::string& path) {
  save_to_path(model, path, [](const PcaModel& m, std::ostream& o) { save_pca(m, o); });
}

PcaModel load_pca(const std::string& path) {
  return load_from_path(path, [](std::istream& i) { return load_pca(i); });
}

void save_quantizer(const Quantizer& q, std::ostream& out) {
  const auto old = out.precision(17);
  out << "rbmkit-quantizer 1\n" << q.n_components() << ' ' << Quantizer::kLow << ' '
      << Quantizer::kHigh << '\n';
  for (int i = 0; i < q.n_components(); ++i) out << q.min(i) << ' ' << q.max(i) << '\n';
  out.precision(old);
}

Quantizer load_quantizer(std::istream& in) {
  std::string magic;
  int version = 0, k = 0, lo = 0, hi = 0;
  if (!(in >> magic >> version) || magic != "rbmkit-quantizer" || version != 1) {
    throw FormatError("quantizer: bad header");
  }
  if (!(in >> k >> lo >> hi) || k < 1 || lo != Quantizer::kLow || hi != Quantizer::kHigh) {
    throw FormatError("quantizer: bad size line");
  }
  Quantizer q;
  q.min.resize(k);
  q.max.resize(k);
  for (int i = 0; i < k; ++i) {
    if (!(in >> q.min(i) >> q.max(i))) throw FormatError("quantizer: truncated");
  }
  q.validate();
  return q;
}

void save_quantizer(const Quantizer& q, const std::string& path) {
  save_to_path(q, path, [](const Quantizer& v, std::ostream& o) { save_quantizer(v, o); });
}

Quantizer load_quantizer(const std::string& path) {
  return load_from_path(path, [](std::istream& i) { return load_quantizer(i); });
}

std::string fingerprint_bytes(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fingerprint(const PcaModel& model) {
  std::ostringstream s;
  save_pca(model, s);
  return fingerprint_bytes(s.str());
}

std::string fingerprint(const Quantizer& q) {
  std::ostringstream s;
  save_quantizer(q, s);
  return fingerprint_bytes(s.str());
}

// ---------------------------------------------------------------------------
// Synthetic images

namespace {

void blob_image(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out, int side, Rng& rng) {
  const double centre = 0.5 * (side - 1);
  const double cx = centre + 0.03 * side * rng.normal();
  const double cy = centre + 0.03 * side * rng.normal();
  const double width = rng.uniform(0.06, 0.14) * side;
  const double amp = rng.uniform(0.6, 1.0);
  const double noise = rng.uniform(0.01, 0.05);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
      const double value = amp * std::exp(-0.5 * d2 / (width * width)) + noise * rng.normal();
      out(r * side + c) = std::clamp(value, 0.0, 1.0);
    }
  }
}

void spiral_image(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out, int side, Rng& rng) {
  const double centre = 0.5 * (side - 1);
  const double cx = centre + 0.03 * side * rng.normal();
  const double cy = centre + 0.03 * side * rng.normal();
  const double pitch = rng.uniform(10.0, 30.0) * M_PI / 180.0;
  const double rotation = rng.uniform(0.0, 2.0 * M_PI);
  const double disc_scale = rng.uniform(0.15, 0.3) * side;
  const double bulge = rng.uniform(0.03, 0.06) * side;
  const double amp = rng.uniform(0.6, 1.0);
  const double noise = rng.uniform(0.01, 0.05);
  const double r0 = 0.05 * side;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double dx = c - cx;
      const double dy = r - cy;
      const double rad = std::hypot(dx, dy);
      const double theta = std::atan2(dy, dx);
      const double phase = theta - std::log(std::max(rad, 0.5) / r0) / std::tan(pitch) - rotation;
      const double arms = std::pow(0.5 + 0.5 * std::cos(2.0 * phase), 3.0);
      const double disc = std::exp(-rad / disc_scale) * (0.25 + 0.75 * arms);
      const double core = std::exp(-0.5 * rad * rad / (bulge * bulge));
      const double value = amp * std::min(1.0, 0.8 * disc + 0.6 * core) + noise * rng.normal();
      out(r * side + c) = std::clamp(value, 0.0, 1.0);
    }
  }
}

}  // namespace

ImageSet synth_generate(int n_per_class, int side, std::uint64_t seed) {
  if (side < 16) throw std::invalid_argument("synth_generate: side must be >= 16");
  if (n_per_class < 1) throw std::invalid_argument("synth_generate: n_per_class must be >= 1");
  ImageSet set;
  set.side = side;
  const int n = 2 * n_per_class;
  set.images.resize(n, side * side);
  set.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    set.labels[i] = static_cast<std::uint8_t>(i % 2);
    if (i % 2 == 0) {
      blob_image(set.images.row(i), side, rng);
    } else {
      spiral_image(set.images.row(i), side, rng);
    }
  }
  return set;
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ImageSet ingest(const std::string& dir, const std::string& manifest, int crop) {
  if (crop < 0) throw std::invalid_argument("ingest: crop must be >= 0");
  std::ifstream in(manifest);
  if (!in) throw FormatError("ingest: cannot open manifest " + manifest);

  std::vector<std::pair<std::string, std::uint8_t>> entries;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError("ingest: manifest line " + std::to_string(line_no) + " has no comma");
    }
    const std::string file = trim(line.substr(0, comma));
    const std::string label = trim(line.substr(comma + 1));
    if (label == "0" || label == "1") {
      entries.emplace_back(file, static_cast<std::uint8_t>(label[0] - '0'));
    } else if (entries.empty() && line_no == 1) {
      continue;  // header row
    } else {
      throw FormatError("ingest: unknown label '" + label + "' for " + file);
    }
  }
  if (entries.empty()) throw FormatError("ingest: manifest lists no images");

  ImageSet set;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto path = (std::filesystem::path(dir) / entries[i].first).string();
    if (!std::filesystem::exists(path)) throw FormatError("ingest: missing file " + path);
    const GrayImage img = read_pgm(path);
    int size = crop;
    if (size == 0) {
      if (img.width != img.height) {
        throw FormatError("ingest: " + path + " is not square and no crop was given");
      }
      size = img.width;
    }
    if (img.width < size || img.height < size) {
      throw FormatError("ingest: " + path + " is " + std::to_string(img.width) + "x" +
                        std::to_string(img.height) + ", smaller than crop " + std::to_string(size));
    }
    if (i == 0) {
      set.side = size;
      set.images.resize(static_cast<Eigen::Index>(entries.size()), size * size);
    }
    const int off_x = (img.width - size) / 2;
    const int off_y = (img.height - size) / 2;
    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) {
        set.images(static_cast<Eigen::Index>(i), r * size + c) =
            static_cast<double>(img.at(r + off_y, c + off_x)) / img.maxval;
      }
    }
    set.labels.push_back(entries[i].second);
  }
  return set;
}

// ---------------------------------------------------------------------------
// Dataset assembly

BuiltDataset build_dataset(const ImageSet& images, double fit_fraction, int n_feature_bits,
                           std::uint64_t seed, double train_fraction) {
  if (n_feature_bits < 8 || n_feature_bits % 8 != 0) {
    throw std::invalid_argument("build_dataset: n_feature_bits must be a positive multiple of 8, got " +
                                std::to_string(n_feature_bits));
  }
  if (!(fit_fraction > 0.0 && fit_fraction < 1.0) || !(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("build_dataset: fractions must lie in (0, 1)");
  }
  if (images.images.rows() != static_cast<Eigen::Index>(images.size())) {
    throw DimensionError("build_dataset: image/label count mismatch");
  }
  const std::size_t n = images.size();
  const int k = n_feature_bits / 8;
  const auto n_fit = static_cast<std::size_t>(std::llround(fit_fraction * static_cast<double>(n)));
  const std::size_t n_rest = n - std::min(n, n_fit);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n_rest)));
  if (n_fit < static_cast<std::size_t>(k) + 1 || n_train < 1 || n_train >= n_rest) {
    throw std::invalid_argument("build_dataset: " + std::to_string(n) +
                                " images are not enough for the fit, train and test splits");
  }

  Rng rng(seed);
  const std::vector<std::size_t> order = permutation(n, rng);
  Eigen::MatrixXd fit(n_fit, images.images.cols());
  for (std::size_t i = 0; i < n_fit; ++i) fit.row(i) = images.images.row(order[i]);

  BuiltDataset out;
  out.pca = pca_fit(fit, k);
  out.quantizer = Quantizer::fit(out.pca.project_rows(fit));
  const std::string provenance =
      "pca:" + fingerprint(out.pca) + " quantizer:" + fingerprint(out.quantizer);
  for (CompressedDataset* d : {&out.train, &out.test}) {
    d->n_feature_bits = n_feature_bits;
    d->provenance = provenance;
  }
  for (std::size_t i = n_fit; i < n; ++i) {
    const std::size_t idx = order[i];
    CompressedDataset& dst = (i - n_fit) < n_train ? out.train : out.test;
    dst.features.push_back(compress(out.pca, out.quantizer, images.images.row(idx).transpose()));
    dst.labels.push_back(images.labels[idx]);
  }
  return out;
}

Raster render_minibatch(const CompressedDataset& data, std::size_t begin, std::size_t end) {
  if (begin >= end || end > data.size()) {
    throw std::invalid_argument("render_minibatch: invalid row range [" + std::to_string(begin) +
                                ", " + std::to_string(end) + ") for " + std::to_string(data.size()) +
                                " rows");
  }
  Raster r;
  r.image.width = data.n_feature_bits;
  r.image.height = static_cast<int>(end - begin);
  r.image.maxval = 255;
  r.image.pixels.reserve(static_cast<std::size_t>(r.image.width) * r.image.height);
  for (std::size_t i = begin; i < end; ++i) {
    for (std::uint8_t bit : data.features[i]) {
      r.image.pixels.push_back(bit ? 255 : 0);
      r.bit_sum += bit;
    }
  }
  r.max_bit_sum = r.image.pixels.size();
  std::ostringstream caption;
  caption << "rows " << begin << ".." << end - 1 << " (" << r.image.height << " images x "
          << r.image.width << " bits, leading component on the left); sum of all binary values "
          << r.bit_sum << " of a possible " << r.max_bit_sum << '\n';
  r.caption = caption.str();
  return r;
}

}  // namespace rbmkit
