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
#include <rbmkit/pgm.hpp>
#include <rbmkit/random.hpp>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rbmkit {
namespace {

namespace fs = std::filesystem;

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

double reconstruction_error(const PcaModel& model, const Eigen::MatrixXd& images) {
  double err = 0.0;
  for (Eigen::Index i = 0; i < images.rows(); ++i) {
    const Eigen::VectorXd x = images.row(i).transpose();
    err += (model.reconstruct(model.project(x)) - x).squaredNorm();
  }
  return err;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("rbmkit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Pca, DiagonalCovariance) {
  // Four points per axis pair give variances exactly 4 and 1.
  Eigen::MatrixXd x(4, 2);
  x << 2, 1, -2, 1, 2, -1, -2, -1;
  const PcaModel m = pca_fit(x, 2);
  EXPECT_NEAR(m.explained_variance_ratio(0), 0.8, 1e-12);
  EXPECT_NEAR(m.explained_variance_ratio(1), 0.2, 1e-12);
  EXPECT_NEAR(m.components(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(m.components(1, 1), 1.0, 1e-12);
}

TEST(Pca, ReplicatedDataGivesSameModel) {
  const Eigen::MatrixXd x = random_matrix(30, 6, 1);
  Eigen::MatrixXd twice(60, 6);
  twice << x, x;
  const PcaModel a = pca_fit(x, 4), b = pca_fit(twice, 4);
  EXPECT_LT((a.components - b.components).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a.explained_variance_ratio - b.explained_variance_ratio).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Pca, MatchesEigensolverOracle) {
  const Eigen::MatrixXd x = random_matrix(50, 10, 2);
  const PcaModel m = pca_fit(x, 10);
  EXPECT_LT(reconstruction_error(m, x), 1e-8);

  const Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd cov = centred.transpose() * centred / 49.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd values = eig.eigenvalues().reverse();
  const Eigen::VectorXd ratios = values / values.sum();
  EXPECT_LT((m.explained_variance_ratio - ratios).cwiseAbs().maxCoeff(), 1e-8);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd ref = eig.eigenvectors().col(9 - k);
    EXPECT_NEAR(std::abs(ref.dot(m.components.row(k).transpose())), 1.0, 1e-8);
  }
}

TEST(Pca, Invariants) {
  const Eigen::MatrixXd x = random_matrix(40, 12, 3);
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 12; ++k) {
    const PcaModel m = pca_fit(x, k);
    const Eigen::MatrixXd gram = m.components * m.components.transpose();
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(m.explained_variance_ratio.sum(), 1.0 + 1e-12);
    for (int c = 0; c < k; ++c) {
      Eigen::Index at;
      m.components.row(c).cwiseAbs().maxCoeff(&at);
      EXPECT_GT(m.components(c, at), 0.0);
      if (c > 0) EXPECT_LE(m.explained_variance_ratio(c), m.explained_variance_ratio(c - 1));
    }
    const double err = reconstruction_error(m, x);
    EXPECT_LE(err, previous + 1e-9);
    previous = err;
  }
  EXPECT_EQ(pca_fit(x, 3).project_rows(x).row(5).transpose(), pca_fit(x, 3).project(x.row(5).transpose()));
}

TEST(Pca, RankErrors) {
  Eigen::MatrixXd x = random_matrix(20, 5, 4);
  x.col(4) = x.col(0) + x.col(1);
  EXPECT_NO_THROW(pca_fit(x, 4));
  EXPECT_THROW(pca_fit(x, 5), std::invalid_argument);
  EXPECT_THROW(pca_fit(x, 0), std::invalid_argument);
}

Quantizer unit_quantizer() {
  Quantizer q;
  q.min = Eigen::VectorXd::Constant(1, 0.0);
  q.max = Eigen::VectorXd::Constant(1, 225.0);
  return q;
}

TEST(Quantizer, EndpointsAndClamp) {
  const Quantizer q = unit_quantizer();
  EXPECT_EQ(q.quantize(0, 0.0), 15);
  EXPECT_EQ(bits_to_string(encode_bytes({q.quantize(0, 0.0)})), "00001111");
  EXPECT_EQ(q.quantize(0, 225.0), 240);
  EXPECT_EQ(bits_to_string(encode_bytes({q.quantize(0, 225.0)})), "11110000");
  EXPECT_EQ(q.quantize(0, 281.0), 255);  // raw 296
  EXPECT_EQ(bits_to_string(encode_bytes({q.quantize(0, 281.0)})), "11111111");
  EXPECT_EQ(q.quantize(0, -100.0), 0);
  EXPECT_EQ(q.quantize(0, 0.5), 16);   // 15.5 rounds away from zero
  EXPECT_EQ(q.quantize(0, 0.49), 15);
}

TEST(Quantizer, FitMapsRangeAndIsMonotone) {
  const Eigen::MatrixXd proj = random_matrix(100, 3, 5);
  const Quantizer q = Quantizer::fit(proj);
  for (int c = 0; c < 3; ++c) {
    int lo = 255, hi = 0;
    for (int i = 0; i < 100; ++i) {
      lo = std::min<int>(lo, q.quantize(c, proj(i, c)));
      hi = std::max<int>(hi, q.quantize(c, proj(i, c)));
    }
    EXPECT_EQ(lo, 15);
    EXPECT_EQ(hi, 240);
    int last = 0;
    for (double p = -10.0; p <= 10.0; p += 0.01) {
      const int now = q.quantize(c, p);
      EXPECT_GE(now, last);
      last = now;
    }
  }
  Eigen::MatrixXd flat_col = proj;
  flat_col.col(1).setConstant(2.0);
  EXPECT_THROW(Quantizer::fit(flat_col), std::invalid_argument);
}

TEST(Bits, EncodeDecodeRoundTrip) {
  std::vector<std::uint8_t> bytes(256);
  for (int i = 0; i < 256; ++i) bytes[i] = static_cast<std::uint8_t>(i);
  const BitVector bits = encode_bytes(bytes);
  EXPECT_EQ(bits.size(), 2048u);
  EXPECT_EQ(decode_bytes(bits), bytes);
  EXPECT_EQ(bits_to_string(encode_bytes({0x80, 0x01})), "1000000000000001");
  EXPECT_THROW(decode_bytes(BitVector(7)), DimensionError);
}

TEST(Compress, ProjectsQuantizesEncodes) {
  const Eigen::MatrixXd x = random_matrix(60, 8, 6);
  const PcaModel m = pca_fit(x, 3);
  const Quantizer q = Quantizer::fit(m.project_rows(x));
  const Eigen::VectorXd image = x.row(7).transpose();
  const BitVector bits = compress(m, q, image);
  ASSERT_EQ(bits.size(), 24u);
  EXPECT_EQ(decode_bytes(bits), q.quantize(m.project(image)));
}

TEST(Synth, DeterministicAndBounded) {
  const ImageSet a = synth_generate(20, 24, 7);
  const ImageSet b = synth_generate(20, 24, 7);
  EXPECT_EQ(a.images, b.images);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.size(), 40u);
  EXPECT_EQ(a.images.cols(), 24 * 24);
  EXPECT_GE(a.images.minCoeff(), 0.0);
  EXPECT_LE(a.images.maxCoeff(), 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.labels[i], i % 2);
  EXPECT_NE(synth_generate(20, 24, 8).images, a.images);
  EXPECT_THROW(synth_generate(5, 15, 0), std::invalid_argument);
}

// Axis ratio sqrt(l_max / l_min) of the intensity second-moment matrix.
double axis_ratio(const Eigen::VectorXd& image, int side) {
  double total = 0, cx = 0, cy = 0;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double w = image(r * side + c);
      total += w;
      cx += w * c;
      cy += w * r;
    }
  }
  cx /= total;
  cy /= total;
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double w = image(r * side + c) / total;
      m(0, 0) += w * (c - cx) * (c - cx);
      m(1, 1) += w * (r - cy) * (r - cy);
      m(0, 1) += w * (c - cx) * (r - cy);
    }
  }
  m(1, 0) = m(0, 1);
  const Eigen::Vector2d l = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues();
  return std::sqrt(l(1) / l(0));
}

TEST(Synth, BlobsAreIsotropic) {
  const ImageSet s = synth_generate(500, 32, 9);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); i += 2) sum += axis_ratio(s.images.row(i).transpose(), 32);
  EXPECT_LT(sum / 500.0, 1.15);
}

TEST(Pgm, RoundTripAndFormats) {
  GrayImage img{3, 2, 255, {0, 10, 20, 30, 40, 255}};
  std::stringstream s;
  write_pgm(img, s);
  EXPECT_EQ(read_pgm(s), img);

  GrayImage wide{2, 1, 1000, {999, 3}};
  std::stringstream w;
  write_pgm(wide, w);
  EXPECT_EQ(read_pgm(w), wide);

  std::istringstream ascii("P2\n# comment\n2 2\n15\n0 5\n10 15\n");
  const GrayImage a = read_pgm(ascii);
  EXPECT_EQ(a.at(1, 0), 10);
  EXPECT_EQ(a.maxval, 15);

  std::istringstream bad("P6\n1 1\n255\n");
  EXPECT_THROW(read_pgm(bad), FormatError);
  std::istringstream truncated("P5\n2 2\n255\nab");
  EXPECT_THROW(read_pgm(truncated), FormatError);
}

void write_square(const fs::path& path, int side, std::uint16_t base) {
  GrayImage img{side, side, 255, {}};
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) img.pixels.push_back(static_cast<std::uint16_t>((base + r + c) % 256));
  }
  write_pgm(img, path.string());
}

TEST(Ingest, ToyDirectory) {
  const fs::path dir = fresh_dir("ingest_toy");
  write_square(dir / "a.pgm", 4, 0);
  write_square(dir / "b.pgm", 4, 100);
  std::ofstream(dir / "labels.csv") << "filename,class\na.pgm,1\nb.pgm,0\n";
  const ImageSet s = ingest(dir.string(), (dir / "labels.csv").string(), 0);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.labels, (std::vector<std::uint8_t>{1, 0}));
  EXPECT_EQ(s.side, 4);
  EXPECT_DOUBLE_EQ(s.images(1, 5), 102.0 / 255.0);
  EXPECT_EQ(ingest(dir.string(), (dir / "labels.csv").string(), 0).images, s.images);
}

TEST(Ingest, CentreCrop) {
  const fs::path dir = fresh_dir("ingest_crop");
  GrayImage img{300, 300, 255, std::vector<std::uint16_t>(90000, 0)};
  for (int r = 0; r < 300; ++r) {
    for (int c = 0; c < 300; ++c) {
      if (r >= 50 && r < 250 && c >= 50 && c < 250) img.pixels[r * 300 + c] = 255;
    }
  }
  img.pixels[50 * 300 + 50] = 7;
  write_pgm(img, (dir / "big.pgm").string());
  std::ofstream(dir / "m.csv") << "big.pgm,0\n";
  const ImageSet s = ingest(dir.string(), (dir / "m.csv").string(), 200);
  EXPECT_EQ(s.side, 200);
  EXPECT_DOUBLE_EQ(s.images(0, 0), 7.0 / 255.0);
  EXPECT_DOUBLE_EQ(s.images.row(0).tail(200 * 200 - 1).minCoeff(), 1.0);
}

TEST(Ingest, Errors) {
  const fs::path dir = fresh_dir("ingest_errors");
  write_square(dir / "a.pgm", 4, 0);
  write_pgm(GrayImage{4, 3, 255, std::vector<std::uint16_t>(12, 0)}, (dir / "rect.pgm").string());
  std::ofstream(dir / "missing.csv") << "nope.pgm,1\n";
  std::ofstream(dir / "label.csv") << "a.pgm,spiral\n";
  std::ofstream(dir / "rect.csv") << "rect.pgm,0\n";
  EXPECT_THROW(ingest(dir.string(), (dir / "missing.csv").string(), 0), FormatError);
  EXPECT_THROW(ingest(dir.string(), (dir / "label.csv").string(), 0), FormatError);
  EXPECT_THROW(ingest(dir.string(), (dir / "rect.csv").string(), 0), FormatError);
  EXPECT_NO_THROW(ingest(dir.string(), (dir / "rect.csv").string(), 3));
  EXPECT_THROW(ingest(dir.string(), (dir / "rect.csv").string(), 5), FormatError);
}

TEST(BuildDataset, SplitsAndShapes) {
  const ImageSet images = synth_generate(5000, 16, 10);
  const BuiltDataset d = build_dataset(images, 0.5, 64, 11);
  EXPECT_EQ(d.pca.n_components(), 8);
  EXPECT_EQ(d.train.size(), 2500u);
  EXPECT_EQ(d.test.size(), 2500u);
  EXPECT_EQ(d.train.visible_row(0).size(), 65u);
  EXPECT_EQ(d.train.visible_row(3).back(), d.train.labels[3]);
  EXPECT_NE(d.train.provenance.find(fingerprint(d.pca)), std::string::npos);
  EXPECT_NE(d.train.provenance.find(fingerprint(d.quantizer)), std::string::npos);
  EXPECT_NO_THROW(d.test.validate());
  const BuiltDataset again = build_dataset(images, 0.5, 64, 11);
  EXPECT_EQ(again.train, d.train);
}

TEST(BuildDataset, Errors) {
  const ImageSet images = synth_generate(10, 16, 12);
  EXPECT_THROW(build_dataset(images, 0.5, 12, 0), std::invalid_argument);
  EXPECT_THROW(build_dataset(images, 0.95, 8, 0), std::invalid_argument);
  EXPECT_THROW(build_dataset(images, 1.0, 8, 0), std::invalid_argument);
}

TEST(Serialization, DatasetPcaQuantizerRoundTrip) {
  const BuiltDataset d = build_dataset(synth_generate(40, 16, 13), 0.5, 16, 14);
  std::stringstream ds, ps, qs;
  save_dataset(d.train, ds);
  EXPECT_EQ(load_dataset(ds), d.train);
  save_pca(d.pca, ps);
  const PcaModel p = load_pca(ps);
  EXPECT_EQ(p.components, d.pca.components);
  EXPECT_EQ(p.mean, d.pca.mean);
  EXPECT_EQ(fingerprint(p), fingerprint(d.pca));
  save_quantizer(d.quantizer, qs);
  const Quantizer q = load_quantizer(qs);
  EXPECT_EQ(q.min, d.quantizer.min);
  EXPECT_EQ(q.max, d.quantizer.max);
  std::istringstream bad("rbmkit-dataset 1\n1 8\nprovenance x\n01x000000\n");
  EXPECT_THROW(load_dataset(bad), FormatError);
}

CompressedDataset rows_of(std::size_t n, int bits, std::uint8_t value) {
  CompressedDataset d;
  d.n_feature_bits = bits;
  d.features.assign(n, BitVector(bits, value));
  d.labels.assign(n, 1);
  return d;
}

TEST(Raster, MinibatchStatistics) {
  const Raster dark = render_minibatch(rows_of(50, 64, 0), 0, 50);
  EXPECT_EQ(dark.image.width, 64);
  EXPECT_EQ(dark.image.height, 50);
  EXPECT_EQ(dark.bit_sum, 0u);
  EXPECT_EQ(dark.max_bit_sum, 3200u);
  EXPECT_EQ(*std::max_element(dark.image.pixels.begin(), dark.image.pixels.end()), 0);

  const Raster bright = render_minibatch(rows_of(60, 64, 1), 10, 60);
  EXPECT_EQ(bright.bit_sum, 3200u);
  EXPECT_EQ(bright.image.at(49, 63), 255);

  std::ostringstream a, b;
  write_pgm(render_minibatch(rows_of(50, 64, 1), 0, 50).image, a);
  write_pgm(render_minibatch(rows_of(50, 64, 1), 0, 50).image, b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_THROW(render_minibatch(rows_of(5, 8, 0), 3, 3), std::invalid_argument);
  EXPECT_THROW(render_minibatch(rows_of(5, 8, 0), 2, 9), std::invalid_argument);
}

}  // namespace
}  // namespace rbmkit
