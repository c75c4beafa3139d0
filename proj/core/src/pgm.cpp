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

#include <rbmkit/pgm.hpp>

#include <rbmkit/error.hpp>

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

namespace rbmkit {

namespace {

void skip_space_and_comments(std::istream& in) {
  while (true) {
    const int ch = in.peek();
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (ch != EOF && std::isspace(ch)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_header_int(std::istream& in, const char* what) {
  skip_space_and_comments(in);
  long value = -1;
  if (!(in >> value) || value < 0 || value > 1L << 24) {
    throw FormatError(std::string("pgm: bad ") + what);
  }
  return static_cast<int>(value);
}

}  // namespace

void write_pgm(const GrayImage& image, std::ostream& out) {
  if (image.width < 1 || image.height < 1 || image.maxval < 1 || image.maxval > 65535 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw FormatError("pgm: inconsistent image");
  }
  out << "P5\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
  for (std::uint16_t p : image.pixels) {
    if (image.maxval > 255) out.put(static_cast<char>(p >> 8));
    out.put(static_cast<char>(p & 0xff));
  }
}

void write_pgm(const GrayImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("pgm: cannot open " + path + " for writing");
  write_pgm(image, out);
}

GrayImage read_pgm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2')) {
    throw FormatError("pgm: expected P5 or P2 magic");
  }
  GrayImage image;
  image.width = read_header_int(in, "width");
  image.height = read_header_int(in, "height");
  image.maxval = read_header_int(in, "maxval");
  if (image.width < 1 || image.height < 1 || image.maxval < 1 || image.maxval > 65535) {
    throw FormatError("pgm: bad dimensions or maxval");
  }
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  image.pixels.resize(n);
  if (magic[1] == '5') {
    in.get();  // single whitespace byte before the raster
    const bool wide = image.maxval > 255;
    for (std::size_t i = 0; i < n; ++i) {
      int hi = 0;
      if (wide) hi = in.get();
      const int lo = in.get();
      if (lo == EOF || hi == EOF) throw FormatError("pgm: truncated raster");
      image.pixels[i] = static_cast<std::uint16_t>((hi << 8) | lo);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) image.pixels[i] = static_cast<std::uint16_t>(read_header_int(in, "pixel"));
  }
  for (std::uint16_t p : image.pixels) {
    if (p > image.maxval) throw FormatError("pgm: pixel exceeds maxval");
  }
  return image;
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("pgm: cannot open " + path);
  return read_pgm(in);
}

}  // namespace rbmkit
