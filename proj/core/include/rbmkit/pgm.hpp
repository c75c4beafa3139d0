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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rbmkit {

/// Grayscale raster; pixels row-major, values in [0, maxval].
struct GrayImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> pixels;

  std::uint16_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  bool operator==(const GrayImage&) const = default;
};

/// Writes binary P5 (one byte per pixel for maxval < 256, else two, MSB first).
void write_pgm(const GrayImage& image, std::ostream& out);
void write_pgm(const GrayImage& image, const std::string& path);

/// Reads P5 or P2. Throws FormatError on malformed input.
GrayImage read_pgm(std::istream& in);
GrayImage read_pgm(const std::string& path);

}  // namespace rbmkit
