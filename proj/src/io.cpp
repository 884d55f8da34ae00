/* Copyright (c) 2026 The graphdepth Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include "graphdepth/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace graphdepth {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

int parse_dim(const std::string& token, ErrorCode code, const char* what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || value <= 0) {
    throw Error(code, std::string("bad ") + what + " '" + token + "'");
  }
  return value;
}

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

// Reads the next whitespace-separated header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  if (token.empty()) throw Error(ErrorCode::kMalformedHeader, "netpbm header ends early");
  return token;
}

struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> values;  // in [0, 1]
};

Raster read_pnm(std::istream& in) {
  const std::string magic = pnm_token(in);
  int channels = 0;
  bool ascii = false;
  if (magic == "P5" || magic == "P2") channels = 1;
  else if (magic == "P6" || magic == "P3") channels = 3;
  else throw Error(ErrorCode::kMalformedHeader, "unsupported netpbm magic '" + magic + "'");
  ascii = magic == "P2" || magic == "P3";
  Raster r;
  r.width = parse_dim(pnm_token(in), ErrorCode::kMalformedHeader, "width");
  r.height = parse_dim(pnm_token(in), ErrorCode::kMalformedHeader, "height");
  const int maxval = parse_dim(pnm_token(in), ErrorCode::kMalformedHeader, "maxval");
  if (maxval > 65535) throw Error(ErrorCode::kMalformedHeader, "maxval above 65535");
  r.channels = channels;
  const std::size_t n = static_cast<std::size_t>(r.width) * r.height * channels;
  r.values.resize(n);
  if (ascii) {
    for (double& v : r.values) {
      long sample = 0;
      if (!(in >> sample)) throw Error(ErrorCode::kTruncatedPayload, "netpbm payload ends early");
      if (sample < 0 || sample > maxval) throw Error(ErrorCode::kMalformedHeader, "sample above maxval");
      v = static_cast<double>(sample) / maxval;
    }
    return r;
  }
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(n * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw Error(ErrorCode::kTruncatedPayload, "netpbm payload ends early");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned sample = bytes == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
    if (static_cast<int>(sample) > maxval) throw Error(ErrorCode::kMalformedHeader, "sample above maxval");
    r.values[i] = static_cast<double>(sample) / maxval;
  }
  return r;
}

Raster read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorCode::kIo, "cannot decode PNG '" + path.string() + "': " + image.message);
  }
  Raster r;
  r.width = static_cast<int>(image.width);
  r.height = static_cast<int>(image.height);
  r.channels = (image.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
  image.format = r.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIo, "cannot decode PNG '" + path.string() + "': " + message);
  }
  r.values.resize(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) r.values[i] = buffer[i] / 255.0;
  return r;
}

bool has_png_signature(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

Raster read_raster(const std::filesystem::path& path) {
  if (has_png_signature(path)) return read_png(path);
  std::ifstream in = open_in(path);
  return read_pnm(in);
}

}  // namespace

Grid<double> PfmImage::channel(int c) const {
  if (c < 0 || c >= channels) throw Error(ErrorCode::kInvalidArgument, "channel index out of range");
  Grid<double> out(width, height);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values[i * channels + c];
  return out;
}

PfmImage parse_pfm(std::istream& in) {
  std::string magic, w, h, scale_token;
  if (!(in >> magic >> w >> h >> scale_token)) throw Error(ErrorCode::kMalformedHeader, "PFM header ends early");
  PfmImage img;
  if (magic == "Pf") {
    img.channels = 1;
  } else if (magic == "PF") {
    img.channels = 3;
  } else if (magic.size() > 2 && magic.compare(0, 2, "PF") == 0) {
    throw Error(ErrorCode::kUnsupportedChannelCount, "PFM variant '" + magic + "' is not supported");
  } else {
    throw Error(ErrorCode::kMalformedHeader, "bad PFM magic '" + magic + "'");
  }
  img.width = parse_dim(w, ErrorCode::kMalformedHeader, "PFM width");
  img.height = parse_dim(h, ErrorCode::kMalformedHeader, "PFM height");
  char* end = nullptr;
  const double scale = std::strtod(scale_token.c_str(), &end);
  if (end != scale_token.c_str() + scale_token.size() || scale == 0.0 || !std::isfinite(scale)) {
    throw Error(ErrorCode::kMalformedHeader, "bad PFM scale '" + scale_token + "'");
  }
  if (!std::isspace(in.get())) throw Error(ErrorCode::kMalformedHeader, "PFM scale not followed by whitespace");

  const std::size_t row = static_cast<std::size_t>(img.width) * img.channels;
  const std::size_t n = row * img.height;
  std::vector<std::uint32_t> raw(n);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 4));
  if (static_cast<std::size_t>(in.gcount()) != n * 4) {
    throw Error(ErrorCode::kTruncatedPayload, "PFM payload has " + std::to_string(in.gcount()) + " of " +
                                                  std::to_string(n * 4) + " bytes");
  }
  const bool file_little = scale < 0.0;
  const bool swap = file_little != (std::endian::native == std::endian::little);
  img.values.resize(n);
  for (int y = 0; y < img.height; ++y) {
    // Stored bottom row first.
    const std::size_t src = static_cast<std::size_t>(img.height - 1 - y) * row;
    for (std::size_t k = 0; k < row; ++k) {
      std::uint32_t bits = raw[src + k];
      if (swap) bits = byteswap32(bits);
      img.values[y * row + k] = std::bit_cast<float>(bits);
    }
  }
  return img;
}

PfmImage read_pfm(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return parse_pfm(in);
}

void write_pfm(std::ostream& out, const PfmImage& img) {
  if (img.channels != 1 && img.channels != 3) {
    throw Error(ErrorCode::kUnsupportedChannelCount, "PFM supports 1 or 3 channels");
  }
  const std::size_t row = static_cast<std::size_t>(img.width) * img.channels;
  if (img.width <= 0 || img.height <= 0 || img.values.size() != row * img.height) {
    throw Error(ErrorCode::kInvalidArgument, "PFM image data does not match its dimensions");
  }
  out << (img.channels == 1 ? "Pf" : "PF") << '\n' << img.width << ' ' << img.height << "\n-1.0\n";
  const bool swap = std::endian::native != std::endian::little;
  std::vector<std::uint32_t> raw(row);
  for (int y = img.height - 1; y >= 0; --y) {
    for (std::size_t k = 0; k < row; ++k) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(img.values[y * row + k]);
      raw[k] = swap ? byteswap32(bits) : bits;
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(row * 4));
  }
}

void write_pfm(const std::filesystem::path& path, const PfmImage& img) {
  std::ofstream out = open_out(path);
  write_pfm(out, img);
  finish_write(out, path);
}

Grid<double> read_pfm_grid(const std::filesystem::path& path) {
  const PfmImage img = read_pfm(path);
  if (img.channels != 1) {
    throw Error(ErrorCode::kUnsupportedChannelCount, "'" + path.string() + "' has 3 channels, expected 1");
  }
  return img.channel(0);
}

void write_pfm_grid(const std::filesystem::path& path, const Grid<double>& grid) {
  PfmImage img{grid.width(), grid.height(), 1, {}};
  img.values.assign(grid.values().begin(), grid.values().end());
  write_pfm(path, img);
}

void write_pfm3(const std::filesystem::path& path, const Grid<double>& c0, const Grid<double>& c1,
                const Grid<double>& c2) {
  if (!c0.same_shape(c1) || !c0.same_shape(c2)) {
    throw Error(ErrorCode::kInvalidArgument, "PFM planes differ in shape");
  }
  PfmImage img{c0.width(), c0.height(), 3, {}};
  img.values.reserve(3 * c0.size());
  for (std::size_t i = 0; i < c0.size(); ++i) {
    img.values.push_back(static_cast<float>(c0[i]));
    img.values.push_back(static_cast<float>(c1[i]));
    img.values.push_back(static_cast<float>(c2[i]));
  }
  write_pfm(path, img);
}

InverseDepthMap read_inverse_depth(const std::filesystem::path& path) {
  return InverseDepthMap::from_raw(read_pfm_grid(path));
}

void write_inverse_depth(const std::filesystem::path& path, const InverseDepthMap& d) {
  Grid<double> out = d.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!d.valid()[i]) out[i] = HUGE_VAL;
  }
  write_pfm_grid(path, out);
}

GuideImage read_image(const std::filesystem::path& path) {
  Raster r = read_raster(path);
  return GuideImage(r.width, r.height, r.channels, std::move(r.values));
}

void write_png(const std::filesystem::path& path, const RgbImage& img) {
  if ((img.channels != 1 && img.channels != 3) ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    throw Error(ErrorCode::kInvalidArgument, "PNG raster does not match its dimensions");
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, "cannot write PNG '" + path.string() + "': " + image.message);
  }
}

void write_pnm(const std::filesystem::path& path, const RgbImage& img) {
  if ((img.channels != 1 && img.channels != 3) ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    throw Error(ErrorCode::kInvalidArgument, "netpbm raster does not match its dimensions");
  }
  std::ofstream out = open_out(path);
  out << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  finish_write(out, path);
}

Grid<double> read_confidence(const std::filesystem::path& path) {
  Grid<double> m;
  std::ifstream probe = open_in(path);
  char magic[2] = {};
  probe.read(magic, 2);
  if (probe.gcount() == 2 && magic[0] == 'P' && (magic[1] == 'f' || magic[1] == 'F')) {
    m = read_pfm_grid(path);
    for (double& v : m.values()) {
      if (!std::isfinite(v)) v = 0.0;
    }
  } else {
    Raster r = read_raster(path);
    if (r.channels != 1) {
      throw Error(ErrorCode::kUnsupportedChannelCount, "confidence image '" + path.string() + "' is not grayscale");
    }
    m = Grid<double>(r.width, r.height, std::move(r.values));
  }
  for (double v : m.values()) {
    if (v < 0.0 || v > 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "confidence in '" + path.string() + "' leaves [0, 1]");
    }
  }
  return m;
}

RgbImage colorize_normals(const NormalMap& normals) {
  const int w = normals.normals.width();
  const int h = normals.normals.height();
  RgbImage img{w, h, 3, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 3, 255)};
  auto channel = [](double c) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(255.0 * (c + 1.0) / 2.0), 0L, 255L));
  };
  for (std::size_t i = 0; i < normals.normals.size(); ++i) {
    if (!normals.valid[i]) continue;
    const Vec3& n = normals.normals[i];
    img.pixels[3 * i] = channel(n.x);
    img.pixels[3 * i + 1] = channel(n.y);
    img.pixels[3 * i + 2] = channel(n.z);
  }
  return img;
}

}  // namespace graphdepth
