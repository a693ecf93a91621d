#ifndef SHELFCHECK_IMAGE_HPP_
#define SHELFCHECK_IMAGE_HPP_

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace shelfcheck {

/// Single-channel 8-bit image, row-major.
struct ImageGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  ImageGrid() = default;
  ImageGrid(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("ImageGrid: bad dimensions");
  }

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, std::uint8_t v) {
    pixels[static_cast<std::size_t>(y) * width + x] = v;
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
};

namespace pnm_detail {

inline int next_token_int(std::istream& in) {
  // Skips whitespace and '#' comments, as the format allows anywhere in the
  // header.
  for (;;) {
    const int c = in.peek();
    if (c == EOF) throw std::runtime_error("pgm: truncated header");
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    break;
  }
  int value = 0;
  if (!(in >> value)) throw std::runtime_error("pgm: malformed header value");
  return value;
}

}  // namespace pnm_detail

/// Reads a portable graymap, plain (P2) or raw (P5), maxval up to 255.
inline ImageGrid load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open '" + path + "'");
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") {
    throw std::runtime_error("pgm: unsupported magic '" + magic + "' in '" + path + "'");
  }
  const int width = pnm_detail::next_token_int(in);
  const int height = pnm_detail::next_token_int(in);
  const int maxval = pnm_detail::next_token_int(in);
  if (width <= 0 || height <= 0) throw std::runtime_error("pgm: bad dimensions");
  if (maxval <= 0 || maxval > 255) throw std::runtime_error("pgm: unsupported maxval");

  ImageGrid img(width, height);
  const std::size_t n = img.pixels.size();
  if (magic == "P5") {
    in.get();  // single whitespace after maxval
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      throw std::runtime_error("pgm: truncated pixel data");
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const int v = pnm_detail::next_token_int(in);
      if (v < 0 || v > maxval) throw std::runtime_error("pgm: sample out of range");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

/// Writes a graymap; raw (P5) by default, plain (P2) on request.
inline void save_pgm(const ImageGrid& img, const std::string& path, bool plain = false) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot write '" + path + "'");
  if (plain) {
    out << "P2\n" << img.width << " " << img.height << "\n255\n";
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        out << static_cast<int>(img.at(x, y)) << (x + 1 == img.width ? '\n' : ' ');
      }
    }
  } else {
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
  }
  if (!out) throw std::runtime_error("pgm: write failed for '" + path + "'");
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_IMAGE_HPP_
