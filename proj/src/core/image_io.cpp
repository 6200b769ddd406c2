#include "ifsynth/core/image_io.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace ifsynth::imgio {

namespace {

void skip_ws_and_comments(std::istream& in) {
  int c;
  while ((c = in.peek()) != EOF) {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
}

int read_int(std::istream& in) {
  skip_ws_and_comments(in);
  int v;
  if (!(in >> v)) throw std::runtime_error("malformed netpbm header");
  return v;
}

}  // namespace

void write_pgm16(const std::filesystem::path& path, const Tensor& img) {
  if (img.rank() != 2) throw std::runtime_error("write_pgm16: expected {H,W}");
  const int h = img.dim(0), w = img.dim(1);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm16: cannot open " + path.string());
  out << "P5\n" << w << " " << h << "\n65535\n";
  std::vector<unsigned char> buf((size_t)h * w * 2);
  for (i64 i = 0; i < img.numel(); ++i) {
    double v = std::clamp(img[i], 0.0, 1.0);
    auto q = (uint16_t)std::lround(v * 65535.0);
    buf[(size_t)(2 * i)] = (unsigned char)(q >> 8);  // PGM is big-endian
    buf[(size_t)(2 * i + 1)] = (unsigned char)(q & 0xff);
  }
  out.write((const char*)buf.data(), (std::streamsize)buf.size());
  if (!out) throw std::runtime_error("write_pgm16: short write to " + path.string());
}

Tensor read_pgm16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm16: cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("read_pgm16: not a binary PGM: " + path.string());
  const int w = read_int(in), h = read_int(in), maxval = read_int(in);
  in.get();  // single whitespace after maxval
  Tensor img({h, w});
  if (maxval > 255) {
    std::vector<unsigned char> buf((size_t)h * w * 2);
    in.read((char*)buf.data(), (std::streamsize)buf.size());
    if (!in) throw std::runtime_error("read_pgm16: truncated file " + path.string());
    for (i64 i = 0; i < img.numel(); ++i) {
      const int q = (buf[(size_t)(2 * i)] << 8) | buf[(size_t)(2 * i + 1)];
      img[i] = (double)q / maxval;
    }
  } else {
    std::vector<unsigned char> buf((size_t)h * w);
    in.read((char*)buf.data(), (std::streamsize)buf.size());
    if (!in) throw std::runtime_error("read_pgm16: truncated file " + path.string());
    for (i64 i = 0; i < img.numel(); ++i) img[i] = (double)buf[(size_t)i] / maxval;
  }
  return img;
}

void write_ppm(const std::filesystem::path& path, const Tensor& rgb) {
  if (rgb.rank() != 3 || rgb.dim(0) != 3) throw std::runtime_error("write_ppm: expected {3,H,W}");
  const int h = rgb.dim(1), w = rgb.dim(2);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_ppm: cannot open " + path.string());
  out << "P6\n" << w << " " << h << "\n255\n";
  std::vector<unsigned char> buf((size_t)h * w * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        buf[(size_t)((i64)(y * w + x) * 3 + c)] =
            (unsigned char)std::lround(std::clamp(rgb.at(c, y, x), 0.0, 1.0) * 255.0);
  out.write((const char*)buf.data(), (std::streamsize)buf.size());
}

Tensor read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_ppm: cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P6") throw std::runtime_error("read_ppm: not a binary PPM");
  const int w = read_int(in), h = read_int(in), maxval = read_int(in);
  in.get();
  Tensor rgb({3, h, w});
  std::vector<unsigned char> buf((size_t)h * w * 3);
  in.read((char*)buf.data(), (std::streamsize)buf.size());
  if (!in) throw std::runtime_error("read_ppm: truncated file");
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        rgb.at(c, y, x) = (double)buf[(size_t)((i64)(y * w + x) * 3 + c)] / maxval;
  return rgb;
}

}  // namespace ifsynth::imgio
