#include "kdt/image.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kdt/build.hpp"
#include "kdt/error.hpp"

namespace kdt {

namespace {

// Next token skipping whitespace and # comments, shared by the plain and the
// raw header parts.
int next_int(std::istream& in, const std::string& path) {
  for (;;) {
    int c = in.peek();
    if (c == EOF) fail(Errc::BadFormat, path + ": truncated header");
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
  int v;
  if (!(in >> v)) fail(Errc::BadFormat, path + ": bad integer field");
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::FileNotFound, path + ": cannot open");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::FileNotFound, path + ": cannot create");
  return out;
}

int side_precision(int w, int h) {
  int r = 0;
  while ((1 << r) < w || (1 << r) < h) ++r;
  return r;
}

} // namespace

GrayImage read_pgm(const std::string& path) {
  auto in = open_in(path);
  char m0 = char(in.get()), m1 = char(in.get());
  if (m0 != 'P' || (m1 != '2' && m1 != '5')) fail(Errc::BadFormat, path + ": not a PGM file");
  bool binary = m1 == '5';
  GrayImage img;
  img.width = next_int(in, path);
  img.height = next_int(in, path);
  int maxval = next_int(in, path);
  if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 65535)
    fail(Errc::BadFormat, path + ": bad dimensions");
  img.pixels.resize(std::size_t(img.width) * img.height);
  if (binary) {
    in.get(); // single whitespace after maxval
    for (auto& p : img.pixels) {
      int v = in.get();
      if (maxval > 255) v = (v << 8) | in.get();
      if (!in) fail(Errc::BadFormat, path + ": truncated raster");
      p = double(v) / maxval;
    }
  } else {
    for (auto& p : img.pixels) p = double(next_int(in, path)) / maxval;
  }
  return img;
}

void write_pgm(const std::string& path, const GrayImage& img, bool binary, int maxval) {
  auto out = open_out(path);
  out << (binary ? "P5" : "P2") << "\n" << img.width << " " << img.height << "\n" << maxval
      << "\n";
  int col = 0;
  for (const auto& p : img.pixels) {
    double v = p < 0 ? 0 : (p > 1 ? 1 : p);
    int g = int(std::lround(v * maxval));
    if (binary) {
      if (maxval > 255) out.put(char(g >> 8));
      out.put(char(g & 0xff));
    } else {
      out << g << (++col % 16 == 0 ? "\n" : " ");
    }
  }
  if (!binary && col % 16 != 0) out << "\n";
}

BitImage read_pbm(const std::string& path) {
  auto in = open_in(path);
  char m0 = char(in.get()), m1 = char(in.get());
  if (m0 != 'P' || (m1 != '1' && m1 != '4')) fail(Errc::BadFormat, path + ": not a PBM file");
  bool binary = m1 == '4';
  BitImage img;
  img.width = next_int(in, path);
  img.height = next_int(in, path);
  if (img.width <= 0 || img.height <= 0) fail(Errc::BadFormat, path + ": bad dimensions");
  img.bits.resize(std::size_t(img.width) * img.height);
  if (binary) {
    in.get();
    int stride = (img.width + 7) / 8;
    for (int y = 0; y < img.height; ++y)
      for (int b = 0; b < stride; ++b) {
        int byte = in.get();
        if (byte == EOF) fail(Errc::BadFormat, path + ": truncated raster");
        for (int i = 0; i < 8; ++i) {
          int x = b * 8 + i;
          if (x < img.width) img.at(x, y) = (byte >> (7 - i)) & 1;
        }
      }
  } else {
    for (auto& b : img.bits) {
      int c;
      do {
        c = in.get();
        if (c == '#') {
          std::string line;
          std::getline(in, line);
          c = '\n';
        }
      } while (c != EOF && std::isspace(c));
      if (c != '0' && c != '1') fail(Errc::BadFormat, path + ": bad bit");
      b = std::uint8_t(c - '0');
    }
  }
  return img;
}

void write_pbm(const std::string& path, const BitImage& img, bool binary) {
  auto out = open_out(path);
  out << (binary ? "P4" : "P1") << "\n" << img.width << " " << img.height << "\n";
  if (binary) {
    int stride = (img.width + 7) / 8;
    for (int y = 0; y < img.height; ++y)
      for (int b = 0; b < stride; ++b) {
        int byte = 0;
        for (int i = 0; i < 8; ++i) {
          int x = b * 8 + i;
          if (x < img.width && img.at(x, y)) byte |= 1 << (7 - i);
        }
        out.put(char(byte));
      }
  } else {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) out << int(img.at(x, y));
      out << "\n";
    }
  }
}

NodeRef pyramid_of_image(TreeStore& s, const GrayImage& img, SpaceSpec* space) {
  SpaceSpec sp(2, side_precision(img.width, img.height));
  if (space) *space = sp;
  NodeRef out = s.white();
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out = add_cell(s, sp, out, {std::uint32_t(x), std::uint32_t(y)}, img.at(x, y));
  return out;
}

GrayImage image_of_pyramid(const TreeStore& s, const SpaceSpec& sp, NodeRef p) {
  int side = int(sp.cells_per_axis());
  GrayImage img;
  img.width = img.height = side;
  img.pixels.assign(std::size_t(side) * side, 0.0);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      double v = kNoValue;
      if (probe(s, sp, p, {std::uint32_t(x), std::uint32_t(y)}, sp.r, &v))
        img.at(x, y) = v == kNoValue ? 1.0 : v; // plain black reads full scale
    }
  return img;
}

NodeRef tree_of_bitmap(TreeStore& s, const BitImage& img, SpaceSpec* space) {
  SpaceSpec sp(2, side_precision(img.width, img.height));
  if (space) *space = sp;
  NodeRef out = s.white();
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (img.at(x, y)) out = add_cell(s, sp, out, {std::uint32_t(x), std::uint32_t(y)});
  return out;
}

BitImage bitmap_of_tree(const TreeStore& s, const SpaceSpec& sp, NodeRef t) {
  int side = int(sp.cells_per_axis());
  BitImage img;
  img.width = img.height = side;
  img.bits.assign(std::size_t(side) * side, 0);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      if (probe(s, sp, t, {std::uint32_t(x), std::uint32_t(y)}, sp.r))
        img.at(x, y) = 1;
  return img;
}

} // namespace kdt
