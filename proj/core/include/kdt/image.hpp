#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

// Row-major gray image, values normalized to [0, 1]. Row 0 is the top row of
// the file; conversions map pixel (x, y) to cell (x, y).
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  double at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
  double& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
};

// Row-major bitmap; 1 is black (set).
struct BitImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  std::uint8_t at(int x, int y) const { return bits[std::size_t(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return bits[std::size_t(y) * width + x]; }
};

GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& img, bool binary = true,
               int maxval = 255);

BitImage read_pbm(const std::string& path);
void write_pbm(const std::string& path, const BitImage& img, bool binary = true);

// 2-D conversions. The space side is the smallest power of two covering the
// image; every pixel becomes a labeled cell (for pyramids) or a black cell
// when nonzero (for plain sets). The inverse rasterizations cover the full
// side, unlabeled cells reading 0.
NodeRef pyramid_of_image(TreeStore& s, const GrayImage& img, SpaceSpec* space);
GrayImage image_of_pyramid(const TreeStore& s, const SpaceSpec& sp, NodeRef p);
NodeRef tree_of_bitmap(TreeStore& s, const BitImage& img, SpaceSpec* space);
BitImage bitmap_of_tree(const TreeStore& s, const SpaceSpec& sp, NodeRef t);

} // namespace kdt
