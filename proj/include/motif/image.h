#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace motif {

struct Rgb {
  uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

Rgb rgb_from_hex(const std::string& hex);
std::string rgb_to_hex(Rgb c);

class Image {
 public:
  Image(int width, int height, Rgb fill = {255, 255, 255});

  int width() const { return width_; }
  int height() const { return height_; }
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  void fill_rect(int x, int y, int w, int h, Rgb c);
  const std::vector<uint8_t>& pixels() const { return pixels_; }

 private:
  int width_, height_;
  std::vector<uint8_t> pixels_;  // RGB, row-major
};

/// 8-bit RGB PNG via libpng.
void write_png(const std::filesystem::path& path, const Image& image);

/// Perceptually ordered colormap (viridis control points, linear interpolation), t in [0, 1].
Rgb colormap(double t);

struct Curve {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line plot on the unit square, one polyline per curve with a legend.
void write_curve_svg(const std::filesystem::path& path, const std::vector<Curve>& curves, const std::string& x_label,
                     const std::string& y_label);

}  // namespace motif
