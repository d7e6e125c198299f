#include "motif/image.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace motif {

Rgb rgb_from_hex(const std::string& hex) {
  if (hex.size() != 7 || hex[0] != '#') throw std::invalid_argument("bad color '" + hex + "'");
  const unsigned long v = std::stoul(hex.substr(1), nullptr, 16);
  return {static_cast<uint8_t>((v >> 16) & 0xFF), static_cast<uint8_t>((v >> 8) & 0xFF), static_cast<uint8_t>(v & 0xFF)};
}

std::string rgb_to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("image dimensions must be positive");
  pixels_.resize(static_cast<size_t>(width) * height * 3);
  for (size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  const size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  const size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
  pixels_[i] = c.r;
  pixels_[i + 1] = c.g;
  pixels_[i + 2] = c.b;
}

void Image::fill_rect(int x, int y, int w, int h, Rgb c) {
  for (int yy = std::max(0, y); yy < std::min(height_, y + h); ++yy) {
    for (int xx = std::max(0, x); xx < std::min(width_, x + w); ++xx) set(xx, yy, c);
  }
}

void write_png(const std::filesystem::path& path, const Image& image) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw std::runtime_error("libpng failed writing " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const auto& px = image.pixels();
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(px.data() + static_cast<size_t>(y) * image.width() * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

Rgb colormap(double t) {
  static constexpr std::array<std::array<double, 3>, 9> kStops{{{68, 1, 84},
                                                                 {71, 44, 122},
                                                                 {59, 81, 139},
                                                                 {44, 113, 142},
                                                                 {33, 144, 141},
                                                                 {39, 173, 129},
                                                                 {92, 200, 99},
                                                                 {170, 220, 50},
                                                                 {253, 231, 37}}};
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0) * (kStops.size() - 1);
  const size_t i = std::min(static_cast<size_t>(t), kStops.size() - 2);
  const double f = t - static_cast<double>(i);
  auto lerp = [&](int c) { return static_cast<uint8_t>(std::lround(kStops[i][c] + f * (kStops[i + 1][c] - kStops[i][c]))); };
  return {lerp(0), lerp(1), lerp(2)};
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_curve_svg(const std::filesystem::path& path, const std::vector<Curve>& curves, const std::string& x_label,
                     const std::string& y_label) {
  static const char* kColors[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377", "#bbbbbb"};
  constexpr double kLeft = 60, kTop = 20, kSize = 400;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  char buf[128];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"620\" height=\"480\" font-family=\"sans-serif\" "
         "font-size=\"12\">\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    std::snprintf(buf, sizeof buf, "%.2f", v);
    out << "<text x=\"" << kLeft + v * kSize << "\" y=\"" << kTop + kSize + 16 << "\" text-anchor=\"middle\">" << buf
        << "</text>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + (1 - v) * kSize + 4 << "\" text-anchor=\"end\">" << buf
        << "</text>\n";
  }
  out << "<text x=\"" << kLeft + kSize / 2 << "\" y=\"" << kTop + kSize + 36 << "\" text-anchor=\"middle\">" << xml_escape(x_label)
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + kSize / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + kSize / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
  for (size_t c = 0; c < curves.size(); ++c) {
    const char* color = kColors[c % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < curves[c].x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.3f,%.3f ", kLeft + std::clamp(curves[c].x[i], 0.0, 1.0) * kSize,
                    kTop + (1 - std::clamp(curves[c].y[i], 0.0, 1.0)) * kSize);
      out << buf;
    }
    out << "\"/>\n";
    const double ly = kTop + 14 + 18.0 * c;
    out << "<line x1=\"" << kLeft + kSize + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + kSize + 32 << "\" y2=\""
        << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + kSize + 36 << "\" y=\"" << ly << "\">" << xml_escape(curves[c].name) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace motif
