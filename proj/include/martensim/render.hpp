#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "martensim/blocks.hpp"

namespace marten {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb& o) const { return r == o.r && g == o.g && b == o.b; }
};

// Fixed palette: horizontal wells render magenta / orange, vertical wells
// cyan / green (plus / minus variant respectively), unresolved pieces black.
Rgb label_color(const GradientLabel& label);

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // packed RGB, row 0 at the top

  Image() = default;
  Image(int w, int h)
      : width(w), height(h),
        pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 255) {}

  std::size_t offset(int row, int col) const {
    return 3 * (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(col));
  }
  Rgb get(int row, int col) const {
    const std::size_t o = offset(row, col);
    return {pixels[o], pixels[o + 1], pixels[o + 2]};
  }
  void set(int row, int col, const Rgb& c) {
    const std::size_t o = offset(row, col);
    pixels[o] = c.r;
    pixels[o + 1] = c.g;
    pixels[o + 2] = c.b;
  }
};

// Point-samples the region decomposition at pixel centers; row 0 shows the top
// of the domain. Pixels claimed by no region stay white.
Image render_microstructure(const Microstructure& ms, int width, int height);

// Binary PPM encoding: "P6\n{w} {h}\n255\n" followed by the raw pixel bytes.
std::vector<std::uint8_t> ppm_bytes(const Image& img);
void write_ppm(const std::string& path, const Image& img);
Image read_ppm(const std::string& path);

}  // namespace marten
