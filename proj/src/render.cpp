#include "martensim/render.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "martensim/errors.hpp"

namespace marten {

Rgb label_color(const GradientLabel& label) {
  switch (label.family) {
    case LabelFamily::Horizontal:
      return label.variant >= 0 ? Rgb{255, 0, 255} : Rgb{255, 165, 0};
    case LabelFamily::Vertical:
      return label.variant >= 0 ? Rgb{0, 255, 255} : Rgb{0, 255, 0};
    case LabelFamily::Unresolved:
      return Rgb{0, 0, 0};
  }
  return Rgb{0, 0, 0};
}

Image render_microstructure(const Microstructure& ms, int width, int height) {
  if (width <= 0 || height <= 0) {
    fail(ErrorKind::InvalidParameter, "image dimensions must be positive");
  }
  if (!(ms.domain.l1 > 0.0) || !(ms.domain.l2 > 0.0)) {
    fail(ErrorKind::InvalidParameter, "domain is empty");
  }
  Image img(width, height);
  const int grid = std::max(8, std::min(512, std::max(width, height) / 2));
  const RegionIndex index(ms, grid, grid);
  for (int row = 0; row < height; ++row) {
    const double y =
        ms.domain.y0 + (static_cast<double>(height - 1 - row) + 0.5) / height *
                           ms.domain.l2;
    for (int col = 0; col < width; ++col) {
      const double x =
          ms.domain.x0 + (static_cast<double>(col) + 0.5) / width * ms.domain.l1;
      const int idx = index.locate(Vec2(x, y));
      if (idx >= 0) {
        img.set(row, col,
                label_color(ms.regions[static_cast<std::size_t>(idx)].label));
      }
    }
  }
  return img;
}

std::vector<std::uint8_t> ppm_bytes(const Image& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) *
                               static_cast<std::size_t>(img.height) * 3) {
    fail(ErrorKind::InvalidParameter, "malformed image buffer");
  }
  const std::string header = "P6\n" + std::to_string(img.width) + " " +
                             std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out;
  out.reserve(header.size() + img.pixels.size());
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

void write_ppm(const std::string& path, const Image& img) {
  const std::vector<std::uint8_t> bytes = ppm_bytes(img);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorKind::IoError, "short write to " + path);
}

namespace {

int read_ppm_token(std::istream& in, const std::string& path) {
  // Skips whitespace and '#' comments, then reads one decimal token.
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch) != 0) {
      ch = in.get();
    } else {
      break;
    }
  }
  if (ch == EOF || std::isdigit(ch) == 0) {
    fail(ErrorKind::SchemaError, "malformed ppm header in " + path);
  }
  long value = 0;
  while (ch != EOF && std::isdigit(ch) != 0) {
    value = value * 10 + (ch - '0');
    if (value > 1000000) fail(ErrorKind::SchemaError, "ppm header value too large");
    ch = in.get();
  }
  if (ch != EOF) in.unget();
  return static_cast<int>(value);
}

}  // namespace

Image read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::IoError, "cannot open " + path);
  char magic[2] = {0, 0};
  f.read(magic, 2);
  if (!f || magic[0] != 'P' || magic[1] != '6') {
    fail(ErrorKind::SchemaError, path + " is not a binary ppm file");
  }
  const int width = read_ppm_token(f, path);
  const int height = read_ppm_token(f, path);
  const int maxval = read_ppm_token(f, path);
  if (width <= 0 || height <= 0 || maxval != 255) {
    fail(ErrorKind::SchemaError, "unsupported ppm geometry in " + path);
  }
  const int sep = f.get();
  if (sep == EOF || std::isspace(sep) == 0) {
    fail(ErrorKind::SchemaError, "missing pixel separator in " + path);
  }
  Image img(width, height);
  f.read(reinterpret_cast<char*>(img.pixels.data()),
         static_cast<std::streamsize>(img.pixels.size()));
  if (f.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
    fail(ErrorKind::SchemaError, "truncated pixel data in " + path);
  }
  return img;
}

}  // namespace marten
