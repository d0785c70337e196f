#include "ikc/synthimg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ikc {

namespace {

inline double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Bilinearly interpolated lattice of random values; one octave of value
// noise with `cells` lattice cells along the longer side.
struct ValueNoise {
  int gh, gw;
  std::vector<double> grid;

  ValueNoise(int height, int width, int cells, Rng& rng) {
    const int longer = std::max(height, width);
    gh = std::max(2, height * cells / longer + 1);
    gw = std::max(2, width * cells / longer + 1);
    grid.resize(size_t(gh) * size_t(gw));
    for (auto& v : grid) v = rng.uniform();
  }

  double operator()(double u, double v) const {
    const double gx = u * (gw - 1), gy = v * (gh - 1);
    const int x0 = std::min(int(gx), gw - 2), y0 = std::min(int(gy), gh - 2);
    const double fx = smoothstep(gx - x0), fy = smoothstep(gy - y0);
    const double a = grid[size_t(y0) * gw + size_t(x0)];
    const double b = grid[size_t(y0) * gw + size_t(x0 + 1)];
    const double c = grid[size_t(y0 + 1) * gw + size_t(x0)];
    const double d = grid[size_t(y0 + 1) * gw + size_t(x0 + 1)];
    return (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
  }
};

}  // namespace

Image make_toy_image(int height, int width, uint64_t seed) {
  Rng rng = Rng::derive(seed, 0x746f7969u);
  Image img = make_image(3, height, width);

  // base: three octaves of value noise, channel-correlated with a random tint
  ValueNoise oct1(height, width, 4, rng), oct2(height, width, 12, rng),
      oct3(height, width, 36, rng);
  double tint[3], tone[3];
  for (int c = 0; c < 3; ++c) {
    tint[c] = rng.uniform(0.6, 1.0);
    tone[c] = rng.uniform(0.0, 0.25);
  }
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double u = double(x) / width, v = double(y) / height;
      const double base = 0.55 * oct1(u, v) + 0.3 * oct2(u, v) + 0.15 * oct3(u, v);
      for (int c = 0; c < 3; ++c) img.at(c, y, x) = tone[c] + tint[c] * base;
    }

  // oriented sinusoid gratings confined to soft discs
  const int n_gratings = 2 + int(rng.below(3));
  for (int g = 0; g < n_gratings; ++g) {
    const double cx = rng.uniform(0.1, 0.9) * width, cy = rng.uniform(0.1, 0.9) * height;
    const double radius = rng.uniform(0.12, 0.3) * std::min(width, height);
    const double theta = rng.uniform(0.0, 3.14159265358979);
    const double freq = rng.uniform(0.15, 0.45);  // cycles per pixel
    const double amp = rng.uniform(0.15, 0.35);
    const double dx = std::cos(theta), dy = std::sin(theta);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const double r = std::hypot(x - cx, y - cy);
        if (r >= radius) continue;
        const double fade = smoothstep(1.0 - r / radius);
        const double s = std::sin(6.283185307179586 * freq * ((x - cx) * dx + (y - cy) * dy));
        for (int c = 0; c < 3; ++c) img.at(c, y, x) += amp * fade * s;
      }
  }

  // hard-edged rectangles and discs (anti-aliasing comes from the later
  // degradation, edges stay sharp here on purpose)
  const int n_shapes = 3 + int(rng.below(4));
  for (int sidx = 0; sidx < n_shapes; ++sidx) {
    const bool disc = rng.uniform() < 0.5;
    const double cx = rng.uniform(0.05, 0.95) * width, cy = rng.uniform(0.05, 0.95) * height;
    const double sz = rng.uniform(0.05, 0.2) * std::min(width, height);
    double col[3];
    for (int c = 0; c < 3; ++c) col[c] = rng.uniform();
    const double alpha = rng.uniform(0.5, 0.95);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const bool inside = disc ? (std::hypot(x - cx, y - cy) < sz)
                                 : (std::abs(x - cx) < sz && std::abs(y - cy) < 0.7 * sz);
        if (!inside) continue;
        for (int c = 0; c < 3; ++c)
          img.at(c, y, x) = (1 - alpha) * img.at(c, y, x) + alpha * col[c];
      }
  }

  // a few thin lines
  const int n_lines = 2 + int(rng.below(3));
  for (int li = 0; li < n_lines; ++li) {
    const double x0 = rng.uniform() * width, y0 = rng.uniform() * height;
    const double theta = rng.uniform(0.0, 3.14159265358979);
    const double len = rng.uniform(0.2, 0.6) * std::min(width, height);
    const double lum = rng.uniform();
    const double dx = std::cos(theta), dy = std::sin(theta);
    for (double t = -len / 2; t <= len / 2; t += 0.5) {
      const int x = int(std::lround(x0 + t * dx)), y = int(std::lround(y0 + t * dy));
      if (x < 0 || y < 0 || x >= width || y >= height) continue;
      for (int c = 0; c < 3; ++c) img.at(c, y, x) = lum;
    }
  }

  return clamp_image(img);
}

Image make_constant(int channels, int height, int width, double value) {
  return make_image(channels, height, width, value);
}

Image make_horizontal_ramp(int height, int width) {
  Image img = make_image(1, height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) img.at(0, y, x) = width > 1 ? double(x) / (width - 1) : 0.0;
  return img;
}

Image make_checkerboard(int height, int width, int period) {
  if (period < 1) throw Error::invalid_parameter("make_checkerboard: period < 1");
  Image img = make_image(1, height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      img.at(0, y, x) = ((x / period + y / period) % 2 == 0) ? 1.0 : 0.0;
  return img;
}

Image make_zone_plate(int height, int width) {
  Image img = make_image(1, height, width);
  const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;
  const double km = 0.7 * 3.14159265358979 / std::max(1.0, std::hypot(cx, cy));
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      img.at(0, y, x) = 0.5 + 0.5 * std::cos(km * r2 / 2.0);
    }
  return img;
}

Image make_impulse(int height, int width) {
  Image img = make_image(1, height, width);
  img.at(0, height / 2, width / 2) = 1.0;
  return img;
}

}  // namespace ikc
