#include "ikc/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace ikc {

namespace {

void check_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) throw Error::invalid_parameter(std::string(what) + ": shape mismatch");
}

std::vector<double> ssim_window() {
  // 11x11 Gaussian, sigma 1.5, normalized to unit sum.
  std::vector<double> w(121);
  double sum = 0.0;
  for (int y = 0; y < 11; ++y)
    for (int x = 0; x < 11; ++x) {
      const double dy = y - 5, dx = x - 5;
      w[size_t(y * 11 + x)] = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
      sum += w[size_t(y * 11 + x)];
    }
  for (auto& v : w) v /= sum;
  return w;
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  check_same_shape(a, b, "psnr");
  double se = 0.0;
  for (size_t i = 0; i < a.numel(); ++i) {
    const double d = a.data[i] - b.data[i];
    se += d * d;
  }
  const double mse = se / double(a.numel());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) {
  check_same_shape(a, b, "ssim");
  const int h = a.height(), w = a.width();
  if (h < 11 || w < 11) throw Error::invalid_parameter("ssim: image smaller than the 11x11 window");

  static const std::vector<double> win = ssim_window();
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;

  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    double acc = 0.0;
    long count = 0;
    for (int y0 = 0; y0 + 11 <= h; ++y0)
      for (int x0 = 0; x0 + 11 <= w; ++x0) {
        double mu_a = 0.0, mu_b = 0.0;
        for (int y = 0; y < 11; ++y)
          for (int x = 0; x < 11; ++x) {
            const double wv = win[size_t(y * 11 + x)];
            mu_a += wv * a.at(c, y0 + y, x0 + x);
            mu_b += wv * b.at(c, y0 + y, x0 + x);
          }
        double va = 0.0, vb = 0.0, cov = 0.0;
        for (int y = 0; y < 11; ++y)
          for (int x = 0; x < 11; ++x) {
            const double wv = win[size_t(y * 11 + x)];
            const double da = a.at(c, y0 + y, x0 + x) - mu_a;
            const double db = b.at(c, y0 + y, x0 + x) - mu_b;
            va += wv * da * da;
            vb += wv * db * db;
            cov += wv * da * db;
          }
        const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
        const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2);
        acc += num / den;
        ++count;
      }
    total += acc / double(count);
  }
  return total / double(a.channels());
}

double mean_squared_laplacian(const Image& img) {
  const int h = img.height(), w = img.width();
  if (h < 3 || w < 3) throw Error::invalid_parameter("mean_squared_laplacian: image too small");
  double acc = 0.0;
  long count = 0;
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 1; y + 1 < h; ++y)
      for (int x = 1; x + 1 < w; ++x) {
        const double v = img.at(c, y - 1, x) + img.at(c, y + 1, x) + img.at(c, y, x - 1) +
                         img.at(c, y, x + 1) - 4.0 * img.at(c, y, x);
        acc += v * v;
        ++count;
      }
  return acc / double(count);
}

}  // namespace ikc
