#include "ikc/kernels.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>

namespace ikc {

namespace {

void check_kernel_size(int size_l) {
  if (size_l < 3 || size_l % 2 == 0)
    throw Error::invalid_parameter("kernel size must be odd and >= 3, got " +
                                   std::to_string(size_l));
}

Eigen::VectorXd flatten(const BlurKernel& k) {
  return Eigen::Map<const Eigen::VectorXd>(k.values.data.data(), k.size_l * k.size_l);
}

// Codes of the in-range width family, used to derive the code bounding box.
void compute_code_bounds(PcaCodec& codec) {
  const int l = codec.size_l();
  codec.code_lo = Eigen::VectorXd::Zero(codec.b);
  codec.code_hi = Eigen::VectorXd::Zero(codec.b);
  if (codec.width_max < codec.width_min || codec.width_min <= 0.0) return;
  bool first = true;
  for (double w = codec.width_min; w <= codec.width_max + 1e-9; w += 1e-2) {
    const KernelCode h = encode(codec, gaussian_kernel(w, l));
    for (int i = 0; i < codec.b; ++i) {
      if (first || h.values[size_t(i)] < codec.code_lo[i]) codec.code_lo[i] = h.values[size_t(i)];
      if (first || h.values[size_t(i)] > codec.code_hi[i]) codec.code_hi[i] = h.values[size_t(i)];
    }
    first = false;
  }
}

// Little-endian scalar IO. The formats are defined byte-exact.
template <typename T>
void write_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
  std::reverse(buf, buf + sizeof(T));
#endif
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!is) throw Error::io("unexpected end of file");
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
  std::reverse(buf, buf + sizeof(T));
#endif
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

void expect_magic(std::istream& is, const char* magic, const char* what) {
  char buf[4];
  is.read(buf, 4);
  if (!is || std::memcmp(buf, magic, 4) != 0)
    throw Error::io(std::string("bad magic, not a ") + what + " file");
}

}  // namespace

int PcaCodec::size_l() const { return int(std::lround(std::sqrt(double(l2)))); }

BlurKernel gaussian_kernel(double sigma, int size_l) {
  if (!(sigma > 0.0)) throw Error::invalid_parameter("gaussian_kernel: sigma must be > 0");
  check_kernel_size(size_l);

  // Separable construction: the 2-D kernel is the outer product of the 1-D
  // profile with itself, which keeps the dihedral symmetry exact.
  const int c = (size_l - 1) / 2;
  std::vector<double> g(size_t(size_l));
  for (int i = 0; i < size_l; ++i) {
    const double d = double(i - c);
    g[size_t(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
  }
  BlurKernel k;
  k.size_l = size_l;
  k.values = TensorT<double>({size_l, size_l});
  double sum = 0.0;
  for (int y = 0; y < size_l; ++y)
    for (int x = 0; x < size_l; ++x) {
      const double v = g[size_t(y)] * g[size_t(x)];
      k.at(y, x) = v;
      sum += v;
    }
  for (auto& v : k.values.data) v /= sum;
  return k;
}

BlurKernel delta_kernel(int size_l) {
  check_kernel_size(size_l);
  BlurKernel k;
  k.size_l = size_l;
  k.values = TensorT<double>({size_l, size_l});
  k.at((size_l - 1) / 2, (size_l - 1) / 2) = 1.0;
  return k;
}

std::vector<double> gaussian8_widths(int scale) {
  double lo = 0.0, hi = 0.0;
  switch (scale) {
    case 2: lo = 0.80; hi = 1.60; break;
    case 3: lo = 1.35; hi = 2.40; break;
    case 4: lo = 1.80; hi = 3.20; break;
    default:
      throw Error::invalid_parameter("gaussian8: scale must be 2, 3 or 4");
  }
  std::vector<double> widths(8);
  for (int i = 0; i < 8; ++i) widths[size_t(i)] = lo + (hi - lo) * double(i) / 7.0;
  return widths;
}

std::vector<BlurKernel> gaussian8(int scale, int size_l) {
  std::vector<BlurKernel> out;
  for (double w : gaussian8_widths(scale)) out.push_back(gaussian_kernel(w, size_l));
  return out;
}

std::pair<double, double> training_width_range(int scale) {
  switch (scale) {
    case 2: return {0.2, 2.0};
    case 3: return {0.2, 3.0};
    case 4: return {0.2, 4.0};
    default:
      throw Error::invalid_parameter("training_width_range: scale must be 2, 3 or 4");
  }
}

PcaCodec fit_pca(const std::vector<double>& sample_widths, int size_l, int b) {
  check_kernel_size(size_l);
  const int l2 = size_l * size_l;
  if (b < 1) throw Error::invalid_parameter("fit_pca: b must be >= 1");
  if (b > l2) throw Error::invalid_parameter("fit_pca: b exceeds kernel dimension");
  if (sample_widths.empty()) throw Error::no_data("fit_pca: no sample widths");

  std::set<int64_t> distinct;
  for (double w : sample_widths) distinct.insert(int64_t(std::llround(w * 1e12)));
  if (size_t(b) > distinct.size())
    throw Error::degenerate_basis("fit_pca: b exceeds the rank of the sample set (" +
                                  std::to_string(distinct.size()) + " distinct widths)");

  const int n = int(sample_widths.size());
  Eigen::MatrixXd x(n, l2);
  for (int i = 0; i < n; ++i) x.row(i) = flatten(gaussian_kernel(sample_widths[size_t(i)], size_l));

  PcaCodec codec;
  codec.b = b;
  codec.l2 = l2;
  codec.mean = x.colwise().mean().transpose();
  codec.width_min = *std::min_element(sample_widths.begin(), sample_widths.end());
  codec.width_max = *std::max_element(sample_widths.begin(), sample_widths.end());

  Eigen::MatrixXd centered = x.rowwise() - codec.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  codec.reduction = svd.matrixV().leftCols(b).transpose();

  // Degenerate single-sample family: the centered matrix is zero and SVD
  // directions are arbitrary. Use the kernel direction itself so the basis
  // is well defined and reconstruction of the sample stays exact.
  if (distinct.size() == 1) {
    Eigen::VectorXd d = x.row(0).transpose();
    codec.reduction.row(0) = d.normalized().transpose();
  }

  // Deterministic sign convention: the largest-magnitude entry of each
  // principal direction is positive.
  for (int r = 0; r < b; ++r) {
    int idx = 0;
    codec.reduction.row(r).cwiseAbs().maxCoeff(&idx);
    if (codec.reduction(r, idx) < 0.0) codec.reduction.row(r) = -codec.reduction.row(r);
  }

  compute_code_bounds(codec);
  return codec;
}

PcaCodec fit_pca_range(double width_min, double width_max, int size_l, int b) {
  if (!(width_min > 0.0) || width_max < width_min)
    throw Error::invalid_parameter("fit_pca_range: bad width range");
  std::vector<double> widths;
  for (double w = width_min; w <= width_max + 1e-9; w += 1e-2) widths.push_back(w);
  return fit_pca(widths, size_l, b);
}

KernelCode encode(const PcaCodec& codec, const BlurKernel& k) {
  if (k.size_l * k.size_l != codec.l2)
    throw Error::invalid_parameter("encode: kernel size does not match codec");
  KernelCode h;
  h.representation = CodeRepresentation::pca;
  Eigen::VectorXd code = codec.reduction * (flatten(k) - codec.mean);
  h.values.assign(code.data(), code.data() + code.size());
  return h;
}

TensorT<double> decode(const PcaCodec& codec, const KernelCode& h) {
  if (h.representation != CodeRepresentation::pca)
    throw Error::invalid_parameter("decode: code is not a PCA code");
  if (h.dim() != codec.b) throw Error::invalid_parameter("decode: code length does not match b");
  const Eigen::Map<const Eigen::VectorXd> v(h.values.data(), h.dim());
  Eigen::VectorXd rec = codec.reduction.transpose() * v + codec.mean;
  const int l = codec.size_l();
  TensorT<double> out({l, l});
  std::copy(rec.data(), rec.data() + rec.size(), out.data.begin());
  return out;
}

double round_trip_error(const PcaCodec& codec, const BlurKernel& k) {
  const TensorT<double> rec = decode(codec, encode(codec, k));
  double err = 0.0;
  for (size_t i = 0; i < rec.data.size(); ++i)
    err = std::max(err, std::abs(rec.data[i] - k.values.data[i]));
  return err;
}

void save_kernel(const std::filesystem::path& path, const BlurKernel& k) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error::io("cannot open for writing: " + path.string());
  os.write("IKCK", 4);
  write_le<uint32_t>(os, uint32_t(k.size_l));
  for (double v : k.values.data) write_le<float>(os, float(v));
  if (!os) throw Error::io("write failed: " + path.string());
}

BlurKernel load_kernel(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error::io("cannot open for reading: " + path.string());
  expect_magic(is, "IKCK", "kernel");
  const int l = int(read_le<uint32_t>(is));
  check_kernel_size(l);
  BlurKernel k;
  k.size_l = l;
  k.values = TensorT<double>({l, l});
  for (auto& v : k.values.data) v = double(read_le<float>(is));
  return k;
}

void save_codec(const std::filesystem::path& path, const PcaCodec& codec) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error::io("cannot open for writing: " + path.string());
  os.write("IKCP", 4);
  write_le<uint32_t>(os, uint32_t(codec.b));
  write_le<uint32_t>(os, uint32_t(codec.l2));
  for (int r = 0; r < codec.b; ++r)
    for (int c = 0; c < codec.l2; ++c) write_le<float>(os, float(codec.reduction(r, c)));
  for (int c = 0; c < codec.l2; ++c) write_le<float>(os, float(codec.mean(c)));
  write_le<float>(os, float(codec.width_min));
  write_le<float>(os, float(codec.width_max));
  if (!os) throw Error::io("write failed: " + path.string());
}

PcaCodec load_codec(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error::io("cannot open for reading: " + path.string());
  expect_magic(is, "IKCP", "codec");
  PcaCodec codec;
  codec.b = int(read_le<uint32_t>(is));
  codec.l2 = int(read_le<uint32_t>(is));
  if (codec.b < 1 || codec.l2 < 9) throw Error::io("codec file has implausible dimensions");
  codec.reduction.resize(codec.b, codec.l2);
  for (int r = 0; r < codec.b; ++r)
    for (int c = 0; c < codec.l2; ++c) codec.reduction(r, c) = double(read_le<float>(is));
  codec.mean.resize(codec.l2);
  for (int c = 0; c < codec.l2; ++c) codec.mean(c) = double(read_le<float>(is));
  codec.width_min = double(read_le<float>(is));
  codec.width_max = double(read_le<float>(is));
  compute_code_bounds(codec);
  return codec;
}

uint64_t file_fingerprint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error::io("cannot open for fingerprinting: " + path.string());
  uint64_t h = 1469598103934665603ULL;
  char buf[4096];
  while (is) {
    is.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= uint64_t(static_cast<unsigned char>(buf[i]));
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string fingerprint_hex(uint64_t fp) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[size_t(i)] = digits[fp & 0xf];
    fp >>= 4;
  }
  return s;
}

}  // namespace ikc
