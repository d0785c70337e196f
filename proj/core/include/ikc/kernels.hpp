#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "ikc/tensor.hpp"

namespace ikc {

// l x l blur kernel: nonnegative weights summing to one.
struct BlurKernel {
  int size_l = 0;
  TensorT<double> values;  // shape {l, l}, row-major

  double at(int y, int x) const { return values.data[size_t(y) * size_l + size_t(x)]; }
  double& at(int y, int x) { return values.data[size_t(y) * size_l + size_t(x)]; }
};

enum class CodeRepresentation { pca, width_scalar };

// Reduced kernel representation: either a PCA projection of the flattened
// kernel or the raw Gaussian width in the one-dimensional ablation mode.
struct KernelCode {
  std::vector<double> values;
  CodeRepresentation representation = CodeRepresentation::pca;

  int dim() const { return int(values.size()); }
};

// Orthonormal PCA basis over the flattened kernel family, plus the mean
// kernel. Immutable after fitting. `code_lo/code_hi` is the axis-aligned
// bounding box of codes over the fitted width range (derived data, not
// stored in the codec file).
struct PcaCodec {
  int b = 0;
  int l2 = 0;
  Eigen::MatrixXd reduction;  // b x l2, orthonormal rows
  Eigen::VectorXd mean;       // l2
  double width_min = 0.0;
  double width_max = 0.0;
  Eigen::VectorXd code_lo;  // b
  Eigen::VectorXd code_hi;  // b

  int size_l() const;
};

// Isotropic Gaussian kernel sampled on an odd l x l grid, normalized to unit
// sum. Requires sigma > 0 and odd size_l >= 3.
BlurKernel gaussian_kernel(double sigma, int size_l);

// Delta kernel (1 at the center), the identity element of blurring.
BlurKernel delta_kernel(int size_l);

// The eight benchmark kernels for a scale factor: widths evenly spaced over
// the published per-scale range, endpoints inclusive.
std::vector<BlurKernel> gaussian8(int scale, int size_l);
std::vector<double> gaussian8_widths(int scale);

// Per-scale training width ranges {min, max}.
std::pair<double, double> training_width_range(int scale);

// Fits the PCA basis to isotropic Gaussian kernels at the given widths.
// b must not exceed the number of distinct widths nor l^2.
PcaCodec fit_pca(const std::vector<double>& sample_widths, int size_l, int b);

// Convenience: fit on a uniform width grid with 1e-2 granularity.
PcaCodec fit_pca_range(double width_min, double width_max, int size_l, int b);

KernelCode encode(const PcaCodec& codec, const BlurKernel& k);

// Linear reconstruction reduction^T * h + mean. Not guaranteed nonnegative
// or unit-sum; inspection/diagnostics only.
TensorT<double> decode(const PcaCodec& codec, const KernelCode& h);

// Max |decode(encode(k)) - k| over entries.
double round_trip_error(const PcaCodec& codec, const BlurKernel& k);

// ---- binary file formats -------------------------------------------------
// kernel: "IKCK", u32 little-endian side length l, then l^2 f32 row-major.
// codec:  "IKCP", u32 b, u32 l^2, reduction row-major f32, mean f32,
//         then {width_min, width_max} as f32.
void save_kernel(const std::filesystem::path& path, const BlurKernel& k);
BlurKernel load_kernel(const std::filesystem::path& path);
void save_codec(const std::filesystem::path& path, const PcaCodec& codec);
PcaCodec load_codec(const std::filesystem::path& path);

// FNV-1a over the file bytes; used to pin checkpoints to the codec they
// were trained with.
uint64_t file_fingerprint(const std::filesystem::path& path);
std::string fingerprint_hex(uint64_t fp);

}  // namespace ikc
