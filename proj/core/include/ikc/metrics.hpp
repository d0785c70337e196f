#pragma once

#include "ikc/image.hpp"

namespace ikc {

// 10*log10(1 / MSE) over all channels and pixels, inputs in [0,1].
// Identical images return +infinity.
double psnr(const Image& a, const Image& b);

// Mean local SSIM, 11x11 Gaussian window with sigma 1.5, K1 = 0.01,
// K2 = 0.03, dynamic range 1.0, averaged over channels. Windows are fully
// contained in the image (no padding).
double ssim(const Image& a, const Image& b);

// Mean squared response of the 3x3 Laplacian over the interior; a scalar
// sharpness proxy (higher = sharper / more ringing).
double mean_squared_laplacian(const Image& img);

}  // namespace ikc
