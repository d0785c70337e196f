#pragma once

#include <filesystem>
#include <string>

#include "ikc/tensor.hpp"

namespace ikc {

// Images are CHW doubles in [0,1], 1 or 3 channels. 8-bit PNG at the
// boundary: the loader scales by 1/255, the writer rounds half-up.
using Image = TensorT<double>;

Image load_png(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const Image& img);

Image make_image(int channels, int height, int width, double fill = 0.0);

Image clamp_image(const Image& img);

// Crop [y0, y0+h) x [x0, x0+w). Out-of-bounds rectangles throw.
Image crop(const Image& img, int y0, int x0, int h, int w);

// Largest centered crop whose sides are divisible by `multiple`.
Image center_crop_to_multiple(const Image& img, int multiple);

Image flip_horizontal(const Image& img);
Image rotate90(const Image& img, int quarter_turns);

// Mean over all channels and pixels.
double image_mean(const Image& img);

TensorT<float> to_float(const Image& img);
Image to_image(const TensorT<float>& t);

}  // namespace ikc
