#pragma once

#include "ikc/image.hpp"
#include "ikc/rng.hpp"

namespace ikc {

// Procedural RGB test images: multi-octave value noise layered with random
// anti-aliased shapes, oriented gratings and line segments. Rich in edges
// and texture across the frequency range, deterministic in the seed.
Image make_toy_image(int height, int width, uint64_t seed);

// Deterministic structured fixtures.
Image make_constant(int channels, int height, int width, double value);
Image make_horizontal_ramp(int height, int width);
Image make_checkerboard(int height, int width, int period);
Image make_zone_plate(int height, int width);
Image make_impulse(int height, int width);

}  // namespace ikc
