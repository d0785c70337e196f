#include "ikc/image.hpp"

namespace ikc {

const char* version() {
#ifdef IKC_VERSION
  return IKC_VERSION;
#else
  return "dev";
#endif
}

Image make_image(int channels, int height, int width, double fill) {
  if (channels < 1 || height < 1 || width < 1)
    throw Error::invalid_parameter("make_image: non-positive dimensions");
  Image img({channels, height, width});
  if (fill != 0.0) img.fill(fill);
  return img;
}

Image clamp_image(const Image& img) {
  Image out = img;
  for (auto& v : out.data) v = clamp01(v);
  return out;
}

Image crop(const Image& img, int y0, int x0, int h, int w) {
  if (y0 < 0 || x0 < 0 || h < 1 || w < 1 || y0 + h > img.height() || x0 + w > img.width())
    throw Error::invalid_parameter("crop: rectangle out of bounds");
  Image out({img.channels(), h, w});
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, y0 + y, x0 + x);
  return out;
}

Image center_crop_to_multiple(const Image& img, int multiple) {
  if (multiple < 1) throw Error::invalid_parameter("center_crop_to_multiple: multiple < 1");
  const int h = (img.height() / multiple) * multiple;
  const int w = (img.width() / multiple) * multiple;
  if (h < 1 || w < 1) throw Error::invalid_parameter("image smaller than requested multiple");
  return crop(img, (img.height() - h) / 2, (img.width() - w) / 2, h, w);
}

Image flip_horizontal(const Image& img) {
  Image out({img.channels(), img.height(), img.width()});
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        out.at(c, y, x) = img.at(c, y, img.width() - 1 - x);
  return out;
}

Image rotate90(const Image& img, int quarter_turns) {
  int q = ((quarter_turns % 4) + 4) % 4;
  if (q == 0) return img;
  const int h = img.height(), w = img.width();
  // one counter-clockwise quarter turn: out(y, x) = in(x, w-1-y), out is w x h
  Image out({img.channels(), w, h});
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < w; ++y)
      for (int x = 0; x < h; ++x) out.at(c, y, x) = img.at(c, x, w - 1 - y);
  return q == 1 ? out : rotate90(out, q - 1);
}

double image_mean(const Image& img) {
  double s = 0.0;
  for (double v : img.data) s += v;
  return img.numel() ? s / double(img.numel()) : 0.0;
}

TensorT<float> to_float(const Image& img) { return img.cast<float>(); }

Image to_image(const TensorT<float>& t) { return t.cast<double>(); }

}  // namespace ikc
