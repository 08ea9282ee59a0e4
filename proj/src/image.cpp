#include "fidesr/error.hpp"
#include "fidesr/tensor_io.hpp"

namespace fidesr {

Tensor image_to_tensor(const PixelImage& img) {
    Tensor t({img.channels, img.height, img.width});
    for (std::size_t c = 0; c < img.channels; ++c)
        for (std::size_t y = 0; y < img.height; ++y)
            for (std::size_t x = 0; x < img.width; ++x)
                t.at(c, y, x) = img.at(y, x, c);
    return t;
}

PixelImage image_from_tensor(const Tensor& t) {
    if (t.rank() != 3 && t.rank() != 2)
        throw ShapeError("image_from_tensor expects rank 2 or 3");
    const std::size_t channels = t.rank() == 3 ? t.dim(0) : 1;
    const std::size_t height = t.rank() == 3 ? t.dim(1) : t.dim(0);
    const std::size_t width = t.rank() == 3 ? t.dim(2) : t.dim(1);
    if (channels != 1 && channels != 3)
        throw ShapeError("image_from_tensor expects 1 or 3 channels");

    PixelImage img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.samples.resize(width * height * channels);
    for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t y = 0; y < height; ++y)
            for (std::size_t x = 0; x < width; ++x) {
                float v = t.rank() == 3 ? t.at(c, y, x) : t.at(y, x);
                v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
                img.at(y, x, c) = v;
            }
    return img;
}

Tensor to_gray(const Tensor& img) {
    if (img.rank() != 3) throw ShapeError("to_gray expects a rank-3 C x H x W tensor");
    const std::size_t c = img.dim(0);
    if (c == 1) return img.channel_plane(0);
    if (c != 3) throw ShapeError("to_gray expects 1 or 3 channels");

    Tensor out({img.dim(1), img.dim(2)});
    for (std::size_t i = 0; i < img.dim(1); ++i)
        for (std::size_t j = 0; j < img.dim(2); ++j) {
            const double v = 0.299 * img.at(0, i, j) + 0.587 * img.at(1, i, j) +
                             0.114 * img.at(2, i, j);
            out.at(i, j) = static_cast<float>(v);
        }
    return out;
}

}  // namespace fidesr
