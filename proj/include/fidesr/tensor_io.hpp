#ifndef FIDESR_TENSOR_IO_HPP
#define FIDESR_TENSOR_IO_HPP

#include <cstddef>
#include <filesystem>
#include <vector>

#include "fidesr/tensor.hpp"

namespace fidesr {

// FT32 tensor file format, bit-exact:
//   4 magic bytes 'F' 'T' '3' '2'
//   u8 version (currently 1)
//   u8 rank (2..4)
//   rank x u32 little-endian extents
//   payload: row-major float32 little-endian values
void tensor_write_ft32(const Tensor& t, const std::filesystem::path& path);
Tensor tensor_read_ft32(const std::filesystem::path& path);

/// 8-bit image with samples scaled to [0,1]. Interleaved row-major storage.
struct PixelImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 1;  // 1 (gray) or 3 (RGB)
    std::vector<float> samples;

    float& at(std::size_t y, std::size_t x, std::size_t c) {
        return samples[(y * width + x) * channels + c];
    }
    float at(std::size_t y, std::size_t x, std::size_t c) const {
        return samples[(y * width + x) * channels + c];
    }
};

// PNG read/write restricted to 8-bit grayscale and RGB; anything else is a
// format error. Read maps bytes by v/255; write rounds half up and clamps.
PixelImage image_read_png(const std::filesystem::path& path);
void image_write_png(const PixelImage& img, const std::filesystem::path& path);

/// Planar C x H x W tensor from an image, and back (values clamped to [0,1]).
Tensor image_to_tensor(const PixelImage& img);
PixelImage image_from_tensor(const Tensor& t);

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B. A 1-channel input passes
/// through as a plane copy.
Tensor to_gray(const Tensor& img);

/// Writes bytes to a temp file and renames into place.
void write_file_atomic(const std::filesystem::path& path,
                       const void* data, std::size_t size);

}  // namespace fidesr

#endif
