// Minimal PNG codec: 8-bit grayscale and RGB, no interlacing. zlib handles
// the IDAT stream; filtering is done here.

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "fidesr/error.hpp"
#include "fidesr/tensor_io.hpp"

namespace fidesr {

namespace {

constexpr unsigned char kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

std::uint32_t be32(const unsigned char* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) |
           (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>(v & 0xff));
}

void append_chunk(std::vector<unsigned char>& out, const char type[4],
                  const unsigned char* data, std::size_t len) {
    put_be32(out, static_cast<std::uint32_t>(len));
    const std::size_t type_pos = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data, data + len);
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, out.data() + type_pos, static_cast<uInt>(4 + len));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a);
    const int pb = std::abs(p - b);
    const int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

void unfilter_rows(std::vector<unsigned char>& raw, std::size_t height,
                   std::size_t row_bytes, std::size_t bpp, const std::string& path) {
    std::vector<unsigned char> prev(row_bytes, 0);
    for (std::size_t y = 0; y < height; ++y) {
        unsigned char* row = raw.data() + y * (row_bytes + 1);
        const unsigned char filter = row[0];
        unsigned char* cur = row + 1;
        switch (filter) {
            case 0:
                break;
            case 1:
                for (std::size_t i = bpp; i < row_bytes; ++i) cur[i] += cur[i - bpp];
                break;
            case 2:
                for (std::size_t i = 0; i < row_bytes; ++i) cur[i] += prev[i];
                break;
            case 3:
                for (std::size_t i = 0; i < row_bytes; ++i) {
                    const int left = i >= bpp ? cur[i - bpp] : 0;
                    cur[i] += static_cast<unsigned char>((left + prev[i]) / 2);
                }
                break;
            case 4:
                for (std::size_t i = 0; i < row_bytes; ++i) {
                    const int left = i >= bpp ? cur[i - bpp] : 0;
                    const int upleft = i >= bpp ? prev[i - bpp] : 0;
                    cur[i] += static_cast<unsigned char>(paeth(left, prev[i], upleft));
                }
                break;
            default:
                throw FormatError("bad PNG filter type: " + path);
        }
        std::memcpy(prev.data(), cur, row_bytes);
    }
}

}  // namespace

PixelImage image_read_png(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());

    if (buf.size() < 8 || std::memcmp(buf.data(), kSignature, 8) != 0)
        throw FormatError("not a PNG file: " + path.string());

    std::size_t width = 0, height = 0, channels = 0;
    bool have_ihdr = false, have_iend = false;
    std::vector<unsigned char> idat;

    std::size_t pos = 8;
    while (pos + 12 <= buf.size() && !have_iend) {
        const std::uint32_t len = be32(buf.data() + pos);
        if (pos + 12 + len > buf.size())
            throw FormatError("truncated PNG chunk: " + path.string());
        const unsigned char* type = buf.data() + pos + 4;
        const unsigned char* data = buf.data() + pos + 8;

        uLong crc = crc32(0L, Z_NULL, 0);
        crc = crc32(crc, type, static_cast<uInt>(4 + len));
        if (static_cast<std::uint32_t>(crc) != be32(data + len))
            throw FormatError("PNG chunk CRC mismatch: " + path.string());

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw FormatError("bad IHDR length: " + path.string());
            width = be32(data);
            height = be32(data + 4);
            const unsigned bit_depth = data[8];
            const unsigned color_type = data[9];
            if (data[10] != 0 || data[11] != 0)
                throw FormatError("unsupported PNG compression/filter method: " +
                                  path.string());
            if (data[12] != 0)
                throw FormatError("interlaced PNG not supported: " + path.string());
            if (bit_depth != 8)
                throw FormatError("unsupported PNG bit depth " +
                                  std::to_string(bit_depth) + ": " + path.string());
            if (color_type == 0)
                channels = 1;
            else if (color_type == 2)
                channels = 3;
            else
                throw FormatError("unsupported PNG color type " +
                                  std::to_string(color_type) +
                                  " (only 8-bit gray/RGB): " + path.string());
            if (width == 0 || height == 0)
                throw FormatError("zero PNG dimension: " + path.string());
            have_ihdr = true;
        } else if (std::memcmp(type, "PLTE", 4) == 0) {
            throw FormatError("palette PNG not supported: " + path.string());
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            have_iend = true;
        }
        // ancillary chunks are skipped
        pos += 12 + len;
    }
    if (!have_ihdr || !have_iend || idat.empty())
        throw FormatError("incomplete PNG stream: " + path.string());

    const std::size_t row_bytes = width * channels;
    const std::size_t raw_size = (row_bytes + 1) * height;
    std::vector<unsigned char> raw(raw_size);
    uLongf dest_len = static_cast<uLongf>(raw_size);
    const int rc = uncompress(raw.data(), &dest_len, idat.data(),
                              static_cast<uLong>(idat.size()));
    if (rc != Z_OK || dest_len != raw_size)
        throw FormatError("PNG inflate failed: " + path.string());

    unfilter_rows(raw, height, row_bytes, channels, path.string());

    PixelImage img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.samples.resize(width * height * channels);
    for (std::size_t y = 0; y < height; ++y) {
        const unsigned char* row = raw.data() + y * (row_bytes + 1) + 1;
        for (std::size_t i = 0; i < row_bytes; ++i)
            img.samples[y * row_bytes + i] = static_cast<float>(row[i]) / 255.0f;
    }
    return img;
}

void image_write_png(const PixelImage& img, const std::filesystem::path& path) {
    if (img.channels != 1 && img.channels != 3)
        throw ShapeError("PNG write expects 1 or 3 channels");
    if (img.width == 0 || img.height == 0 ||
        img.samples.size() != img.width * img.height * img.channels)
        throw ShapeError("PNG write: inconsistent image dimensions");

    const std::size_t row_bytes = img.width * img.channels;
    std::vector<unsigned char> raw((row_bytes + 1) * img.height);
    for (std::size_t y = 0; y < img.height; ++y) {
        unsigned char* row = raw.data() + y * (row_bytes + 1);
        row[0] = 0;  // filter: none
        for (std::size_t i = 0; i < row_bytes; ++i) {
            const float v = img.samples[y * row_bytes + i];
            float scaled = std::floor(v * 255.0f + 0.5f);  // round half up
            if (scaled < 0.0f) scaled = 0.0f;
            if (scaled > 255.0f) scaled = 255.0f;
            row[1 + i] = static_cast<unsigned char>(scaled);
        }
    }

    uLongf comp_cap = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> comp(comp_cap);
    if (compress2(comp.data(), &comp_cap, raw.data(), static_cast<uLong>(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        throw IoError("PNG deflate failed: " + path.string());
    comp.resize(comp_cap);

    std::vector<unsigned char> out;
    out.insert(out.end(), kSignature, kSignature + 8);

    unsigned char ihdr[13];
    ihdr[0] = static_cast<unsigned char>((img.width >> 24) & 0xff);
    ihdr[1] = static_cast<unsigned char>((img.width >> 16) & 0xff);
    ihdr[2] = static_cast<unsigned char>((img.width >> 8) & 0xff);
    ihdr[3] = static_cast<unsigned char>(img.width & 0xff);
    ihdr[4] = static_cast<unsigned char>((img.height >> 24) & 0xff);
    ihdr[5] = static_cast<unsigned char>((img.height >> 16) & 0xff);
    ihdr[6] = static_cast<unsigned char>((img.height >> 8) & 0xff);
    ihdr[7] = static_cast<unsigned char>(img.height & 0xff);
    ihdr[8] = 8;  // bit depth
    ihdr[9] = img.channels == 1 ? 0 : 2;
    ihdr[10] = 0;
    ihdr[11] = 0;
    ihdr[12] = 0;
    append_chunk(out, "IHDR", ihdr, 13);
    append_chunk(out, "IDAT", comp.data(), comp.size());
    append_chunk(out, "IEND", nullptr, 0);

    write_file_atomic(path, out.data(), out.size());
}

}  // namespace fidesr
