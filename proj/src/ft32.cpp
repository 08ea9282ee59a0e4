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

constexpr unsigned char kMagic[4] = {'F', 'T', '3', '2'};
constexpr unsigned char kVersion = 1;

void put_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const void* data,
                       std::size_t size) {
    const std::filesystem::path tmp = path.string() + ".tmp~";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open for writing: " + tmp.string());
        f.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!f) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("rename failed: " + path.string());
    }
}

void tensor_write_ft32(const Tensor& t, const std::filesystem::path& path) {
    std::vector<unsigned char> out;
    out.reserve(6 + 4 * t.rank() + 4 * t.numel());
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    out.push_back(static_cast<unsigned char>(t.rank()));
    for (std::size_t d : t.shape()) put_u32le(out, static_cast<std::uint32_t>(d));
    for (float v : t.values()) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32le(out, bits);
    }
    write_file_atomic(path, out.data(), out.size());
}

Tensor tensor_read_ft32(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());

    if (buf.size() < 6 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw FormatError("not an FT32 file: " + path.string());
    if (buf[4] != kVersion)
        throw UnsupportedVersionError("unsupported FT32 version " +
                                      std::to_string(buf[4]) + ": " + path.string());
    const std::size_t rank = buf[5];
    if (rank < 2 || rank > 4)
        throw FormatError("invalid FT32 rank " + std::to_string(rank) + ": " +
                          path.string());
    if (buf.size() < 6 + 4 * rank)
        throw FormatError("truncated FT32 header: " + path.string());

    std::vector<std::size_t> shape(rank);
    std::size_t numel = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        const std::uint32_t d = get_u32le(buf.data() + 6 + 4 * i);
        if (d == 0) throw FormatError("zero FT32 extent: " + path.string());
        shape[i] = d;
        numel *= d;
    }

    const std::size_t payload_off = 6 + 4 * rank;
    if (buf.size() != payload_off + 4 * numel)
        throw FormatError("FT32 payload size mismatch: " + path.string());

    Tensor t(shape);
    float* dst = t.data();
    for (std::size_t i = 0; i < numel; ++i) {
        const std::uint32_t bits = get_u32le(buf.data() + payload_off + 4 * i);
        float v;
        std::memcpy(&v, &bits, 4);
        if (!std::isfinite(v))
            throw FormatError("non-finite value in FT32 payload: " + path.string());
        dst[i] = v;
    }
    return t;
}

}  // namespace fidesr
