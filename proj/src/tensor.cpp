#include "fidesr/tensor.hpp"

#include <string>

#include "fidesr/error.hpp"
#include "fidesr/kernels.hpp"

namespace fidesr {

namespace {

void validate_shape(std::span<const std::size_t> shape) {
    if (shape.size() < 2 || shape.size() > 4)
        throw ShapeError("tensor rank must be 2, 3 or 4, got " +
                         std::to_string(shape.size()));
    for (std::size_t d : shape)
        if (d == 0) throw ShapeError("tensor extents must be positive");
}

void require_same_shape(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw ShapeError("tensor shape mismatch");
}

}  // namespace

Tensor::Tensor(std::span<const std::size_t> shape, float fill) {
    validate_shape(shape);
    shape_.assign(shape.begin(), shape.end());
    std::size_t n = 1;
    for (std::size_t d : shape_) n *= d;
    data_.assign(n, fill);
}

Tensor::Tensor(std::initializer_list<std::size_t> shape, float fill)
    : Tensor(std::span<const std::size_t>(shape.begin(), shape.size()), fill) {}

std::span<float> Tensor::channel(std::size_t c) {
    const std::size_t plane = shape_[1] * shape_[2];
    return {data_.data() + c * plane, plane};
}

std::span<const float> Tensor::channel(std::size_t c) const {
    const std::size_t plane = shape_[1] * shape_[2];
    return {data_.data() + c * plane, plane};
}

Tensor Tensor::channel_plane(std::size_t c) const {
    Tensor out({shape_[1], shape_[2]});
    auto src = channel(c);
    std::copy(src.begin(), src.end(), out.data());
    return out;
}

Tensor tensor_new(std::span<const std::size_t> shape, float fill) {
    return Tensor(shape, fill);
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b);
    Tensor out(a.shape());
    kernels::table().add(a.data(), b.data(), out.data(), a.numel());
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b);
    Tensor out(a.shape());
    kernels::table().sub(a.data(), b.data(), out.data(), a.numel());
    return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b);
    Tensor out(a.shape());
    kernels::table().mul(a.data(), b.data(), out.data(), a.numel());
    return out;
}

Tensor scale(const Tensor& a, float s) {
    Tensor out(a.shape());
    kernels::table().scale(a.data(), s, out.data(), a.numel());
    return out;
}

Tensor clamp01(const Tensor& a) {
    Tensor out = a;
    for (float& v : out.values()) v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    return out;
}

double sum(const Tensor& a) { return kernels::table().sum(a.data(), a.numel()); }

double mean(const Tensor& a) { return sum(a) / static_cast<double>(a.numel()); }

float min_value(const Tensor& a) {
    float lo, hi;
    kernels::table().min_max(a.data(), a.numel(), &lo, &hi);
    return lo;
}

float max_value(const Tensor& a) {
    float lo, hi;
    kernels::table().min_max(a.data(), a.numel(), &lo, &hi);
    return hi;
}

float max_abs(const Tensor& a) {
    float lo, hi;
    kernels::table().min_max(a.data(), a.numel(), &lo, &hi);
    const float alo = lo < 0.0f ? -lo : lo;
    const float ahi = hi < 0.0f ? -hi : hi;
    return alo > ahi ? alo : ahi;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    if (a.rank() != 3 || b.rank() != 3)
        throw ShapeError("concat_channels expects rank-3 tensors");
    if (a.dim(1) != b.dim(1) || a.dim(2) != b.dim(2))
        throw ShapeError("concat_channels spatial dims mismatch");
    Tensor out({a.dim(0) + b.dim(0), a.dim(1), a.dim(2)});
    std::copy(a.values().begin(), a.values().end(), out.data());
    std::copy(b.values().begin(), b.values().end(), out.data() + a.numel());
    return out;
}

}  // namespace fidesr
