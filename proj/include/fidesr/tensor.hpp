#ifndef FIDESR_TENSOR_HPP
#define FIDESR_TENSOR_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fidesr {

/// Dense row-major float32 tensor of rank 2..4. The last axis is fastest.
/// Rank 2 is an H x W map, rank 3 a C x H x W image/latent, rank 4 an
/// N x C x H x W batch. Treated as immutable once returned from a public
/// operation; safe to share across threads for reading.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::span<const std::size_t> shape, float fill = 0.0f);
    Tensor(std::initializer_list<std::size_t> shape, float fill = 0.0f);

    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_[axis]; }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t numel() const { return data_.size(); }
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    // ref-qualified: a span into a temporary would dangle
    std::span<float> values() & { return data_; }
    std::span<const float> values() const& { return data_; }
    std::span<const float> values() && = delete;

    // rank-2 access
    float& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    float at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

    // rank-3 access
    float& at(std::size_t c, std::size_t i, std::size_t j) {
        return data_[(c * shape_[1] + i) * shape_[2] + j];
    }
    float at(std::size_t c, std::size_t i, std::size_t j) const {
        return data_[(c * shape_[1] + i) * shape_[2] + j];
    }

    /// Contiguous view of one rank-3 channel plane.
    std::span<float> channel(std::size_t c);
    std::span<const float> channel(std::size_t c) const;

    /// Copies channel c of a rank-3 tensor into a rank-2 plane and back.
    Tensor channel_plane(std::size_t c) const;

private:
    std::vector<std::size_t> shape_;
    std::vector<float> data_;
};

/// Constructor alias; validates rank in {2,3,4} and extents >= 1.
Tensor tensor_new(std::span<const std::size_t> shape, float fill);

// Elementwise arithmetic. Shapes must match exactly.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, float s);
Tensor clamp01(const Tensor& a);

double sum(const Tensor& a);
double mean(const Tensor& a);
float min_value(const Tensor& a);
float max_value(const Tensor& a);
float max_abs(const Tensor& a);

/// Stacks rank-3 tensors along the channel axis. Spatial dims must agree.
Tensor concat_channels(const Tensor& a, const Tensor& b);

}  // namespace fidesr

#endif
