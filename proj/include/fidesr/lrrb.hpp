#ifndef FIDESR_LRRB_HPP
#define FIDESR_LRRB_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "fidesr/tensor.hpp"

namespace fidesr::lrrb {

// Residual refinement in latent space: a small dense-block network maps
// concat(z_L, r) to a correction delta_r, with r' = r + delta_r and
// z_r = z_L - r'. The final projection starts at zero, so an untrained
// block reproduces plain residual subtraction bit for bit.

/// Same-padding convolution parameters; k is 1 or 3, padding (k-1)/2 zeros.
struct Conv2dParams {
    Tensor weight;            // rank-4: out x in x k x k
    std::vector<float> bias;  // out

    std::size_t out_channels() const { return weight.dim(0); }
    std::size_t in_channels() const { return weight.dim(1); }
    std::size_t ksize() const { return weight.dim(2); }
};

Conv2dParams conv2d_make(std::size_t out_ch, std::size_t in_ch, std::size_t k,
                         float fill = 0.0f);

/// Cross-correlation with zero same-padding plus bias.
Tensor conv2d_forward(const Tensor& x, const Conv2dParams& p);

struct Conv2dGrads {
    Tensor x;
    Tensor weight;
    std::vector<float> bias;
};

/// Exact analytic gradients of conv2d_forward.
Conv2dGrads conv2d_backward(const Tensor& x, const Conv2dParams& p,
                            const Tensor& grad_out);

/// Four 3x3 convolutions with dense skip concatenation (growth width G),
/// LeakyReLU activations, a 1x1 fusion back to width F, and a scaled
/// residual connection.
struct DenseBlockParams {
    std::vector<Conv2dParams> layers;  // 4 conv3x3
    Conv2dParams fuse;                 // 1x1
    float residual_scale = 0.2f;
    float slope = 0.2f;
};

Tensor dense_block_forward(const Tensor& x, const DenseBlockParams& p);

struct LrrbConfig {
    std::size_t latent_channels = 4;
    std::size_t feature_width = 32;  // F
    std::size_t growth = 16;         // G
    std::size_t num_blocks = 2;
    float residual_scale = 0.2f;
    float leaky_slope = 0.2f;
    std::uint64_t seed = 0;
};

struct LrrbParams {
    LrrbConfig cfg;
    Conv2dParams conv_in;  // 2C -> F, 1x1
    std::vector<DenseBlockParams> blocks;
    Conv2dParams conv_out;  // F -> C, 1x1, zero-initialized
};

/// Seeded init: weights uniform in [-0.05, 0.05] except the zeroed final
/// projection; all biases zero.
LrrbParams lrrb_init(const LrrbConfig& cfg);

/// Shape-copy with all values zero (gradient accumulator).
LrrbParams lrrb_zeros_like(const LrrbParams& p);

/// Pointers to every scalar parameter in a fixed order (conv_in, blocks in
/// order with layers then fuse, conv_out; weights before biases).
std::vector<float*> lrrb_param_view(LrrbParams& p);

Tensor lrrb_forward(const Tensor& z_l, const Tensor& r, const LrrbParams& p);

/// MSE against target_delta plus full backprop. Gradients are accumulated
/// into *grads when non-null. Returns the loss.
double lrrb_loss_and_grad(const LrrbParams& p, const Tensor& z_l, const Tensor& r,
                          const Tensor& target_delta, LrrbParams* grads);

struct RefinementState {
    Tensor z_l;
    Tensor r;
    Tensor delta_r;
    Tensor r_prime;  // r + delta_r
    Tensor z_r;      // z_l - r_prime
};

RefinementState refine(const Tensor& z_l, const Tensor& r, const LrrbParams& p);

struct ToySample {
    Tensor z_l;
    Tensor r;
    Tensor target;  // box_blur3(r) - r per channel
};

/// Seeded synthetic task: random latents/residuals, target equal to a fixed
/// 3x3 blur of r minus r.
std::vector<ToySample> make_toy_dataset(std::size_t count, std::size_t channels,
                                        std::size_t h, std::size_t w,
                                        std::uint64_t seed);

struct TrainResult {
    std::vector<double> losses;  // size steps + 1; front is the initial loss
};

/// Full-batch gradient descent on the dataset MSE. Throws DivergenceError
/// (with the step index) if the loss goes non-finite.
TrainResult lrrb_train_toy(const std::vector<ToySample>& data, LrrbParams& p,
                           std::size_t steps, double lr);

// Directory layout: manifest.txt plus FT32 tensors conv_in.w, conv_in.b,
// block{i}.layer{j}.w/.b, block{i}.fuse.w/.b, conv_out.w, conv_out.b
// (biases stored as rank-2 [n, 1]).
void lrrb_save(const LrrbParams& p, const std::filesystem::path& dir);
LrrbParams lrrb_load(const std::filesystem::path& dir);

}  // namespace fidesr::lrrb

#endif
