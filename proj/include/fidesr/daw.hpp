#ifndef FIDESR_DAW_HPP
#define FIDESR_DAW_HPP

#include <cstddef>
#include <filesystem>

#include "fidesr/tensor.hpp"

namespace fidesr::daw {

// Detail-aware weighting: turn a detail map and an error map into a
// strictly positive, mean-one weight map, and reduce spatially weighted
// losses with it.

struct DawConfig {
    double p = 0.3;              // perceptual mix fraction in [0,1]
    double alpha = 1.0;          // weighting strength >= 0
    double w_max = 2.0;          // tanh cap > 0
    std::size_t blur_radius = 3; // odd box window for the pre-tanh blur

    void validate() const;
};

DawConfig daw_config_from_file(const std::filesystem::path& path);

/// Channel-mean |x_sr - x_h| as an H x W map. Accepts rank 2 or 3 inputs.
Tensor pixel_error(const Tensor& x_sr, const Tensor& x_h);

/// quantile_norm((1-p) * e_pix + p * e_perc).
Tensor mix_error(const Tensor& e_pix, const Tensor& e_perc, double p);

/// w* = mean_norm(1 + alpha * tanh(blur(D .* E) / w_max) * w_max).
Tensor difficulty_weights(const Tensor& detail, const Tensor& error,
                          const DawConfig& cfg);

/// Mean of w .* (x_sr - x_h)^2 over all elements; the H x W weight map is
/// broadcast over channels.
double weighted_mse(const Tensor& x_sr, const Tensor& x_h, const Tensor& w);

/// Mean of resize(w) .* loss_map, with the resized weights re-normalized to
/// mean one. The loss map is an externally computed per-position loss.
double weighted_external_loss(const Tensor& loss_map, const Tensor& w);

double total_loss(double l_mse, double l_perc, double l_reg, double lambda_mse = 1.0,
                  double lambda_lpips = 2.0, double lambda_reg = 1.0);

/// Built-in stand-in for an externally supplied perceptual error map: L1
/// difference between Gaussian-blurred copies at three scales, averaged.
Tensor perceptual_proxy(const Tensor& x_sr, const Tensor& x_h);

}  // namespace fidesr::daw

#endif
