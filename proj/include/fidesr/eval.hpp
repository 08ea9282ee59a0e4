#ifndef FIDESR_EVAL_HPP
#define FIDESR_EVAL_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fidesr/lfim.hpp"
#include "fidesr/tensor.hpp"

namespace fidesr::eval {

// Desk-scale experiment harness: synthetic degradation, full-reference
// metrics, spectral sharpness statistics, and the high-frequency error
// improvement analyzer.

struct DegradationConfig {
    std::size_t scale = 4;    // integer downsampling factor
    double blur_sigma = 0.0;  // Gaussian std in pixels
    double noise_sigma = 0.0; // additive Gaussian std in sample units
    std::uint64_t seed = 0;
};

/// Gaussian blur, area downsample by scale, seeded Gaussian noise, clamp to
/// [0,1]. Spatial dims must be divisible by the scale.
Tensor degrade(const Tensor& x_h, const DegradationConfig& cfg);

/// 10 log10(peak^2 / MSE); identical inputs return the 1e9 dB sentinel.
double psnr(const Tensor& a, const Tensor& b, double peak = 1.0);

/// Single-scale SSIM, 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
/// C2 = 0.03^2, replicated borders. Rank-2 planes.
double ssim(const Tensor& a, const Tensor& b);

/// Spectral energy above the ideal radial cutoff over total non-DC energy;
/// 0 for constant input.
double hf_energy(const Tensor& plane, double cutoff);

/// Per-pixel |HPF(eps_base - eps_true)| - |HPF(eps_lrrb - eps_true)|,
/// averaged over channels. Positive where the refined prediction improves.
Tensor hf_error_map(const Tensor& eps_base, const Tensor& eps_lrrb,
                    const Tensor& eps_true, double r_c = 0.8);

/// sign(x) * ln(1 + |x|), elementwise.
Tensor sign_log(const Tensor& x);

/// Seeded synthetic grayscale test image: smooth cosine background plus
/// rectangles with sharp edges, normalized into [0.05, 0.95].
Tensor make_synthetic_hq(std::size_t h, std::size_t w, std::uint64_t seed);

enum class Sweep { lf, hf };

struct TrendConfig {
    Sweep sweep = Sweep::lf;
    std::vector<double> intensities = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    // pseudo-latent degradation: scaled blur plus noise at full resolution
    double blur_sigma = 1.2;
    double noise_sigma = 0.03;
    double lf_deficit = 0.8;  // low-frequency amplitude retained by the baseline
    std::uint64_t seed = 0;
    lfim::LfimConfig lfim;              // gates/cutoffs for the injection
    double hf_energy_cutoff = 0.5;      // band measured by the report
};

struct TrendRow {
    std::string config_id;
    double lf_alpha = 0.0;
    double hf_beta = 0.0;
    double psnr_mean = 0.0;
    double ssim_mean = 0.0;
    double hf_energy_mean = 0.0;
};

/// Sweeps one injection intensity over >= 10 HQ images (rank-2, [0,1]).
/// Each image is degraded into a pseudo-latent baseline, injected at every
/// intensity, and scored against the clean original.
std::vector<TrendRow> lfim_trend_report(const std::vector<Tensor>& hq_set,
                                        const TrendConfig& cfg);

std::string trend_csv(const std::vector<TrendRow>& rows);
std::string trend_table(const std::vector<TrendRow>& rows);

}  // namespace fidesr::eval

#endif
