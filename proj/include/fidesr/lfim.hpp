#ifndef FIDESR_LFIM_HPP
#define FIDESR_LFIM_HPP

#include <cstddef>
#include <filesystem>
#include <vector>

#include "fidesr/tensor.hpp"

namespace fidesr::lfim {

// Latent frequency injection: Butterworth-filtered low/high components of a
// latent are added back, gated spatially (from a detail map) and per channel
// (from high-frequency energy ratios). With both intensities at zero every
// entry point is the bitwise identity.

struct LfimConfig {
    float lf_alpha = 0.2f;            // LF injection intensity >= 0
    float hf_beta = 0.2f;             // HF injection intensity >= 0
    double lf_cutoff = 0.25;          // Butterworth cutoff for the LF band
    double hf_cutoff = 0.5;           // Butterworth cutoff for the HF band
    int order = 2;                    // Butterworth order
    float gamma = 1.0f;               // detail exponent for the HF spatial gate
    std::size_t erosion_radius = 0;   // square-window erosion of the LF gate
    bool hf_use_diff = false;         // HF term = HPF(z) - HPF(z_ref)
    double channel_temperature = 0.1; // softness of the channel gate > 0

    void validate() const;
};

/// Flat key=value file with exactly the keys named above. Unknown keys and
/// out-of-range values are configuration errors.
LfimConfig lfim_config_from_file(const std::filesystem::path& path);

/// LF spatial gate: 1 - detail, then grayscale erosion (radius 0 = no-op).
Tensor spatial_gate_lf(const Tensor& detail, std::size_t erosion_radius);

/// HF spatial gate: detail^gamma, with 0^0 == 1.
Tensor spatial_gate_hf(const Tensor& detail, float gamma);

enum class Branch { lf, hf };

/// Per-channel gate from HF energy ratios: the hf branch is a sigmoid
/// centered at the median ratio, the lf branch its complement (they sum to
/// one per channel).
std::vector<double> channel_gate(const Tensor& z, const LfimConfig& cfg, Branch branch);

/// z + intensity * m_sp .* broadcast(m_ch) .* delta; shared arithmetic of
/// both injection branches.
Tensor inject_component(const Tensor& z, const Tensor& delta, const Tensor& m_sp,
                        const std::vector<double>& m_ch, float intensity);

Tensor inject_lf(const Tensor& z, const Tensor& detail, const LfimConfig& cfg);

Tensor inject_hf(const Tensor& z, const Tensor& detail, const LfimConfig& cfg,
                 const Tensor* z_ref = nullptr);

/// Full injection pass: the detail map (image resolution) is area-averaged
/// down to the latent grid, then the LF branch runs, then the HF branch on
/// the LF-updated latent.
Tensor lfim_apply(const Tensor& z_r, const Tensor& detail_lq, const LfimConfig& cfg,
                  const Tensor* z_ref = nullptr);

}  // namespace fidesr::lfim

#endif
