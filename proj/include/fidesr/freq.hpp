#ifndef FIDESR_FREQ_HPP
#define FIDESR_FREQ_HPP

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "fidesr/tensor.hpp"

namespace fidesr::freq {

/// 2-D DFT coefficients in standard layout, DC at (0,0). Internal carrier
/// for the filtering ops; kept in double for headroom.
struct Spectrum {
    std::size_t h = 0;
    std::size_t w = 0;
    std::vector<std::complex<double>> coef;  // row-major, coef[u*w + v]

    std::complex<double>& at(std::size_t u, std::size_t v) { return coef[u * w + v]; }
    const std::complex<double>& at(std::size_t u, std::size_t v) const {
        return coef[u * w + v];
    }
};

enum class Pass { low, high };

struct FreqFilterSpec {
    double cutoff = 0.5;  // normalized radius in (0,1]
    int order = 2;
    Pass pass = Pass::low;
};

/// Unnormalized forward DFT. Arbitrary sizes (radix-2 plus Bluestein).
Spectrum fft2(const Tensor& plane);

/// Inverse of fft2 (divides by H*W); returns the real part.
Tensor ifft2(const Spectrum& s);

/// Full complex inverse, for residue inspection.
Spectrum ifft2_complex(const Spectrum& s);

/// Normalized radial frequency: 0 at DC, 1 at the (Nyquist, Nyquist) corner.
Tensor radial_frequency_grid(std::size_t h, std::size_t w);

/// Butterworth gain mask. Low pass: 1 / (1 + (r/r_c)^(2n)); high pass is its
/// complement, so a low/high pair at the same (r_c, n) sums to one.
Tensor butterworth_gain(const FreqFilterSpec& spec, std::size_t h, std::size_t w);

/// Per-channel Butterworth split of a C x H x W latent into low/high parts.
std::pair<Tensor, Tensor> decompose(const Tensor& z, double cutoff, int order);

/// Butterworth-filtered copy of a latent, one pass band only.
Tensor filter_latent(const Tensor& z, double cutoff, int order, Pass pass);

/// Fraction of spectral energy in the high band per channel:
/// sum(|F|^2 * G_high) / (sum(|F|^2) + 1e-12).
std::vector<double> hf_energy_ratio(const Tensor& z, double cutoff, int order);

/// Ideal-mask high pass: keeps coefficients with r > cutoff, zeroes the rest.
Tensor sharp_highpass(const Tensor& plane, double cutoff);

}  // namespace fidesr::freq

#endif
