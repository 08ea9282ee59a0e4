#ifndef FIDESR_SPATIAL_FILTERS_HPP
#define FIDESR_SPATIAL_FILTERS_HPP

#include <cstddef>

#include "fidesr/tensor.hpp"

namespace fidesr::spatial {

// Detail operators and helpers behind the detail map. All rank-2, all with
// edge replication at the borders. Pure functions.

inline constexpr double kDefaultQuantileLo = 0.02;
inline constexpr double kDefaultQuantileHi = 0.98;

/// sqrt(Gx^2 + Gy^2) with the 3x3 Sobel pair.
Tensor sobel_magnitude(const Tensor& y);

/// |L| with the 4-neighbor Laplacian (center 4, N/S/E/W -1).
Tensor laplacian_magnitude(const Tensor& y);

/// Population variance over an odd window x window neighborhood.
Tensor local_variance(const Tensor& y, std::size_t window = 3);

Tensor box_blur3(const Tensor& y);
Tensor box_blur(const Tensor& y, std::size_t window);

/// Rescale by the (q_lo, q_hi) empirical quantiles (linear interpolation
/// between order statistics), clamped to [0,1]. Degenerate spread maps to
/// all zeros.
Tensor quantile_norm(const Tensor& y, double q_lo = kDefaultQuantileLo,
                     double q_hi = kDefaultQuantileHi);

/// box_blur3(quantile_norm((Sobel + Laplacian + Variance) / 3)).
Tensor detail_map(const Tensor& y_gray);

/// Separable Gaussian, kernel radius ceil(3*sigma); sigma 0 is the identity.
Tensor gaussian_blur(const Tensor& y, double sigma);

/// Grayscale erosion: minimum over a square window of the given radius.
/// Radius 0 is the identity.
Tensor erode(const Tensor& y, std::size_t radius);

/// Bilinear resize with half-pixel centers.
Tensor resize_bilinear(const Tensor& y, std::size_t out_h, std::size_t out_w);

/// Area-average resize (box coverage weights); exact block means for
/// integer downscale factors.
Tensor resize_area(const Tensor& y, std::size_t out_h, std::size_t out_w);

}  // namespace fidesr::spatial

#endif
