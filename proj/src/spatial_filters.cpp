#include "fidesr/spatial_filters.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fidesr/error.hpp"

namespace fidesr::spatial {

namespace {

void require_rank2(const Tensor& y, const char* op) {
    if (y.rank() != 2) throw ShapeError(std::string(op) + " expects a rank-2 map");
}

// Replicated-edge sample.
inline float pix(const Tensor& y, long i, long j) {
    const long h = static_cast<long>(y.dim(0));
    const long w = static_cast<long>(y.dim(1));
    i = i < 0 ? 0 : (i >= h ? h - 1 : i);
    j = j < 0 ? 0 : (j >= w ? w - 1 : j);
    return y.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
}

}  // namespace

Tensor sobel_magnitude(const Tensor& y) {
    require_rank2(y, "sobel_magnitude");
    const long h = static_cast<long>(y.dim(0));
    const long w = static_cast<long>(y.dim(1));
    Tensor out({y.dim(0), y.dim(1)});
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j) {
            const double gx = -pix(y, i - 1, j - 1) + pix(y, i - 1, j + 1) -
                              2.0 * pix(y, i, j - 1) + 2.0 * pix(y, i, j + 1) -
                              pix(y, i + 1, j - 1) + pix(y, i + 1, j + 1);
            const double gy = -pix(y, i - 1, j - 1) - 2.0 * pix(y, i - 1, j) -
                              pix(y, i - 1, j + 1) + pix(y, i + 1, j - 1) +
                              2.0 * pix(y, i + 1, j) + pix(y, i + 1, j + 1);
            out.at(i, j) = static_cast<float>(std::sqrt(gx * gx + gy * gy));
        }
    return out;
}

Tensor laplacian_magnitude(const Tensor& y) {
    require_rank2(y, "laplacian_magnitude");
    const long h = static_cast<long>(y.dim(0));
    const long w = static_cast<long>(y.dim(1));
    Tensor out({y.dim(0), y.dim(1)});
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j) {
            const double l = 4.0 * pix(y, i, j) - pix(y, i - 1, j) - pix(y, i + 1, j) -
                             pix(y, i, j - 1) - pix(y, i, j + 1);
            out.at(i, j) = static_cast<float>(std::fabs(l));
        }
    return out;
}

Tensor local_variance(const Tensor& y, std::size_t window) {
    require_rank2(y, "local_variance");
    if (window % 2 == 0 || window == 0)
        throw ParamError("local_variance window must be odd and positive");
    const long h = static_cast<long>(y.dim(0));
    const long w = static_cast<long>(y.dim(1));
    const long r = static_cast<long>(window / 2);
    const double count = static_cast<double>(window) * static_cast<double>(window);
    Tensor out({y.dim(0), y.dim(1)});
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j) {
            double s = 0.0, s2 = 0.0;
            for (long di = -r; di <= r; ++di)
                for (long dj = -r; dj <= r; ++dj) {
                    const double v = pix(y, i + di, j + dj);
                    s += v;
                    s2 += v * v;
                }
            const double m = s / count;
            double var = s2 / count - m * m;
            if (var < 0.0) var = 0.0;  // guard cancellation
            out.at(i, j) = static_cast<float>(var);
        }
    return out;
}

Tensor box_blur(const Tensor& y, std::size_t window) {
    require_rank2(y, "box_blur");
    if (window % 2 == 0 || window == 0)
        throw ParamError("box_blur window must be odd and positive");
    const long h = static_cast<long>(y.dim(0));
    const long w = static_cast<long>(y.dim(1));
    const long r = static_cast<long>(window / 2);
    const double count = static_cast<double>(window) * static_cast<double>(window);
    Tensor out({y.dim(0), y.dim(1)});
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j) {
            double s = 0.0;
            for (long di = -r; di <= r; ++di)
                for (long dj = -r; dj <= r; ++dj) s += pix(y, i + di, j + dj);
            out.at(i, j) = static_cast<float>(s / count);
        }
    return out;
}

Tensor box_blur3(const Tensor& y) { return box_blur(y, 3); }

Tensor quantile_norm(const Tensor& y, double q_lo, double q_hi) {
    require_rank2(y, "quantile_norm");
    if (!(q_lo >= 0.0 && q_lo < q_hi && q_hi <= 1.0))
        throw ParamError("quantile_norm requires 0 <= q_lo < q_hi <= 1");

    std::vector<double> sorted(y.values().begin(), y.values().end());
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
        const double p = q * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(p);
        const double frac = p - static_cast<double>(lo);
        if (lo + 1 >= sorted.size()) return sorted.back();
        return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
    };
    const double a = quantile(q_lo);
    const double b = quantile(q_hi);

    Tensor out({y.dim(0), y.dim(1)});
    if (b <= a) return out;  // flat map carries no signal
    const double inv = 1.0 / (b - a);
    const float* src = y.data();
    float* dst = out.data();
    for (std::size_t i = 0; i < y.numel(); ++i) {
        double v = (static_cast<double>(src[i]) - a) * inv;
        v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        dst[i] = static_cast<float>(v);
    }
    return out;
}

Tensor detail_map(const Tensor& y_gray) {
    require_rank2(y_gray, "detail_map");
    const Tensor s = sobel_magnitude(y_gray);
    const Tensor l = laplacian_magnitude(y_gray);
    const Tensor v = local_variance(y_gray, 3);
    Tensor m({y_gray.dim(0), y_gray.dim(1)});
    for (std::size_t i = 0; i < m.numel(); ++i)
        m.data()[i] =
            static_cast<float>((static_cast<double>(s.data()[i]) + l.data()[i] +
                                v.data()[i]) /
                               3.0);
    return box_blur3(quantile_norm(m));
}

Tensor gaussian_blur(const Tensor& y, double sigma) {
    require_rank2(y, "gaussian_blur");
    if (sigma < 0.0) throw ParamError("gaussian_blur sigma must be >= 0");
    if (sigma == 0.0) return y;

    const long radius = static_cast<long>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double norm = 0.0;
    for (long i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        norm += k[i + radius];
    }
    for (double& v : k) v /= norm;

    const long h = static_cast<long>(y.dim(0));
    const long w = static_cast<long>(y.dim(1));
    Tensor tmp({y.dim(0), y.dim(1)});
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j) {
            double s = 0.0;
            for (long d = -radius; d <= radius; ++d) s += k[d + radius] * pix(y, i, j + d);
            tmp.at(i, j) = static_cast<float>(s);
        }
    Tensor out({y.dim(0), y.dim(1)});
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j) {
            double s = 0.0;
            for (long d = -radius; d <= radius; ++d)
                s += k[d + radius] * pix(tmp, i + d, j);
            out.at(i, j) = static_cast<float>(s);
        }
    return out;
}

Tensor erode(const Tensor& y, std::size_t radius) {
    require_rank2(y, "erode");
    if (radius == 0) return y;
    const long h = static_cast<long>(y.dim(0));
    const long w = static_cast<long>(y.dim(1));
    const long r = static_cast<long>(radius);
    Tensor out({y.dim(0), y.dim(1)});
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j) {
            float mn = y.at(i, j);
            for (long di = -r; di <= r; ++di)
                for (long dj = -r; dj <= r; ++dj) {
                    const float v = pix(y, i + di, j + dj);
                    mn = v < mn ? v : mn;
                }
            out.at(i, j) = mn;
        }
    return out;
}

Tensor resize_bilinear(const Tensor& y, std::size_t out_h, std::size_t out_w) {
    require_rank2(y, "resize_bilinear");
    if (out_h == 0 || out_w == 0) throw ShapeError("resize target must be positive");
    const std::size_t h = y.dim(0), w = y.dim(1);
    Tensor out({out_h, out_w});
    const double sy = static_cast<double>(h) / static_cast<double>(out_h);
    const double sx = static_cast<double>(w) / static_cast<double>(out_w);
    for (std::size_t i = 0; i < out_h; ++i)
        for (std::size_t j = 0; j < out_w; ++j) {
            // half-pixel centers
            double fy = (static_cast<double>(i) + 0.5) * sy - 0.5;
            double fx = (static_cast<double>(j) + 0.5) * sx - 0.5;
            fy = std::max(0.0, std::min(fy, static_cast<double>(h - 1)));
            fx = std::max(0.0, std::min(fx, static_cast<double>(w - 1)));
            const std::size_t y0 = static_cast<std::size_t>(fy);
            const std::size_t x0 = static_cast<std::size_t>(fx);
            const std::size_t y1 = std::min(y0 + 1, h - 1);
            const std::size_t x1 = std::min(x0 + 1, w - 1);
            const double dy = fy - static_cast<double>(y0);
            const double dx = fx - static_cast<double>(x0);
            const double v = (1.0 - dy) * ((1.0 - dx) * y.at(y0, x0) + dx * y.at(y0, x1)) +
                             dy * ((1.0 - dx) * y.at(y1, x0) + dx * y.at(y1, x1));
            out.at(i, j) = static_cast<float>(v);
        }
    return out;
}

Tensor resize_area(const Tensor& y, std::size_t out_h, std::size_t out_w) {
    require_rank2(y, "resize_area");
    if (out_h == 0 || out_w == 0) throw ShapeError("resize target must be positive");
    const std::size_t h = y.dim(0), w = y.dim(1);
    if (out_h == h && out_w == w) return y;
    Tensor out({out_h, out_w});
    const double sy = static_cast<double>(h) / static_cast<double>(out_h);
    const double sx = static_cast<double>(w) / static_cast<double>(out_w);
    for (std::size_t i = 0; i < out_h; ++i) {
        const double y0 = static_cast<double>(i) * sy;
        const double y1 = static_cast<double>(i + 1) * sy;
        for (std::size_t j = 0; j < out_w; ++j) {
            const double x0 = static_cast<double>(j) * sx;
            const double x1 = static_cast<double>(j + 1) * sx;
            double acc = 0.0, area = 0.0;
            for (std::size_t yy = static_cast<std::size_t>(y0);
                 yy < h && static_cast<double>(yy) < y1; ++yy) {
                const double wy = std::min(y1, static_cast<double>(yy + 1)) -
                                  std::max(y0, static_cast<double>(yy));
                if (wy <= 0.0) continue;
                for (std::size_t xx = static_cast<std::size_t>(x0);
                     xx < w && static_cast<double>(xx) < x1; ++xx) {
                    const double wx = std::min(x1, static_cast<double>(xx + 1)) -
                                      std::max(x0, static_cast<double>(xx));
                    if (wx <= 0.0) continue;
                    acc += wy * wx * y.at(yy, xx);
                    area += wy * wx;
                }
            }
            out.at(i, j) = static_cast<float>(acc / area);
        }
    }
    return out;
}

}  // namespace fidesr::spatial
