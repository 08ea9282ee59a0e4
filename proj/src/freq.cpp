#include "fidesr/freq.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fidesr/error.hpp"

namespace fidesr::freq {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 Cooley-Tukey, forward (e^{-i...}), unnormalized.
void fft_pow2(std::vector<cd>& x) {
    const std::size_t n = x.size();
    if (n <= 1) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const double ang = -2.0 * kPi * static_cast<double>(k) /
                                   static_cast<double>(len);
                const cd w(std::cos(ang), std::sin(ang));
                const cd u = x[i + k];
                const cd v = x[i + k + half] * w;
                x[i + k] = u + v;
                x[i + k + half] = u - v;
            }
        }
    }
}

// Bluestein chirp-z for arbitrary length; forward, unnormalized.
void fft_bluestein(std::vector<cd>& x) {
    const std::size_t n = x.size();
    const std::size_t m = next_pow2(2 * n - 1);

    std::vector<cd> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // angle pi*k^2/n with k^2 reduced mod 2n to keep arguments small
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = kPi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cd(std::cos(ang), -std::sin(ang));
    }

    std::vector<cd> a(m, cd(0, 0)), b(m, cd(0, 0));
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

    fft_pow2(a);
    fft_pow2(b);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    // unnormalized inverse of length m via conjugation
    for (cd& v : a) v = std::conj(v);
    fft_pow2(a);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k)
        x[k] = std::conj(a[k]) * inv_m * chirp[k];
}

void fft_1d(std::vector<cd>& x, bool inverse) {
    if (inverse)
        for (cd& v : x) v = std::conj(v);
    if (is_pow2(x.size()))
        fft_pow2(x);
    else
        fft_bluestein(x);
    if (inverse)
        for (cd& v : x) v = std::conj(v);
}

// In-place 2-D transform over rows then columns; unnormalized either way.
void transform2d(Spectrum& s, bool inverse) {
    std::vector<cd> line;
    line.reserve(std::max(s.h, s.w));
    for (std::size_t u = 0; u < s.h; ++u) {
        line.assign(s.coef.begin() + u * s.w, s.coef.begin() + (u + 1) * s.w);
        fft_1d(line, inverse);
        std::copy(line.begin(), line.end(), s.coef.begin() + u * s.w);
    }
    for (std::size_t v = 0; v < s.w; ++v) {
        line.resize(s.h);
        for (std::size_t u = 0; u < s.h; ++u) line[u] = s.at(u, v);
        fft_1d(line, inverse);
        for (std::size_t u = 0; u < s.h; ++u) s.at(u, v) = line[u];
    }
}

// Signed normalized frequency for index k of an n-point axis, in [-0.5, 0.5).
double signed_freq(std::size_t k, std::size_t n) {
    const double f = static_cast<double>(k) / static_cast<double>(n);
    return k <= (n - 1) / 2 ? f : f - 1.0;
}

std::vector<double> radial_grid_d(std::size_t h, std::size_t w) {
    std::vector<double> r(h * w);
    for (std::size_t u = 0; u < h; ++u) {
        const double fu = signed_freq(u, h) / 0.5;
        for (std::size_t v = 0; v < w; ++v) {
            const double fv = signed_freq(v, w) / 0.5;
            r[u * w + v] = std::sqrt((fu * fu + fv * fv) * 0.5);
        }
    }
    return r;
}

std::vector<double> butterworth_gain_d(double cutoff, int order, Pass pass,
                                       std::size_t h, std::size_t w) {
    if (cutoff <= 0.0 || cutoff > 1.0)
        throw ParamError("butterworth cutoff must be in (0, 1]");
    if (order < 1) throw ParamError("butterworth order must be >= 1");
    std::vector<double> g = radial_grid_d(h, w);
    for (double& v : g) {
        const double low = 1.0 / (1.0 + std::pow(v / cutoff, 2.0 * order));
        v = pass == Pass::low ? low : 1.0 - low;
    }
    return g;
}

void require_latent(const Tensor& z, const char* op) {
    if (z.rank() != 3) throw ShapeError(std::string(op) + " expects a C x H x W tensor");
}

Spectrum fft2_plane_span(std::span<const float> plane, std::size_t h, std::size_t w) {
    Spectrum s;
    s.h = h;
    s.w = w;
    s.coef.resize(h * w);
    for (std::size_t i = 0; i < h * w; ++i) s.coef[i] = cd(plane[i], 0.0);
    transform2d(s, false);
    return s;
}

}  // namespace

Spectrum fft2(const Tensor& plane) {
    if (plane.rank() != 2) throw ShapeError("fft2 expects a rank-2 plane");
    return fft2_plane_span(plane.values(), plane.dim(0), plane.dim(1));
}

Spectrum ifft2_complex(const Spectrum& s) {
    Spectrum out = s;
    transform2d(out, true);
    const double norm = 1.0 / (static_cast<double>(s.h) * static_cast<double>(s.w));
    for (cd& v : out.coef) v *= norm;
    return out;
}

Tensor ifft2(const Spectrum& s) {
    const Spectrum full = ifft2_complex(s);
    Tensor out({s.h, s.w});
    for (std::size_t i = 0; i < full.coef.size(); ++i)
        out.data()[i] = static_cast<float>(full.coef[i].real());
    return out;
}

Tensor radial_frequency_grid(std::size_t h, std::size_t w) {
    if (h == 0 || w == 0) throw ShapeError("radial grid needs positive dims");
    const std::vector<double> r = radial_grid_d(h, w);
    Tensor out({h, w});
    for (std::size_t i = 0; i < r.size(); ++i) out.data()[i] = static_cast<float>(r[i]);
    return out;
}

Tensor butterworth_gain(const FreqFilterSpec& spec, std::size_t h, std::size_t w) {
    const std::vector<double> g = butterworth_gain_d(spec.cutoff, spec.order, spec.pass, h, w);
    Tensor out({h, w});
    for (std::size_t i = 0; i < g.size(); ++i) out.data()[i] = static_cast<float>(g[i]);
    return out;
}

Tensor filter_latent(const Tensor& z, double cutoff, int order, Pass pass) {
    require_latent(z, "filter_latent");
    const std::size_t h = z.dim(1), w = z.dim(2);
    const std::vector<double> gain = butterworth_gain_d(cutoff, order, pass, h, w);
    Tensor out({z.dim(0), h, w});
    for (std::size_t c = 0; c < z.dim(0); ++c) {
        Spectrum s = fft2_plane_span(z.channel(c), h, w);
        for (std::size_t i = 0; i < s.coef.size(); ++i) s.coef[i] *= gain[i];
        const Tensor plane = ifft2(s);
        std::copy(plane.values().begin(), plane.values().end(), out.channel(c).begin());
    }
    return out;
}

std::pair<Tensor, Tensor> decompose(const Tensor& z, double cutoff, int order) {
    return {filter_latent(z, cutoff, order, Pass::low),
            filter_latent(z, cutoff, order, Pass::high)};
}

std::vector<double> hf_energy_ratio(const Tensor& z, double cutoff, int order) {
    require_latent(z, "hf_energy_ratio");
    const std::size_t h = z.dim(1), w = z.dim(2);
    const std::vector<double> gain = butterworth_gain_d(cutoff, order, Pass::high, h, w);
    std::vector<double> ratios(z.dim(0));
    for (std::size_t c = 0; c < z.dim(0); ++c) {
        const Spectrum s = fft2_plane_span(z.channel(c), h, w);
        double high = 0.0, total = 0.0;
        for (std::size_t i = 0; i < s.coef.size(); ++i) {
            const double e = std::norm(s.coef[i]);
            high += e * gain[i];
            total += e;
        }
        ratios[c] = high / (total + 1e-12);
    }
    return ratios;
}

Tensor sharp_highpass(const Tensor& plane, double cutoff) {
    if (plane.rank() != 2) throw ShapeError("sharp_highpass expects a rank-2 plane");
    if (cutoff < 0.0) throw ParamError("sharp_highpass cutoff must be >= 0");
    Spectrum s = fft2(plane);
    const std::vector<double> r = radial_grid_d(s.h, s.w);
    for (std::size_t i = 0; i < s.coef.size(); ++i)
        if (r[i] <= cutoff) s.coef[i] = cd(0.0, 0.0);
    return ifft2(s);
}

}  // namespace fidesr::freq
