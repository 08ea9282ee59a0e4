#include "fidesr/eval.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "fidesr/error.hpp"
#include "fidesr/freq.hpp"
#include "fidesr/kernels.hpp"
#include "fidesr/rng.hpp"
#include "fidesr/spatial_filters.hpp"

namespace fidesr::eval {

namespace {

Tensor as_latent(const Tensor& t) {
    if (t.rank() == 3) return t;
    if (t.rank() != 2) throw ShapeError("expected rank-2 or rank-3 tensor");
    Tensor out({std::size_t{1}, t.dim(0), t.dim(1)});
    std::copy(t.values().begin(), t.values().end(), out.data());
    return out;
}

std::string format6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

Tensor degrade(const Tensor& x_h, const DegradationConfig& cfg) {
    if (cfg.scale == 0) throw ParamError("degrade: scale must be >= 1");
    if (cfg.blur_sigma < 0.0 || cfg.noise_sigma < 0.0)
        throw ParamError("degrade: sigmas must be >= 0");
    const Tensor x = as_latent(x_h);
    const std::size_t h = x.dim(1), w = x.dim(2);
    if (h % cfg.scale != 0 || w % cfg.scale != 0)
        throw ShapeError("degrade: dims must be divisible by the scale");
    const std::size_t oh = h / cfg.scale, ow = w / cfg.scale;

    Tensor out({x.dim(0), oh, ow});
    Rng rng(cfg.seed);
    for (std::size_t c = 0; c < x.dim(0); ++c) {
        Tensor plane = x.channel_plane(c);
        plane = spatial::gaussian_blur(plane, cfg.blur_sigma);
        plane = spatial::resize_area(plane, oh, ow);
        auto dst = out.channel(c);
        for (std::size_t i = 0; i < dst.size(); ++i) {
            float v = plane.data()[i];
            if (cfg.noise_sigma > 0.0)
                v += static_cast<float>(cfg.noise_sigma) * rng.gaussian();
            dst[i] = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
        }
    }
    if (x_h.rank() == 2) {
        Tensor plane({oh, ow});
        std::copy(out.values().begin(), out.values().end(), plane.data());
        return plane;
    }
    return out;
}

double psnr(const Tensor& a, const Tensor& b, double peak) {
    if (!a.same_shape(b)) throw ShapeError("psnr: shape mismatch");
    const double mse =
        kernels::table().sqdiff_sum(a.data(), b.data(), a.numel()) /
        static_cast<double>(a.numel());
    if (mse == 0.0) return 1e9;  // sentinel for identical inputs
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) throw ShapeError("ssim expects rank-2 planes");
    if (!a.same_shape(b)) throw ShapeError("ssim: shape mismatch");

    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;
    constexpr double kSigma = 1.5;
    constexpr long kRadius = 5;  // 11x11 window

    double kernel[2 * kRadius + 1];
    double norm = 0.0;
    for (long i = -kRadius; i <= kRadius; ++i) {
        kernel[i + kRadius] = std::exp(-(static_cast<double>(i) * i) /
                                       (2.0 * kSigma * kSigma));
        norm += kernel[i + kRadius];
    }
    for (double& v : kernel) v /= norm;

    const long h = static_cast<long>(a.dim(0));
    const long w = static_cast<long>(a.dim(1));
    const auto clamp_i = [&](long i) { return i < 0 ? 0L : (i >= h ? h - 1 : i); };
    const auto clamp_j = [&](long j) { return j < 0 ? 0L : (j >= w ? w - 1 : j); };

    // separable Gaussian of the five moment planes, replicated borders
    const std::size_t plane_n = a.numel();
    std::vector<double> mu_a(plane_n), mu_b(plane_n), m_aa(plane_n), m_bb(plane_n),
        m_ab(plane_n);
    {
        std::vector<double> ra(plane_n), rb(plane_n), raa(plane_n), rbb(plane_n),
            rab(plane_n);
        for (long i = 0; i < h; ++i)
            for (long j = 0; j < w; ++j) {
                double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
                for (long d = -kRadius; d <= kRadius; ++d) {
                    const double k = kernel[d + kRadius];
                    const double va = a.at(i, clamp_j(j + d));
                    const double vb = b.at(i, clamp_j(j + d));
                    sa += k * va;
                    sb += k * vb;
                    saa += k * va * va;
                    sbb += k * vb * vb;
                    sab += k * va * vb;
                }
                const std::size_t idx = static_cast<std::size_t>(i * w + j);
                ra[idx] = sa;
                rb[idx] = sb;
                raa[idx] = saa;
                rbb[idx] = sbb;
                rab[idx] = sab;
            }
        for (long i = 0; i < h; ++i)
            for (long j = 0; j < w; ++j) {
                double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
                for (long d = -kRadius; d <= kRadius; ++d) {
                    const double k = kernel[d + kRadius];
                    const std::size_t idx =
                        static_cast<std::size_t>(clamp_i(i + d) * w + j);
                    sa += k * ra[idx];
                    sb += k * rb[idx];
                    saa += k * raa[idx];
                    sbb += k * rbb[idx];
                    sab += k * rab[idx];
                }
                const std::size_t idx = static_cast<std::size_t>(i * w + j);
                mu_a[idx] = sa;
                mu_b[idx] = sb;
                m_aa[idx] = saa;
                m_bb[idx] = sbb;
                m_ab[idx] = sab;
            }
    }

    double acc = 0.0;
    for (std::size_t i = 0; i < plane_n; ++i) {
        const double va = m_aa[i] - mu_a[i] * mu_a[i];
        const double vb = m_bb[i] - mu_b[i] * mu_b[i];
        const double cov = m_ab[i] - mu_a[i] * mu_b[i];
        const double num = (2.0 * mu_a[i] * mu_b[i] + kC1) * (2.0 * cov + kC2);
        const double den =
            (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) * (va + vb + kC2);
        acc += num / den;
    }
    return acc / static_cast<double>(plane_n);
}

double hf_energy(const Tensor& plane, double cutoff) {
    if (plane.rank() != 2) throw ShapeError("hf_energy expects a rank-2 plane");
    const freq::Spectrum s = freq::fft2(plane);
    const Tensor r = freq::radial_frequency_grid(s.h, s.w);
    double above = 0.0, total = 0.0;
    for (std::size_t i = 0; i < s.coef.size(); ++i) {
        if (i == 0) continue;  // skip DC
        const double e = std::norm(s.coef[i]);
        total += e;
        if (r.data()[i] > cutoff) above += e;
    }
    if (total <= 1e-24) return 0.0;
    return above / total;
}

Tensor hf_error_map(const Tensor& eps_base, const Tensor& eps_lrrb,
                    const Tensor& eps_true, double r_c) {
    if (!eps_base.same_shape(eps_lrrb) || !eps_base.same_shape(eps_true))
        throw ShapeError("hf_error_map: shape mismatch");
    const Tensor base = as_latent(eps_base);
    const Tensor refined = as_latent(eps_lrrb);
    const Tensor truth = as_latent(eps_true);

    const std::size_t channels = base.dim(0);
    Tensor out({base.dim(1), base.dim(2)});
    for (std::size_t c = 0; c < channels; ++c) {
        const Tensor d1 = sub(base.channel_plane(c), truth.channel_plane(c));
        const Tensor d2 = sub(refined.channel_plane(c), truth.channel_plane(c));
        const Tensor h1 = freq::sharp_highpass(d1, r_c);
        const Tensor h2 = freq::sharp_highpass(d2, r_c);
        for (std::size_t i = 0; i < out.numel(); ++i)
            out.data()[i] += (std::fabs(h1.data()[i]) - std::fabs(h2.data()[i])) /
                             static_cast<float>(channels);
    }
    return out;
}

Tensor sign_log(const Tensor& x) {
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.numel(); ++i) {
        const float v = x.data()[i];
        const float m = std::log1p(std::fabs(v));
        out.data()[i] = v < 0.0f ? -m : (v > 0.0f ? m : 0.0f);
    }
    return out;
}

Tensor make_synthetic_hq(std::size_t h, std::size_t w, std::uint64_t seed) {
    Rng rng(seed);
    Tensor img({h, w});
    constexpr double kTau = 2.0 * std::numbers::pi;

    // smooth background: a few low-frequency cosines
    for (int k = 0; k < 3; ++k) {
        const double fy = rng.uniform(0.5f, 3.0f);
        const double fx = rng.uniform(0.5f, 3.0f);
        const double phase = rng.uniform(0.0f, static_cast<float>(kTau));
        const double amp = rng.uniform(0.1f, 0.3f);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j)
                img.at(i, j) += static_cast<float>(
                    amp * std::cos(kTau * (fy * i / static_cast<double>(h) +
                                           fx * j / static_cast<double>(w)) +
                                   phase));
    }
    // sharp structures: offset rectangles
    const int rects = 2 + static_cast<int>(rng.uniform() * 3.0f);
    for (int k = 0; k < rects; ++k) {
        const std::size_t y0 = static_cast<std::size_t>(rng.uniform() * (h / 2));
        const std::size_t x0 = static_cast<std::size_t>(rng.uniform() * (w / 2));
        const std::size_t y1 = y0 + 2 + static_cast<std::size_t>(rng.uniform() * (h / 3));
        const std::size_t x1 = x0 + 2 + static_cast<std::size_t>(rng.uniform() * (w / 3));
        const float off = rng.uniform(-0.4f, 0.4f);
        for (std::size_t i = y0; i < std::min(y1, h); ++i)
            for (std::size_t j = x0; j < std::min(x1, w); ++j) img.at(i, j) += off;
    }

    const float lo = min_value(img);
    const float hi = max_value(img);
    const float span = hi - lo;
    for (float& v : img.values())
        v = span > 0.0f ? 0.05f + 0.9f * (v - lo) / span : 0.5f;
    return img;
}

std::vector<TrendRow> lfim_trend_report(const std::vector<Tensor>& hq_set,
                                        const TrendConfig& cfg) {
    if (hq_set.size() < 10)
        throw ParamError("lfim_trend_report needs at least 10 HQ images");
    for (const Tensor& t : hq_set)
        if (t.rank() != 2) throw ShapeError("lfim_trend_report expects rank-2 images");

    // Pseudo-latent baselines: blurred copy with a global low-frequency
    // amplitude deficit plus seeded noise. Injection has to win back the
    // deficit for fidelity to climb with lf_alpha.
    std::vector<Tensor> bases;
    std::vector<Tensor> details;
    bases.reserve(hq_set.size());
    details.reserve(hq_set.size());
    Rng rng(cfg.seed);
    for (const Tensor& hq : hq_set) {
        Tensor base = spatial::gaussian_blur(hq, cfg.blur_sigma);
        for (float& v : base.values()) {
            v = static_cast<float>(cfg.lf_deficit) * v +
                static_cast<float>(cfg.noise_sigma) * rng.gaussian();
            v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
        }
        details.push_back(spatial::detail_map(base));
        bases.push_back(std::move(base));
    }

    std::vector<TrendRow> rows;
    for (double intensity : cfg.intensities) {
        lfim::LfimConfig inj = cfg.lfim;
        if (cfg.sweep == Sweep::lf) {
            inj.lf_alpha = static_cast<float>(intensity);
            inj.hf_beta = 0.0f;
        } else {
            inj.lf_alpha = 0.0f;
            inj.hf_beta = static_cast<float>(intensity);
        }

        double psnr_acc = 0.0, ssim_acc = 0.0, hf_acc = 0.0;
        for (std::size_t i = 0; i < bases.size(); ++i) {
            const Tensor z = as_latent(bases[i]);
            const Tensor z_f = lfim::lfim_apply(z, details[i], inj);
            Tensor plane({z_f.dim(1), z_f.dim(2)});
            std::copy(z_f.channel(0).begin(), z_f.channel(0).end(), plane.data());
            plane = clamp01(plane);
            psnr_acc += psnr(plane, hq_set[i]);
            ssim_acc += ssim(plane, hq_set[i]);
            hf_acc += hf_energy(plane, cfg.hf_energy_cutoff);
        }

        TrendRow row;
        char id[32];
        std::snprintf(id, sizeof(id), "%s-%.1f", cfg.sweep == Sweep::lf ? "lf" : "hf",
                      intensity);
        row.config_id = id;
        row.lf_alpha = cfg.sweep == Sweep::lf ? intensity : 0.0;
        row.hf_beta = cfg.sweep == Sweep::hf ? intensity : 0.0;
        const double n = static_cast<double>(bases.size());
        row.psnr_mean = psnr_acc / n;
        row.ssim_mean = ssim_acc / n;
        row.hf_energy_mean = hf_acc / n;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string trend_csv(const std::vector<TrendRow>& rows) {
    std::string out = "config_id,lf_alpha,hf_beta,psnr_mean,ssim_mean,hf_energy_mean\n";
    for (const TrendRow& r : rows) {
        out += r.config_id;
        out += "," + format6(r.lf_alpha);
        out += "," + format6(r.hf_beta);
        out += "," + format6(r.psnr_mean);
        out += "," + format6(r.ssim_mean);
        out += "," + format6(r.hf_energy_mean);
        out += "\n";
    }
    return out;
}

std::string trend_table(const std::vector<TrendRow>& rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-10s %10s %10s %12s %12s %14s\n", "config_id",
                  "lf_alpha", "hf_beta", "psnr_mean", "ssim_mean", "hf_energy_mean");
    std::string out = buf;
    for (const TrendRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-10s %10.6f %10.6f %12.6f %12.6f %14.6f\n",
                      r.config_id.c_str(), r.lf_alpha, r.hf_beta, r.psnr_mean,
                      r.ssim_mean, r.hf_energy_mean);
        out += buf;
    }
    return out;
}

}  // namespace fidesr::eval
