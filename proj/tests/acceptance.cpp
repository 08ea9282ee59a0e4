// Acceptance suite: every release gate runs here with its tolerance pinned
// in code, one pass/fail line per criterion. Exits nonzero on any failure.
//
// The CLI round-trip check (criterion 12) drives the fidesr binary; point
// FIDESR_CLI at it (ctest does) or pass the path as argv[1].

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#endif

#include "fidesr/daw.hpp"
#include "fidesr/eval.hpp"
#include "fidesr/freq.hpp"
#include "fidesr/lfim.hpp"
#include "fidesr/lrrb.hpp"
#include "fidesr/rng.hpp"
#include "fidesr/spatial_filters.hpp"
#include "fidesr/tensor_io.hpp"
#include "oracles.hpp"

using namespace fidesr;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;

Tensor random_tensor(std::span<const std::size_t> shape, std::uint64_t seed, float lo,
                     float hi) {
    Rng rng(seed);
    Tensor t{shape};
    for (float& v : t.values()) v = rng.uniform(lo, hi);
    return t;
}

Tensor random_latent(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed,
                     float lo = -1.0f, float hi = 1.0f) {
    const std::size_t shape[] = {c, h, w};
    return random_tensor(shape, seed, lo, hi);
}

Tensor random_plane(std::size_t h, std::size_t w, std::uint64_t seed, float lo = 0.0f,
                    float hi = 1.0f) {
    const std::size_t shape[] = {h, w};
    return random_tensor(shape, seed, lo, hi);
}

bool same_bits(const Tensor& a, const Tensor& b) {
    return a.same_shape(b) &&
           std::memcmp(a.data(), b.data(), a.numel() * sizeof(float)) == 0;
}

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            detail = msg;
        }
    }
};

// ---------------------------------------------------------------- criterion 1
Check lfim_identity() {
    Check c;
    lfim::LfimConfig cfg;
    cfg.lf_alpha = 0.0f;
    cfg.hf_beta = 0.0f;
    Rng shapes(1);
    for (int i = 0; i < 100; ++i) {
        const std::size_t ch = 1 + static_cast<std::size_t>(shapes.uniform() * 4.0f);
        const std::size_t h = 4 + static_cast<std::size_t>(shapes.uniform() * 61.0f);
        const std::size_t w = 4 + static_cast<std::size_t>(shapes.uniform() * 61.0f);
        const Tensor z = random_latent(std::min<std::size_t>(ch, 4), std::min<std::size_t>(h, 64),
                                       std::min<std::size_t>(w, 64), 100 + i);
        const Tensor detail = random_plane(2 * z.dim(1), 2 * z.dim(2), 200 + i);
        const Tensor out = lfim::lfim_apply(z, detail, cfg);
        c.expect(same_bits(out, z), "identity violated at latent " + std::to_string(i));
        if (!c.ok) break;
    }
    return c;
}

// ---------------------------------------------------------------- criterion 2
Check complementarity() {
    Check c;
    const std::size_t sizes[][2] = {{7, 9}, {8, 8}, {64, 64}};
    int seed = 300;
    for (const auto& hw : sizes) {
        const Tensor z = random_latent(3, hw[0], hw[1], seed++);
        for (double cutoff : {0.25, 0.5, 0.8}) {
            const auto [lp, hp] = freq::decompose(z, cutoff, 2);
            float worst = 0.0f;
            for (std::size_t i = 0; i < z.numel(); ++i)
                worst = std::max(worst,
                                 std::fabs(lp.data()[i] + hp.data()[i] - z.data()[i]));
            c.expect(worst <= 1e-5f, "max residual " + std::to_string(worst) + " at " +
                                         std::to_string(hw[0]) + "x" +
                                         std::to_string(hw[1]));
        }
    }
    return c;
}

// ---------------------------------------------------------------- criterion 3
Check butterworth_half_power() {
    Check c;
    // grid points landing exactly on r = 1/sqrt(2) and r = 1
    for (int n : {1, 2, 4, 8}) {
        const Tensor g1 = freq::butterworth_gain(
            freq::FreqFilterSpec{1.0 / std::sqrt(2.0), n, freq::Pass::low}, 16, 16);
        c.expect(std::fabs(g1.at(8, 0) - 0.5f) <= 1e-6f,
                 "half-power off at n=" + std::to_string(n));
        const Tensor g2 = freq::butterworth_gain(
            freq::FreqFilterSpec{1.0, n, freq::Pass::low}, 16, 16);
        c.expect(std::fabs(g2.at(8, 8) - 0.5f) <= 1e-6f,
                 "corner half-power off at n=" + std::to_string(n));
    }
    return c;
}

// ---------------------------------------------------------------- criterion 4
Check fft_oracle() {
    Check c;
    const std::size_t sizes[][2] = {{1, 16}, {5, 7},  {7, 9},   {8, 8},
                                    {9, 16}, {13, 11}, {16, 1}, {16, 16}};
    int seed = 400;
    for (const auto& hw : sizes) {
        const Tensor plane = random_plane(hw[0], hw[1], seed++, -1.0f, 1.0f);
        const freq::Spectrum fast = freq::fft2(plane);
        const freq::Spectrum slow = oracles::naive_dft2(plane);
        double max_err = 0.0, max_mag = 1.0;
        for (std::size_t i = 0; i < fast.coef.size(); ++i) {
            max_err = std::max(max_err, std::abs(fast.coef[i] - slow.coef[i]));
            max_mag = std::max(max_mag, std::abs(slow.coef[i]));
        }
        c.expect(max_err <= 1e-4 * max_mag,
                 "relative error " + std::to_string(max_err / max_mag) + " at " +
                     std::to_string(hw[0]) + "x" + std::to_string(hw[1]));
    }
    return c;
}

// ---------------------------------------------------------------- criterion 5
Check daw_neutrality() {
    Check c;
    daw::DawConfig cfg;
    const Tensor zeros({12, 12}, 0.0f);
    const Tensor e = random_plane(12, 12, 500);
    const Tensor d = random_plane(12, 12, 501);

    for (const Tensor& w :
         {daw::difficulty_weights(zeros, e, cfg), daw::difficulty_weights(d, zeros, cfg),
          daw::difficulty_weights(Tensor({12, 12}, 0.6f), Tensor({12, 12}, 0.9f), cfg)}) {
        for (float v : w.values())
            c.expect(std::fabs(v - 1.0f) <= 1e-6f, "collapse to uniform failed");
    }

    // random inputs: mean one, pre-normalization bounds via the stated chain
    cfg.alpha = 1.4;
    const Tensor dr = random_plane(16, 16, 502);
    const Tensor er = random_plane(16, 16, 503, 0.0f, 5.0f);
    const Tensor w = daw::difficulty_weights(dr, er, cfg);
    c.expect(std::fabs(mean(w) - 1.0) <= 1e-5, "mean(w*) drifted: " +
                                                   std::to_string(mean(w)));

    Tensor raw = hadamard(dr, er);
    raw = spatial::box_blur(raw, cfg.blur_radius);
    for (float& v : raw.values())
        v = 1.0f + static_cast<float>(cfg.alpha) *
                       (std::tanh(v / static_cast<float>(cfg.w_max)) *
                        static_cast<float>(cfg.w_max));
    for (float v : raw.values()) {
        c.expect(v >= 1.0f, "pre-normalization value below 1");
        c.expect(v <= 1.0f + static_cast<float>(cfg.alpha * cfg.w_max) + 1e-6f,
                 "pre-normalization value above 1 + alpha*w_max");
    }
    return c;
}

// ---------------------------------------------------------------- criterion 6
// Straight-line re-implementation of the detail-aware weighting pipeline in
// double precision, compared stage by stage.
namespace trace {

using Map = std::vector<double>;
constexpr std::size_t H = 16, W = 16;

double at(const Map& m, long i, long j) {
    i = std::clamp(i, 0L, static_cast<long>(H) - 1);
    j = std::clamp(j, 0L, static_cast<long>(W) - 1);
    return m[i * W + j];
}

Map quantile_norm(const Map& in, double q_lo, double q_hi) {
    std::vector<double> sorted(in);
    std::sort(sorted.begin(), sorted.end());
    const auto q = [&](double p) {
        const double pos = p * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= sorted.size()) return sorted.back();
        return sorted[lo] + (pos - lo) * (sorted[lo + 1] - sorted[lo]);
    };
    const double a = q(q_lo), b = q(q_hi);
    Map out(in.size(), 0.0);
    if (b <= a) return out;
    for (std::size_t i = 0; i < in.size(); ++i)
        out[i] = std::clamp((in[i] - a) / (b - a), 0.0, 1.0);
    return out;
}

Map box_blur3(const Map& in) {
    Map out(in.size());
    for (long i = 0; i < static_cast<long>(H); ++i)
        for (long j = 0; j < static_cast<long>(W); ++j) {
            double s = 0.0;
            for (long di = -1; di <= 1; ++di)
                for (long dj = -1; dj <= 1; ++dj) s += at(in, i + di, j + dj);
            out[i * W + j] = s / 9.0;
        }
    return out;
}

}  // namespace trace

Check alg1_golden_trace() {
    Check c;
    const Tensor x_h = random_tensor(std::vector<std::size_t>{3, trace::H, trace::W},
                                     600, 0.0f, 1.0f);
    const Tensor x_sr = random_tensor(std::vector<std::size_t>{3, trace::H, trace::W},
                                      601, 0.0f, 1.0f);
    const Tensor e_perc = random_plane(trace::H, trace::W, 602, 0.0f, 0.5f);
    daw::DawConfig cfg;  // p=0.3 alpha=1 w_max=2 blur_radius=3

    const auto compare = [&c](const char* stage, const Tensor& got,
                              const trace::Map& want) {
        double worst = 0.0;
        for (std::size_t i = 0; i < got.numel(); ++i)
            worst = std::max(worst, std::fabs(static_cast<double>(got.data()[i]) -
                                              want[i]));
        c.expect(worst < 1e-6, std::string(stage) + " drifted by " +
                                   std::to_string(worst));
    };

    // stage 1: y <- to_gray(y)
    trace::Map gray(trace::H * trace::W);
    for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = 0.299 * x_h.data()[i] + 0.587 * x_h.data()[i + 256] +
                  0.114 * x_h.data()[i + 512];
    const Tensor lib_gray = to_gray(x_h);
    compare("to_gray", lib_gray, gray);

    // stage 2: D <- box_blur3x3(quantile_norm((S+L+V)/3))
    trace::Map mixed(gray.size());
    for (long i = 0; i < 16; ++i)
        for (long j = 0; j < 16; ++j) {
            const double gx = -trace::at(gray, i - 1, j - 1) +
                              trace::at(gray, i - 1, j + 1) -
                              2 * trace::at(gray, i, j - 1) +
                              2 * trace::at(gray, i, j + 1) -
                              trace::at(gray, i + 1, j - 1) +
                              trace::at(gray, i + 1, j + 1);
            const double gy = -trace::at(gray, i - 1, j - 1) -
                              2 * trace::at(gray, i - 1, j) -
                              trace::at(gray, i - 1, j + 1) +
                              trace::at(gray, i + 1, j - 1) +
                              2 * trace::at(gray, i + 1, j) +
                              trace::at(gray, i + 1, j + 1);
            const double sobel = std::sqrt(gx * gx + gy * gy);
            const double lap = std::fabs(
                4 * trace::at(gray, i, j) - trace::at(gray, i - 1, j) -
                trace::at(gray, i + 1, j) - trace::at(gray, i, j - 1) -
                trace::at(gray, i, j + 1));
            double s = 0.0, s2 = 0.0;
            for (long di = -1; di <= 1; ++di)
                for (long dj = -1; dj <= 1; ++dj) {
                    const double v = trace::at(gray, i + di, j + dj);
                    s += v;
                    s2 += v * v;
                }
            const double var = s2 / 9.0 - (s / 9.0) * (s / 9.0);
            mixed[i * 16 + j] = (sobel + lap + var) / 3.0;
        }
    const trace::Map detail = trace::box_blur3(trace::quantile_norm(mixed, 0.02, 0.98));
    const Tensor lib_detail = spatial::detail_map(lib_gray);
    compare("detail_map", lib_detail, detail);

    // stage 3: E_pix <- L1(y_hat, y), channel mean
    trace::Map e_pix(gray.size());
    for (std::size_t i = 0; i < e_pix.size(); ++i)
        e_pix[i] = (std::fabs(static_cast<double>(x_sr.data()[i]) - x_h.data()[i]) +
                    std::fabs(static_cast<double>(x_sr.data()[i + 256]) -
                              x_h.data()[i + 256]) +
                    std::fabs(static_cast<double>(x_sr.data()[i + 512]) -
                              x_h.data()[i + 512])) /
                   3.0;
    const Tensor lib_epix = daw::pixel_error(x_sr, x_h);
    compare("pixel_error", lib_epix, e_pix);

    // stage 4: E <- quantile_norm((1-p) E_pix + p E_perc)
    trace::Map e_mixed(e_pix.size());
    for (std::size_t i = 0; i < e_pix.size(); ++i)
        e_mixed[i] = 0.7 * e_pix[i] + 0.3 * static_cast<double>(e_perc.data()[i]);
    const trace::Map error = trace::quantile_norm(e_mixed, 0.02, 0.98);
    const Tensor lib_error = daw::mix_error(lib_epix, e_perc, cfg.p);
    compare("mix_error", lib_error, error);

    // stage 5: w* <- mean_norm(1 + alpha * tanh(blur(D .* E) / w_max) * w_max)
    trace::Map prod(error.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = detail[i] * error[i];
    trace::Map raw = trace::box_blur3(prod);
    double raw_mean = 0.0;
    for (double& v : raw) {
        v = 1.0 + cfg.alpha * std::tanh(v / cfg.w_max) * cfg.w_max;
        raw_mean += v;
    }
    raw_mean /= static_cast<double>(raw.size());
    trace::Map wstar(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) wstar[i] = raw[i] / raw_mean;
    const Tensor lib_w = daw::difficulty_weights(lib_detail, lib_error, cfg);
    compare("difficulty_weights", lib_w, wstar);

    // stage 6: L_l2 <- (w* .* (y_hat - y)^2).mean()
    double l2 = 0.0;
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t i = 0; i < wstar.size(); ++i) {
            const double diff = static_cast<double>(x_sr.data()[ch * 256 + i]) -
                                x_h.data()[ch * 256 + i];
            l2 += wstar[i] * diff * diff;
        }
    l2 /= 768.0;
    const double lib_l2 = daw::weighted_mse(x_sr, x_h, lib_w);
    c.expect(std::fabs(lib_l2 - l2) < 1e-6,
             "weighted_l2 drifted by " + std::to_string(std::fabs(lib_l2 - l2)));

    // stage 7: L_lpips <- (resize(w*) .* loss_map).mean() at 8x8
    const Tensor loss_map = random_plane(8, 8, 603, 0.0f, 1.0f);
    std::vector<double> wr(64);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            double fy = (static_cast<double>(i) + 0.5) * 2.0 - 0.5;
            double fx = (static_cast<double>(j) + 0.5) * 2.0 - 0.5;
            fy = std::clamp(fy, 0.0, 15.0);
            fx = std::clamp(fx, 0.0, 15.0);
            const std::size_t y0 = static_cast<std::size_t>(fy);
            const std::size_t x0 = static_cast<std::size_t>(fx);
            const std::size_t y1 = std::min<std::size_t>(y0 + 1, 15);
            const std::size_t x1 = std::min<std::size_t>(x0 + 1, 15);
            const double dy = fy - y0, dx = fx - x0;
            wr[i * 8 + j] =
                (1 - dy) * ((1 - dx) * static_cast<double>(lib_w.at(y0, x0)) +
                            dx * lib_w.at(y0, x1)) +
                dy * ((1 - dx) * static_cast<double>(lib_w.at(y1, x0)) +
                      dx * lib_w.at(y1, x1));
        }
    double wr_mean = 0.0;
    for (double v : wr) wr_mean += v;
    wr_mean /= 64.0;
    double lpips = 0.0;
    for (std::size_t i = 0; i < 64; ++i)
        lpips += wr[i] / wr_mean * static_cast<double>(loss_map.data()[i]);
    lpips /= 64.0;
    const double lib_lpips = daw::weighted_external_loss(loss_map, lib_w);
    c.expect(std::fabs(lib_lpips - lpips) < 1e-6,
             "weighted_external drifted by " +
                 std::to_string(std::fabs(lib_lpips - lpips)));
    return c;
}

// ---------------------------------------------------------------- criterion 7
Check lrrb_gradcheck() {
    Check c;
    for (std::uint64_t seed : {71u, 72u, 73u}) {
        lrrb::LrrbConfig cfg;
        cfg.latent_channels = 2;
        cfg.feature_width = 8;
        cfg.growth = 4;
        cfg.num_blocks = 2;
        cfg.seed = seed;
        lrrb::LrrbParams p = lrrb::lrrb_init(cfg);
        Rng rng(seed + 10);
        for (float& v : p.conv_out.weight.values()) v = rng.uniform(-0.05f, 0.05f);

        const Tensor z_l = random_latent(2, 4, 4, seed + 20);
        const Tensor r = random_latent(2, 4, 4, seed + 30);
        const Tensor target = random_latent(2, 4, 4, seed + 40, -0.2f, 0.2f);

        lrrb::LrrbParams grads = lrrb::lrrb_zeros_like(p);
        lrrb::lrrb_loss_and_grad(p, z_l, r, target, &grads);
        auto pview = lrrb::lrrb_param_view(p);
        auto gview = lrrb::lrrb_param_view(grads);

        const double h = 1e-3;
        double worst = 0.0;
        for (std::size_t i = 0; i < pview.size(); ++i) {
            const float saved = *pview[i];
            *pview[i] = saved + static_cast<float>(h);
            const double up = lrrb::lrrb_loss_and_grad(p, z_l, r, target, nullptr);
            *pview[i] = saved - static_cast<float>(h);
            const double down = lrrb::lrrb_loss_and_grad(p, z_l, r, target, nullptr);
            *pview[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            const double ga = *gview[i];
            worst = std::max(worst, std::fabs(ga - fd) /
                                        std::max({1.0, std::fabs(ga), std::fabs(fd)}));
        }
        c.expect(worst < 1e-3, "seed " + std::to_string(seed) + " worst rel error " +
                                   std::to_string(worst));
    }
    return c;
}

// ---------------------------------------------------------------- criterion 8
Check lrrb_consistency_and_training() {
    Check c;
    lrrb::LrrbConfig cfg;
    cfg.seed = 5;
    const lrrb::LrrbParams fresh = lrrb::lrrb_init(cfg);
    const Tensor z_l = random_latent(cfg.latent_channels, 8, 8, 800);
    const Tensor r = random_latent(cfg.latent_channels, 8, 8, 801);
    const lrrb::RefinementState st = lrrb::refine(z_l, r, fresh);
    c.expect(same_bits(st.z_r, sub(z_l, r)),
             "zero-initialized refinement is not exactly z_L - r");

    lrrb::LrrbParams trained = lrrb::lrrb_init(cfg);
    const auto data = lrrb::make_toy_dataset(8, cfg.latent_channels, 8, 8, 6);
    const lrrb::TrainResult res = lrrb::lrrb_train_toy(data, trained, 200, 1e-2);
    const double ratio = res.losses.back() / res.losses.front();
    c.expect(ratio <= 0.5, "loss ratio " + std::to_string(ratio) + " exceeds 0.5");
    return c;
}

// ---------------------------------------------------------------- criterion 9
Check table4_trend() {
    Check c;
    std::vector<Tensor> hq;
    for (int i = 0; i < 20; ++i) hq.push_back(eval::make_synthetic_hq(64, 64, 9000 + i));

    eval::TrendConfig cfg;
    cfg.seed = 9;
    cfg.sweep = eval::Sweep::lf;
    const auto lf_rows = eval::lfim_trend_report(hq, cfg);
    int violations = 0;
    for (std::size_t i = 1; i < lf_rows.size(); ++i) {
        const double drop = lf_rows[i - 1].psnr_mean - lf_rows[i].psnr_mean;
        if (drop > 1e-12) {
            ++violations;
            c.expect(drop <= 0.02, "LF sweep PSNR drop of " + std::to_string(drop) +
                                       " dB at step " + std::to_string(i));
        }
    }
    c.expect(violations <= 1,
             "LF sweep has " + std::to_string(violations) + " non-monotone steps");

    cfg.sweep = eval::Sweep::hf;
    const auto hf_rows = eval::lfim_trend_report(hq, cfg);
    for (std::size_t i = 1; i < hf_rows.size(); ++i) {
        c.expect(hf_rows[i].hf_energy_mean > hf_rows[i - 1].hf_energy_mean,
                 "HF energy not strictly increasing at step " + std::to_string(i));
        c.expect(hf_rows[i].psnr_mean <= hf_rows[i - 1].psnr_mean + 1e-9,
                 "HF sweep PSNR increased at step " + std::to_string(i));
    }
    return c;
}

// --------------------------------------------------------------- criterion 10
Check hf_error_contracts() {
    Check c;
    const Tensor truth = random_plane(12, 12, 1000, -1.0f, 1.0f);
    const Tensor base = random_plane(12, 12, 1001, -1.0f, 1.0f);
    const Tensor refined = random_plane(12, 12, 1002, -1.0f, 1.0f);

    const Tensor zero = eval::hf_error_map(base, base, truth);
    for (float v : zero.values())
        c.expect(std::fabs(v) < 1e-6f, "identical predictions must give a zero map");

    const Tensor fwd = eval::hf_error_map(base, refined, truth);
    const Tensor rev = eval::hf_error_map(refined, base, truth);
    for (std::size_t i = 0; i < fwd.numel(); ++i)
        c.expect(std::fabs(fwd.data()[i] + rev.data()[i]) < 1e-6f,
                 "swap antisymmetry violated");

    Tensor probe({1, 3});
    probe.data()[0] = static_cast<float>(std::numbers::e) - 1.0f;
    probe.data()[1] = -0.75f;
    probe.data()[2] = 0.75f;
    const Tensor logged = eval::sign_log(probe);
    c.expect(std::fabs(logged.data()[0] - 1.0f) <= 1e-6f, "sign_log(e-1) != 1");
    c.expect(std::fabs(logged.data()[1] + logged.data()[2]) <= 1e-7f,
             "sign_log is not odd");
    return c;
}

// --------------------------------------------------------------- criterion 11
Check metric_anchors() {
    Check c;
    const Tensor a = random_plane(16, 16, 1100);
    Tensor b = a;
    for (float& v : b.values()) v += 0.1f;
    c.expect(std::fabs(eval::psnr(a, b) - 20.0) <= 1e-6,
             "uniform 0.1 diff PSNR: " + std::to_string(eval::psnr(a, b)));

    c.expect(std::fabs(eval::ssim(a, a) - 1.0) <= 1e-6, "ssim(a,a) != 1");

    for (int i = 0; i < 5; ++i) {
        const Tensor x = random_plane(16, 16, 1200 + i);
        const Tensor y = random_plane(16, 16, 1300 + i);
        c.expect(std::fabs(eval::ssim(x, y) - eval::ssim(y, x)) <= 1e-6,
                 "ssim asymmetry");
    }
    return c;
}

// --------------------------------------------------------------- criterion 12
Check format_round_trips() {
    Check c;
    const fs::path dir = fs::temp_directory_path() / "fidesr_acceptance";
    fs::create_directories(dir);

    Rng rng(1400);
    for (int i = 0; i < 50; ++i) {
        std::vector<std::size_t> shape;
        const int rank = 2 + static_cast<int>(rng.uniform() * 3.0f);
        for (int k = 0; k < rank; ++k)
            shape.push_back(1 + static_cast<std::size_t>(rng.uniform() * 7.0f));
        Tensor t{std::span<const std::size_t>(shape)};
        for (float& v : t.values()) v = rng.uniform(-50.0f, 50.0f);
        tensor_write_ft32(t, dir / "t.ft32");
        const Tensor back = tensor_read_ft32(dir / "t.ft32");
        c.expect(same_bits(back, t), "FT32 round trip not bit exact");
    }

    if (g_cli_path.empty()) {
        c.expect(false, "FIDESR_CLI not set (or pass the binary path as argv[1])");
        return c;
    }

    const Tensor z = random_latent(3, 12, 12, 1500);
    tensor_write_ft32(z, dir / "z.ft32");
    PixelImage lq;
    lq.width = 24;
    lq.height = 24;
    lq.channels = 1;
    lq.samples.resize(24 * 24);
    Rng prng(1501);
    for (float& v : lq.samples) v = prng.uniform(0.2f, 0.8f);
    image_write_png(lq, dir / "lq.png");
    {
        std::ofstream f(dir / "zero.cfg");
        f << "lf_alpha = 0\nhf_beta = 0\n";
    }
    const std::string cmd = g_cli_path + " lfim --latent " + (dir / "z.ft32").string() +
                            " --lq " + (dir / "lq.png").string() + " --config " +
                            (dir / "zero.cfg").string() + " --out " +
                            (dir / "zf.ft32").string() + " > " +
                            (dir / "out.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
#ifdef __unix__
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
    const int code = status;
#endif
    c.expect(code == 0, "cli lfim exited with " + std::to_string(code));
    if (code == 0) {
        std::ifstream fa(dir / "z.ft32", std::ios::binary);
        std::ifstream fb(dir / "zf.ft32", std::ios::binary);
        const std::string ca{std::istreambuf_iterator<char>(fa),
                             std::istreambuf_iterator<char>()};
        const std::string cb{std::istreambuf_iterator<char>(fb),
                             std::istreambuf_iterator<char>()};
        c.expect(!ca.empty() && ca == cb,
                 "cli lfim zero-intensity output differs from input");
    }
    return c;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Check()> run;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) {
        g_cli_path = argv[1];
    } else if (const char* env = std::getenv("FIDESR_CLI")) {
        g_cli_path = env;
    }

    const std::vector<Criterion> criteria = {
        {1, "lfim zero-intensity identity (bitwise, 100 latents)", 5.0, lfim_identity},
        {2, "butterworth decomposition complementarity (<= 1e-5)", 5.0, complementarity},
        {3, "butterworth half-power anchor (0.5 +- 1e-6)", 1.0, butterworth_half_power},
        {4, "fft matches direct-DFT oracle (rel 1e-4, non-pow2 sizes)", 10.0, fft_oracle},
        {5, "daw neutrality, mean-1 and pre-normalization bounds", 2.0, daw_neutrality},
        {6, "weighting pipeline golden trace (per stage < 1e-6)", 1.0, alg1_golden_trace},
        {7, "lrrb gradients vs central differences (rel 1e-3, 3 seeds)", 30.0,
         lrrb_gradcheck},
        {8, "refinement identity and toy training (ratio <= 0.5)", 60.0,
         lrrb_consistency_and_training},
        {9, "injection sweep directions (LF: PSNR up; HF: energy up, PSNR down)", 120.0,
         table4_trend},
        {10, "hf error-map contracts and sign-log anchors", 2.0, hf_error_contracts},
        {11, "metric anchors (PSNR 20 dB, SSIM self/symmetry)", 2.0, metric_anchors},
        {12, "ft32 + cli zero-injection round trips", 2.0, format_round_trips},
    };

    int failures = 0;
    for (const Criterion& cr : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Check result;
        try {
            result = cr.run();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        const bool in_budget = elapsed < cr.budget_seconds;
        const bool pass = result.ok && in_budget;
        std::printf("[%s] %02d %s (%.2fs < %.0fs)\n", pass ? "PASS" : "FAIL", cr.id,
                    cr.name, elapsed, cr.budget_seconds);
        if (!result.ok) std::printf("       %s\n", result.detail.c_str());
        if (!in_budget) std::printf("       runtime budget exceeded\n");
        if (!pass) ++failures;
    }
    std::printf("ACCEPTANCE: %zu/%zu criteria passed\n", criteria.size() - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
