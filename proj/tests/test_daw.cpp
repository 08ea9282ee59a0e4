#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "fidesr/daw.hpp"
#include "fidesr/error.hpp"
#include "fidesr/rng.hpp"
#include "fidesr/spatial_filters.hpp"

using namespace fidesr;
using namespace fidesr::daw;

namespace {

Tensor random_map(std::size_t h, std::size_t w, std::uint64_t seed, float lo = 0.0f,
                  float hi = 1.0f) {
    Rng rng(seed);
    Tensor t({h, w});
    for (float& v : t.values()) v = rng.uniform(lo, hi);
    return t;
}

// Straight-line recomputation of the pre-normalization weights:
//   raw = 1 + alpha * tanh(blur(D .* E) / w_max) * w_max
std::vector<double> raw_weights_reference(const Tensor& d, const Tensor& e,
                                          const DawConfig& cfg) {
    const std::size_t h = d.dim(0), w = d.dim(1);
    const long r = static_cast<long>(cfg.blur_radius / 2);
    std::vector<double> prod(h * w);
    for (std::size_t i = 0; i < h * w; ++i)
        prod[i] = static_cast<double>(d.data()[i]) * e.data()[i];
    std::vector<double> raw(h * w);
    for (long i = 0; i < static_cast<long>(h); ++i)
        for (long j = 0; j < static_cast<long>(w); ++j) {
            double acc = 0.0;
            for (long di = -r; di <= r; ++di)
                for (long dj = -r; dj <= r; ++dj) {
                    long ii = std::clamp(i + di, 0L, static_cast<long>(h) - 1);
                    long jj = std::clamp(j + dj, 0L, static_cast<long>(w) - 1);
                    acc += prod[ii * w + jj];
                }
            acc /= static_cast<double>(cfg.blur_radius * cfg.blur_radius);
            raw[i * w + j] = 1.0 + cfg.alpha * std::tanh(acc / cfg.w_max) * cfg.w_max;
        }
    return raw;
}

}  // namespace

TEST_CASE("pixel error") {
    const Tensor a = random_map(4, 5, 1);
    const Tensor zero = pixel_error(a, a);
    for (float v : zero.values()) CHECK(v == 0.0f);

    Tensor b = a;
    for (float& v : b.values()) v += 0.2f;
    const Tensor off = pixel_error(b, a);
    for (float v : off.values()) CHECK(v == doctest::Approx(0.2f).epsilon(1e-5));

    Tensor sr({3, 1, 1}, 0.0f);
    Tensor hq({3, 1, 1}, 0.0f);
    sr.at(0, 0, 0) = 0.3f;
    const Tensor chan = pixel_error(sr, hq);
    CHECK(chan.at(0, 0) == doctest::Approx(0.1f).epsilon(1e-6));

    CHECK_THROWS_AS(pixel_error(a, Tensor({4, 4}, 0.0f)), ShapeError);
}

TEST_CASE("mix error endpoints and mixing") {
    const Tensor e_pix = random_map(6, 6, 2);
    const Tensor e_perc = random_map(6, 6, 3);

    const Tensor at0 = mix_error(e_pix, e_perc, 0.0);
    const Tensor want0 = spatial::quantile_norm(e_pix);
    for (std::size_t i = 0; i < at0.numel(); ++i)
        CHECK(at0.data()[i] == want0.data()[i]);

    const Tensor at1 = mix_error(e_pix, e_perc, 1.0);
    const Tensor want1 = spatial::quantile_norm(e_perc);
    for (std::size_t i = 0; i < at1.numel(); ++i)
        CHECK(at1.data()[i] == want1.data()[i]);

    Tensor mixed({6, 6});
    for (std::size_t i = 0; i < 36; ++i)
        mixed.data()[i] = 0.75f * e_pix.data()[i] + 0.25f * e_perc.data()[i];
    const Tensor atq = mix_error(e_pix, e_perc, 0.25);
    const Tensor wantq = spatial::quantile_norm(mixed);
    for (std::size_t i = 0; i < atq.numel(); ++i)
        CHECK(atq.data()[i] == doctest::Approx(wantq.data()[i]).epsilon(1e-6));

    CHECK_THROWS_AS(mix_error(e_pix, e_perc, 1.5), ParamError);
    CHECK_THROWS_AS(mix_error(e_pix, e_perc, -0.1), ParamError);
}

TEST_CASE("difficulty weights collapse to uniform") {
    DawConfig cfg;
    const Tensor zero({5, 5}, 0.0f);
    const Tensor e = random_map(5, 5, 4);

    const Tensor w1 = difficulty_weights(zero, e, cfg);
    for (float v : w1.values()) CHECK(v == doctest::Approx(1.0f).epsilon(1e-6));

    const Tensor d = random_map(5, 5, 5);
    const Tensor w2 = difficulty_weights(d, zero, cfg);
    for (float v : w2.values()) CHECK(v == doctest::Approx(1.0f).epsilon(1e-6));

    // constant product normalizes away
    const Tensor dc({5, 5}, 0.5f);
    const Tensor ec({5, 5}, 0.8f);
    const Tensor w3 = difficulty_weights(dc, ec, cfg);
    for (float v : w3.values()) CHECK(v == doctest::Approx(1.0f).epsilon(1e-6));
}

TEST_CASE("difficulty weights formula, mean and bounds") {
    DawConfig cfg;
    cfg.alpha = 1.0;
    cfg.w_max = 2.0;
    cfg.blur_radius = 1;  // pointwise: exercises the tanh chain alone

    // two-pixel map: one silent pixel, one strong
    Tensor d({1, 2});
    Tensor e({1, 2});
    d.at(0, 0) = 0.0f;
    d.at(0, 1) = 1.0f;
    e.at(0, 0) = 1.0f;
    e.at(0, 1) = 50.0f;
    const Tensor w = difficulty_weights(d, e, cfg);
    const double raw0 = 1.0;
    const double raw1 = 1.0 + std::tanh(50.0 / 2.0) * 2.0;
    const double m = 0.5 * (raw0 + raw1);
    CHECK(w.at(0, 0) == doctest::Approx(raw0 / m).epsilon(1e-6));
    CHECK(w.at(0, 1) == doctest::Approx(raw1 / m).epsilon(1e-6));

    // random maps: mean-1 and pre-normalization bounds via the reference chain
    cfg.blur_radius = 3;
    cfg.alpha = 1.3;
    const Tensor dr = random_map(16, 16, 6);
    const Tensor er = random_map(16, 16, 7, 0.0f, 4.0f);
    const Tensor wr = difficulty_weights(dr, er, cfg);
    CHECK(mean(wr) == doctest::Approx(1.0).epsilon(1e-5));
    for (float v : wr.values()) CHECK(v > 0.0f);

    const auto raw = raw_weights_reference(dr, er, cfg);
    const double raw_mean =
        std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(raw[i] >= 1.0);
        CHECK(raw[i] <= 1.0 + cfg.alpha * cfg.w_max);
        CHECK(wr.data()[i] == doctest::Approx(raw[i] / raw_mean).epsilon(1e-4));
    }
}

TEST_CASE("difficulty weights monotone in the product at a pixel") {
    DawConfig cfg;
    const Tensor d = random_map(8, 8, 8);
    const Tensor e = random_map(8, 8, 9);
    auto raw = raw_weights_reference(d, e, cfg);

    Tensor d2 = d;
    d2.at(3, 3) = std::min(1.0f, d.at(3, 3) + 0.5f);
    const auto raw2 = raw_weights_reference(d2, e, cfg);
    CHECK(raw2[3 * 8 + 3] >= raw[3 * 8 + 3]);
}

TEST_CASE("difficulty weights permutation equivariance (pointwise blur)") {
    DawConfig cfg;
    cfg.blur_radius = 1;
    const Tensor d = random_map(4, 4, 10);
    const Tensor e = random_map(4, 4, 11);
    const Tensor w = difficulty_weights(d, e, cfg);

    // reverse every pixel
    Tensor dp({4, 4}), ep({4, 4});
    for (std::size_t i = 0; i < 16; ++i) {
        dp.data()[i] = d.data()[15 - i];
        ep.data()[i] = e.data()[15 - i];
    }
    const Tensor wp = difficulty_weights(dp, ep, cfg);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(wp.data()[i] == doctest::Approx(w.data()[15 - i]).epsilon(1e-6));
}

TEST_CASE("weighted mse") {
    const Tensor a = random_map(6, 7, 12);
    const Tensor b = random_map(6, 7, 13);
    const Tensor uniform({6, 7}, 1.0f);

    double plain = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        const double diff = static_cast<double>(a.data()[i]) - b.data()[i];
        plain += diff * diff;
    }
    plain /= static_cast<double>(a.numel());
    CHECK(weighted_mse(a, b, uniform) == doctest::Approx(plain).epsilon(1e-7));
    CHECK(weighted_mse(a, a, random_map(6, 7, 14)) == 0.0);

    Tensor x({1, 2}), y({1, 2}), w({1, 2});
    x.at(0, 0) = 1.0f;
    x.at(0, 1) = 0.5f;
    y.at(0, 0) = 0.0f;
    y.at(0, 1) = 0.5f;
    w.at(0, 0) = 1.5f;
    w.at(0, 1) = 0.5f;
    CHECK(weighted_mse(x, y, w) == doctest::Approx(0.75).epsilon(1e-7));

    CHECK_THROWS_AS(weighted_mse(a, b, Tensor({3, 3}, 1.0f)), ShapeError);
}

TEST_CASE("weighted external loss") {
    const Tensor w = random_map(8, 8, 15, 0.5f, 1.5f);

    const Tensor const_loss({5, 5}, 0.37f);
    CHECK(weighted_external_loss(const_loss, w) == doctest::Approx(0.37).epsilon(1e-6));

    const Tensor uniform_w({8, 8}, 2.0f);
    const Tensor arbitrary = random_map(5, 5, 16);
    CHECK(weighted_external_loss(arbitrary, uniform_w) ==
          doctest::Approx(mean(arbitrary)).epsilon(1e-6));

    const Tensor single({1, 1}, 0.42f);
    CHECK(weighted_external_loss(single, random_map(2, 2, 17, 0.5f, 2.0f)) ==
          doctest::Approx(0.42).epsilon(1e-6));
}

TEST_CASE("total loss") {
    CHECK(total_loss(0.5, 0.1, 0.0) == doctest::Approx(0.7));
    CHECK(total_loss(0.0, 0.0, 0.0) == 0.0);
    CHECK(total_loss(0.3, 0.4, 123.0, 1.0, 2.0, 0.0) == doctest::Approx(1.1));
}

TEST_CASE("perceptual proxy") {
    const Tensor a = random_map(12, 12, 18);
    const Tensor same = perceptual_proxy(a, a);
    for (float v : same.values()) CHECK(v == 0.0f);

    const Tensor b = random_map(12, 12, 19);
    const Tensor proxy = perceptual_proxy(a, b);
    for (float v : proxy.values()) CHECK(v >= 0.0f);
}

TEST_CASE("daw config file") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fidesr_daw_cfg";
    fs::create_directories(dir);

    {
        std::ofstream f(dir / "good.cfg");
        f << "p = 0.4\nalpha = 2.0\n# comment\nw_max = 1.5\nblur_radius = 5\n";
    }
    const DawConfig cfg = daw_config_from_file(dir / "good.cfg");
    CHECK(cfg.p == doctest::Approx(0.4));
    CHECK(cfg.alpha == doctest::Approx(2.0));
    CHECK(cfg.w_max == doctest::Approx(1.5));
    CHECK(cfg.blur_radius == 5);

    {
        std::ofstream f(dir / "bad.cfg");
        f << "p = 0.4\nbogus_key = 1\n";
    }
    CHECK_THROWS_WITH_AS(daw_config_from_file(dir / "bad.cfg"),
                         doctest::Contains("bogus_key"), ConfigError);

    {
        std::ofstream f(dir / "range.cfg");
        f << "p = 1.5\n";
    }
    CHECK_THROWS_AS(daw_config_from_file(dir / "range.cfg"), ConfigError);
}
