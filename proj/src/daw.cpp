#include "fidesr/daw.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "fidesr/error.hpp"
#include "fidesr/kernels.hpp"
#include "fidesr/spatial_filters.hpp"
#include "fidesr/tensor_io.hpp"

namespace fidesr::daw {

namespace {

void require_same_spatial(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) throw ShapeError(std::string(op) + ": shape mismatch");
}

std::pair<std::size_t, std::size_t> spatial_dims(const Tensor& t) {
    if (t.rank() == 2) return {t.dim(0), t.dim(1)};
    if (t.rank() == 3) return {t.dim(1), t.dim(2)};
    throw ShapeError("expected rank-2 or rank-3 tensor");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void DawConfig::validate() const {
    if (p < 0.0 || p > 1.0) throw ParamError("daw config: p must be in [0,1]");
    if (alpha < 0.0) throw ParamError("daw config: alpha must be >= 0");
    if (w_max <= 0.0) throw ParamError("daw config: w_max must be > 0");
    if (blur_radius == 0 || blur_radius % 2 == 0)
        throw ParamError("daw config: blur_radius must be odd");
}

DawConfig daw_config_from_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path.string());
    DawConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("daw config line " + std::to_string(lineno) +
                              ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        try {
            if (key == "p")
                cfg.p = std::stod(value);
            else if (key == "alpha")
                cfg.alpha = std::stod(value);
            else if (key == "w_max")
                cfg.w_max = std::stod(value);
            else if (key == "blur_radius")
                cfg.blur_radius = static_cast<std::size_t>(std::stoul(value));
            else
                throw ConfigError("daw config: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ConfigError("daw config: bad value for '" + key + "'");
        }
    }
    try {
        cfg.validate();
    } catch (const ParamError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

Tensor pixel_error(const Tensor& x_sr, const Tensor& x_h) {
    require_same_spatial(x_sr, x_h, "pixel_error");
    const auto [h, w] = spatial_dims(x_sr);
    Tensor out({h, w});
    if (x_sr.rank() == 2) {
        kernels::table().abs_diff(x_sr.data(), x_h.data(), out.data(), out.numel());
        return out;
    }
    const std::size_t channels = x_sr.dim(0);
    Tensor tmp({h, w});
    for (std::size_t c = 0; c < channels; ++c) {
        kernels::table().abs_diff(x_sr.channel(c).data(), x_h.channel(c).data(),
                                  tmp.data(), tmp.numel());
        kernels::table().axpy(1.0f / static_cast<float>(channels), tmp.data(),
                              out.data(), out.numel());
    }
    return out;
}

Tensor mix_error(const Tensor& e_pix, const Tensor& e_perc, double p) {
    if (e_pix.rank() != 2 || e_perc.rank() != 2)
        throw ShapeError("mix_error expects rank-2 maps");
    require_same_spatial(e_pix, e_perc, "mix_error");
    if (p < 0.0 || p > 1.0) throw ParamError("mix_error: p must be in [0,1]");

    Tensor mixed({e_pix.dim(0), e_pix.dim(1)});
    const float fp = static_cast<float>(p);
    for (std::size_t i = 0; i < mixed.numel(); ++i)
        mixed.data()[i] = (1.0f - fp) * e_pix.data()[i] + fp * e_perc.data()[i];
    return spatial::quantile_norm(mixed);
}

Tensor difficulty_weights(const Tensor& detail, const Tensor& error,
                          const DawConfig& cfg) {
    if (detail.rank() != 2 || error.rank() != 2)
        throw ShapeError("difficulty_weights expects rank-2 maps");
    require_same_spatial(detail, error, "difficulty_weights");
    cfg.validate();

    Tensor w = hadamard(detail, error);
    w = spatial::box_blur(w, cfg.blur_radius);
    const float w_max = static_cast<float>(cfg.w_max);
    const float alpha = static_cast<float>(cfg.alpha);
    for (float& v : w.values()) {
        const float capped = std::tanh(v / w_max) * w_max;
        v = 1.0f + alpha * capped;
    }
    const double m = mean(w);
    return scale(w, static_cast<float>(1.0 / m));
}

double weighted_mse(const Tensor& x_sr, const Tensor& x_h, const Tensor& w) {
    require_same_spatial(x_sr, x_h, "weighted_mse");
    if (w.rank() != 2) throw ShapeError("weighted_mse expects a rank-2 weight map");
    const auto [h, ww] = spatial_dims(x_sr);
    if (w.dim(0) != h || w.dim(1) != ww)
        throw ShapeError("weighted_mse: weight map dims mismatch");

    double acc = 0.0;
    if (x_sr.rank() == 2) {
        acc = kernels::table().weighted_sqdiff_sum(w.data(), x_sr.data(), x_h.data(),
                                                   w.numel());
    } else {
        for (std::size_t c = 0; c < x_sr.dim(0); ++c)
            acc += kernels::table().weighted_sqdiff_sum(
                w.data(), x_sr.channel(c).data(), x_h.channel(c).data(), w.numel());
    }
    return acc / static_cast<double>(x_sr.numel());
}

double weighted_external_loss(const Tensor& loss_map, const Tensor& w) {
    if (loss_map.rank() != 2 || w.rank() != 2)
        throw ShapeError("weighted_external_loss expects rank-2 maps");
    Tensor rw = spatial::resize_bilinear(w, loss_map.dim(0), loss_map.dim(1));
    const double m = mean(rw);
    rw = scale(rw, static_cast<float>(1.0 / m));
    const double acc = kernels::table().dot(rw.data(), loss_map.data(), rw.numel());
    return acc / static_cast<double>(loss_map.numel());
}

double total_loss(double l_mse, double l_perc, double l_reg, double lambda_mse,
                  double lambda_lpips, double lambda_reg) {
    return lambda_mse * l_mse + lambda_lpips * l_perc + lambda_reg * l_reg;
}

Tensor perceptual_proxy(const Tensor& x_sr, const Tensor& x_h) {
    require_same_spatial(x_sr, x_h, "perceptual_proxy");
    const Tensor a = x_sr.rank() == 3 ? to_gray(x_sr) : x_sr;
    const Tensor b = x_h.rank() == 3 ? to_gray(x_h) : x_h;

    static constexpr double kSigmas[3] = {1.0, 2.0, 4.0};
    Tensor out({a.dim(0), a.dim(1)});
    Tensor diff({a.dim(0), a.dim(1)});
    for (double sigma : kSigmas) {
        const Tensor ba = spatial::gaussian_blur(a, sigma);
        const Tensor bb = spatial::gaussian_blur(b, sigma);
        kernels::table().abs_diff(ba.data(), bb.data(), diff.data(), diff.numel());
        kernels::table().axpy(1.0f / 3.0f, diff.data(), out.data(), out.numel());
    }
    return out;
}

}  // namespace fidesr::daw
