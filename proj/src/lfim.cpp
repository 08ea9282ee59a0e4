#include "fidesr/lfim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "fidesr/error.hpp"
#include "fidesr/freq.hpp"
#include "fidesr/kernels.hpp"
#include "fidesr/spatial_filters.hpp"

namespace fidesr::lfim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("lfim config: bad boolean for '" + key + "'");
}

void require_latent(const Tensor& z, const char* op) {
    if (z.rank() != 3) throw ShapeError(std::string(op) + " expects a C x H x W tensor");
}

void require_gate_shape(const Tensor& z, const Tensor& m_sp, const char* op) {
    if (m_sp.rank() != 2 || m_sp.dim(0) != z.dim(1) || m_sp.dim(1) != z.dim(2))
        throw ShapeError(std::string(op) + ": spatial gate dims mismatch");
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void LfimConfig::validate() const {
    if (lf_alpha < 0.0f) throw ConfigError("lfim config: lf_alpha must be >= 0");
    if (hf_beta < 0.0f) throw ConfigError("lfim config: hf_beta must be >= 0");
    if (lf_cutoff <= 0.0 || lf_cutoff > 1.0)
        throw ConfigError("lfim config: lf_cutoff must be in (0, 1]");
    if (hf_cutoff <= 0.0 || hf_cutoff > 1.0)
        throw ConfigError("lfim config: hf_cutoff must be in (0, 1]");
    if (order < 1) throw ConfigError("lfim config: order must be >= 1");
    if (gamma < 0.0f) throw ConfigError("lfim config: gamma must be >= 0");
    if (channel_temperature <= 0.0)
        throw ConfigError("lfim config: channel_temperature must be > 0");
}

LfimConfig lfim_config_from_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path.string());
    LfimConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("lfim config line " + std::to_string(lineno) +
                              ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        try {
            if (key == "lf_alpha")
                cfg.lf_alpha = std::stof(value);
            else if (key == "hf_beta")
                cfg.hf_beta = std::stof(value);
            else if (key == "lf_cutoff")
                cfg.lf_cutoff = std::stod(value);
            else if (key == "hf_cutoff")
                cfg.hf_cutoff = std::stod(value);
            else if (key == "order")
                cfg.order = std::stoi(value);
            else if (key == "gamma")
                cfg.gamma = std::stof(value);
            else if (key == "erosion_radius")
                cfg.erosion_radius = static_cast<std::size_t>(std::stoul(value));
            else if (key == "hf_use_diff")
                cfg.hf_use_diff = parse_bool(value, key);
            else if (key == "channel_temperature")
                cfg.channel_temperature = std::stod(value);
            else
                throw ConfigError("lfim config: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ConfigError("lfim config: bad value for '" + key + "'");
        } catch (const std::out_of_range&) {
            throw ConfigError("lfim config: value out of range for '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

Tensor spatial_gate_lf(const Tensor& detail, std::size_t erosion_radius) {
    if (detail.rank() != 2) throw ShapeError("spatial_gate_lf expects a rank-2 map");
    Tensor gate({detail.dim(0), detail.dim(1)});
    for (std::size_t i = 0; i < gate.numel(); ++i)
        gate.data()[i] = 1.0f - detail.data()[i];
    return spatial::erode(gate, erosion_radius);
}

Tensor spatial_gate_hf(const Tensor& detail, float gamma) {
    if (detail.rank() != 2) throw ShapeError("spatial_gate_hf expects a rank-2 map");
    Tensor gate({detail.dim(0), detail.dim(1)});
    if (gamma == 0.0f) {
        for (float& v : gate.values()) v = 1.0f;
        return gate;
    }
    for (std::size_t i = 0; i < gate.numel(); ++i)
        gate.data()[i] = std::pow(detail.data()[i], gamma);
    return gate;
}

std::vector<double> channel_gate(const Tensor& z, const LfimConfig& cfg, Branch branch) {
    require_latent(z, "channel_gate");
    cfg.validate();
    const std::vector<double> rho = freq::hf_energy_ratio(z, cfg.hf_cutoff, cfg.order);
    const double med = median(rho);
    std::vector<double> gate(rho.size());
    for (std::size_t c = 0; c < rho.size(); ++c) {
        const double hf = 1.0 / (1.0 + std::exp(-(rho[c] - med) / cfg.channel_temperature));
        gate[c] = branch == Branch::hf ? hf : 1.0 - hf;
    }
    return gate;
}

Tensor inject_component(const Tensor& z, const Tensor& delta, const Tensor& m_sp,
                        const std::vector<double>& m_ch, float intensity) {
    require_latent(z, "inject_component");
    if (!z.same_shape(delta)) throw ShapeError("inject_component: delta shape mismatch");
    require_gate_shape(z, m_sp, "inject_component");
    if (m_ch.size() != z.dim(0))
        throw ShapeError("inject_component: channel gate length mismatch");

    Tensor out = z;
    for (std::size_t c = 0; c < z.dim(0); ++c) {
        const float a = intensity * static_cast<float>(m_ch[c]);
        kernels::table().gated_axpy(a, m_sp.data(), delta.channel(c).data(),
                                    out.channel(c).data(), m_sp.numel());
    }
    return out;
}

Tensor inject_lf(const Tensor& z, const Tensor& detail, const LfimConfig& cfg) {
    require_latent(z, "inject_lf");
    require_gate_shape(z, detail, "inject_lf");
    cfg.validate();
    if (cfg.lf_alpha == 0.0f) return z;

    const Tensor m_sp = spatial_gate_lf(detail, cfg.erosion_radius);
    const std::vector<double> m_ch = channel_gate(z, cfg, Branch::lf);
    const Tensor delta_lp = freq::filter_latent(z, cfg.lf_cutoff, cfg.order, freq::Pass::low);
    return inject_component(z, delta_lp, m_sp, m_ch, cfg.lf_alpha);
}

Tensor inject_hf(const Tensor& z, const Tensor& detail, const LfimConfig& cfg,
                 const Tensor* z_ref) {
    require_latent(z, "inject_hf");
    require_gate_shape(z, detail, "inject_hf");
    cfg.validate();
    if (cfg.hf_use_diff) {
        if (z_ref == nullptr)
            throw ParamError("inject_hf: hf_use_diff requires a reference latent");
        if (!z_ref->same_shape(z))
            throw ShapeError("inject_hf: reference latent shape mismatch");
    }
    if (cfg.hf_beta == 0.0f) return z;

    Tensor delta_hp = freq::filter_latent(z, cfg.hf_cutoff, cfg.order, freq::Pass::high);
    if (cfg.hf_use_diff) {
        const Tensor ref_hp =
            freq::filter_latent(*z_ref, cfg.hf_cutoff, cfg.order, freq::Pass::high);
        delta_hp = sub(delta_hp, ref_hp);
    }
    const Tensor m_sp = spatial_gate_hf(detail, cfg.gamma);
    const std::vector<double> m_ch = channel_gate(z, cfg, Branch::hf);
    return inject_component(z, delta_hp, m_sp, m_ch, cfg.hf_beta);
}

Tensor lfim_apply(const Tensor& z_r, const Tensor& detail_lq, const LfimConfig& cfg,
                  const Tensor* z_ref) {
    require_latent(z_r, "lfim_apply");
    if (detail_lq.rank() != 2) throw ShapeError("lfim_apply expects a rank-2 detail map");
    const Tensor detail = spatial::resize_area(detail_lq, z_r.dim(1), z_r.dim(2));
    const Tensor z1 = inject_lf(z_r, detail, cfg);
    return inject_hf(z1, detail, cfg, z_ref);
}

}  // namespace fidesr::lfim
