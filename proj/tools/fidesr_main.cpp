// fidesr command line: detail maps, detail-aware weighting, latent frequency
// injection, residual refinement, and the trend/error reports.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "fidesr/daw.hpp"
#include "fidesr/error.hpp"
#include "fidesr/eval.hpp"
#include "fidesr/kernels.hpp"
#include "fidesr/lfim.hpp"
#include "fidesr/lrrb.hpp"
#include "fidesr/spatial_filters.hpp"
#include "fidesr/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace fidesr;

namespace {

void print6(const char* label, double v) { std::printf("%s %.6f\n", label, v); }

Tensor load_gray_png(const fs::path& path) {
    return to_gray(image_to_tensor(image_read_png(path)));
}

int run_detail_map(const fs::path& in, const fs::path& out, const fs::path& png) {
    const Tensor gray = load_gray_png(in);
    const Tensor map = spatial::detail_map(gray);
    tensor_write_ft32(map, out);
    if (!png.empty()) image_write_png(image_from_tensor(map), png);
    return 0;
}

int run_daw(const fs::path& sr_path, const fs::path& hq_path, const fs::path& perc_path,
            const fs::path& cfg_path, const fs::path& out) {
    const Tensor sr = image_to_tensor(image_read_png(sr_path));
    const Tensor hq = image_to_tensor(image_read_png(hq_path));
    if (!sr.same_shape(hq))
        throw ShapeError("daw: image sizes differ between " + sr_path.string() +
                         " and " + hq_path.string());
    const daw::DawConfig cfg = daw::daw_config_from_file(cfg_path);

    const Tensor detail = spatial::detail_map(to_gray(hq));
    const Tensor e_pix = daw::pixel_error(sr, hq);

    Tensor e_perc;
    bool external = false;
    if (!perc_path.empty()) {
        e_perc = tensor_read_ft32(perc_path);
        if (e_perc.rank() != 2 || e_perc.dim(0) != e_pix.dim(0) ||
            e_perc.dim(1) != e_pix.dim(1))
            throw ShapeError("daw: perceptual map dims mismatch: " + perc_path.string());
        external = true;
    } else {
        std::printf("# perceptual map: builtin multiscale-blur proxy\n");
        e_perc = daw::perceptual_proxy(sr, hq);
    }

    const Tensor error = daw::mix_error(e_pix, e_perc, cfg.p);
    const Tensor weights = daw::difficulty_weights(detail, error, cfg);
    tensor_write_ft32(weights, out);

    print6("weighted_l2", daw::weighted_mse(sr, hq, weights));
    if (external) print6("weighted_external", daw::weighted_external_loss(e_perc, weights));
    return 0;
}

int run_lfim(const fs::path& latent_path, const fs::path& lq_path,
             const fs::path& cfg_path, const fs::path& ref_path, const fs::path& out) {
    const Tensor z = tensor_read_ft32(latent_path);
    if (z.rank() != 3)
        throw ShapeError("lfim: latent must be rank 3: " + latent_path.string());
    const lfim::LfimConfig cfg = lfim::lfim_config_from_file(cfg_path);

    Tensor z_ref;
    const Tensor* ref = nullptr;
    if (!ref_path.empty()) {
        z_ref = tensor_read_ft32(ref_path);
        ref = &z_ref;
    }
    if (cfg.hf_use_diff && ref == nullptr)
        throw ParamError("lfim: hf_use_diff requires --ref");

    const Tensor detail = spatial::detail_map(load_gray_png(lq_path));

    const std::vector<double> lf_gate = lfim::channel_gate(z, cfg, lfim::Branch::lf);
    const std::vector<double> hf_gate = lfim::channel_gate(z, cfg, lfim::Branch::hf);
    for (std::size_t c = 0; c < lf_gate.size(); ++c)
        std::printf("channel %zu lf_gate %.6f hf_gate %.6f\n", c, lf_gate[c], hf_gate[c]);

    const Tensor z_f = lfim::lfim_apply(z, detail, cfg, ref);
    tensor_write_ft32(z_f, out);

    const double norm =
        std::sqrt(kernels::table().sqdiff_sum(z_f.data(), z.data(), z.numel()));
    print6("delta_l2", norm);
    return 0;
}

int run_lrrb_demo(std::uint64_t seed, std::size_t steps, double lr,
                  const fs::path& out_dir) {
    lrrb::LrrbConfig cfg;
    cfg.seed = seed;
    lrrb::LrrbParams params = lrrb::lrrb_init(cfg);
    const auto data = lrrb::make_toy_dataset(8, cfg.latent_channels, 8, 8, seed + 1);

    const lrrb::TrainResult result = lrrb::lrrb_train_toy(data, params, steps, lr);
    lrrb::lrrb_save(params, out_dir);

    std::string csv = "step,loss\n";
    for (std::size_t i = 0; i < result.losses.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", i, result.losses[i]);
        csv += buf;
    }
    write_file_atomic(out_dir / "loss.csv", csv.data(), csv.size());

    print6("initial_loss", result.losses.front());
    print6("final_loss", result.losses.back());
    print6("loss_ratio", result.losses.back() / result.losses.front());
    return 0;
}

int run_refine(const fs::path& zl_path, const fs::path& r_path, const fs::path& params_dir,
               const fs::path& out) {
    const Tensor z_l = tensor_read_ft32(zl_path);
    const Tensor r = tensor_read_ft32(r_path);
    const lrrb::LrrbParams params = lrrb::lrrb_load(params_dir);
    const lrrb::RefinementState st = lrrb::refine(z_l, r, params);
    tensor_write_ft32(st.z_r, out);
    print6("max_abs_delta_r", max_abs(st.delta_r));
    return 0;
}

int run_trend(const fs::path& hq_dir, const fs::path& out, const std::string& sweep,
              std::uint64_t seed) {
    if (!fs::is_directory(hq_dir))
        throw IoError("trend: not a directory: " + hq_dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(hq_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<Tensor> images;
    images.reserve(files.size());
    for (const fs::path& f : files) images.push_back(load_gray_png(f));
    if (images.size() < 10)
        throw ParamError("trend: need at least 10 PNG images in " + hq_dir.string());

    eval::TrendConfig cfg;
    cfg.sweep = sweep == "lf" ? eval::Sweep::lf : eval::Sweep::hf;
    cfg.seed = seed;
    const auto rows = eval::lfim_trend_report(images, cfg);

    const std::string csv = eval::trend_csv(rows);
    write_file_atomic(out, csv.data(), csv.size());
    std::fputs(eval::trend_table(rows).c_str(), stdout);
    return 0;
}

int run_hf_error(const fs::path& base, const fs::path& refined, const fs::path& truth,
                 const fs::path& out, const fs::path& png) {
    const Tensor eps_base = tensor_read_ft32(base);
    const Tensor eps_lrrb = tensor_read_ft32(refined);
    const Tensor eps_true = tensor_read_ft32(truth);
    const Tensor map = eval::sign_log(eval::hf_error_map(eps_base, eps_lrrb, eps_true));
    tensor_write_ft32(map, out);

    if (!png.empty()) {
        // symmetric diverging render: blue ramp below zero, white at zero,
        // red ramp above, scaled by max |value|
        const float s = max_abs(map);
        PixelImage img;
        img.width = map.dim(1);
        img.height = map.dim(0);
        img.channels = 3;
        img.samples.assign(img.width * img.height * 3, 1.0f);
        if (s > 0.0f) {
            for (std::size_t y = 0; y < img.height; ++y)
                for (std::size_t x = 0; x < img.width; ++x) {
                    const float v = map.at(y, x) / s;
                    if (v > 0.0f) {
                        img.at(y, x, 1) = 1.0f - v;
                        img.at(y, x, 2) = 1.0f - v;
                    } else if (v < 0.0f) {
                        img.at(y, x, 0) = 1.0f + v;
                        img.at(y, x, 1) = 1.0f + v;
                    }
                }
        }
        image_write_png(img, png);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-aware super-resolution toolkit"};
    app.require_subcommand(1);

    std::string in_path, out_path, png_path, sr_path, hq_path, perc_path, cfg_path;
    std::string ref_path, latent_path, lq_path, zl_path, r_path, params_dir, hq_dir;
    std::string base_path, refined_path, true_path, sweep = "lf";
    std::uint64_t seed = 0;
    std::size_t steps = 200;
    double lr = 1e-2;

    auto* cmd_detail = app.add_subcommand("detail-map", "detail map of an image");
    cmd_detail->add_option("--in", in_path, "input PNG")->required();
    cmd_detail->add_option("--out", out_path, "output FT32 map")->required();
    cmd_detail->add_option("--png", png_path, "optional PNG visualization");

    auto* cmd_daw = app.add_subcommand("daw", "detail-aware weight map and losses");
    cmd_daw->add_option("--sr", sr_path, "restored PNG")->required();
    cmd_daw->add_option("--hq", hq_path, "ground-truth PNG")->required();
    cmd_daw->add_option("--perc", perc_path, "external perceptual error map (FT32)");
    cmd_daw->add_option("--config", cfg_path, "daw config file")->required();
    cmd_daw->add_option("--out", out_path, "output FT32 weight map")->required();

    auto* cmd_lfim = app.add_subcommand("lfim", "latent frequency injection");
    cmd_lfim->add_option("--latent", latent_path, "input latent (FT32)")->required();
    cmd_lfim->add_option("--lq", lq_path, "LQ image PNG for the detail map")->required();
    cmd_lfim->add_option("--config", cfg_path, "lfim config file")->required();
    cmd_lfim->add_option("--ref", ref_path, "reference latent for hf_use_diff");
    cmd_lfim->add_option("--out", out_path, "output latent (FT32)")->required();

    auto* cmd_demo = app.add_subcommand("lrrb-demo", "toy residual refinement training");
    cmd_demo->add_option("--seed", seed, "RNG seed");
    cmd_demo->add_option("--steps", steps, "gradient steps");
    cmd_demo->add_option("--lr", lr, "learning rate");
    cmd_demo->add_option("--out", params_dir, "output parameter directory")->required();

    auto* cmd_refine = app.add_subcommand("refine", "apply a trained refinement block");
    cmd_refine->add_option("--zl", zl_path, "LQ latent (FT32)")->required();
    cmd_refine->add_option("--r", r_path, "coarse residual (FT32)")->required();
    cmd_refine->add_option("--params", params_dir, "parameter directory")->required();
    cmd_refine->add_option("--out", out_path, "refined latent (FT32)")->required();

    auto* cmd_trend = app.add_subcommand("trend", "injection intensity sweep report");
    cmd_trend->add_option("--hq-dir", hq_dir, "directory of HQ PNG images")->required();
    cmd_trend->add_option("--out", out_path, "output CSV")->required();
    cmd_trend->add_option("--sweep", sweep, "lf or hf")
        ->check(CLI::IsMember({"lf", "hf"}))
        ->required();
    cmd_trend->add_option("--seed", seed, "RNG seed");

    auto* cmd_hferr = app.add_subcommand("hf-error", "high-frequency error improvement map");
    cmd_hferr->add_option("--base", base_path, "baseline prediction error (FT32)")->required();
    cmd_hferr->add_option("--refined", refined_path, "refined prediction error (FT32)")->required();
    cmd_hferr->add_option("--true", true_path, "true error (FT32)")->required();
    cmd_hferr->add_option("--out", out_path, "output FT32 map")->required();
    cmd_hferr->add_option("--png", png_path, "optional diverging PNG render");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_detail->parsed()) return run_detail_map(in_path, out_path, png_path);
        if (cmd_daw->parsed())
            return run_daw(sr_path, hq_path, perc_path, cfg_path, out_path);
        if (cmd_lfim->parsed())
            return run_lfim(latent_path, lq_path, cfg_path, ref_path, out_path);
        if (cmd_demo->parsed()) return run_lrrb_demo(seed, steps, lr, params_dir);
        if (cmd_refine->parsed())
            return run_refine(zl_path, r_path, params_dir, out_path);
        if (cmd_trend->parsed()) return run_trend(hq_dir, out_path, sweep, seed);
        if (cmd_hferr->parsed())
            return run_hf_error(base_path, refined_path, true_path, out_path, png_path);
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
