#include "fidesr/lrrb.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "fidesr/error.hpp"
#include "fidesr/kernels.hpp"
#include "fidesr/rng.hpp"
#include "fidesr/spatial_filters.hpp"
#include "fidesr/tensor_io.hpp"

namespace fidesr::lrrb {

namespace {

void require_latent(const Tensor& t, const char* op) {
    if (t.rank() != 3) throw ShapeError(std::string(op) + " expects a C x H x W tensor");
}

// Enumerates the row segments one (dy, dx) kernel tap touches under zero
// same-padding: fn(out_row, in_row, out_col0, in_col0, len).
template <typename Fn>
void for_each_tap_segment(std::size_t h, std::size_t w, std::size_t k, std::size_t dy,
                          std::size_t dx, Fn&& fn) {
    const long pad = static_cast<long>((k - 1) / 2);
    const long col_shift = static_cast<long>(dx) - pad;
    const long j0 = col_shift < 0 ? -col_shift : 0;
    const long j1 = static_cast<long>(w) - (col_shift > 0 ? col_shift : 0);
    if (j1 <= j0) return;
    for (long i = 0; i < static_cast<long>(h); ++i) {
        const long r = i + static_cast<long>(dy) - pad;
        if (r < 0 || r >= static_cast<long>(h)) continue;
        fn(static_cast<std::size_t>(i), static_cast<std::size_t>(r),
           static_cast<std::size_t>(j0), static_cast<std::size_t>(j0 + col_shift),
           static_cast<std::size_t>(j1 - j0));
    }
}

float weight_at(const Tensor& w, std::size_t co, std::size_t ci, std::size_t dy,
                std::size_t dx) {
    const std::size_t k = w.dim(2);
    return w.data()[((co * w.dim(1) + ci) * k + dy) * k + dx];
}

float& weight_at(Tensor& w, std::size_t co, std::size_t ci, std::size_t dy,
                 std::size_t dx) {
    const std::size_t k = w.dim(2);
    return w.data()[((co * w.dim(1) + ci) * k + dy) * k + dx];
}

Tensor leaky_relu(const Tensor& x, float slope) {
    Tensor out(x.shape());
    kernels::table().leaky_relu(x.data(), slope, out.data(), x.numel());
    return out;
}

// Appends src's channels after dst's (both rank 3).
Tensor append_channels(const Tensor& dst, const Tensor& src) {
    return concat_channels(dst, src);
}

// dst channels [c0, c0+count) += src channels [s0, s0+count)
void add_channel_slice(Tensor& dst, std::size_t c0, const Tensor& src, std::size_t s0,
                       std::size_t count) {
    for (std::size_t c = 0; c < count; ++c)
        kernels::table().axpy(1.0f, src.channel(s0 + c).data(),
                              dst.channel(c0 + c).data(), dst.channel(c0 + c).size());
}

struct DenseBlockTrace {
    std::vector<Tensor> cats;  // cat_0..cat_4
    std::vector<Tensor> pres;  // pre-activations
    std::vector<Tensor> acts;  // activations y_i
};

Tensor dense_block_forward_impl(const Tensor& x, const DenseBlockParams& p,
                                DenseBlockTrace* trace) {
    if (p.layers.size() != 4) throw ShapeError("dense block expects 4 layers");
    Tensor cat = x;
    DenseBlockTrace local;
    DenseBlockTrace& tr = trace ? *trace : local;
    tr.cats.clear();
    tr.pres.clear();
    tr.acts.clear();
    tr.cats.push_back(cat);
    for (std::size_t i = 0; i < 4; ++i) {
        Tensor pre = conv2d_forward(cat, p.layers[i]);
        Tensor act = leaky_relu(pre, p.slope);
        cat = append_channels(cat, act);
        tr.pres.push_back(std::move(pre));
        tr.acts.push_back(act);
        tr.cats.push_back(cat);
    }
    const Tensor fused = conv2d_forward(cat, p.fuse);
    Tensor out = x;
    for (std::size_t c = 0; c < out.dim(0); ++c)
        kernels::table().axpy(p.residual_scale, fused.channel(c).data(),
                              out.channel(c).data(), out.channel(c).size());
    return out;
}

// Returns grad wrt the block input; accumulates parameter grads.
Tensor dense_block_backward(const DenseBlockParams& p, const DenseBlockTrace& tr,
                            const Tensor& g_out, DenseBlockParams& grads) {
    const std::size_t width = tr.cats[0].dim(0);        // F
    const std::size_t growth = p.layers[0].out_channels();  // G

    Tensor g_x = g_out;
    Tensor g_fused = scale(g_out, p.residual_scale);

    Conv2dGrads fuse_bw = conv2d_backward(tr.cats[4], p.fuse, g_fused);
    kernels::table().axpy(1.0f, fuse_bw.weight.data(), grads.fuse.weight.data(),
                          grads.fuse.weight.numel());
    for (std::size_t i = 0; i < fuse_bw.bias.size(); ++i)
        grads.fuse.bias[i] += fuse_bw.bias[i];

    // split grad over cat_4 into the skip part and the per-layer activations
    add_channel_slice(g_x, 0, fuse_bw.x, 0, width);
    std::vector<Tensor> g_y;
    g_y.reserve(4);
    for (std::size_t i = 0; i < 4; ++i) {
        Tensor g({growth, g_out.dim(1), g_out.dim(2)});
        add_channel_slice(g, 0, fuse_bw.x, width + i * growth, growth);
        g_y.push_back(std::move(g));
    }

    for (std::size_t ii = 4; ii-- > 0;) {
        Tensor g_pre(g_y[ii].shape());
        kernels::table().leaky_relu_grad(tr.pres[ii].data(), g_y[ii].data(), p.slope,
                                         g_pre.data(), g_pre.numel());
        Conv2dGrads bw = conv2d_backward(tr.cats[ii], p.layers[ii], g_pre);
        kernels::table().axpy(1.0f, bw.weight.data(), grads.layers[ii].weight.data(),
                              grads.layers[ii].weight.numel());
        for (std::size_t i = 0; i < bw.bias.size(); ++i)
            grads.layers[ii].bias[i] += bw.bias[i];
        add_channel_slice(g_x, 0, bw.x, 0, width);
        for (std::size_t j = 0; j < ii; ++j)
            add_channel_slice(g_y[j], 0, bw.x, width + j * growth, growth);
    }
    return g_x;
}

struct LrrbTrace {
    Tensor x0;
    std::vector<Tensor> hidden;  // h_0..h_B
    std::vector<DenseBlockTrace> block_traces;
};

Tensor lrrb_forward_impl(const Tensor& z_l, const Tensor& r, const LrrbParams& p,
                         LrrbTrace* trace) {
    require_latent(z_l, "lrrb_forward");
    if (!z_l.same_shape(r)) throw ShapeError("lrrb_forward: z_l and r shapes differ");
    if (z_l.dim(0) != p.cfg.latent_channels)
        throw ShapeError("lrrb_forward: latent channel count mismatch");

    LrrbTrace local;
    LrrbTrace& tr = trace ? *trace : local;
    tr.x0 = concat_channels(z_l, r);
    tr.hidden.clear();
    tr.block_traces.assign(p.blocks.size(), {});
    tr.hidden.push_back(conv2d_forward(tr.x0, p.conv_in));
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
        tr.hidden.push_back(
            dense_block_forward_impl(tr.hidden.back(), p.blocks[b], &tr.block_traces[b]));
    return conv2d_forward(tr.hidden.back(), p.conv_out);
}

void collect_param_ptrs(Conv2dParams& c, std::vector<float*>& out) {
    for (float& v : c.weight.values()) out.push_back(&v);
    for (float& v : c.bias) out.push_back(&v);
}

}  // namespace

Conv2dParams conv2d_make(std::size_t out_ch, std::size_t in_ch, std::size_t k,
                         float fill) {
    if (k != 1 && k != 3) throw ParamError("conv2d kernel size must be 1 or 3");
    Conv2dParams p;
    p.weight = Tensor({out_ch, in_ch, k, k}, fill);
    p.bias.assign(out_ch, 0.0f);
    return p;
}

Tensor conv2d_forward(const Tensor& x, const Conv2dParams& p) {
    require_latent(x, "conv2d_forward");
    if (x.dim(0) != p.in_channels())
        throw ShapeError("conv2d_forward: input channel mismatch");
    const std::size_t h = x.dim(1), w = x.dim(2), k = p.ksize();

    Tensor y({p.out_channels(), h, w});
    for (std::size_t co = 0; co < p.out_channels(); ++co) {
        auto ch = y.channel(co);
        std::fill(ch.begin(), ch.end(), p.bias[co]);
    }
    for (std::size_t co = 0; co < p.out_channels(); ++co)
        for (std::size_t ci = 0; ci < p.in_channels(); ++ci) {
            const float* xin = x.channel(ci).data();
            float* yout = y.channel(co).data();
            for (std::size_t dy = 0; dy < k; ++dy)
                for (std::size_t dx = 0; dx < k; ++dx) {
                    const float wv = weight_at(p.weight, co, ci, dy, dx);
                    for_each_tap_segment(
                        h, w, k, dy, dx,
                        [&](std::size_t i, std::size_t r, std::size_t jo, std::size_t ji,
                            std::size_t len) {
                            kernels::table().axpy(wv, xin + r * w + ji, yout + i * w + jo,
                                                  len);
                        });
                }
        }
    return y;
}

Conv2dGrads conv2d_backward(const Tensor& x, const Conv2dParams& p,
                            const Tensor& grad_out) {
    require_latent(x, "conv2d_backward");
    if (x.dim(0) != p.in_channels())
        throw ShapeError("conv2d_backward: input channel mismatch");
    if (grad_out.rank() != 3 || grad_out.dim(0) != p.out_channels() ||
        grad_out.dim(1) != x.dim(1) || grad_out.dim(2) != x.dim(2))
        throw ShapeError("conv2d_backward: grad_out shape mismatch");
    const std::size_t h = x.dim(1), w = x.dim(2), k = p.ksize();

    Conv2dGrads g;
    g.x = Tensor(x.shape());
    g.weight = Tensor(p.weight.shape());
    g.bias.assign(p.out_channels(), 0.0f);

    for (std::size_t co = 0; co < p.out_channels(); ++co)
        g.bias[co] = static_cast<float>(
            kernels::table().sum(grad_out.channel(co).data(), grad_out.channel(co).size()));

    for (std::size_t co = 0; co < p.out_channels(); ++co)
        for (std::size_t ci = 0; ci < p.in_channels(); ++ci) {
            const float* xin = x.channel(ci).data();
            const float* gy = grad_out.channel(co).data();
            float* gx = g.x.channel(ci).data();
            for (std::size_t dy = 0; dy < k; ++dy)
                for (std::size_t dx = 0; dx < k; ++dx) {
                    double gw = 0.0;
                    const float wv = weight_at(p.weight, co, ci, dy, dx);
                    for_each_tap_segment(
                        h, w, k, dy, dx,
                        [&](std::size_t i, std::size_t r, std::size_t jo, std::size_t ji,
                            std::size_t len) {
                            gw += kernels::table().dot(gy + i * w + jo, xin + r * w + ji,
                                                       len);
                            kernels::table().axpy(wv, gy + i * w + jo, gx + r * w + ji,
                                                  len);
                        });
                    weight_at(g.weight, co, ci, dy, dx) = static_cast<float>(gw);
                }
        }
    return g;
}

Tensor dense_block_forward(const Tensor& x, const DenseBlockParams& p) {
    return dense_block_forward_impl(x, p, nullptr);
}

LrrbParams lrrb_init(const LrrbConfig& cfg) {
    if (cfg.latent_channels == 0 || cfg.feature_width == 0 || cfg.growth == 0 ||
        cfg.num_blocks == 0)
        throw ParamError("lrrb config: sizes must be positive");
    Rng rng(cfg.seed);
    // fan-in scaled uniform so feature magnitudes survive the depth; the
    // final projection stays zero so the untrained block is the identity
    const auto fill_uniform = [&](Tensor& t) {
        const std::size_t fan_in = t.dim(1) * t.dim(2) * t.dim(3);
        const float bound = std::sqrt(3.0f / static_cast<float>(fan_in));
        for (float& v : t.values()) v = rng.uniform(-bound, bound);
    };

    LrrbParams p;
    p.cfg = cfg;
    p.conv_in = conv2d_make(cfg.feature_width, 2 * cfg.latent_channels, 1);
    fill_uniform(p.conv_in.weight);
    for (std::size_t b = 0; b < cfg.num_blocks; ++b) {
        DenseBlockParams blk;
        blk.residual_scale = cfg.residual_scale;
        blk.slope = cfg.leaky_slope;
        for (std::size_t i = 0; i < 4; ++i) {
            blk.layers.push_back(
                conv2d_make(cfg.growth, cfg.feature_width + i * cfg.growth, 3));
            fill_uniform(blk.layers.back().weight);
        }
        blk.fuse = conv2d_make(cfg.feature_width, cfg.feature_width + 4 * cfg.growth, 1);
        fill_uniform(blk.fuse.weight);
        p.blocks.push_back(std::move(blk));
    }
    p.conv_out = conv2d_make(cfg.latent_channels, cfg.feature_width, 1);
    return p;
}

LrrbParams lrrb_zeros_like(const LrrbParams& p) {
    LrrbParams z = p;
    const auto zero_conv = [](Conv2dParams& c) {
        std::fill(c.weight.values().begin(), c.weight.values().end(), 0.0f);
        std::fill(c.bias.begin(), c.bias.end(), 0.0f);
    };
    zero_conv(z.conv_in);
    for (auto& blk : z.blocks) {
        for (auto& l : blk.layers) zero_conv(l);
        zero_conv(blk.fuse);
    }
    zero_conv(z.conv_out);
    return z;
}

std::vector<float*> lrrb_param_view(LrrbParams& p) {
    std::vector<float*> out;
    collect_param_ptrs(p.conv_in, out);
    for (auto& blk : p.blocks) {
        for (auto& l : blk.layers) collect_param_ptrs(l, out);
        collect_param_ptrs(blk.fuse, out);
    }
    collect_param_ptrs(p.conv_out, out);
    return out;
}

Tensor lrrb_forward(const Tensor& z_l, const Tensor& r, const LrrbParams& p) {
    return lrrb_forward_impl(z_l, r, p, nullptr);
}

double lrrb_loss_and_grad(const LrrbParams& p, const Tensor& z_l, const Tensor& r,
                          const Tensor& target_delta, LrrbParams* grads) {
    LrrbTrace tr;
    const Tensor delta = lrrb_forward_impl(z_l, r, p, &tr);
    if (!delta.same_shape(target_delta))
        throw ShapeError("lrrb_loss_and_grad: target shape mismatch");

    const double n = static_cast<double>(delta.numel());
    const double loss =
        kernels::table().sqdiff_sum(delta.data(), target_delta.data(), delta.numel()) / n;
    if (grads == nullptr) return loss;

    Tensor g_delta = sub(delta, target_delta);
    g_delta = scale(g_delta, static_cast<float>(2.0 / n));

    Conv2dGrads out_bw = conv2d_backward(tr.hidden.back(), p.conv_out, g_delta);
    kernels::table().axpy(1.0f, out_bw.weight.data(), grads->conv_out.weight.data(),
                          grads->conv_out.weight.numel());
    for (std::size_t i = 0; i < out_bw.bias.size(); ++i)
        grads->conv_out.bias[i] += out_bw.bias[i];

    Tensor g_h = std::move(out_bw.x);
    for (std::size_t b = p.blocks.size(); b-- > 0;)
        g_h = dense_block_backward(p.blocks[b], tr.block_traces[b], g_h,
                                   grads->blocks[b]);

    Conv2dGrads in_bw = conv2d_backward(tr.x0, p.conv_in, g_h);
    kernels::table().axpy(1.0f, in_bw.weight.data(), grads->conv_in.weight.data(),
                          grads->conv_in.weight.numel());
    for (std::size_t i = 0; i < in_bw.bias.size(); ++i)
        grads->conv_in.bias[i] += in_bw.bias[i];
    return loss;
}

RefinementState refine(const Tensor& z_l, const Tensor& r, const LrrbParams& p) {
    RefinementState st;
    st.z_l = z_l;
    st.r = r;
    st.delta_r = lrrb_forward(z_l, r, p);
    st.r_prime = add(r, st.delta_r);
    st.z_r = sub(z_l, st.r_prime);
    return st;
}

std::vector<ToySample> make_toy_dataset(std::size_t count, std::size_t channels,
                                        std::size_t h, std::size_t w,
                                        std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ToySample> data;
    data.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        ToySample sample;
        sample.z_l = Tensor({channels, h, w});
        sample.r = Tensor({channels, h, w});
        for (float& v : sample.z_l.values()) v = rng.uniform(-1.0f, 1.0f);
        for (float& v : sample.r.values()) v = rng.uniform(-1.0f, 1.0f);
        sample.target = Tensor({channels, h, w});
        for (std::size_t c = 0; c < channels; ++c) {
            const Tensor plane = sample.r.channel_plane(c);
            const Tensor blurred = spatial::box_blur3(plane);
            auto dst = sample.target.channel(c);
            for (std::size_t i = 0; i < dst.size(); ++i)
                dst[i] = blurred.data()[i] - plane.data()[i];
        }
        data.push_back(std::move(sample));
    }
    return data;
}

TrainResult lrrb_train_toy(const std::vector<ToySample>& data, LrrbParams& p,
                           std::size_t steps, double lr) {
    if (data.empty()) throw ParamError("lrrb_train_toy: empty dataset");
    if (lr <= 0.0) throw ParamError("lrrb_train_toy: lr must be > 0");

    const double inv_n = 1.0 / static_cast<double>(data.size());
    const auto batch_loss_and_grad = [&](LrrbParams* grads) {
        double acc = 0.0;
        for (const ToySample& s : data)
            acc += lrrb_loss_and_grad(p, s.z_l, s.r, s.target, grads);
        return acc * inv_n;
    };

    TrainResult result;
    std::vector<float*> params = lrrb_param_view(p);
    for (std::size_t step = 0; step < steps; ++step) {
        LrrbParams grads = lrrb_zeros_like(p);
        const double loss = batch_loss_and_grad(&grads);
        if (!std::isfinite(loss))
            throw DivergenceError(step, "lrrb toy training diverged at step " +
                                            std::to_string(step));
        result.losses.push_back(loss);
        std::vector<float*> gview = lrrb_param_view(grads);
        const float step_scale = static_cast<float>(lr * inv_n);
        for (std::size_t i = 0; i < params.size(); ++i)
            *params[i] -= step_scale * *gview[i];
    }
    const double final_loss = batch_loss_and_grad(nullptr);
    if (!std::isfinite(final_loss))
        throw DivergenceError(steps, "lrrb toy training diverged at step " +
                                         std::to_string(steps));
    result.losses.push_back(final_loss);
    return result;
}

namespace {

Tensor bias_to_tensor(const std::vector<float>& bias) {
    Tensor t({bias.size(), 1});
    std::copy(bias.begin(), bias.end(), t.data());
    return t;
}

std::vector<float> tensor_to_bias(const Tensor& t, std::size_t expected) {
    if (t.rank() != 2 || t.dim(0) != expected || t.dim(1) != 1)
        throw FormatError("lrrb params: bad bias tensor shape");
    return {t.values().begin(), t.values().end()};
}

void save_conv(const Conv2dParams& c, const std::filesystem::path& dir,
               const std::string& stem) {
    tensor_write_ft32(c.weight, dir / (stem + ".w"));
    tensor_write_ft32(bias_to_tensor(c.bias), dir / (stem + ".b"));
}

Conv2dParams load_conv(const std::filesystem::path& dir, const std::string& stem,
                       std::size_t out_ch, std::size_t in_ch, std::size_t k) {
    Conv2dParams c;
    c.weight = tensor_read_ft32(dir / (stem + ".w"));
    if (c.weight.rank() != 4 || c.weight.dim(0) != out_ch || c.weight.dim(1) != in_ch ||
        c.weight.dim(2) != k || c.weight.dim(3) != k)
        throw FormatError("lrrb params: bad weight shape for " + stem);
    c.bias = tensor_to_bias(tensor_read_ft32(dir / (stem + ".b")), out_ch);
    return c;
}

}  // namespace

void lrrb_save(const LrrbParams& p, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::string manifest;
    manifest += "latent_channels=" + std::to_string(p.cfg.latent_channels) + "\n";
    manifest += "feature_width=" + std::to_string(p.cfg.feature_width) + "\n";
    manifest += "growth=" + std::to_string(p.cfg.growth) + "\n";
    manifest += "blocks=" + std::to_string(p.cfg.num_blocks) + "\n";
    manifest += "residual_scale=" + std::to_string(p.cfg.residual_scale) + "\n";
    manifest += "leaky_slope=" + std::to_string(p.cfg.leaky_slope) + "\n";
    manifest += "seed=" + std::to_string(p.cfg.seed) + "\n";
    write_file_atomic(dir / "manifest.txt", manifest.data(), manifest.size());

    save_conv(p.conv_in, dir, "conv_in");
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        const std::string prefix = "block" + std::to_string(b);
        for (std::size_t i = 0; i < 4; ++i)
            save_conv(p.blocks[b].layers[i], dir, prefix + ".layer" + std::to_string(i));
        save_conv(p.blocks[b].fuse, dir, prefix + ".fuse");
    }
    save_conv(p.conv_out, dir, "conv_out");
}

LrrbParams lrrb_load(const std::filesystem::path& dir) {
    std::ifstream f(dir / "manifest.txt");
    if (!f) throw IoError("cannot open manifest: " + (dir / "manifest.txt").string());
    LrrbConfig cfg;
    std::string line;
    while (std::getline(f, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "latent_channels")
                cfg.latent_channels = std::stoul(value);
            else if (key == "feature_width")
                cfg.feature_width = std::stoul(value);
            else if (key == "growth")
                cfg.growth = std::stoul(value);
            else if (key == "blocks")
                cfg.num_blocks = std::stoul(value);
            else if (key == "residual_scale")
                cfg.residual_scale = std::stof(value);
            else if (key == "leaky_slope")
                cfg.leaky_slope = std::stof(value);
            else if (key == "seed")
                cfg.seed = std::stoull(value);
            else
                throw FormatError("lrrb manifest: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw FormatError("lrrb manifest: bad value for '" + key + "'");
        }
    }

    LrrbParams p;
    p.cfg = cfg;
    p.conv_in = load_conv(dir, "conv_in", cfg.feature_width, 2 * cfg.latent_channels, 1);
    for (std::size_t b = 0; b < cfg.num_blocks; ++b) {
        DenseBlockParams blk;
        blk.residual_scale = cfg.residual_scale;
        blk.slope = cfg.leaky_slope;
        const std::string prefix = "block" + std::to_string(b);
        for (std::size_t i = 0; i < 4; ++i)
            blk.layers.push_back(load_conv(dir, prefix + ".layer" + std::to_string(i),
                                           cfg.growth, cfg.feature_width + i * cfg.growth,
                                           3));
        blk.fuse = load_conv(dir, prefix + ".fuse", cfg.feature_width,
                             cfg.feature_width + 4 * cfg.growth, 1);
        p.blocks.push_back(std::move(blk));
    }
    p.conv_out = load_conv(dir, "conv_out", cfg.latent_channels, cfg.feature_width, 1);
    return p;
}

}  // namespace fidesr::lrrb
