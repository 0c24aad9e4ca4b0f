#include "streamfill/attention.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "streamfill/errors.hpp"
#include "streamfill/kernels.hpp"

namespace streamfill {

void StackConfig::validate() const {
    if (blocks < 1) throw_config("stack needs at least one block");
    if (heads == 0 || dim % heads != 0) throw_config("dim must be divisible by heads");
    if (dim % 4 != 0) throw_config("dim must be divisible by 4 (positional encoding)");
    if (ffn_dim == 0) throw_config("ffn_dim must be positive");
    codec.validate();
    if (codec.dim != dim) throw_config("codec feature channels must equal model dim");
}

namespace {

void expect_shape(const Matrix& m, std::size_t r, std::size_t c, const char* what) {
    if (m.rows() != r || m.cols() != c) {
        throw_shape(std::string(what) + ": expected " + std::to_string(r) + "x" +
                    std::to_string(c) + ", got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
    }
}

void expect_len(const std::vector<float>& v, std::size_t n, const char* what) {
    if (v.size() != n) throw_shape(std::string(what) + ": wrong length");
}

} // namespace

void WeightSet::validate() const {
    config.validate();
    const std::size_t d = config.dim;
    const auto& c = config.codec;
    expect_shape(encoder.weight, c.encode_inputs(), d, "encode.w");
    expect_len(encoder.bias, d, "encode.b");
    expect_shape(embed, c.patch_values(), d, "embed");
    if (blocks.size() != config.blocks) throw_shape("block count mismatch");
    for (const auto& b : blocks) {
        expect_shape(b.wq, d, d, "wq");
        expect_shape(b.wk, d, d, "wk");
        expect_shape(b.wv, d, d, "wv");
        expect_shape(b.wo, d, d, "wo");
        expect_len(b.ln1_gain, d, "ln1.gain");
        expect_len(b.ln1_bias, d, "ln1.bias");
        expect_shape(b.ffn_w1, d, config.ffn_dim, "ffn.w1");
        expect_len(b.ffn_b1, config.ffn_dim, "ffn.b1");
        expect_shape(b.ffn_w2, config.ffn_dim, d, "ffn.w2");
        expect_len(b.ffn_b2, d, "ffn.b2");
        expect_len(b.ln2_gain, d, "ln2.gain");
        expect_len(b.ln2_bias, d, "ln2.bias");
    }
    expect_shape(back_project, d, c.patch_values(), "back_project");
    expect_shape(decoder.weight, d, c.decode_outputs(), "decode.w");
    expect_len(decoder.bias, c.decode_outputs(), "decode.b");
}

WeightSet init_weights(const StackConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    auto dense = [&rng](std::size_t r, std::size_t c) {
        return seeded_normal(rng, r, c, static_cast<float>(1.0 / std::sqrt(static_cast<double>(r))));
    };
    const std::size_t d = cfg.dim;
    WeightSet w;
    w.config = cfg;
    w.encoder.weight = dense(cfg.codec.encode_inputs(), d);
    w.encoder.bias.assign(d, 0.0f);
    w.embed = dense(cfg.codec.patch_values(), d);
    for (std::size_t i = 0; i < cfg.blocks; ++i) {
        BlockWeights b;
        b.wq = dense(d, d);
        b.wk = dense(d, d);
        b.wv = dense(d, d);
        b.wo = dense(d, d);
        b.ln1_gain.assign(d, 1.0f);
        b.ln1_bias.assign(d, 0.0f);
        b.ffn_w1 = dense(d, cfg.ffn_dim);
        b.ffn_b1.assign(cfg.ffn_dim, 0.0f);
        b.ffn_w2 = dense(cfg.ffn_dim, d);
        b.ffn_b2.assign(d, 0.0f);
        b.ln2_gain.assign(d, 1.0f);
        b.ln2_bias.assign(d, 0.0f);
        w.blocks.push_back(std::move(b));
    }
    w.back_project = dense(d, cfg.codec.patch_values());
    w.decoder.weight = dense(d, cfg.codec.decode_outputs());
    w.decoder.bias.assign(cfg.codec.decode_outputs(), 0.5f);
    return w;
}

OpCounter& OpCounter::operator+=(const OpCounter& o) {
    score_macs += o.score_macs;
    value_macs += o.value_macs;
    ffn_macs += o.ffn_macs;
    proj_macs += o.proj_macs;
    return *this;
}

OpCounter operator-(OpCounter a, const OpCounter& b) {
    a.score_macs -= b.score_macs;
    a.value_macs -= b.value_macs;
    a.ffn_macs -= b.ffn_macs;
    a.proj_macs -= b.proj_macs;
    return a;
}

std::uint64_t score_macs_for(std::size_t query_tokens, std::size_t key_tokens, std::size_t dim) {
    return static_cast<std::uint64_t>(query_tokens) * key_tokens * dim;
}

namespace {

float gelu(float x) {
    constexpr float k = 0.7978845608028654f;  // sqrt(2 / pi)
    return 0.5f * x * (1.0f + std::tanh(k * (x + 0.044715f * x * x * x)));
}

void add_inplace(Matrix& a, const Matrix& b) {
    auto x = a.data();
    auto y = b.data();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
}

// One pre-norm block applied to `query_x`, attending over `key_x` (or over
// query_x itself when key_x is null).
Matrix transformer_rows(const Matrix& query_x, const Matrix* key_x, const BlockWeights& w,
                        std::size_t heads, OpCounter& counter) {
    const std::size_t d = query_x.cols();
    if (w.wq.rows() != d) throw_shape("token dim does not match block weights");
    if (key_x && key_x->cols() != d) throw_shape("key dim does not match query dim");

    const Matrix qn = layer_norm(query_x, w.ln1_gain, w.ln1_bias);
    const Matrix kn = key_x ? layer_norm(*key_x, w.ln1_gain, w.ln1_bias) : qn;
    const std::size_t nq = qn.rows();
    const std::size_t nk = kn.rows();

    const Matrix q = matmul(qn, w.wq);
    const Matrix k = matmul(kn, w.wk);
    const Matrix v = matmul(kn, w.wv);
    Matrix attn(nq, d);
    kernels::parallel::attention(q.data(), k.data(), v.data(), attn.data(),
                                 {nq, nk, d, heads});
    Matrix x1 = matmul(attn, w.wo);
    add_inplace(x1, query_x);

    const Matrix z = layer_norm(x1, w.ln2_gain, w.ln2_bias);
    Matrix hidden = matmul(z, w.ffn_w1);
    for (std::size_t r = 0; r < hidden.rows(); ++r) {
        auto row = hidden.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = gelu(row[c] + w.ffn_b1[c]);
    }
    Matrix out = matmul(hidden, w.ffn_w2);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        auto base = x1.row(r);
        for (std::size_t c = 0; c < d; ++c) row[c] = base[c] + (row[c] + w.ffn_b2[c]);
    }

    const std::uint64_t dd = static_cast<std::uint64_t>(d) * d;
    counter.score_macs += score_macs_for(nq, nk, d);
    counter.value_macs += score_macs_for(nq, nk, d);
    counter.proj_macs += (2 * static_cast<std::uint64_t>(nq) + 2 * static_cast<std::uint64_t>(nk)) * dd;
    counter.ffn_macs += 2 * static_cast<std::uint64_t>(nq) * d * w.ffn_w1.cols();
    return out;
}

void check_uniform(std::span<const TokenGrid* const> grids) {
    for (const TokenGrid* g : grids) {
        if (!(g->layout == grids.front()->layout) || g->dim() != grids.front()->dim() ||
            g->count() != grids.front()->count()) {
            throw_shape("token grids have mismatched layouts");
        }
    }
}

} // namespace

std::vector<TokenGrid> block_full(std::span<const TokenGrid> frames, const BlockWeights& w,
                                  std::size_t heads, OpCounter& counter) {
    if (frames.empty()) throw_shape("block_full needs at least one frame");
    std::vector<const TokenGrid*> grids;
    std::vector<const Matrix*> mats;
    for (const auto& f : frames) {
        grids.push_back(&f);
        mats.push_back(&f.tokens);
    }
    check_uniform(grids);
    const Matrix joined = vstack(mats);
    const Matrix out = transformer_rows(joined, nullptr, w, heads, counter);
    std::vector<TokenGrid> result;
    const std::size_t p = frames.front().count();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        result.push_back({out.slice_rows(i * p, p), frames[i].layout});
    }
    return result;
}

TokenGrid block_single_query(const TokenGrid& query, std::span<const TokenGrid* const> context,
                             const BlockWeights& w, std::size_t heads, OpCounter& counter) {
    std::vector<const TokenGrid*> grids{&query};
    grids.insert(grids.end(), context.begin(), context.end());
    check_uniform(grids);
    std::vector<const Matrix*> mats;
    for (const TokenGrid* g : grids) mats.push_back(&g->tokens);
    const Matrix keys = vstack(mats);
    return {transformer_rows(query.tokens, &keys, w, heads, counter), query.layout};
}

TokenGrid block_single_query(const TokenGrid& query, std::span<const TokenGrid> context,
                             const BlockWeights& w, std::size_t heads, OpCounter& counter) {
    std::vector<const TokenGrid*> ptrs;
    for (const auto& c : context) ptrs.push_back(&c);
    return block_single_query(query, std::span<const TokenGrid* const>(ptrs), w, heads, counter);
}

TokenGrid frame_tokens(const FrameTensor& frame, const MaskTensor& mask, const WeightSet& w) {
    const FeatureGrid fg = encode(frame, mask, w.encoder, w.config.codec);
    return soft_split(fg, w.config.codec, w.embed);
}

FrameTensor finish_frame(const TokenGrid& tokens, const FrameTensor& input,
                         const MaskTensor& mask, const WeightSet& w) {
    const FeatureGrid fg = soft_composite(tokens, w.config.codec, w.back_project);
    const FrameTensor pred = decode(fg, w.decoder, w.config.codec);
    return composite_output(pred, input, mask);
}

JointResult run_stack_joint(std::span<const FrameTensor> frames,
                            std::span<const MaskTensor> masks, const WeightSet& w,
                            OpCounter& counter, bool keep_block_inputs) {
    if (frames.empty()) throw_shape("run_stack_joint: empty selection");
    if (frames.size() != masks.size()) throw_shape("run_stack_joint: frame/mask count mismatch");
    std::vector<TokenGrid> xs;
    xs.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) xs.push_back(frame_tokens(frames[i], masks[i], w));

    JointResult result;
    if (keep_block_inputs) result.block_inputs.assign(frames.size(), {});
    for (const auto& block : w.blocks) {
        if (keep_block_inputs) {
            for (std::size_t i = 0; i < xs.size(); ++i) result.block_inputs[i].push_back(xs[i]);
        }
        xs = block_full(xs, block, w.config.heads, counter);
    }
    result.outputs.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        result.outputs.push_back(finish_frame(xs[i], frames[i], masks[i], w));
    }
    return result;
}

MemoryStepResult run_stack_memory(const FrameTensor& frame, const MaskTensor& mask,
                                  const BlockContext& context, const WeightSet& w,
                                  OpCounter& counter) {
    if (context.size() != w.blocks.size()) {
        throw_shape("run_stack_memory: context must have one list per block");
    }
    MemoryStepResult result;
    TokenGrid x = frame_tokens(frame, mask, w);
    for (std::size_t b = 0; b < w.blocks.size(); ++b) {
        result.entries.push_back(x);
        x = block_single_query(x, std::span<const TokenGrid* const>(context[b]), w.blocks[b],
                               w.config.heads, counter);
    }
    result.output = finish_frame(x, frame, mask, w);
    return result;
}

} // namespace streamfill
