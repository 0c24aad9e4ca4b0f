#pragma once

// B-block pre-norm transformer stack with two execution paths:
//   * joint: every token of every selected frame is a query (n*P x n*P scores);
//   * single-query: only the newest frame's tokens are queries while keys and
//     values come from cached per-block representations of context frames.
//
// Cache convention: the entry kept for (block b, frame f) is the block-b
// *input* of f, i.e. the output of block b-1; entry 0 is the soft-split grid.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "streamfill/codec.hpp"
#include "streamfill/matrix.hpp"
#include "streamfill/video.hpp"

namespace streamfill {

struct StackConfig {
    std::size_t blocks = 4;
    std::size_t heads = 4;
    std::size_t dim = 32;
    std::size_t ffn_dim = 64;
    CodecConfig codec{};

    void validate() const;
    std::size_t head_dim() const { return dim / heads; }
};

struct BlockWeights {
    Matrix wq, wk, wv, wo;  // dim x dim
    std::vector<float> ln1_gain, ln1_bias;
    Matrix ffn_w1;  // dim x ffn_dim
    std::vector<float> ffn_b1;
    Matrix ffn_w2;  // ffn_dim x dim
    std::vector<float> ffn_b2;
    std::vector<float> ln2_gain, ln2_bias;

    friend bool operator==(const BlockWeights&, const BlockWeights&) = default;
};

struct WeightSet {
    StackConfig config;
    EncoderWeights encoder;
    Matrix embed;  // (p*p*dim) x dim
    std::vector<BlockWeights> blocks;
    Matrix back_project;  // dim x (p*p*dim)
    DecoderWeights decoder;

    /// Throws ShapeError if any tensor disagrees with `config`.
    void validate() const;
};

/// Deterministic init: every matrix ~ N(0, 1/fan_in) drawn from one Rng(seed)
/// in WTS1 order; biases zero except the decoder bias (0.5, mid-grey),
/// layer-norm gains one.
WeightSet init_weights(const StackConfig& cfg, std::uint64_t seed);

// WTS1: "WTS1", u32 LE {B, h, D, ffn_dim, e, p, d}, then f32 LE arrays in order
// encode.w, encode.b, embed, per block {wq, wk, wv, wo, ln1.gain, ln1.bias,
// ffn.w1, ffn.b1, ffn.w2, ffn.b2, ln2.gain, ln2.bias}, back_project, decode.w,
// decode.b. Codec feature channels equal D.
std::vector<std::uint8_t> serialize_weights(const WeightSet& w);
WeightSet parse_weights(std::span<const std::uint8_t> bytes);
void write_weights(const WeightSet& w, const std::filesystem::path& path);
WeightSet read_weights(const std::filesystem::path& path);

/// Multiply-accumulate tallies. score = QK^T, value = softmax(.)V,
/// proj = Q/K/V/O projections, ffn = both feed-forward layers.
struct OpCounter {
    std::uint64_t score_macs = 0;
    std::uint64_t value_macs = 0;
    std::uint64_t ffn_macs = 0;
    std::uint64_t proj_macs = 0;

    std::uint64_t attention_macs() const { return score_macs + value_macs; }
    std::uint64_t total() const { return score_macs + value_macs + ffn_macs + proj_macs; }

    OpCounter& operator+=(const OpCounter& o);
    friend OpCounter operator-(OpCounter a, const OpCounter& b);
    friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

// Closed forms used by tests and reports.
std::uint64_t score_macs_for(std::size_t query_tokens, std::size_t key_tokens, std::size_t dim);

/// Joint attention over the concatenation of all frames' tokens.
std::vector<TokenGrid> block_full(std::span<const TokenGrid> frames, const BlockWeights& w,
                                  std::size_t heads, OpCounter& counter);

/// Queries from `query` only; keys/values from query followed by context, in order.
TokenGrid block_single_query(const TokenGrid& query, std::span<const TokenGrid* const> context,
                             const BlockWeights& w, std::size_t heads, OpCounter& counter);
TokenGrid block_single_query(const TokenGrid& query, std::span<const TokenGrid> context,
                             const BlockWeights& w, std::size_t heads, OpCounter& counter);

/// encode + soft split, the block-0 input of a frame.
TokenGrid frame_tokens(const FrameTensor& frame, const MaskTensor& mask, const WeightSet& w);

/// soft composite + decode + paste under the mask.
FrameTensor finish_frame(const TokenGrid& tokens, const FrameTensor& input,
                         const MaskTensor& mask, const WeightSet& w);

struct JointResult {
    std::vector<FrameTensor> outputs;
    /// [frame][block] block inputs; filled only when requested.
    std::vector<std::vector<TokenGrid>> block_inputs;
};

JointResult run_stack_joint(std::span<const FrameTensor> frames,
                            std::span<const MaskTensor> masks, const WeightSet& w,
                            OpCounter& counter, bool keep_block_inputs = false);

/// Context for a memory step: [block][i] -> cached block-b input of a context frame.
using BlockContext = std::vector<std::vector<const TokenGrid*>>;

struct MemoryStepResult {
    FrameTensor output;
    std::vector<TokenGrid> entries;  // one per block, to be stored for this frame
};

MemoryStepResult run_stack_memory(const FrameTensor& frame, const MaskTensor& mask,
                                  const BlockContext& context, const WeightSet& w,
                                  OpCounter& counter);

} // namespace streamfill
