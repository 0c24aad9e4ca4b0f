#pragma once

// Toy analog of a video-inpainting backbone's encoder / soft split / soft
// composite / decoder. Blocks of e x e pixels are linearly projected to
// `dim` feature channels; p x p windows of cells, stepped by d, become tokens.

#include <cstddef>
#include <span>
#include <vector>

#include "streamfill/matrix.hpp"
#include "streamfill/video.hpp"

namespace streamfill {

struct CodecConfig {
    std::size_t downsample = 4;  // e: pixels per cell side
    std::size_t patch = 4;       // p: cells per window side
    std::size_t stride = 2;      // d: cells between window origins
    std::size_t dim = 32;        // feature channels per cell == model dimension

    void validate() const;
    std::size_t encode_inputs() const { return downsample * downsample * 4; }
    std::size_t decode_outputs() const { return downsample * downsample * 3; }
    std::size_t patch_values() const { return patch * patch * dim; }
};

struct FeatureGrid {
    std::size_t gh = 0;
    std::size_t gw = 0;
    std::size_t dim = 0;
    std::vector<float> data;  // gh x gw x dim

    FeatureGrid() = default;
    FeatureGrid(std::size_t h, std::size_t w, std::size_t d, float fill = 0.0f)
        : gh(h), gw(w), dim(d), data(h * w * d, fill) {}

    float& at(std::size_t y, std::size_t x, std::size_t c) { return data[(y * gw + x) * dim + c]; }
    float at(std::size_t y, std::size_t x, std::size_t c) const {
        return data[(y * gw + x) * dim + c];
    }

    friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;
};

struct TokenLayout {
    std::size_t positions_y = 0;
    std::size_t positions_x = 0;
    std::size_t patch = 0;
    std::size_t stride = 0;
    std::size_t gh = 0;
    std::size_t gw = 0;

    std::size_t tokens() const { return positions_y * positions_x; }
    friend bool operator==(const TokenLayout&, const TokenLayout&) = default;
};

/// Per-frame patch tokens, one row per window position (row-major over positions).
struct TokenGrid {
    Matrix tokens;
    TokenLayout layout;

    std::size_t count() const { return tokens.rows(); }
    std::size_t dim() const { return tokens.cols(); }
    std::size_t bytes() const { return tokens.size() * sizeof(float); }

    friend bool operator==(const TokenGrid&, const TokenGrid&) = default;
};

/// Window positions along one axis of `cells` cells: ceil(max(cells - p, 0) / d) + 1.
std::size_t window_positions(std::size_t cells, std::size_t patch, std::size_t stride);
TokenLayout token_layout(std::size_t gh, std::size_t gw, const CodecConfig& cfg);

/// How many windows cover each cell, row-major gh x gw.
std::vector<std::size_t> coverage_counts(std::size_t gh, std::size_t gw, const CodecConfig& cfg);

/// 2-D sinusoidal position table: first half of the channels encodes the row,
/// second half the column. dim must be divisible by 4.
Matrix positional_encoding(const TokenLayout& layout, std::size_t dim);

struct EncoderWeights {
    Matrix weight;  // (e*e*4) x dim
    std::vector<float> bias;
};

struct DecoderWeights {
    Matrix weight;  // dim x (e*e*3)
    std::vector<float> bias;
};

/// Frame is pre-multiplied by (1 - mask); the mask is the fourth input channel.
FeatureGrid encode(const FrameTensor& frame, const MaskTensor& mask, const EncoderWeights& w,
                   const CodecConfig& cfg);

/// `embed` is (p*p*dim) x D. Padding cells on the right/bottom are zero.
TokenGrid soft_split(const FeatureGrid& fg, const CodecConfig& cfg, const Matrix& embed,
                     bool add_positional = true);

/// `back_project` is D x (p*p*dim); overlapping contributions are averaged.
FeatureGrid soft_composite(const TokenGrid& tg, const CodecConfig& cfg,
                           const Matrix& back_project);

FrameTensor decode(const FeatureGrid& fg, const DecoderWeights& w, const CodecConfig& cfg);

/// out = input where mask == 0, pred where mask == 1.
FrameTensor composite_output(const FrameTensor& pred, const FrameTensor& input,
                             const MaskTensor& mask);

} // namespace streamfill
