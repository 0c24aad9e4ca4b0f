#include "streamfill/codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "streamfill/errors.hpp"

namespace streamfill {

void CodecConfig::validate() const {
    if (downsample == 0) throw_config("downsample factor must be >= 1");
    if (stride == 0 || stride > patch) throw_config("need 1 <= stride <= patch");
    if (dim == 0) throw_config("feature dim must be >= 1");
}

std::size_t window_positions(std::size_t cells, std::size_t patch, std::size_t stride) {
    if (cells <= patch) return 1;
    return (cells - patch + stride - 1) / stride + 1;
}

TokenLayout token_layout(std::size_t gh, std::size_t gw, const CodecConfig& cfg) {
    cfg.validate();
    return {window_positions(gh, cfg.patch, cfg.stride), window_positions(gw, cfg.patch, cfg.stride),
            cfg.patch, cfg.stride, gh, gw};
}

std::vector<std::size_t> coverage_counts(std::size_t gh, std::size_t gw, const CodecConfig& cfg) {
    const TokenLayout l = token_layout(gh, gw, cfg);
    std::vector<std::size_t> counts(gh * gw, 0);
    for (std::size_t py = 0; py < l.positions_y; ++py) {
        for (std::size_t px = 0; px < l.positions_x; ++px) {
            for (std::size_t dy = 0; dy < cfg.patch; ++dy) {
                const std::size_t y = py * cfg.stride + dy;
                if (y >= gh) continue;
                for (std::size_t dx = 0; dx < cfg.patch; ++dx) {
                    const std::size_t x = px * cfg.stride + dx;
                    if (x < gw) ++counts[y * gw + x];
                }
            }
        }
    }
    return counts;
}

Matrix positional_encoding(const TokenLayout& layout, std::size_t dim) {
    if (dim % 4 != 0) throw_config("positional encoding needs dim divisible by 4");
    const std::size_t half = dim / 2;
    Matrix pe(layout.tokens(), dim);
    for (std::size_t py = 0; py < layout.positions_y; ++py) {
        for (std::size_t px = 0; px < layout.positions_x; ++px) {
            auto row = pe.row(py * layout.positions_x + px);
            for (std::size_t i = 0; i < half / 2; ++i) {
                const double freq = std::pow(10000.0, -2.0 * static_cast<double>(i) /
                                                          static_cast<double>(half));
                row[2 * i] = static_cast<float>(std::sin(static_cast<double>(py) * freq));
                row[2 * i + 1] = static_cast<float>(std::cos(static_cast<double>(py) * freq));
                row[half + 2 * i] = static_cast<float>(std::sin(static_cast<double>(px) * freq));
                row[half + 2 * i + 1] = static_cast<float>(std::cos(static_cast<double>(px) * freq));
            }
        }
    }
    return pe;
}

FeatureGrid encode(const FrameTensor& frame, const MaskTensor& mask, const EncoderWeights& w,
                   const CodecConfig& cfg) {
    cfg.validate();
    const std::size_t e = cfg.downsample;
    if (frame.height % e != 0 || frame.width % e != 0) {
        throw_shape("encode: frame " + std::to_string(frame.height) + "x" +
                    std::to_string(frame.width) + " not divisible by " + std::to_string(e));
    }
    if (mask.height != frame.height || mask.width != frame.width) {
        throw_shape("encode: mask does not match frame");
    }
    if (w.weight.rows() != cfg.encode_inputs() || w.weight.cols() != cfg.dim ||
        w.bias.size() != cfg.dim) {
        throw_shape("encode: weight shape does not match codec config");
    }
    const std::size_t gh = frame.height / e;
    const std::size_t gw = frame.width / e;
    Matrix blocks(gh * gw, cfg.encode_inputs());
    for (std::size_t cy = 0; cy < gh; ++cy) {
        for (std::size_t cx = 0; cx < gw; ++cx) {
            auto row = blocks.row(cy * gw + cx);
            std::size_t i = 0;
            for (std::size_t dy = 0; dy < e; ++dy) {
                for (std::size_t dx = 0; dx < e; ++dx) {
                    const std::size_t y = cy * e + dy;
                    const std::size_t x = cx * e + dx;
                    const float hole = static_cast<float>(mask.at(y, x));
                    for (std::size_t c = 0; c < 3; ++c) row[i++] = frame.at(y, x, c) * (1.0f - hole);
                    row[i++] = hole;
                }
            }
        }
    }
    const Matrix projected = matmul(blocks, w.weight);
    FeatureGrid fg(gh, gw, cfg.dim);
    for (std::size_t cell = 0; cell < gh * gw; ++cell) {
        for (std::size_t c = 0; c < cfg.dim; ++c) {
            fg.data[cell * cfg.dim + c] = projected(cell, c) + w.bias[c];
        }
    }
    return fg;
}

TokenGrid soft_split(const FeatureGrid& fg, const CodecConfig& cfg, const Matrix& embed,
                     bool add_positional) {
    const TokenLayout layout = token_layout(fg.gh, fg.gw, cfg);
    const std::size_t p = cfg.patch;
    const std::size_t patch_len = p * p * fg.dim;
    if (embed.rows() != patch_len) {
        throw_shape("soft_split: embed has " + std::to_string(embed.rows()) + " rows, need " +
                    std::to_string(patch_len));
    }
    Matrix patches(layout.tokens(), patch_len);
    for (std::size_t py = 0; py < layout.positions_y; ++py) {
        for (std::size_t px = 0; px < layout.positions_x; ++px) {
            auto row = patches.row(py * layout.positions_x + px);
            for (std::size_t dy = 0; dy < p; ++dy) {
                const std::size_t y = py * cfg.stride + dy;
                for (std::size_t dx = 0; dx < p; ++dx) {
                    const std::size_t x = px * cfg.stride + dx;
                    if (y >= fg.gh || x >= fg.gw) continue;  // zero padding
                    const std::size_t base = (dy * p + dx) * fg.dim;
                    for (std::size_t c = 0; c < fg.dim; ++c) row[base + c] = fg.at(y, x, c);
                }
            }
        }
    }
    TokenGrid tg{matmul(patches, embed), layout};
    if (add_positional) {
        const Matrix pe = positional_encoding(layout, tg.tokens.cols());
        auto out = tg.tokens.data();
        auto in = pe.data();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += in[i];
    }
    return tg;
}

FeatureGrid soft_composite(const TokenGrid& tg, const CodecConfig& cfg,
                           const Matrix& back_project) {
    const TokenLayout expected = token_layout(tg.layout.gh, tg.layout.gw, cfg);
    if (!(expected == tg.layout) || tg.tokens.rows() != tg.layout.tokens()) {
        throw_shape("soft_composite: token layout does not match codec config");
    }
    const std::size_t p = cfg.patch;
    if (back_project.rows() != tg.tokens.cols() || back_project.cols() % (p * p) != 0) {
        throw_shape("soft_composite: back-projection shape mismatch");
    }
    const std::size_t dim = back_project.cols() / (p * p);
    const Matrix patches = matmul(tg.tokens, back_project);
    FeatureGrid fg(tg.layout.gh, tg.layout.gw, dim);
    const auto coverage = coverage_counts(fg.gh, fg.gw, cfg);
    for (std::size_t py = 0; py < tg.layout.positions_y; ++py) {
        for (std::size_t px = 0; px < tg.layout.positions_x; ++px) {
            auto row = patches.row(py * tg.layout.positions_x + px);
            for (std::size_t dy = 0; dy < p; ++dy) {
                const std::size_t y = py * cfg.stride + dy;
                for (std::size_t dx = 0; dx < p; ++dx) {
                    const std::size_t x = px * cfg.stride + dx;
                    if (y >= fg.gh || x >= fg.gw) continue;
                    const std::size_t base = (dy * p + dx) * dim;
                    for (std::size_t c = 0; c < dim; ++c) fg.at(y, x, c) += row[base + c];
                }
            }
        }
    }
    for (std::size_t cell = 0; cell < fg.gh * fg.gw; ++cell) {
        const float inv = 1.0f / static_cast<float>(coverage[cell]);
        for (std::size_t c = 0; c < dim; ++c) fg.data[cell * dim + c] *= inv;
    }
    return fg;
}

FrameTensor decode(const FeatureGrid& fg, const DecoderWeights& w, const CodecConfig& cfg) {
    cfg.validate();
    const std::size_t e = cfg.downsample;
    if (w.weight.rows() != fg.dim || w.weight.cols() != cfg.decode_outputs() ||
        w.bias.size() != cfg.decode_outputs()) {
        throw_shape("decode: weight shape does not match feature grid");
    }
    const Matrix cells(fg.gh * fg.gw, fg.dim, fg.data);
    const Matrix pixels = matmul(cells, w.weight);
    FrameTensor frame(fg.gh * e, fg.gw * e);
    for (std::size_t cy = 0; cy < fg.gh; ++cy) {
        for (std::size_t cx = 0; cx < fg.gw; ++cx) {
            auto row = pixels.row(cy * fg.gw + cx);
            std::size_t i = 0;
            for (std::size_t dy = 0; dy < e; ++dy) {
                for (std::size_t dx = 0; dx < e; ++dx) {
                    for (std::size_t c = 0; c < 3; ++c, ++i) {
                        frame.at(cy * e + dy, cx * e + dx, c) =
                            std::clamp(row[i] + w.bias[i], 0.0f, 1.0f);
                    }
                }
            }
        }
    }
    return frame;
}

FrameTensor composite_output(const FrameTensor& pred, const FrameTensor& input,
                             const MaskTensor& mask) {
    if (pred.height != input.height || pred.width != input.width ||
        mask.height != input.height || mask.width != input.width) {
        throw_shape("composite_output: dimension mismatch");
    }
    FrameTensor out = input;
    for (std::size_t p = 0; p < mask.data.size(); ++p) {
        if (mask.data[p] == 0) continue;
        for (std::size_t c = 0; c < FrameTensor::kChannels; ++c) {
            out.data[p * FrameTensor::kChannels + c] = pred.data[p * FrameTensor::kChannels + c];
        }
    }
    return out;
}

} // namespace streamfill
