#pragma once

// Per-row bodies shared by the serial and OpenMP kernels. Keeping one copy of
// the arithmetic is what makes the two flavours bitwise interchangeable.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "streamfill/errors.hpp"
#include "streamfill/kernels.hpp"

namespace streamfill::kernels::rows {

inline void check_size(std::size_t have, std::size_t want, const char* what) {
    if (have < want) {
        throw_shape(std::string("kernel buffer too small: ") + what);
    }
}

inline void gemm_row(const float* a_row, const float* b, float* c_row, std::size_t k,
                     std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) c_row[j] = 0.0f;
    for (std::size_t kk = 0; kk < k; ++kk) {
        const float aik = a_row[kk];
        const float* b_row = b + kk * n;
        for (std::size_t j = 0; j < n; ++j) c_row[j] += aik * b_row[j];
    }
}

inline void softmax_row(const float* x, float* out, std::size_t cols) {
    if (cols == 0) return;
    float peak = x[0];
    for (std::size_t j = 1; j < cols; ++j) peak = x[j] > peak ? x[j] : peak;
    float total = 0.0f;
    for (std::size_t j = 0; j < cols; ++j) {
        out[j] = std::exp(x[j] - peak);
        total += out[j];
    }
    const float inv = 1.0f / total;
    for (std::size_t j = 0; j < cols; ++j) out[j] *= inv;
}

inline void layer_norm_row(const float* x, const float* gain, const float* bias, float* out,
                           std::size_t cols, float eps) {
    float sum = 0.0f;
    for (std::size_t j = 0; j < cols; ++j) sum += x[j];
    const float mean = sum / static_cast<float>(cols);
    float sq = 0.0f;
    for (std::size_t j = 0; j < cols; ++j) {
        const float c = x[j] - mean;
        sq += c * c;
    }
    const float inv_std = 1.0f / std::sqrt(sq / static_cast<float>(cols) + eps);
    for (std::size_t j = 0; j < cols; ++j) out[j] = (x[j] - mean) * inv_std * gain[j] + bias[j];
}

// One query row across all heads; `scores` needs room for shape.keys floats.
inline void attention_row(const float* q_row, const float* k, const float* v, float* out_row,
                          float* scores, const AttentionShape& shape) {
    const std::size_t dh = shape.dim / shape.heads;
    const float scale = 1.0f / std::sqrt(static_cast<float>(dh));
    for (std::size_t h = 0; h < shape.heads; ++h) {
        const std::size_t off = h * dh;
        for (std::size_t j = 0; j < shape.keys; ++j) {
            const float* k_row = k + j * shape.dim + off;
            float s = 0.0f;
            for (std::size_t d = 0; d < dh; ++d) s += q_row[off + d] * k_row[d];
            scores[j] = s * scale;
        }
        softmax_row(scores, scores, shape.keys);
        float* o = out_row + off;
        for (std::size_t d = 0; d < dh; ++d) o[d] = 0.0f;
        for (std::size_t j = 0; j < shape.keys; ++j) {
            const float w = scores[j];
            const float* v_row = v + j * shape.dim + off;
            for (std::size_t d = 0; d < dh; ++d) o[d] += w * v_row[d];
        }
    }
}

inline void check_attention(std::span<const float> q, std::span<const float> k,
                            std::span<const float> v, std::span<float> out,
                            const AttentionShape& s) {
    if (s.heads == 0 || s.dim % s.heads != 0) {
        throw_shape("attention: dim must be divisible by heads");
    }
    check_size(q.size(), s.queries * s.dim, "attention q");
    check_size(k.size(), s.keys * s.dim, "attention k");
    check_size(v.size(), s.keys * s.dim, "attention v");
    check_size(out.size(), s.queries * s.dim, "attention out");
}

} // namespace streamfill::kernels::rows
