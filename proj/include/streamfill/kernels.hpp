#pragma once

// Dense float kernels in two flavours. `serial` is the reference
// implementation; `parallel` splits the outer row loop over OpenMP threads.
// Both run the exact same per-row arithmetic, so results are bitwise equal
// for any thread count. Everything above this layer calls `parallel`.

#include <cstddef>
#include <span>

namespace streamfill::kernels {

struct AttentionShape {
    std::size_t queries = 0;
    std::size_t keys = 0;
    std::size_t dim = 0;   // model dimension, split evenly over heads
    std::size_t heads = 1;
};

// Work (in multiply-adds) below which the parallel flavour stays on one thread.
inline constexpr std::size_t kParallelMinWork = std::size_t{1} << 16;

namespace serial {

/// c[m x n] = a[m x k] * b[k x n], each output accumulated over k ascending.
void gemm(std::span<const float> a, std::span<const float> b, std::span<float> c,
          std::size_t m, std::size_t k, std::size_t n);

void softmax_rows(std::span<const float> x, std::span<float> out, std::size_t rows,
                  std::size_t cols);

void layer_norm(std::span<const float> x, std::span<const float> gain,
                std::span<const float> bias, std::span<float> out, std::size_t rows,
                std::size_t cols, float eps);

/// Scaled dot-product attention per head: out[i] = softmax(q_i K^T / sqrt(dh)) V.
void attention(std::span<const float> q, std::span<const float> k, std::span<const float> v,
               std::span<float> out, const AttentionShape& shape);

} // namespace serial

namespace parallel {

void gemm(std::span<const float> a, std::span<const float> b, std::span<float> c,
          std::size_t m, std::size_t k, std::size_t n);

void softmax_rows(std::span<const float> x, std::span<float> out, std::size_t rows,
                  std::size_t cols);

void layer_norm(std::span<const float> x, std::span<const float> gain,
                std::span<const float> bias, std::span<float> out, std::size_t rows,
                std::size_t cols, float eps);

void attention(std::span<const float> q, std::span<const float> k, std::span<const float> v,
               std::span<float> out, const AttentionShape& shape);

} // namespace parallel

/// Threads the parallel flavour may use (OpenMP max threads).
int max_threads();

} // namespace streamfill::kernels
