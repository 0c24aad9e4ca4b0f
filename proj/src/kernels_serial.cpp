#include <vector>

#include "kernel_rows.hpp"

namespace streamfill::kernels::serial {

void gemm(std::span<const float> a, std::span<const float> b, std::span<float> c,
          std::size_t m, std::size_t k, std::size_t n) {
    rows::check_size(a.size(), m * k, "gemm a");
    rows::check_size(b.size(), k * n, "gemm b");
    rows::check_size(c.size(), m * n, "gemm c");
    for (std::size_t i = 0; i < m; ++i) {
        rows::gemm_row(a.data() + i * k, b.data(), c.data() + i * n, k, n);
    }
}

void softmax_rows(std::span<const float> x, std::span<float> out, std::size_t rows_,
                  std::size_t cols) {
    rows::check_size(x.size(), rows_ * cols, "softmax x");
    rows::check_size(out.size(), rows_ * cols, "softmax out");
    for (std::size_t i = 0; i < rows_; ++i) {
        rows::softmax_row(x.data() + i * cols, out.data() + i * cols, cols);
    }
}

void layer_norm(std::span<const float> x, std::span<const float> gain,
                std::span<const float> bias, std::span<float> out, std::size_t rows_,
                std::size_t cols, float eps) {
    rows::check_size(x.size(), rows_ * cols, "layer_norm x");
    rows::check_size(out.size(), rows_ * cols, "layer_norm out");
    rows::check_size(gain.size(), cols, "layer_norm gain");
    rows::check_size(bias.size(), cols, "layer_norm bias");
    for (std::size_t i = 0; i < rows_; ++i) {
        rows::layer_norm_row(x.data() + i * cols, gain.data(), bias.data(),
                             out.data() + i * cols, cols, eps);
    }
}

void attention(std::span<const float> q, std::span<const float> k, std::span<const float> v,
               std::span<float> out, const AttentionShape& shape) {
    rows::check_attention(q, k, v, out, shape);
    std::vector<float> scores(shape.keys);
    for (std::size_t i = 0; i < shape.queries; ++i) {
        rows::attention_row(q.data() + i * shape.dim, k.data(), v.data(),
                            out.data() + i * shape.dim, scores.data(), shape);
    }
}

} // namespace streamfill::kernels::serial
