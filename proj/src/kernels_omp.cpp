#include <omp.h>

#include <cstdint>
#include <vector>

#include "kernel_rows.hpp"

namespace streamfill::kernels {

int max_threads() { return omp_get_max_threads(); }

namespace parallel {

namespace {
bool worth_threads(std::size_t work) { return work >= kParallelMinWork; }
} // namespace

void gemm(std::span<const float> a, std::span<const float> b, std::span<float> c,
          std::size_t m, std::size_t k, std::size_t n) {
    rows::check_size(a.size(), m * k, "gemm a");
    rows::check_size(b.size(), k * n, "gemm b");
    rows::check_size(c.size(), m * n, "gemm c");
    const auto rows_ = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static) if (worth_threads(m * k * n))
    for (std::int64_t i = 0; i < rows_; ++i) {
        const auto r = static_cast<std::size_t>(i);
        rows::gemm_row(a.data() + r * k, b.data(), c.data() + r * n, k, n);
    }
}

void softmax_rows(std::span<const float> x, std::span<float> out, std::size_t rows_,
                  std::size_t cols) {
    rows::check_size(x.size(), rows_ * cols, "softmax x");
    rows::check_size(out.size(), rows_ * cols, "softmax out");
    const auto count = static_cast<std::int64_t>(rows_);
#pragma omp parallel for schedule(static) if (worth_threads(rows_ * cols * 8))
    for (std::int64_t i = 0; i < count; ++i) {
        const auto r = static_cast<std::size_t>(i);
        rows::softmax_row(x.data() + r * cols, out.data() + r * cols, cols);
    }
}

void layer_norm(std::span<const float> x, std::span<const float> gain,
                std::span<const float> bias, std::span<float> out, std::size_t rows_,
                std::size_t cols, float eps) {
    rows::check_size(x.size(), rows_ * cols, "layer_norm x");
    rows::check_size(out.size(), rows_ * cols, "layer_norm out");
    rows::check_size(gain.size(), cols, "layer_norm gain");
    rows::check_size(bias.size(), cols, "layer_norm bias");
    const auto count = static_cast<std::int64_t>(rows_);
#pragma omp parallel for schedule(static) if (worth_threads(rows_ * cols * 4))
    for (std::int64_t i = 0; i < count; ++i) {
        const auto r = static_cast<std::size_t>(i);
        rows::layer_norm_row(x.data() + r * cols, gain.data(), bias.data(),
                             out.data() + r * cols, cols, eps);
    }
}

void attention(std::span<const float> q, std::span<const float> k, std::span<const float> v,
               std::span<float> out, const AttentionShape& shape) {
    rows::check_attention(q, k, v, out, shape);
    const auto count = static_cast<std::int64_t>(shape.queries);
    const std::size_t work = shape.queries * shape.keys * shape.dim * 2;
#pragma omp parallel if (worth_threads(work))
    {
        std::vector<float> scores(shape.keys);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) {
            const auto r = static_cast<std::size_t>(i);
            rows::attention_row(q.data() + r * shape.dim, k.data(), v.data(),
                                out.data() + r * shape.dim, scores.data(), shape);
        }
    }
}

} // namespace parallel
} // namespace streamfill::kernels
