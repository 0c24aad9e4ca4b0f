#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace streamfill {

/// Row-major float matrix. All linear-algebra intermediates live in one of these.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, float fill = 0.0f);
    Matrix(std::size_t rows, std::size_t cols, std::vector<float> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    float& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    float operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }
    std::span<float> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const float> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    /// Rows [first, first + count) as a new matrix.
    Matrix slice_rows(std::size_t first, std::size_t count) const;

    bool all_finite() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<float> data_;
};

/// True when shapes match and every float has the same bit pattern.
bool bitwise_equal(const Matrix& a, const Matrix& b);

/// Stacks matrices with equal column counts vertically, in order.
Matrix vstack(std::span<const Matrix* const> parts);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix softmax_rows(const Matrix& m);

inline constexpr float kLayerNormEps = 1e-5f;
Matrix layer_norm(const Matrix& x, std::span<const float> gain, std::span<const float> bias,
                  float eps = kLayerNormEps);

/// SplitMix64 stream. Uniforms take the top 53 bits; normals use Box-Muller on
/// two consecutive uniforms (cosine branch only), so a seed fixes every value.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64();
    /// Uniform in (0, 1].
    double uniform();
    double normal();

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

Matrix seeded_normal(Rng& rng, std::size_t rows, std::size_t cols, float scale);

} // namespace streamfill
