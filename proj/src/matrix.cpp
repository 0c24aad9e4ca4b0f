#include "streamfill/matrix.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "streamfill/errors.hpp"
#include "streamfill/kernels.hpp"

namespace streamfill {

Matrix::Matrix(std::size_t rows, std::size_t cols, float fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw_shape("matrix data length " + std::to_string(data_.size()) + " != " +
                    std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0f;
    return m;
}

Matrix Matrix::slice_rows(std::size_t first, std::size_t count) const {
    if (first + count > rows_) throw_shape("slice_rows out of range");
    const auto begin = data_.begin() + static_cast<std::ptrdiff_t>(first * cols_);
    return Matrix(count, cols_,
                  std::vector<float>(begin, begin + static_cast<std::ptrdiff_t>(count * cols_)));
}

bool Matrix::all_finite() const {
    for (float v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return a.size() == 0 ||
           std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
}

Matrix vstack(std::span<const Matrix* const> parts) {
    if (parts.empty()) return {};
    const std::size_t cols = parts.front()->cols();
    std::size_t rows = 0;
    for (const Matrix* p : parts) {
        if (p->cols() != cols) throw_shape("vstack: column count mismatch");
        rows += p->rows();
    }
    std::vector<float> data;
    data.reserve(rows * cols);
    for (const Matrix* p : parts) data.insert(data.end(), p->data().begin(), p->data().end());
    return Matrix(rows, cols, std::move(data));
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw_shape("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " * " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Matrix c(a.rows(), b.cols());
    kernels::parallel::gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

Matrix softmax_rows(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    kernels::parallel::softmax_rows(m.data(), out.data(), m.rows(), m.cols());
    return out;
}

Matrix layer_norm(const Matrix& x, std::span<const float> gain, std::span<const float> bias,
                  float eps) {
    if (gain.size() != x.cols() || bias.size() != x.cols()) {
        throw_shape("layer_norm: gain/bias length must equal column count");
    }
    Matrix out(x.rows(), x.cols());
    kernels::parallel::layer_norm(x.data(), gain, bias, out.data(), x.rows(), x.cols(), eps);
    return out;
}

std::uint64_t Rng::next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix seeded_normal(Rng& rng, std::size_t rows, std::size_t cols, float scale) {
    if (!(scale > 0.0f)) throw_config("seeded_normal: scale must be positive");
    Matrix m(rows, cols);
    for (float& v : m.data()) v = static_cast<float>(rng.normal() * scale);
    return m;
}

} // namespace streamfill
