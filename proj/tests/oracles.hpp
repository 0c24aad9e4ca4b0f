#pragma once

// Slow, independently written references used by the tests. Nothing here
// calls the code path it is checking.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <vector>

#include "streamfill/attention.hpp"
#include "streamfill/matrix.hpp"
#include "streamfill/schedule.hpp"
#include "streamfill/video.hpp"

namespace oracle {

using namespace streamfill;

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                            double scale = 1.0) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (float& v : m.data()) v = static_cast<float>(scale * rng.normal());
    return m;
}

/// A token grid with `tokens` rows; the layout is a 1 x tokens strip.
inline TokenGrid random_grid(std::size_t tokens, std::size_t dim, std::uint64_t seed) {
    TokenGrid g;
    g.tokens = random_matrix(tokens, dim, seed);
    g.layout = {1, tokens, 1, 1, 1, tokens};
    return g;
}

/// Random block weights at the init scale, with non-trivial norms and biases.
inline BlockWeights random_block(std::size_t dim, std::size_t ffn, std::uint64_t seed) {
    Rng rng(seed);
    auto dense = [&](std::size_t r, std::size_t c) {
        Matrix m(r, c);
        for (float& v : m.data()) v = static_cast<float>(rng.normal() / std::sqrt(double(r)));
        return m;
    };
    auto vec = [&](std::size_t n, double mean, double sd) {
        std::vector<float> v(n);
        for (float& x : v) x = static_cast<float>(mean + sd * rng.normal());
        return v;
    };
    BlockWeights b;
    b.wq = dense(dim, dim);
    b.wk = dense(dim, dim);
    b.wv = dense(dim, dim);
    b.wo = dense(dim, dim);
    b.ln1_gain = vec(dim, 1.0, 0.1);
    b.ln1_bias = vec(dim, 0.0, 0.1);
    b.ffn_w1 = dense(dim, ffn);
    b.ffn_b1 = vec(ffn, 0.0, 0.1);
    b.ffn_w2 = dense(ffn, dim);
    b.ffn_b2 = vec(dim, 0.0, 0.1);
    b.ln2_gain = vec(dim, 1.0, 0.1);
    b.ln2_bias = vec(dim, 0.0, 0.1);
    return b;
}

using DMat = std::vector<std::vector<double>>;

inline DMat to_double(const Matrix& m) {
    DMat out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
    }
    return out;
}

inline DMat dmul(const DMat& a, const Matrix& b) {
    DMat out(a.size(), std::vector<double>(b.cols(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < b.rows(); ++k) s += a[i][k] * b(k, j);
            out[i][j] = s;
        }
    }
    return out;
}

inline DMat dnorm(const DMat& x, const std::vector<float>& g, const std::vector<float>& b) {
    DMat out = x;
    for (auto& row : out) {
        double mean = 0.0;
        for (double v : row) mean += v;
        mean /= double(row.size());
        double var = 0.0;
        for (double v : row) var += (v - mean) * (v - mean);
        var /= double(row.size());
        for (std::size_t c = 0; c < row.size(); ++c) {
            row[c] = (row[c] - mean) / std::sqrt(var + 1e-5) * g[c] + b[c];
        }
    }
    return out;
}

/// Pre-norm block in double precision: queries from `xq`, keys/values from `xk`.
inline DMat block(const DMat& xq, const DMat& xk, const BlockWeights& w, std::size_t heads) {
    const std::size_t d = w.wq.rows();
    const std::size_t dh = d / heads;
    const DMat q = dmul(dnorm(xq, w.ln1_gain, w.ln1_bias), w.wq);
    const DMat kn = dnorm(xk, w.ln1_gain, w.ln1_bias);
    const DMat k = dmul(kn, w.wk);
    const DMat v = dmul(kn, w.wv);
    DMat attn(xq.size(), std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < xq.size(); ++i) {
        for (std::size_t h = 0; h < heads; ++h) {
            std::vector<double> logits(xk.size());
            double mx = -1e300;
            for (std::size_t j = 0; j < xk.size(); ++j) {
                double s = 0.0;
                for (std::size_t c = h * dh; c < (h + 1) * dh; ++c) s += q[i][c] * k[j][c];
                logits[j] = s / std::sqrt(double(dh));
                mx = std::max(mx, logits[j]);
            }
            double z = 0.0;
            for (double& l : logits) z += (l = std::exp(l - mx));
            for (std::size_t j = 0; j < xk.size(); ++j) {
                for (std::size_t c = h * dh; c < (h + 1) * dh; ++c) {
                    attn[i][c] += logits[j] / z * v[j][c];
                }
            }
        }
    }
    DMat x1 = dmul(attn, w.wo);
    for (std::size_t i = 0; i < x1.size(); ++i) {
        for (std::size_t c = 0; c < d; ++c) x1[i][c] += xq[i][c];
    }
    DMat hid = dmul(dnorm(x1, w.ln2_gain, w.ln2_bias), w.ffn_w1);
    for (auto& row : hid) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double x = row[c] + w.ffn_b1[c];
            row[c] = 0.5 * x * (1.0 + std::tanh(std::sqrt(2.0 / M_PI) * (x + 0.044715 * x * x * x)));
        }
    }
    DMat out = dmul(hid, w.ffn_w2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t c = 0; c < d; ++c) out[i][c] += w.ffn_b2[c] + x1[i][c];
    }
    return out;
}

inline double max_abs_diff(const DMat& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t c = 0; c < a[r].size(); ++c) m = std::max(m, std::abs(a[r][c] - b(r, c)));
    }
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(double(a.data()[i]) - double(b.data()[i])));
    }
    return m;
}

/// Memory-mode outputs recomputed without any cache: for each output frame a
/// fresh table is filled by recursion over the selection plans, so every
/// context representation is derived again from the corrupted input frames.
inline std::vector<FrameTensor> replay_memory(const VideoClip& clip, FrameIndex s, FrameIndex r,
                                              const WeightSet& w) {
    const VideoClip input = corrupt(clip);
    std::vector<FrameTensor> out;
    for (FrameIndex f = 0; f < FrameIndex(input.size()); ++f) {
        // rep[(frame, b)] = block-b input of frame
        std::map<std::pair<FrameIndex, std::size_t>, TokenGrid> rep;
        std::function<const TokenGrid&(FrameIndex, std::size_t)> get =
            [&](FrameIndex g, std::size_t b) -> const TokenGrid& {
            const auto key = std::make_pair(g, b);
            if (auto it = rep.find(key); it != rep.end()) return it->second;
            TokenGrid value;
            if (b == 0) {
                value = frame_tokens(input.frames[g], input.masks[g], w);
            } else {
                std::vector<TokenGrid> ctx;
                for (FrameIndex c : select_memory(g, s, r).context()) ctx.push_back(get(c, b - 1));
                OpCounter unused;
                value = block_single_query(get(g, b - 1), std::span<const TokenGrid>(ctx),
                                           w.blocks[b - 1], w.config.heads, unused);
            }
            return rep.emplace(key, std::move(value)).first->second;
        };
        out.push_back(finish_frame(get(f, w.config.blocks), input.frames[f], input.masks[f], w));
    }
    return out;
}

inline double psnr(const FrameTensor& a, const FrameTensor& b) {
    long double se = 0.0;
    for (std::size_t y = 0; y < a.height; ++y) {
        for (std::size_t x = 0; x < a.width; ++x) {
            for (std::size_t c = 0; c < 3; ++c) {
                const long double d = (long double)a.at(y, x, c) - (long double)b.at(y, x, c);
                se += d * d;
            }
        }
    }
    const long double mse = se / (long double)(a.height * a.width * 3);
    if (mse == 0) return 99.0;
    return std::min(99.0, double(-10.0L * std::log10(mse)));
}

/// Direct 11x11 window sums with two-pass moments.
inline double ssim(const FrameTensor& a, const FrameTensor& b) {
    const int n = 11;
    double w[11][11];
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double di = i - 5, dj = j - 5;
            w[i][j] = std::exp(-(di * di + dj * dj) / (2 * 1.5 * 1.5));
            total += w[i][j];
        }
    }
    for (auto& row : w) {
        for (double& v : row) v /= total;
    }
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = 0; y + n <= a.height; ++y) {
            for (std::size_t x = 0; x + n <= a.width; ++x) {
                double ma = 0, mb = 0;
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        ma += w[i][j] * a.at(y + i, x + j, c);
                        mb += w[i][j] * b.at(y + i, x + j, c);
                    }
                }
                double va = 0, vb = 0, cov = 0;
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        const double da = a.at(y + i, x + j, c) - ma;
                        const double db = b.at(y + i, x + j, c) - mb;
                        va += w[i][j] * da * da;
                        vb += w[i][j] * db * db;
                        cov += w[i][j] * da * db;
                    }
                }
                sum += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                ++count;
            }
        }
    }
    return sum / double(count);
}

inline FrameTensor random_frame(std::size_t h, std::size_t w, std::uint64_t seed) {
    Rng rng(seed);
    FrameTensor f(h, w);
    for (float& v : f.data) v = static_cast<float>(rng.uniform());
    return f;
}

/// Default-geometry synthetic clip with a stationary centered mask.
inline VideoClip clip(std::size_t frames, std::uint64_t seed = 7,
                      MaskKind kind = MaskKind::stationary) {
    SynthConfig cfg;
    cfg.frame_count = frames;
    cfg.seed = seed;
    return synth_masked_clip(cfg, kind);
}

/// Copy of `c` with every frame after `f` replaced by noise.
inline VideoClip perturb_after(const VideoClip& c, FrameIndex f, std::uint64_t seed = 99) {
    VideoClip out = c;
    for (std::size_t i = std::size_t(f + 1); i < out.size(); ++i) {
        out.frames[i] = random_frame(out.height(), out.width(), seed + i);
        for (auto& m : out.masks[i].data) m = std::uint8_t(1 - m);
    }
    return out;
}

inline bool same_frames(const std::vector<FrameTensor>& a, const std::vector<FrameTensor>& b,
                        std::size_t count) {
    if (a.size() < count || b.size() < count) return false;
    for (std::size_t i = 0; i < count; ++i) {
        if (a[i].data.size() != b[i].data.size() ||
            std::memcmp(a[i].data.data(), b[i].data.data(), a[i].data.size() * sizeof(float)) != 0) {
            return false;
        }
    }
    return true;
}

} // namespace oracle
