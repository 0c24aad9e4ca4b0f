// Serial reference kernels vs their OpenMP counterparts on stack-sized and
// larger problems. Prints one TSV row per (kernel, size) with both timings and
// whether the outputs matched bit for bit.
//
//   bench_kernels [repeats]

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "streamfill/kernels.hpp"
#include "streamfill/matrix.hpp"

namespace k = streamfill::kernels;

namespace {

std::vector<float> random_values(std::size_t n, std::uint64_t seed) {
    streamfill::Rng rng(seed);
    std::vector<float> v(n);
    for (float& x : v) x = static_cast<float>(rng.normal());
    return v;
}

double best_ms(int repeats, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

bool same_bits(const std::vector<float>& a, const std::vector<float>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

void row(const std::string& name, const std::string& size, double serial_ms, double parallel_ms,
         bool equal) {
    std::cout << name << '\t' << size << '\t' << serial_ms << '\t' << parallel_ms << '\t'
              << (parallel_ms > 0 ? serial_ms / parallel_ms : 0.0) << '\t'
              << (equal ? "yes" : "NO") << '\n';
}

} // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
    std::cout << "# threads=" << k::max_threads() << "\n";
    std::cout << "kernel\tsize\tserial_ms\tparallel_ms\tspeedup\tbitwise_equal\n";
    bool all_equal = true;

    for (std::size_t n : {64, 256, 512}) {
        const auto a = random_values(n * n, 1), b = random_values(n * n, 2);
        std::vector<float> cs(n * n), cp(n * n);
        const double ts = best_ms(repeats, [&] { k::serial::gemm(a, b, cs, n, n, n); });
        const double tp = best_ms(repeats, [&] { k::parallel::gemm(a, b, cp, n, n, n); });
        all_equal &= same_bits(cs, cp);
        row("gemm", std::to_string(n) + "^3", ts, tp, same_bits(cs, cp));
    }
    for (std::size_t rows : {144, 4096}) {
        const std::size_t cols = 256;
        const auto x = random_values(rows * cols, 3);
        std::vector<float> ss(x.size()), sp(x.size());
        const double ts = best_ms(repeats, [&] { k::serial::softmax_rows(x, ss, rows, cols); });
        const double tp = best_ms(repeats, [&] { k::parallel::softmax_rows(x, sp, rows, cols); });
        all_equal &= same_bits(ss, sp);
        row("softmax", std::to_string(rows) + "x" + std::to_string(cols), ts, tp, same_bits(ss, sp));

        const std::vector<float> gain(cols, 1.0f), bias(cols, 0.0f);
        const double ls = best_ms(repeats, [&] { k::serial::layer_norm(x, gain, bias, ss, rows, cols, 1e-5f); });
        const double lp = best_ms(repeats, [&] { k::parallel::layer_norm(x, gain, bias, sp, rows, cols, 1e-5f); });
        all_equal &= same_bits(ss, sp);
        row("layer_norm", std::to_string(rows) + "x" + std::to_string(cols), ls, lp, same_bits(ss, sp));
    }
    // 9 tokens per frame at the default config: 16 frames joint, and one
    // query frame against 16 frames.
    for (auto [q, keys] : {std::pair<std::size_t, std::size_t>{144, 144}, {9, 144}, {1024, 1024}}) {
        const k::AttentionShape shape{q, keys, 32, 4};
        const auto qv = random_values(q * 32, 4), kv = random_values(keys * 32, 5),
                   vv = random_values(keys * 32, 6);
        std::vector<float> os(q * 32), op(q * 32);
        const double ts = best_ms(repeats, [&] { k::serial::attention(qv, kv, vv, os, shape); });
        const double tp = best_ms(repeats, [&] { k::parallel::attention(qv, kv, vv, op, shape); });
        all_equal &= same_bits(os, op);
        row("attention", std::to_string(q) + "q x " + std::to_string(keys) + "k", ts, tp,
            same_bits(os, op));
    }
    return all_equal ? 0 : 1;
}
