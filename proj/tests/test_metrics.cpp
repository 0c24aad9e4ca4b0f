#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "streamfill/bench.hpp"
#include "streamfill/config.hpp"
#include "streamfill/errors.hpp"
#include "streamfill/metrics.hpp"
#include "streamfill/report_io.hpp"
#include "streamfill/runner.hpp"

using namespace streamfill;

TEST_CASE("psnr closed forms") {
    const FrameTensor zero(16, 16, 0.0f), step(16, 16, 1.0f / 255.0f), one(16, 16, 1.0f);
    CHECK(std::abs(psnr(zero, step) - 20.0 * std::log10(255.0)) < 1e-6);
    CHECK(std::abs(psnr(zero, step) - 48.1308) < 1e-4);
    CHECK(psnr(zero, one) == 0.0);
    CHECK(psnr(one, one) == kPsnrCap);
    FrameTensor tiny = one;
    tiny.data[0] = std::nextafter(1.0f, 0.0f);
    CHECK(psnr(one, tiny) == kPsnrCap);
    CHECK_THROWS_AS(psnr(zero, FrameTensor(8, 16)), ShapeError);
}

TEST_CASE("ssim basics") {
    const FrameTensor a = oracle::random_frame(24, 20, 1), b = oracle::random_frame(24, 20, 2);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
    CHECK(ssim(a, b) < 0.5);

    // Constant images: only the luminance term is left.
    const double u = 0.25, v = 0.75;
    const double c1 = 1e-4;
    const double expect = (2 * u * v + c1) / (u * u + v * v + c1);
    CHECK(std::abs(ssim(FrameTensor(16, 16, float(u)), FrameTensor(16, 16, float(v))) - expect) < 1e-9);

    CHECK_THROWS_AS(ssim(FrameTensor(10, 30), FrameTensor(10, 30)), ConfigError);

    const auto taps = gaussian_taps(11, 1.5);
    double sum = 0.0;
    for (double t : taps) sum += t;
    CHECK(sum == doctest::Approx(1.0));
    CHECK(taps[5] > taps[4]);
    CHECK(taps[0] == doctest::Approx(taps[10]));
}

TEST_CASE("metrics match the naive oracles") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const FrameTensor a = oracle::random_frame(16 + seed, 20, seed);
        FrameTensor b = a;
        Rng rng(seed + 100);
        for (float& x : b.data) x = std::clamp(x + float(0.1 * rng.normal()), 0.0f, 1.0f);
        CHECK(std::abs(psnr(a, b) - oracle::psnr(a, b)) < 1e-6);
        CHECK(std::abs(ssim(a, b) - oracle::ssim(a, b)) < 1e-6);
    }
}

TEST_CASE("moving average") {
    CHECK(moving_average({}).empty());
    CHECK(moving_average({1, 2, 3}, 2) == std::vector<double>{1, 1.5, 2.5});
    std::vector<double> ramp;
    for (int i = 0; i < 15; ++i) ramp.push_back(i);
    const auto ma = moving_average(ramp);
    CHECK(ma[0] == 0.0);
    CHECK(ma[9] == 4.5);
    CHECK(ma[14] == 9.5);
    CHECK_THROWS_AS(moving_average({1.0}, 0), ConfigError);
}

TEST_CASE("temporal curves") {
    const VideoClip truth = oracle::clip(12, 3);
    VideoClip a = truth, b = truth;
    for (auto& f : b.frames) {
        for (float& v : f.data) v *= 0.9f;
    }
    const auto curves = temporal_curves({{"offline", &a}, {"memory", &b}}, truth, "offline");
    REQUIRE(curves.size() == 2);
    CHECK(curves[0].psnr == std::vector<double>(12, kPsnrCap));
    CHECK(curves[0].psnr_diff.empty());
    REQUIRE(curves[1].psnr_diff.size() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(curves[1].psnr_diff[i] == curves[1].psnr[i] - kPsnrCap);
    }
    CHECK(curves[1].psnr_smooth == moving_average(curves[1].psnr));
    CHECK(curves[1].psnr_diff_smooth == moving_average(curves[1].psnr_diff));
    CHECK(temporal_curves({{"memory", &b}}, truth, "offline")[0].psnr_diff.empty());
    VideoClip short_clip = b;
    short_clip.frames.pop_back();
    CHECK_THROWS_AS(temporal_curves({{"memory", &short_clip}}, truth, "offline"), ShapeError);

    std::ostringstream out;
    write_curves_tsv(out, curves);
    const std::string text = out.str();
    CHECK(text.rfind("frame\t", 0) == 0);
    CHECK(text.find("memory_psnr_ma10") != std::string::npos);
    CHECK(text.find("memory_psnr_diff") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 13);
}

TEST_CASE("percentile") {
    CHECK(percentile({1, 2, 3, 4}, 50) == 2.5);
    CHECK(percentile({5}, 95) == 5.0);
    CHECK(percentile({1, 2, 3, 4, 5}, 100) == 5.0);
    CHECK(percentile({3, 1, 2}, 0) == 1.0);
}

namespace {

const WeightSet& weights() {
    static const WeightSet w = init_weights(StackConfig{}, 1);
    return w;
}

} // namespace

TEST_CASE("bench reports") {
    const VideoClip clip = oracle::clip(10, 4);
    RunConfig cfg;
    const auto reports = run_bench(clip, {Mode::memory, Mode::online}, cfg, weights());
    REQUIRE(reports.size() == 2);
    const BenchReport& m = reports[0];
    CHECK(m.label == "memory");
    CHECK(m.frames == 10);
    CHECK(m.timed_frames == 9);
    CHECK(m.fps == doctest::Approx(9.0 / m.elapsed_s));
    CHECK(m.psnr.size() == 10);
    CHECK(m.latency_ms.size() == 10);
    CHECK(m.latency_p50 <= m.latency_p95);
    // Unbounded: peak = every frame stored once.
    CHECK(m.store_bytes_peak == 10 * 4 * 9 * 32 * 4);
    CHECK(m.eviction_count == 0);
    CHECK(reports[1].store_bytes_peak == 0);

    std::ostringstream js, tsv;
    write_reports_jsonl(js, reports);
    write_reports_tsv(tsv, reports);
    const std::string j = js.str(), t = tsv.str();
    CHECK(std::count(j.begin(), j.end(), '\n') == 2);
    CHECK(j.find("\"mode\":\"memory\"") != std::string::npos);
    CHECK(std::count(t.begin(), t.end(), '\n') == 3);
}

TEST_CASE("sweep configs give the requested context") {
    const RunConfig base;
    for (std::size_t n : {1u, 2u, 4u, 8u, 11u, 16u}) {
        const FrameIndex last = 29;
        const RunConfig on = sweep_config(Mode::online, n, base);
        CHECK(apply_toggles(select_online(last, on.sched.k, on.sched.r), on.toggles).joint_inputs().size() == n);
        const RunConfig mem = sweep_config(Mode::memory, n, base);
        CHECK(apply_toggles(select_memory(last, mem.sched.s, mem.sched.r), mem.toggles).context().size() + 1 == n);
    }
    const VideoClip clip = oracle::clip(16, 5);
    const SweepResult s = sweep(clip, {Mode::memory, Mode::refined, Mode::online}, {2, 4, 8}, base, weights());
    CHECK(s.points.size() == 9);
    for (Mode m : {Mode::memory, Mode::refined, Mode::online}) {
        const auto pts = s.for_mode(m);
        REQUIRE(pts.size() == 3);
        for (const auto& p : pts) {
            const std::uint64_t tokens = 9 * p.context;
            const std::uint64_t expect = m == Mode::online ? 4 * tokens * tokens * 32 : 4 * 9 * tokens * 32;
            CHECK(p.frame_macs.score_macs == expect);
        }
    }
    CHECK_THROWS_AS(sweep(clip, {Mode::memory}, {4, 2}, base, weights()), ConfigError);
    CHECK_THROWS_AS(sweep(clip, {Mode::memory}, {32}, base, weights()), ConfigError);
    CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == doctest::Approx(2.0));
}

TEST_CASE("ablation rows") {
    const auto rows = ablation_rows();
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].name == "NR");
    CHECK_FALSE(rows[0].toggles.online_neighbors);
    CHECK_FALSE(rows[0].toggles.references);
    for (const auto& r : rows) CHECK(r.toggles.refined_neighbors);

    const SelectionPlan p = apply_toggles(select_refined(18, 14, 3, 3, 10), rows[1].toggles);
    CHECK(p.context() == std::vector<FrameIndex>{11, 12, 13, 14, 15, 16, 17});

    const auto reports = ablate(oracle::clip(12, 6), RunConfig{}, weights());
    REQUIRE(reports.size() == 4);
    CHECK(reports[3].label == "NR+NO+RR");
    // NR alone attends fewer frames than NR+NO.
    CHECK(reports[0].online_macs.score_macs < reports[1].online_macs.score_macs);
}

TEST_CASE("flat config files") {
    const std::set<std::string> keys = {"k", "mode", "refiner"};
    const FlatConfig c = parse_flat_config("# comment\nk = 7\n\n mode=memory  # trailing\nrefiner = off\n", keys);
    CHECK(config_int(c, "k", 0) == 7);
    CHECK(config_string(c, "mode", "") == "memory");
    CHECK_FALSE(config_bool(c, "refiner", true));
    CHECK(config_int(c, "missing", 3) == 3);
    CHECK_THROWS_AS(parse_flat_config("x = 1\n", keys), ConfigError);
    CHECK_THROWS_AS(parse_flat_config("k = 1\nk = 2\n", keys), ConfigError);
    CHECK_THROWS_AS(parse_flat_config("k\n", keys), ConfigError);
    CHECK_THROWS_AS(config_int(parse_flat_config("k = seven", keys), "k", 0), ConfigError);
    CHECK_THROWS_AS(config_bool(parse_flat_config("refiner = maybe", keys), "refiner", true), ConfigError);
}
