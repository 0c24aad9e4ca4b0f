// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "streamfill/bench.hpp"
#include "streamfill/dual_pipeline.hpp"
#include "streamfill/memory_store.hpp"
#include "streamfill/metrics.hpp"
#include "streamfill/report_io.hpp"
#include "streamfill/runner.hpp"

using namespace streamfill;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const WeightSet& weights() {
    static const WeightSet w = init_weights(StackConfig{}, 1);
    return w;
}

VideoClip default_clip() {
    return synth_masked_clip(SynthConfig{});
}

// 1. Memory mode against a cache-free replay.
Outcome cache_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const VideoClip clip = default_clip();
    const RunConfig cfg;
    const RunResult run = run_memory_clip(clip, cfg, weights());
    const auto replay = oracle::replay_memory(clip, cfg.sched.s, cfg.sched.r, weights());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool same = clip.size() == 30 && oracle::same_frames(run.output.frames, replay, clip.size());
    return {same && secs < 120.0,
            fmt("%zu frames bitwise %s, %.2f s", clip.size(), same ? "equal" : "DIFFERENT", secs)};
}

// 2. Single-query rows against joint attention over the same tokens.
Outcome single_query() {
    double worst = 0.0, worst_shuffled = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        Rng rng(1000 + i);
        const std::size_t ctx = rng.next_u64() % 12;
        const std::size_t tokens = 1 + rng.next_u64() % 16;
        const BlockWeights w = oracle::random_block(32, 64, 2000 + i);
        std::vector<TokenGrid> frames;
        for (std::size_t f = 0; f <= ctx; ++f) frames.push_back(oracle::random_grid(tokens, 32, 3000 + 50 * i + f));
        OpCounter c;
        const TokenGrid sq = block_single_query(frames[0], std::span<const TokenGrid>(frames).subspan(1), w, 4, c);
        const auto full = block_full(frames, w, 4, c);
        worst = std::max(worst, oracle::max_abs_diff(sq.tokens, full[0].tokens));

        // Same multiset with the query frame moved elsewhere: rounding only.
        std::vector<TokenGrid> moved(frames.begin() + 1, frames.end());
        const std::size_t at = ctx == 0 ? 0 : rng.next_u64() % (ctx + 1);
        moved.insert(moved.begin() + static_cast<std::ptrdiff_t>(at), frames[0]);
        const auto full2 = block_full(moved, w, 4, c);
        worst_shuffled = std::max(worst_shuffled, oracle::max_abs_diff(sq.tokens, full2[at].tokens));
    }
    return {worst <= 1e-6,
            fmt("100 instances, max |diff| %.3g (query first), %.3g (query at a random slot)", worst,
                worst_shuffled)};
}

// 3. Score-MAC closed forms and cost exponents.
Outcome complexity() {
    const VideoClip clip = default_clip();
    const std::vector<std::size_t> sizes = {2, 4, 8, 16};
    const SweepResult s = sweep(clip, {Mode::memory, Mode::online}, sizes, RunConfig{}, weights());
    const std::uint64_t B = 4, P = 9, D = 32;
    bool exact = true;
    double slopes[2];
    int i = 0;
    for (Mode m : {Mode::memory, Mode::online}) {
        std::vector<double> x, y;
        for (const auto& p : s.for_mode(m)) {
            const std::uint64_t keys = P * p.context;
            const std::uint64_t queries = m == Mode::memory ? P : keys;
            exact = exact && p.frame_macs.score_macs == B * queries * keys * D;
            x.push_back(double(p.context));
            y.push_back(double(p.frame_macs.score_macs));
        }
        slopes[i++] = loglog_slope(x, y);
    }
    const bool pass = exact && std::abs(slopes[0] - 1.0) <= 0.1 && std::abs(slopes[1] - 2.0) <= 0.1;
    return {pass, fmt("closed forms %s, slope memory %.3f, online %.3f", exact ? "exact" : "MISMATCH",
                      slopes[0], slopes[1])};
}

// 4. Wall-clock ordering at a shared context size.
Outcome throughput() {
    const VideoClip clip = default_clip();
    auto best_fps = [&](Mode m, std::size_t context) {
        const RunConfig cfg = sweep_config(m, context, RunConfig{});
        double best = 0.0;
        for (int rep = 0; rep < 5; ++rep) best = std::max(best, run_clip(clip, m, cfg, weights()).stats.fps());
        return best;
    };
    const double mem = best_fps(Mode::memory, 11);
    const double ref = best_fps(Mode::refined, 11);
    const double on = best_fps(Mode::online, 11);
    const double mem16 = best_fps(Mode::memory, 16);
    const double on16 = best_fps(Mode::online, 16);
    const bool pass = mem > ref && ref > on && mem >= 2.0 * on && mem16 >= 2.0 * on16;
    return {pass, fmt("context 11: memory %.0f fps, refined %.0f fps, online %.0f fps (memory/online %.2fx); "
                      "context 16: memory/online %.2fx",
                      mem, ref, on, mem / on, mem16 / on16)};
}

// 5. Perturbing the future leaves the past untouched.
Outcome causality() {
    const VideoClip clip = default_clip();
    std::vector<std::pair<std::string, std::function<RunResult(const VideoClip&)>>> modes = {
        {"online", [](const VideoClip& c) { return run_online_clip(c, {}, weights()); }},
        {"memory", [](const VideoClip& c) { return run_memory_clip(c, {}, weights()); }},
        {"refined", [](const VideoClip& c) { return run_refined_clip(c, {}, weights()); }},
    };
    bool pass = true;
    std::string detail;
    for (const auto& [name, run] : modes) {
        const auto base = run(clip).output.frames;
        for (FrameIndex f : {0, 5, 15}) {
            const auto other = run(oracle::perturb_after(clip, f)).output.frames;
            const bool same = oracle::same_frames(base, other, std::size_t(f + 1));
            // The perturbation must actually reach later outputs.
            const bool reached = !oracle::same_frames(base, other, clip.size());
            if (!same || !reached) {
                pass = false;
                detail += fmt(" %s@%lld%s", name.c_str(), (long long)f, same ? "(no effect)" : "");
            }
        }
    }
    return {pass, pass ? "online, memory, refined at f = 0, 5, 15" : "violations:" + detail};
}

// 6. Scheduler goldens.
Outcome goldens() {
    using V = std::vector<FrameIndex>;
    const SelectionPlan on = select_online(18, 5, 10);
    const SelectionPlan mem = select_memory(18, 5, 10);
    const SelectionPlan ref = select_refined(18, 14, 3, 3, 10);
    const bool a = on.window == V{13, 14, 15, 16, 17, 18} && on.refs == V{0, 10};
    const bool b = mem.online_neighbors == V{13, 14, 15, 16, 17} && mem.refs == V{0, 10};
    const bool c = ref.online_neighbors == V{15, 16, 17} && ref.refined_neighbors == V{11, 12, 13, 14} &&
                   ref.refined_refs == V{0, 10};
    return {a && b && c, fmt("online %s, memory %s, refined %s", a ? "ok" : "WRONG", b ? "ok" : "WRONG",
                             c ? "ok" : "WRONG")};
}

// 7. Refiner off means memory mode.
Outcome degradation() {
    const VideoClip clip = default_clip();
    RunConfig cfg;
    cfg.refiner.enabled = false;
    cfg.sched.r = cfg.sched.rp;
    const RunResult r = run_refined_clip(clip, cfg, weights());
    const RunResult m = run_memory_clip(clip, cfg, weights());
    const bool same = oracle::same_frames(r.output.frames, m.output.frames, clip.size());
    return {same, fmt("%zu frames %s", clip.size(), same ? "bitwise equal" : "DIFFER")};
}

// 8. Unmasked pixels pass through.
Outcome known_region() {
    std::size_t checked = 0, bad = 0;
    for (MaskKind kind : {MaskKind::stationary, MaskKind::moving}) {
        SynthConfig sc;
        const VideoClip clip = synth_masked_clip(sc, kind);
        std::vector<RunResult> runs;
        for (Mode m : {Mode::offline, Mode::online, Mode::memory, Mode::refined}) {
            runs.push_back(run_clip(clip, m, RunConfig{}, weights()));
        }
        RunConfig free;
        free.pacing = Pacing::free_running;
        runs.push_back(run_refined_clip(clip, free, weights()));
        for (const auto& run : runs) {
            for (std::size_t i = 0; i < clip.size(); ++i) {
                for (std::size_t p = 0; p < clip.masks[i].data.size(); ++p) {
                    if (clip.masks[i].data[p]) continue;
                    for (std::size_t c = 0; c < 3; ++c) {
                        ++checked;
                        const float a = run.output.frames[i].data[p * 3 + c];
                        const float b = clip.frames[i].data[p * 3 + c];
                        if (std::memcmp(&a, &b, sizeof a) != 0) ++bad;
                    }
                }
            }
        }
    }
    return {bad == 0 && checked > 0, fmt("%zu values checked, %zu differ", checked, bad)};
}

// 9. Store byte accounting under random operations with eviction.
Outcome accounting() {
    const StoreGeometry g{4, 9, 32};
    const FrameIndex span = 4, rate = 5;
    const std::size_t budget = 9 * g.frame_bytes();
    MemoryStore store(g, {span, rate, budget});
    Rng rng(77);
    auto entries = [&](float v) {
        FrameEntries e(g.blocks);
        for (auto& t : e) t.tokens = Matrix(g.tokens, g.dim, v);
        return e;
    };
    FrameIndex next = 0, watermark = -1;
    std::size_t steps = 0, mismatches = 0, protected_lost = 0, evicted = 0;
    for (int op = 0; op < 200; ++op) {
        const auto before_on = store.snapshot().frames(MemorySide::online);
        const double u = rng.uniform();
        if (u < 0.55) {
            store.put_frame(next++, entries(1.0f), MemorySide::online);
        } else if (u < 0.85 && watermark + 1 < next) {
            const FrameIndex f = watermark + 1 + FrameIndex(rng.next_u64() % std::uint64_t(next - watermark - 1));
            store.put_frame(f, entries(2.0f), MemorySide::refined);
        } else if (watermark + 1 < next) {
            store.publish_watermark(++watermark);
        }
        const StoreSnapshot s = store.snapshot();
        const std::size_t stored = s.frames(MemorySide::online).size() + s.frames(MemorySide::refined).size();
        if (s.bytes() != stored * g.blocks * g.tokens * g.dim * 4 || store.stats().bytes != s.bytes()) ++mismatches;
        const auto after_on = s.frames(MemorySide::online);
        for (FrameIndex f : before_on) {
            if (std::binary_search(after_on.begin(), after_on.end(), f)) continue;
            ++evicted;
            if (f >= next - span && f <= next - 1) ++protected_lost;
        }
        ++steps;
    }

    // The same invariant inside a bounded memory-mode run.
    RunConfig cfg;
    cfg.memory_budget_bytes = 8 * g.frame_bytes();
    const RunResult run = run_memory_clip(default_clip(), cfg, weights());
    const bool run_ok = run.stats.store.peak_bytes <= cfg.memory_budget_bytes &&
                        run.stats.store.bytes == (run.stats.store.online_frames) * g.frame_bytes();

    const bool pass = mismatches == 0 && protected_lost == 0 && evicted > 0 && run_ok;
    return {pass, fmt("%zu steps, %zu evictions, %zu byte mismatches, %zu protected frames lost; bounded run %s",
                      steps, evicted, mismatches, protected_lost, run_ok ? "ok" : "OVER BUDGET")};
}

// 10. Metrics against the naive oracles and closed forms.
Outcome metrics() {
    double worst_psnr = 0.0, worst_ssim = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        const FrameTensor a = oracle::random_frame(32, 32, 500 + i);
        FrameTensor b = a;
        Rng rng(600 + i);
        for (float& v : b.data) v = std::clamp(v + float(0.05 * rng.normal() * double(i % 4 + 1)), 0.0f, 1.0f);
        worst_psnr = std::max(worst_psnr, std::abs(psnr(a, b) - oracle::psnr(a, b)));
        worst_ssim = std::max(worst_ssim, std::abs(ssim(a, b) - oracle::ssim(a, b)));
    }
    const double p = psnr(FrameTensor(32, 32, 0.0f), FrameTensor(32, 32, 1.0f / 255.0f));
    const FrameTensor x = oracle::random_frame(32, 32, 1);
    const double s = ssim(x, x);
    const bool pass = worst_psnr <= 1e-6 && worst_ssim <= 1e-6 && std::abs(p - 48.1308) <= 1e-4 &&
                      std::abs(s - 1.0) <= 1e-6;
    return {pass, fmt("max |psnr - oracle| %.2g, max |ssim - oracle| %.2g, 1/255 error %.4f dB, ssim(x, x) %.9f",
                      worst_psnr, worst_ssim, p, s)};
}

// 11. Per-frame curves for every mode and the offline reference.
Outcome curves() {
    const VideoClip clip = default_clip();
    const std::vector<Mode> modes = {Mode::offline, Mode::online, Mode::memory, Mode::refined};
    std::vector<RunResult> runs;
    std::vector<NamedClip> named;
    for (Mode m : modes) runs.push_back(run_clip(clip, m, RunConfig{}, weights()));
    for (std::size_t i = 0; i < modes.size(); ++i) named.push_back({std::string(to_string(modes[i])), &runs[i].output});
    const auto sets = temporal_curves(named, clip, "offline");

    const std::size_t n = clip.size();
    bool ok = sets.size() == modes.size();
    for (std::size_t i = 0; ok && i < sets.size(); ++i) {
        const CurveSet& c = sets[i];
        ok = c.psnr.size() == n;
        for (std::size_t f = 0; ok && f < n; ++f) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t j = f + 1 > 10 ? f + 1 - 10 : 0; j <= f; ++j, ++count) sum += c.psnr[j];
            ok = std::abs(c.psnr_smooth[f] - sum / double(count)) < 1e-12 &&
                 std::abs(c.psnr[f] - oracle::psnr(runs[i].output.frames[f], clip.frames[f])) <= 1e-6;
            if (ok && c.name != "offline") {
                ok = c.psnr_diff.size() == n && c.psnr_diff[f] == c.psnr[f] - sets[0].psnr[f];
            }
        }
    }
    std::ostringstream tsv;
    write_curves_tsv(tsv, sets);
    const std::string text = tsv.str();
    ok = ok && std::count(text.begin(), text.end(), '\n') == long(n + 1) &&
         text.find("refined_psnr_diff_ma10") != std::string::npos;
    std::ofstream("acceptance_curves.tsv") << text;
    return {ok, fmt("%zu series of %zu frames with 10-frame averages and differences vs offline", sets.size(), n)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"cache-correctness oracle", cache_oracle},
        {"single-query equivalence", single_query},
        {"complexity reduction", complexity},
        {"throughput ordering", throughput},
        {"causality", causality},
        {"scheduler goldens", goldens},
        {"degradation", degradation},
        {"known-region fidelity", known_region},
        {"memory accounting", accounting},
        {"metric oracles", metrics},
        {"temporal-curve harness", curves},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %2zu %-26s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
