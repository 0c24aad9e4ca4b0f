#include "streamfill/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "streamfill/errors.hpp"
#include "streamfill/metrics.hpp"
#include "streamfill/runner.hpp"

namespace streamfill {

namespace {

std::string on_off(bool b) { return b ? "on" : "off"; }

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

ConfigEcho echo_config(const RunConfig& c) {
    return {
        {"k", std::to_string(c.sched.k)},
        {"s", std::to_string(c.sched.s)},
        {"sp", std::to_string(c.sched.sp)},
        {"r", std::to_string(c.sched.r)},
        {"rp", std::to_string(c.sched.rp)},
        {"kr", std::to_string(c.refiner.radius)},
        {"lag", std::to_string(c.refiner.lag)},
        {"refiner_stride", std::to_string(c.refiner.effective_stride())},
        {"refiner", on_off(c.refiner.enabled)},
        {"pacing", std::string(to_string(c.pacing))},
        {"memory_budget", std::to_string(c.memory_budget_bytes)},
        {"online_neighbors", on_off(c.toggles.online_neighbors)},
        {"refined_neighbors", on_off(c.toggles.refined_neighbors)},
        {"references", on_off(c.toggles.references)},
    };
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    if (q < 0.0 || q > 100.0) throw_config("percentile must be in [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BenchReport make_report(const VideoClip& clip, const RunResult& result, const RunConfig& config) {
    const RunStats& st = result.stats;
    BenchReport r;
    r.label = std::string(to_string(st.mode));
    r.mode = st.mode;
    r.frames = result.output.size();
    r.fps = st.fps();
    r.elapsed_s = st.elapsed_s;
    r.timed_frames = st.timed_frames;
    for (const auto& f : st.frames) r.latency_ms.push_back(f.latency_ms);
    // Frame 0 is the warm-up frame and is left out of the latency summary too.
    const std::vector<double> timed(r.latency_ms.size() > 1 ? r.latency_ms.begin() + 1
                                                            : r.latency_ms.begin(),
                                    r.latency_ms.end());
    r.latency_p50 = percentile(timed, 50.0);
    r.latency_p95 = percentile(timed, 95.0);
    r.online_macs = st.online_macs;
    r.refiner_macs = st.refiner_macs;
    r.store_bytes_peak = st.store.peak_bytes;
    r.eviction_count = st.store.evictions;
    r.self_only_frames = st.self_only_frames;
    for (std::size_t i = 0; i < clip.size(); ++i) {
        r.psnr.push_back(psnr(result.output.frames[i], clip.frames[i]));
        r.ssim.push_back(ssim(result.output.frames[i], clip.frames[i]));
    }
    r.mean_psnr = mean(r.psnr);
    r.mean_ssim = mean(r.ssim);
    r.config = echo_config(config);
    r.config.insert(r.config.begin(), {"mode", r.label});
    return r;
}

std::vector<BenchReport> run_bench(const VideoClip& clip, const std::vector<Mode>& modes,
                                   const RunConfig& config, const WeightSet& weights) {
    std::vector<BenchReport> out;
    for (Mode m : modes) out.push_back(make_report(clip, run_clip(clip, m, config, weights), config));
    return out;
}

std::vector<SweepPoint> SweepResult::for_mode(Mode mode) const {
    std::vector<SweepPoint> out;
    for (const auto& p : points) {
        if (p.mode == mode) out.push_back(p);
    }
    return out;
}

RunConfig sweep_config(Mode mode, std::size_t context, const RunConfig& base) {
    if (context < 1) throw_config("context size must be >= 1");
    RunConfig c = base;
    c.toggles = {};
    c.toggles.references = false;
    const auto extra = static_cast<FrameIndex>(context - 1);
    switch (mode) {
    case Mode::offline:
        // Windows of 2k+1 frames only hit odd sizes; round up.
        c.sched.k = (extra + 1) / 2;
        break;
    case Mode::online:
        c.sched.k = extra;
        break;
    case Mode::memory:
        c.sched.s = extra;
        break;
    case Mode::refined: {
        // Split the context between online and refined neighbors; the lag
        // keeps the two ranges disjoint.
        const FrameIndex online = (extra + 1) / 2;
        const FrameIndex refined = extra / 2;
        c.sched.s = online;
        if (refined == 0) {
            c.toggles.refined_neighbors = false;
            c.sched.sp = 0;
        } else {
            c.sched.sp = refined - 1;
        }
        c.refiner.lag = std::max<FrameIndex>(1, online + 1);
        break;
    }
    }
    return c;
}

SweepResult sweep(const VideoClip& clip, const std::vector<Mode>& modes,
                  const std::vector<std::size_t>& contexts, const RunConfig& base,
                  const WeightSet& weights) {
    if (contexts.empty()) throw_config("sweep needs at least one context size");
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        if (contexts[i] < 1 || (i > 0 && contexts[i] <= contexts[i - 1])) {
            throw_config("sweep context sizes must be positive and strictly increasing");
        }
    }
    if (contexts.back() > clip.size()) {
        throw_config("largest sweep context (" + std::to_string(contexts.back()) +
                     ") exceeds the clip length (" + std::to_string(clip.size()) + ")");
    }
    SweepResult out;
    for (Mode m : modes) {
        for (std::size_t n : contexts) {
            const RunConfig cfg = sweep_config(m, n, base);
            const RunResult run = run_clip(clip, m, cfg, weights);
            SweepPoint p;
            p.mode = m;
            p.context = n;
            p.fps = run.stats.fps();
            std::vector<double> q;
            for (std::size_t i = 0; i < clip.size(); ++i) {
                q.push_back(psnr(run.output.frames[i], clip.frames[i]));
            }
            p.mean_psnr = mean(q);
            const FrameIndex last = static_cast<FrameIndex>(clip.size()) - 1;
            for (const auto& fs : run.stats.frames) {
                if (fs.frame == last) p.frame_macs = fs.macs;
            }
            if (m == Mode::offline) {
                // Offline charges each joint pass to the first frame of its tile.
                p.frame_macs = run.stats.frames.front().macs;
            }
            out.points.push_back(p);
        }
    }
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw_config("slope needs two or more paired points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0) throw_config("log-log slope needs positive values");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double mx = mean(lx), my = mean(ly);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    if (den == 0.0) throw_config("log-log slope needs distinct x values");
    return num / den;
}

std::vector<AblationRow> ablation_rows() {
    ContextToggles nr{false, true, false};
    ContextToggles nr_no{true, true, false};
    ContextToggles nr_rr{false, true, true};
    ContextToggles all{true, true, true};
    return {{"NR", nr}, {"NR+NO", nr_no}, {"NR+RR", nr_rr}, {"NR+NO+RR", all}};
}

std::vector<BenchReport> ablate(const VideoClip& clip, const RunConfig& base,
                                const WeightSet& weights) {
    std::vector<BenchReport> out;
    for (const auto& row : ablation_rows()) {
        RunConfig cfg = base;
        cfg.toggles = row.toggles;
        BenchReport r = make_report(clip, run_clip(clip, Mode::refined, cfg, weights), cfg);
        r.label = row.name;
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace streamfill
