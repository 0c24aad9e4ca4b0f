#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "streamfill/attention.hpp"
#include "streamfill/run.hpp"
#include "streamfill/video.hpp"

namespace streamfill {

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

/// Every field of `config` that influences a run, as key/value strings.
ConfigEcho echo_config(const RunConfig& config);

struct BenchReport {
    std::string label;  // mode name, or the ablation row name
    Mode mode = Mode::online;
    std::size_t frames = 0;
    double fps = 0.0;
    double elapsed_s = 0.0;
    std::size_t timed_frames = 0;
    std::vector<double> latency_ms;
    double latency_p50 = 0.0;
    double latency_p95 = 0.0;
    OpCounter online_macs;
    OpCounter refiner_macs;
    std::size_t store_bytes_peak = 0;
    std::size_t eviction_count = 0;
    std::size_t self_only_frames = 0;
    std::vector<double> psnr, ssim;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    ConfigEcho config;
};

/// Linear-interpolated percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

/// Scores `result` against the ground-truth `clip` and folds in its stats.
BenchReport make_report(const VideoClip& clip, const RunResult& result, const RunConfig& config);

/// One report per mode, in the given order.
std::vector<BenchReport> run_bench(const VideoClip& clip, const std::vector<Mode>& modes,
                                   const RunConfig& config, const WeightSet& weights);

struct SweepPoint {
    Mode mode = Mode::online;
    std::size_t context = 0;  // frames attended by one query frame, itself included
    double mean_psnr = 0.0;
    double fps = 0.0;
    OpCounter frame_macs;  // online-worker MACs of the clip's last frame
};

struct SweepResult {
    std::vector<SweepPoint> points;  // grouped by mode, context increasing
    std::vector<SweepPoint> for_mode(Mode mode) const;
};

/// Scheduler settings under which one frame of `mode` attends exactly
/// `context` frames (references are switched off).
RunConfig sweep_config(Mode mode, std::size_t context, const RunConfig& base);

/// One operating point per (mode, context size). Sizes must be strictly
/// increasing and no larger than the clip.
SweepResult sweep(const VideoClip& clip, const std::vector<Mode>& modes,
                  const std::vector<std::size_t>& contexts, const RunConfig& base,
                  const WeightSet& weights);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct AblationRow {
    std::string name;
    ContextToggles toggles;
};

/// Refined neighbors are always on; the other two parts are toggled.
std::vector<AblationRow> ablation_rows();

/// Refined mode once per ablation row.
std::vector<BenchReport> ablate(const VideoClip& clip, const RunConfig& base,
                                const WeightSet& weights);

} // namespace streamfill
