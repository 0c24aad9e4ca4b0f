#pragma once

// Whole-clip drivers for the four modes. Every driver corrupts the clip with
// its masks first, so callers pass ground-truth frames.

#include "streamfill/attention.hpp"
#include "streamfill/run.hpp"
#include "streamfill/video.hpp"

namespace streamfill {

/// Offline: non-overlapping windows of 2k+1 frames plus clip-wide refs, one
/// joint pass per window.
RunResult run_offline_clip(const VideoClip& clip, const RunConfig& config, const WeightSet& weights);

/// Online: one joint pass over [f-k, f] plus refs per frame; only f is kept.
RunResult run_online_clip(const VideoClip& clip, const RunConfig& config, const WeightSet& weights);

/// Memory: single-query steps against cached block inputs of past frames.
RunResult run_memory_clip(const VideoClip& clip, const RunConfig& config, const WeightSet& weights);

RunResult run_clip(const VideoClip& clip, Mode mode, const RunConfig& config,
                   const WeightSet& weights);

/// Throws ShapeError if the clip is empty, ragged, or not divisible by the
/// codec downsample factor of `weights`.
void check_clip_for_weights(const VideoClip& clip, const WeightSet& weights);

} // namespace streamfill
