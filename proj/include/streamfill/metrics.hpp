#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "streamfill/video.hpp"

namespace streamfill {

inline constexpr double kPsnrCap = 99.0;

/// 10 log10(1 / MSE) over all H*W*3 values; identical frames give kPsnrCap.
double psnr(const FrameTensor& a, const FrameTensor& b);

struct SsimParams {
    std::size_t window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double range = 1.0;
};

/// Gaussian-window SSIM per channel over valid window positions, averaged
/// over positions and channels. Frames smaller than the window are rejected.
double ssim(const FrameTensor& a, const FrameTensor& b, const SsimParams& params = {});

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
std::vector<double> gaussian_taps(std::size_t size, double sigma);

/// Trailing mean over up to `window` values (shorter at the start).
std::vector<double> moving_average(const std::vector<double>& series, std::size_t window = 10);

struct CurveSet {
    std::string name;
    std::vector<double> psnr, ssim;
    std::vector<double> psnr_smooth, ssim_smooth;
    /// this minus the reference curve, raw and smoothed; empty for the reference itself
    std::vector<double> psnr_diff, ssim_diff;
    std::vector<double> psnr_diff_smooth, ssim_diff_smooth;
};

struct NamedClip {
    std::string name;
    const VideoClip* clip = nullptr;
};

/// Per-frame PSNR/SSIM against `truth` for each clip, smoothed, plus the
/// difference against the clip named `reference` (typically "offline").
std::vector<CurveSet> temporal_curves(const std::vector<NamedClip>& outputs,
                                      const VideoClip& truth, const std::string& reference,
                                      std::size_t window = 10);

} // namespace streamfill
