#include "streamfill/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "streamfill/errors.hpp"

namespace streamfill {

namespace {

void check_same(const FrameTensor& a, const FrameTensor& b) {
    if (a.height != b.height || a.width != b.width || a.data.size() != b.data.size()) {
        throw_shape("metric inputs differ in size: " + std::to_string(a.width) + "x" +
                    std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                    std::to_string(b.height));
    }
}

std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

} // namespace

double psnr(const FrameTensor& a, const FrameTensor& b) {
    check_same(a, b);
    if (a.data.empty()) throw_shape("psnr of empty frames");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(a.data.size());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

std::vector<double> gaussian_taps(std::size_t size, double sigma) {
    if (size == 0 || sigma <= 0.0) throw_config("gaussian window needs size > 0 and sigma > 0");
    std::vector<double> taps(size);
    const double c = (static_cast<double>(size) - 1.0) / 2.0;
    double total = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        const double x = static_cast<double>(i) - c;
        taps[i] = std::exp(-(x * x) / (2.0 * sigma * sigma));
        total += taps[i];
    }
    for (double& t : taps) t /= total;
    return taps;
}

double ssim(const FrameTensor& a, const FrameTensor& b, const SsimParams& params) {
    check_same(a, b);
    const std::size_t win = params.window;
    if (a.height < win || a.width < win) {
        throw_config("ssim needs frames of at least " + std::to_string(win) + "x" +
                     std::to_string(win) + " pixels");
    }
    const auto taps = gaussian_taps(win, params.sigma);
    const double c1 = (params.k1 * params.range) * (params.k1 * params.range);
    const double c2 = (params.k2 * params.range) * (params.k2 * params.range);
    const std::size_t oh = a.height - win + 1;
    const std::size_t ow = a.width - win + 1;

    // Separable filtering of the five moment images: rows first, then columns.
    constexpr int kMoments = 5;
    std::vector<double> rows(kMoments * a.height * ow);
    auto row_at = [&](int m, std::size_t y, std::size_t x) -> double& {
        return rows[(static_cast<std::size_t>(m) * a.height + y) * ow + x];
    };

    double total = 0.0;
    for (std::size_t c = 0; c < FrameTensor::kChannels; ++c) {
        for (std::size_t y = 0; y < a.height; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
                double s[kMoments] = {0, 0, 0, 0, 0};
                for (std::size_t i = 0; i < win; ++i) {
                    const double u = a.at(y, x + i, c);
                    const double v = b.at(y, x + i, c);
                    s[0] += taps[i] * u;
                    s[1] += taps[i] * v;
                    s[2] += taps[i] * u * u;
                    s[3] += taps[i] * v * v;
                    s[4] += taps[i] * u * v;
                }
                for (int m = 0; m < kMoments; ++m) row_at(m, y, x) = s[m];
            }
        }
        double channel = 0.0;
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
                double s[kMoments] = {0, 0, 0, 0, 0};
                for (std::size_t j = 0; j < win; ++j) {
                    for (int m = 0; m < kMoments; ++m) s[m] += taps[j] * row_at(m, y + j, x);
                }
                const double mu_a = s[0], mu_b = s[1];
                const double var_a = s[2] - mu_a * mu_a;
                const double var_b = s[3] - mu_b * mu_b;
                const double cov = s[4] - mu_a * mu_b;
                channel += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                           ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            }
        }
        total += channel / static_cast<double>(oh * ow);
    }
    return total / static_cast<double>(FrameTensor::kChannels);
}

std::vector<double> moving_average(const std::vector<double>& series, std::size_t window) {
    if (window == 0) throw_config("moving average window must be >= 1");
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
        double sum = 0.0;
        for (std::size_t j = lo; j <= i; ++j) sum += series[j];
        out[i] = sum / static_cast<double>(i + 1 - lo);
    }
    return out;
}

std::vector<CurveSet> temporal_curves(const std::vector<NamedClip>& outputs,
                                      const VideoClip& truth, const std::string& reference,
                                      std::size_t window) {
    std::vector<CurveSet> curves;
    for (const auto& [name, clip] : outputs) {
        if (!clip || clip->size() != truth.size()) {
            throw_shape("temporal curves: clip '" + name + "' does not match the ground truth length");
        }
        CurveSet c;
        c.name = name;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            c.psnr.push_back(psnr(clip->frames[i], truth.frames[i]));
            c.ssim.push_back(ssim(clip->frames[i], truth.frames[i]));
        }
        c.psnr_smooth = moving_average(c.psnr, window);
        c.ssim_smooth = moving_average(c.ssim, window);
        curves.push_back(std::move(c));
    }
    const auto ref = std::find_if(curves.begin(), curves.end(),
                                  [&](const CurveSet& c) { return c.name == reference; });
    if (ref == curves.end()) return curves;
    const CurveSet base = *ref;
    for (auto& c : curves) {
        if (c.name == reference) continue;
        c.psnr_diff = diff(c.psnr, base.psnr);
        c.ssim_diff = diff(c.ssim, base.ssim);
        c.psnr_diff_smooth = moving_average(c.psnr_diff, window);
        c.ssim_diff_smooth = moving_average(c.ssim_diff, window);
    }
    return curves;
}

} // namespace streamfill
