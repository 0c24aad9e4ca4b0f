#include "streamfill/report_io.hpp"

#include "json.hpp"

namespace streamfill {

namespace {

using nlohmann::json;

json macs_json(const OpCounter& c) {
    return {{"score_macs", c.score_macs},
            {"value_macs", c.value_macs},
            {"ffn_macs", c.ffn_macs},
            {"proj_macs", c.proj_macs},
            {"total_macs", c.total()}};
}

} // namespace

std::string report_json(const BenchReport& r) {
    json config = json::object();
    for (const auto& [k, v] : r.config) config[k] = v;
    json j = {
        {"label", r.label},
        {"mode", std::string(to_string(r.mode))},
        {"frames", r.frames},
        {"fps", r.fps},
        {"elapsed_s", r.elapsed_s},
        {"timed_frames", r.timed_frames},
        {"latency_p50_ms", r.latency_p50},
        {"latency_p95_ms", r.latency_p95},
        {"latency_ms", r.latency_ms},
        {"online", macs_json(r.online_macs)},
        {"refiner", macs_json(r.refiner_macs)},
        {"store_bytes_peak", r.store_bytes_peak},
        {"eviction_count", r.eviction_count},
        {"self_only_frames", r.self_only_frames},
        {"mean_psnr", r.mean_psnr},
        {"mean_ssim", r.mean_ssim},
        {"psnr", r.psnr},
        {"ssim", r.ssim},
        {"config", config},
    };
    return j.dump();
}

void write_reports_jsonl(std::ostream& out, const std::vector<BenchReport>& reports) {
    for (const auto& r : reports) out << report_json(r) << '\n';
}

void write_reports_tsv(std::ostream& out, const std::vector<BenchReport>& reports) {
    out << "label\tmode\tframes\tfps\tp50_ms\tp95_ms\tscore_macs\tvalue_macs\tffn_macs"
           "\tproj_macs\trefiner_macs\tstore_bytes_peak\tevictions\tmean_psnr\tmean_ssim\n";
    for (const auto& r : reports) {
        out << r.label << '\t' << to_string(r.mode) << '\t' << r.frames << '\t' << r.fps << '\t'
            << r.latency_p50 << '\t' << r.latency_p95 << '\t' << r.online_macs.score_macs << '\t'
            << r.online_macs.value_macs << '\t' << r.online_macs.ffn_macs << '\t'
            << r.online_macs.proj_macs << '\t' << r.refiner_macs.total() << '\t'
            << r.store_bytes_peak << '\t' << r.eviction_count << '\t' << r.mean_psnr << '\t'
            << r.mean_ssim << '\n';
    }
}

void write_sweep_tsv(std::ostream& out, const SweepResult& sweep) {
    out << "mode\tcontext\tmean_psnr\tfps\tscore_macs\ttotal_macs\n";
    for (const auto& p : sweep.points) {
        out << to_string(p.mode) << '\t' << p.context << '\t' << p.mean_psnr << '\t' << p.fps
            << '\t' << p.frame_macs.score_macs << '\t' << p.frame_macs.total() << '\n';
    }
}

void write_sweep_jsonl(std::ostream& out, const SweepResult& sweep) {
    for (const auto& p : sweep.points) {
        json j = {{"mode", std::string(to_string(p.mode))},
                  {"context", p.context},
                  {"mean_psnr", p.mean_psnr},
                  {"fps", p.fps},
                  {"frame", macs_json(p.frame_macs)}};
        out << j.dump() << '\n';
    }
}

void write_curves_tsv(std::ostream& out, const std::vector<CurveSet>& curves) {
    out << "frame";
    for (const auto& c : curves) {
        out << '\t' << c.name << "_psnr\t" << c.name << "_psnr_ma10\t" << c.name << "_ssim\t"
            << c.name << "_ssim_ma10";
        if (!c.psnr_diff.empty()) {
            out << '\t' << c.name << "_psnr_diff\t" << c.name << "_psnr_diff_ma10\t" << c.name
                << "_ssim_diff\t" << c.name << "_ssim_diff_ma10";
        }
    }
    out << '\n';
    const std::size_t n = curves.empty() ? 0 : curves.front().psnr.size();
    for (std::size_t i = 0; i < n; ++i) {
        out << i;
        for (const auto& c : curves) {
            out << '\t' << c.psnr[i] << '\t' << c.psnr_smooth[i] << '\t' << c.ssim[i] << '\t'
                << c.ssim_smooth[i];
            if (!c.psnr_diff.empty()) {
                out << '\t' << c.psnr_diff[i] << '\t' << c.psnr_diff_smooth[i] << '\t'
                    << c.ssim_diff[i] << '\t' << c.ssim_diff_smooth[i];
            }
        }
        out << '\n';
    }
}

} // namespace streamfill
