// streamfill command-line tool.
//
//   streamfill synth   --out-video v.rvv --out-masks m.rvv [--frames 30 --seed 1 ...]
//   streamfill inpaint --mode memory --in v.rvv --masks m.rvv --out o.rvv [--k --s ...]
//   streamfill bench   [--in v.rvv --masks m.rvv] [--modes offline,online,memory,refined]
//   streamfill sweep   [--sizes 2,4,8,16] [--modes memory,online,refined]
//   streamfill ablate
//   streamfill weights --out w.wts [--seed 1]
//
// Every command also accepts --config FILE with flat "key = value" lines; keys
// are the long flag names with '-' replaced by '_'. Flags win over the file.
//
// Exit codes: 0 ok, 2 usage/config error, 3 data error (bad or unreadable
// files, mismatched shapes), 1 internal error.

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "streamfill/attention.hpp"
#include "streamfill/bench.hpp"
#include "streamfill/config.hpp"
#include "streamfill/errors.hpp"
#include "streamfill/memory_store.hpp"
#include "streamfill/metrics.hpp"
#include "streamfill/report_io.hpp"
#include "streamfill/runner.hpp"

using namespace streamfill;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct Command {
    CLI::App* app = nullptr;
    FlatConfig flags;
    std::set<std::string> keys;
    std::string config_path;

    FlatConfig effective() const {
        FlatConfig out;
        if (!config_path.empty()) out = read_flat_config(config_path, keys);
        for (const auto& [k, v] : flags) out[k] = v;
        return out;
    }
};

std::string dashed(std::string key) {
    for (char& c : key) {
        if (c == '_') c = '-';
    }
    return key;
}

void add_key(Command& cmd, const std::string& key, const std::string& help) {
    cmd.keys.insert(key);
    FlatConfig* into = &cmd.flags;
    cmd.app->add_option_function<std::string>(
        "--" + dashed(key), [into, key](const std::string& v) { (*into)[key] = v; }, help);
}

Command make_command(CLI::App& root, const std::string& name, const std::string& help) {
    Command cmd;
    cmd.app = root.add_subcommand(name, help);
    return cmd;
}

void add_config_flag(Command& cmd) {
    cmd.app->add_option("--config", cmd.config_path, "flat key = value config file");
}

void add_run_keys(Command& cmd) {
    add_key(cmd, "k", "window radius (offline/online)");
    add_key(cmd, "s", "online memory span");
    add_key(cmd, "sp", "refined neighbor span s'");
    add_key(cmd, "r", "reference sampling rate");
    add_key(cmd, "rp", "refined reference sampling rate r'");
    add_key(cmd, "lag", "refiner lag L");
    add_key(cmd, "kr", "refiner window radius");
    add_key(cmd, "refiner_stride", "distance between refiner windows (0 = kr+1)");
    add_key(cmd, "refiner", "on/off");
    add_key(cmd, "pacing", "synchronous or free-running");
    add_key(cmd, "memory_budget", "store budget in bytes (0 = unbounded)");
    add_key(cmd, "seed", "seed for weights (and synthetic input)");
    add_key(cmd, "weights", "WTS1 weight file; seeded init when omitted");
    add_config_flag(cmd);
}

void add_input_keys(Command& cmd, bool required_note) {
    add_key(cmd, "in", required_note ? "input video (RVV)" : "input video (RVV); synthetic when omitted");
    add_key(cmd, "masks", "mask video (RVV)");
}

void add_synth_keys(Command& cmd) {
    add_key(cmd, "width", "frame width");
    add_key(cmd, "height", "frame height");
    add_key(cmd, "frames", "frame count");
    add_key(cmd, "objects", "moving object count");
    add_key(cmd, "background", "gradient or noise");
    add_key(cmd, "speed", "object speed in pixels per frame");
    add_key(cmd, "mask", "stationary or moving");
}

std::uint64_t seed_of(const FlatConfig& cfg) {
    const long long s = config_int(cfg, "seed", 1);
    if (s < 0) throw_config("seed must be >= 0");
    return static_cast<std::uint64_t>(s);
}

std::size_t positive(const FlatConfig& cfg, const std::string& key, long long fallback) {
    const long long v = config_int(cfg, key, fallback);
    if (v < 1) throw_config("'" + key + "' must be >= 1");
    return static_cast<std::size_t>(v);
}

SynthConfig synth_config(const FlatConfig& cfg) {
    SynthConfig s;
    s.width = positive(cfg, "width", 32);
    s.height = positive(cfg, "height", 32);
    s.frame_count = positive(cfg, "frames", 30);
    s.object_count = static_cast<std::size_t>(std::max(0LL, config_int(cfg, "objects", 2)));
    s.seed = seed_of(cfg);
    const std::string bg = config_string(cfg, "background", "gradient");
    if (bg == "gradient") s.background = Background::gradient;
    else if (bg == "noise") s.background = Background::noise;
    else throw_config("background must be gradient or noise");
    const std::string speed = config_string(cfg, "speed", "1.5");
    try {
        s.object_speed = std::stod(speed);
    } catch (const std::exception&) {
        throw_config("speed expects a number, got '" + speed + "'");
    }
    s.validate();
    return s;
}

MaskKind mask_kind(const FlatConfig& cfg) {
    const std::string m = config_string(cfg, "mask", "stationary");
    if (m == "stationary") return MaskKind::stationary;
    if (m == "moving") return MaskKind::moving;
    throw_config("mask must be stationary or moving");
}

RunConfig run_config(const FlatConfig& cfg) {
    RunConfig c;
    c.sched.k = config_int(cfg, "k", c.sched.k);
    c.sched.s = config_int(cfg, "s", c.sched.s);
    c.sched.sp = config_int(cfg, "sp", c.sched.sp);
    c.sched.r = config_int(cfg, "r", c.sched.r);
    c.sched.rp = config_int(cfg, "rp", c.sched.rp);
    c.refiner.lag = config_int(cfg, "lag", c.refiner.lag);
    c.refiner.radius = config_int(cfg, "kr", c.refiner.radius);
    c.refiner.stride = config_int(cfg, "refiner_stride", c.refiner.stride);
    c.refiner.enabled = config_bool(cfg, "refiner", true);
    c.pacing = parse_pacing(config_string(cfg, "pacing", "synchronous"));
    const long long budget = config_int(cfg, "memory_budget", 0);
    if (budget < 0) throw_config("memory_budget must be >= 0");
    c.memory_budget_bytes = static_cast<std::size_t>(budget);
    c.sched.validate();
    c.refiner.validate();
    return c;
}

WeightSet load_weights(const FlatConfig& cfg) {
    const std::string path = config_string(cfg, "weights", "");
    if (!path.empty()) return read_weights(path);
    return init_weights(StackConfig{}, seed_of(cfg));
}

/// Input clip from --in/--masks, or a synthetic clip when neither is given.
VideoClip load_clip(const FlatConfig& cfg) {
    const std::string in = config_string(cfg, "in", "");
    const std::string masks = config_string(cfg, "masks", "");
    if (in.empty() != masks.empty()) throw_config("--in and --masks go together");
    if (in.empty()) return synth_masked_clip(synth_config(cfg), mask_kind(cfg));
    return read_clip(in, masks);
}

std::vector<Mode> parse_modes(const std::string& list) {
    std::vector<Mode> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_mode(item));
    }
    if (out.empty()) throw_config("empty mode list");
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
    std::vector<std::size_t> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        FlatConfig one{{"size", item}};
        out.push_back(positive(one, "size", 1));
    }
    return out;
}

void add_run_echo(std::vector<BenchReport>& reports, const FlatConfig& cfg) {
    for (auto& r : reports) {
        r.config.emplace_back("seed", std::to_string(seed_of(cfg)));
        r.config.emplace_back("weights", config_string(cfg, "weights", "seeded-init"));
        r.config.emplace_back("input", config_string(cfg, "in", "synthetic"));
    }
}

/// Writes to `path`, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write(out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_reports(const std::string& path, const std::string& format,
                   const std::vector<BenchReport>& reports) {
    emit(path, [&](std::ostream& os) {
        if (format == "tsv") write_reports_tsv(os, reports);
        else write_reports_jsonl(os, reports);
    });
}

std::string checked_format(const std::string& f) {
    if (f != "jsonl" && f != "tsv") throw_config("format must be jsonl or tsv");
    return f;
}

int run(int argc, char** argv) {
    CLI::App app{"Streaming video inpainting with transformer memories"};
    app.require_subcommand(1);

    Command synth = make_command(app, "synth", "write a synthetic video and its masks");
    std::string out_video, out_masks;
    synth.app->add_option("--out-video", out_video, "video RVV path")->required();
    synth.app->add_option("--out-masks", out_masks, "mask RVV path")->required();
    add_synth_keys(synth);
    add_key(synth, "seed", "scene seed");
    add_config_flag(synth);

    Command inpaint = make_command(app, "inpaint", "inpaint a clip in one mode");
    std::string report_path;
    add_key(inpaint, "mode", "offline, online, memory or refined");
    add_input_keys(inpaint, true);
    add_key(inpaint, "out", "output video (RVV)");
    inpaint.app->add_option("--report", report_path, "report path (default <out>.report.jsonl)");
    add_run_keys(inpaint);

    Command bench = make_command(app, "bench", "run several modes and report speed and quality");
    std::string bench_out, curves_out, format = "jsonl";
    std::string modes = "offline,online,memory,refined";
    bench.app->add_option("--modes", modes, "comma-separated modes");
    bench.app->add_option("--report", bench_out, "report path (default stdout)");
    bench.app->add_option("--curves", curves_out, "also write per-frame temporal curves (TSV)");
    bench.app->add_option("--format", format, "jsonl or tsv");
    add_input_keys(bench, false);
    add_synth_keys(bench);
    add_run_keys(bench);

    Command sweep_cmd = make_command(app, "sweep", "operating points over context sizes");
    std::string sizes = "2,4,8,16", sweep_modes = "memory,online,refined", sweep_out;
    std::string sweep_format = "tsv";
    sweep_cmd.app->add_option("--sizes", sizes, "comma-separated context sizes");
    sweep_cmd.app->add_option("--modes", sweep_modes, "comma-separated modes");
    sweep_cmd.app->add_option("--report", sweep_out, "output path (default stdout)");
    sweep_cmd.app->add_option("--format", sweep_format, "jsonl or tsv");
    add_input_keys(sweep_cmd, false);
    add_synth_keys(sweep_cmd);
    add_run_keys(sweep_cmd);

    Command ablate_cmd = make_command(app, "ablate", "refined-mode input ablation");
    std::string ablate_out, ablate_format = "tsv";
    ablate_cmd.app->add_option("--report", ablate_out, "output path (default stdout)");
    ablate_cmd.app->add_option("--format", ablate_format, "jsonl or tsv");
    add_input_keys(ablate_cmd, false);
    add_synth_keys(ablate_cmd);
    add_run_keys(ablate_cmd);

    Command weights_cmd = make_command(app, "weights", "write seeded weights to a WTS1 file");
    std::string weights_out;
    weights_cmd.app->add_option("--out", weights_out, "WTS1 path")->required();
    add_key(weights_cmd, "seed", "init seed");
    add_config_flag(weights_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (synth.app->parsed()) {
        const FlatConfig cfg = synth.effective();
        const SynthConfig sc = synth_config(cfg);
        write_clip(synth_masked_clip(sc, mask_kind(cfg)), out_video, out_masks);
        return 0;
    }
    if (weights_cmd.app->parsed()) {
        write_weights(init_weights(StackConfig{}, seed_of(weights_cmd.effective())), weights_out);
        return 0;
    }
    if (inpaint.app->parsed()) {
        const FlatConfig cfg = inpaint.effective();
        for (const char* key : {"mode", "in", "masks", "out"}) {
            if (!cfg.count(key)) throw_config(std::string("inpaint needs --") + key);
        }
        const Mode mode = parse_mode(cfg.at("mode"));
        const RunConfig rc = run_config(cfg);
        const WeightSet weights = load_weights(cfg);
        const VideoClip clip = read_clip(cfg.at("in"), cfg.at("masks"));
        const RunResult result = run_clip(clip, mode, rc, weights);
        write_rvv(encode_frames(result.output.frames), cfg.at("out"));

        // The input is corrupted, so quality columns compare against it: they
        // are only meaningful when --in holds ground truth.
        std::vector<BenchReport> reports{make_report(clip, result, rc)};
        add_run_echo(reports, cfg);
        write_reports(report_path.empty() ? cfg.at("out") + ".report.jsonl" : report_path, "jsonl",
                      reports);
        return 0;
    }
    if (bench.app->parsed()) {
        const FlatConfig cfg = bench.effective();
        const std::string fmt = checked_format(format);
        const RunConfig rc = run_config(cfg);
        const WeightSet weights = load_weights(cfg);
        const VideoClip clip = load_clip(cfg);
        const std::vector<Mode> list = parse_modes(modes);

        std::vector<BenchReport> reports;
        std::vector<RunResult> results;
        for (Mode m : list) {
            results.push_back(run_clip(clip, m, rc, weights));
            reports.push_back(make_report(clip, results.back(), rc));
        }
        add_run_echo(reports, cfg);
        write_reports(bench_out, fmt, reports);
        if (!curves_out.empty()) {
            std::vector<NamedClip> named;
            for (std::size_t i = 0; i < list.size(); ++i) {
                named.push_back({std::string(to_string(list[i])), &results[i].output});
            }
            const auto curves = temporal_curves(named, clip, "offline");
            emit(curves_out, [&](std::ostream& os) { write_curves_tsv(os, curves); });
        }
        return 0;
    }
    if (sweep_cmd.app->parsed()) {
        const FlatConfig cfg = sweep_cmd.effective();
        const std::string fmt = checked_format(sweep_format);
        const RunConfig rc = run_config(cfg);
        const SweepResult result =
            sweep(load_clip(cfg), parse_modes(sweep_modes), parse_sizes(sizes), rc, load_weights(cfg));
        emit(sweep_out, [&](std::ostream& os) {
            if (fmt == "tsv") write_sweep_tsv(os, result);
            else write_sweep_jsonl(os, result);
        });
        return 0;
    }
    if (ablate_cmd.app->parsed()) {
        const FlatConfig cfg = ablate_cmd.effective();
        const std::string fmt = checked_format(ablate_format);
        auto reports = ablate(load_clip(cfg), run_config(cfg), load_weights(cfg));
        add_run_echo(reports, cfg);
        write_reports(ablate_out, fmt, reports);
        return 0;
    }
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "streamfill: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ShapeError& e) {
        std::cerr << "streamfill: " << e.what() << '\n';
        return kExitData;
    } catch (const FormatError& e) {
        std::cerr << "streamfill: " << e.what() << '\n';
        return kExitData;
    } catch (const CacheMiss& e) {
        std::cerr << "streamfill: internal error: " << e.what() << '\n';
        return 1;
    } catch (const std::runtime_error& e) {
        // I/O failures
        std::cerr << "streamfill: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "streamfill: internal error: " << e.what() << '\n';
        return 1;
    }
}
