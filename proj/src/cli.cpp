#include "mycosim/cli.hpp"

#include "mycosim/capacity.hpp"
#include "mycosim/detection.hpp"
#include "mycosim/growth.hpp"
#include "mycosim/logic.hpp"
#include "mycosim/manifest.hpp"
#include "mycosim/scenario.hpp"
#include "mycosim/synthetic.hpp"

#include "text_util.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <ostream>

namespace mycosim {

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::string out;
    bool quiet = false;
    std::vector<std::string> command;
};

std::pair<std::string, std::string> split_range(const std::string& text, const std::string& flag) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw DomainError(flag + " expects 'lo:hi', got '" + text + "'");
    return {text.substr(0, colon), text.substr(colon + 1)};
}

double to_double(const std::string& text, const std::string& flag) {
    return detail::parse_double(detail::trim(text), 0, flag);
}

void write_with_manifest(const Globals& g, const std::filesystem::path& output, const std::string& content,
                         const std::vector<std::filesystem::path>& inputs, const std::vector<std::uint64_t>& seeds) {
    if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path());
    detail::write_file(output, content);
    save_manifest(make_manifest(g.command, seeds, inputs, {output}), output.string() + ".manifest");
}

std::string require_out(const Globals& g, const std::string& sub) {
    if (g.out.empty()) throw CLI::RequiredError(sub + ": --out");
    return g.out;
}

// ---------------------------------------------------------------------------

struct GrowArgs {
    std::string field;
    std::string params;
    std::string network;
};

void run_grow(const GrowArgs& a, const Globals& g, std::ostream& out) {
    const auto out_path = require_out(g, "grow");
    const auto field = load_substrate(a.field);
    GrowthParams params;
    std::vector<std::filesystem::path> inputs{a.field};
    if (!a.params.empty()) {
        params = load_growth_params(a.params);
        inputs.emplace_back(a.params);
    }
    MyceliumNetwork start = default_seed_network(field);
    if (!a.network.empty()) {
        start = load_network(a.network);
        inputs.emplace_back(a.network);
    }
    const auto result = grow(start, field, params, g.seed);
    write_with_manifest(g, out_path, format_network(result.network), inputs, {g.seed});
    if (!g.quiet) {
        out << "stopped: " << to_string(result.reason) << "\n"
            << "steps: " << result.steps << "\n"
            << "branches: " << result.branches << "\n"
            << "nodes: " << result.network.nodes().size() << "\n"
            << "strands: " << result.network.strands().size() << "\n";
        for (auto id : result.isolated_ports) out << "warning: fruit body " << id << " has no strand\n";
    }
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string scenario;
};

void run_simulate(const SimulateArgs& a, const Globals& g, std::ostream& out) {
    const auto out_path = require_out(g, "simulate");
    const auto scenario = load_scenario(a.scenario);
    const auto log = simulate(scenario);
    write_with_manifest(g, out_path, format_arrival_csv(log), {a.scenario, scenario.network_path}, {});
    if (!g.quiet) {
        const auto s = estimate_runtime_stats(log);
        out << "arrivals: " << s.arrivals << "\n";
        if (s.first_s) out << "first_s: " << detail::format_double(*s.first_s) << "\n";
        if (s.last_s) out << "last_s: " << detail::format_double(*s.last_s) << "\n";
        for (auto [node, count] : s.per_node) out << "node " << node << ": " << count << "\n";
    }
}

// ---------------------------------------------------------------------------

struct EnumerateArgs {
    std::string scenario;
    std::vector<NodeId> inputs;
    NodeId output = 0;
    std::string window = "0:600";
    std::string rule;
    double amplitude = 1.0;
    std::string logs;
    bool oracle = false;
    unsigned threads = 1;
};

void run_enumerate(const EnumerateArgs& a, const Globals& g, std::ostream& out) {
    const auto scenario = load_scenario(a.scenario);
    SimConfig config = scenario.config;
    if (!a.rule.empty()) {
        const auto rule = parse_collision_rule(a.rule);
        if (!rule) throw CLI::ValidationError("--rule", "unknown collision rule '" + a.rule + "'");
        config.rule = *rule;
    }
    PortAssignment pa;
    pa.inputs = a.inputs;
    pa.output = a.output;
    pa.amplitude_mV = a.amplitude;
    const auto [lo, hi] = split_range(a.window, "--window");
    pa.window_lo_s = to_double(lo, "--window");
    pa.window_hi_s = to_double(hi, "--window");

    const auto real = realize_truth_table(scenario.network, pa, config, a.threads);
    const auto cls = classify_function(real.table);
    std::string report = "table " + real.table.bit_string() + "\nclass " + cls.name() + "\n";
    if (real.unreachable) report += "warning: output unreachable from every input\n";
    if (a.oracle) {
        const auto oracle = brute_force_oracle(scenario.network, pa, config);
        report += std::string("oracle ") + (oracle == real.table ? "agrees" : "DISAGREES " + oracle.bit_string()) + "\n";
    }
    if (!g.out.empty()) write_with_manifest(g, g.out, report, {a.scenario, scenario.network_path}, {});
    if (!a.logs.empty()) {
        std::filesystem::create_directories(a.logs);
        for (std::size_t v = 0; v < real.logs.size(); ++v) {
            const auto path = std::filesystem::path(a.logs) / ("vector_" + std::to_string(v) + ".csv");
            write_with_manifest(g, path, format_arrival_csv(real.logs[v]), {a.scenario, scenario.network_path}, {});
        }
    }
    if (!g.quiet) out << report;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string in;
    std::string stim;
    std::string params;
    bool already_detrended = false;
};

std::string opt(const std::optional<double>& v) { return v ? detail::format_double(*v) : "NA"; }

void run_analyze(const AnalyzeArgs& a, const Globals& g, std::ostream& out) {
    const std::filesystem::path dir = require_out(g, "analyze");
    std::vector<std::filesystem::path> inputs{a.in};
    const auto rec = load_recording(a.in);
    DetectorParams params;
    if (!a.params.empty()) {
        params = load_detector_params(a.params);
        inputs.emplace_back(a.params);
    }
    std::vector<std::string> warnings;
    Recording work = rec;
    if (!a.already_detrended) {
        auto d = detrend(rec, params.baseline_window_s);
        warnings = std::move(d.warnings);
        work = std::move(d.recording);
    }
    const auto spikes = detect_spikes(work, params, true).spikes;

    std::string stats = "myceliumsim/analysis/v1\n";
    stats += std::string("detrended_internally ") + (a.already_detrended ? "no" : "yes") + "\n";
    for (const auto& w : warnings) stats += "warning " + w + "\n";
    auto describe = [&](const std::string& name, const std::vector<DetectedSpike>& list) {
        const auto s = spike_stats(list);
        const auto over = std::count_if(list.begin(), list.end(), [&](const DetectedSpike& x) {
            return x.amplitude_mV >= params.report_threshold_mV;
        });
        const auto wide = std::count_if(list.begin(), list.end(), [&](const DetectedSpike& x) {
            return x.width_s > params.long_width_flag_s;
        });
        stats += name + " count " + std::to_string(s.count) + " count_over_" +
                 detail::format_double(params.report_threshold_mV) + "mV " + std::to_string(over) +
                 " amplitude_mean " + detail::format_double(s.amplitude_mean) + " amplitude_sd " +
                 detail::format_double(s.amplitude_sd) + " width_mean " + detail::format_double(s.width_mean) +
                 " width_sd " + detail::format_double(s.width_sd) + " period_mean " + opt(s.period_mean) +
                 " period_sd " + opt(s.period_sd) + " long_width " + std::to_string(wide) + "\n";
    };
    for (const auto& label : rec.labels) {
        std::vector<DetectedSpike> mine;
        std::copy_if(spikes.begin(), spikes.end(), std::back_inserter(mine),
                     [&](const DetectedSpike& s) { return s.channel == label; });
        describe("channel " + label, mine);
    }
    describe("all", spikes);

    std::string trains = "myceliumsim/trains/v1\n";
    for (const auto& t : classify_trains(spikes, params)) {
        trains += "train " + t.channel + " " + std::string(to_string(t.cls)) + " spikes " +
                  std::to_string(t.spikes.size()) + " mean_period_s " + detail::format_double(t.mean_period_s) +
                  " first_peak_s " + detail::format_double(t.spikes.front().peak_s) + " last_peak_s " +
                  detail::format_double(t.spikes.back().peak_s) + "\n";
    }

    write_with_manifest(g, dir / "spikes.csv", format_spikes_csv(spikes), inputs, {});
    write_with_manifest(g, dir / "stats.txt", stats, inputs, {});
    write_with_manifest(g, dir / "trains.txt", trains, inputs, {});
    if (!a.stim.empty()) {
        inputs.emplace_back(a.stim);
        const auto rows = stimulation_latency(rec, spikes, load_annotations(a.stim));
        std::string csv = "stimulus,stimulus_time_s,kind,channel,latency_s\n";
        for (const auto& r : rows) {
            csv += std::to_string(r.stimulus) + "," + detail::format_double(r.stimulus_time_s) + "," + r.kind + "," +
                   r.channel + "," + (r.latency_s ? detail::format_double(*r.latency_s) : "") + "\n";
        }
        write_with_manifest(g, dir / "latency.csv", csv, inputs, {});
    }
    if (!g.quiet) {
        out << "spikes: " << spikes.size() << "\n";
        for (const auto& w : warnings) out << "warning: " << w << "\n";
    }
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string spec;
    std::string preset;
    std::string truth;
};

void run_synth(const SynthArgs& a, const Globals& g, std::ostream& out) {
    const auto out_path = require_out(g, "synth");
    if (a.spec.empty() == a.preset.empty()) throw CLI::ValidationError("synth", "give exactly one of --spec, --preset");
    std::vector<std::filesystem::path> inputs;
    SynthSpec spec;
    if (!a.spec.empty()) {
        spec = load_synth_spec(a.spec);
        inputs.emplace_back(a.spec);
    } else {
        spec = synth_preset(a.preset);
    }
    const auto result = generate_synthetic(spec, g.seed);
    write_with_manifest(g, out_path, format_recording_csv(result.recording), inputs, {g.seed});
    if (!a.truth.empty()) write_with_manifest(g, a.truth, format_truth_csv(result.truth), inputs, {g.seed});
    if (!g.quiet) out << "samples: " << result.recording.length() << "\nspikes: " << result.truth.size() << "\n";
}

// ---------------------------------------------------------------------------

struct CapacityArgs {
    std::string tips;
    std::string volume_mm3;
    std::string target_m3;
    std::string ratio = "1";
};

void run_capacity(const CapacityArgs& a, const Globals& g, std::ostream& out) {
    DensitySpec spec;
    const auto [tmin, tmax] = split_range(a.tips, "--tips");
    const auto [vmin, vmax] = split_range(a.volume_mm3, "--per-mm3");
    spec.tips_min = parse_decimal(tmin);
    spec.tips_max = parse_decimal(tmax);
    spec.volume_min_mm3 = parse_decimal(vmin);
    spec.volume_max_mm3 = parse_decimal(vmax);
    spec.target_m3 = parse_decimal(a.target_m3);
    spec.junctions_per_tip = parse_decimal(a.ratio);
    const auto r = processor_count(spec);
    const std::string report = "min " + r.min_count.str() + " (" + format_sig(r.exact_min, 3) + ")\nmax " +
                               r.max_count.str() + " (" + format_sig(r.exact_max, 3) + ")\n";
    if (!g.out.empty()) write_with_manifest(g, g.out, report, {}, {});
    if (!g.quiet || g.out.empty()) out << report;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mycelium network growth, spike propagation and electrophysiology toolkit", "mycosim"};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);

    Globals g;
    g.command = args;
    g.command.insert(g.command.begin(), "mycosim");
    app.add_option("--seed", g.seed, "Random seed")->default_val(0);
    app.add_option("--out", g.out, "Output file (directory for analyze)");
    app.add_flag("--quiet", g.quiet, "Suppress the console summary");

    GrowArgs grow_args;
    auto* grow_cmd = app.add_subcommand("grow", "Grow a network in a substrate field");
    grow_cmd->add_option("--field", grow_args.field, "Substrate file")->required();
    grow_cmd->add_option("--params", grow_args.params, "Growth parameter JSON");
    grow_cmd->add_option("--network", grow_args.network, "Starting network (default: one fruit body at the centre)");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Propagate spikes through a scenario and log arrivals");
    sim_cmd->add_option("--scenario", sim_args.scenario, "Scenario JSON")->required();

    EnumerateArgs enum_args;
    auto* enum_cmd = app.add_subcommand("enumerate", "Tabulate the Boolean function realised by a network");
    enum_cmd->add_option("--scenario", enum_args.scenario, "Scenario JSON (network and config)")->required();
    enum_cmd->add_option("--inputs", enum_args.inputs, "Input fruit-body ids, comma separated")
        ->required()
        ->delimiter(',');
    enum_cmd->add_option("--output", enum_args.output, "Output node id")->required();
    enum_cmd->add_option("--window", enum_args.window, "Readout window lo:hi in seconds")->capture_default_str();
    enum_cmd->add_option("--rule", enum_args.rule, "Collision rule override");
    enum_cmd->add_option("--amplitude", enum_args.amplitude, "Injection amplitude in mV")->capture_default_str();
    enum_cmd->add_option("--logs", enum_args.logs, "Directory for per-vector arrival logs");
    enum_cmd->add_flag("--oracle", enum_args.oracle, "Cross-check against the analytic evaluator");
    enum_cmd->add_option("--threads", enum_args.threads, "Worker threads")->capture_default_str();

    AnalyzeArgs an_args;
    auto* an_cmd = app.add_subcommand("analyze", "Detect and characterise spikes in a recording");
    an_cmd->add_option("--in", an_args.in, "Recording CSV")->required();
    an_cmd->add_option("--stim", an_args.stim, "Stimulus annotation CSV");
    an_cmd->add_option("--params", an_args.params, "Detector parameter JSON");
    an_cmd->add_flag("--detrended", an_args.already_detrended, "Input is already detrended");

    SynthArgs syn_args;
    auto* syn_cmd = app.add_subcommand("synth", "Generate a synthetic recording");
    syn_cmd->add_option("--spec", syn_args.spec, "Synthesis spec JSON");
    syn_cmd->add_option("--preset", syn_args.preset, "Built-in spec: v1, v3, v9, hf-train, lf-train, mixed-train");
    syn_cmd->add_option("--truth", syn_args.truth, "Also write the ground-truth spike list here");

    CapacityArgs cap_args;
    auto* cap_cmd = app.add_subcommand("capacity", "Estimate junction counts from hyphal-tip density");
    cap_cmd->add_option("--tips", cap_args.tips, "Tip count range lo:hi")->required();
    cap_cmd->add_option("--per-mm3", cap_args.volume_mm3, "Volume range in mm^3 lo:hi")->required();
    cap_cmd->add_option("--volume-m3", cap_args.target_m3, "Target volume in m^3")->required();
    cap_cmd->add_option("--ratio", cap_args.ratio, "Junctions per tip")->capture_default_str();

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    if (!args.empty() && !args.front().starts_with("-") && app.get_subcommand_no_throw(args.front()) == nullptr) {
        err << "unknown subcommand '" << args.front() << "'\n" << app.help();
        return 2;
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (*grow_cmd) run_grow(grow_args, g, out);
        else if (*sim_cmd) run_simulate(sim_args, g, out);
        else if (*enum_cmd) run_enumerate(enum_args, g, out);
        else if (*an_cmd) run_analyze(an_args, g, out);
        else if (*syn_cmd) run_synth(syn_args, g, out);
        else if (*cap_cmd) run_capacity(cap_args, g, out);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        app.exit(e, out, err);
        if (args.empty() || dynamic_cast<const CLI::RequiredError*>(&e) || dynamic_cast<const CLI::ExtrasError*>(&e)) {
            err << app.help();
        }
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace mycosim
