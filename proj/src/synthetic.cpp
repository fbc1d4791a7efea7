#include "mycosim/synthetic.hpp"

#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <numbers>

namespace mycosim {

namespace {

constexpr int kMaxRedraws = 2000;

void check_moments(const Moments& m, const std::string& what) {
    if (!(m.mean > 0.0) || !std::isfinite(m.mean)) throw SpecError(what + " mean must be positive");
    if (!(m.sd >= 0.0) || !std::isfinite(m.sd)) throw SpecError(what + " sd must be non-negative");
    if (!(m.min >= 0.0) || m.min > m.mean) throw SpecError(what + " minimum must lie in [0, mean]");
}

}  // namespace

void SynthSpec::validate() const {
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw SpecError("duration must be positive");
    if (!(interval_s > 0.0) || interval_s > duration_s) throw SpecError("sample interval must lie in (0, duration]");
    if (channels.empty()) throw SpecError("spec has no channels");
    for (const auto& ch : channels) {
        if (ch.label.empty()) throw SpecError("channel label is empty");
        if (ch.polarity != 1 && ch.polarity != -1) throw SpecError("polarity must be +1 or -1");
        if (!(ch.noise_sd_mV >= 0.0)) throw SpecError("noise sd must be non-negative");
        if (!(ch.min_separation_s >= 0.0)) throw SpecError("minimum separation must be non-negative");
        for (const auto& b : ch.blocks) {
            check_moments(b.amplitude_mV, "amplitude");
            check_moments(b.width_s, "width");
            if (b.period_s) check_moments(*b.period_s, "period");
            if (!b.period_s && ch.blocks.size() > 1) {
                throw SpecError("channel '" + ch.label + "': a block without a period must be the only block");
            }
            if (!(b.gap_before_s >= 0.0)) throw SpecError("block gap must be non-negative");
        }
    }
    for (std::size_t i = 0; i < channels.size(); ++i) {
        for (std::size_t j = i + 1; j < channels.size(); ++j) {
            if (channels[i].label == channels[j].label) throw SpecError("duplicate channel label " + channels[i].label);
        }
    }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

Moments moments_from(const json& j) {
    return {j.at("mean").get<double>(), j.value("sd", 0.0), j.value("min", 0.0)};
}

json moments_to(const Moments& m) { return {{"mean", m.mean}, {"sd", m.sd}, {"min", m.min}}; }

}  // namespace

SynthSpec parse_synth_spec(const std::string& json_text) {
    SynthSpec spec;
    try {
        const auto j = json::parse(json_text);
        if (j.value("format", std::string{}) != "myceliumsim/synth/v1") {
            throw ParseError(0, "format", "expected myceliumsim/synth/v1");
        }
        spec.duration_s = j.at("duration_s").get<double>();
        spec.interval_s = j.value("interval_s", 1.0);
        spec.exact_moments = j.value("exact_moments", true);
        for (const auto& c : j.at("channels")) {
            ChannelSpec ch;
            ch.label = c.at("label").get<std::string>();
            ch.offset_mV = c.value("offset_mV", 0.0);
            ch.drift_mV_per_h = c.value("drift_mV_per_h", 0.0);
            ch.noise_sd_mV = c.value("noise_sd_mV", 0.0);
            ch.polarity = c.value("polarity", 1);
            ch.min_separation_s = c.value("min_separation_s", ch.min_separation_s);
            for (const auto& b : c.value("blocks", json::array())) {
                SpikeBlock blk;
                blk.count = b.at("count").get<std::size_t>();
                blk.amplitude_mV = moments_from(b.at("amplitude_mV"));
                blk.width_s = moments_from(b.at("width_s"));
                if (b.contains("period_s")) blk.period_s = moments_from(b.at("period_s"));
                blk.gap_before_s = b.value("gap_before_s", 0.0);
                ch.blocks.push_back(blk);
            }
            spec.channels.push_back(std::move(ch));
        }
    } catch (const json::exception& e) {
        throw ParseError(0, "synth", e.what());
    }
    spec.validate();
    return spec;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) { return parse_synth_spec(detail::read_file(path)); }

std::string format_synth_spec(const SynthSpec& spec) {
    json j;
    j["format"] = "myceliumsim/synth/v1";
    j["duration_s"] = spec.duration_s;
    j["interval_s"] = spec.interval_s;
    j["exact_moments"] = spec.exact_moments;
    j["channels"] = json::array();
    for (const auto& ch : spec.channels) {
        json c{{"label", ch.label},
               {"offset_mV", ch.offset_mV},
               {"drift_mV_per_h", ch.drift_mV_per_h},
               {"noise_sd_mV", ch.noise_sd_mV},
               {"polarity", ch.polarity},
               {"min_separation_s", ch.min_separation_s},
               {"blocks", json::array()}};
        for (const auto& b : ch.blocks) {
            json jb{{"count", b.count},
                    {"amplitude_mV", moments_to(b.amplitude_mV)},
                    {"width_s", moments_to(b.width_s)},
                    {"gap_before_s", b.gap_before_s}};
            if (b.period_s) jb["period_s"] = moments_to(*b.period_s);
            c["blocks"].push_back(jb);
        }
        j["channels"].push_back(c);
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// presets

namespace {

constexpr double kMin = 60.0;
constexpr double kHour = 3600.0;

ChannelSpec single(std::string label, SpikeBlock block, double drift, double noise) {
    ChannelSpec ch;
    ch.label = std::move(label);
    ch.blocks = {block};
    ch.drift_mV_per_h = drift;
    ch.noise_sd_mV = noise;
    return ch;
}

SpikeBlock hf_block() {
    SpikeBlock b;
    b.count = 10;
    b.amplitude_mV = {1.5, 0.2, 1.0};
    b.width_s = {60.0, 5.0, 40.0};
    b.period_s = Moments{2.6 * kMin, 15.0, 110.0};
    return b;
}

SpikeBlock lf_block() {
    SpikeBlock b;
    b.count = 10;
    b.amplitude_mV = {1.5, 0.2, 1.0};
    b.width_s = {300.0, 30.0, 200.0};
    b.period_s = Moments{14.0 * kMin, 2.0 * kMin, 10.0 * kMin};
    return b;
}

}  // namespace

std::vector<std::string> synth_preset_names() { return {"v1", "v3", "v9", "hf-train", "lf-train", "mixed-train"}; }

SynthSpec synth_preset(const std::string& name) {
    SynthSpec spec;
    if (name == "v1") {
        SpikeBlock b;
        b.count = 6;
        b.amplitude_mV = {1.97, 0.9, 1.0};
        b.width_s = {17.0 * kMin, 6.5 * kMin, 10.0 * kMin};
        spec.duration_s = 25.0 * kHour;
        spec.channels = {single("V1", b, -5.0 / 25.0, 0.1)};
    } else if (name == "v3") {
        SpikeBlock b;
        b.count = 6;
        b.amplitude_mV = {1.4, 0.33, 1.0};
        b.width_s = {10.0 * kMin, 3.0 * kMin, 5.0 * kMin};
        b.period_s = Moments{37.0 * kMin, 17.0 * kMin, 15.0 * kMin};
        b.gap_before_s = 2.0 * kHour;
        spec.duration_s = 8.0 * kHour;
        spec.channels = {single("V3", b, 0.0, 0.1)};
    } else if (name == "v9") {
        SpikeBlock b;
        b.count = 3;
        b.amplitude_mV = {1.08, 0.072, 0.9};
        b.width_s = {6.0 * kMin, 1.5 * kMin, 4.0 * kMin};
        b.period_s = Moments{14.0 * kMin, 5.0 * kMin, 5.0 * kMin};
        b.gap_before_s = 1.0 * kHour;
        spec.duration_s = 4.0 * kHour;
        spec.channels = {single("V9", b, 0.0, 0.1)};
    } else if (name == "hf-train" || name == "lf-train" || name == "mixed-train") {
        ChannelSpec ch;
        ch.label = "V1";
        ch.noise_sd_mV = 0.1;
        ch.min_separation_s = 30.0;
        if (name != "lf-train") ch.blocks.push_back(hf_block());
        if (name != "hf-train") ch.blocks.push_back(lf_block());
        ch.blocks.front().gap_before_s = 1.0 * kHour;
        if (ch.blocks.size() == 2) ch.blocks.back().gap_before_s = 2.0 * kHour;
        spec.duration_s = name == "mixed-train" ? 7.0 * kHour : 5.0 * kHour;
        spec.channels = {ch};
    } else {
        throw SpecError("unknown synth preset '" + name + "'");
    }
    return spec;
}

DetectorParams train_detector_params() {
    DetectorParams p;
    p.min_width_s = 20.0;
    p.merge_gap_s = 10.0;
    p.smoothing_s = 5.0;
    return p;
}

// ---------------------------------------------------------------------------
// generation

namespace {

/// Draws `n` values; with `exact` their sample mean and population sd equal the targets.
std::optional<std::vector<double>> draw(std::size_t n, const Moments& m, bool exact, Rng& rng) {
    std::vector<double> z(n);
    for (auto& v : z) v = rng.normal();
    if (exact) {
        if (n == 1 || m.sd == 0.0) {
            std::fill(z.begin(), z.end(), 0.0);
        } else {
            double mean = 0.0;
            for (double v : z) mean += v;
            mean /= static_cast<double>(n);
            double ss = 0.0;
            for (double v : z) ss += (v - mean) * (v - mean);
            const double sd = std::sqrt(ss / static_cast<double>(n));
            if (!(sd > 1e-12)) return std::nullopt;
            for (auto& v : z) v = (v - mean) / sd;
        }
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = m.mean + m.sd * z[i];
        if (out[i] < m.min || !(out[i] > 0.0)) return std::nullopt;
    }
    return out;
}

struct Bump {
    double peak;
    double width;
    double amplitude;
};

std::optional<std::vector<Bump>> place_channel(const ChannelSpec& ch, const SynthSpec& spec, Rng& rng) {
    std::vector<Bump> bumps;
    double last_peak = 0.0;
    for (const auto& b : ch.blocks) {
        if (b.count == 0) continue;
        const auto amps = draw(b.count, b.amplitude_mV, spec.exact_moments, rng);
        if (!amps) return std::nullopt;
        const auto widths = draw(b.count, b.width_s, spec.exact_moments, rng);
        if (!widths) return std::nullopt;
        std::vector<double> peaks(b.count);
        if (b.period_s) {
            peaks[0] = last_peak + b.gap_before_s;
            if (b.count > 1) {
                const auto periods = draw(b.count - 1, *b.period_s, spec.exact_moments, rng);
                if (!periods) return std::nullopt;
                for (std::size_t i = 1; i < b.count; ++i) peaks[i] = peaks[i - 1] + (*periods)[i - 1];
            }
        } else {
            for (auto& p : peaks) p = rng.uniform() * spec.duration_s;
            std::sort(peaks.begin(), peaks.end());
        }
        for (std::size_t i = 0; i < b.count; ++i) bumps.push_back({peaks[i], (*widths)[i], (*amps)[i]});
        last_peak = peaks.back();
    }
    const double end = spec.duration_s - spec.interval_s;
    for (std::size_t i = 0; i < bumps.size(); ++i) {
        if (bumps[i].peak - bumps[i].width / 2.0 < 0.0 || bumps[i].peak + bumps[i].width / 2.0 > end) {
            return std::nullopt;
        }
        if (i > 0) {
            const double quiet = (bumps[i].peak - bumps[i].width / 2.0) - (bumps[i - 1].peak + bumps[i - 1].width / 2.0);
            if (quiet < ch.min_separation_s) return std::nullopt;
        }
    }
    return bumps;
}

}  // namespace

SynthResult generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    SynthResult out;
    auto& rec = out.recording;
    rec.interval_s = spec.interval_s;
    const auto n = static_cast<std::size_t>(std::llround(spec.duration_s / spec.interval_s));

    for (const auto& ch : spec.channels) {
        std::optional<std::vector<Bump>> bumps;
        for (int attempt = 0; attempt < kMaxRedraws && !bumps; ++attempt) bumps = place_channel(ch, spec, rng);
        if (!bumps) throw SpecError("channel '" + ch.label + "': spikes do not fit the record without overlapping");

        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = ch.offset_mV + ch.drift_mV_per_h * rec.time_at(i) / 3600.0;
        }
        for (const auto& b : *bumps) {
            const double lo = b.peak - b.width / 2.0;
            const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil(lo / spec.interval_s)));
            for (std::size_t i = first; i < n; ++i) {
                const double u = (rec.time_at(i) - b.peak) / b.width;
                if (u > 0.5) break;
                y[i] += ch.polarity * b.amplitude * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * u));
            }
            out.truth.push_back({ch.label, lo, b.peak, b.amplitude, b.width, ch.polarity});
        }
        if (ch.noise_sd_mV > 0.0) {
            for (auto& v : y) v += ch.noise_sd_mV * rng.normal();
        }
        for (double v : y) {
            if (!(std::abs(v) <= kLoggerRangeMv)) throw SpecError("channel '" + ch.label + "' leaves the logger range");
        }
        rec.labels.push_back(ch.label);
        rec.channels.push_back(std::move(y));
    }
    return out;
}

std::string format_truth_csv(const std::vector<DetectedSpike>& truth) { return format_spikes_csv(truth); }

}  // namespace mycosim
