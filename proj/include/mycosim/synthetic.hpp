#pragma once

#include "mycosim/detection.hpp"
#include "mycosim/recording.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mycosim {

/// Target sample moments for one spike feature; every draw must be >= min.
struct Moments {
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
};

/**
 * A run of spikes on one channel. With a period the first peak sits
 * gap_before_s after the previous block's last peak (or the record start) and
 * the rest follow at the drawn intervals. Without one the peaks are scattered
 * uniformly over the record, which is only allowed for a channel's sole block.
 */
struct SpikeBlock {
    std::size_t count = 0;
    Moments amplitude_mV{1.0, 0.0, 0.0};
    Moments width_s{600.0, 0.0, 0.0};
    std::optional<Moments> period_s;
    double gap_before_s = 0.0;
};

struct ChannelSpec {
    std::string label = "V1";
    std::vector<SpikeBlock> blocks;
    double offset_mV = 0.0;
    double drift_mV_per_h = 0.0;
    double noise_sd_mV = 0.0;
    /// +1 draws upward bumps, -1 downward ones.
    int polarity = 1;
    /// Smallest allowed quiet stretch between neighbouring bump supports.
    double min_separation_s = 120.0;
};

struct SynthSpec {
    double duration_s = 3600.0;
    double interval_s = 1.0;
    std::vector<ChannelSpec> channels;
    /// Rescale each block's draws so their sample mean and population sd hit the targets exactly.
    bool exact_moments = true;

    void validate() const;
};

SynthSpec parse_synth_spec(const std::string& json_text);
SynthSpec load_synth_spec(const std::filesystem::path& path);
std::string format_synth_spec(const SynthSpec& spec);

/// Presets: v1, v3, v9 (single-channel recordings with minute-scale spikes), hf-train, lf-train, mixed-train.
SynthSpec synth_preset(const std::string& name);
std::vector<std::string> synth_preset_names();

/// Detector settings suited to the minute-scale spikes of the train presets.
DetectorParams train_detector_params();

struct SynthResult {
    Recording recording;
    /// Bump onset, peak, height and full support width, one per rendered spike.
    std::vector<DetectedSpike> truth;
};

/**
 * Renders raised-cosine bumps on offset + linear drift + Gaussian noise.
 * Throws SpecError when spikes cannot be fitted into the record (after a
 * bounded number of redraws) or the result leaves the logger range.
 */
SynthResult generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

std::string format_truth_csv(const std::vector<DetectedSpike>& truth);

}  // namespace mycosim
