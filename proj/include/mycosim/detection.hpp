#pragma once

#include "mycosim/recording.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mycosim {

struct DetectorParams {
    double baseline_window_s = 3600.0;
    double threshold_mV = 0.5;
    double min_width_s = 120.0;
    double max_width_s = 30000.0;
    double merge_gap_s = 60.0;
    double train_split_gap_s = 3600.0;
    double train_class_boundary_s = 300.0;
    /// Centred moving-average length applied before thresholding.
    double smoothing_s = 30.0;
    /// Reports count spikes at or above this amplitude separately.
    double report_threshold_mV = 1.0;
    /// Reports flag spikes wider than this.
    double long_width_flag_s = 6000.0;

    void validate() const;
};

DetectorParams parse_detector_params(const std::string& json_text);
DetectorParams load_detector_params(const std::filesystem::path& path);

struct DetectedSpike {
    std::string channel;
    double onset_s = 0.0;
    double peak_s = 0.0;
    /// Baseline-to-peak magnitude, always positive.
    double amplitude_mV = 0.0;
    double width_s = 0.0;
    /// +1 for an upward excursion, -1 for a downward one.
    int polarity = 1;

    friend bool operator==(const DetectedSpike&, const DetectedSpike&) = default;
};

struct DetrendResult {
    Recording recording;
    std::vector<std::string> warnings;
};

/**
 * Subtracts a centred running median of `window_s` from every channel
 * (window truncated at the record ends). A window longer than the record
 * falls back to the global median with a warning.
 */
DetrendResult detrend(const Recording& recording, double window_s);

struct Detection {
    std::vector<DetectedSpike> spikes;
    /// Set when detect_spikes had to detrend the input itself.
    bool detrended_internally = false;
};

/**
 * Threshold detector with hysteresis on the smoothed detrended signal.
 *
 * An excursion starts and ends where |signal| sits within threshold/2 of the
 * baseline and must reach the threshold somewhere inside. Excursions closer
 * than the merge gap are joined; the result is kept when its width lies in
 * [min_width, max_width]. Detection works on |signal|, so polarity does not
 * matter. Pass `detrended = false` to run detrend first.
 */
Detection detect_spikes(const Recording& recording, const DetectorParams& params, bool detrended = true);

struct SpikeStats {
    std::size_t count = 0;
    double amplitude_mean = 0.0;
    double amplitude_sd = 0.0;
    double width_mean = 0.0;
    double width_sd = 0.0;
    /// Peak-to-peak interval statistics; absent without at least one interval.
    std::optional<double> period_mean;
    std::optional<double> period_sd;
};

/// Population statistics (divide by N). Periods are taken between consecutive peaks on the same channel.
SpikeStats spike_stats(const std::vector<DetectedSpike>& spikes);

enum class TrainClass { high_frequency, low_frequency };
std::string_view to_string(TrainClass c);

struct SpikeTrain {
    std::string channel;
    std::vector<DetectedSpike> spikes;
    double mean_period_s = 0.0;
    TrainClass cls = TrainClass::low_frequency;
};

/// Splits each channel's spikes at peak gaps above the split gap. Singletons are dropped.
std::vector<SpikeTrain> classify_trains(const std::vector<DetectedSpike>& spikes, const DetectorParams& params);

inline constexpr double kLatencyHorizonS = 7200.0;

struct LatencyRow {
    std::size_t stimulus = 0;
    double stimulus_time_s = 0.0;
    std::string kind;
    std::string channel;
    std::optional<double> latency_s;
};

/// One row per (stimulus, channel): the first onset at or after the stimulus, within two hours.
std::vector<LatencyRow> stimulation_latency(const Recording& recording, const std::vector<DetectedSpike>& spikes,
                                            const std::vector<StimulusAnnotation>& annotations);

std::string format_spikes_csv(const std::vector<DetectedSpike>& spikes);

}  // namespace mycosim
