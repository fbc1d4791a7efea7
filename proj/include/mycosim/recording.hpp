#pragma once

#include "mycosim/common.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mycosim {

/// Full-scale input range of the data logger, in mV.
inline constexpr double kLoggerRangeMv = 1250.0;

struct StimulusAnnotation {
    double time_s = 0.0;
    std::string kind;
    double duration_s = 0.0;

    friend bool operator==(const StimulusAnnotation&, const StimulusAnnotation&) = default;
};

/**
 * Uniformly sampled multi-channel voltage recording (mV). Sample i of every
 * channel was taken at start_s + i * interval_s.
 */
struct Recording {
    std::vector<std::string> labels;
    double start_s = 0.0;
    double interval_s = 1.0;
    std::vector<std::vector<double>> channels;
    std::vector<StimulusAnnotation> annotations;

    std::size_t length() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
    double time_at(std::size_t i) const noexcept { return start_s + static_cast<double>(i) * interval_s; }
    std::size_t channel_index(const std::string& label) const;

    /// Throws DomainError when channels are ragged, the interval is not positive or a value leaves the logger range.
    void validate() const;

    friend bool operator==(const Recording&, const Recording&) = default;
};

/**
 * CSV with header `time_s,<ch1>,<ch2>,...`. Times must increase with a
 * constant step (relative tolerance 1e-6); a single-row file gets the
 * default one-second interval.
 */
Recording parse_recording_csv(const std::string& text);
Recording load_recording(const std::filesystem::path& path);
std::string format_recording_csv(const Recording& recording);
void save_recording(const Recording& recording, const std::filesystem::path& path);

/// Sidecar CSV `time_s,kind,duration_s`.
std::vector<StimulusAnnotation> parse_annotations_csv(const std::string& text);
std::vector<StimulusAnnotation> load_annotations(const std::filesystem::path& path);

}  // namespace mycosim
