#include "mycosim/recording.hpp"

#include "text_util.hpp"

#include <algorithm>

namespace mycosim {

std::size_t Recording::channel_index(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw NotFoundError("no channel named '" + label + "'");
    return static_cast<std::size_t>(it - labels.begin());
}

void Recording::validate() const {
    if (!(interval_s > 0.0)) throw DomainError("sample interval must be positive");
    if (labels.size() != channels.size()) throw DomainError("channel labels and data disagree");
    for (std::size_t c = 0; c < channels.size(); ++c) {
        if (channels[c].size() != length()) throw DomainError("channel '" + labels[c] + "' has a different length");
        for (double v : channels[c]) {
            if (!(std::abs(v) <= kLoggerRangeMv)) {
                throw DomainError("channel '" + labels[c] + "' leaves the +/-1250 mV logger range");
            }
        }
    }
}

Recording parse_recording_csv(const std::string& text) {
    const auto lines = detail::content_lines(text, false);
    if (lines.empty()) throw ParseError(1, "header", "empty file");
    const auto header = detail::split_char(lines[0].text, ',');
    if (header.size() < 2 || header[0] != "time_s") {
        throw ParseError(lines[0].number, "header", "expected 'time_s,<channel>,...'");
    }

    Recording rec;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].empty()) throw ParseError(lines[0].number, "header", "empty channel label");
        rec.labels.emplace_back(header[c]);
    }
    rec.channels.resize(rec.labels.size());

    std::vector<double> times;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto ln = lines[r].number;
        const auto cells = detail::split_char(lines[r].text, ',');
        if (cells.size() != header.size()) {
            throw ParseError(ln, "row", "expected " + std::to_string(header.size()) + " columns, got " +
                                            std::to_string(cells.size()));
        }
        const double t = detail::parse_double(cells[0], ln, "time_s");
        if (!times.empty() && !(t > times.back())) throw ParseError(ln, "time_s", "time does not increase");
        times.push_back(t);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const double v = detail::parse_double(cells[c], ln, rec.labels[c - 1]);
            if (!(std::abs(v) <= kLoggerRangeMv)) {
                throw ParseError(ln, rec.labels[c - 1], "value outside the +/-1250 mV logger range");
            }
            rec.channels[c - 1].push_back(v);
        }
    }

    if (!times.empty()) rec.start_s = times.front();
    if (times.size() >= 2) {
        rec.interval_s = times[1] - times[0];
        for (std::size_t i = 2; i < times.size(); ++i) {
            const double step = times[i] - times[i - 1];
            if (std::abs(step - rec.interval_s) > 1e-6 * rec.interval_s) {
                throw ParseError(lines[i + 1].number, "time_s", "sampling interval is not constant");
            }
        }
    }
    return rec;
}

Recording load_recording(const std::filesystem::path& path) { return parse_recording_csv(detail::read_file(path)); }

std::string format_recording_csv(const Recording& rec) {
    std::string out = "time_s";
    for (const auto& l : rec.labels) out += "," + l;
    out += '\n';
    for (std::size_t i = 0; i < rec.length(); ++i) {
        out += detail::format_double(rec.time_at(i));
        for (const auto& ch : rec.channels) out += "," + detail::format_double(ch[i]);
        out += '\n';
    }
    return out;
}

void save_recording(const Recording& recording, const std::filesystem::path& path) {
    detail::write_file(path, format_recording_csv(recording));
}

std::vector<StimulusAnnotation> parse_annotations_csv(const std::string& text) {
    const auto lines = detail::content_lines(text, false);
    if (lines.empty()) throw ParseError(1, "header", "empty file");
    const auto header = detail::split_char(lines[0].text, ',');
    if (header.size() != 3 || header[0] != "time_s" || header[1] != "kind" || header[2] != "duration_s") {
        throw ParseError(lines[0].number, "header", "expected 'time_s,kind,duration_s'");
    }
    std::vector<StimulusAnnotation> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto ln = lines[r].number;
        const auto cells = detail::split_char(lines[r].text, ',');
        if (cells.size() != 3) throw ParseError(ln, "row", "expected 3 columns");
        StimulusAnnotation a;
        a.time_s = detail::parse_double(cells[0], ln, "time_s");
        a.kind = std::string(cells[1]);
        a.duration_s = detail::parse_double(cells[2], ln, "duration_s");
        if (a.duration_s < 0.0) throw ParseError(ln, "duration_s", "negative duration");
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<StimulusAnnotation> load_annotations(const std::filesystem::path& path) {
    return parse_annotations_csv(detail::read_file(path));
}

}  // namespace mycosim
