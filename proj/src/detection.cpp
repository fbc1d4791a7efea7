#include "mycosim/detection.hpp"

#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>

namespace mycosim {

void DetectorParams::validate() const {
    const std::pair<double, const char*> positive[] = {
        {baseline_window_s, "baseline window"}, {threshold_mV, "amplitude threshold"},
        {min_width_s, "minimum width"},         {max_width_s, "maximum width"},
        {merge_gap_s, "merge gap"},             {train_split_gap_s, "train split gap"},
        {train_class_boundary_s, "train class boundary"}, {smoothing_s, "smoothing length"},
        {report_threshold_mV, "report threshold"}, {long_width_flag_s, "long-width flag"}};
    for (auto [value, name] : positive) {
        if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError(std::string(name) + " must be positive");
    }
    if (!(min_width_s < max_width_s)) throw ConfigError("minimum width must be below maximum width");
}

DetectorParams parse_detector_params(const std::string& json_text) {
    DetectorParams p;
    try {
        const auto j = nlohmann::json::parse(json_text);
        if (!j.is_object()) throw ParseError(0, "json", "detector parameters must be a JSON object");
        if (j.contains("format") && j["format"] != "myceliumsim/detector/v1") {
            throw ParseError(0, "format", "expected myceliumsim/detector/v1");
        }
        p.baseline_window_s = j.value("baseline_window_s", p.baseline_window_s);
        p.threshold_mV = j.value("threshold_mV", p.threshold_mV);
        p.min_width_s = j.value("min_width_s", p.min_width_s);
        p.max_width_s = j.value("max_width_s", p.max_width_s);
        p.merge_gap_s = j.value("merge_gap_s", p.merge_gap_s);
        p.train_split_gap_s = j.value("train_split_gap_s", p.train_split_gap_s);
        p.train_class_boundary_s = j.value("train_class_boundary_s", p.train_class_boundary_s);
        p.smoothing_s = j.value("smoothing_s", p.smoothing_s);
        p.report_threshold_mV = j.value("report_threshold_mV", p.report_threshold_mV);
        p.long_width_flag_s = j.value("long_width_flag_s", p.long_width_flag_s);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, "detector", e.what());
    }
    p.validate();
    return p;
}

DetectorParams load_detector_params(const std::filesystem::path& path) {
    return parse_detector_params(detail::read_file(path));
}

// ---------------------------------------------------------------------------
// detrending

namespace {

/// Sliding order statistics over a fixed array: Fenwick tree on value ranks.
class RankWindow {
public:
    explicit RankWindow(const std::vector<double>& values) : values_(values), tree_(values.size() + 1, 0) {
        order_.resize(values.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
        rank_.resize(values.size());
        for (std::size_t r = 0; r < order_.size(); ++r) rank_[order_[r]] = r;
        top_bit_ = 1;
        while (top_bit_ * 2 <= values.size()) top_bit_ *= 2;
    }

    void add(std::size_t i) { update(rank_[i] + 1, 1); }
    void remove(std::size_t i) { update(rank_[i] + 1, -1); }

    /// k-th smallest (0-based) among the samples currently in the window.
    double kth(std::size_t k) const {
        std::size_t pos = 0;
        long remaining = static_cast<long>(k) + 1;
        for (std::size_t step = top_bit_; step > 0; step /= 2) {
            if (pos + step < tree_.size() && tree_[pos + step] < remaining) {
                pos += step;
                remaining -= tree_[pos];
            }
        }
        return values_[order_[pos]];
    }

    double median(std::size_t size) const {
        if (size % 2 == 1) return kth(size / 2);
        return 0.5 * (kth(size / 2 - 1) + kth(size / 2));
    }

private:
    void update(std::size_t at, long delta) {
        for (; at < tree_.size(); at += at & (~at + 1)) tree_[at] += delta;
    }

    const std::vector<double>& values_;
    std::vector<long> tree_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> rank_;
    std::size_t top_bit_;
};

std::vector<double> running_median(const std::vector<double>& x, std::size_t window) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    if (n == 0) return out;
    const std::size_t before = window / 2;
    const std::size_t after = window - before - 1;
    RankWindow ranks(x);
    std::size_t lo = 0, hi = 0;  // current window is [lo, hi)
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t want_lo = i >= before ? i - before : 0;
        const std::size_t want_hi = std::min(n, i + after + 1);
        while (hi < want_hi) ranks.add(hi++);
        while (lo < want_lo) ranks.remove(lo++);
        out[i] = ranks.median(hi - lo);
    }
    return out;
}

double global_median(std::vector<double> x) {
    if (x.empty()) return 0.0;
    const auto mid = x.size() / 2;
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid), x.end());
    const double upper = x[mid];
    if (x.size() % 2 == 1) return upper;
    const double lower = *std::max_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

std::vector<double> moving_average(const std::vector<double>& x, std::size_t window) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    if (window <= 1) return x;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
    const std::size_t half = window / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n, i + half + 1);
        out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
    return out;
}

}  // namespace

DetrendResult detrend(const Recording& recording, double window_s) {
    recording.validate();
    const auto window = static_cast<std::size_t>(std::llround(window_s / recording.interval_s));
    if (!(window_s > 0.0) || window < 2) throw ConfigError("baseline window must span at least two samples");

    DetrendResult out{recording, {}};
    const bool global = window > recording.length();
    if (global && recording.length() > 0) {
        out.warnings.push_back("baseline window exceeds the record; subtracted the global median instead");
    }
    for (auto& ch : out.recording.channels) {
        if (global) {
            const double m = global_median(ch);
            for (auto& v : ch) v -= m;
        } else {
            const auto baseline = running_median(ch, window);
            for (std::size_t i = 0; i < ch.size(); ++i) ch[i] -= baseline[i];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// detection

namespace {

struct Excursion {
    std::size_t begin;
    std::size_t end;  // first sample back within the hysteresis band, or n
};

std::vector<DetectedSpike> detect_channel(const std::string& label, const std::vector<double>& x,
                                          const Recording& rec, const DetectorParams& p) {
    const std::size_t n = x.size();
    std::vector<DetectedSpike> out;
    if (n == 0) return out;

    auto k = static_cast<std::size_t>(std::llround(p.smoothing_s / rec.interval_s));
    if (k % 2 == 0) ++k;
    const auto smooth = moving_average(x, k);
    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(smooth[i]);

    const double hi = p.threshold_mV;
    const double lo = p.threshold_mV / 2.0;

    std::vector<Excursion> found;
    std::size_t i = 0;
    while (i < n) {
        if (mag[i] < hi) {
            ++i;
            continue;
        }
        std::size_t b = i;
        while (b > 0 && mag[b - 1] > lo) --b;
        std::size_t e = i;
        while (e < n && mag[e] > lo) ++e;
        if (!found.empty() && b < found.back().end) b = found.back().end;
        found.push_back({b, e});
        i = e;
    }

    auto time_of_end = [&](std::size_t e) { return rec.time_at(std::min(e, n - 1)); };

    std::vector<Excursion> merged;
    for (const auto& ex : found) {
        if (!merged.empty() && rec.time_at(ex.begin) - time_of_end(merged.back().end) < p.merge_gap_s) {
            merged.back().end = ex.end;
        } else {
            merged.push_back(ex);
        }
    }

    // The hysteresis crossings sit at threshold/2, inside the spike. Walk each
    // edge outward to where the smoothed trace returns to the baseline (changes
    // sign), never past a neighbouring excursion nor by more than half the
    // excursion's own length.
    for (std::size_t m = 0; m < merged.size(); ++m) {
        const auto& ex = merged[m];
        const std::size_t last = std::min(ex.end, n);
        std::size_t peak = ex.begin;
        for (std::size_t j = ex.begin; j < last; ++j) {
            if (mag[j] > mag[peak]) peak = j;
        }
        const int polarity = smooth[peak] < 0.0 ? -1 : 1;
        const auto above = [&](std::size_t j) { return polarity * smooth[j] > 0.0; };

        const std::size_t reach = (last - ex.begin) / 2;
        const std::size_t floor_b = std::max(m > 0 ? std::min(merged[m - 1].end, n) : std::size_t{0},
                                             ex.begin > reach ? ex.begin - reach : std::size_t{0});
        std::size_t b = ex.begin;
        while (b > floor_b && above(b - 1)) --b;
        std::size_t e = ex.end;
        if (e < n) {
            const std::size_t ceil_e = std::min({m + 1 < merged.size() ? merged[m + 1].begin : n, e + reach, n});
            while (e < ceil_e && above(e)) ++e;
        }

        const double onset = rec.time_at(b);
        const double width = time_of_end(e) - onset;
        if (width < p.min_width_s || width > p.max_width_s) continue;
        out.push_back({label, onset, rec.time_at(peak), mag[peak], width, polarity});
    }
    return out;
}

}  // namespace

Detection detect_spikes(const Recording& recording, const DetectorParams& params, bool detrended) {
    params.validate();
    Detection out;
    const Recording* source = &recording;
    DetrendResult own;
    if (!detrended) {
        own = detrend(recording, params.baseline_window_s);
        source = &own.recording;
        out.detrended_internally = true;
    } else {
        recording.validate();
    }
    for (std::size_t c = 0; c < source->channels.size(); ++c) {
        auto spikes = detect_channel(source->labels[c], source->channels[c], *source, params);
        out.spikes.insert(out.spikes.end(), spikes.begin(), spikes.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// statistics

namespace {

struct Welford {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    double population_sd() const { return n == 0 ? 0.0 : std::sqrt(std::max(0.0, m2 / static_cast<double>(n))); }
};

std::map<std::string, std::vector<DetectedSpike>> by_channel(const std::vector<DetectedSpike>& spikes) {
    std::map<std::string, std::vector<DetectedSpike>> out;
    for (const auto& s : spikes) out[s.channel].push_back(s);
    for (auto& [_, list] : out) {
        std::stable_sort(list.begin(), list.end(),
                         [](const DetectedSpike& x, const DetectedSpike& y) { return x.peak_s < y.peak_s; });
    }
    return out;
}

}  // namespace

SpikeStats spike_stats(const std::vector<DetectedSpike>& spikes) {
    SpikeStats s;
    Welford amp, width, period;
    for (const auto& sp : spikes) {
        amp.add(sp.amplitude_mV);
        width.add(sp.width_s);
    }
    for (const auto& [_, list] : by_channel(spikes)) {
        for (std::size_t i = 1; i < list.size(); ++i) period.add(list[i].peak_s - list[i - 1].peak_s);
    }
    s.count = spikes.size();
    if (s.count == 0) return s;
    s.amplitude_mean = amp.mean;
    s.amplitude_sd = amp.population_sd();
    s.width_mean = width.mean;
    s.width_sd = width.population_sd();
    if (period.n > 0) {
        s.period_mean = period.mean;
        s.period_sd = period.population_sd();
    }
    return s;
}

std::string_view to_string(TrainClass c) {
    return c == TrainClass::high_frequency ? "high-frequency" : "low-frequency";
}

std::vector<SpikeTrain> classify_trains(const std::vector<DetectedSpike>& spikes, const DetectorParams& params) {
    std::vector<SpikeTrain> out;
    auto close = [&](SpikeTrain& t) {
        if (t.spikes.size() >= 2) {
            const double span = t.spikes.back().peak_s - t.spikes.front().peak_s;
            t.mean_period_s = span / static_cast<double>(t.spikes.size() - 1);
            t.cls = t.mean_period_s < params.train_class_boundary_s ? TrainClass::high_frequency
                                                                     : TrainClass::low_frequency;
            out.push_back(std::move(t));
        }
    };
    for (auto& [channel, list] : by_channel(spikes)) {
        SpikeTrain current{channel, {}, 0.0, TrainClass::low_frequency};
        for (const auto& s : list) {
            if (!current.spikes.empty() && s.peak_s - current.spikes.back().peak_s > params.train_split_gap_s) {
                close(current);
                current = SpikeTrain{channel, {}, 0.0, TrainClass::low_frequency};
            }
            current.spikes.push_back(s);
        }
        close(current);
    }
    return out;
}

std::vector<LatencyRow> stimulation_latency(const Recording& recording, const std::vector<DetectedSpike>& spikes,
                                            const std::vector<StimulusAnnotation>& annotations) {
    std::vector<LatencyRow> rows;
    for (std::size_t k = 0; k < annotations.size(); ++k) {
        const auto& stim = annotations[k];
        for (const auto& label : recording.labels) {
            LatencyRow row{k, stim.time_s, stim.kind, label, std::nullopt};
            for (const auto& s : spikes) {
                if (s.channel != label) continue;
                const double lag = s.onset_s - stim.time_s;
                if (lag < 0.0 || lag > kLatencyHorizonS) continue;
                if (!row.latency_s || lag < *row.latency_s) row.latency_s = lag;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string format_spikes_csv(const std::vector<DetectedSpike>& spikes) {
    std::string out = "channel,onset_s,peak_s,amplitude_mV,width_s\n";
    for (const auto& s : spikes) {
        out += s.channel + ',' + detail::format_double(s.onset_s) + ',' + detail::format_double(s.peak_s) + ',' +
               detail::format_double(s.amplitude_mV) + ',' + detail::format_double(s.width_s) + '\n';
    }
    return out;
}

}  // namespace mycosim
