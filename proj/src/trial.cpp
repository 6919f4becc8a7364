#include "tact/trial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tact/detail/io_util.hpp"
#include "tact/detail/rng.hpp"
#include "tact/errors.hpp"

namespace tact {

using nlohmann::json;

std::string to_string(SensorKind k) { return k == SensorKind::SG ? "SG" : "PVDF"; }

std::string to_string(Finger f) {
    switch (f) {
        case Finger::Thumb: return "thumb";
        case Finger::Index: return "index";
        case Finger::Middle: return "middle";
        case Finger::Ring: return "ring";
        case Finger::Little: return "little";
    }
    return "?";
}

std::string to_string(Phalanx p) {
    switch (p) {
        case Phalanx::Distal: return "distal";
        case Phalanx::Middle: return "middle";
        case Phalanx::Proximal: return "proximal";
    }
    return "?";
}

SensorKind sensor_kind_from_string(const std::string& s) {
    if (s == "SG") return SensorKind::SG;
    if (s == "PVDF") return SensorKind::PVDF;
    throw SchemaError("unknown sensor kind '" + s + "'");
}

Finger finger_from_string(const std::string& s) {
    if (s == "thumb") return Finger::Thumb;
    if (s == "index") return Finger::Index;
    if (s == "middle") return Finger::Middle;
    if (s == "ring") return Finger::Ring;
    if (s == "little") return Finger::Little;
    throw SchemaError("unknown finger '" + s + "'");
}

Phalanx phalanx_from_string(const std::string& s) {
    if (s == "distal") return Phalanx::Distal;
    if (s == "middle") return Phalanx::Middle;
    if (s == "proximal") return Phalanx::Proximal;
    throw SchemaError("unknown phalanx segment '" + s + "'");
}

std::vector<ChannelMeta> default_channel_layout() {
    std::vector<ChannelMeta> out;
    out.reserve(kChannelCount);
    const Finger fingers[] = {Finger::Thumb, Finger::Index, Finger::Middle,
                              Finger::Ring, Finger::Little};
    int id = 1;
    // 14 SG: thumb carries distal+proximal, the other fingers all three phalanges
    for (Finger f : fingers) {
        if (f == Finger::Thumb) {
            out.push_back({id++, SensorKind::SG, f, Phalanx::Distal});
            out.push_back({id++, SensorKind::SG, f, Phalanx::Proximal});
        } else {
            out.push_back({id++, SensorKind::SG, f, Phalanx::Distal});
            out.push_back({id++, SensorKind::SG, f, Phalanx::Middle});
            out.push_back({id++, SensorKind::SG, f, Phalanx::Proximal});
        }
    }
    // 10 PVDF: distal + middle phalanx on every finger
    for (Finger f : fingers) {
        out.push_back({id++, SensorKind::PVDF, f, Phalanx::Distal});
        out.push_back({id++, SensorKind::PVDF, f, Phalanx::Middle});
    }
    return out;
}

void TactileTrial::validate() const {
    if (sample_rate_hz <= 0.0) throw ValidationError("sample_rate_hz must be positive");
    if (samples.rows() < 1) throw ValidationError("trial has no samples");
    if (static_cast<int>(channels.size()) != kChannelCount)
        throw SchemaError("trial must have exactly 24 channels, got " +
                          std::to_string(channels.size()));
    if (samples.cols() != kChannelCount)
        throw SchemaError("sample matrix must have 24 columns");
    int n_sg = 0, n_pvdf = 0;
    std::vector<bool> seen(kChannelCount + 1, false);
    for (const auto& ch : channels) {
        if (ch.id < 1 || ch.id > kChannelCount || seen[ch.id])
            throw ValidationError("channel ids must be unique within 1..24");
        seen[ch.id] = true;
        (ch.kind == SensorKind::SG ? n_sg : n_pvdf)++;
    }
    if (n_sg != kSgChannelCount || n_pvdf != kPvdfChannelCount)
        throw SchemaError("expected 14 SG and 10 PVDF channels, got " +
                          std::to_string(n_sg) + "/" + std::to_string(n_pvdf));
    if (!samples.allFinite()) throw ValidationError("samples must be finite");
    double prev_end = -1.0;
    for (const auto& seg : segments) {
        if (!(seg.slip_onset_s < seg.slip_end_s))
            throw ValidationError("segment slip_onset_s must precede slip_end_s");
        if (seg.slip_onset_s < prev_end)
            throw ValidationError("segments must be time-ordered and non-overlapping");
        if (seg.slip_onset_s < 0.0 || seg.slip_end_s > duration_s() + 1e-9)
            throw ValidationError("segment annotations must lie within the trial duration");
        prev_end = seg.slip_end_s;
    }
}

static std::filesystem::path meta_path(const std::filesystem::path& stem) {
    auto p = stem;
    p += ".meta.json";
    return p;
}

static std::filesystem::path csv_path(const std::filesystem::path& stem) {
    auto p = stem;
    p += ".csv";
    return p;
}

void save_trial(const TactileTrial& trial, const std::filesystem::path& stem) {
    trial.validate();

    json meta;
    meta["format_version"] = 1;
    meta["material_id"] = trial.material_id;
    meta["sample_rate_hz"] = trial.sample_rate_hz;
    meta["channels"] = json::array();
    for (const auto& ch : trial.channels) {
        meta["channels"].push_back({{"id", ch.id},
                                    {"kind", to_string(ch.kind)},
                                    {"finger", to_string(ch.finger)},
                                    {"segment", to_string(ch.segment)}});
    }
    meta["segments"] = json::array();
    for (const auto& seg : trial.segments) {
        meta["segments"].push_back({{"velocity_mm_s", seg.velocity_mm_s},
                                    {"slip_onset_s", seg.slip_onset_s},
                                    {"slip_end_s", seg.slip_end_s}});
    }

    {
        std::ofstream out(meta_path(stem));
        if (!out) throw IoError("cannot open " + meta_path(stem).string() + " for writing");
        out << meta.dump(2) << "\n";
        if (!out) throw IoError("write failed: " + meta_path(stem).string());
    }

    std::ofstream out(csv_path(stem));
    if (!out) throw IoError("cannot open " + csv_path(stem).string() + " for writing");
    out << "t";
    for (int c = 1; c <= kChannelCount; ++c) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), ",ch%02d", c);
        out << buf;
    }
    out << "\n";
    std::string line;
    for (Eigen::Index i = 0; i < trial.samples.rows(); ++i) {
        line.clear();
        line += detail::format_double(static_cast<double>(i) / trial.sample_rate_hz);
        for (Eigen::Index c = 0; c < kChannelCount; ++c) {
            line += ',';
            line += detail::format_double(trial.samples(i, c));
        }
        line += '\n';
        out << line;
    }
    if (!out) throw IoError("write failed: " + csv_path(stem).string());
}

TactileTrial load_trial(const std::filesystem::path& stem) {
    TactileTrial trial;
    trial.trial_id = stem.filename().string();

    std::ifstream mf(meta_path(stem));
    if (!mf) throw IoError("cannot open " + meta_path(stem).string());
    json meta;
    try {
        mf >> meta;
    } catch (const json::parse_error& e) {
        throw ParseError(meta_path(stem).string() + ": " + e.what());
    }

    try {
        if (meta.at("format_version").get<int>() != 1)
            throw SchemaError(meta_path(stem).string() + ": unsupported format_version");
        trial.material_id = meta.at("material_id").get<std::string>();
        trial.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
        for (const auto& jc : meta.at("channels")) {
            ChannelMeta ch;
            ch.id = jc.at("id").get<int>();
            ch.kind = sensor_kind_from_string(jc.at("kind").get<std::string>());
            ch.finger = finger_from_string(jc.at("finger").get<std::string>());
            ch.segment = phalanx_from_string(jc.at("segment").get<std::string>());
            trial.channels.push_back(ch);
        }
        for (const auto& js : meta.at("segments")) {
            SegmentAnnotation seg;
            seg.velocity_mm_s = js.at("velocity_mm_s").get<double>();
            seg.slip_onset_s = js.at("slip_onset_s").get<double>();
            seg.slip_end_s = js.at("slip_end_s").get<double>();
            trial.segments.push_back(seg);
        }
    } catch (const json::exception& e) {
        throw ParseError(meta_path(stem).string() + ": missing or mistyped field: " + e.what());
    }
    if (static_cast<int>(trial.channels.size()) != kChannelCount)
        throw SchemaError(meta_path(stem).string() + ": expected 24 channels, got " +
                          std::to_string(trial.channels.size()));

    std::ifstream cf(csv_path(stem));
    if (!cf) throw IoError("cannot open " + csv_path(stem).string());
    std::string line;
    if (!std::getline(cf, line))
        throw ParseError(csv_path(stem).string() + ": empty sample file");
    std::vector<std::array<double, kChannelCount>> rows;
    std::size_t lineno = 1;
    while (std::getline(cf, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::array<double, kChannelCount> row{};
        std::size_t pos = 0;
        for (int field = 0; field <= kChannelCount; ++field) {
            std::size_t next = line.find(',', pos);
            std::string_view cell(line.data() + pos,
                                  (next == std::string::npos ? line.size() : next) - pos);
            if (field > 0) {
                row[field - 1] = detail::parse_double(
                    cell, csv_path(stem).string() + " line " + std::to_string(lineno) +
                              " field " + std::to_string(field + 1));
            }
            if (next == std::string::npos) {
                if (field != kChannelCount)
                    throw ParseError(csv_path(stem).string() + " line " +
                                     std::to_string(lineno) + ": expected 25 fields");
                break;
            }
            pos = next + 1;
        }
        rows.push_back(row);
    }
    trial.samples.resize(static_cast<Eigen::Index>(rows.size()), kChannelCount);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int c = 0; c < kChannelCount; ++c)
            trial.samples(static_cast<Eigen::Index>(i), c) = rows[i][c];

    trial.validate();
    return trial;
}

WindowLabelResult label_windows(const TactileTrial& trial, double window_s) {
    WindowLabelResult out;
    const double duration = trial.duration_s();
    for (std::size_t i = 0; i < trial.segments.size(); ++i) {
        const auto& seg = trial.segments[i];
        LabeledWindowPair pair;
        pair.segment_index = static_cast<int>(i);
        pair.nonslip_start_s = seg.slip_onset_s - window_s;
        pair.nonslip_end_s = seg.slip_onset_s;
        pair.slip_start_s = seg.slip_onset_s;
        pair.slip_end_s = seg.slip_onset_s + window_s;
        // dropped, not truncated: keeps every downstream bin equal-length
        if (pair.nonslip_start_s < 0.0 || pair.slip_end_s > seg.slip_end_s ||
            pair.slip_end_s > duration) {
            ++out.omitted;
            continue;
        }
        out.pairs.push_back(pair);
    }
    return out;
}

std::string TrialKey::stratum() const {
    std::string s = material_id;
    for (double v : velocities_mm_s) {
        s += '/';
        s += detail::format_double(v);
    }
    return s;
}

TrialKey key_of(const TactileTrial& trial) {
    TrialKey key;
    key.material_id = trial.material_id;
    for (const auto& seg : trial.segments) key.velocities_mm_s.push_back(seg.velocity_mm_s);
    return key;
}

SplitIndices split_trials(const std::vector<TrialKey>& keys, double train_fraction,
                          std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("train_fraction must lie in (0, 1)");

    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < keys.size(); ++i)
        strata[keys[i].stratum()].push_back(i);
    for (const auto& [name, members] : strata)
        if (members.size() < 2)
            throw ValidationError("stratum '" + name + "' has fewer than 2 trials");

    detail::RngStream rng(detail::derive_seed(seed, 0x53504c49ull));

    std::vector<std::string> order;
    order.reserve(strata.size());
    for (const auto& [name, members] : strata) order.push_back(name);
    rng.shuffle(order);

    // floor per stratum, remainders distributed in seeded stratum order
    std::size_t target = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(keys.size())));
    std::size_t assigned = 0;
    std::map<std::string, std::size_t> take;
    for (const auto& [name, members] : strata) {
        take[name] = static_cast<std::size_t>(
            std::floor(train_fraction * static_cast<double>(members.size())));
        assigned += take[name];
    }
    for (std::size_t i = 0; assigned < target; i = (i + 1) % order.size()) {
        const auto& name = order[i];
        if (take[name] < strata[name].size()) {
            ++take[name];
            ++assigned;
        }
    }

    SplitIndices split;
    for (const auto& [name, members] : strata) {
        std::vector<std::size_t> shuffled = members;
        rng.shuffle(shuffled);
        for (std::size_t j = 0; j < shuffled.size(); ++j)
            (j < take[name] ? split.train : split.test).push_back(shuffled[j]);
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

}  // namespace tact
