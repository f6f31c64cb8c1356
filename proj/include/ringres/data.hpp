#pragma once

// Datasets of variable-length multichannel series: manifest I/O, channel and
// length normalization, stratified splitting, and synthetic task generators.

#include "linalg.hpp"
#include "random.hpp"
#include "readout.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ringres {

namespace fs = std::filesystem;

enum class TaskKind { classification, regression };

inline const char* to_string(TaskKind k)
{
    return k == TaskKind::classification ? "classification" : "regression";
}

inline TaskKind parse_task_kind(const std::string& s)
{
    if (s == "classification") return TaskKind::classification;
    if (s == "regression") return TaskKind::regression;
    throw std::invalid_argument("unknown task kind `" + s + "`");
}

struct Sample {
    Matrix series;       ///< T × channels
    std::size_t label = 0;
    Vector target;       ///< regression targets; empty for classification

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// Per-channel affine map to [-1, 1], fitted on a training split.
struct ChannelBounds {
    Vector min;
    Vector max;

    double apply(std::size_t channel, double v) const noexcept
    {
        const double lo = min[channel], hi = max[channel];
        if (!(hi > lo)) return 0.0;
        return 2.0 * (v - lo) / (hi - lo) - 1.0;
    }

    friend bool operator==(const ChannelBounds&, const ChannelBounds&) = default;
};

struct Dataset {
    TaskKind task = TaskKind::classification;
    std::size_t channels = 1;
    std::size_t num_classes = 2;  ///< classification only
    std::size_t target_dim = 1;   ///< regression only
    std::vector<Sample> samples;
    std::optional<ChannelBounds> bounds;  ///< set once normalized

    std::size_t size() const noexcept { return samples.size(); }
    std::size_t output_dim() const noexcept
    {
        return task == TaskKind::classification ? num_classes : target_dim;
    }

    /// Empty copy with the same task description.
    Dataset like() const { return {task, channels, num_classes, target_dim, {}, bounds}; }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

inline void validate(const Dataset& ds)
{
    if (ds.samples.empty()) throw std::invalid_argument("dataset: no samples");
    if (ds.channels < 1) throw std::invalid_argument("dataset: channel count must be >= 1");
    if (ds.task == TaskKind::classification && ds.num_classes < 2)
        throw std::invalid_argument("dataset: classification needs at least 2 classes");
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const auto& s = ds.samples[i];
        if (s.series.rows() == 0)
            throw std::invalid_argument("dataset: sample " + std::to_string(i) + " is empty");
        if (s.series.cols() != ds.channels)
            throw std::invalid_argument(
              "dataset: sample " + std::to_string(i) + " has " + std::to_string(s.series.cols())
              + " channels, expected " + std::to_string(ds.channels));
        if (!all_finite(s.series))
            throw std::invalid_argument("dataset: sample " + std::to_string(i) + " is not finite");
        if (ds.task == TaskKind::classification && s.label >= ds.num_classes)
            throw std::invalid_argument("dataset: sample " + std::to_string(i) + " label out of range");
        if (ds.task == TaskKind::regression && s.target.size() != ds.target_dim)
            throw std::invalid_argument(
              "dataset: sample " + std::to_string(i) + " target has wrong length");
    }
}

inline std::vector<std::size_t> labels(const Dataset& ds)
{
    std::vector<std::size_t> out;
    out.reserve(ds.size());
    for (const auto& s : ds.samples) out.push_back(s.label);
    return out;
}

/// One-hot rows for classification, target rows for regression.
inline Matrix target_matrix(const Dataset& ds)
{
    if (ds.task == TaskKind::classification) {
        const auto l = labels(ds);
        return one_hot(l, ds.num_classes);
    }
    Matrix m(ds.size(), ds.target_dim);
    for (std::size_t i = 0; i < ds.size(); ++i)
        std::copy(ds.samples[i].target.begin(), ds.samples[i].target.end(), m.row(i).begin());
    return m;
}

// ---------------------------------------------------------------------------
// CSV series files and the JSON manifest

inline Matrix read_series_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series file " + path.string());
    std::vector<double> values;
    std::size_t cols = 0, rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t n = 0;
        const char* p = line.c_str();
        while (true) {
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(p, &end);
            if (end == p || errno == ERANGE)
                throw std::runtime_error(
                  path.string() + ":" + std::to_string(rows + 1) + ": malformed number");
            values.push_back(v);
            ++n;
            while (*end == ' ' || *end == '\t') ++end;
            if (*end == '\0') break;
            if (*end != ',')
                throw std::runtime_error(
                  path.string() + ":" + std::to_string(rows + 1) + ": expected ','");
            p = end + 1;
        }
        if (rows == 0) cols = n;
        else if (n != cols)
            throw std::runtime_error(
              path.string() + ":" + std::to_string(rows + 1) + ": ragged row (" + std::to_string(n)
              + " columns, expected " + std::to_string(cols) + ")");
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("series file " + path.string() + " is empty");
    return Matrix(rows, cols, std::move(values));
}

inline void write_series_csv(const fs::path& path, const Matrix& series)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write series file " + path.string());
    char buf[32];
    for (std::size_t i = 0; i < series.rows(); ++i) {
        for (std::size_t j = 0; j < series.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", series(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline constexpr const char* manifest_format = "ringres-manifest";
inline constexpr int manifest_version = 1;

/// Reads a manifest; series paths are resolved relative to the manifest's directory.
inline Dataset load_dataset(const fs::path& manifest_path)
{
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest " + manifest_path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(manifest_path.string() + ": invalid JSON: " + e.what());
    }
    const auto where = manifest_path.string() + ": ";
    try {
        if (j.value("format", std::string{}) != manifest_format)
            throw std::runtime_error(where + "missing or wrong \"format\" tag");
        if (j.at("version").get<int>() != manifest_version)
            throw std::runtime_error(where + "unsupported manifest version");
        Dataset ds;
        ds.task = parse_task_kind(j.at("task").get<std::string>());
        ds.channels = j.at("channels").get<std::size_t>();
        if (ds.task == TaskKind::classification) {
            ds.num_classes = j.at("classes").get<std::size_t>();
        } else {
            ds.num_classes = 0;
            ds.target_dim = j.at("target_dim").get<std::size_t>();
        }
        const auto base = manifest_path.parent_path();
        for (const auto& e : j.at("samples")) {
            const fs::path series_path = base / e.at("series").get<std::string>();
            Sample s;
            s.series = read_series_csv(series_path);
            if (s.series.cols() != ds.channels)
                throw std::runtime_error(
                  series_path.string() + ": has " + std::to_string(s.series.cols())
                  + " channels, manifest declares " + std::to_string(ds.channels));
            if (ds.task == TaskKind::classification) s.label = e.at("label").get<std::size_t>();
            else s.target = e.at("target").get<std::vector<double>>();
            ds.samples.push_back(std::move(s));
        }
        validate(ds);
        return ds;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(where + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(where + e.what());
    }
}

/// Writes `manifest_path` plus one CSV per sample under `<manifest dir>/series/`.
inline void save_dataset(const Dataset& ds, const fs::path& manifest_path)
{
    validate(ds);
    const auto base = manifest_path.parent_path();
    fs::create_directories(base / "series");
    nlohmann::json j;
    j["format"] = manifest_format;
    j["version"] = manifest_version;
    j["task"] = to_string(ds.task);
    j["channels"] = ds.channels;
    if (ds.task == TaskKind::classification) j["classes"] = ds.num_classes;
    else j["target_dim"] = ds.target_dim;
    auto& samples = j["samples"] = nlohmann::json::array();
    char name[32];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::snprintf(name, sizeof name, "series/%06zu.csv", i);
        write_series_csv(base / name, ds.samples[i].series);
        nlohmann::json e;
        e["series"] = name;
        if (ds.task == TaskKind::classification) e["label"] = ds.samples[i].label;
        else e["target"] = ds.samples[i].target;
        samples.push_back(std::move(e));
    }
    std::ofstream out(manifest_path);
    if (!out) throw std::runtime_error("cannot write manifest " + manifest_path.string());
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Normalization and splitting

inline ChannelBounds fit_channel_bounds(const Dataset& ds)
{
    if (ds.samples.empty()) throw std::invalid_argument("normalize_channels: empty dataset");
    ChannelBounds b{Vector(ds.channels, INFINITY), Vector(ds.channels, -INFINITY)};
    for (const auto& s : ds.samples)
        for (std::size_t t = 0; t < s.series.rows(); ++t)
            for (std::size_t c = 0; c < ds.channels; ++c) {
                b.min[c] = std::min(b.min[c], s.series(t, c));
                b.max[c] = std::max(b.max[c], s.series(t, c));
            }
    return b;
}

/// Maps every channel through `bounds`. Values outside the bounds land outside [-1, 1].
inline Dataset apply_channel_bounds(Dataset ds, const ChannelBounds& bounds)
{
    if (bounds.min.size() != ds.channels)
        throw std::invalid_argument("normalize_channels: bounds do not match channel count");
    for (auto& s : ds.samples)
        for (std::size_t t = 0; t < s.series.rows(); ++t)
            for (std::size_t c = 0; c < ds.channels; ++c)
                s.series(t, c) = bounds.apply(c, s.series(t, c));
    ds.bounds = bounds;
    return ds;
}

/// Channel-wise map to [-1, 1] from the dataset's own min/max; constant channels map to 0.
inline Dataset normalize_channels(Dataset ds)
{
    const auto b = fit_channel_bounds(ds);
    return apply_channel_bounds(std::move(ds), b);
}

/// Seeded split. Classification is stratified: each class keeps round(fraction·count)
/// samples for training. Both halves preserve the original sample order.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split: train fraction must lie in (0, 1)");
    if (ds.samples.empty()) throw std::invalid_argument("split: empty dataset");
    Rng rng{seed};
    std::vector<bool> in_train(ds.size(), false);
    if (ds.task == TaskKind::classification) {
        std::vector<std::vector<std::size_t>> by_class(ds.num_classes);
        for (std::size_t i = 0; i < ds.size(); ++i) by_class.at(ds.samples[i].label).push_back(i);
        for (std::size_t c = 0; c < by_class.size(); ++c) {
            auto& members = by_class[c];
            if (members.empty()) continue;
            if (members.size() < 2)
                throw std::invalid_argument(
                  "split: class " + std::to_string(c) + " has fewer than 2 samples");
            rng.shuffle(members);
            const auto keep = static_cast<std::size_t>(
              std::llround(train_fraction * static_cast<double>(members.size())));
            for (std::size_t k = 0; k < keep; ++k) in_train[members[k]] = true;
        }
    } else {
        const auto perm = rng.permutation(ds.size());
        const auto keep = static_cast<std::size_t>(
          std::llround(train_fraction * static_cast<double>(ds.size())));
        for (std::size_t k = 0; k < keep; ++k) in_train[perm[k]] = true;
    }
    std::pair<Dataset, Dataset> out{ds.like(), ds.like()};
    for (std::size_t i = 0; i < ds.size(); ++i)
        (in_train[i] ? out.first : out.second).samples.push_back(ds.samples[i]);
    return out;
}

struct LengthPolicy {
    enum class Kind { truncate_to_min, pad_zero_to_max, fixed };
    Kind kind = Kind::pad_zero_to_max;
    long length = 0;  ///< used by Kind::fixed

    static LengthPolicy parse(const std::string& s)
    {
        if (s == "truncate") return {Kind::truncate_to_min, 0};
        if (s == "pad") return {Kind::pad_zero_to_max, 0};
        if (s.rfind("fixed:", 0) == 0) {
            char* end = nullptr;
            const long t = std::strtol(s.c_str() + 6, &end, 10);
            if (*end != '\0' || end == s.c_str() + 6)
                throw std::invalid_argument("length policy: bad length in `" + s + "`");
            return {Kind::fixed, t};
        }
        throw std::invalid_argument("length policy must be truncate, pad, or fixed:T, got `" + s + "`");
    }

    std::string str() const
    {
        switch (kind) {
        case Kind::truncate_to_min: return "truncate";
        case Kind::pad_zero_to_max: return "pad";
        case Kind::fixed: return "fixed:" + std::to_string(length);
        }
        return {};
    }

    friend bool operator==(const LengthPolicy&, const LengthPolicy&) = default;
};

/// Length every sample resolves to under `policy`.
inline std::size_t resolved_length(const Dataset& ds, LengthPolicy policy)
{
    if (ds.samples.empty()) throw std::invalid_argument("normalize_length: empty dataset");
    switch (policy.kind) {
    case LengthPolicy::Kind::fixed:
        if (policy.length <= 0) throw std::invalid_argument("normalize_length: fixed length must be > 0");
        return static_cast<std::size_t>(policy.length);
    case LengthPolicy::Kind::truncate_to_min: {
        std::size_t t = ds.samples.front().series.rows();
        for (const auto& s : ds.samples) t = std::min(t, s.series.rows());
        return t;
    }
    case LengthPolicy::Kind::pad_zero_to_max: {
        std::size_t t = 0;
        for (const auto& s : ds.samples) t = std::max(t, s.series.rows());
        return t;
    }
    }
    return 0;
}

/// Truncates or zero-pads (appending rows) every sample to one common length.
inline Dataset normalize_length(Dataset ds, LengthPolicy policy)
{
    const std::size_t len = resolved_length(ds, policy);
    for (auto& s : ds.samples) {
        if (s.series.rows() == len) continue;
        Matrix m(len, s.series.cols());
        const std::size_t keep = std::min(len, s.series.rows());
        std::copy_n(s.series.values().begin(), keep * s.series.cols(), m.values().begin());
        s.series = std::move(m);
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Synthetic tasks

/// One-channel pulse trains. Position 0 and position `delay` each carry a bit
/// (1 = pulse, 0 = no pulse) and the class is their XOR. Every step gets
/// additive noise uniform on ±noise_amplitude. Classes alternate, so they are
/// balanced to within one sample.
inline Dataset gen_delayed_xor(std::size_t n_samples, std::size_t length, std::size_t delay,
                               double noise_amplitude, std::uint64_t seed)
{
    if (delay >= length) throw std::invalid_argument("gen_delayed_xor: delay must be < length");
    if (delay == 0) throw std::invalid_argument("gen_delayed_xor: delay must be >= 1");
    Dataset ds{TaskKind::classification, 1, 2, 1, {}, {}};
    Rng rng{seed};
    for (std::size_t i = 0; i < n_samples; ++i) {
        const std::size_t label = i % 2;
        const std::size_t first = rng.index(2);
        const std::size_t second = first ^ label;
        Sample s;
        s.series = Matrix(length, 1);
        s.series(0, 0) = static_cast<double>(first);
        s.series(delay, 0) = static_cast<double>(second);
        if (noise_amplitude > 0.0)
            for (double& v : s.series.values()) v += rng.uniform(-noise_amplitude, noise_amplitude);
        s.label = label;
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

/// NARMA-10 response y_1..y_T of input u_0..u_{T-1}, with y_0..y_9 = 0:
/// y_{t+1} = 0.3 y_t + 0.05 y_t Σ_{i<10} y_{t-i} + 1.5 u_{t-9} u_t + 0.1.
inline Vector narma10_response(std::span<const double> u)
{
    const std::size_t T = u.size();
    Vector y(T + 1, 0.0);
    for (std::size_t t = 9; t < T; ++t) {
        double window = 0.0;
        for (std::size_t i = 0; i < 10; ++i) window += y[t - i];
        y[t + 1] = 0.3 * y[t] + 0.05 * y[t] * window + 1.5 * u[t - 9] * u[t] + 0.1;
    }
    return y;
}

/// Input series u ~ U[0, 0.5] paired with the final NARMA-10 output y_T. A sample
/// whose response leaves |y| <= 1e3 is regenerated from the next seed.
inline Dataset gen_narma10(std::size_t n_samples, std::size_t length, std::uint64_t seed)
{
    if (length <= 10) throw std::invalid_argument("gen_narma10: length must be > 10");
    constexpr int max_attempts = 16;
    Dataset ds{TaskKind::regression, 1, 0, 1, {}, {}};
    for (std::size_t i = 0; i < n_samples; ++i) {
        bool ok = false;
        for (int attempt = 0; attempt < max_attempts && !ok; ++attempt) {
            Rng rng{derive_seed(derive_seed(seed, i), static_cast<std::uint64_t>(attempt))};
            Sample s;
            s.series = Matrix(length, 1);
            for (double& v : s.series.values()) v = rng.uniform(0.0, 0.5);
            const Vector y = narma10_response(s.series.values());
            if (std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v) && std::abs(v) <= 1e3; })) {
                s.target = {y.back()};
                ds.samples.push_back(std::move(s));
                ok = true;
            }
        }
        if (!ok)
            throw std::runtime_error("gen_narma10: sample " + std::to_string(i) + " diverged repeatedly");
    }
    return ds;
}

/// Uniform noise series with balanced labels (or uniform regression targets).
/// Shapes match a real dataset so a pipeline can be smoke-tested without it.
inline Dataset gen_standin(std::size_t n_samples, std::size_t length, std::size_t channels,
                           TaskKind task, std::size_t outputs, std::uint64_t seed)
{
    if (length < 1 || channels < 1 || outputs < 1)
        throw std::invalid_argument("gen_standin: length, channels and outputs must be >= 1");
    Dataset ds{task, channels, task == TaskKind::classification ? outputs : 0,
               task == TaskKind::regression ? outputs : 1, {}, {}};
    Rng rng{seed};
    for (std::size_t i = 0; i < n_samples; ++i) {
        Sample s;
        s.series = Matrix(length, channels);
        for (double& v : s.series.values()) v = rng.uniform(-1.0, 1.0);
        if (task == TaskKind::classification) s.label = i % outputs;
        else
            for (std::size_t k = 0; k < outputs; ++k) s.target.push_back(rng.uniform(0.0, 1.0));
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

} // namespace ringres
