#pragma once

// Experiment spec files: one `key = value` per line, `#` starts a comment.
// Every key has a default; unknown or repeated keys are errors. See README.md
// for the full key list.

#include "data.hpp"
#include "readout.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringres {

enum class ReservoirKind { single, ring };
enum class FeatureMode { trajectory, final_state };
enum class ReadoutKind { ridge, backprop };
enum class DatasetSource { manifest, xor_task, narma10, standin };

inline const char* to_string(ReservoirKind k) { return k == ReservoirKind::single ? "single" : "ring"; }
inline const char* to_string(FeatureMode m)
{
    return m == FeatureMode::trajectory ? "trajectory" : "final-state";
}
inline const char* to_string(ReadoutKind k) { return k == ReadoutKind::ridge ? "ridge" : "backprop"; }
inline const char* to_string(DatasetSource s)
{
    switch (s) {
    case DatasetSource::manifest: return "manifest";
    case DatasetSource::xor_task: return "xor";
    case DatasetSource::narma10: return "narma10";
    case DatasetSource::standin: return "standin";
    }
    return "";
}

inline FeatureMode parse_feature_mode(const std::string& v)
{
    if (v == "trajectory") return FeatureMode::trajectory;
    if (v == "final-state") return FeatureMode::final_state;
    throw std::invalid_argument("features must be trajectory or final-state, got `" + v + "`");
}

struct GeneratorSpec {
    std::size_t samples = 400;
    std::size_t length = 20;
    std::size_t delay = 3;
    double noise = 0.05;
    std::size_t channels = 1;
    TaskKind task = TaskKind::classification;
    std::size_t outputs = 2;

    friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

struct ExperimentSpec {
    std::string name = "experiment";

    ReservoirKind reservoir = ReservoirKind::ring;
    std::size_t size = 200;      ///< single reservoir N
    std::size_t subs = 4;        ///< ring R
    std::size_t sub_size = 50;
    double beta = 0.005;
    bool ring_enabled = true;
    double leak_rate = 0.05;
    double spectral_radius = 0.1;
    double input_scale = 1.0;

    std::size_t frame_stride = 1;
    std::size_t state_stride = 1;
    FeatureMode features = FeatureMode::trajectory;
    LengthPolicy length_policy{};

    ReadoutKind readout = ReadoutKind::backprop;
    double ridge_lambda = 1e-3;
    bool ridge_intercept = true;
    std::vector<std::size_t> hidden{256, 128};
    bool batch_norm = true;
    double learning_rate = 0.001;
    double weight_decay = 0.001;
    double momentum = 0.01;
    std::size_t batch_size = 64;
    std::size_t epochs = 100;
    bool early_stop = true;

    DatasetSource dataset = DatasetSource::xor_task;
    std::string manifest;                ///< as written; resolved against base_dir
    std::filesystem::path base_dir;      ///< directory of the spec file; not printed
    GeneratorSpec gen{};

    double train_fraction = 0.8;
    std::size_t runs = 1;
    std::uint64_t seed = 1;

    /// Assigns one key. Throws std::invalid_argument for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);

    /// Resolved spec, every key in a fixed order; parse_spec(to_text()) reproduces it.
    std::string to_text() const;

    void validate() const;

    std::filesystem::path manifest_path() const
    {
        const std::filesystem::path p{manifest};
        return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    }

    std::size_t reservoir_neurons() const
    {
        return reservoir == ReservoirKind::single ? size : subs * sub_size;
    }

    LossKind loss_kind(TaskKind task) const
    {
        return task == TaskKind::classification ? LossKind::cross_entropy
                                                : LossKind::mean_squared_error;
    }

    bool operator==(const ExperimentSpec& o) const
    {
        return to_text() == o.to_text();
    }
};

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string fmt_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // Prefer the shortest form that still round-trips.
    for (int prec = 1; prec <= 17; ++prec) {
        char tmp[32];
        std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
        if (std::strtod(tmp, nullptr) == v) return tmp;
    }
    return buf;
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& v)
{
    T out{};
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end)
        throw std::invalid_argument("key `" + key + "`: expected a non-negative integer, got `" + v + "`");
    return out;
}

inline double parse_real(const std::string& key, const std::string& v)
{
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || !std::isfinite(d))
        throw std::invalid_argument("key `" + key + "`: expected a real number, got `" + v + "`");
    return d;
}

inline bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "no") return false;
    throw std::invalid_argument("key `" + key + "`: expected true or false, got `" + v + "`");
}

inline std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& v)
{
    std::vector<std::size_t> out;
    if (v == "none") return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_unsigned<std::size_t>(key, trim(item)));
    return out;
}

} // namespace detail

inline void ExperimentSpec::set(const std::string& key, const std::string& value)
{
    using namespace detail;
    const auto& v = value;
    auto oneof = [&](std::initializer_list<const char*> opts) {
        for (const char* o : opts)
            if (v == o) return;
        std::string list;
        for (const char* o : opts) list += std::string(list.empty() ? "" : ", ") + o;
        throw std::invalid_argument("key `" + key + "`: expected one of " + list + ", got `" + v + "`");
    };
    if (key == "name") name = v;
    else if (key == "reservoir") {
        oneof({"single", "ring"});
        reservoir = v == "single" ? ReservoirKind::single : ReservoirKind::ring;
    }
    else if (key == "size") size = parse_unsigned<std::size_t>(key, v);
    else if (key == "subs") subs = parse_unsigned<std::size_t>(key, v);
    else if (key == "sub_size") sub_size = parse_unsigned<std::size_t>(key, v);
    else if (key == "beta") beta = parse_real(key, v);
    else if (key == "ring") ring_enabled = parse_bool(key, v);
    else if (key == "leak_rate") leak_rate = parse_real(key, v);
    else if (key == "spectral_radius") spectral_radius = parse_real(key, v);
    else if (key == "input_scale") input_scale = parse_real(key, v);
    else if (key == "frame_stride") frame_stride = parse_unsigned<std::size_t>(key, v);
    else if (key == "state_stride") state_stride = parse_unsigned<std::size_t>(key, v);
    else if (key == "features") features = parse_feature_mode(v);
    else if (key == "length_policy") length_policy = LengthPolicy::parse(v);
    else if (key == "readout") {
        oneof({"ridge", "backprop"});
        readout = v == "ridge" ? ReadoutKind::ridge : ReadoutKind::backprop;
    }
    else if (key == "ridge_lambda") ridge_lambda = parse_real(key, v);
    else if (key == "ridge_intercept") ridge_intercept = parse_bool(key, v);
    else if (key == "hidden") hidden = parse_sizes(key, v);
    else if (key == "batch_norm") batch_norm = parse_bool(key, v);
    else if (key == "learning_rate") learning_rate = parse_real(key, v);
    else if (key == "weight_decay") weight_decay = parse_real(key, v);
    else if (key == "momentum") momentum = parse_real(key, v);
    else if (key == "batch_size") batch_size = parse_unsigned<std::size_t>(key, v);
    else if (key == "epochs") epochs = parse_unsigned<std::size_t>(key, v);
    else if (key == "early_stop") early_stop = parse_bool(key, v);
    else if (key == "dataset") {
        oneof({"manifest", "xor", "narma10", "standin"});
        dataset = v == "manifest" ? DatasetSource::manifest
                  : v == "xor"    ? DatasetSource::xor_task
                  : v == "narma10" ? DatasetSource::narma10
                                   : DatasetSource::standin;
    }
    else if (key == "manifest") manifest = v;
    else if (key == "gen.samples") gen.samples = parse_unsigned<std::size_t>(key, v);
    else if (key == "gen.length") gen.length = parse_unsigned<std::size_t>(key, v);
    else if (key == "gen.delay") gen.delay = parse_unsigned<std::size_t>(key, v);
    else if (key == "gen.noise") gen.noise = parse_real(key, v);
    else if (key == "gen.channels") gen.channels = parse_unsigned<std::size_t>(key, v);
    else if (key == "gen.task") {
        try {
            gen.task = parse_task_kind(v);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("key `" + key + "`: " + e.what());
        }
    }
    else if (key == "gen.outputs") gen.outputs = parse_unsigned<std::size_t>(key, v);
    else if (key == "train_fraction") train_fraction = parse_real(key, v);
    else if (key == "runs") runs = parse_unsigned<std::size_t>(key, v);
    else if (key == "seed") seed = parse_unsigned<std::uint64_t>(key, v);
    else throw std::invalid_argument("unknown key `" + key + "`");
}

inline std::string ExperimentSpec::to_text() const
{
    using detail::fmt_double;
    std::ostringstream o;
    auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
    auto b = [](bool x) { return std::string(x ? "true" : "false"); };
    std::string hidden_text;
    for (std::size_t h : hidden) hidden_text += (hidden_text.empty() ? "" : ",") + std::to_string(h);
    if (hidden_text.empty()) hidden_text = "none";

    kv("name", name);
    kv("reservoir", to_string(reservoir));
    kv("size", std::to_string(size));
    kv("subs", std::to_string(subs));
    kv("sub_size", std::to_string(sub_size));
    kv("beta", fmt_double(beta));
    kv("ring", b(ring_enabled));
    kv("leak_rate", fmt_double(leak_rate));
    kv("spectral_radius", fmt_double(spectral_radius));
    kv("input_scale", fmt_double(input_scale));
    kv("frame_stride", std::to_string(frame_stride));
    kv("state_stride", std::to_string(state_stride));
    kv("features", to_string(features));
    kv("length_policy", length_policy.str());
    kv("readout", to_string(readout));
    kv("ridge_lambda", fmt_double(ridge_lambda));
    kv("ridge_intercept", b(ridge_intercept));
    kv("hidden", hidden_text);
    kv("batch_norm", b(batch_norm));
    kv("learning_rate", fmt_double(learning_rate));
    kv("weight_decay", fmt_double(weight_decay));
    kv("momentum", fmt_double(momentum));
    kv("batch_size", std::to_string(batch_size));
    kv("epochs", std::to_string(epochs));
    kv("early_stop", b(early_stop));
    kv("dataset", to_string(dataset));
    kv("manifest", manifest);
    kv("gen.samples", std::to_string(gen.samples));
    kv("gen.length", std::to_string(gen.length));
    kv("gen.delay", std::to_string(gen.delay));
    kv("gen.noise", fmt_double(gen.noise));
    kv("gen.channels", std::to_string(gen.channels));
    kv("gen.task", to_string(gen.task));
    kv("gen.outputs", std::to_string(gen.outputs));
    kv("train_fraction", fmt_double(train_fraction));
    kv("runs", std::to_string(runs));
    kv("seed", std::to_string(seed));
    return o.str();
}

inline void ExperimentSpec::validate() const
{
    auto fail = [](const std::string& m) { throw std::invalid_argument("spec: " + m); };
    if (reservoir == ReservoirKind::single && size < 1) fail("size must be >= 1");
    if (reservoir == ReservoirKind::ring && (subs < 1 || sub_size < 1))
        fail("subs and sub_size must be >= 1");
    if (!(beta >= 0.0)) fail("beta must be >= 0");
    if (!(leak_rate > 0.0 && leak_rate <= 1.0)) fail("leak_rate must lie in (0, 1]");
    if (!(spectral_radius > 0.0)) fail("spectral_radius must be > 0");
    if (!(input_scale > 0.0)) fail("input_scale must be > 0");
    if (frame_stride < 1 || state_stride < 1) fail("strides must be >= 1");
    if (length_policy.kind == LengthPolicy::Kind::fixed && length_policy.length <= 0)
        fail("fixed length must be > 0");
    if (!(ridge_lambda >= 0.0)) fail("ridge_lambda must be >= 0");
    for (std::size_t h : hidden)
        if (h < 1) fail("hidden layer widths must be >= 1");
    if (!(learning_rate >= 0.0) || !(weight_decay >= 0.0) || !(momentum >= 0.0))
        fail("learning_rate, weight_decay and momentum must be >= 0");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (epochs < 1) fail("epochs must be >= 1");
    if (dataset == DatasetSource::manifest && manifest.empty()) fail("dataset = manifest needs `manifest`");
    if (dataset != DatasetSource::manifest && gen.samples < 2) fail("gen.samples must be >= 2");
    if (dataset == DatasetSource::xor_task && !(gen.delay >= 1 && gen.delay < gen.length))
        fail("gen.delay must lie in [1, gen.length)");
    if (dataset == DatasetSource::narma10 && gen.length <= 10) fail("gen.length must be > 10");
    if (dataset == DatasetSource::standin && (gen.channels < 1 || gen.outputs < 1 || gen.length < 1))
        fail("gen.channels, gen.outputs and gen.length must be >= 1");
    if (dataset == DatasetSource::standin && gen.task == TaskKind::classification && gen.outputs < 2)
        fail("classification stand-in needs gen.outputs >= 2");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) fail("train_fraction must lie in (0, 1)");
    if (runs < 1) fail("runs must be >= 1");
}

inline ExperimentSpec parse_spec_text(const std::string& text, const std::string& origin = "<spec>")
{
    ExperimentSpec spec;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> seen;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto where = origin + ":" + std::to_string(lineno) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(where + "expected `key = value`");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw std::invalid_argument(where + "duplicate key `" + key + "`");
        seen.push_back(key);
        try {
            spec.set(key, value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(where + e.what());
        }
    }
    spec.validate();
    return spec;
}

inline ExperimentSpec load_spec(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    auto spec = parse_spec_text(ss.str(), path.string());
    spec.base_dir = path.parent_path();
    return spec;
}

} // namespace ringres
