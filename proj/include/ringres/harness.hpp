#pragma once

// End-to-end experiments: build a reservoir or ring, harvest features, fit a
// readout, evaluate on a held-out split, and aggregate over seeded runs.

#include "data.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "model_io.hpp"
#include "parallel.hpp"
#include "readout.hpp"
#include "ring.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace ringres {

// ---------------------------------------------------------------------------
// Ensembles and features

/// Either one large reservoir or a ring of sub-reservoirs.
struct Ensemble {
    std::variant<Reservoir, RingEnsemble> model;

    bool is_ring() const noexcept { return std::holds_alternative<RingEnsemble>(model); }

    std::size_t input_dim() const
    {
        return is_ring() ? std::get<RingEnsemble>(model).config.input_dim
                         : std::get<Reservoir>(model).config.input_dim;
    }

    std::size_t state_size() const
    {
        return is_ring() ? std::get<RingEnsemble>(model).state_size()
                         : std::get<Reservoir>(model).config.size;
    }

    Matrix harvest(const Matrix& sequence, std::size_t frame_stride, std::size_t state_stride) const
    {
        if (is_ring())
            return harvest_ring(std::get<RingEnsemble>(model), sequence, frame_stride, state_stride);
        return ringres::harvest(std::get<Reservoir>(model), sequence, frame_stride, state_stride);
    }

    friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

inline Ensemble build_ensemble(const ExperimentSpec& spec, std::size_t input_dim, std::uint64_t seed)
{
    if (spec.reservoir == ReservoirKind::single)
        return {init_reservoir({spec.size, input_dim, spec.leak_rate, spec.spectral_radius,
                                spec.input_scale, seed})};
    RingConfig c;
    c.num_subs = spec.subs;
    c.sub_size = spec.sub_size;
    c.input_dim = input_dim;
    c.beta = spec.beta;
    c.ring_enabled = spec.ring_enabled;
    c.leak_rate = spec.leak_rate;
    c.spectral_target = spec.spectral_radius;
    c.input_scale = spec.input_scale;
    c.seed = seed;
    return {init_ring(c)};
}

struct FeatureSettings {
    std::size_t frame_stride = 1;
    std::size_t state_stride = 1;
    FeatureMode mode = FeatureMode::trajectory;
};

inline std::size_t feature_width(const Ensemble& ens, std::size_t series_length, const FeatureSettings& fs)
{
    if (fs.mode == FeatureMode::final_state) return ens.state_size();
    return harvested_rows(series_length, fs.frame_stride, fs.state_stride) * ens.state_size();
}

/// One row per sample: the flattened time-major harvest, or the state after the last driven frame.
/// All samples must share one length.
inline Matrix extract_features(const Ensemble& ens, const Dataset& ds, const FeatureSettings& fs,
                               std::size_t threads = 1)
{
    if (ds.samples.empty()) throw std::invalid_argument("extract_features: empty dataset");
    const std::size_t len = ds.samples.front().series.rows();
    for (const auto& s : ds.samples)
        if (s.series.rows() != len)
            throw std::invalid_argument("extract_features: samples differ in length; normalize lengths first");
    const std::size_t width = feature_width(ens, len, fs);
    Matrix out(ds.size(), width);
    parallel_for(ds.size(), threads, [&](std::size_t i) {
        auto row = out.row(i);
        if (fs.mode == FeatureMode::trajectory) {
            const Matrix h = ens.harvest(ds.samples[i].series, fs.frame_stride, fs.state_stride);
            std::copy(h.values().begin(), h.values().end(), row.begin());
        } else {
            const Matrix h = ens.harvest(ds.samples[i].series, fs.frame_stride, 1);
            auto last = h.row(h.rows() - 1);
            std::copy(last.begin(), last.end(), row.begin());
        }
    });
    if (!all_finite(out)) throw numerical_error("non-finite reservoir states in harvested features");
    return out;
}

// ---------------------------------------------------------------------------
// Trained models

using Readout = std::variant<LinearReadout, ReadoutNet>;

inline Matrix predict(const Readout& readout, const Matrix& features)
{
    if (const auto* lin = std::get_if<LinearReadout>(&readout)) return lin->predict(features);
    return std::get<ReadoutNet>(readout).predict(features);
}

inline const char* metric_name(TaskKind task)
{
    return task == TaskKind::classification ? "accuracy_percent" : "mse";
}

inline bool higher_is_better(TaskKind task) { return task == TaskKind::classification; }

/// Accuracy in percent for classification, mean squared error for regression.
inline double score(TaskKind task, const Matrix& predictions, const Dataset& ds)
{
    if (!all_finite(predictions)) throw numerical_error("non-finite readout predictions");
    if (task == TaskKind::classification) {
        const auto l = labels(ds);
        return accuracy_percent(predictions, l);
    }
    return mean_squared_error(predictions, target_matrix(ds));
}

/// Everything needed to replay a trained run on new data.
struct TrainedModel {
    std::string spec_text;
    Ensemble ensemble;
    Readout readout;
    ChannelBounds bounds;
    std::size_t series_length = 0;
    TaskKind task = TaskKind::classification;
    std::size_t outputs = 0;
    FeatureSettings features;
    std::size_t run_index = 0;
    double train_metric = 0.0;
    double test_metric = 0.0;
};

/// Normalizes channels with the stored bounds, fixes the length, harvests, and scores.
inline double evaluate(const TrainedModel& model, const Dataset& raw, std::size_t threads = 1)
{
    validate(raw);
    if (raw.channels != model.ensemble.input_dim())
        throw std::invalid_argument(
          "evaluate: data has " + std::to_string(raw.channels) + " channels, model expects "
          + std::to_string(model.ensemble.input_dim()));
    if (raw.task != model.task || raw.output_dim() != model.outputs)
        throw std::invalid_argument("evaluate: data task does not match the model's task");
    Dataset ds = apply_channel_bounds(raw, model.bounds);
    ds = normalize_length(std::move(ds), {LengthPolicy::Kind::fixed, static_cast<long>(model.series_length)});
    const Matrix x = extract_features(model.ensemble, ds, model.features, threads);
    return score(model.task, predict(model.readout, x), ds);
}

inline std::string serialize_model(const TrainedModel& m)
{
    ByteWriter w{PayloadKind::trained_model};
    w.str(m.spec_text);
    w.u64(m.ensemble.is_ring() ? 1 : 0);
    if (m.ensemble.is_ring()) encode(w, std::get<RingEnsemble>(m.ensemble.model));
    else encode(w, std::get<Reservoir>(m.ensemble.model));
    const bool net = std::holds_alternative<ReadoutNet>(m.readout);
    w.u64(net ? 1 : 0);
    if (net) encode(w, std::get<ReadoutNet>(m.readout));
    else encode(w, std::get<LinearReadout>(m.readout));
    w.vec(m.bounds.min);
    w.vec(m.bounds.max);
    w.u64(m.series_length);
    w.u64(m.task == TaskKind::classification ? 0 : 1);
    w.u64(m.outputs);
    w.u64(m.features.frame_stride);
    w.u64(m.features.state_stride);
    w.u64(m.features.mode == FeatureMode::trajectory ? 0 : 1);
    w.u64(m.run_index);
    w.f64(m.train_metric);
    w.f64(m.test_metric);
    return w.take();
}

inline TrainedModel deserialize_model(std::string_view bytes)
{
    ByteReader r{bytes, PayloadKind::trained_model};
    TrainedModel m;
    m.spec_text = r.str();
    const auto ens_kind = r.u64();
    if (ens_kind == 1) {
        RingEnsemble e;
        decode(r, e);
        m.ensemble.model = std::move(e);
    } else if (ens_kind == 0) {
        Reservoir e;
        decode(r, e);
        m.ensemble.model = std::move(e);
    } else throw format_error("corrupt model file: unknown ensemble kind");
    const auto readout_kind = r.u64();
    if (readout_kind == 1) {
        ReadoutNet n;
        decode(r, n);
        m.readout = std::move(n);
    } else if (readout_kind == 0) {
        LinearReadout l;
        decode(r, l);
        m.readout = std::move(l);
    } else throw format_error("corrupt model file: unknown readout kind");
    m.bounds.min = r.vec();
    m.bounds.max = r.vec();
    m.series_length = r.u64();
    const auto task = r.u64();
    if (task > 1) throw format_error("corrupt model file: unknown task kind");
    m.task = task == 0 ? TaskKind::classification : TaskKind::regression;
    m.outputs = r.u64();
    m.features.frame_stride = r.u64();
    m.features.state_stride = r.u64();
    const auto mode = r.u64();
    if (mode > 1) throw format_error("corrupt model file: unknown feature mode");
    m.features.mode = mode == 0 ? FeatureMode::trajectory : FeatureMode::final_state;
    m.run_index = r.u64();
    m.train_metric = r.f64();
    m.test_metric = r.f64();
    r.finish();
    if (m.bounds.min.size() != m.ensemble.input_dim() || m.bounds.max.size() != m.ensemble.input_dim())
        throw format_error("corrupt model file: normalization bounds do not match input width");
    if (m.series_length == 0 || m.features.frame_stride == 0 || m.features.state_stride == 0)
        throw format_error("corrupt model file: zero length or stride");
    return m;
}

// ---------------------------------------------------------------------------
// Experiments

struct ParameterCounts {
    std::uint64_t recurrent = 0;  ///< includes the shared cross-talk matrix
    std::uint64_t input = 0;
    std::uint64_t readout = 0;
};

struct RunResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    double metric = 0.0;        ///< on the test split
    double train_metric = 0.0;
    double seconds = 0.0;
    std::vector<double> loss_history;  ///< backprop readouts only
};

struct RunReport {
    std::string name;
    std::string metric;
    bool higher_is_better = true;
    std::vector<RunResult> runs;
    double mean = 0.0;
    double sd = 0.0;        ///< sample (n − 1) standard deviation; 0 for a single run
    bool single_run = false;
    ParameterCounts params;
    std::size_t best_run = 0;
};

/// Fills mean, sd, single_run and best_run from the per-run metrics.
inline void aggregate(RunReport& r)
{
    if (r.runs.empty()) throw std::invalid_argument("aggregate: report has no runs");
    const double n = static_cast<double>(r.runs.size());
    double s = 0.0;
    for (const auto& run : r.runs) s += run.metric;
    r.mean = s / n;
    double ss = 0.0;
    for (const auto& run : r.runs) ss += (run.metric - r.mean) * (run.metric - r.mean);
    r.single_run = r.runs.size() == 1;
    r.sd = r.single_run ? 0.0 : std::sqrt(ss / (n - 1.0));
    r.best_run = 0;
    for (std::size_t i = 1; i < r.runs.size(); ++i) {
        const double a = r.runs[i].metric, b = r.runs[r.best_run].metric;
        if (r.higher_is_better ? a > b : a < b) r.best_run = i;
    }
}

/// Seed streams below a run's seed.
enum class Stream : std::uint64_t { ensemble = 0, split = 1, readout = 2 };

inline std::uint64_t run_seed(std::uint64_t master, std::size_t run) { return derive_seed(master, run); }

inline std::uint64_t stream_seed(std::uint64_t run_seed, Stream s)
{
    return derive_seed(run_seed, static_cast<std::uint64_t>(s));
}

/// Raw dataset of a spec; generators are seeded from the master seed.
inline Dataset load_experiment_data(const ExperimentSpec& spec)
{
    const std::uint64_t data_seed = mix64(spec.seed ^ 0x5eed0fda7aULL);
    const auto& g = spec.gen;
    switch (spec.dataset) {
    case DatasetSource::manifest: return load_dataset(spec.manifest_path());
    case DatasetSource::xor_task: return gen_delayed_xor(g.samples, g.length, g.delay, g.noise, data_seed);
    case DatasetSource::narma10: return gen_narma10(g.samples, g.length, data_seed);
    case DatasetSource::standin:
        return gen_standin(g.samples, g.length, g.channels, g.task, g.outputs, data_seed);
    }
    throw std::logic_error("unknown dataset source");
}

struct RunOptions {
    std::size_t threads = 1;
    bool keep_best_model = false;
};

struct ExperimentResult {
    RunReport report;
    std::optional<TrainedModel> best_model;
    std::optional<std::pair<Dataset, Dataset>> best_split;  ///< raw train/test samples of the best run
};

namespace detail {

struct RunOutput {
    RunResult result;
    TrainedModel model;
    std::pair<Dataset, Dataset> split;
};

inline RunOutput execute_run(const ExperimentSpec& spec, const Dataset& raw, std::size_t series_length,
                             std::size_t index, std::size_t inner_threads)
{
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput out;
    out.result.index = index;
    out.result.seed = run_seed(spec.seed, index);
    const auto seed = out.result.seed;

    auto parts = split(raw, spec.train_fraction, stream_seed(seed, Stream::split));
    if (parts.first.samples.size() < 2) throw std::invalid_argument("training split has fewer than 2 samples");
    if (parts.second.samples.empty()) throw std::invalid_argument("test split is empty");

    const ChannelBounds bounds = fit_channel_bounds(parts.first);
    const LengthPolicy fixed{LengthPolicy::Kind::fixed, static_cast<long>(series_length)};
    Dataset train = normalize_length(apply_channel_bounds(parts.first, bounds), fixed);
    Dataset test = normalize_length(apply_channel_bounds(parts.second, bounds), fixed);

    TrainedModel& m = out.model;
    m.spec_text = spec.to_text();
    m.ensemble = build_ensemble(spec, raw.channels, stream_seed(seed, Stream::ensemble));
    m.bounds = bounds;
    m.series_length = series_length;
    m.task = raw.task;
    m.outputs = raw.output_dim();
    m.features = {spec.frame_stride, spec.state_stride, spec.features};
    m.run_index = index;

    const Matrix x_train = extract_features(m.ensemble, train, m.features, inner_threads);
    const Matrix x_test = extract_features(m.ensemble, test, m.features, inner_threads);
    const Matrix y_train = target_matrix(train);

    if (spec.readout == ReadoutKind::ridge) {
        m.readout = fit_ridge(x_train, y_train, spec.ridge_lambda, spec.ridge_intercept);
    } else {
        TrainConfig cfg;
        cfg.learning_rate = spec.learning_rate;
        cfg.weight_decay = spec.weight_decay;
        cfg.momentum = spec.momentum;
        cfg.batch_size = spec.batch_size;
        cfg.epochs = spec.epochs;
        cfg.loss = spec.loss_kind(raw.task);
        cfg.seed = stream_seed(seed, Stream::readout);
        cfg.early_stop = spec.early_stop;
        NetSpec ns{x_train.cols(), spec.hidden, raw.output_dim(), spec.batch_norm};
        auto fit = fit_backprop(x_train, y_train, ns, cfg);
        out.result.loss_history = std::move(fit.loss_history);
        m.readout = std::move(fit.net);
    }

    m.train_metric = score(m.task, predict(m.readout, x_train), train);
    m.test_metric = score(m.task, predict(m.readout, x_test), test);
    out.result.metric = m.test_metric;
    out.result.train_metric = m.train_metric;
    out.split = std::move(parts);
    out.result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

template <typename E>
[[noreturn]] void rethrow_with_run(const E& e, std::size_t run)
{
    throw E("run " + std::to_string(run) + ": " + e.what());
}

} // namespace detail

inline ParameterCounts parameter_counts(const ExperimentSpec& spec, std::size_t input_dim,
                                        std::uint64_t readout_params)
{
    ParameterCounts p;
    if (spec.reservoir == ReservoirKind::single) {
        p.recurrent = single_recurrent_parameters(spec.size);
        p.input = static_cast<std::uint64_t>(spec.size) * input_dim;
    } else {
        p.recurrent = ring_recurrent_parameters(spec.subs, spec.sub_size);
        p.input = static_cast<std::uint64_t>(spec.subs) * spec.sub_size * input_dim;
    }
    p.readout = readout_params;
    return p;
}

/// Runs spec.runs independent seeded runs and aggregates their test metrics.
/// Results do not depend on the thread count.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& opts = {})
{
    spec.validate();
    const Dataset raw = load_experiment_data(spec);
    validate(raw);
    const std::size_t series_length = resolved_length(raw, spec.length_policy);

    ExperimentResult res;
    auto& report = res.report;
    report.name = spec.name;
    report.metric = metric_name(raw.task);
    report.higher_is_better = higher_is_better(raw.task);
    report.runs.resize(spec.runs);

    std::mutex best_mutex;
    std::optional<detail::RunOutput> best;
    std::uint64_t readout_params = 0;
    const std::size_t outer = std::min(opts.threads, spec.runs);
    const std::size_t inner = outer > 1 ? 1 : opts.threads;

    parallel_for(spec.runs, outer, [&](std::size_t i) {
        detail::RunOutput out;
        try {
            out = detail::execute_run(spec, raw, series_length, i, inner);
        } catch (const numerical_error& e) {
            detail::rethrow_with_run(e, i);
        } catch (const std::invalid_argument& e) {
            detail::rethrow_with_run(e, i);
        } catch (const std::runtime_error& e) {
            detail::rethrow_with_run(e, i);
        }
        std::lock_guard lock{best_mutex};
        report.runs[i] = out.result;
        if (i == 0) {
            if (const auto* net = std::get_if<ReadoutNet>(&out.model.readout))
                readout_params = net->parameter_count();
            else {
                const auto& lin = std::get<LinearReadout>(out.model.readout);
                readout_params = lin.weights.size() + lin.bias.size();
            }
        }
        if (!opts.keep_best_model) return;
        const bool better = !best
                            || (report.higher_is_better ? out.result.metric > best->result.metric
                                                        : out.result.metric < best->result.metric)
                            || (out.result.metric == best->result.metric && i < best->result.index);
        if (better) best = std::move(out);
    });

    aggregate(report);
    report.params = parameter_counts(spec, raw.channels, readout_params);
    if (best) {
        res.best_model = std::move(best->model);
        res.best_split = std::move(best->split);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Result files

enum class ReportFormat { csv, table_text };

inline ReportFormat parse_report_format(const std::string& s)
{
    if (s == "csv") return ReportFormat::csv;
    if (s == "table-text") return ReportFormat::table_text;
    throw std::invalid_argument("format must be csv or table-text, got `" + s + "`");
}

struct EmitOptions {
    bool include_timing = true;  ///< wall-clock seconds vary between executions
};

namespace detail {

inline std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace detail

/// CSV (`run_index,metric,seconds`) or a human-readable table with a `mean ± sd` line.
/// Without timing, the CSV seconds field is left empty.
inline std::string format_results(const RunReport& report, ReportFormat format, EmitOptions opts = {})
{
    if (report.runs.empty()) throw std::invalid_argument("emit_results: empty report");
    std::ostringstream o;
    if (format == ReportFormat::csv) {
        o << "run_index,metric,seconds\n";
        for (const auto& r : report.runs)
            o << r.index << ',' << detail::fmt("%.17g", r.metric) << ','
              << (opts.include_timing ? detail::fmt("%.6f", r.seconds) : "") << '\n';
        return o.str();
    }
    o << "experiment: " << report.name << '\n';
    o << "metric: " << report.metric << " (test split)\n";
    o << "runs: " << report.runs.size() << (report.single_run ? " (single run, sd reported as 0)" : "")
      << '\n';
    o << "run  metric      train";
    if (opts.include_timing) o << "       seconds";
    o << '\n';
    for (const auto& r : report.runs) {
        char line[128];
        std::snprintf(line, sizeof line, "%-4zu %-11.4f %-11.4f", r.index, r.metric, r.train_metric);
        o << line;
        if (opts.include_timing) o << detail::fmt(" %.3f", r.seconds);
        o << '\n';
    }
    o << "mean ± sd: " << detail::fmt("%.3f", report.mean) << " ± " << detail::fmt("%.3f", report.sd)
      << '\n';
    o << "best run: " << report.best_run << '\n';
    o << "parameters: recurrent " << report.params.recurrent << ", input " << report.params.input
      << ", readout " << report.params.readout << '\n';
    return o.str();
}

inline void emit_results(const RunReport& report, const std::filesystem::path& path, ReportFormat format,
                         EmitOptions opts = {})
{
    const auto text = format_results(report, format, opts);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing report " + path.string());
}

/// Per-run rows of a CSV report; an empty seconds field reads as NaN.
inline std::vector<RunResult> parse_results_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "run_index,metric,seconds")
        throw std::invalid_argument("results CSV: bad header");
    std::vector<RunResult> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::invalid_argument("results CSV: malformed row `" + line + "`");
        RunResult r;
        r.index = std::stoul(line.substr(0, c1));
        r.metric = std::strtod(line.substr(c1 + 1, c2 - c1 - 1).c_str(), nullptr);
        const auto sec = line.substr(c2 + 1);
        r.seconds = sec.empty() ? NAN : std::strtod(sec.c_str(), nullptr);
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Memory report

struct MemoryReport {
    ReservoirKind kind = ReservoirKind::ring;
    std::size_t subs = 1;
    std::size_t sub_size = 0;
    std::size_t neurons = 0;
    std::uint64_t sub_recurrent = 0;  ///< all sub-reservoir (or the single) recurrent weights
    std::uint64_t shared = 0;         ///< shared cross-talk weights
    std::uint64_t recurrent = 0;
    std::optional<std::uint64_t> input;
    std::uint64_t equivalent_single = 0;  ///< recurrent weights of one reservoir with all neurons
    double ratio = 1.0;                   ///< equivalent_single / recurrent

    std::string to_text() const;
};

inline MemoryReport memreport(const ExperimentSpec& spec, std::optional<std::size_t> input_dim = {})
{
    MemoryReport m;
    m.kind = spec.reservoir;
    if (spec.reservoir == ReservoirKind::single) {
        m.subs = 1;
        m.sub_size = spec.size;
        m.neurons = spec.size;
        m.sub_recurrent = single_recurrent_parameters(spec.size);
    } else {
        m.subs = spec.subs;
        m.sub_size = spec.sub_size;
        m.neurons = spec.subs * spec.sub_size;
        m.sub_recurrent = static_cast<std::uint64_t>(spec.subs) * spec.sub_size * spec.sub_size;
        m.shared = static_cast<std::uint64_t>(spec.sub_size) * spec.sub_size;
    }
    m.recurrent = m.sub_recurrent + m.shared;
    if (input_dim) m.input = static_cast<std::uint64_t>(m.neurons) * *input_dim;
    m.equivalent_single = single_recurrent_parameters(m.neurons);
    m.ratio = static_cast<double>(m.equivalent_single) / static_cast<double>(m.recurrent);
    return m;
}

namespace detail {

inline std::string grouped(std::uint64_t v)
{
    std::string s = std::to_string(v);
    for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
    return s;
}

} // namespace detail

inline std::string MemoryReport::to_text() const
{
    using detail::grouped;
    std::ostringstream o;
    char line[160];
    auto row = [&](const char* label, std::uint64_t v, const std::string& note) {
        std::snprintf(line, sizeof line, "  %-34s %14s", label, grouped(v).c_str());
        o << line << (note.empty() ? "" : "  " + note) << '\n';
    };
    const auto n = std::to_string(sub_size);
    if (kind == ReservoirKind::single) {
        o << "memory report: single reservoir of " << neurons << " neurons\n";
        row("recurrent weights", recurrent, "(" + n + "^2)");
    } else {
        o << "memory report: ring of " << subs << " x " << sub_size << " (" << neurons << " neurons)\n";
        row("sub-reservoir recurrent weights", sub_recurrent, "(" + std::to_string(subs) + " x " + n + "^2)");
        row("shared cross-talk weights", shared, "(" + n + "^2, one matrix for the whole ring)");
        row("total recurrent weights", recurrent, "");
    }
    if (input) row("input weights", *input, "(reported separately)");
    else o << "  input weights                      unknown (input width not available)\n";
    const auto single_label = "single reservoir of " + std::to_string(neurons) + " neurons";
    row(single_label.c_str(), equivalent_single, "recurrent weights");
    std::snprintf(line, sizeof line, "  ratio single / this configuration  %14.2f\n", ratio);
    o << line;
    if (kind == ReservoirKind::ring) {
        o << "  note: the ring's total counts every sub-reservoir (R x sub_size^2) plus the shared matrix\n";
        if (subs == 8 && sub_size == 400)
            o << "  note: 8 x 400 costs 8 x 400^2 + 400^2; the figure 4 x 400^2 sometimes quoted for this\n"
                 "        configuration is a typo and undercounts the sub-reservoir weights by half\n";
    }
    return o.str();
}

} // namespace ringres
