// ringres command-line front end.
//
//   ringres train     --spec FILE [--seed N] [--runs N] [--features M] [--set key=value ...]
//                     [--out-model FILE] [--out-report FILE] [--format csv|table-text]
//                     [--out-log FILE] [--dump-splits DIR] [--timing]
//   ringres eval      --model FILE --manifest FILE
//   ringres gen       xor|narma10|standin --out DIR [generator options]
//   ringres memreport --spec FILE [--channels N]
//   ringres inspect   --model FILE
//
// Exit codes: 0 success, 1 user or input error, 2 numerical failure.

#include <ringres/ringres.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ringres;
using detail::fmt_double;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_user = 1;
constexpr int exit_numerical = 2;

struct TrainArgs {
    std::string spec;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::string features;
    std::vector<std::string> overrides;
    std::string out_model;
    std::string out_report;
    std::string format = "table-text";
    std::string out_log;
    std::string dump_splits;
    bool timing = false;
};

struct GenArgs {
    std::string kind;
    std::string out;
    std::size_t n = 200;
    std::uint64_t seed = 1;
    std::size_t length = 20;
    std::size_t delay = 3;
    double noise = 0.05;
    std::size_t channels = 1;
    std::string task = "classification";
    std::size_t outputs = 2;
};

void apply_override(ExperimentSpec& spec, const std::string& kv)
{
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got `" + kv + "`");
    spec.set(detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
}

int cmd_train(const TrainArgs& a)
{
    ExperimentSpec spec = load_spec(a.spec);
    for (const auto& kv : a.overrides) apply_override(spec, kv);
    if (a.seed) spec.seed = *a.seed;
    if (a.runs) spec.runs = *a.runs;
    if (!a.features.empty()) spec.features = parse_feature_mode(a.features);
    spec.validate();
    const auto format = parse_report_format(a.format);

    std::cout << "# resolved spec\n" << spec.to_text() << std::flush;

    RunOptions opts;
    opts.threads = default_thread_count();
    opts.keep_best_model = !a.out_model.empty() || !a.dump_splits.empty();
    auto result = run_experiment(spec, opts);

    std::cout << "# results\n" << format_results(result.report, ReportFormat::table_text, {true});
    if (!a.out_report.empty()) emit_results(result.report, a.out_report, format, {a.timing});
    if (!a.out_log.empty()) {
        std::ofstream log(a.out_log);
        if (!log) throw std::runtime_error("cannot write training log " + a.out_log);
        log << "run epoch loss\n";
        char buf[64];
        for (const auto& r : result.report.runs)
            for (std::size_t e = 0; e < r.loss_history.size(); ++e) {
                std::snprintf(buf, sizeof buf, "%.17g", r.loss_history[e]);
                log << r.index << ' ' << e << ' ' << buf << '\n';
            }
    }
    if (!a.out_model.empty()) write_file(a.out_model, serialize_model(*result.best_model));
    if (!a.dump_splits.empty()) {
        fs::create_directories(a.dump_splits);
        save_dataset(result.best_split->first, fs::path(a.dump_splits) / "train" / "manifest.json");
        save_dataset(result.best_split->second, fs::path(a.dump_splits) / "test" / "manifest.json");
    }
    return exit_ok;
}

int cmd_eval(const std::string& model_path, const std::string& manifest_path)
{
    const TrainedModel model = deserialize_model(read_file(model_path));
    std::cout << "# model spec\n" << model.spec_text;
    const Dataset ds = load_dataset(manifest_path);
    const double metric = evaluate(model, ds, default_thread_count());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", metric);
    std::cout << metric_name(model.task) << " = " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", model.train_metric);
    std::cout << "recorded train " << metric_name(model.task) << " = " << buf << '\n';
    return exit_ok;
}

int cmd_gen(const GenArgs& a)
{
    std::cout << "# gen " << a.kind << " n=" << a.n << " seed=" << a.seed << " length=" << a.length;
    Dataset ds;
    if (a.kind == "xor") {
        std::cout << " delay=" << a.delay << " noise=" << a.noise << '\n';
        ds = gen_delayed_xor(a.n, a.length, a.delay, a.noise, a.seed);
    } else if (a.kind == "narma10") {
        std::cout << '\n';
        ds = gen_narma10(a.n, a.length, a.seed);
    } else {
        std::cout << " channels=" << a.channels << " task=" << a.task << " outputs=" << a.outputs << '\n';
        ds = gen_standin(a.n, a.length, a.channels, parse_task_kind(a.task), a.outputs, a.seed);
    }
    const fs::path manifest = fs::path(a.out) / "manifest.json";
    save_dataset(ds, manifest);
    std::cout << "wrote " << ds.size() << " samples to " << manifest.string() << '\n';
    return exit_ok;
}

int cmd_memreport(const std::string& spec_path, std::optional<std::size_t> channels)
{
    const ExperimentSpec spec = load_spec(spec_path);
    std::cout << "# resolved spec\n" << spec.to_text();
    if (!channels) {
        if (spec.dataset == DatasetSource::standin) channels = spec.gen.channels;
        else if (spec.dataset != DatasetSource::manifest) channels = 1;
        else if (fs::exists(spec.manifest_path())) channels = load_dataset(spec.manifest_path()).channels;
    }
    std::cout << memreport(spec, channels).to_text();
    return exit_ok;
}

int cmd_inspect(const std::string& model_path)
{
    const TrainedModel m = deserialize_model(read_file(model_path));
    std::printf("model: %s\n", model_path.c_str());
    std::printf("task: %s (%zu outputs), metric %s: train %.6g, test %.6g (run %zu)\n",
                to_string(m.task), m.outputs, metric_name(m.task), m.train_metric, m.test_metric,
                m.run_index);
    std::printf("input channels: %zu, series length: %zu, frame_stride %zu, state_stride %zu, features %s\n",
                m.ensemble.input_dim(), m.series_length, m.features.frame_stride,
                m.features.state_stride, to_string(m.features.mode));
    if (const auto* ring = std::get_if<RingEnsemble>(&m.ensemble.model)) {
        const auto& c = ring->config;
        std::printf("ensemble: ring R=%zu sub_size=%zu beta=%s ring_enabled=%s leak_rate=%s\n", c.num_subs,
                    c.sub_size, fmt_double(c.beta).c_str(), c.ring_enabled ? "true" : "false",
                    fmt_double(c.leak_rate).c_str());
        for (std::size_t r = 0; r < ring->subs.size(); ++r)
            std::printf("  sub %zu spectral radius %.9f\n", r, spectral_radius(ring->subs[r].w_rec).value);
        std::printf("  shared spectral radius %.9f\n", spectral_radius(ring->w_shared).value);
    } else {
        const auto& res = std::get<Reservoir>(m.ensemble.model);
        std::printf("ensemble: single N=%zu leak_rate=%s\n", res.config.size,
                    fmt_double(res.config.leak_rate).c_str());
        std::printf("  spectral radius %.9f\n", spectral_radius(res.w_rec).value);
    }
    if (const auto* net = std::get_if<ReadoutNet>(&m.readout)) {
        std::printf("readout: backprop network, %zu parameters\n", net->parameter_count());
        for (const auto& l : net->layers())
            std::printf("  %zu -> %zu%s%s\n", l.in(), l.out(), l.batch_norm ? " batchnorm" : "",
                        l.relu ? " relu" : "");
    } else {
        const auto& lin = std::get<LinearReadout>(m.readout);
        std::printf("readout: ridge, weights %zu x %zu%s\n", lin.weights.rows(), lin.weights.cols(),
                    lin.bias.empty() ? "" : " + bias");
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ringres: parallel ring echo state networks with ridge or backprop readouts"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Run an experiment spec");
    train_cmd->add_option("--spec", train.spec, "Experiment spec file")->required();
    train_cmd->add_option("--seed", train.seed, "Override the master seed");
    train_cmd->add_option("--runs", train.runs, "Override the number of runs");
    train_cmd->add_option("--features", train.features, "trajectory or final-state");
    train_cmd->add_option("--set", train.overrides, "Override a spec key (key=value)");
    train_cmd->add_option("--out-model", train.out_model, "Write the best run's model here");
    train_cmd->add_option("--out-report", train.out_report, "Write the results report here");
    train_cmd->add_option("--format", train.format, "Report format: csv or table-text");
    train_cmd->add_option("--out-log", train.out_log, "Write per-epoch training losses here");
    train_cmd->add_option("--dump-splits", train.dump_splits,
                          "Write the best run's raw train/test splits as manifests under DIR");
    train_cmd->add_flag("--timing", train.timing, "Include wall-clock seconds in the report file");

    std::string model_path, manifest_path;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained model on a dataset manifest");
    eval_cmd->add_option("--model", model_path)->required();
    eval_cmd->add_option("--manifest", manifest_path)->required();

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
    gen_cmd->add_option("kind", gen.kind, "xor, narma10 or standin")
      ->required()
      ->check(CLI::IsMember({"xor", "narma10", "standin"}));
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();
    gen_cmd->add_option("--n", gen.n, "Number of samples");
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--length", gen.length, "Series length");
    gen_cmd->add_option("--delay", gen.delay, "xor: delay of the second pulse");
    gen_cmd->add_option("--noise", gen.noise, "xor: noise amplitude");
    gen_cmd->add_option("--channels", gen.channels, "standin: channels");
    gen_cmd->add_option("--task", gen.task, "standin: classification or regression");
    gen_cmd->add_option("--outputs", gen.outputs, "standin: classes or target width");

    std::string mem_spec;
    std::optional<std::size_t> mem_channels;
    auto* mem_cmd = app.add_subcommand("memreport", "Print recurrent parameter counts for a spec");
    mem_cmd->add_option("--spec", mem_spec)->required();
    mem_cmd->add_option("--channels", mem_channels, "Input width for the input-weight count");

    std::string inspect_model;
    auto* inspect_cmd = app.add_subcommand("inspect", "Summarize a trained model file");
    inspect_cmd->add_option("--model", inspect_model)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_user;
    }

    try {
        if (*train_cmd) return cmd_train(train);
        if (*eval_cmd) return cmd_eval(model_path, manifest_path);
        if (*gen_cmd) return cmd_gen(gen);
        if (*mem_cmd) return cmd_memreport(mem_spec, mem_channels);
        if (*inspect_cmd) return cmd_inspect(inspect_model);
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_user;
    }
    return exit_user;
}
