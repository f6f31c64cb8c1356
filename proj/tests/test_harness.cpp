#include <ringres/ringres.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace ringres;
namespace fs = std::filesystem;

namespace {

ExperimentSpec small_xor_spec()
{
    ExperimentSpec s;
    s.name = "small";
    s.reservoir = ReservoirKind::ring;
    s.subs = 3;
    s.sub_size = 10;
    s.readout = ReadoutKind::ridge;
    s.dataset = DatasetSource::xor_task;
    s.gen.samples = 60;
    s.gen.length = 12;
    s.runs = 3;
    s.seed = 5;
    return s;
}

ExperimentSpec small_backprop_spec()
{
    ExperimentSpec s = small_xor_spec();
    s.readout = ReadoutKind::backprop;
    s.hidden = {8};
    s.epochs = 3;
    s.batch_size = 16;
    return s;
}

RunReport report_of(std::initializer_list<double> metrics, bool higher = true)
{
    RunReport r;
    r.name = "r";
    r.metric = "m";
    r.higher_is_better = higher;
    std::size_t i = 0;
    for (double m : metrics) {
        RunResult run;
        run.index = i++;
        run.metric = m;
        run.seconds = 0.5;
        r.runs.push_back(run);
    }
    aggregate(r);
    return r;
}

std::vector<double> metrics_of(const RunReport& r)
{
    std::vector<double> out;
    for (const auto& run : r.runs) out.push_back(run.metric);
    return out;
}

} // namespace

TEST(Features, TrajectoryAndFinalState)
{
    ExperimentSpec spec = small_xor_spec();
    const Ensemble ens = build_ensemble(spec, 1, 9);
    EXPECT_TRUE(ens.is_ring());
    EXPECT_EQ(ens.state_size(), 30u);
    const Dataset ds = gen_delayed_xor(4, 11, 3, 0.1, 2);

    const FeatureSettings traj{2, 2, FeatureMode::trajectory};
    const Matrix x = extract_features(ens, ds, traj);
    EXPECT_EQ(x.cols(), feature_width(ens, 11, traj));
    EXPECT_EQ(x.cols(), 3u * 30u);  // frames 0,2,4,6,8,10 then every other state
    const Matrix h = ens.harvest(ds.samples[1].series, 2, 2);
    for (std::size_t k = 0; k < h.size(); ++k) EXPECT_EQ(x(1, k), h.values()[k]);

    const FeatureSettings last{2, 2, FeatureMode::final_state};
    const Matrix f = extract_features(ens, ds, last);
    EXPECT_EQ(f.cols(), 30u);
    const Matrix all = ens.harvest(ds.samples[3].series, 2, 1);
    for (std::size_t j = 0; j < 30; ++j) EXPECT_EQ(f(3, j), all(all.rows() - 1, j));

    EXPECT_EQ(extract_features(ens, ds, traj, 3), x);
}

TEST(Features, RequiresEqualLengths)
{
    const Ensemble ens = build_ensemble(small_xor_spec(), 1, 1);
    Dataset ds = gen_delayed_xor(4, 11, 3, 0.1, 2);
    ds.samples[2].series = Matrix(9, 1);
    EXPECT_THROW(extract_features(ens, ds, {}), std::invalid_argument);
}

TEST(Features, SingleReservoirEnsemble)
{
    ExperimentSpec spec = small_xor_spec();
    spec.reservoir = ReservoirKind::single;
    spec.size = 17;
    const Ensemble ens = build_ensemble(spec, 2, 3);
    EXPECT_FALSE(ens.is_ring());
    EXPECT_EQ(ens.state_size(), 17u);
    EXPECT_EQ(ens.input_dim(), 2u);
}

TEST(Aggregate, SampleStandardDeviation)
{
    const RunReport r = report_of({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(r.mean, 2.5);
    EXPECT_DOUBLE_EQ(r.sd, std::sqrt(5.0 / 3.0));
    EXPECT_FALSE(r.single_run);
    EXPECT_EQ(r.best_run, 3u);
    EXPECT_EQ(report_of({0.3, 0.1, 0.2}, false).best_run, 1u);
}

TEST(Aggregate, SingleRun)
{
    const RunReport r = report_of({42.0});
    EXPECT_EQ(r.sd, 0.0);
    EXPECT_TRUE(r.single_run);
    EXPECT_NE(format_results(r, ReportFormat::table_text).find("single run"), std::string::npos);
    RunReport empty;
    EXPECT_THROW(aggregate(empty), std::invalid_argument);
}

TEST(Report, CsvRoundTripAndRecomputation)
{
    const RunReport r = report_of({97.5, 100.0, 1.0 / 3.0, 88.125});
    const auto rows = parse_results_csv(format_results(r, ReportFormat::csv));
    ASSERT_EQ(rows.size(), 4u);
    double s = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].index, i);
        EXPECT_EQ(rows[i].metric, r.runs[i].metric);
        EXPECT_DOUBLE_EQ(rows[i].seconds, 0.5);
        s += rows[i].metric;
    }
    const double mean = s / 4.0;
    double ss = 0.0;
    for (const auto& row : rows) ss += (row.metric - mean) * (row.metric - mean);
    EXPECT_DOUBLE_EQ(mean, r.mean);
    EXPECT_DOUBLE_EQ(std::sqrt(ss / 3.0), r.sd);

    const auto untimed = parse_results_csv(format_results(r, ReportFormat::csv, {false}));
    EXPECT_TRUE(std::isnan(untimed[0].seconds));
    EXPECT_THROW(parse_results_csv("index,metric\n"), std::invalid_argument);
}

TEST(Report, TableTextAndErrors)
{
    const RunReport r = report_of({1.0, 2.0});
    const auto text = format_results(r, ReportFormat::table_text);
    EXPECT_NE(text.find("mean ± sd: 1.500 ± 0.707"), std::string::npos);
    EXPECT_EQ(format_results(r, ReportFormat::table_text, {false}).find("seconds"), std::string::npos);
    EXPECT_THROW(format_results(RunReport{}, ReportFormat::csv), std::invalid_argument);
    EXPECT_THROW(emit_results(r, "/nonexistent-dir/report.csv", ReportFormat::csv), std::runtime_error);
    EXPECT_THROW(parse_report_format("json"), std::invalid_argument);
}

TEST(Seeds, RunSeedsAreInjective)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t master : {0ull, 1ull, 7ull})
        for (std::size_t run = 0; run < 5000; ++run) {
            const auto s = run_seed(master, run);
            EXPECT_TRUE(seen.insert(s).second);
            for (Stream st : {Stream::ensemble, Stream::split, Stream::readout})
                EXPECT_TRUE(seen.insert(stream_seed(s, st)).second);
        }
}

TEST(RunExperiment, DeterministicAcrossCallsAndThreadCounts)
{
    const ExperimentSpec spec = small_backprop_spec();
    const auto a = run_experiment(spec, {1, false}).report;
    const auto b = run_experiment(spec, {1, false}).report;
    const auto c = run_experiment(spec, {4, false}).report;
    EXPECT_EQ(metrics_of(a), metrics_of(b));
    EXPECT_EQ(metrics_of(a), metrics_of(c));
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        EXPECT_EQ(a.runs[i].loss_history, c.runs[i].loss_history);
        EXPECT_EQ(a.runs[i].seed, run_seed(spec.seed, i));
    }
    EXPECT_EQ(format_results(a, ReportFormat::csv, {false}), format_results(c, ReportFormat::csv, {false}));
    EXPECT_EQ(a.mean, c.mean);
    EXPECT_EQ(a.sd, c.sd);
}

TEST(RunExperiment, SingleRunHasZeroSd)
{
    ExperimentSpec spec = small_xor_spec();
    spec.runs = 1;
    const auto r = run_experiment(spec).report;
    EXPECT_TRUE(r.single_run);
    EXPECT_EQ(r.sd, 0.0);
    EXPECT_EQ(r.metric, "accuracy_percent");
    EXPECT_EQ(r.params.recurrent, 3u * 100u + 100u);
    EXPECT_EQ(r.params.input, 30u);
}

TEST(RunExperiment, ReservoirIsUntouchedByTraining)
{
    ExperimentSpec spec = small_backprop_spec();
    spec.runs = 1;
    const auto res = run_experiment(spec, {1, true});
    ASSERT_TRUE(res.best_model.has_value());
    const Ensemble fresh = build_ensemble(spec, 1, stream_seed(run_seed(spec.seed, 0), Stream::ensemble));
    EXPECT_EQ(serialize(std::get<RingEnsemble>(res.best_model->ensemble.model)),
              serialize(std::get<RingEnsemble>(fresh.model)));
}

TEST(RunExperiment, ErrorsCarryRunIndex)
{
    ExperimentSpec spec = small_xor_spec();
    spec.gen.samples = 4;
    spec.train_fraction = 0.1;
    try {
        run_experiment(spec);
        FAIL() << "expected an error";
    } catch (const std::invalid_argument& e) {
        EXPECT_EQ(std::string(e.what()).rfind("run 0: ", 0), 0u) << e.what();
    }

    ExperimentSpec wild = small_backprop_spec();
    wild.runs = 2;
    wild.learning_rate = 1e300;
    wild.batch_norm = false;
    EXPECT_THROW(run_experiment(wild), numerical_error);
}

TEST(RunExperiment, ReplayReproducesRecordedMetrics)
{
    for (ExperimentSpec spec : {small_xor_spec(), small_backprop_spec()}) {
        const auto res = run_experiment(spec, {1, true});
        ASSERT_TRUE(res.best_model && res.best_split);
        const TrainedModel& m = *res.best_model;
        EXPECT_EQ(m.run_index, res.report.best_run);
        EXPECT_NEAR(evaluate(m, res.best_split->first), m.train_metric, 1e-10);
        EXPECT_NEAR(evaluate(m, res.best_split->second), m.test_metric, 1e-10);
        EXPECT_EQ(m.test_metric, res.report.runs[m.run_index].metric);

        const TrainedModel back = deserialize_model(serialize_model(m));
        EXPECT_EQ(serialize_model(back), serialize_model(m));
        EXPECT_EQ(evaluate(back, res.best_split->second), evaluate(m, res.best_split->second));

        Dataset wrong = gen_standin(4, 12, 3, TaskKind::classification, 2, 1);
        EXPECT_THROW(evaluate(m, wrong), std::invalid_argument);
    }
}

TEST(ModelIo, RejectsCorruptBytes)
{
    const auto res = run_experiment(small_xor_spec(), {1, true});
    const std::string bytes = serialize_model(*res.best_model);
    EXPECT_THROW(deserialize_model(bytes.substr(0, bytes.size() / 2)), format_error);
    EXPECT_THROW(deserialize_model("not a model"), format_error);
    std::string bumped = bytes;
    bumped[8] = 9;
    try {
        deserialize_model(bumped);
        FAIL() << "expected format_error";
    } catch (const format_error& e) {
        EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
    }
    EXPECT_THROW(deserialize_model(bytes + "x"), format_error);
}

TEST(ModelIo, StandalonePayloadsRoundTrip)
{
    RingConfig c;
    c.num_subs = 3;
    c.sub_size = 5;
    c.input_dim = 2;
    c.beta = 0.005;
    c.seed = 4;
    const RingEnsemble ring = init_ring(c);
    EXPECT_EQ(deserialize<RingEnsemble>(serialize(ring)), ring);
    EXPECT_EQ(deserialize<Reservoir>(serialize(ring.subs[1])), ring.subs[1]);
    ReadoutNet net(NetSpec{4, {3}, 2, true}, 1);
    EXPECT_EQ(deserialize<ReadoutNet>(serialize(net)), net);
    const LinearReadout lin{Matrix{{1.5, -2.0}, {0.1, 1e-300}}, {3.0, 4.0}};
    EXPECT_EQ(deserialize<LinearReadout>(serialize(lin)), lin);
    EXPECT_THROW(deserialize<Reservoir>(serialize(ring)), format_error);
}

TEST(MemReport, GestureScaleCounts)
{
    ExperimentSpec single;
    single.reservoir = ReservoirKind::single;
    single.size = 3200;
    EXPECT_EQ(memreport(single).recurrent, 10'240'000u);

    ExperimentSpec ring;
    ring.reservoir = ReservoirKind::ring;
    ring.subs = 8;
    ring.sub_size = 400;
    const auto m = memreport(ring, 16);
    EXPECT_EQ(m.recurrent, 1'440'000u);
    EXPECT_EQ(m.shared, 160'000u);
    EXPECT_EQ(m.equivalent_single, 10'240'000u);
    EXPECT_NEAR(m.ratio, 64.0 / 9.0, 1e-12);
    EXPECT_EQ(*m.input, 3200u * 16u);
    const auto text = m.to_text();
    EXPECT_NE(text.find("1,440,000"), std::string::npos);
    EXPECT_NE(text.find("10,240,000"), std::string::npos);
    EXPECT_NE(text.find("7.11"), std::string::npos);
}

TEST(MemReport, SingleSubRingCostsTwiceTheSingle)
{
    for (std::size_t n : {1u, 40u, 400u}) {
        ExperimentSpec ring;
        ring.reservoir = ReservoirKind::ring;
        ring.subs = 1;
        ring.sub_size = n;
        const auto m = memreport(ring);
        EXPECT_EQ(m.recurrent, 2 * m.equivalent_single);
        EXPECT_DOUBLE_EQ(m.ratio, 0.5);
    }
    for (std::size_t r = 1; r <= 16; ++r) {
        ExperimentSpec ring;
        ring.subs = r;
        ring.sub_size = 25;
        const double rr = static_cast<double>(r);
        EXPECT_NEAR(memreport(ring).ratio, rr * rr / (rr + 1.0), 1e-12);
    }
}

TEST(SpecFile, ParseAndPrintRoundTrip)
{
    const auto spec = parse_spec_text(R"(
# comment line
name = demo
reservoir = single   # trailing comment
size = 64
hidden = 32,16
features = final-state
length_policy = fixed:30
dataset = narma10
gen.length = 30
seed = 99
)");
    EXPECT_EQ(spec.name, "demo");
    EXPECT_EQ(spec.reservoir, ReservoirKind::single);
    EXPECT_EQ(spec.hidden, (std::vector<std::size_t>{32, 16}));
    EXPECT_EQ(spec.features, FeatureMode::final_state);
    EXPECT_EQ(spec.length_policy.str(), "fixed:30");
    EXPECT_EQ(spec.seed, 99u);
    EXPECT_EQ(parse_spec_text(spec.to_text()), spec);
    EXPECT_EQ(parse_spec_text(spec.to_text()).to_text(), spec.to_text());
    EXPECT_TRUE(parse_spec_text("hidden = none").hidden.empty());
}

TEST(SpecFile, Errors)
{
    auto message = [](const std::string& text) {
        try {
            parse_spec_text(text, "f.spec");
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string{};
    };
    EXPECT_NE(message("name = a\nsizee = 3\n").find("f.spec:2: unknown key `sizee`"), std::string::npos);
    EXPECT_NE(message("seed = 1\nseed = 2\n").find("duplicate key"), std::string::npos);
    EXPECT_NE(message("just words\n").find("f.spec:1"), std::string::npos);
    EXPECT_NE(message("leak_rate = 0\n").find("leak_rate"), std::string::npos);
    EXPECT_NE(message("size = -4\n").find("size"), std::string::npos);
    EXPECT_NE(message("readout = lasso\n").find("ridge, backprop"), std::string::npos);
    EXPECT_NE(message("ring = maybe\n").find("ring"), std::string::npos);
    EXPECT_NE(message("dataset = manifest\n").find("manifest"), std::string::npos);
    EXPECT_THROW(load_spec("/nonexistent/file.spec"), std::runtime_error);
}

TEST(SpecFile, ManifestResolvesAgainstSpecDirectory)
{
    const fs::path dir = fs::temp_directory_path() / ("ringres_spec_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::ofstream(dir / "x.spec") << "dataset = manifest\nmanifest = data/manifest.json\n";
    const auto spec = load_spec(dir / "x.spec");
    EXPECT_EQ(spec.manifest_path(), dir / "data" / "manifest.json");
    fs::remove_all(dir);
}

TEST(SyntheticTasks, RidgeSeparatesDelayedXor)
{
    // Single 200-unit reservoir, ridge readout on the trajectory.
    ExperimentSpec spec;
    spec.reservoir = ReservoirKind::single;
    spec.size = 200;
    spec.leak_rate = 1.0;
    spec.spectral_radius = 0.9;
    spec.readout = ReadoutKind::ridge;
    spec.dataset = DatasetSource::xor_task;
    spec.gen = {400, 20, 3, 0.05, 1, TaskKind::classification, 2};
    spec.runs = 3;
    const auto r = run_experiment(spec, {default_thread_count(), false}).report;
    for (const auto& run : r.runs) EXPECT_GE(run.metric, 95.0) << "run " << run.index;
}

TEST(SyntheticTasks, RidgeBeatsMeanBaselineOnNarma)
{
    ExperimentSpec spec;
    spec.reservoir = ReservoirKind::single;
    spec.size = 100;
    spec.readout = ReadoutKind::ridge;
    spec.dataset = DatasetSource::narma10;
    spec.gen.samples = 400;
    spec.gen.length = 50;
    spec.runs = 2;
    const auto res = run_experiment(spec, {default_thread_count(), true});
    const Dataset& test = res.best_split->second;
    double mean = 0.0;
    for (const auto& s : test.samples) mean += s.target[0];
    mean /= static_cast<double>(test.size());
    double baseline = 0.0;
    for (const auto& s : test.samples) baseline += (s.target[0] - mean) * (s.target[0] - mean);
    baseline /= static_cast<double>(test.size());
    EXPECT_LE(res.best_model->test_metric, 0.5 * baseline);
}
