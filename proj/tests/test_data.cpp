#include <ringres/data.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace ringres;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        path_ = fs::temp_directory_path()
                / ("ringres_data_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

void write_text(const fs::path& p, const std::string& text)
{
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

Dataset balanced(std::size_t n, std::size_t classes)
{
    Dataset ds{TaskKind::classification, 1, classes, 1, {}, {}};
    for (std::size_t i = 0; i < n; ++i)
        ds.samples.push_back({Matrix(3, 1, static_cast<double>(i)), i % classes, {}});
    return ds;
}

Dataset one_channel(std::initializer_list<double> values)
{
    Dataset ds{TaskKind::regression, 1, 0, 1, {}, {}};
    for (double v : values) ds.samples.push_back({Matrix(1, 1, v), 0, {0.0}});
    return ds;
}

std::string error_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(LoadDataset, HandAuthoredFixture)
{
    const Dataset ds = load_dataset(fs::path(RINGRES_FIXTURES) / "toy3" / "manifest.json");
    EXPECT_EQ(ds.task, TaskKind::classification);
    EXPECT_EQ(ds.channels, 2u);
    EXPECT_EQ(ds.num_classes, 3u);
    ASSERT_EQ(ds.size(), 3u);
    EXPECT_EQ(ds.samples[0].series, (Matrix{{0, 10}, {1, 20}, {2, 30}}));
    EXPECT_EQ(ds.samples[1].series, (Matrix{{-1.5, 0}, {0.25, 5}, {3, -5}, {4, 7.5}}));
    EXPECT_EQ(ds.samples[2].series, (Matrix{{1e-3, 2}, {-2, 1}}));
    EXPECT_EQ(labels(ds), (std::vector<std::size_t>{0, 2, 1}));
    EXPECT_FALSE(ds.bounds.has_value());
}

TEST(LoadDataset, RoundTripIsExact)
{
    TempDir dir;
    for (const Dataset& ds : {gen_delayed_xor(7, 9, 2, 0.3, 5), gen_narma10(4, 15, 6),
                              gen_standin(5, 4, 3, TaskKind::regression, 2, 7)}) {
        const auto manifest = dir.path() / to_string(ds.task) / std::to_string(ds.size()) / "m.json";
        save_dataset(ds, manifest);
        EXPECT_EQ(load_dataset(manifest), ds);
    }
}

TEST(LoadDataset, Errors)
{
    TempDir dir;
    const auto m = dir.path() / "manifest.json";
    EXPECT_NE(error_of([&] { load_dataset(m); }).find(m.string()), std::string::npos);

    write_text(m, R"({"format":"ringres-manifest","version":1,"task":"classification",
                      "channels":1,"classes":2,"samples":[]})");
    EXPECT_NE(error_of([&] { load_dataset(m); }).find("no samples"), std::string::npos);

    write_text(m, R"({"format":"ringres-manifest","version":1,"task":"ranking",
                      "channels":1,"classes":2,"samples":[]})");
    EXPECT_NE(error_of([&] { load_dataset(m); }).find("ranking"), std::string::npos);

    write_text(dir.path() / "s" / "0.csv", "1,2\n3,4\n");
    write_text(dir.path() / "s" / "1.csv", "1\n3\n");
    write_text(m, R"({"format":"ringres-manifest","version":1,"task":"classification","channels":2,
                      "classes":2,"samples":[{"series":"s/0.csv","label":0},{"series":"s/1.csv","label":1}]})");
    EXPECT_NE(error_of([&] { load_dataset(m); }).find("1.csv"), std::string::npos);

    write_text(m, R"({"format":"ringres-manifest","version":1,"task":"classification","channels":2,
                      "classes":2,"samples":[{"series":"s/missing.csv","label":0}]})");
    EXPECT_NE(error_of([&] { load_dataset(m); }).find("missing.csv"), std::string::npos);

    write_text(dir.path() / "s" / "ragged.csv", "1,2\n3\n");
    write_text(m, R"({"format":"ringres-manifest","version":1,"task":"classification","channels":2,
                      "classes":2,"samples":[{"series":"s/ragged.csv","label":0}]})");
    EXPECT_NE(error_of([&] { load_dataset(m); }).find("ragged.csv"), std::string::npos);

    write_text(m, "{not json");
    EXPECT_NE(error_of([&] { load_dataset(m); }).find(m.string()), std::string::npos);

    write_text(m, R"({"format":"ringres-manifest","version":7})");
    EXPECT_NE(error_of([&] { load_dataset(m); }).find("version"), std::string::npos);
}

TEST(NormalizeChannels, AffineMap)
{
    const Dataset ds = normalize_channels(one_channel({0, 5, 10}));
    EXPECT_EQ(ds.samples[0].series(0, 0), -1.0);
    EXPECT_EQ(ds.samples[1].series(0, 0), 0.0);
    EXPECT_EQ(ds.samples[2].series(0, 0), 1.0);
    ASSERT_TRUE(ds.bounds.has_value());
    EXPECT_EQ(ds.bounds->min[0], 0.0);
    EXPECT_EQ(ds.bounds->max[0], 10.0);
}

TEST(NormalizeChannels, FullRangeIsFixedPoint)
{
    const Dataset in = one_channel({-1, -0.3, 0.25, 0.9, 1});
    const Dataset out = normalize_channels(in);
    for (std::size_t i = 0; i < in.size(); ++i)
        EXPECT_NEAR(out.samples[i].series(0, 0), in.samples[i].series(0, 0), 1e-12);
}

TEST(NormalizeChannels, ConstantChannelMapsToZero)
{
    const Dataset out = normalize_channels(one_channel({7.3, 7.3, 7.3}));
    for (const auto& s : out.samples) EXPECT_EQ(s.series(0, 0), 0.0);
}

TEST(NormalizeChannels, EveryChannelSpansUnitInterval)
{
    const Dataset out = normalize_channels(gen_standin(10, 6, 4, TaskKind::classification, 2, 3));
    for (std::size_t c = 0; c < 4; ++c) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& s : out.samples)
            for (std::size_t t = 0; t < s.series.rows(); ++t) {
                lo = std::min(lo, s.series(t, c));
                hi = std::max(hi, s.series(t, c));
            }
        EXPECT_EQ(lo, -1.0);
        EXPECT_NEAR(hi, 1.0, 1e-15);
    }
}

TEST(NormalizeChannels, TestSplitUsesTrainBounds)
{
    const Dataset train = one_channel({0, 10});
    const Dataset test = one_channel({-5, 20});
    const Dataset mapped = apply_channel_bounds(test, fit_channel_bounds(train));
    EXPECT_EQ(mapped.samples[0].series(0, 0), -2.0);
    EXPECT_EQ(mapped.samples[1].series(0, 0), 3.0);
}

TEST(Split, Counts)
{
    Dataset reg{TaskKind::regression, 1, 0, 1, {}, {}};
    for (int i = 0; i < 100; ++i) reg.samples.push_back({Matrix(1, 1, i), 0, {double(i)}});
    const auto [train, test] = split(reg, 0.8, 1);
    EXPECT_EQ(train.size(), 80u);
    EXPECT_EQ(test.size(), 20u);
}

TEST(Split, StratifiedPerClass)
{
    const auto [train, test] = split(balanced(100, 10), 0.8, 4);
    std::vector<int> tr(10), te(10);
    for (auto l : labels(train)) ++tr[l];
    for (auto l : labels(test)) ++te[l];
    for (int c = 0; c < 10; ++c) {
        EXPECT_EQ(tr[c], 8);
        EXPECT_EQ(te[c], 2);
    }
}

TEST(Split, DeterministicDisjointAndComplete)
{
    const Dataset ds = balanced(37, 3);
    const auto a = split(ds, 0.7, 9);
    const auto b = split(ds, 0.7, 9);
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);
    std::multiset<double> seen;
    for (const auto* part : {&a.first, &a.second})
        for (const auto& s : part->samples) seen.insert(s.series(0, 0));
    EXPECT_EQ(seen.size(), 37u);
    EXPECT_EQ(std::set<double>(seen.begin(), seen.end()).size(), 37u);
    const auto c = split(ds, 0.7, 10);
    EXPECT_NE(a.first, c.first);
}

TEST(Split, Errors)
{
    Dataset ds = balanced(10, 2);
    EXPECT_THROW(split(ds, 0.0, 1), std::invalid_argument);
    EXPECT_THROW(split(ds, 1.0, 1), std::invalid_argument);
    ds.num_classes = 3;
    ds.samples.push_back({Matrix(3, 1), 2, {}});
    EXPECT_NE(error_of([&] { split(ds, 0.8, 1); }).find("class 2"), std::string::npos);
}

TEST(NormalizeLength, Policies)
{
    Dataset ds{TaskKind::classification, 2, 2, 1, {}, {}};
    ds.samples.push_back({Matrix(5, 2, 1.0), 0, {}});
    ds.samples.push_back({Matrix(7, 2, 2.0), 1, {}});

    const Dataset t = normalize_length(ds, LengthPolicy::parse("truncate"));
    for (const auto& s : t.samples) EXPECT_EQ(s.series.rows(), 5u);
    EXPECT_EQ(t.samples[1].series, Matrix(5, 2, 2.0));

    const Dataset p = normalize_length(ds, LengthPolicy::parse("pad"));
    for (const auto& s : p.samples) EXPECT_EQ(s.series.rows(), 7u);
    for (std::size_t r = 5; r < 7; ++r)
        for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(p.samples[0].series(r, c), 0.0);
    EXPECT_EQ(p.samples[0].series(4, 1), 1.0);

    const Dataset f = normalize_length(ds, LengthPolicy::parse("fixed:6"));
    for (const auto& s : f.samples) EXPECT_EQ(s.series.rows(), 6u);

    Dataset equal = ds;
    equal.samples[1].series = Matrix(5, 2, 2.0);
    for (const char* policy : {"truncate", "pad"})
        EXPECT_EQ(normalize_length(equal, LengthPolicy::parse(policy)), equal);
}

TEST(NormalizeLength, Errors)
{
    EXPECT_THROW(normalize_length(balanced(4, 2), LengthPolicy::parse("fixed:0")), std::invalid_argument);
    EXPECT_THROW(normalize_length(balanced(4, 2), LengthPolicy::parse("fixed:-3")), std::invalid_argument);
    EXPECT_THROW(LengthPolicy::parse("fixed:x"), std::invalid_argument);
    EXPECT_THROW(LengthPolicy::parse("stretch"), std::invalid_argument);
    EXPECT_EQ(LengthPolicy::parse("fixed:12").str(), "fixed:12");
}

TEST(DelayedXor, NoiselessLabelsAreXorOfPulses)
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Dataset ds = gen_delayed_xor(50, 6, 1, 0.0, seed);
        for (const auto& s : ds.samples) {
            const auto a = static_cast<std::size_t>(s.series(0, 0));
            const auto b = static_cast<std::size_t>(s.series(1, 0));
            EXPECT_EQ(s.label, a ^ b);
            for (std::size_t t = 2; t < 6; ++t) EXPECT_EQ(s.series(t, 0), 0.0);
        }
    }
}

TEST(DelayedXor, BalancedAndDeterministic)
{
    const Dataset ds = gen_delayed_xor(41, 20, 3, 0.05, 8);
    std::size_t ones = 0;
    for (auto l : labels(ds)) ones += l;
    EXPECT_LE(std::abs(static_cast<long>(ones) - static_cast<long>(ds.size() - ones)), 1);
    EXPECT_EQ(ds, gen_delayed_xor(41, 20, 3, 0.05, 8));
    EXPECT_NE(ds, gen_delayed_xor(41, 20, 3, 0.05, 9));
    for (const auto& s : ds.samples)
        for (std::size_t t = 1; t < 20; ++t)
            if (t != 3) {
                EXPECT_LE(std::abs(s.series(t, 0)), 0.05);
            }
    EXPECT_THROW(gen_delayed_xor(4, 3, 3, 0.0, 1), std::invalid_argument);
}

TEST(Narma10, ZeroInputApproachesFixedPoint)
{
    // With u = 0 the window sum is 10y, so the fixed point solves 0.5y² − 0.7y + 0.1 = 0.
    const Vector y = narma10_response(Vector(400, 0.0));
    EXPECT_NEAR(y.back(), 0.16148351928654963, 1e-10);
}

TEST(Narma10, RecurrenceByHand)
{
    Vector u(12);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.01 * static_cast<double>(i + 1);
    const Vector y = narma10_response(u);
    EXPECT_EQ(y[10], 1.5 * u[0] * u[9] + 0.1);
    const double y11 = 0.3 * y[10] + 0.05 * y[10] * y[10] + 1.5 * u[1] * u[10] + 0.1;
    EXPECT_DOUBLE_EQ(y[11], y11);
}

TEST(Narma10, DeterministicAndInRange)
{
    const Dataset ds = gen_narma10(20, 50, 3);
    EXPECT_EQ(ds, gen_narma10(20, 50, 3));
    EXPECT_EQ(ds.task, TaskKind::regression);
    for (const auto& s : ds.samples) {
        EXPECT_EQ(s.series.rows(), 50u);
        for (double v : s.series.values()) {
            EXPECT_GE(v, 0.0);
            EXPECT_LT(v, 0.5);
        }
        EXPECT_EQ(s.target.size(), 1u);
        EXPECT_TRUE(std::isfinite(s.target[0]));
    }
    EXPECT_THROW(gen_narma10(2, 10, 1), std::invalid_argument);
}

TEST(Standin, ShapesMatchRequest)
{
    const Dataset c = gen_standin(20, 8, 16, TaskKind::classification, 9, 1);
    EXPECT_EQ(c.channels, 16u);
    EXPECT_EQ(c.num_classes, 9u);
    EXPECT_NO_THROW(validate(c));
    const Dataset r = gen_standin(20, 134, 40, TaskKind::regression, 1, 1);
    EXPECT_EQ(r.target_dim, 1u);
    EXPECT_EQ(r.samples[3].series.rows(), 134u);
    EXPECT_EQ(target_matrix(r).cols(), 1u);
    EXPECT_EQ(target_matrix(c).cols(), 9u);
}
