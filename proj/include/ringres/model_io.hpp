#pragma once

// Versioned binary model files. Doubles are stored as their raw IEEE-754 bits,
// so every round trip is bit-exact.
//
// Layout: 8-byte magic "RINGRES\0", u32 format version, u32 payload kind, then
// the payload as a sequence of little-endian u64 / f64 / length-prefixed fields.

#include "errors.hpp"
#include "readout.hpp"
#include "ring.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

namespace ringres {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

inline constexpr std::string_view model_magic{"RINGRES\0", 8};
inline constexpr std::uint32_t model_format_version = 1;

enum class PayloadKind : std::uint32_t {
    reservoir = 1,
    ring = 2,
    readout_net = 3,
    linear_readout = 4,
    trained_model = 5,
};

class ByteWriter {
public:
    explicit ByteWriter(PayloadKind kind)
    {
        buf_.append(model_magic);
        u32(model_format_version);
        u32(static_cast<std::uint32_t>(kind));
    }

    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void boolean(bool v) { u64(v ? 1 : 0); }

    void str(std::string_view s)
    {
        u64(s.size());
        buf_.append(s);
    }

    void vec(std::span<const double> v)
    {
        u64(v.size());
        raw(v.data(), v.size() * sizeof(double));
    }

    void mat(const Matrix& m)
    {
        u64(m.rows());
        u64(m.cols());
        raw(m.values().data(), m.size() * sizeof(double));
    }

    const std::string& bytes() const noexcept { return buf_; }
    std::string take() noexcept { return std::move(buf_); }

private:
    void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
    std::string buf_;
};

class ByteReader {
public:
    ByteReader(std::string_view bytes, PayloadKind expected) : bytes_{bytes}
    {
        if (bytes_.size() < 16 || bytes_.substr(0, 8) != model_magic)
            throw format_error("not a ringres model file (bad magic)");
        pos_ = 8;
        const auto version = u32();
        if (version != model_format_version)
            throw format_error(
              "unsupported model format version " + std::to_string(version) + " (expected "
              + std::to_string(model_format_version) + ")");
        kind_ = static_cast<PayloadKind>(u32());
        if (kind_ != expected)
            throw format_error(
              "model file holds payload kind " + std::to_string(static_cast<std::uint32_t>(kind_))
              + ", expected " + std::to_string(static_cast<std::uint32_t>(expected)));
    }

    std::uint32_t u32() { return pod<std::uint32_t>(); }
    std::uint64_t u64() { return pod<std::uint64_t>(); }
    double f64() { return pod<double>(); }
    bool boolean()
    {
        const auto v = u64();
        if (v > 1) throw format_error("corrupt model file: bad boolean");
        return v == 1;
    }

    std::size_t count(std::size_t elem_size = 1)
    {
        const auto n = u64();
        if (n > (bytes_.size() - pos_) / elem_size)
            throw format_error("corrupt model file: length field exceeds file size");
        return static_cast<std::size_t>(n);
    }

    std::string str()
    {
        const auto n = count();
        std::string s{bytes_.substr(pos_, n)};
        pos_ += n;
        return s;
    }

    Vector vec()
    {
        const auto n = count(sizeof(double));
        Vector v(n);
        take(v.data(), n * sizeof(double));
        return v;
    }

    Matrix mat()
    {
        const auto rows = u64();
        const auto cols = count(1);
        if (cols != 0 && rows > (bytes_.size() - pos_) / sizeof(double) / cols)
            throw format_error("corrupt model file: matrix exceeds file size");
        Vector data(static_cast<std::size_t>(rows) * cols);
        take(data.data(), data.size() * sizeof(double));
        return Matrix(static_cast<std::size_t>(rows), cols, std::move(data));
    }

    void finish() const
    {
        if (pos_ != bytes_.size()) throw format_error("corrupt model file: trailing bytes");
    }

private:
    template <typename T>
    T pod()
    {
        T v;
        take(&v, sizeof v);
        return v;
    }

    void take(void* out, std::size_t n)
    {
        if (n > bytes_.size() - pos_) throw format_error("corrupt model file: truncated");
        std::memcpy(out, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
    PayloadKind kind_{};
};

// ---------------------------------------------------------------------------
// Field encoders shared by the standalone payloads and the trained-model bundle

inline void encode(ByteWriter& w, const ReservoirConfig& c)
{
    w.u64(c.size);
    w.u64(c.input_dim);
    w.f64(c.leak_rate);
    w.f64(c.spectral_target);
    w.f64(c.input_scale);
    w.u64(c.seed);
}

inline void decode(ByteReader& r, ReservoirConfig& c)
{
    c.size = r.u64();
    c.input_dim = r.u64();
    c.leak_rate = r.f64();
    c.spectral_target = r.f64();
    c.input_scale = r.f64();
    c.seed = r.u64();
}

inline void encode(ByteWriter& w, const Reservoir& res)
{
    encode(w, res.config);
    w.mat(res.w_in);
    w.mat(res.w_rec);
}

inline void decode(ByteReader& r, Reservoir& res)
{
    decode(r, res.config);
    res.w_in = r.mat();
    res.w_rec = r.mat();
    if (res.w_in.rows() != res.config.size || res.w_in.cols() != res.config.input_dim
        || res.w_rec.rows() != res.config.size || !res.w_rec.square())
        throw format_error("corrupt model file: reservoir weight shapes disagree with config");
}

inline void encode(ByteWriter& w, const RingEnsemble& ens)
{
    const auto& c = ens.config;
    w.u64(c.num_subs);
    w.u64(c.sub_size);
    w.u64(c.input_dim);
    w.f64(c.beta);
    w.boolean(c.ring_enabled);
    w.f64(c.leak_rate);
    w.f64(c.spectral_target);
    w.f64(c.input_scale);
    w.u64(c.seed);
    for (const auto& s : ens.subs) encode(w, s);
    w.mat(ens.w_shared);
}

inline void decode(ByteReader& r, RingEnsemble& ens)
{
    auto& c = ens.config;
    c.num_subs = r.u64();
    c.sub_size = r.u64();
    c.input_dim = r.u64();
    c.beta = r.f64();
    c.ring_enabled = r.boolean();
    c.leak_rate = r.f64();
    c.spectral_target = r.f64();
    c.input_scale = r.f64();
    c.seed = r.u64();
    if (c.num_subs == 0 || c.num_subs > 1u << 20) throw format_error("corrupt model file: bad ring size");
    ens.subs.resize(c.num_subs);
    for (auto& s : ens.subs) {
        decode(r, s);
        if (s.config.size != c.sub_size || s.config.input_dim != c.input_dim)
            throw format_error("corrupt model file: sub-reservoir shape disagrees with ring config");
    }
    ens.w_shared = r.mat();
    if (ens.w_shared.rows() != c.sub_size || !ens.w_shared.square())
        throw format_error("corrupt model file: shared matrix shape");
}

inline void encode(ByteWriter& w, const ReadoutNet& net)
{
    w.u64(net.layers().size());
    for (const auto& l : net.layers()) {
        w.mat(l.weights);
        w.vec(l.bias);
        w.boolean(l.batch_norm);
        w.boolean(l.relu);
        w.vec(l.gamma);
        w.vec(l.shift);
        w.vec(l.running_mean);
        w.vec(l.running_var);
    }
}

inline void decode(ByteReader& r, ReadoutNet& net)
{
    const auto n = r.count(8);
    std::vector<DenseLayer> layers(n);
    for (auto& l : layers) {
        l.weights = r.mat();
        l.bias = r.vec();
        l.batch_norm = r.boolean();
        l.relu = r.boolean();
        l.gamma = r.vec();
        l.shift = r.vec();
        l.running_mean = r.vec();
        l.running_var = r.vec();
        const std::size_t bn = l.batch_norm ? l.out() : 0;
        if (l.bias.size() != l.out() || l.gamma.size() != bn || l.shift.size() != bn
            || l.running_mean.size() != bn || l.running_var.size() != bn)
            throw format_error("corrupt model file: readout layer parameter sizes");
    }
    try {
        net = ReadoutNet(std::move(layers));
    } catch (const std::invalid_argument& e) {
        throw format_error(std::string("corrupt model file: ") + e.what());
    }
    net.set_mode(Mode::inference);
}

inline void encode(ByteWriter& w, const LinearReadout& lin)
{
    w.mat(lin.weights);
    w.vec(lin.bias);
}

inline void decode(ByteReader& r, LinearReadout& lin)
{
    lin.weights = r.mat();
    lin.bias = r.vec();
    if (!lin.bias.empty() && lin.bias.size() != lin.weights.cols())
        throw format_error("corrupt model file: linear readout bias size");
}

// ---------------------------------------------------------------------------
// Standalone payloads

template <typename T>
constexpr PayloadKind payload_kind_of()
{
    if constexpr (std::is_same_v<T, Reservoir>) return PayloadKind::reservoir;
    else if constexpr (std::is_same_v<T, RingEnsemble>) return PayloadKind::ring;
    else if constexpr (std::is_same_v<T, ReadoutNet>) return PayloadKind::readout_net;
    else return PayloadKind::linear_readout;
}

template <typename T>
std::string serialize(const T& obj)
{
    ByteWriter w{payload_kind_of<T>()};
    encode(w, obj);
    return w.take();
}

template <typename T>
T deserialize(std::string_view bytes)
{
    ByteReader r{bytes, payload_kind_of<T>()};
    T obj;
    decode(r, obj);
    r.finish();
    return obj;
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace ringres
