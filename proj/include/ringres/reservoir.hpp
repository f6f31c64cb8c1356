#pragma once

// A single leaky echo state reservoir. //

#include "linalg.hpp"
#include "random.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ringres {

struct ReservoirConfig {
    std::size_t size = 100;      ///< neurons N
    std::size_t input_dim = 1;   ///< input channels A
    double leak_rate = 0.05;     ///< α in (0, 1]
    double spectral_target = 0.1;
    double input_scale = 1.0;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (size < 1) throw std::invalid_argument("reservoir: size must be >= 1");
        if (input_dim < 1) throw std::invalid_argument("reservoir: input_dim must be >= 1");
        if (!(leak_rate > 0.0 && leak_rate <= 1.0))
            throw std::invalid_argument("reservoir: leak_rate must lie in (0, 1]");
        if (!(spectral_target > 0.0))
            throw std::invalid_argument("reservoir: spectral_target must be > 0");
        if (!(input_scale > 0.0)) throw std::invalid_argument("reservoir: input_scale must be > 0");
    }

    friend bool operator==(const ReservoirConfig&, const ReservoirConfig&) = default;
};

/// Fixed random weights of one reservoir. Immutable once built.
struct Reservoir {
    ReservoirConfig config;
    Matrix w_in;   ///< N × A
    Matrix w_rec;  ///< N × N

    friend bool operator==(const Reservoir&, const Reservoir&) = default;
};

inline Matrix random_uniform(std::size_t rows, std::size_t cols, double bound, Rng& rng)
{
    Matrix m(rows, cols);
    for (double& v : m.values()) v = rng.uniform(-bound, bound);
    return m;
}

/// Draws W_in uniform on ±input_scale and W_rec uniform on ±1 rescaled to the spectral target.
inline Reservoir init_reservoir(const ReservoirConfig& config)
{
    config.validate();
    Rng rng{config.seed};
    Reservoir res{config, {}, {}};
    res.w_in = random_uniform(config.size, config.input_dim, config.input_scale, rng);
    Matrix rec = random_uniform(config.size, config.size, 1.0, rng);
    // A uniform draw of all zeros is practically impossible, but N = 1 can land near it.
    while (frobenius_norm(rec) == 0.0) rec = random_uniform(config.size, config.size, 1.0, rng);
    res.w_rec = scale_to_radius(rec, config.spectral_target);
    return res;
}

/// Leaky update x' = (1 − α)x + α·tanh(W_in u + W_rec x), written into `out`.
inline void step_into(const Reservoir& res, std::span<const double> x, std::span<const double> u,
                      std::span<double> out)
{
    const std::size_t n = res.config.size;
    if (x.size() != n)
        throw std::invalid_argument(
          "reservoir step: state length " + std::to_string(x.size()) + " != " + std::to_string(n));
    if (u.size() != res.config.input_dim)
        throw std::invalid_argument(
          "reservoir step: input length " + std::to_string(u.size()) + " != "
          + std::to_string(res.config.input_dim));
    const double a = res.config.leak_rate;
    for (std::size_t i = 0; i < n; ++i) {
        const double pre = dot(res.w_in.row(i), u) + dot(res.w_rec.row(i), x);
        out[i] = (1.0 - a) * x[i] + a * std::tanh(pre);
    }
}

inline Vector step(const Reservoir& res, std::span<const double> x, std::span<const double> u)
{
    Vector out(res.config.size);
    step_into(res, x, u, out);
    return out;
}

namespace detail {

inline void check_strides(const Matrix& sequence, std::size_t frame_stride, std::size_t state_stride)
{
    if (sequence.rows() == 0) throw std::invalid_argument("harvest: empty sequence");
    if (frame_stride < 1 || state_stride < 1)
        throw std::invalid_argument("harvest: strides must be >= 1");
}

/// Rows collected from a sequence of `frames` rows driven with the given strides.
inline std::size_t harvested_rows(std::size_t frames, std::size_t frame_stride,
                                  std::size_t state_stride)
{
    const std::size_t driven = (frames + frame_stride - 1) / frame_stride;
    return (driven + state_stride - 1) / state_stride;
}

} // namespace detail

inline std::size_t harvested_rows(std::size_t frames, std::size_t frame_stride,
                                  std::size_t state_stride)
{
    return detail::harvested_rows(frames, frame_stride, state_stride);
}

/// Drives the reservoir from the zero state with frames 0, fs, 2fs, … of `sequence`
/// (T × A) and returns the post-update states at driven steps 0, ss, 2ss, … as rows.
inline Matrix harvest(const Reservoir& res, const Matrix& sequence, std::size_t frame_stride = 1,
                      std::size_t state_stride = 1)
{
    detail::check_strides(sequence, frame_stride, state_stride);
    if (sequence.cols() != res.config.input_dim)
        throw std::invalid_argument(
          "harvest: sequence has " + std::to_string(sequence.cols()) + " channels, reservoir expects "
          + std::to_string(res.config.input_dim));
    const std::size_t n = res.config.size;
    Matrix out(detail::harvested_rows(sequence.rows(), frame_stride, state_stride), n);
    Vector x(n, 0.0), next(n);
    std::size_t driven = 0, collected = 0;
    for (std::size_t t = 0; t < sequence.rows(); t += frame_stride, ++driven) {
        step_into(res, x, sequence.row(t), next);
        x.swap(next);
        if (driven % state_stride == 0) std::copy(x.begin(), x.end(), out.row(collected++).begin());
    }
    return out;
}

} // namespace ringres
