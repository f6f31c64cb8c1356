#pragma once

// Parallel sub-reservoirs on a ring, coupled through one shared cross-talk matrix. //

#include "reservoir.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringres {

struct RingConfig {
    std::size_t num_subs = 1;     ///< R
    std::size_t sub_size = 100;   ///< neurons per sub-reservoir
    std::size_t input_dim = 1;
    double beta = 0.0;            ///< cross-talk strength
    bool ring_enabled = true;
    double leak_rate = 0.05;      ///< shared by all sub-reservoirs
    double spectral_target = 0.1;
    double input_scale = 1.0;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (num_subs < 1) throw std::invalid_argument("ring: number of sub-reservoirs must be >= 1");
        if (!(beta >= 0.0)) throw std::invalid_argument("ring: beta must be >= 0");
        sub_config(0).validate();
    }

    /// Config of sub-reservoir `r`, seeded from the master seed.
    ReservoirConfig sub_config(std::size_t r) const
    {
        return {sub_size, input_dim, leak_rate, spectral_target, input_scale, derive_seed(seed, r)};
    }

    std::uint64_t shared_seed() const noexcept { return derive_seed(mix64(~seed), 0); }

    bool coupled() const noexcept { return ring_enabled && beta != 0.0; }

    friend bool operator==(const RingConfig&, const RingConfig&) = default;
};

struct RingEnsemble {
    RingConfig config;
    std::vector<Reservoir> subs;
    Matrix w_shared;  ///< sub_size × sub_size, one for the whole ring

    std::size_t state_size() const noexcept { return config.num_subs * config.sub_size; }

    friend bool operator==(const RingEnsemble&, const RingEnsemble&) = default;
};

using RingState = std::vector<Vector>;

inline RingState zero_ring_state(const RingEnsemble& ens)
{
    return RingState(ens.config.num_subs, Vector(ens.config.sub_size, 0.0));
}

inline RingEnsemble init_ring(const RingConfig& config)
{
    config.validate();
    RingEnsemble ens{config, {}, {}};
    ens.subs.reserve(config.num_subs);
    for (std::size_t r = 0; r < config.num_subs; ++r)
        ens.subs.push_back(init_reservoir(config.sub_config(r)));
    Rng rng{config.shared_seed()};
    Matrix shared = random_uniform(config.sub_size, config.sub_size, 1.0, rng);
    while (frobenius_norm(shared) == 0.0)
        shared = random_uniform(config.sub_size, config.sub_size, 1.0, rng);
    ens.w_shared = scale_to_radius(shared, config.spectral_target);
    return ens;
}

inline std::size_t ring_left(std::size_t r, std::size_t num_subs) noexcept
{
    return (r + num_subs - 1) % num_subs;
}

inline std::size_t ring_right(std::size_t r, std::size_t num_subs) noexcept
{
    return (r + 1) % num_subs;
}

namespace detail {

inline void check_ring_state(const RingEnsemble& ens, const RingState& state)
{
    if (state.size() != ens.config.num_subs)
        throw std::invalid_argument(
          "ring: state has " + std::to_string(state.size()) + " sub-states, ensemble has "
          + std::to_string(ens.config.num_subs));
    for (const auto& x : state)
        if (x.size() != ens.config.sub_size)
            throw std::invalid_argument("ring: sub-state length does not match sub_size");
}

inline Vector shared_drive(const RingEnsemble& ens, std::span<const double> x)
{
    Vector s = matvec(ens.w_shared, x);
    for (double& v : s) v = std::tanh(v);
    return s;
}

} // namespace detail

/// β·(tanh(W_shared x_{r−1}) + tanh(W_shared x_{r+1})), neighbors taken modulo R.
inline Vector ring_delta(const RingEnsemble& ens, const RingState& state, std::size_t r)
{
    detail::check_ring_state(ens, state);
    const std::size_t R = ens.config.num_subs;
    if (r >= R)
        throw std::out_of_range(
          "ring_delta: index " + std::to_string(r) + " out of range for " + std::to_string(R)
          + " sub-reservoirs");
    const Vector left = detail::shared_drive(ens, state[ring_left(r, R)]);
    const Vector right = detail::shared_drive(ens, state[ring_right(r, R)]);
    Vector d(ens.config.sub_size);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = ens.config.beta * (left[i] + right[i]);
    return d;
}

/// One synchronous ring update: every sub reads only the previous state.
/// The cross-talk term is added after the leaky update, outside both α and tanh.
inline RingState step_ring(const RingEnsemble& ens, const RingState& state, std::span<const double> u)
{
    detail::check_ring_state(ens, state);
    const std::size_t R = ens.config.num_subs;
    RingState next(R, Vector(ens.config.sub_size));
    for (std::size_t r = 0; r < R; ++r) step_into(ens.subs[r], state[r], u, next[r]);
    if (!ens.config.ring_enabled) return next;

    std::vector<Vector> drive(R);
    for (std::size_t r = 0; r < R; ++r) drive[r] = detail::shared_drive(ens, state[r]);
    const double beta = ens.config.beta;
    for (std::size_t r = 0; r < R; ++r) {
        const Vector& left = drive[ring_left(r, R)];
        const Vector& right = drive[ring_right(r, R)];
        for (std::size_t i = 0; i < ens.config.sub_size; ++i)
            next[r][i] += beta * (left[i] + right[i]);
    }
    return next;
}

/// As harvest(), with each row the concatenation [x_1; …; x_R] of length R·sub_size.
inline Matrix harvest_ring(const RingEnsemble& ens, const Matrix& sequence,
                           std::size_t frame_stride = 1, std::size_t state_stride = 1)
{
    detail::check_strides(sequence, frame_stride, state_stride);
    if (sequence.cols() != ens.config.input_dim)
        throw std::invalid_argument(
          "harvest_ring: sequence has " + std::to_string(sequence.cols())
          + " channels, ensemble expects " + std::to_string(ens.config.input_dim));
    const std::size_t sub = ens.config.sub_size;
    Matrix out(detail::harvested_rows(sequence.rows(), frame_stride, state_stride),
               ens.state_size());
    RingState state = zero_ring_state(ens);
    std::size_t driven = 0, collected = 0;
    for (std::size_t t = 0; t < sequence.rows(); t += frame_stride, ++driven) {
        state = step_ring(ens, state, sequence.row(t));
        if (driven % state_stride == 0) {
            auto row = out.row(collected++);
            for (std::size_t r = 0; r < state.size(); ++r)
                std::copy(state[r].begin(), state[r].end(), row.begin() + r * sub);
        }
    }
    return out;
}

/// Recurrent weights held by the ring: R sub-reservoir matrices plus the shared matrix.
constexpr std::uint64_t ring_recurrent_parameters(std::uint64_t num_subs, std::uint64_t sub_size)
{
    return num_subs * sub_size * sub_size + sub_size * sub_size;
}

constexpr std::uint64_t single_recurrent_parameters(std::uint64_t size) { return size * size; }

} // namespace ringres
