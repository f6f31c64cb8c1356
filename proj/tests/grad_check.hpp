#pragma once

// Central finite-difference check of ReadoutNet::backward.

#include <ringres/readout.hpp>

#include <algorithm>
#include <cmath>

namespace gradcheck {

struct Result {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
};

/// |a − n| / max(|a|, |n|, floor). The floor keeps gradients that are zero by
/// construction (for example a bias feeding batch norm) from dividing round-off by zero.
inline double relative_error(double analytic, double numeric, double floor = 1e-6)
{
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

inline double objective(ringres::ReadoutNet& net, const ringres::Matrix& x, const ringres::Matrix& y,
                        const ringres::TrainConfig& cfg)
{
    net.forward(x, ringres::Mode::train);
    return net.backward(y, cfg).loss;
}

inline Result check(ringres::ReadoutNet net, const ringres::Matrix& x, const ringres::Matrix& y,
                    const ringres::TrainConfig& cfg, double h = 1e-5)
{
    net.forward(x, ringres::Mode::train);
    const auto analytic = net.backward(y, cfg).grads;
    Result r;
    auto params = net.parameters();
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t k = 0; k < params[t].size(); ++k) {
            const double saved = params[t][k];
            params[t][k] = saved + h;
            const double up = objective(net, x, y, cfg);
            params[t][k] = saved - h;
            const double down = objective(net, x, y, cfg);
            params[t][k] = saved;
            const double numeric = (up - down) / (2 * h);
            r.max_relative_error =
              std::max(r.max_relative_error, relative_error(analytic.tensors[t][k], numeric));
            ++r.checked;
        }
    }
    return r;
}

} // namespace gradcheck
