// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * \file mmfa/model.hpp
 *
 * \brief Downlink network data model and SINR evaluation.
 *
 * A network has N base stations (BSs) and K single-antenna users. Channel
 * gains are stored linear in an N x K matrix, gain(n, k) being the power gain
 * from BS n to user k. A zero gain encodes an absent link; associating a user
 * across such a link is a structural error.
 */

#ifndef MMFA_MODEL_HPP
#define MMFA_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmfa {

/// Dimension mismatch, invalid data or an association across a missing link.
class structural_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// No feasible solution exists for the requested problem.
class infeasible_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
class Matrix
{
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (data_.size() != rows_ * cols_)
            throw structural_error("matrix data size does not match its shape");
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept
    {
        return {data_.data() + r * cols_, cols_};
    }

    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Channel gains, per-BS budgets and noise powers (all linear scale).
struct Network
{
    Matrix gain;                  ///< N x K, gain(n, k) >= 0
    std::vector<double> budget;   ///< per-BS maximum transmit power, > 0
    std::vector<double> noise_dl; ///< per-user receive noise, > 0
    std::vector<double> noise_ul; ///< per-BS receive noise, > 0

    [[nodiscard]] std::size_t n_bs() const noexcept { return gain.rows(); }
    [[nodiscard]] std::size_t n_users() const noexcept { return gain.cols(); }

    friend bool operator==(const Network&, const Network&) = default;
};

/// assoc[k] is the BS serving user k.
using Association = std::vector<std::size_t>;

/// power[k] is the power spent by BS assoc[k] on user k.
using PowerVector = std::vector<double>;

/// Output of every solver in the library.
struct SolveResult
{
    Association association;
    PowerVector power;
    std::vector<double> sinr;
    double min_sinr = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<double> trace; ///< per-iteration residuals, filled on request
};

/// Throws structural_error unless the network satisfies every data invariant.
inline void validate(const Network& net)
{
    const auto n = net.n_bs();
    const auto k = net.n_users();
    if (n == 0 || k == 0)
        throw structural_error("network must have at least one BS and one user");
    if (net.budget.size() != n || net.noise_ul.size() != n)
        throw structural_error("budget/noise_ul length must equal n_bs");
    if (net.noise_dl.size() != k)
        throw structural_error("noise_dl length must equal n_users");
    for (double b : net.budget)
        if (!(b > 0.0) || !std::isfinite(b))
            throw structural_error("budgets must be finite and strictly positive");
    for (double s : net.noise_dl)
        if (!(s > 0.0) || !std::isfinite(s))
            throw structural_error("noise_dl must be finite and strictly positive");
    for (double s : net.noise_ul)
        if (!(s > 0.0) || !std::isfinite(s))
            throw structural_error("noise_ul must be finite and strictly positive");
    for (double g : net.gain.data())
        if (!(g >= 0.0) || !std::isfinite(g))
            throw structural_error("gains must be finite and non-negative");
    for (std::size_t u = 0; u < k; ++u) {
        bool linked = false;
        for (std::size_t b = 0; b < n && !linked; ++b)
            linked = net.gain(b, u) > 0.0;
        if (!linked)
            throw structural_error("user " + std::to_string(u) + " has no BS with positive gain");
    }
}

/// Throws structural_error unless assoc is a valid association for net.
inline void validate(const Network& net, const Association& assoc)
{
    if (assoc.size() != net.n_users())
        throw structural_error("association length must equal n_users");
    for (std::size_t k = 0; k < assoc.size(); ++k) {
        if (assoc[k] >= net.n_bs())
            throw structural_error("association index out of range for user " + std::to_string(k));
        if (!(net.gain(assoc[k], k) > 0.0))
            throw structural_error("user " + std::to_string(k) + " associated across a zero-gain link");
    }
}

inline void validate_power(const Network& net, std::span<const double> power)
{
    if (power.size() != net.n_users())
        throw structural_error("power length must equal n_users");
    for (double p : power)
        if (!(p >= 0.0) || !std::isfinite(p))
            throw structural_error("powers must be finite and non-negative");
}

/// Users served by each BS, in increasing user order.
inline std::vector<std::vector<std::size_t>> serving_sets(const Association& assoc, std::size_t n_bs)
{
    std::vector<std::vector<std::size_t>> sets(n_bs);
    for (std::size_t k = 0; k < assoc.size(); ++k) {
        if (assoc[k] >= n_bs)
            throw structural_error("association index out of range");
        sets[assoc[k]].push_back(k);
    }
    return sets;
}

/// Number of users served by each BS.
inline std::vector<std::size_t> bs_loads(const Association& assoc, std::size_t n_bs)
{
    std::vector<std::size_t> load(n_bs, 0);
    for (auto a : assoc)
        ++load.at(a);
    return load;
}

/// Total power transmitted by each BS.
inline std::vector<double> bs_power(const Association& assoc, std::span<const double> power, std::size_t n_bs)
{
    std::vector<double> sum(n_bs, 0.0);
    for (std::size_t k = 0; k < assoc.size(); ++k)
        sum[assoc[k]] += power[k];
    return sum;
}

namespace detail {

inline double ratio_or_zero(double num, double den) noexcept
{
    return num == 0.0 ? 0.0 : num / den;
}

/// Interference at user k: other BSs at full served power plus co-served users of a_k.
inline double dl_interference(const Network& net, const Association& assoc, std::span<const double> power,
                              std::span<const double> per_bs, std::size_t k) noexcept
{
    double sum = 0.0;
    for (std::size_t n = 0; n < per_bs.size(); ++n) {
        if (n == assoc[k])
            sum += (per_bs[n] - power[k]) * net.gain(n, k);
        else if (per_bs[n] != 0.0)
            sum += per_bs[n] * net.gain(n, k);
    }
    return std::max(0.0, sum);
}

} // namespace detail

/**
 * Downlink SINR of every user. Interference at user k includes users
 * co-served by the same BS: p_i g(a_i, k) for every i != k.
 */
inline std::vector<double> downlink_sinr(const Network& net, const Association& assoc, std::span<const double> power)
{
    validate(net, assoc);
    validate_power(net, power);
    const auto per_bs = bs_power(assoc, power, net.n_bs());
    std::vector<double> sinr(net.n_users());
    for (std::size_t k = 0; k < sinr.size(); ++k) {
        const double signal = power[k] * net.gain(assoc[k], k);
        const double interference = detail::dl_interference(net, assoc, power, per_bs, k);
        sinr[k] = detail::ratio_or_zero(signal, net.noise_dl[k] + interference);
    }
    return sinr;
}

/// Uplink SINR: user k is received at BS a_k with noise noise_ul[a_k].
inline std::vector<double> uplink_sinr(const Network& net, const Association& assoc, std::span<const double> power)
{
    validate(net, assoc);
    validate_power(net, power);
    std::vector<double> sinr(net.n_users());
    for (std::size_t k = 0; k < sinr.size(); ++k) {
        const auto n = assoc[k];
        auto g = net.gain.row(n);
        double interference = 0.0;
        for (std::size_t j = 0; j < power.size(); ++j)
            if (j != k)
                interference += g[j] * power[j];
        sinr[k] = detail::ratio_or_zero(g[k] * power[k], net.noise_ul[n] + interference);
    }
    return sinr;
}

inline double min_of(std::span<const double> v)
{
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

/// Each user picks the BS with the largest receive SNR g(n, k) * budget(n); ties go to the lowest index.
inline Association max_snr_association(const Network& net)
{
    validate(net);
    Association assoc(net.n_users(), 0);
    for (std::size_t k = 0; k < net.n_users(); ++k) {
        double best = -1.0;
        for (std::size_t n = 0; n < net.n_bs(); ++n) {
            const double snr = net.gain(n, k) * net.budget[n];
            if (snr > best) {
                best = snr;
                assoc[k] = n;
            }
        }
    }
    return assoc;
}

/// Fills sinr and min_sinr of a result from its association and power.
inline void evaluate_downlink(const Network& net, SolveResult& r)
{
    r.sinr = downlink_sinr(net, r.association, r.power);
    r.min_sinr = min_of(r.sinr);
}

/// True when a has no repeated BS (each BS serves at most one user).
inline bool is_one_to_one(const Association& a, std::size_t n_bs)
{
    const auto load = bs_loads(a, n_bs);
    return std::all_of(load.begin(), load.end(), [](std::size_t l) { return l <= 1; });
}

inline Network make_network(Matrix gain, std::vector<double> budget, std::vector<double> noise_dl,
                            std::vector<double> noise_ul)
{
    Network net{std::move(gain), std::move(budget), std::move(noise_dl), std::move(noise_ul)};
    validate(net);
    return net;
}

/// Network with scalar budgets and scalar noise on both directions.
inline Network make_network(Matrix gain, double budget = 1.0, double noise = 1.0)
{
    const auto n = gain.rows();
    const auto k = gain.cols();
    return make_network(std::move(gain), std::vector<double>(n, budget), std::vector<double>(k, noise),
                        std::vector<double>(n, noise));
}

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace mmfa

#endif // MMFA_MODEL_HPP
