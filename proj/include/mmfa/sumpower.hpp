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
 * \file mmfa/sumpower.hpp
 *
 * \brief Sum-power relaxation solved on its uplink dual (ULSum).
 *
 * Replacing the per-BS budgets by a single pooled budget turns the joint
 * association/power problem into one whose uplink dual has a concave
 * fixed-point map
 *
 *   T_k(p) = min_n (noise_ul_n + sum_{j != k} g(n, j) p_j) / g(n, k),
 *
 * i.e. the least power user k needs for unit SINR at its best BS. Iterating
 * p <- T(p) * S / ||T(p)||_1 converges geometrically to the unique optimal
 * uplink power, and the minimizing BSs settle on an optimal association. With
 * equal noise the optimal value is also the downlink sum-power optimum, hence
 * an upper bound on the per-BS-budget problem.
 */

#ifndef MMFA_SUMPOWER_HPP
#define MMFA_SUMPOWER_HPP

#include <mmfa/model.hpp>
#include <mmfa/power.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace mmfa {

struct TMaps
{
    Matrix t_matrix;       ///< N x K, +inf where g(n, k) == 0
    std::vector<double> t; ///< per-user minimum over BSs
    Association a;         ///< argmin BS, lowest index on ties
};

/// Evaluates T_k^(n)(p), T_k(p) and A_k(p) for every user.
inline TMaps t_maps(const Network& net, std::span<const double> power)
{
    validate(net);
    validate_power(net, power);
    const auto n_bs = net.n_bs();
    const auto k_users = net.n_users();
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<double> rx(n_bs, 0.0);
    for (std::size_t n = 0; n < n_bs; ++n) {
        auto g = net.gain.row(n);
        for (std::size_t j = 0; j < k_users; ++j)
            rx[n] += g[j] * power[j];
    }

    TMaps out{Matrix(n_bs, k_users, inf), std::vector<double>(k_users, inf), Association(k_users, 0)};
    for (std::size_t k = 0; k < k_users; ++k) {
        for (std::size_t n = 0; n < n_bs; ++n) {
            const double g = net.gain(n, k);
            if (!(g > 0.0))
                continue;
            const double interference = std::max(0.0, rx[n] - g * power[k]);
            const double t = (net.noise_ul[n] + interference) / g;
            out.t_matrix(n, k) = t;
            if (t < out.t[k]) {
                out.t[k] = t;
                out.a[k] = n;
            }
        }
        if (!std::isfinite(out.t[k]))
            throw structural_error("user has no BS with positive gain");
    }
    return out;
}

struct UlsumResult
{
    PowerVector power_ul;
    Association assoc;
    double gamma_sum = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
    /// Last iteration at which a(t) changed (0 if it never did).
    std::size_t assoc_settled_at = 0;
    std::vector<double> trace;         ///< relative sup-norm residuals
    std::vector<double> hilbert_trace; ///< d_H(p(t+1), p(t)); contracts by at least kappa per step
};

/// Hilbert projective distance log(max_i x_i / y_i) - log(min_i x_i / y_i) of positive vectors.
inline double hilbert_distance(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.empty())
        throw structural_error("hilbert_distance needs equal non-empty vectors");
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw structural_error("hilbert_distance needs positive vectors");
        const double r = std::log(x[i] / y[i]);
        hi = std::max(hi, r);
        lo = std::min(lo, r);
    }
    return hi - lo;
}

inline double total_budget(const Network& net)
{
    return detail::sum(net.budget);
}

/**
 * ULSum: a(t) = A(p(t)); p(t+1) = T(p(t)) * sum_budget / ||T(p(t))||_1.
 *
 * The reported value is sum_budget / ||T(p)||_1 at the final iterate.
 */
inline UlsumResult ulsum(const Network& net, double sum_budget, const FixedPointOptions& opts = {})
{
    validate(net);
    validate(opts, net.n_users());
    if (!(sum_budget > 0.0) || !std::isfinite(sum_budget))
        throw structural_error("sum budget must be positive");

    UlsumResult r;
    PowerVector p = opts.initial_power ? *opts.initial_power
                                       : PowerVector(net.n_users(), sum_budget / static_cast<double>(net.n_users()));
    Association prev;
    for (std::size_t t = 0; t < opts.max_iter; ++t) {
        auto tm = t_maps(net, p);
        if (tm.a != prev) {
            r.assoc_settled_at = t;
            prev = tm.a;
        }
        const double scale = sum_budget / detail::sum(tm.t);
        for (double& x : tm.t)
            x *= scale;
        const double diff = detail::max_abs_diff(tm.t, p);
        r.residual = diff / detail::max_abs(tm.t);
        if (opts.keep_trace) {
            r.trace.push_back(r.residual);
            r.hilbert_trace.push_back(hilbert_distance(tm.t, p));
        }
        p = std::move(tm.t);
        r.iterations = t + 1;
        if (r.residual <= opts.tol && diff <= opts.abs_tol * sum_budget) {
            r.converged = true;
            break;
        }
    }
    const auto final_maps = t_maps(net, p);
    if (final_maps.a != prev)
        r.assoc_settled_at = r.iterations;
    r.assoc = final_maps.a;
    r.gamma_sum = sum_budget / detail::sum(final_maps.t);
    r.power_ul = std::move(p);
    return r;
}

/**
 * Downlink max-min power under a single sum budget at a fixed association:
 * p <- M(p) * sum_budget / ||M(p)||_1.
 */
inline SolveResult dl_sumpower_power(const Network& net, const Association& assoc, double sum_budget,
                                     const FixedPointOptions& opts = {})
{
    validate(net);
    validate(net, assoc);
    validate(opts, net.n_users());
    if (!(sum_budget > 0.0) || !std::isfinite(sum_budget))
        throw structural_error("sum budget must be positive");

    SolveResult r;
    r.association = assoc;
    PowerVector p = opts.initial_power ? *opts.initial_power
                                       : PowerVector(net.n_users(), sum_budget / static_cast<double>(net.n_users()));
    for (std::size_t t = 0; t < opts.max_iter; ++t) {
        auto next = m_map(net, assoc, p);
        const double scale = sum_budget / detail::sum(next);
        for (double& x : next)
            x *= scale;
        const double diff = detail::max_abs_diff(next, p);
        r.residual = diff / detail::max_abs(next);
        if (opts.keep_trace)
            r.trace.push_back(r.residual);
        p = std::move(next);
        r.iterations = t + 1;
        if (r.residual <= opts.tol && diff <= opts.abs_tol * sum_budget) {
            r.converged = true;
            break;
        }
    }
    r.power = std::move(p);
    evaluate_downlink(net, r);
    return r;
}

/// Sum-power relaxation value with the pooled budget sum_n budget_n; never below the per-BS optimum.
inline double upper_bound_sum(const Network& net, const FixedPointOptions& opts = {})
{
    return ulsum(net, total_budget(net), opts).gamma_sum;
}

/**
 * Geometric rate bound kappa = 1 - min_k A_k / B_k of ULSum, with
 * A_k = min_n noise_ul_n / g(n, k) and
 * B_k = min_n (noise_ul_n + sum_budget * max_j g(n, j)) / g(n, k).
 * The rate is with respect to Hilbert's projective metric.
 */
inline double convergence_rate_kappa(const Network& net, double sum_budget)
{
    validate(net);
    std::vector<double> row_max(net.n_bs(), 0.0);
    for (std::size_t n = 0; n < net.n_bs(); ++n)
        for (double g : net.gain.row(n))
            row_max[n] = std::max(row_max[n], g);

    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < net.n_users(); ++k) {
        double a = std::numeric_limits<double>::infinity();
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < net.n_bs(); ++n) {
            const double g = net.gain(n, k);
            if (!(g > 0.0))
                continue;
            a = std::min(a, net.noise_ul[n] / g);
            b = std::min(b, (net.noise_ul[n] + sum_budget * row_max[n]) / g);
        }
        ratio = std::min(ratio, a / b);
    }
    return 1.0 - ratio;
}

} // namespace mmfa

#endif // MMFA_SUMPOWER_HPP
