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
 * \file mmfa/power.hpp
 *
 * \brief Max-min power allocation for a fixed BS association.
 *
 * M_k(p) is the power BS a_k needs to give user k an SINR of one when every
 * other power is held fixed. Normalizing M(p) in the per-BS weighted norm
 *
 *   ||p||_Omega = max_n (sum_{k served by n} p_k) / budget_n
 *
 * gives a fixed-point map whose unique fixed point is the max-min power
 * vector; all users then share the same SINR 1 / ||M(p)||_Omega.
 */

#ifndef MMFA_POWER_HPP
#define MMFA_POWER_HPP

#include <mmfa/model.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace mmfa {

struct FixedPointOptions
{
    /// Stop once ||p(t+1) - p(t)||_inf <= tol * ||p(t+1)||_inf ...
    double tol = 1e-10;
    /// ... and ||p(t+1) - p(t)||_inf <= abs_tol * ||budget||_inf.
    double abs_tol = 1e-10;
    std::size_t max_iter = 100000;
    /// Overrides the default start; must be strictly positive.
    std::optional<PowerVector> initial_power;
    /// Draws a random positive start from this seed when set (and no initial_power).
    std::optional<std::uint64_t> random_seed;
    bool keep_trace = false;
};

inline void validate(const FixedPointOptions& opts, std::size_t n_users)
{
    if (!(opts.tol > 0.0) || !(opts.abs_tol >= 0.0))
        throw structural_error("fixed-point tolerances must be positive");
    if (opts.max_iter < 1)
        throw structural_error("max_iter must be at least 1");
    if (opts.initial_power) {
        if (opts.initial_power->size() != n_users)
            throw structural_error("initial power length must equal n_users");
        for (double p : *opts.initial_power)
            if (!(p > 0.0) || !std::isfinite(p))
                throw structural_error("initial power must be strictly positive");
    }
}

/// M_k(p) = (noise_k + sum_{i != k} p_i g(a_i, k)) / g(a_k, k).
inline std::vector<double> m_map(const Network& net, const Association& assoc, std::span<const double> power)
{
    validate(net, assoc);
    validate_power(net, power);
    const auto per_bs = bs_power(assoc, power, net.n_bs());
    std::vector<double> m(net.n_users());
    for (std::size_t k = 0; k < m.size(); ++k)
        m[k] = (net.noise_dl[k] + detail::dl_interference(net, assoc, power, per_bs, k)) / net.gain(assoc[k], k);
    return m;
}

/// Largest served-power-to-budget ratio over BSs with a nonempty serving set.
inline double omega_norm(std::span<const double> power, const Association& assoc, std::span<const double> budgets)
{
    if (power.size() != assoc.size())
        throw structural_error("power and association lengths differ");
    std::vector<double> sum(budgets.size(), 0.0);
    std::vector<bool> used(budgets.size(), false);
    for (std::size_t k = 0; k < assoc.size(); ++k) {
        if (assoc[k] >= budgets.size())
            throw structural_error("association index out of range");
        sum[assoc[k]] += power[k];
        used[assoc[k]] = true;
    }
    double norm = 0.0;
    for (std::size_t n = 0; n < budgets.size(); ++n)
        if (used[n])
            norm = std::max(norm, sum[n] / budgets[n]);
    return norm;
}

namespace detail {

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) noexcept
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

inline double max_abs(std::span<const double> a) noexcept
{
    double d = 0.0;
    for (double x : a)
        d = std::max(d, std::abs(x));
    return d;
}

inline double sum(std::span<const double> a) noexcept
{
    double s = 0.0;
    for (double x : a)
        s += x;
    return s;
}

/// Starting point: explicit, seeded random, or each BS budget split evenly over its users.
inline PowerVector initial_power(const Network& net, const Association& assoc, const FixedPointOptions& opts)
{
    if (opts.initial_power)
        return *opts.initial_power;
    PowerVector p(net.n_users());
    if (opts.random_seed) {
        std::mt19937_64 rng(*opts.random_seed);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        for (std::size_t k = 0; k < p.size(); ++k)
            p[k] = u(rng) * net.budget[assoc[k]];
        return p;
    }
    const auto load = bs_loads(assoc, net.n_bs());
    for (std::size_t k = 0; k < p.size(); ++k)
        p[k] = net.budget[assoc[k]] / static_cast<double>(load[assoc[k]]);
    return p;
}

} // namespace detail

/**
 * Global max-min power allocation for a fixed association via
 * p(t+1) = M(p(t)) / ||M(p(t))||_Omega.
 *
 * A run that hits max_iter is returned with converged = false.
 */
inline SolveResult solve_power_fixed_assoc(const Network& net, const Association& assoc,
                                           const FixedPointOptions& opts = {})
{
    validate(net);
    validate(net, assoc);
    validate(opts, net.n_users());

    const double budget_scale = detail::max_abs(net.budget);
    SolveResult r;
    r.association = assoc;
    PowerVector p = detail::initial_power(net, assoc, opts);
    for (std::size_t t = 0; t < opts.max_iter; ++t) {
        auto next = m_map(net, assoc, p);
        const double norm = omega_norm(next, assoc, net.budget);
        for (double& x : next)
            x /= norm;
        const double diff = detail::max_abs_diff(next, p);
        r.residual = diff / detail::max_abs(next);
        if (opts.keep_trace)
            r.trace.push_back(r.residual);
        p = std::move(next);
        r.iterations = t + 1;
        if (r.residual <= opts.tol && diff <= opts.abs_tol * budget_scale) {
            r.converged = true;
            break;
        }
    }
    r.power = std::move(p);
    evaluate_downlink(net, r);
    return r;
}

struct FeasibilityResult
{
    bool feasible = false;
    PowerVector power;
    std::size_t iterations = 0;
};

/**
 * Minimal power reaching SINR >= gamma for every user, found by the standard
 * interference-function iteration p <- gamma * M(p) from p = 0. The sequence
 * increases monotonically, so the first per-BS budget overshoot proves
 * infeasibility.
 */
inline FeasibilityResult feasibility_min_power(const Network& net, const Association& assoc, double gamma,
                                               const FixedPointOptions& opts = {})
{
    validate(net);
    validate(net, assoc);
    if (!(gamma > 0.0))
        throw structural_error("target SINR must be positive");

    constexpr double slack = 1e-12;
    FeasibilityResult r;
    PowerVector p(net.n_users(), 0.0);
    for (std::size_t t = 0; t < opts.max_iter; ++t) {
        auto next = m_map(net, assoc, p);
        for (double& x : next)
            x *= gamma;
        r.iterations = t + 1;
        const auto per_bs = bs_power(assoc, next, net.n_bs());
        for (std::size_t n = 0; n < per_bs.size(); ++n) {
            if (per_bs[n] > net.budget[n] * (1.0 + slack)) {
                r.power = std::move(next);
                return r;
            }
        }
        const double diff = detail::max_abs_diff(next, p);
        p = std::move(next);
        if (diff <= opts.tol * detail::max_abs(p)) {
            r.feasible = true;
            r.power = std::move(p);
            return r;
        }
    }
    r.power = std::move(p);
    return r;
}

/// Max-min SINR at a fixed association by bisection on feasibility_min_power.
inline double bisect_max_min(const Network& net, const Association& assoc, std::size_t steps = 80,
                             const FixedPointOptions& opts = {})
{
    validate(net, assoc);
    // interference-free SINR at full budget bounds the optimum from above
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < net.n_users(); ++k)
        hi = std::min(hi, net.budget[assoc[k]] * net.gain(assoc[k], k) / net.noise_dl[k]);
    double lo = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (feasibility_min_power(net, assoc, mid, opts).feasible)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

} // namespace mmfa

#endif // MMFA_POWER_HPP
