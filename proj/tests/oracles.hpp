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

// Test-only reference implementations. Nothing here calls the library's
// solvers; they share only the Network/Matrix containers.

#ifndef MMFA_TESTS_ORACLES_HPP
#define MMFA_TESTS_ORACLES_HPP

#include <mmfa/model.hpp>
#include <mmfa/oracle.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace oracle {

using mmfa::Association;
using mmfa::Matrix;
using mmfa::Network;

/// SINR with the interference sum written out user by user.
inline std::vector<double> naive_downlink_sinr(const Network& net, const Association& a, const std::vector<double>& p)
{
    std::vector<double> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        double interference = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j)
            if (j != k)
                interference += net.gain(a[j], k) * p[j];
        out[k] = p[k] * net.gain(a[k], k) / (net.noise_dl[k] + interference);
    }
    return out;
}

/// T_k^(n)(p) by direct loops.
inline double naive_t(const Network& net, const std::vector<double>& p, std::size_t n, std::size_t k)
{
    double s = net.noise_ul[n];
    for (std::size_t j = 0; j < p.size(); ++j)
        if (j != k)
            s += net.gain(n, j) * p[j];
    return s / net.gain(n, k);
}

/// Solves A x = b by Gaussian elimination with partial pivoting; nullopt if singular.
inline std::optional<std::vector<double>> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                piv = r;
        if (std::abs(a[piv][col]) < 1e-300)
            return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c)
            s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

/// Least power reaching SINR gamma for every user, from the linear system; nullopt if none exists.
inline std::optional<std::vector<double>> min_power_linear(const Network& net, const Association& a, double gamma)
{
    const std::size_t k_users = a.size();
    std::vector<std::vector<double>> m(k_users, std::vector<double>(k_users, 0.0));
    std::vector<double> rhs(k_users);
    for (std::size_t k = 0; k < k_users; ++k) {
        const double direct = net.gain(a[k], k);
        for (std::size_t j = 0; j < k_users; ++j)
            m[k][j] = j == k ? 1.0 : -gamma * net.gain(a[j], k) / direct;
        rhs[k] = gamma * net.noise_dl[k] / direct;
    }
    auto p = solve_linear(std::move(m), std::move(rhs));
    if (!p)
        return std::nullopt;
    for (double x : *p)
        if (!(x > 0.0))
            return std::nullopt;
    return p;
}

/// Max-min SINR at a fixed association by bisection; fits(p) decides budget feasibility.
inline double bisect(const Network& net, const Association& a, double hi,
                     const std::function<bool(const std::vector<double>&)>& fits)
{
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto p = min_power_linear(net, a, mid);
        if (p && fits(*p))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

inline double per_bs_value(const Network& net, const Association& a)
{
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.size(); ++k)
        hi = std::min(hi, net.budget[a[k]] * net.gain(a[k], k) / net.noise_dl[k]);
    return bisect(net, a, hi, [&](const std::vector<double>& p) {
        std::vector<double> used(net.n_bs(), 0.0);
        for (std::size_t k = 0; k < p.size(); ++k)
            used[a[k]] += p[k];
        for (std::size_t n = 0; n < used.size(); ++n)
            if (used[n] > net.budget[n] * (1.0 + 1e-13))
                return false;
        return true;
    });
}

inline double sum_power_value(const Network& net, const Association& a, double sum_budget)
{
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.size(); ++k)
        hi = std::min(hi, sum_budget * net.gain(a[k], k) / net.noise_dl[k]);
    return bisect(net, a, hi, [&](const std::vector<double>& p) {
        return std::accumulate(p.begin(), p.end(), 0.0) <= sum_budget * (1.0 + 1e-13);
    });
}

/// Calls f on every association in N^K (positive-gain links only).
inline void for_each_association(const Network& net, const std::function<void(const Association&)>& f)
{
    const std::size_t n = net.n_bs();
    const std::size_t k = net.n_users();
    Association a(k, 0);
    for (;;) {
        bool ok = true;
        for (std::size_t u = 0; u < k; ++u)
            ok = ok && net.gain(a[u], u) > 0.0;
        if (ok)
            f(a);
        std::size_t u = 0;
        while (u < k && ++a[u] == n)
            a[u++] = 0;
        if (u == k)
            return;
    }
}

struct Best
{
    double value = -1.0;
    Association association;
};

/// Per-BS optimum over all associations, each solved by linear-system bisection.
inline Best per_bs_optimum(const Network& net)
{
    Best best;
    for_each_association(net, [&](const Association& a) {
        const double v = per_bs_value(net, a);
        if (v > best.value) {
            best.value = v;
            best.association = a;
        }
    });
    return best;
}

inline Best sum_power_optimum(const Network& net, double sum_budget)
{
    Best best;
    for_each_association(net, [&](const Association& a) {
        const double v = sum_power_value(net, a, sum_budget);
        if (v > best.value) {
            best.value = v;
            best.association = a;
        }
    });
    return best;
}

/// Best total gain over all K! permutations; `count` receives the number of optimal permutations.
inline double best_permutation(const Matrix& gain, std::size_t* count = nullptr, Association* arg = nullptr)
{
    const std::size_t k = gain.rows();
    Association perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = -std::numeric_limits<double>::infinity();
    std::size_t ties = 0;
    do {
        double total = 0.0;
        for (std::size_t u = 0; u < k; ++u)
            total += gain(perm[u], u);
        if (total > best + 1e-12) {
            best = total;
            ties = 1;
            if (arg)
                *arg = perm;
        } else if (std::abs(total - best) <= 1e-12) {
            ++ties;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (count)
        *count = ties;
    return best;
}

/// Satisfiability by enumerating all 2^T truth assignments.
inline bool truth_table_sat(const mmfa::CnfFormula& f)
{
    for (std::size_t mask = 0; mask < (std::size_t{1} << f.n_vars); ++mask) {
        bool all = true;
        for (const auto& c : f.clauses) {
            bool any = false;
            for (int lit : c) {
                const bool value = (mask >> (std::abs(lit) - 1)) & 1U;
                any = any || (lit > 0 ? value : !value);
            }
            all = all && any;
        }
        if (all)
            return true;
    }
    return false;
}

} // namespace oracle

#endif // MMFA_TESTS_ORACLES_HPP
