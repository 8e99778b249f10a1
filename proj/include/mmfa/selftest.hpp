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
 * \file mmfa/selftest.hpp
 *
 * \brief Oracle-equivalence checks runnable from the command line.
 */

#ifndef MMFA_SELFTEST_HPP
#define MMFA_SELFTEST_HPP

#include <mmfa/matching.hpp>
#include <mmfa/oracle.hpp>
#include <mmfa/scenario.hpp>
#include <mmfa/sumpower.hpp>
#include <mmfa/twostage.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace mmfa {

struct SelftestCheck
{
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string first_failure;

    [[nodiscard]] bool passed() const { return cases > 0 && failures == 0; }
};

struct SelftestReport
{
    std::vector<SelftestCheck> checks;

    [[nodiscard]] bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
    }
};

namespace detail {

inline void record(SelftestCheck& check, bool ok, const std::string& what)
{
    ++check.cases;
    if (!ok && check.failures++ == 0)
        check.first_failure = what;
}

inline bool close(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

} // namespace detail

/// Runs every check on `instances` random cases each; deterministic in seed.
inline SelftestReport run_selftest(std::uint64_t seed = 1, std::size_t instances = 100)
{
    std::mt19937_64 rng(seed);
    SelftestReport report;

    {
        SelftestCheck c{"two-user block constant", 0, 0, {}};
        const auto best = brute_force_optimum(lemma2_subnetwork());
        detail::record(c, std::abs(best.min_sinr - gadget_threshold()) <= 1e-6,
                       "block optimum " + std::to_string(best.min_sinr));
        report.checks.push_back(c);
    }

    {
        SelftestCheck c{"hungarian vs permutation search", 0, 0, {}};
        std::uniform_int_distribution<std::size_t> size(1, 6);
        std::normal_distribution<double> value(0.0, 3.0);
        for (std::size_t i = 0; i < instances; ++i) {
            const auto k = size(rng);
            AssignmentProblem prob{Matrix(k, k)};
            for (std::size_t r = 0; r < k; ++r)
                for (std::size_t s = 0; s < k; ++s)
                    prob.gain(r, s) = value(rng);
            Association perm(k);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            double best = -std::numeric_limits<double>::infinity();
            do
                best = std::max(best, assignment_gain(prob, perm));
            while (std::next_permutation(perm.begin(), perm.end()));
            const auto h = hungarian(prob);
            const auto a = auction(prob, 1e-6);
            detail::record(c, detail::close(h.total_gain, best, 1e-12) && a.total_gain >= best - 1e-6 * k - 1e-12,
                           "instance " + std::to_string(i));
        }
        report.checks.push_back(c);
    }

    {
        SelftestCheck c{"K = N matching optimality", 0, 0, {}};
        RandomNetworkOptions ropts;
        ropts.gain_db_std = 6.0;
        ropts.matching_boost_db = 12.0;
        for (std::size_t i = 0; i < instances; ++i) {
            const auto net = random_network(rng, 3, 3, ropts);
            const auto star = brute_force_optimum(net);
            const auto p1 = solve_p1prime(net);
            bool ok = true;
            if (star.min_sinr >= 1.0) {
                ok = p1.status == MatchingStatus::optimal && detail::close(p1.result.min_sinr, star.min_sinr, 1e-6) &&
                     detail::close(aufp(net, 1e-8).result.min_sinr, star.min_sinr, 1e-6) &&
                     detail::close(dlsum(net).result.min_sinr, star.min_sinr, 1e-6) &&
                     detail::close(dlsuma(net).result.min_sinr, star.min_sinr, 1e-6);
            } else {
                ok = p1.status == MatchingStatus::infeasible;
            }
            detail::record(c, ok, "instance " + std::to_string(i));
        }
        report.checks.push_back(c);
    }

    {
        SelftestCheck c{"uplink-downlink duality", 0, 0, {}};
        std::uniform_int_distribution<std::size_t> n_dist(1, 4);
        std::uniform_int_distribution<std::size_t> k_dist(1, 5);
        RandomNetworkOptions ropts;
        ropts.budget_min = 0.5;
        ropts.budget_max = 4.0;
        for (std::size_t i = 0; i < instances; ++i) {
            const auto net = random_network(rng, n_dist(rng), k_dist(rng), ropts);
            const double s = total_budget(net);
            const auto ul = ulsum(net, s);
            const auto dl = dl_sumpower_power(net, ul.assoc, s);
            detail::record(c, detail::close(ul.gamma_sum, dl.min_sinr, 1e-6), "instance " + std::to_string(i));
        }
        report.checks.push_back(c);
    }

    {
        SelftestCheck c{"3-SAT gadget equivalence", 0, 0, {}};
        std::uniform_int_distribution<std::size_t> t_dist(1, 3);
        std::uniform_int_distribution<std::size_t> m_dist(1, 3);
        const std::size_t n = std::max<std::size_t>(1, instances / 10);
        for (std::size_t i = 0; i < n; ++i) {
            const auto f = random_3cnf(rng, t_dist(rng), m_dist(rng));
            detail::record(c, verify_sat_equivalence(f).agrees, "formula " + std::to_string(i));
        }
        report.checks.push_back(c);
    }
    return report;
}

} // namespace mmfa

#endif // MMFA_SELFTEST_HPP
