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

#include "oracles.hpp"

#include <mmfa/matching.hpp>
#include <mmfa/oracle.hpp>
#include <mmfa/scenario.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

using namespace mmfa;

namespace {

AssignmentProblem random_problem(std::mt19937_64& rng, std::size_t k, double spread = 3.0)
{
    std::normal_distribution<double> v(0.0, spread);
    AssignmentProblem p{Matrix(k, k)};
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            p.gain(i, j) = v(rng);
    return p;
}

double range_of(const AssignmentProblem& p)
{
    const auto d = p.gain.data();
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    return *hi - *lo;
}

} // namespace

TEST(LogGain, ElementwiseLogWithForbiddenZeros)
{
    Matrix g(3, 3, 1.0);
    for (std::size_t i = 0; i < 3; ++i)
        g(i, i) = std::exp(1.0);
    g(0, 2) = 0.0;
    g(1, 2) = 2.5;
    const auto p = log_gain_matrix(make_network(g));
    EXPECT_DOUBLE_EQ(p.gain(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(p.gain(1, 0), 0.0);
    EXPECT_TRUE(is_forbidden(p.gain(0, 2)));
    EXPECT_DOUBLE_EQ(p.gain(1, 2), std::log(2.5));
}

TEST(LogGain, RequiresSquareNetwork)
{
    EXPECT_THROW(log_gain_matrix(make_network(Matrix(2, 3, 1.0))), structural_error);
}

TEST(Hungarian, DiagonalDominantGivesIdentity)
{
    AssignmentProblem p{Matrix(4, 4, 0.1)};
    for (std::size_t i = 0; i < 4; ++i)
        p.gain(i, i) = 1.0;
    EXPECT_EQ(hungarian(p).assignment, (Association{0, 1, 2, 3}));
}

TEST(Hungarian, CrossedPattern)
{
    // log g21 + log g12 + log g33 is the largest total
    AssignmentProblem p{Matrix(3, 3, 0.0)};
    p.gain(1, 0) = 2.0;
    p.gain(0, 1) = 2.0;
    p.gain(2, 2) = 2.0;
    p.gain(0, 0) = 1.0;
    p.gain(1, 1) = 1.0;
    EXPECT_EQ(hungarian(p).assignment, (Association{1, 0, 2}));
}

TEST(Hungarian, MatchesPermutationSearch)
{
    std::mt19937_64 rng(81);
    for (int trial = 0; trial < 300; ++trial) {
        const auto p = random_problem(rng, 1 + rng() % 6);
        const auto h = hungarian(p);
        EXPECT_EQ(h.total_gain, assignment_gain(p, h.assignment));
        EXPECT_NEAR(h.total_gain, oracle::best_permutation(p.gain), 1e-12);
    }
}

TEST(Hungarian, ForbiddenOnlyMatchingIsInfeasible)
{
    AssignmentProblem p{Matrix(2, 2, 1.0)};
    p.gain(0, 0) = forbidden_gain;
    p.gain(0, 1) = forbidden_gain;
    EXPECT_THROW(validate(p), structural_error);
    AssignmentProblem q{Matrix(2, 2, 1.0)};
    q.gain(1, 0) = forbidden_gain;
    q.gain(1, 1) = forbidden_gain;
    EXPECT_THROW(hungarian(q), structural_error);
}

TEST(Auction, SinglePerson)
{
    AssignmentProblem p{Matrix(1, 1, -4.0)};
    const auto r = auction(p, 123.0);
    EXPECT_EQ(r.assignment, Association{0});
    EXPECT_EQ(r.iterations, 1u);
}

TEST(Auction, TwoByTwoIdentity)
{
    AssignmentProblem p{Matrix(2, 2, 0.0)};
    p.gain(0, 0) = 1.0;
    p.gain(1, 1) = 1.0;
    for (double eps : {0.49, 0.1, 1e-6})
        EXPECT_EQ(auction(p, eps).assignment, (Association{0, 1}));
}

TEST(Auction, WithinKEpsOfOptimum)
{
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = 1 + rng() % 6;
        const auto p = random_problem(rng, k);
        const double eps = 1e-6 * std::max(range_of(p), 1e-12);
        const auto r = auction(p, eps);
        const auto h = hungarian(p);
        EXPECT_GE(r.total_gain, h.total_gain - static_cast<double>(k) * eps - 1e-12);
        EXPECT_LE(r.total_gain, h.total_gain + 1e-12);
    }
}

TEST(Auction, EpsComplementarySlacknessAtTermination)
{
    std::mt19937_64 rng(85);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 1 + rng() % 6;
        const auto p = random_problem(rng, k);
        const double eps = 0.01;
        const auto r = auction(p, eps);
        for (std::size_t person = 0; person < k; ++person) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j)
                best = std::max(best, p.gain(j, person) - r.prices[j]);
            const auto j = r.assignment[person];
            EXPECT_GE(p.gain(j, person) - r.prices[j], best - eps - 1e-12);
        }
        for (double w : r.prices)
            EXPECT_GE(w, 0.0);
    }
}

// From zero prices every price stays below range + eps and each round raises one by eps.
TEST(Auction, RoundCountBound)
{
    std::mt19937_64 rng(87);
    std::size_t within_max_abs_count = 0;
    std::size_t runs = 0;
    for (double eps : {1.0, 0.1, 1e-3}) {
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t k = 1 + rng() % 6;
            const auto p = random_problem(rng, k);
            const auto r = auction(p, eps);
            const double range = range_of(p);
            EXPECT_LE(static_cast<double>(r.iterations), static_cast<double>(k) * (range / eps + 1.0));
            const auto d = p.gain.data();
            double max_abs = 0.0;
            for (double x : d)
                max_abs = std::max(max_abs, std::abs(x));
            within_max_abs_count += static_cast<double>(r.iterations) <= std::ceil(max_abs / eps) ? 1 : 0;
            ++runs;
        }
    }
    RecordProperty("rounds_within_max_abs_over_eps", std::to_string(within_max_abs_count) + "/" + std::to_string(runs));
}

TEST(Auction, InvariantToGainScaling)
{
    std::mt19937_64 rng(89);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 2 + rng() % 4;
        auto net = random_network(rng, k, k);
        const auto base = log_gain_matrix(net);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                net.gain(i, j) *= 7.5;
        const auto scaled = log_gain_matrix(net);
        EXPECT_EQ(hungarian(base).assignment, hungarian(scaled).assignment);
        EXPECT_EQ(auction(base, 1e-9).assignment, auction(scaled, 1e-9).assignment);
    }
}

TEST(EpsScaling, SingleStepEqualsAuction)
{
    std::mt19937_64 rng(91);
    const auto p = random_problem(rng, 5);
    const auto a = auction(p, 0.01);
    const auto s = auction_eps_scaling(p, {0.01});
    EXPECT_EQ(a.assignment, s.assignment);
    EXPECT_EQ(a.prices, s.prices);
}

TEST(EpsScaling, ScheduleReachesFinalEpsAccuracy)
{
    std::mt19937_64 rng(93);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 1 + rng() % 6;
        const auto p = random_problem(rng, k);
        const auto r = auction_eps_scaling(p, {1.0, 0.1, 0.001});
        EXPECT_GE(r.total_gain, hungarian(p).total_gain - static_cast<double>(k) * 0.001 - 1e-12);
    }
}

TEST(EpsScaling, RejectsBadSchedules)
{
    AssignmentProblem p{Matrix(2, 2, 1.0)};
    EXPECT_THROW(auction_eps_scaling(p, {}), structural_error);
    EXPECT_THROW(auction_eps_scaling(p, {0.1, 0.2}), structural_error);
    EXPECT_THROW(auction_eps_scaling(p, {0.1, -0.01}), structural_error);
}

TEST(EpsScaling, NearTiesBidTelemetry)
{
    AssignmentProblem p{Matrix(6, 6, 1.0)};
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            p.gain(i, j) = 1.0 + 1e-4 * static_cast<double>((i * 7 + j * 3) % 6);
    const auto single = auction(p, 1e-7);
    const auto scaled = auction_eps_scaling(p, default_eps_schedule(p));
    EXPECT_NEAR(single.total_gain, scaled.total_gain, 6e-7);
    RecordProperty("bids_single", std::to_string(single.bids));
    RecordProperty("bids_scaled", std::to_string(scaled.bids));
}

TEST(P1Prime, OptimalWheneverOptimumReachesUnitSinr)
{
    std::mt19937_64 rng(95);
    RandomNetworkOptions opts;
    opts.gain_db_std = 6.0;
    opts.matching_boost_db = 12.0;
    std::size_t optimal = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 1 + rng() % 3;
        const auto net = random_network(rng, n, n, opts);
        const auto star = brute_force_optimum(net);
        const auto r = solve_p1prime(net);
        if (star.min_sinr >= 1.0) {
            ++optimal;
            EXPECT_EQ(r.status, MatchingStatus::optimal);
            EXPECT_NEAR(r.result.min_sinr, star.min_sinr, 1e-6 * star.min_sinr);
            EXPECT_EQ(r.result.association, star.association);
        } else {
            EXPECT_EQ(r.status, MatchingStatus::infeasible);
        }
    }
    EXPECT_GT(optimal, 20u);
}

TEST(P1Prime, EqualGainsAreInfeasible)
{
    const auto r = solve_p1prime(make_network(Matrix(3, 3, 5.0)));
    EXPECT_EQ(r.status, MatchingStatus::infeasible);
    EXPECT_LT(r.result.min_sinr, 1.0);
}

TEST(P1Prime, SingleLink)
{
    Matrix g(1, 1, 0.5);
    auto r = solve_p1prime(make_network(g, {3.0}, {1.0}, {1.0}));
    EXPECT_EQ(r.status, MatchingStatus::optimal);
    EXPECT_NEAR(r.result.min_sinr, 1.5, 1e-12);
    r = solve_p1prime(make_network(g, {1.0}, {1.0}, {1.0}));
    EXPECT_EQ(r.status, MatchingStatus::infeasible);
}

TEST(Aufp, AgreesWithOracleAndHungarian)
{
    std::mt19937_64 rng(97);
    RandomNetworkOptions opts;
    opts.gain_db_std = 6.0;
    opts.matching_boost_db = 12.0;
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 1 + rng() % 3;
        const auto net = random_network(rng, n, n, opts);
        const auto star = brute_force_optimum(net);
        const auto a = aufp(net, 1e-8);
        const auto h = solve_p1prime(net);
        std::size_t ties = 0;
        oracle::best_permutation(log_gain_matrix(net).gain, &ties);
        if (ties == 1) {
            EXPECT_EQ(a.result.association, h.result.association);
        }
        if (star.min_sinr >= 1.0) {
            EXPECT_NEAR(a.result.min_sinr, star.min_sinr, 1e-6 * star.min_sinr);
        }
    }
}

TEST(Aufp, SingleLinkUsesFullPower)
{
    Matrix g(1, 1, 2.0);
    const auto r = aufp(make_network(g, {4.0}, {1.0}, {1.0}), 1e-3);
    EXPECT_EQ(r.result.association, Association{0});
    EXPECT_NEAR(r.result.power[0], 4.0, 1e-12);
}

TEST(Aufp, BudgetPricesOption)
{
    std::mt19937_64 rng(99);
    RandomNetworkOptions opts;
    opts.budget_min = 0.5;
    opts.budget_max = 2.0;
    const auto net = random_network(rng, 4, 4, opts);
    AufpOptions aopts;
    aopts.budget_prices = true;
    const auto r = aufp(net, 1e-9, aopts);
    EXPECT_NEAR(assignment_gain(log_gain_matrix(net), r.result.association),
                hungarian(log_gain_matrix(net)).total_gain, 4e-9);
}
