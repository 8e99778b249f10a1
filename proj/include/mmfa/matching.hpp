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
 * \file mmfa/matching.hpp
 *
 * \brief One-to-one user/BS association through assignment on log gains.
 *
 * When K == N and every user must reach SINR >= 1, the only association that
 * can be feasible is the maximum-weight perfect matching on log g(n, k).
 * Solving that matching (Hungarian or auction) and then allocating power at
 * it is therefore globally optimal whenever the resulting min-SINR is >= 1.
 */

#ifndef MMFA_MATCHING_HPP
#define MMFA_MATCHING_HPP

#include <mmfa/model.hpp>
#include <mmfa/power.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mmfa {

/// Dense stand-in for a missing link in assignment matrices.
inline constexpr double forbidden_gain = -1e18;

inline bool is_forbidden(double g) noexcept { return g <= 0.5 * forbidden_gain; }

/// gain(n, k): value of giving object (BS) n to person (user) k.
struct AssignmentProblem
{
    Matrix gain;

    [[nodiscard]] std::size_t size() const noexcept { return gain.cols(); }
};

inline void validate(const AssignmentProblem& prob)
{
    const auto k = prob.size();
    if (prob.gain.rows() != k || k == 0)
        throw structural_error("assignment problem must be square and non-empty");
    for (std::size_t i = 0; i < k; ++i) {
        bool row_ok = false;
        bool col_ok = false;
        for (std::size_t j = 0; j < k; ++j) {
            row_ok = row_ok || !is_forbidden(prob.gain(i, j));
            col_ok = col_ok || !is_forbidden(prob.gain(j, i));
        }
        if (!row_ok || !col_ok)
            throw structural_error("every row and column needs a permitted entry");
    }
}

/// G(n, k) = log g(n, k), or the forbidden sentinel where g(n, k) == 0.
inline AssignmentProblem log_gain_matrix(const Network& net)
{
    validate(net);
    if (net.n_bs() != net.n_users())
        throw structural_error("log-gain assignment requires n_bs == n_users");
    AssignmentProblem prob{Matrix(net.n_bs(), net.n_users())};
    for (std::size_t n = 0; n < net.n_bs(); ++n)
        for (std::size_t k = 0; k < net.n_users(); ++k)
            prob.gain(n, k) = net.gain(n, k) > 0.0 ? std::log(net.gain(n, k)) : forbidden_gain;
    return prob;
}

struct AssignmentResult
{
    Association assignment; ///< assignment[k] = object given to person k
    double total_gain = 0.0;
};

inline double assignment_gain(const AssignmentProblem& prob, const Association& a)
{
    double total = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        total += prob.gain(a[k], k);
    return total;
}

namespace detail {

/// (min, max) over permitted entries.
inline std::pair<double, double> gain_range(const AssignmentProblem& prob)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double g : prob.gain.data()) {
        if (is_forbidden(g))
            continue;
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    return {lo, hi};
}

} // namespace detail

/// Maximum-total-gain perfect matching, O(K^3) shortest augmenting paths with potentials.
inline AssignmentResult hungarian(const AssignmentProblem& prob)
{
    validate(prob);
    const std::size_t n = prob.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    // rows are persons, columns objects; minimize -gain. 1-based with a virtual column 0.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j])
                    continue;
                const double cur = -prob.gain(j - 1, i0 - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    AssignmentResult r;
    r.assignment.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j)
        r.assignment[match[j] - 1] = j - 1;
    for (std::size_t k = 0; k < n; ++k)
        if (is_forbidden(prob.gain(r.assignment[k], k)))
            throw infeasible_error("no perfect matching over permitted entries");
    r.total_gain = assignment_gain(prob, r.assignment);
    return r;
}

struct AuctionOptions
{
    /// 0 selects K * K * (ceil(range / eps) + 1) + 1000, capped at 1e9.
    std::size_t max_rounds = 0;
    /// Starting prices; all zero when unset.
    std::optional<std::vector<double>> initial_prices;
};

struct AuctionResult
{
    Association assignment;
    double total_gain = 0.0;
    std::vector<double> prices;
    std::size_t iterations = 0; ///< bidding rounds
    std::size_t bids = 0;
};

namespace detail {

inline std::size_t default_round_cap(std::size_t k, double range, double eps)
{
    const double steps = std::ceil(range / eps) + 1.0;
    const double cap = static_cast<double>(k) * static_cast<double>(k) * steps + 1000.0;
    return cap > 1e9 ? std::size_t{1000000000} : static_cast<std::size_t>(cap);
}

/// One Jacobi auction at fixed eps, warm-started from prices.
inline AuctionResult auction_run(const AssignmentProblem& prob, double eps, std::vector<double> prices,
                                 std::size_t max_rounds)
{
    const std::size_t n = prob.size();
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    const auto [lo, hi] = gain_range(prob);
    // cap on a bid increment; also stands in for the missing second-best when K == 1
    const double max_increment = (hi - lo) + eps;
    const std::size_t cap = max_rounds ? max_rounds : default_round_cap(n, hi - lo, eps);

    AuctionResult r;
    std::vector<std::size_t> owner(n, none);
    Association assigned(n, none);
    std::size_t unassigned = n;
    std::vector<std::size_t> bidder(n);
    std::vector<double> bid(n);
    std::vector<std::size_t> target(n);
    std::vector<double> increment(n);

    while (unassigned > 0) {
        if (r.iterations >= cap)
            throw infeasible_error("auction exceeded its round cap");
        ++r.iterations;
        std::fill(bidder.begin(), bidder.end(), none);

        // bidding phase: every unassigned person bids for its best object
        for (std::size_t k = 0; k < n; ++k) {
            if (assigned[k] != none)
                continue;
            std::size_t best = 0;
            double v1 = -std::numeric_limits<double>::infinity();
            double v2 = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                const double value = prob.gain(j, k) - prices[j];
                if (value > v1) {
                    v2 = v1;
                    v1 = value;
                    best = j;
                } else if (value > v2) {
                    v2 = value;
                }
            }
            if (is_forbidden(prob.gain(best, k)))
                throw infeasible_error("auction person " + std::to_string(k) + " left with only forbidden objects");
            target[k] = best;
            increment[k] = n == 1 ? max_increment : std::min(v1 - v2, max_increment);
            ++r.bids;
        }

        // assignment phase: each object keeps its highest bidder (lowest index on ties)
        for (std::size_t k = 0; k < n; ++k) {
            if (assigned[k] != none)
                continue;
            const auto j = target[k];
            if (bidder[j] == none || increment[k] > bid[j]) {
                bidder[j] = k;
                bid[j] = increment[k];
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (bidder[j] == none)
                continue;
            if (owner[j] != none) {
                assigned[owner[j]] = none;
                ++unassigned;
            }
            owner[j] = bidder[j];
            assigned[bidder[j]] = j;
            --unassigned;
            prices[j] += bid[j] + eps;
        }
    }

    r.assignment = std::move(assigned);
    r.total_gain = assignment_gain(prob, r.assignment);
    r.prices = std::move(prices);
    return r;
}

} // namespace detail

/**
 * Jacobi auction: all unassigned persons bid each round; an object keeps its
 * highest bidder and raises its price by that bid plus eps. The final total
 * gain is within K * eps of the optimum.
 */
inline AuctionResult auction(const AssignmentProblem& prob, double eps, const AuctionOptions& opts = {})
{
    validate(prob);
    if (!(eps > 0.0))
        throw structural_error("auction eps must be positive");
    std::vector<double> prices = opts.initial_prices ? *opts.initial_prices : std::vector<double>(prob.size(), 0.0);
    if (prices.size() != prob.size())
        throw structural_error("initial price vector has wrong length");
    return detail::auction_run(prob, eps, std::move(prices), opts.max_rounds);
}

/// Runs the auction over a strictly decreasing eps schedule, keeping prices between runs.
inline AuctionResult auction_eps_scaling(const AssignmentProblem& prob, const std::vector<double>& schedule,
                                         const AuctionOptions& opts = {})
{
    validate(prob);
    if (schedule.empty())
        throw structural_error("eps schedule must be non-empty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0))
            throw structural_error("eps schedule entries must be positive");
        if (i > 0 && !(schedule[i] < schedule[i - 1]))
            throw structural_error("eps schedule must be strictly decreasing");
    }
    std::vector<double> prices = opts.initial_prices ? *opts.initial_prices : std::vector<double>(prob.size(), 0.0);
    AuctionResult total;
    for (double eps : schedule) {
        auto r = detail::auction_run(prob, eps, std::move(prices), opts.max_rounds);
        prices = r.prices;
        total.iterations += r.iterations;
        total.bids += r.bids;
        total.assignment = std::move(r.assignment);
        total.total_gain = r.total_gain;
    }
    total.prices = std::move(prices);
    return total;
}

/// 1e-6 of the permitted gain range (1e-6 when all entries are equal).
inline double default_eps(const AssignmentProblem& prob)
{
    const auto [lo, hi] = detail::gain_range(prob);
    const double range = hi - lo;
    return range > 0.0 ? 1e-6 * range : 1e-6;
}

/// Decades from range / 10 down to default_eps.
inline std::vector<double> default_eps_schedule(const AssignmentProblem& prob)
{
    const double last = default_eps(prob);
    std::vector<double> schedule;
    for (double eps = last * 1e5; eps > last * 1.5; eps /= 10.0)
        schedule.push_back(eps);
    schedule.push_back(last);
    return schedule;
}

enum class MatchingStatus
{
    optimal,   ///< min-SINR >= 1: globally optimal for the one-to-one and general problems
    infeasible ///< no association reaches SINR >= 1; result holds the heuristic solution
};

inline const char* to_string(MatchingStatus s)
{
    return s == MatchingStatus::optimal ? "optimal" : "infeasible";
}

struct MatchingResult
{
    MatchingStatus status = MatchingStatus::infeasible;
    SolveResult result;
    double assignment_gain = 0.0;
    std::size_t auction_rounds = 0;
};

namespace detail {

inline MatchingResult finish_matching(const Network& net, const Association& a, double gain,
                                      const FixedPointOptions& opts)
{
    MatchingResult out;
    out.result = solve_power_fixed_assoc(net, a, opts);
    out.assignment_gain = gain;
    out.status = out.result.min_sinr >= 1.0 ? MatchingStatus::optimal : MatchingStatus::infeasible;
    return out;
}

} // namespace detail

/// Hungarian on log gains, then fixed-point power at that matching.
inline MatchingResult solve_p1prime(const Network& net, const FixedPointOptions& opts = {})
{
    auto prob = log_gain_matrix(net);
    const auto a = hungarian(prob);
    return detail::finish_matching(net, a.assignment, a.total_gain, opts);
}

struct AufpOptions
{
    FixedPointOptions power;
    AuctionOptions auction;
    /// Decreasing eps values run before the final eps (eps-scaling); empty runs a single auction.
    std::vector<double> warmup_schedule;
    /// Start prices at -log budget_n instead of zero.
    bool budget_prices = false;
};

/// Auction on log gains (Jacobi), then fixed-point power at the resulting matching.
inline MatchingResult aufp(const Network& net, double eps, const AufpOptions& opts = {})
{
    auto prob = log_gain_matrix(net);
    AuctionOptions aopts = opts.auction;
    if (opts.budget_prices) {
        std::vector<double> w(net.n_bs());
        for (std::size_t n = 0; n < w.size(); ++n)
            w[n] = -std::log(net.budget[n]);
        aopts.initial_prices = std::move(w);
    }
    std::vector<double> schedule;
    for (double e : opts.warmup_schedule)
        if (e > eps)
            schedule.push_back(e);
    schedule.push_back(eps);
    const auto a = auction_eps_scaling(prob, schedule, aopts);
    auto out = detail::finish_matching(net, a.assignment, a.total_gain, opts.power);
    out.auction_rounds = a.iterations;
    return out;
}

} // namespace mmfa

#endif // MMFA_MATCHING_HPP
