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
 * \file mmfa/oracle.hpp
 *
 * \brief Ground truth for small instances: exhaustive association search,
 *        closed-form two-user constants and the 3-SAT gadget network.
 *
 * The gadget encodes a 3-SAT formula with M clauses over T variables in a
 * network of M + 2T BSs and users (unit budgets and noise). Every variable
 * contributes a two-BS/two-user block whose best min-SINR is
 * (sqrt(7) - 1) / 3, reached only when one of its BSs runs at full power and
 * the other at (sqrt(7) - 1) / 2; the low-power BS marks the true literal.
 * Each clause user hears its literal BSs and reaches the same SINR iff at
 * least one of them is in the low-power state. The formula is therefore
 * satisfiable iff the network optimum equals (sqrt(7) - 1) / 3.
 */

#ifndef MMFA_ORACLE_HPP
#define MMFA_ORACLE_HPP

#include <mmfa/model.hpp>
#include <mmfa/power.hpp>

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <istream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmfa {

/// The instance is too large for exhaustive search.
class size_cap_error : public std::length_error
{
public:
    using std::length_error::length_error;
};

struct BruteForceOptions
{
    bool one_to_one = false;
    double max_candidates = 1e6;
    FixedPointOptions power;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> allowed_bs(const Network& net)
{
    std::vector<std::vector<std::size_t>> allowed(net.n_users());
    for (std::size_t k = 0; k < net.n_users(); ++k)
        for (std::size_t n = 0; n < net.n_bs(); ++n)
            if (net.gain(n, k) > 0.0)
                allowed[k].push_back(n);
    return allowed;
}

inline void enumerate_rec(const std::vector<std::vector<std::size_t>>& allowed, bool one_to_one,
                          std::vector<char>& used, Association& a, std::size_t k,
                          const std::function<void(const Association&)>& visit)
{
    if (k == allowed.size()) {
        visit(a);
        return;
    }
    for (auto n : allowed[k]) {
        if (one_to_one && used[n])
            continue;
        a[k] = n;
        if (one_to_one)
            used[n] = 1;
        enumerate_rec(allowed, one_to_one, used, a, k + 1, visit);
        if (one_to_one)
            used[n] = 0;
    }
}

} // namespace detail

/// Upper bound on the number of associations an exhaustive search visits.
inline double count_associations(const Network& net, bool one_to_one)
{
    const auto allowed = detail::allowed_bs(net);
    double count = 1.0;
    for (std::size_t k = 0; k < allowed.size(); ++k) {
        double choices = static_cast<double>(allowed[k].size());
        if (one_to_one)
            choices = std::min(choices, static_cast<double>(net.n_bs() - std::min(k, net.n_bs())));
        count *= choices;
    }
    return count;
}

/// Visits every association over positive-gain links in lexicographic order.
inline void enumerate_associations(const Network& net, bool one_to_one,
                                   const std::function<void(const Association&)>& visit)
{
    validate(net);
    const auto allowed = detail::allowed_bs(net);
    std::vector<char> used(net.n_bs(), 0);
    Association a(net.n_users(), 0);
    detail::enumerate_rec(allowed, one_to_one, used, a, 0, visit);
}

/**
 * Global max-min optimum by enumerating associations and solving each with
 * the fixed-point power allocation. Ties keep the lexicographically smallest
 * association.
 */
inline SolveResult brute_force_optimum(const Network& net, const BruteForceOptions& opts = {})
{
    validate(net);
    if (count_associations(net, opts.one_to_one) > opts.max_candidates)
        throw size_cap_error("brute force refused: too many candidate associations");
    if (opts.one_to_one && net.n_users() > net.n_bs())
        throw infeasible_error("one-to-one association needs n_users <= n_bs");

    SolveResult best;
    best.min_sinr = -1.0;
    bool all_converged = true;
    std::size_t visited = 0;
    enumerate_associations(net, opts.one_to_one, [&](const Association& a) {
        auto r = solve_power_fixed_assoc(net, a, opts.power);
        all_converged = all_converged && r.converged;
        ++visited;
        if (r.min_sinr > best.min_sinr * (1.0 + 1e-12) || best.min_sinr < 0.0)
            best = std::move(r);
    });
    if (visited == 0)
        throw infeasible_error("no admissible association");
    best.converged = all_converged;
    best.iterations = visited;
    return best;
}

inline SolveResult brute_force_optimum(const Network& net, bool one_to_one)
{
    BruteForceOptions opts;
    opts.one_to_one = one_to_one;
    return brute_force_optimum(net, opts);
}

struct Lemma2Values
{
    std::array<double, 4> gamma{}; ///< optimal min-SINR of configurations 1..4
    double low_power = 0.0;        ///< power of the non-saturated BS in configurations 1 and 2
};

/**
 * Closed forms for the two-BS/two-user block where user x hears gain f from
 * both BSs and user xbar hears gain g from both (f >= g > 0, unit noise and
 * budgets). Configurations: 1 = one-to-one straight, 2 = crossed, 3 and 4 =
 * one BS serves both users.
 */
inline Lemma2Values lemma2_config_values(double f, double g)
{
    if (!(f > 0.0) || !(g > 0.0))
        throw structural_error("block gains must be positive");
    if (f < g)
        throw structural_error("closed forms assume f >= g");
    Lemma2Values v;
    const double one_to_one = 2.0 / (1.0 / g + std::sqrt(1.0 / (g * g) + 4.0 * (1.0 + 1.0 / f)));
    const double shared = 1.0 / (1.0 / f + 1.0 / g + 1.0);
    v.gamma = {one_to_one, one_to_one, shared, shared};
    v.low_power = 1.0 / one_to_one - 1.0 / g;
    return v;
}

/// The optimal block value (sqrt(7) - 1) / 3 that marks satisfiability.
inline double gadget_threshold()
{
    return (std::sqrt(7.0) - 1.0) / 3.0;
}

/// Block network: BS 0 = X, BS 1 = Xbar, user 0 = x, user 1 = xbar.
inline Network lemma2_subnetwork(double f = 2.0, double g = 1.0)
{
    Matrix gain(2, 2);
    gain(0, 0) = f;
    gain(1, 0) = f;
    gain(0, 1) = g;
    gain(1, 1) = g;
    return make_network(std::move(gain));
}

/// How a literal repeated inside one clause is treated.
enum class DuplicatePolicy
{
    multiplicity, ///< allowed; the literal BS link to the clause user gets gain = number of occurrences
    reject        ///< structural error
};

/// Conjunction of 3-literal clauses; literal +t / -t means X_t / not X_t (t is 1-based).
struct CnfFormula
{
    std::size_t n_vars = 0;
    std::vector<std::array<int, 3>> clauses;
};

inline void validate(const CnfFormula& f, DuplicatePolicy policy = DuplicatePolicy::multiplicity)
{
    if (f.n_vars == 0)
        throw structural_error("formula needs at least one variable");
    for (const auto& c : f.clauses) {
        for (int lit : c)
            if (lit == 0 || static_cast<std::size_t>(std::abs(lit)) > f.n_vars)
                throw structural_error("literal out of range: " + std::to_string(lit));
        if (policy == DuplicatePolicy::reject &&
            (std::abs(c[0]) == std::abs(c[1]) || std::abs(c[0]) == std::abs(c[2]) ||
             std::abs(c[1]) == std::abs(c[2])))
            throw structural_error("clause repeats a variable");
    }
}

/// Parses DIMACS CNF text; every clause must have exactly three literals.
inline CnfFormula parse_dimacs(std::istream& in, DuplicatePolicy policy = DuplicatePolicy::multiplicity)
{
    CnfFormula f;
    long declared_clauses = -1;
    std::vector<int> pending;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first[0] == 'c' || first[0] == '%')
            continue;
        if (first == "p") {
            std::string fmt;
            long vars = 0;
            if (!(ls >> fmt >> vars >> declared_clauses) || fmt != "cnf" || vars <= 0 || declared_clauses < 0)
                throw structural_error("malformed DIMACS header: " + line);
            f.n_vars = static_cast<std::size_t>(vars);
            continue;
        }
        std::istringstream all(line);
        int lit = 0;
        while (all >> lit) {
            if (lit != 0) {
                pending.push_back(lit);
                continue;
            }
            if (pending.size() != 3)
                throw structural_error("clause with " + std::to_string(pending.size()) +
                                       " literals; exactly 3 required");
            f.clauses.push_back({pending[0], pending[1], pending[2]});
            pending.clear();
        }
        if (!all.eof())
            throw structural_error("unexpected token in DIMACS line: " + line);
    }
    if (!pending.empty())
        throw structural_error("last clause is not terminated by 0");
    if (declared_clauses < 0)
        throw structural_error("missing DIMACS header");
    if (static_cast<std::size_t>(declared_clauses) != f.clauses.size())
        throw structural_error("clause count does not match header");
    validate(f, policy);
    return f;
}

inline CnfFormula parse_dimacs(const std::string& text, DuplicatePolicy policy = DuplicatePolicy::multiplicity)
{
    std::istringstream in(text);
    return parse_dimacs(in, policy);
}

namespace detail {

inline bool dpll(std::vector<std::vector<int>> clauses, std::vector<int>& assignment)
{
    // unit propagation
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<std::vector<int>> reduced;
        int unit = 0;
        for (auto& c : clauses) {
            bool satisfied = false;
            std::vector<int> rest;
            for (int lit : c) {
                const int v = assignment[std::abs(lit)];
                if (v == 0)
                    rest.push_back(lit);
                else if ((v > 0) == (lit > 0))
                    satisfied = true;
            }
            if (satisfied)
                continue;
            if (rest.empty())
                return false;
            if (rest.size() == 1 && unit == 0)
                unit = rest[0];
            reduced.push_back(std::move(rest));
        }
        clauses = std::move(reduced);
        if (unit != 0) {
            assignment[std::abs(unit)] = unit > 0 ? 1 : -1;
            changed = true;
        }
    }
    if (clauses.empty())
        return true;
    const int var = std::abs(clauses.front().front());
    for (int value : {1, -1}) {
        auto trial = assignment;
        trial[var] = value;
        if (dpll(clauses, trial)) {
            assignment = std::move(trial);
            return true;
        }
    }
    return false;
}

} // namespace detail

/// DPLL with unit propagation.
inline bool dpll_satisfiable(const CnfFormula& f)
{
    validate(f);
    std::vector<std::vector<int>> clauses;
    for (const auto& c : f.clauses)
        clauses.push_back({c[0], c[1], c[2]});
    std::vector<int> assignment(f.n_vars + 1, 0);
    return detail::dpll(std::move(clauses), assignment);
}

/// Uniform random 3-CNF: each literal picks a variable and a sign independently.
inline CnfFormula random_3cnf(std::mt19937_64& rng, std::size_t n_vars, std::size_t n_clauses)
{
    if (n_vars == 0)
        throw structural_error("formula needs at least one variable");
    std::uniform_int_distribution<int> var(1, static_cast<int>(n_vars));
    std::bernoulli_distribution negate(0.5);
    CnfFormula f{n_vars, {}};
    for (std::size_t c = 0; c < n_clauses; ++c) {
        std::array<int, 3> clause{};
        for (int& lit : clause)
            lit = negate(rng) ? -var(rng) : var(rng);
        f.clauses.push_back(clause);
    }
    return f;
}

enum class GainConvention
{
    /// User x_t hears gain 2 from both X_t and Xbar_t, user xbar_t hears 1 from both;
    /// the block values then match the closed forms exactly.
    proof_consistent,
    /// g(X_t, x_t) = g(Xbar_t, xbar_t) = 2, cross links 1.
    table
};

struct GadgetNetwork
{
    Network network;
    std::vector<std::size_t> clause_bs, clause_user;
    std::vector<std::size_t> pos_bs, neg_bs;     ///< X_t, Xbar_t
    std::vector<std::size_t> pos_user, neg_user; ///< x_t, xbar_t
};

/// Builds the M + 2T network. Clause m uses BS/user index m; variable t uses M + 2t (X_t, x_t) and M + 2t + 1.
inline GadgetNetwork build_3sat_gadget(const CnfFormula& formula,
                                       GainConvention convention = GainConvention::proof_consistent,
                                       DuplicatePolicy policy = DuplicatePolicy::multiplicity)
{
    validate(formula, policy);
    const std::size_t m = formula.clauses.size();
    const std::size_t t_vars = formula.n_vars;
    const std::size_t size = m + 2 * t_vars;

    GadgetNetwork g;
    Matrix gain(size, size, 0.0);
    const double clause_direct = (2.0 * std::sqrt(7.0) + 1.0) / 3.0;
    for (std::size_t c = 0; c < m; ++c) {
        g.clause_bs.push_back(c);
        g.clause_user.push_back(c);
        gain(c, c) = clause_direct;
    }
    for (std::size_t t = 0; t < t_vars; ++t) {
        const std::size_t pos = m + 2 * t;
        const std::size_t neg = pos + 1;
        g.pos_bs.push_back(pos);
        g.neg_bs.push_back(neg);
        g.pos_user.push_back(pos);
        g.neg_user.push_back(neg);
        if (convention == GainConvention::proof_consistent) {
            gain(pos, pos) = 2.0;
            gain(neg, pos) = 2.0;
            gain(pos, neg) = 1.0;
            gain(neg, neg) = 1.0;
        } else {
            gain(pos, pos) = 2.0;
            gain(neg, pos) = 1.0;
            gain(pos, neg) = 1.0;
            gain(neg, neg) = 2.0;
        }
    }
    for (std::size_t c = 0; c < m; ++c) {
        for (int lit : formula.clauses[c]) {
            const std::size_t t = static_cast<std::size_t>(std::abs(lit)) - 1;
            const std::size_t bs = lit > 0 ? g.pos_bs[t] : g.neg_bs[t];
            gain(bs, c) += 1.0;
        }
    }
    g.network = make_network(std::move(gain));
    return g;
}

struct SatEquivalence
{
    bool sat_by_solver = false;
    double network_opt = 0.0;
    bool agrees = false;
    Association best_association;
};

/// Compares DPLL against "gadget optimum >= (sqrt(7) - 1) / 3 - tol".
inline SatEquivalence verify_sat_equivalence(const CnfFormula& formula, double tol = 1e-6,
                                             const BruteForceOptions& opts = {})
{
    const auto gadget = build_3sat_gadget(formula);
    SatEquivalence out;
    out.sat_by_solver = dpll_satisfiable(formula);
    auto best = brute_force_optimum(gadget.network, opts);
    out.network_opt = best.min_sinr;
    out.best_association = std::move(best.association);
    out.agrees = out.sat_by_solver == (out.network_opt >= gadget_threshold() - tol);
    return out;
}

} // namespace mmfa

#endif // MMFA_ORACLE_HPP
