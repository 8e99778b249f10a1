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
 * \file mmfa/twostage.hpp
 *
 * \brief Two-stage algorithms: association from the sum-power relaxation,
 *        then per-BS-feasible power at that association.
 *
 * DLSum runs ULSum on the pooled budget and then the fixed-point power
 * allocation. DLSumA adds two refinements:
 *  - power balancing: scale g(n, k) by budget_n / budget_max and give every
 *    BS budget_max, which leaves the per-BS optimum unchanged but tightens
 *    the relaxation when budgets are very unequal;
 *  - effective sum-power: rerun ULSum with the total power the first
 *    feasible solution actually used, then reallocate power.
 */

#ifndef MMFA_TWOSTAGE_HPP
#define MMFA_TWOSTAGE_HPP

#include <mmfa/model.hpp>
#include <mmfa/power.hpp>
#include <mmfa/sumpower.hpp>

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace mmfa {

struct StageTelemetry
{
    std::string name;
    std::size_t iterations = 0;
    bool converged = false;
    Association association;
    double sum_power = 0.0; ///< budget given to a ULSum stage, or power consumed by a power stage
    double value = 0.0;     ///< relaxation value or achieved min-SINR
};

struct TwoStageResult
{
    SolveResult result;
    double upper_bound = 0.0;
    std::vector<StageTelemetry> stages;
    int chosen_step = 2; ///< 2 or 4: which power stage produced result
};

struct BalancedNetwork
{
    Network net_scaled;
    std::vector<double> alpha; ///< alpha_n = budget_max / budget_n
};

/// g(n, k) <- budget_n g(n, k) / budget_max and every budget <- budget_max.
inline BalancedNetwork power_balance_transform(const Network& net)
{
    validate(net);
    const double pmax = *std::max_element(net.budget.begin(), net.budget.end());
    BalancedNetwork out{net, std::vector<double>(net.n_bs())};
    for (std::size_t n = 0; n < net.n_bs(); ++n) {
        out.alpha[n] = pmax / net.budget[n];
        for (std::size_t k = 0; k < net.n_users(); ++k)
            out.net_scaled.gain(n, k) = net.gain(n, k) / out.alpha[n];
        out.net_scaled.budget[n] = pmax;
    }
    return out;
}

/// Sum-power bound computed on the power-balanced network (ULSumA).
inline double ulsuma_upper_bound(const Network& net, const FixedPointOptions& opts = {})
{
    return upper_bound_sum(power_balance_transform(net).net_scaled, opts);
}

struct TwoStageTechniques
{
    bool power_balancing = false;
    bool effective_sum_power = false;
};

namespace detail {

template <typename F>
auto tagged_stage(const char* tag, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const structural_error& e) {
        throw structural_error(std::string(tag) + ": " + e.what());
    } catch (const infeasible_error& e) {
        throw infeasible_error(std::string(tag) + ": " + e.what());
    }
}

} // namespace detail

/**
 * DLSum with any combination of the two refinements. With both enabled this
 * is DLSumA; with neither it is DLSum.
 *
 * The result is the better of the step-2 and step-4 solutions (step 2 on
 * ties), mapped back to the original network when balancing was applied.
 */
inline TwoStageResult two_stage(const Network& net, TwoStageTechniques techniques, const FixedPointOptions& opts = {})
{
    validate(net);
    BalancedNetwork balanced;
    if (techniques.power_balancing)
        balanced = power_balance_transform(net);
    const Network& work = techniques.power_balancing ? balanced.net_scaled : net;

    TwoStageResult out;
    const double pooled = total_budget(work);
    auto stage1 = detail::tagged_stage("step 1 (ULSum)", [&] { return ulsum(work, pooled, opts); });
    out.upper_bound = stage1.gamma_sum;
    out.stages.push_back({"ulsum", stage1.iterations, stage1.converged, stage1.assoc, pooled, stage1.gamma_sum});

    auto stage2 = detail::tagged_stage("step 2 (power)",
                                       [&] { return solve_power_fixed_assoc(work, stage1.assoc, opts); });
    const double used = detail::sum(stage2.power);
    out.stages.push_back({"power", stage2.iterations, stage2.converged, stage1.assoc, used, stage2.min_sinr});

    SolveResult best = std::move(stage2);
    bool converged = stage1.converged && best.converged;
    if (techniques.effective_sum_power) {
        auto stage3 = detail::tagged_stage("step 3 (ULSum)", [&] { return ulsum(work, used, opts); });
        out.stages.push_back({"ulsum_effective", stage3.iterations, stage3.converged, stage3.assoc, used,
                              stage3.gamma_sum});
        converged = converged && stage3.converged;
        if (stage3.assoc != stage1.assoc) {
            auto stage4 = detail::tagged_stage("step 4 (power)",
                                               [&] { return solve_power_fixed_assoc(work, stage3.assoc, opts); });
            out.stages.push_back({"power_effective", stage4.iterations, stage4.converged, stage3.assoc,
                                  detail::sum(stage4.power), stage4.min_sinr});
            if (stage4.min_sinr > best.min_sinr) {
                converged = stage1.converged && stage3.converged && stage4.converged;
                best = std::move(stage4);
                out.chosen_step = 4;
            }
        }
    }

    if (techniques.power_balancing) {
        // p_k = p'_k / alpha_{a_k} keeps every SINR and maps budget_max back to budget_n
        for (std::size_t k = 0; k < best.power.size(); ++k)
            best.power[k] /= balanced.alpha[best.association[k]];
        evaluate_downlink(net, best);
    }
    best.converged = converged;
    out.result = std::move(best);
    return out;
}

inline TwoStageResult dlsum(const Network& net, const FixedPointOptions& opts = {})
{
    return two_stage(net, {false, false}, opts);
}

inline TwoStageResult dlsuma(const Network& net, const FixedPointOptions& opts = {})
{
    return two_stage(net, {true, true}, opts);
}

} // namespace mmfa

#endif // MMFA_TWOSTAGE_HPP
