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
 * \file mmfa/harness.hpp
 *
 * \brief Monte-Carlo experiment driver.
 *
 * An experiment is a grid of (SNR point, trial index). Trial i draws its
 * network with seed base + i at every SNR point, so results do not depend on
 * the thread count or on execution order. Records are kept in grid order:
 * all trials of the first SNR point, then the next.
 */

#ifndef MMFA_HARNESS_HPP
#define MMFA_HARNESS_HPP

#include <mmfa/io.hpp>
#include <mmfa/matching.hpp>
#include <mmfa/model.hpp>
#include <mmfa/oracle.hpp>
#include <mmfa/power.hpp>
#include <mmfa/scenario.hpp>
#include <mmfa/sumpower.hpp>
#include <mmfa/twostage.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace mmfa {

enum class Algorithm
{
    ulsum,
    ulsuma,
    dlsum,
    dlsuma,
    dlsum_es, ///< DLSum with effective sum-power only
    dlsum_pb, ///< DLSum with power balancing only
    maxsnr,
    aufp,
    p1prime,
    brute_force
};

inline constexpr std::array<std::pair<Algorithm, const char*>, 10> algorithm_names{{
    {Algorithm::ulsum, "ULSum"},
    {Algorithm::ulsuma, "ULSumA"},
    {Algorithm::dlsum, "DLSum"},
    {Algorithm::dlsuma, "DLSumA"},
    {Algorithm::dlsum_es, "DLSumES"},
    {Algorithm::dlsum_pb, "DLSumPB"},
    {Algorithm::maxsnr, "MaxSNR"},
    {Algorithm::aufp, "AUFP"},
    {Algorithm::p1prime, "P1Prime"},
    {Algorithm::brute_force, "BruteForce"},
}};

inline const char* to_string(Algorithm a)
{
    for (const auto& [alg, name] : algorithm_names)
        if (alg == a)
            return name;
    return "?";
}

/// Accepts the registry names case-insensitively plus "brute".
inline Algorithm algorithm_from_string(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "brute")
        return Algorithm::brute_force;
    for (const auto& [alg, name] : algorithm_names) {
        std::string lower(name);
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (lower == s)
            return alg;
    }
    throw structural_error("unknown algorithm: " + s);
}

/// True for the relaxation bounds, whose value is not achievable under per-BS budgets.
inline bool is_relaxation(Algorithm a)
{
    return a == Algorithm::ulsum || a == Algorithm::ulsuma;
}

struct AlgorithmSettings
{
    FixedPointOptions power;
    double aufp_eps = 0.0; ///< 0 picks default_eps of the log-gain problem
    double brute_force_max_candidates = 1e6;
};

struct AlgorithmOutcome
{
    Algorithm algorithm = Algorithm::dlsuma;
    /// "ok", "infeasible" (matching below SINR 1; value still valid), "skipped: ..." or "error: ...".
    std::string status = "ok";
    double min_sinr = std::numeric_limits<double>::quiet_NaN();
    double runtime_ms = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::optional<double> upper_bound;
    SolveResult solution; ///< not serialized

    [[nodiscard]] bool has_value() const { return status == "ok" || status == "infeasible"; }
};

/// Runs one algorithm; errors propagate.
inline AlgorithmOutcome run_algorithm(Algorithm alg, const Network& net, const AlgorithmSettings& settings = {})
{
    AlgorithmOutcome out;
    out.algorithm = alg;
    const auto& popts = settings.power;
    auto from_two_stage = [&](TwoStageResult r) {
        out.min_sinr = r.result.min_sinr;
        out.converged = r.result.converged;
        out.upper_bound = r.upper_bound;
        out.solution = std::move(r.result);
    };
    auto from_matching = [&](MatchingResult r) {
        out.status = r.status == MatchingStatus::optimal ? "ok" : "infeasible";
        out.min_sinr = r.result.min_sinr;
        out.converged = r.result.converged;
        out.solution = std::move(r.result);
    };
    auto from_ulsum = [&](const Network& work, const std::vector<double>* alpha) {
        auto r = ulsum(work, total_budget(work), popts);
        out.min_sinr = r.gamma_sum;
        out.converged = r.converged;
        out.upper_bound = r.gamma_sum;
        out.solution.association = r.assoc;
        out.solution.power = r.power_ul;
        if (alpha)
            for (std::size_t k = 0; k < out.solution.power.size(); ++k)
                out.solution.power[k] /= (*alpha)[r.assoc[k]];
        out.solution.min_sinr = r.gamma_sum;
        out.solution.iterations = r.iterations;
        out.solution.converged = r.converged;
        out.solution.residual = r.residual;
    };

    switch (alg) {
    case Algorithm::ulsum:
        from_ulsum(net, nullptr);
        break;
    case Algorithm::ulsuma: {
        const auto balanced = power_balance_transform(net);
        from_ulsum(balanced.net_scaled, &balanced.alpha);
        break;
    }
    case Algorithm::dlsum:
        from_two_stage(two_stage(net, {false, false}, popts));
        break;
    case Algorithm::dlsuma:
        from_two_stage(two_stage(net, {true, true}, popts));
        break;
    case Algorithm::dlsum_es:
        from_two_stage(two_stage(net, {false, true}, popts));
        break;
    case Algorithm::dlsum_pb:
        from_two_stage(two_stage(net, {true, false}, popts));
        break;
    case Algorithm::maxsnr: {
        auto r = solve_power_fixed_assoc(net, max_snr_association(net), popts);
        out.min_sinr = r.min_sinr;
        out.converged = r.converged;
        out.solution = std::move(r);
        break;
    }
    case Algorithm::aufp: {
        const double eps = settings.aufp_eps > 0.0 ? settings.aufp_eps : default_eps(log_gain_matrix(net));
        AufpOptions aopts;
        aopts.power = popts;
        aopts.warmup_schedule = default_eps_schedule(log_gain_matrix(net));
        from_matching(aufp(net, eps, aopts));
        break;
    }
    case Algorithm::p1prime:
        from_matching(solve_p1prime(net, popts));
        break;
    case Algorithm::brute_force: {
        BruteForceOptions bopts;
        bopts.max_candidates = settings.brute_force_max_candidates;
        bopts.power = popts;
        auto r = brute_force_optimum(net, bopts);
        out.min_sinr = r.min_sinr;
        out.converged = r.converged;
        out.solution = std::move(r);
        break;
    }
    }
    return out;
}

struct ExperimentSpec
{
    ScenarioConfig scenario;
    std::vector<double> snr_db{scenario.snr_db};
    std::vector<Algorithm> algorithms{Algorithm::dlsuma, Algorithm::ulsuma, Algorithm::maxsnr};
    std::size_t n_runs = 500;
    std::uint64_t seed = 1;
    double cdf_clip = 3.0; ///< values above are set to the clip; <= 0 disables clipping
    std::size_t threads = 0; ///< 0 uses the hardware concurrency
    bool timing = false;     ///< record runtimes; off keeps outputs byte-reproducible
    AlgorithmSettings settings;
};

inline void validate(const ExperimentSpec& spec)
{
    validate(spec.scenario);
    if (spec.n_runs < 1)
        throw structural_error("n_runs must be at least 1");
    if (spec.snr_db.empty() || spec.algorithms.empty())
        throw structural_error("experiment needs at least one SNR point and one algorithm");
    if (std::find(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::brute_force) != spec.algorithms.end()) {
        const double space = std::pow(static_cast<double>(spec.scenario.n_bs()),
                                      static_cast<double>(spec.scenario.n_users));
        if (space > spec.settings.brute_force_max_candidates)
            throw size_cap_error("BruteForce requested but N^K exceeds the candidate cap");
    }
}

struct TrialRecord
{
    std::uint64_t seed = 0;
    double snr_db = 0.0;
    std::vector<AlgorithmOutcome> outcomes;
};

/// Generates the trial network and runs every selected algorithm; failures are recorded per algorithm.
inline TrialRecord run_trial(const ExperimentSpec& spec, std::uint64_t seed, double snr_db)
{
    TrialRecord rec{seed, snr_db, {}};
    ScenarioConfig cfg = spec.scenario;
    cfg.seed = seed;
    cfg.snr_db = snr_db;

    std::optional<Network> net;
    std::string gen_error;
    try {
        net = generate_hetnet(cfg).network;
    } catch (const std::exception& e) {
        gen_error = std::string("error: ") + e.what();
    }

    for (auto alg : spec.algorithms) {
        AlgorithmOutcome out;
        out.algorithm = alg;
        if (!net) {
            out.status = gen_error;
        } else if ((alg == Algorithm::aufp || alg == Algorithm::p1prime) && net->n_bs() != net->n_users()) {
            out.status = "skipped: K != N";
        } else {
            try {
                const auto t0 = std::chrono::steady_clock::now();
                out = run_algorithm(alg, *net, spec.settings);
                const auto t1 = std::chrono::steady_clock::now();
                if (spec.timing)
                    out.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            } catch (const std::exception& e) {
                out = AlgorithmOutcome{};
                out.algorithm = alg;
                out.status = std::string("error: ") + e.what();
            }
        }
        out.solution = {};
        rec.outcomes.push_back(std::move(out));
    }
    return rec;
}

inline const AlgorithmOutcome* find_outcome(const TrialRecord& rec, Algorithm alg)
{
    for (const auto& o : rec.outcomes)
        if (o.algorithm == alg)
            return &o;
    return nullptr;
}

/**
 * Per-trial dominance checks: every achievable value is at most each
 * relaxation bound and MaxSNR is at most BruteForce. Returns one message per
 * violation.
 */
inline std::vector<std::string> check_record(const TrialRecord& rec, double rel_tol = 1e-9)
{
    std::vector<std::string> bad;
    auto leq = [&](double a, double b) { return a <= b + rel_tol * std::max(1.0, std::abs(b)); };
    for (auto bound_alg : {Algorithm::ulsum, Algorithm::ulsuma}) {
        const auto* bound = find_outcome(rec, bound_alg);
        if (!bound || !bound->has_value())
            continue;
        for (const auto& o : rec.outcomes)
            if (!is_relaxation(o.algorithm) && o.has_value() && !leq(o.min_sinr, bound->min_sinr))
                bad.push_back(std::string(to_string(o.algorithm)) + " exceeds " + to_string(bound_alg));
    }
    for (const auto& o : rec.outcomes)
        if (!is_relaxation(o.algorithm) && o.has_value() && o.upper_bound && !leq(o.min_sinr, *o.upper_bound))
            bad.push_back(std::string(to_string(o.algorithm)) + " exceeds its own upper bound");
    const auto* ms = find_outcome(rec, Algorithm::maxsnr);
    const auto* bf = find_outcome(rec, Algorithm::brute_force);
    if (ms && bf && ms->has_value() && bf->has_value() && !leq(ms->min_sinr, bf->min_sinr))
        bad.push_back("MaxSNR exceeds BruteForce");
    return bad;
}

struct CdfPoint
{
    double value = 0.0;
    double cumulative_probability = 0.0;
};

struct PointSummary
{
    Algorithm algorithm = Algorithm::dlsuma;
    double snr_db = 0.0;
    std::size_t count = 0; ///< records with a value
    std::size_t failures = 0;
    std::size_t skipped = 0;
    double mean = std::numeric_limits<double>::quiet_NaN(); ///< of linear min-SINR
    std::vector<CdfPoint> cdf;
};

/// Empirical CDF after clipping values above clip (clip <= 0 disables).
inline std::vector<CdfPoint> empirical_cdf(std::vector<double> values, double clip)
{
    if (clip > 0.0)
        for (double& v : values)
            v = std::min(v, clip);
    std::sort(values.begin(), values.end());
    std::vector<CdfPoint> cdf;
    const auto n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        cdf.push_back({values[i], static_cast<double>(i + 1) / n});
    return cdf;
}

/// Aggregates in the order of (snr_points, algorithms).
inline std::vector<PointSummary> summarize(const std::vector<TrialRecord>& records,
                                           const std::vector<double>& snr_points,
                                           const std::vector<Algorithm>& algorithms, double cdf_clip)
{
    std::vector<PointSummary> out;
    for (double snr : snr_points)
        for (auto alg : algorithms) {
            PointSummary s;
            s.algorithm = alg;
            s.snr_db = snr;
            std::vector<double> values;
            for (const auto& rec : records) {
                if (rec.snr_db != snr)
                    continue;
                const auto* o = find_outcome(rec, alg);
                if (!o)
                    continue;
                if (o->has_value())
                    values.push_back(o->min_sinr);
                else if (o->status.rfind("skipped", 0) == 0)
                    ++s.skipped;
                else
                    ++s.failures;
            }
            s.count = values.size();
            if (!values.empty()) {
                double total = 0.0;
                for (double v : values)
                    total += v;
                s.mean = total / static_cast<double>(values.size());
            }
            s.cdf = empirical_cdf(std::move(values), cdf_clip);
            out.push_back(std::move(s));
        }
    return out;
}

struct MonteCarloResult
{
    std::vector<TrialRecord> records;
    std::vector<PointSummary> points;

    [[nodiscard]] const PointSummary* point(Algorithm alg, double snr_db) const
    {
        for (const auto& p : points)
            if (p.algorithm == alg && p.snr_db == snr_db)
                return &p;
        return nullptr;
    }
};

inline MonteCarloResult monte_carlo(const ExperimentSpec& spec)
{
    validate(spec);
    const std::size_t n_jobs = spec.snr_db.size() * spec.n_runs;
    MonteCarloResult result;
    result.records.resize(n_jobs);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < n_jobs; job = next++) {
            const std::size_t snr_index = job / spec.n_runs;
            const std::size_t trial = job % spec.n_runs;
            result.records[job] = run_trial(spec, spec.seed + trial, spec.snr_db[snr_index]);
        }
    };
    std::size_t n_threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, n_jobs);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
    }
    result.points = summarize(result.records, spec.snr_db, spec.algorithms, spec.cdf_clip);
    return result;
}

// ---------------------------------------------------------------------------
// Export

/// Shortest text that round-trips; "NA" for NaN.
inline std::string format_double(double v)
{
    if (std::isnan(v))
        return "NA";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

inline constexpr const char* csv_header = "n_macro,picos_per_macro,n_users,user_dist,snr_db,seed,algorithm,status,"
                                          "min_sinr_linear,min_sinr_db,runtime_ms,converged,upper_bound";

inline std::string csv_field(std::string s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + '"';
}

/// One row per (record, algorithm); an empty record set gives the header only.
inline void export_csv(const std::vector<TrialRecord>& records, const ScenarioConfig& scenario, std::ostream& out)
{
    out << csv_header << '\n';
    for (const auto& rec : records)
        for (const auto& o : rec.outcomes) {
            const bool has = o.has_value();
            out << scenario.n_macro << ',' << scenario.picos_per_macro << ',' << scenario.n_users << ','
                << to_string(scenario.user_dist) << ',' << format_double(rec.snr_db) << ',' << rec.seed << ','
                << to_string(o.algorithm) << ',' << csv_field(o.status) << ','
                << (has ? format_double(o.min_sinr) : "NA") << ','
                << (has && o.min_sinr > 0.0 ? format_double(to_db(o.min_sinr)) : "NA") << ','
                << format_double(o.runtime_ms) << ',' << (o.converged ? "true" : "false") << ','
                << (o.upper_bound ? format_double(*o.upper_bound) : "NA") << '\n';
        }
}

inline void export_cdf_csv(const std::vector<PointSummary>& points, std::ostream& out)
{
    out << "algorithm,snr_db,value,cumulative_probability\n";
    for (const auto& p : points)
        for (const auto& c : p.cdf)
            out << to_string(p.algorithm) << ',' << format_double(p.snr_db) << ',' << format_double(c.value) << ','
                << format_double(c.cumulative_probability) << '\n';
}

inline void export_means_csv(const std::vector<PointSummary>& points, std::ostream& out)
{
    out << "algorithm,snr_db,count,failures,skipped,mean_min_sinr_linear,mean_min_sinr_db\n";
    for (const auto& p : points)
        out << to_string(p.algorithm) << ',' << format_double(p.snr_db) << ',' << p.count << ',' << p.failures << ','
            << p.skipped << ',' << format_double(p.mean) << ','
            << (p.mean > 0.0 ? format_double(to_db(p.mean)) : "NA") << '\n';
}

inline json to_json(const ExperimentSpec& spec)
{
    json algs = json::array();
    for (auto a : spec.algorithms)
        algs.push_back(to_string(a));
    json j;
    j["scenario"] = to_json(spec.scenario);
    j["snr_db"] = spec.snr_db;
    j["algorithms"] = std::move(algs);
    j["n_runs"] = spec.n_runs;
    j["seed"] = spec.seed;
    j["cdf_clip"] = spec.cdf_clip;
    j["threads"] = spec.threads;
    j["timing"] = spec.timing;
    j["tol"] = spec.settings.power.tol;
    j["max_iter"] = spec.settings.power.max_iter;
    j["aufp_eps"] = spec.settings.aufp_eps;
    j["brute_force_max_candidates"] = spec.settings.brute_force_max_candidates;
    return j;
}

/// Missing fields keep their defaults; "snr_db" may be a number or a list.
inline ExperimentSpec experiment_from_json(const json& j)
{
    ExperimentSpec spec;
    try {
        if (j.contains("scenario"))
            spec.scenario = scenario_from_json(j.at("scenario"));
        spec.snr_db = {spec.scenario.snr_db};
        if (j.contains("snr_db"))
            spec.snr_db = j.at("snr_db").is_array() ? j.at("snr_db").get<std::vector<double>>()
                                                    : std::vector<double>{j.at("snr_db").get<double>()};
        if (j.contains("algorithms")) {
            spec.algorithms.clear();
            for (const auto& a : j.at("algorithms"))
                spec.algorithms.push_back(algorithm_from_string(a.get<std::string>()));
        }
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key) && !j.at(key).is_null())
                field = j.at(key).get<std::decay_t<decltype(field)>>();
        };
        get("n_runs", spec.n_runs);
        get("seed", spec.seed);
        get("cdf_clip", spec.cdf_clip);
        get("threads", spec.threads);
        get("timing", spec.timing);
        get("tol", spec.settings.power.tol);
        get("max_iter", spec.settings.power.max_iter);
        get("aufp_eps", spec.settings.aufp_eps);
        get("brute_force_max_candidates", spec.settings.brute_force_max_candidates);
    } catch (const json::exception& e) {
        throw structural_error(std::string("experiment JSON: ") + e.what());
    }
    validate(spec);
    return spec;
}

inline json to_json(const TrialRecord& rec)
{
    auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    json outcomes = json::array();
    for (const auto& o : rec.outcomes)
        outcomes.push_back({{"algorithm", to_string(o.algorithm)},
                            {"status", o.status},
                            {"min_sinr", num(o.min_sinr)},
                            {"runtime_ms", num(o.runtime_ms)},
                            {"converged", o.converged},
                            {"upper_bound", o.upper_bound ? json(*o.upper_bound) : json(nullptr)}});
    return {{"seed", rec.seed}, {"snr_db", rec.snr_db}, {"outcomes", std::move(outcomes)}};
}

inline TrialRecord record_from_json(const json& j)
{
    auto num = [](const json& v) { return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>(); };
    TrialRecord rec;
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.snr_db = j.at("snr_db").get<double>();
    for (const auto& o : j.at("outcomes")) {
        AlgorithmOutcome out;
        out.algorithm = algorithm_from_string(o.at("algorithm").get<std::string>());
        out.status = o.at("status").get<std::string>();
        out.min_sinr = num(o.at("min_sinr"));
        out.runtime_ms = num(o.at("runtime_ms"));
        out.converged = o.at("converged").get<bool>();
        if (!o.at("upper_bound").is_null())
            out.upper_bound = o.at("upper_bound").get<double>();
        rec.outcomes.push_back(std::move(out));
    }
    return rec;
}

inline json export_json(const ExperimentSpec& spec, const std::vector<TrialRecord>& records)
{
    json recs = json::array();
    for (const auto& r : records)
        recs.push_back(to_json(r));
    return {{"spec", to_json(spec)}, {"records", std::move(recs)}};
}

struct ImportedResults
{
    ExperimentSpec spec;
    std::vector<TrialRecord> records;
};

inline ImportedResults import_json(const json& j)
{
    try {
        ImportedResults out{experiment_from_json(j.at("spec")), {}};
        for (const auto& r : j.at("records"))
            out.records.push_back(record_from_json(r));
        return out;
    } catch (const json::exception& e) {
        throw structural_error(std::string("results JSON: ") + e.what());
    }
}

} // namespace mmfa

#endif // MMFA_HARNESS_HPP
