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

// Command-line front end: scenario generation, single solves, Monte-Carlo sweeps,
// the 3-SAT gadget and a self-test. Exit codes: 0 ok, 1 usage or I/O error,
// 2 infeasible, not converged or a failed check.

#include <mmfa/mmfa.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_flagged = 2;

int cmd_gen(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_path,
            const std::string& geometry_path)
{
    auto config = config_path.empty() ? mmfa::ScenarioConfig{}
                                      : mmfa::scenario_from_json(mmfa::read_json_file(config_path));
    if (seed)
        config.seed = *seed;
    const auto s = mmfa::generate_hetnet(config);
    const auto text = mmfa::to_json(s.network).dump(2) + "\n";
    if (out_path.empty() || out_path == "-")
        std::cout << text;
    else
        mmfa::write_text_file(out_path, text);
    if (!geometry_path.empty())
        mmfa::write_text_file(geometry_path, mmfa::to_json(s.geometry).dump(2) + "\n");
    return exit_ok;
}

int cmd_solve(const std::string& net_path, const std::string& alg_name, double eps, std::optional<double> tol,
              std::optional<std::size_t> max_iter)
{
    const auto net = mmfa::network_from_json(mmfa::read_json_file(net_path));
    const auto alg = mmfa::algorithm_from_string(alg_name);
    mmfa::AlgorithmSettings settings;
    settings.aufp_eps = eps;
    if (tol) {
        settings.power.tol = *tol;
        settings.power.abs_tol = *tol;
    }
    if (max_iter)
        settings.power.max_iter = *max_iter;
    const auto out = mmfa::run_algorithm(alg, net, settings);
    mmfa::json j;
    j["algorithm"] = mmfa::to_string(alg);
    j["status"] = out.status;
    j["relaxation"] = mmfa::is_relaxation(alg);
    j["upper_bound"] = out.upper_bound ? mmfa::json(*out.upper_bound) : mmfa::json(nullptr);
    j["result"] = mmfa::to_json(out.solution);
    std::cout << j.dump(2) << "\n";
    return out.status == "ok" && out.converged ? exit_ok : exit_flagged;
}

mmfa::ExperimentSpec load_spec(const std::string& path, std::optional<std::uint64_t> seed,
                               std::optional<std::size_t> threads)
{
    auto spec = mmfa::experiment_from_json(mmfa::read_json_file(path));
    if (seed)
        spec.seed = *seed;
    if (threads)
        spec.threads = *threads;
    return spec;
}

void write_stream(const std::string& path, const std::function<void(std::ostream&)>& emit)
{
    std::ostringstream os;
    emit(os);
    mmfa::write_text_file(path, os.str());
}

int report_checks(const mmfa::MonteCarloResult& r)
{
    std::size_t violations = 0;
    std::size_t errors = 0;
    for (const auto& rec : r.records) {
        for (const auto& msg : mmfa::check_record(rec)) {
            if (violations++ < 10)
                std::cerr << "seed " << rec.seed << " snr " << rec.snr_db << ": " << msg << "\n";
        }
        for (const auto& o : rec.outcomes)
            errors += o.status.rfind("error", 0) == 0 ? 1 : 0;
    }
    for (const auto& p : r.points)
        std::cerr << mmfa::to_string(p.algorithm) << " @ " << mmfa::format_double(p.snr_db)
                  << " dB: mean " << mmfa::format_double(p.mean) << " over " << p.count << " runs\n";
    if (errors)
        std::cerr << errors << " algorithm runs ended with an error status\n";
    if (violations) {
        std::cerr << violations << " dominance violations\n";
        return exit_flagged;
    }
    return exit_ok;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_path, const std::string& json_path,
              const std::string& means_path, const std::string& cdf_path, std::optional<std::uint64_t> seed,
              std::optional<std::size_t> threads)
{
    const auto spec = load_spec(spec_path, seed, threads);
    const auto r = mmfa::monte_carlo(spec);
    write_stream(out_path, [&](std::ostream& os) { mmfa::export_csv(r.records, spec.scenario, os); });
    if (!json_path.empty())
        mmfa::write_text_file(json_path, mmfa::export_json(spec, r.records).dump(1) + "\n");
    if (!means_path.empty())
        write_stream(means_path, [&](std::ostream& os) { mmfa::export_means_csv(r.points, os); });
    if (!cdf_path.empty())
        write_stream(cdf_path, [&](std::ostream& os) { mmfa::export_cdf_csv(r.points, os); });
    return report_checks(r);
}

int cmd_cdf(const std::string& spec_path, const std::string& out_path, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> threads)
{
    const auto spec = load_spec(spec_path, seed, threads);
    const auto r = mmfa::monte_carlo(spec);
    write_stream(out_path, [&](std::ostream& os) { mmfa::export_cdf_csv(r.points, os); });
    return report_checks(r);
}

int cmd_gadget(const std::string& cnf_path, bool verify, const std::string& out_path)
{
    std::ifstream in(cnf_path);
    if (!in)
        throw std::runtime_error("cannot open " + cnf_path);
    const auto formula = mmfa::parse_dimacs(in);
    const auto gadget = mmfa::build_3sat_gadget(formula);
    if (!out_path.empty())
        mmfa::write_text_file(out_path, mmfa::to_json(gadget.network).dump(2) + "\n");
    mmfa::json j;
    j["n_vars"] = formula.n_vars;
    j["n_clauses"] = formula.clauses.size();
    j["n_bs"] = gadget.network.n_bs();
    j["threshold"] = mmfa::gadget_threshold();
    if (!verify) {
        std::cout << j.dump(2) << "\n";
        return exit_ok;
    }
    const auto v = mmfa::verify_sat_equivalence(formula);
    j["satisfiable"] = v.sat_by_solver;
    j["network_optimum"] = v.network_opt;
    j["agrees"] = v.agrees;
    j["best_association"] = v.best_association;
    std::cout << j.dump(2) << "\n";
    return v.agrees ? exit_ok : exit_flagged;
}

int cmd_selftest(std::uint64_t seed, std::size_t instances)
{
    const auto report = mmfa::run_selftest(seed, instances);
    for (const auto& c : report.checks) {
        std::cout << (c.passed() ? "PASS " : "FAIL ") << c.name << " (" << c.cases - c.failures << "/" << c.cases
                  << ")";
        if (!c.first_failure.empty())
            std::cout << ": " << c.first_failure;
        std::cout << "\n";
    }
    return report.passed() ? exit_ok : exit_flagged;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Max-min fair user association and power allocation"};
    app.require_subcommand(1);

    std::string config_path, out_path, geometry_path, net_path, alg_name = "DLSumA", spec_path, json_path,
        means_path, cdf_path, cnf_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads, max_iter;
    std::optional<double> tol;
    double eps = 0.0;
    bool verify = false;
    std::uint64_t selftest_seed = 1;
    std::size_t instances = 100;

    auto* gen = app.add_subcommand("gen", "generate a HetNet scenario as network JSON");
    gen->add_option("--config", config_path, "scenario JSON (defaults when omitted)")->check(CLI::ExistingFile);
    gen->add_option("--seed", seed, "override the scenario seed");
    gen->add_option("--out", out_path, "network JSON output ('-' for stdout)");
    gen->add_option("--geometry", geometry_path, "write BS and user positions");

    auto* solve = app.add_subcommand("solve", "run one algorithm on a network JSON");
    solve->add_option("--net", net_path, "network JSON")->required()->check(CLI::ExistingFile);
    solve->add_option("--alg", alg_name,
                      "DLSumA, DLSum, DLSumES, DLSumPB, ULSum, ULSumA, AUFP, P1Prime, MaxSNR or BruteForce");
    solve->add_option("--eps", eps, "AUFP bidding increment (0 picks a default)")->check(CLI::NonNegativeNumber);
    solve->add_option("--tol", tol, "fixed-point tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--max-iter", max_iter, "fixed-point iteration cap");

    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep to per-trial CSV");
    sweep->add_option("--spec", spec_path, "experiment JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out_path, "per-trial CSV")->required();
    sweep->add_option("--json", json_path, "full results JSON (re-importable)");
    sweep->add_option("--means", means_path, "per-point mean CSV");
    sweep->add_option("--cdf", cdf_path, "empirical CDF CSV");
    sweep->add_option("--seed", seed, "override the base seed");
    sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* cdf = app.add_subcommand("cdf", "Monte-Carlo sweep to empirical CDF CSV");
    cdf->add_option("--spec", spec_path, "experiment JSON")->required()->check(CLI::ExistingFile);
    cdf->add_option("--out", out_path, "CDF CSV")->required();
    cdf->add_option("--seed", seed, "override the base seed");
    cdf->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* gadget = app.add_subcommand("gadget", "build the 3-SAT reduction network from DIMACS CNF");
    gadget->add_option("--cnf", cnf_path, "DIMACS file with 3-literal clauses")->required()->check(CLI::ExistingFile);
    gadget->add_flag("--verify", verify, "compare satisfiability with the network optimum");
    gadget->add_option("--out", out_path, "write the gadget network JSON");

    auto* selftest = app.add_subcommand("selftest", "randomized cross-checks against independent oracles");
    selftest->add_option("--seed", selftest_seed, "random seed");
    selftest->add_option("--instances", instances, "cases per check")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_error;
    }

    try {
        if (*gen)
            return cmd_gen(config_path, seed, out_path, geometry_path);
        if (*solve)
            return cmd_solve(net_path, alg_name, eps, tol, max_iter);
        if (*sweep)
            return cmd_sweep(spec_path, out_path, json_path, means_path, cdf_path, seed, threads);
        if (*cdf)
            return cmd_cdf(spec_path, out_path, seed, threads);
        if (*gadget)
            return cmd_gadget(cnf_path, verify, out_path);
        if (*selftest)
            return cmd_selftest(selftest_seed, instances);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}
