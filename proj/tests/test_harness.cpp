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

#include <mmfa/harness.hpp>
#include <mmfa/io.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace mmfa;

namespace {

ExperimentSpec small_spec()
{
    ExperimentSpec spec;
    spec.scenario.n_macro = 4;
    spec.scenario.picos_per_macro = 2;
    spec.scenario.n_users = 8;
    spec.snr_db = {10.0, 30.0};
    spec.algorithms = {Algorithm::dlsuma, Algorithm::ulsuma, Algorithm::maxsnr, Algorithm::dlsum};
    spec.n_runs = 12;
    spec.seed = 5;
    spec.threads = 1;
    return spec;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::path(testing::TempDir()) / ("mmfa_" + name);
    std::filesystem::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args)
{
    const int raw = std::system((std::string(MMFA_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

} // namespace

TEST(Algorithms, NamesRoundTrip)
{
    for (const auto& [alg, name] : algorithm_names)
        EXPECT_EQ(algorithm_from_string(name), alg);
    EXPECT_EQ(algorithm_from_string("dlsuma"), Algorithm::dlsuma);
    EXPECT_EQ(algorithm_from_string("brute"), Algorithm::brute_force);
    EXPECT_THROW(algorithm_from_string("simplex"), structural_error);
    EXPECT_TRUE(is_relaxation(Algorithm::ulsum));
    EXPECT_TRUE(is_relaxation(Algorithm::ulsuma));
    EXPECT_FALSE(is_relaxation(Algorithm::dlsuma));
}

TEST(Algorithms, MaxSnrSingleUser)
{
    Matrix g(3, 1);
    g(0, 0) = 0.5;
    g(1, 0) = 0.2;
    g(2, 0) = 0.1;
    const auto net = make_network(g, {1.0, 10.0, 2.0}, {0.5}, {1.0, 1.0, 1.0});
    const auto out = run_algorithm(Algorithm::maxsnr, net);
    EXPECT_EQ(out.solution.association, Association{1});
    EXPECT_NEAR(out.min_sinr, 10.0 * 0.2 / 0.5, 1e-9);
}

TEST(Algorithms, BruteForceDominatesHeuristicsOnSmallSquare)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = random_network(rng, 3, 3);
        const double best = run_algorithm(Algorithm::brute_force, net).min_sinr;
        for (auto alg : {Algorithm::dlsum, Algorithm::dlsuma, Algorithm::maxsnr, Algorithm::aufp, Algorithm::p1prime})
            EXPECT_LE(run_algorithm(alg, net).min_sinr, best * (1.0 + 1e-9)) << to_string(alg);
    }
}

TEST(Trials, RecordsPassDominanceChecks)
{
    auto spec = small_spec();
    spec.algorithms = {Algorithm::dlsuma, Algorithm::ulsuma, Algorithm::dlsum, Algorithm::ulsum, Algorithm::maxsnr,
                       Algorithm::dlsum_es, Algorithm::dlsum_pb};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto rec = run_trial(spec, seed, 20.0);
        EXPECT_TRUE(check_record(rec).empty()) << "seed " << seed;
        for (const auto& o : rec.outcomes)
            EXPECT_EQ(o.status, "ok");
    }
}

TEST(Trials, CheckRecordFlagsViolations)
{
    TrialRecord rec{1, 0.0, {}};
    AlgorithmOutcome bound;
    bound.algorithm = Algorithm::ulsuma;
    bound.min_sinr = 1.0;
    AlgorithmOutcome heuristic;
    heuristic.algorithm = Algorithm::dlsuma;
    heuristic.min_sinr = 1.5;
    rec.outcomes = {bound, heuristic};
    EXPECT_EQ(check_record(rec).size(), 1u);
    rec.outcomes[1].min_sinr = 0.9;
    EXPECT_TRUE(check_record(rec).empty());
}

TEST(Trials, MatchingSkippedWhenNotSquare)
{
    auto spec = small_spec();
    spec.algorithms = {Algorithm::aufp, Algorithm::p1prime};
    const auto rec = run_trial(spec, 1, 15.0);
    for (const auto& o : rec.outcomes) {
        EXPECT_EQ(o.status, "skipped: K != N");
        EXPECT_FALSE(o.has_value());
    }
    spec.n_runs = 3;
    const auto r = monte_carlo(spec);
    EXPECT_EQ(r.point(Algorithm::aufp, 10.0)->skipped, 3u);
    EXPECT_EQ(r.point(Algorithm::aufp, 10.0)->count, 0u);
}

TEST(Trials, SquareScenarioRunsMatching)
{
    auto spec = small_spec();
    spec.scenario.n_users = 12;
    spec.algorithms = {Algorithm::aufp, Algorithm::p1prime};
    const auto rec = run_trial(spec, 3, 30.0);
    for (const auto& o : rec.outcomes)
        EXPECT_TRUE(o.has_value()) << o.status;
}

TEST(MonteCarlo, SingleRunMeanIsTheValue)
{
    auto spec = small_spec();
    spec.n_runs = 1;
    const auto r = monte_carlo(spec);
    ASSERT_EQ(r.records.size(), 2u);
    for (const auto& rec : r.records)
        for (const auto& o : rec.outcomes)
            EXPECT_EQ(r.point(o.algorithm, rec.snr_db)->mean, o.min_sinr);
}

TEST(MonteCarlo, SeedsRepeatAcrossSnrPoints)
{
    const auto r = monte_carlo(small_spec());
    ASSERT_EQ(r.records.size(), 24u);
    for (std::size_t i = 0; i < 12; ++i) {
        EXPECT_EQ(r.records[i].seed, 5 + i);
        EXPECT_EQ(r.records[i].snr_db, 10.0);
        EXPECT_EQ(r.records[12 + i].seed, 5 + i);
        EXPECT_EQ(r.records[12 + i].snr_db, 30.0);
    }
}

TEST(MonteCarlo, DuplicateAlgorithmsGiveIdenticalColumns)
{
    auto spec = small_spec();
    spec.algorithms = {Algorithm::dlsuma, Algorithm::dlsuma};
    const auto r = monte_carlo(spec);
    for (const auto& rec : r.records)
        EXPECT_EQ(rec.outcomes[0].min_sinr, rec.outcomes[1].min_sinr);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults)
{
    auto spec = small_spec();
    const auto one = monte_carlo(spec);
    spec.threads = 4;
    const auto four = monte_carlo(spec);
    std::ostringstream a, b;
    export_csv(one.records, spec.scenario, a);
    export_csv(four.records, spec.scenario, b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(MonteCarlo, OrderingAtHighSnr)
{
    auto spec = small_spec();
    spec.snr_db = {30.0};
    spec.n_runs = 40;
    const auto r = monte_carlo(spec);
    const double ul = r.point(Algorithm::ulsuma, 30.0)->mean;
    const double dl = r.point(Algorithm::dlsuma, 30.0)->mean;
    const double ms = r.point(Algorithm::maxsnr, 30.0)->mean;
    EXPECT_GE(ul, dl);
    EXPECT_GT(dl, ms);
    for (const auto& rec : r.records)
        EXPECT_TRUE(check_record(rec).empty());
}

TEST(Cdf, ClipsAndSorts)
{
    const auto cdf = empirical_cdf({2.0, 0.5, 7.0, 1.0}, 3.0);
    ASSERT_EQ(cdf.size(), 4u);
    EXPECT_EQ(cdf[0].value, 0.5);
    EXPECT_EQ(cdf[3].value, 3.0);
    EXPECT_EQ(cdf[3].cumulative_probability, 1.0);
    EXPECT_EQ(cdf[1].cumulative_probability, 0.5);
    EXPECT_EQ(empirical_cdf({7.0}, 0.0)[0].value, 7.0);
}

TEST(Export, EmptyResultsGiveHeaderOnly)
{
    std::ostringstream os;
    export_csv({}, ScenarioConfig{}, os);
    EXPECT_EQ(os.str(), std::string(csv_header) + "\n");
}

TEST(Export, FormatDouble)
{
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "NA");
    const double x = 1.0 / 3.0;
    EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(Export, OneRecordCsvAndJsonRoundTrip)
{
    auto spec = small_spec();
    spec.n_runs = 1;
    spec.snr_db = {15.0};
    const auto r = monte_carlo(spec);
    std::ostringstream os;
    export_csv(r.records, spec.scenario, os);
    std::istringstream lines(os.str());
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line))
        ++n;
    EXPECT_EQ(n, 1 + spec.algorithms.size());

    const auto imported = import_json(json::parse(export_json(spec, r.records).dump()));
    ASSERT_EQ(imported.records.size(), 1u);
    std::ostringstream again;
    export_csv(imported.records, imported.spec.scenario, again);
    EXPECT_EQ(again.str(), os.str());
    EXPECT_EQ(to_json(imported.spec), to_json(spec));
}

TEST(Export, ReimportKeepsMeans)
{
    auto spec = small_spec();
    spec.n_runs = 250;
    spec.threads = 0;
    const auto r = monte_carlo(spec);
    ASSERT_EQ(r.records.size(), 500u);
    const auto imported = import_json(json::parse(export_json(spec, r.records).dump()));
    const auto points = summarize(imported.records, spec.snr_db, spec.algorithms, spec.cdf_clip);
    ASSERT_EQ(points.size(), r.points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        EXPECT_EQ(points[i].mean, r.points[i].mean);
        EXPECT_EQ(points[i].count, r.points[i].count);
    }
}

TEST(Spec, ValidationAndDefaults)
{
    auto spec = small_spec();
    spec.algorithms.push_back(Algorithm::brute_force);
    EXPECT_THROW(validate(spec), size_cap_error);
    spec = small_spec();
    spec.n_runs = 0;
    EXPECT_THROW(validate(spec), structural_error);
    const auto parsed = experiment_from_json(json::parse(R"({"snr_db": 12, "algorithms": ["MaxSNR"]})"));
    EXPECT_EQ(parsed.snr_db, std::vector<double>{12.0});
    EXPECT_EQ(parsed.algorithms, std::vector<Algorithm>{Algorithm::maxsnr});
    EXPECT_EQ(parsed.n_runs, 500u);
    EXPECT_THROW(experiment_from_json(json::parse(R"({"n_runs": "many"})")), structural_error);
}

TEST(Cli, GenSolveAndExitCodes)
{
    const auto dir = scratch_dir("cli_solve");
    const auto cfg = dir / "cfg.json";
    const auto net = dir / "net.json";
    {
        std::ofstream(cfg) << R"({"n_macro": 2, "picos_per_macro": 1, "n_users": 4})";
    }
    EXPECT_EQ(run_cli("gen --config " + cfg.string() + " --seed 3 --out " + net.string()), 0);
    const auto loaded = network_from_json(read_json_file(net.string()));
    EXPECT_EQ(loaded.n_bs(), 4u);
    EXPECT_EQ(loaded.n_users(), 4u);
    EXPECT_EQ(run_cli("solve --net " + net.string() + " --alg DLSumA"), 0);
    EXPECT_EQ(run_cli("solve --net " + net.string() + " --alg brute"), 0);
    EXPECT_EQ(run_cli("solve --net " + net.string() + " --alg nonsense"), 1);
    EXPECT_EQ(run_cli("solve --net " + (dir / "missing.json").string()), 1);
    EXPECT_EQ(run_cli("frobnicate"), 1);

    // equal gains: no matching reaches SINR 1
    {
        std::ofstream(dir / "flat.json") << R"({"gain": [[1, 1], [1, 1]]})";
    }
    EXPECT_EQ(run_cli("solve --net " + (dir / "flat.json").string() + " --alg P1Prime"), 2);
}

TEST(Cli, SweepIsReproducibleAndGadgetVerifies)
{
    const auto dir = scratch_dir("cli_sweep");
    {
        std::ofstream(dir / "spec.json") << to_json(small_spec()).dump();
        std::ofstream(dir / "f.cnf") << "p cnf 2 2\n1 2 -1 0\n-2 -2 1 0\n";
    }
    const auto spec = (dir / "spec.json").string();
    EXPECT_EQ(run_cli("sweep --spec " + spec + " --out " + (dir / "a.csv").string() + " --json " +
                      (dir / "a.json").string() + " --means " + (dir / "m.csv").string()),
              0);
    EXPECT_EQ(run_cli("sweep --spec " + spec + " --out " + (dir / "b.csv").string() + " --threads 3"), 0);
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    EXPECT_EQ(run_cli("cdf --spec " + spec + " --out " + (dir / "c.csv").string()), 0);
    EXPECT_EQ(slurp(dir / "c.csv").rfind("algorithm,snr_db,value,cumulative_probability\n", 0), 0u);
    EXPECT_EQ(run_cli("gadget --cnf " + (dir / "f.cnf").string() + " --verify"), 0);
    EXPECT_EQ(run_cli("selftest --instances 10"), 0);
}
