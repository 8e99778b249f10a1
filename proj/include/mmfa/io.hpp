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
 * \file mmfa/io.hpp
 *
 * \brief JSON forms of Network, SolveResult, ScenarioConfig and Geometry.
 *
 * A network document is
 *   {"n_bs": N, "n_users": K, "gain": [N*K values, row-major],
 *    "budget": [N], "noise_dl": [K], "noise_ul": [N]}.
 * "gain" may also be given as N rows of K values.
 */

#ifndef MMFA_IO_HPP
#define MMFA_IO_HPP

#include <mmfa/model.hpp>
#include <mmfa/scenario.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mmfa {

using json = nlohmann::json;

inline json to_json(const Network& net)
{
    json j;
    j["n_bs"] = net.n_bs();
    j["n_users"] = net.n_users();
    j["gain"] = std::vector<double>(net.gain.data().begin(), net.gain.data().end());
    j["budget"] = net.budget;
    j["noise_dl"] = net.noise_dl;
    j["noise_ul"] = net.noise_ul;
    return j;
}

/// Gains may be flat row-major or nested rows; shape is inferred from nested rows.
/// Missing budget and noise vectors default to all ones.
inline Network network_from_json(const json& j)
{
    try {
        const auto& g = j.at("gain");
        const bool nested = !g.empty() && g.front().is_array();
        const auto n = j.contains("n_bs") ? j.at("n_bs").get<std::size_t>() : nested ? g.size() : 0;
        const auto k = j.contains("n_users") ? j.at("n_users").get<std::size_t>()
                       : nested               ? g.front().size()
                                              : 0;
        Matrix gain(n, k);
        if (nested) {
            if (g.size() != n)
                throw structural_error("gain must have n_bs rows");
            for (std::size_t r = 0; r < n; ++r) {
                if (g[r].size() != k)
                    throw structural_error("gain row must have n_users entries");
                for (std::size_t c = 0; c < k; ++c)
                    gain(r, c) = g[r][c].get<double>();
            }
        } else {
            if (n * k == 0 || g.size() != n * k)
                throw structural_error("flat gain needs n_bs and n_users with n_bs * n_users values");
            for (std::size_t i = 0; i < n * k; ++i)
                gain(i / k, i % k) = g[i].get<double>();
        }
        auto vec = [&](const char* key, std::size_t size) {
            return j.contains(key) ? j.at(key).get<std::vector<double>>() : std::vector<double>(size, 1.0);
        };
        Network net{std::move(gain), vec("budget", n), vec("noise_dl", k), vec("noise_ul", n)};
        validate(net);
        return net;
    } catch (const json::exception& e) {
        throw structural_error(std::string("network JSON: ") + e.what());
    }
}

inline json to_json(const SolveResult& r)
{
    json j;
    j["association"] = r.association;
    j["power"] = r.power;
    j["sinr"] = r.sinr;
    j["min_sinr"] = r.min_sinr;
    j["min_sinr_db"] = r.min_sinr > 0.0 ? json(to_db(r.min_sinr)) : json(nullptr);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["residual"] = std::isfinite(r.residual) ? json(r.residual) : json(nullptr);
    return j;
}

inline json to_json(const ScenarioConfig& c)
{
    json j;
    j["n_macro"] = c.n_macro;
    j["picos_per_macro"] = c.picos_per_macro;
    j["n_users"] = c.n_users;
    j["snr_db"] = c.snr_db;
    j["macro_power_gap_db"] = c.macro_power_gap_db;
    j["macro_spacing_m"] = c.macro_spacing_m;
    j["pico_min_dist_m"] = c.pico_min_dist_m;
    j["pathloss_ref_m"] = c.pathloss_ref_m;
    j["pathloss_exp"] = c.pathloss_exp;
    j["shadow_std_db"] = c.shadow_std_db;
    j["noise"] = c.noise;
    j["min_dist_m"] = c.min_dist_m;
    j["user_dist"] = to_string(c.user_dist);
    j["congested_cell"] = c.congested_cell ? json(*c.congested_cell) : json(nullptr);
    j["seed"] = c.seed;
    j["max_placement_tries"] = c.max_placement_tries;
    return j;
}

/// Missing fields keep their defaults.
inline ScenarioConfig scenario_from_json(const json& j)
{
    ScenarioConfig c;
    try {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key) && !j.at(key).is_null())
                field = j.at(key).get<std::decay_t<decltype(field)>>();
        };
        get("n_macro", c.n_macro);
        get("picos_per_macro", c.picos_per_macro);
        get("n_users", c.n_users);
        get("snr_db", c.snr_db);
        get("macro_power_gap_db", c.macro_power_gap_db);
        get("macro_spacing_m", c.macro_spacing_m);
        get("pico_min_dist_m", c.pico_min_dist_m);
        get("pathloss_ref_m", c.pathloss_ref_m);
        get("pathloss_exp", c.pathloss_exp);
        get("shadow_std_db", c.shadow_std_db);
        get("noise", c.noise);
        get("min_dist_m", c.min_dist_m);
        get("seed", c.seed);
        get("max_placement_tries", c.max_placement_tries);
        if (j.contains("user_dist"))
            c.user_dist = user_distribution_from_string(j.at("user_dist").get<std::string>());
        if (j.contains("congested_cell") && !j.at("congested_cell").is_null())
            c.congested_cell = j.at("congested_cell").get<std::size_t>();
    } catch (const json::exception& e) {
        throw structural_error(std::string("scenario JSON: ") + e.what());
    }
    validate(c);
    return c;
}

inline json to_json(const Geometry& g)
{
    auto points = [](const std::vector<Point>& v) {
        json a = json::array();
        for (auto p : v)
            a.push_back({p.x, p.y});
        return a;
    };
    json kinds = json::array();
    for (auto k : g.bs_kind)
        kinds.push_back(k == BsKind::macro ? "macro" : "pico");
    json j;
    j["bs_positions"] = points(g.bs_positions);
    j["bs_kind"] = std::move(kinds);
    j["bs_macro_cell"] = g.bs_macro_cell;
    j["macro_centers"] = points(g.macro_centers);
    j["user_positions"] = points(g.user_positions);
    j["user_cell"] = g.user_cell;
    return j;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

} // namespace mmfa

#endif // MMFA_IO_HPP
