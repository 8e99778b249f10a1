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
 * \file mmfa/scenario.hpp
 *
 * \brief Random heterogeneous network (HetNet) instances.
 *
 * Macro BSs sit at the centers of a hexagonal grid (adjacent centers
 * macro_spacing_m apart, laid out row by row in a near-square arrangement).
 * Each macro hexagon receives picos_per_macro pico BSs placed uniformly in
 * the hexagon at least pico_min_dist_m from the macro. Gains follow
 * g = S * (ref / d)^exp with log-normal shadowing S. Pico budgets are
 * 10^(snr_db / 10); macros are macro_power_gap_db stronger. Users are placed
 * either "congested" (floor(sqrt(K)) users in one macro hexagon, the rest
 * uniform over the network area) or "uni-in-cell" (user k uniform in the
 * Voronoi cell of BS phi(k), phi a random permutation repeated with period N).
 *
 * BS order: macros 0..Nm-1, then the picos of macro m at Nm + m * beta + i.
 */

#ifndef MMFA_SCENARIO_HPP
#define MMFA_SCENARIO_HPP

#include <mmfa/model.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmfa {

enum class UserDistribution
{
    congested,
    uni_in_cell
};

inline const char* to_string(UserDistribution d)
{
    return d == UserDistribution::congested ? "congested" : "uni_in_cell";
}

inline UserDistribution user_distribution_from_string(const std::string& s)
{
    if (s == "congested" || s == "Congested")
        return UserDistribution::congested;
    if (s == "uni_in_cell" || s == "UniInCell" || s == "uni-in-cell")
        return UserDistribution::uni_in_cell;
    throw structural_error("unknown user distribution: " + s);
}

struct ScenarioConfig
{
    std::size_t n_macro = 9;
    std::size_t picos_per_macro = 1;
    std::size_t n_users = 18;
    double snr_db = 15.0;
    double macro_power_gap_db = 16.0;
    double macro_spacing_m = 1000.0;
    double pico_min_dist_m = 250.0;
    double pathloss_ref_m = 200.0;
    double pathloss_exp = 3.7;
    double shadow_std_db = 8.0;
    double noise = 1.0;
    double min_dist_m = 1.0; ///< distances below this are clamped
    UserDistribution user_dist = UserDistribution::uni_in_cell;
    std::optional<std::size_t> congested_cell; ///< macro index; grid center when unset
    std::uint64_t seed = 1;
    std::size_t max_placement_tries = 1000000;

    [[nodiscard]] std::size_t n_bs() const noexcept { return (picos_per_macro + 1) * n_macro; }
};

inline void validate(const ScenarioConfig& c)
{
    if (c.n_macro < 1 || c.n_users < 1)
        throw structural_error("scenario needs at least one macro cell and one user");
    if (!(c.macro_spacing_m > 0.0) || !(c.pathloss_ref_m > 0.0) || !(c.pathloss_exp > 0.0) || !(c.noise > 0.0) ||
        !(c.min_dist_m > 0.0))
        throw structural_error("scenario distances, exponent and noise must be positive");
    if (c.pico_min_dist_m < 0.0 || c.shadow_std_db < 0.0)
        throw structural_error("pico distance and shadowing std must be non-negative");
    // a pico must fit between the exclusion disc and the hexagon apothem
    if (c.picos_per_macro > 0 && !(c.pico_min_dist_m < c.macro_spacing_m / std::sqrt(3.0)))
        throw structural_error("pico_min_dist_m leaves no room inside the macro hexagon");
    if (c.congested_cell && *c.congested_cell >= c.n_macro)
        throw structural_error("congested cell index out of range");
}

struct Point
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

enum class BsKind
{
    macro,
    pico
};

struct Geometry
{
    std::vector<Point> bs_positions;
    std::vector<BsKind> bs_kind;
    std::vector<std::size_t> bs_macro_cell; ///< hexagon each BS lies in
    std::vector<Point> macro_centers;
    std::vector<Point> user_positions;
    std::vector<std::size_t> user_cell; ///< nearest BS (Voronoi cell) of each user
};

/// Near-square hex layout: row r, column c at (c + (r odd) / 2, r * sqrt(3) / 2) * spacing.
inline std::vector<Point> hex_macro_centers(std::size_t n_macro, double spacing)
{
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_macro))));
    std::vector<Point> centers;
    for (std::size_t i = 0; i < n_macro; ++i) {
        const std::size_t r = i / cols;
        const std::size_t c = i % cols;
        centers.push_back({(static_cast<double>(c) + (r % 2 ? 0.5 : 0.0)) * spacing,
                           static_cast<double>(r) * spacing * std::sqrt(3.0) / 2.0});
    }
    return centers;
}

/// Point-in-hexagon test; the hexagon has apothem spacing / 2 and flat sides facing its neighbors.
inline bool in_hexagon(Point p, Point center, double spacing)
{
    const double h = spacing / 2.0 * (1.0 + 1e-12);
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    const double s = std::sqrt(3.0) / 2.0;
    return std::abs(dx) <= h && std::abs(0.5 * dx + s * dy) <= h && std::abs(-0.5 * dx + s * dy) <= h;
}

namespace detail {

inline Point uniform_in_hexagon(Point center, double spacing, std::mt19937_64& rng)
{
    const double circum = spacing / std::sqrt(3.0);
    std::uniform_real_distribution<double> ux(-spacing / 2.0, spacing / 2.0);
    std::uniform_real_distribution<double> uy(-circum, circum);
    for (;;) {
        const Point p{center.x + ux(rng), center.y + uy(rng)};
        if (in_hexagon(p, center, spacing))
            return p;
    }
}

inline std::size_t nearest_bs(Point p, const std::vector<Point>& bs)
{
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < bs.size(); ++n) {
        const double d = distance(p, bs[n]);
        if (d < best_d) {
            best_d = d;
            best = n;
        }
    }
    return best;
}

inline std::size_t center_macro(const std::vector<Point>& centers)
{
    Point mean{};
    for (auto c : centers) {
        mean.x += c.x / static_cast<double>(centers.size());
        mean.y += c.y / static_cast<double>(centers.size());
    }
    return nearest_bs(mean, centers);
}

} // namespace detail

/// Uniform point over the network area (union of macro hexagons).
inline Point uniform_in_area(const Geometry& geo, double spacing, std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::size_t> cell(0, geo.macro_centers.size() - 1);
    return detail::uniform_in_hexagon(geo.macro_centers[cell(rng)], spacing, rng);
}

/// Macro grid plus pico placement; users are left empty.
inline Geometry build_bs_geometry(const ScenarioConfig& config, std::mt19937_64& rng)
{
    validate(config);
    Geometry geo;
    geo.macro_centers = hex_macro_centers(config.n_macro, config.macro_spacing_m);
    for (std::size_t m = 0; m < config.n_macro; ++m) {
        geo.bs_positions.push_back(geo.macro_centers[m]);
        geo.bs_kind.push_back(BsKind::macro);
        geo.bs_macro_cell.push_back(m);
    }
    for (std::size_t m = 0; m < config.n_macro; ++m) {
        for (std::size_t i = 0; i < config.picos_per_macro; ++i) {
            std::size_t tries = 0;
            Point p;
            do {
                if (++tries > config.max_placement_tries)
                    throw std::runtime_error("pico placement failed: geometry unsatisfiable");
                p = detail::uniform_in_hexagon(geo.macro_centers[m], config.macro_spacing_m, rng);
            } while (distance(p, geo.macro_centers[m]) < config.pico_min_dist_m);
            geo.bs_positions.push_back(p);
            geo.bs_kind.push_back(BsKind::pico);
            geo.bs_macro_cell.push_back(m);
        }
    }
    return geo;
}

/// Places users per config.user_dist and fills user_positions / user_cell.
inline std::vector<Point> place_users(const ScenarioConfig& config, Geometry& geo, std::mt19937_64& rng)
{
    validate(config);
    const std::size_t k_users = config.n_users;
    const std::size_t n_bs = geo.bs_positions.size();
    std::vector<Point> users;
    users.reserve(k_users);

    if (config.user_dist == UserDistribution::congested) {
        const auto hot = config.congested_cell.value_or(detail::center_macro(geo.macro_centers));
        const auto n_hot = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(k_users))));
        for (std::size_t k = 0; k < k_users; ++k)
            users.push_back(k < n_hot ? detail::uniform_in_hexagon(geo.macro_centers[hot], config.macro_spacing_m, rng)
                                      : uniform_in_area(geo, config.macro_spacing_m, rng));
    } else {
        std::vector<std::size_t> phi(n_bs);
        std::iota(phi.begin(), phi.end(), std::size_t{0});
        std::shuffle(phi.begin(), phi.end(), rng);
        for (std::size_t k = 0; k < k_users; ++k) {
            const std::size_t cell = phi[k % n_bs];
            std::size_t tries = 0;
            Point p;
            do {
                if (++tries > config.max_placement_tries)
                    throw std::runtime_error("user placement failed: Voronoi cell too small");
                p = uniform_in_area(geo, config.macro_spacing_m, rng);
            } while (detail::nearest_bs(p, geo.bs_positions) != cell);
            users.push_back(p);
        }
    }

    geo.user_positions = users;
    geo.user_cell.clear();
    for (auto p : users)
        geo.user_cell.push_back(detail::nearest_bs(p, geo.bs_positions));
    return users;
}

/// Linear gain S * (ref / d)^exp with 10 log10 S = shadow_db.
inline double channel_gain(double distance_m, double shadow_db, const ScenarioConfig& config)
{
    const double d = std::max(distance_m, config.min_dist_m);
    return from_db(shadow_db) * std::pow(config.pathloss_ref_m / d, config.pathloss_exp);
}

inline double pico_budget(const ScenarioConfig& config)
{
    return from_db(config.snr_db);
}

inline double macro_budget(const ScenarioConfig& config)
{
    return from_db(config.snr_db + config.macro_power_gap_db);
}

struct Scenario
{
    Network network;
    Geometry geometry;
};

/// Deterministic in (config, config.seed).
inline Scenario generate_hetnet(const ScenarioConfig& config)
{
    validate(config);
    std::mt19937_64 rng(config.seed);
    Scenario s;
    s.geometry = build_bs_geometry(config, rng);
    place_users(config, s.geometry, rng);

    const std::size_t n_bs = s.geometry.bs_positions.size();
    const std::size_t k_users = config.n_users;
    std::normal_distribution<double> shadow(0.0, config.shadow_std_db);
    Matrix gain(n_bs, k_users);
    for (std::size_t n = 0; n < n_bs; ++n)
        for (std::size_t k = 0; k < k_users; ++k) {
            const double sh = config.shadow_std_db > 0.0 ? shadow(rng) : 0.0;
            gain(n, k) = channel_gain(distance(s.geometry.bs_positions[n], s.geometry.user_positions[k]), sh, config);
        }

    std::vector<double> budget(n_bs);
    for (std::size_t n = 0; n < n_bs; ++n)
        budget[n] = s.geometry.bs_kind[n] == BsKind::macro ? macro_budget(config) : pico_budget(config);
    s.network = make_network(std::move(gain), std::move(budget), std::vector<double>(k_users, config.noise),
                             std::vector<double>(n_bs, config.noise));
    return s;
}

struct RandomNetworkOptions
{
    double gain_db_mean = 0.0;
    double gain_db_std = 10.0;
    /// Added (in dB) to g(perm(k), k) for a random permutation; makes SINR >= 1 optima common.
    double matching_boost_db = 0.0;
    double budget_min = 1.0;
    double budget_max = 1.0;
    double noise = 1.0;
};

/// i.i.d. log-normal gains with equal noise on both link directions.
inline Network random_network(std::mt19937_64& rng, std::size_t n_bs, std::size_t n_users,
                              const RandomNetworkOptions& opts = {})
{
    std::normal_distribution<double> db(opts.gain_db_mean, opts.gain_db_std);
    Matrix gain(n_bs, n_users);
    for (std::size_t n = 0; n < n_bs; ++n)
        for (std::size_t k = 0; k < n_users; ++k)
            gain(n, k) = from_db(db(rng));
    if (opts.matching_boost_db != 0.0) {
        std::vector<std::size_t> perm(std::max(n_bs, n_users));
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t k = 0; k < n_users; ++k)
            if (perm[k] < n_bs)
                gain(perm[k], k) *= from_db(opts.matching_boost_db);
    }
    std::uniform_real_distribution<double> ub(opts.budget_min, opts.budget_max);
    std::vector<double> budget(n_bs);
    for (auto& b : budget)
        b = opts.budget_max > opts.budget_min ? ub(rng) : opts.budget_min;
    return make_network(std::move(gain), std::move(budget), std::vector<double>(n_users, opts.noise),
                        std::vector<double>(n_bs, opts.noise));
}

} // namespace mmfa

#endif // MMFA_SCENARIO_HPP
