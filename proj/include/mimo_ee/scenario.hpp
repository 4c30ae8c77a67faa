// SPDX-License-Identifier: Apache-2.0
//
// Scenario definition: system configuration, pilot and power parameters,
// and the large-scale fading tensor every analytic term is built from.
//
// Index convention used throughout the library:
//   F(l, j, k) = large-scale gain from BS l to user k of cell j
// (linear scale, dimensionless). Antennas are uncorrelated, so each link
// carries a single scalar gain.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mimo_ee/errors.hpp"
#include "mimo_ee/rng.hpp"

namespace mimo_ee {

/// Thermal noise floor, dBm per Hz.
inline constexpr double kThermalNoiseDbmHz = -174.0;
/// Users are never placed closer to a BS than this (meters).
inline constexpr double kMinUserDistanceM = 35.0;

struct SystemConfig {
    int num_cells = 1;       ///< L
    int users_per_cell = 1;  ///< K
    int max_antennas = 1;    ///< M, upper bound on active antennas N
    double bandwidth_hz = 20e6;
    double noise_power_w = 1e-3;   ///< sigma^2 at every receiver
    double rate_floor_bps = 0.0;   ///< minimum acceptable downlink rate
    double training_snr = 1.0;     ///< effective SNR of the pilot phase

    void validate() const {
        if (num_cells < 1) throw input_error("cells must be >= 1");
        if (users_per_cell < 1) throw input_error("users must be >= 1");
        if (max_antennas < users_per_cell)
            throw input_error("max_antennas must be >= users (K <= N <= M)");
        if (!(bandwidth_hz > 0)) throw input_error("bandwidth_hz must be > 0");
        if (!(noise_power_w > 0)) throw input_error("noise_power_w must be > 0");
        if (rate_floor_bps < 0) throw input_error("r_min_bps must be >= 0");
        if (!(training_snr > 0)) throw input_error("training_snr must be > 0");
    }
};

struct PilotConfig {
    double pilot_power_w = 1.0;  ///< B_p, power factor per pilot symbol
    int pilot_length = 1;        ///< tau_p, number of orthogonal sequences

    void validate() const {
        if (pilot_power_w < 0) throw input_error("pilot_power_w must be >= 0");
        if (pilot_length < 1) throw input_error("pilot_length must be >= 1");
    }
};

struct PowerParams {
    double p_bb_w = 0.1;   ///< baseband processing, per antenna
    double p_rf_w = 0.1;   ///< RF chain, per antenna
    double p_max_w = 100;  ///< total BS power budget

    /// Per-antenna circuit power, by definition the sum of both parts.
    double circuit_per_antenna_w() const { return p_bb_w + p_rf_w; }

    void validate() const {
        if (p_bb_w < 0) throw input_error("p_bb_w must be >= 0");
        if (p_rf_w < 0) throw input_error("p_rf_w must be >= 0");
        if (!(p_max_w > 0)) throw input_error("p_max_w must be > 0");
    }
};

/// Dense L x L x K tensor of link gains.
class LargeScaleFading {
  public:
    LargeScaleFading() = default;
    LargeScaleFading(int num_cells, int users_per_cell, double fill = 0.0)
        : cells_(num_cells), users_(users_per_cell),
          gains_(static_cast<std::size_t>(num_cells) * num_cells * users_per_cell, fill) {}

    int num_cells() const { return cells_; }
    int users_per_cell() const { return users_; }

    double operator()(int l, int j, int k) const { return gains_[index(l, j, k)]; }
    double& operator()(int l, int j, int k) { return gains_[index(l, j, k)]; }

    const std::vector<double>& raw() const { return gains_; }

    void validate() const {
        if (gains_.empty()) throw input_error("fading tensor is empty");
        for (double g : gains_) {
            if (!std::isfinite(g)) throw input_error("fading gain is not finite");
            if (g < 0) throw input_error("fading gain is negative");
        }
    }

  private:
    std::size_t index(int l, int j, int k) const {
        return (static_cast<std::size_t>(l) * users_ + k) + static_cast<std::size_t>(j) * cells_ * users_;
    }

    int cells_ = 0;
    int users_ = 0;
    std::vector<double> gains_;
};

/// Everything a solver or sweep needs: the four config blocks together.
struct Scenario {
    SystemConfig sys;
    PilotConfig pilots;
    PowerParams power;
    LargeScaleFading fading;

    void validate() const {
        sys.validate();
        pilots.validate();
        power.validate();
        fading.validate();
        if (fading.num_cells() != sys.num_cells ||
            fading.users_per_cell() != sys.users_per_cell)
            throw input_error("fading tensor shape does not match cells/users");
    }
};

/// Pilot index of user k: orthogonal within a cell while sequences last,
/// then reused round-robin. Cells always reuse the whole pilot book.
inline int pilot_of_user(int k, int pilot_length) {
    return k % pilot_length;
}

/// Users per cell sharing pilot p.
inline int pilot_group_size(int p, int users_per_cell, int pilot_length) {
    if (p >= pilot_length) return 0;
    int n = 0;
    for (int k = p; k < users_per_cell; k += pilot_length) ++n;
    return n;
}

// --------------------------------------------------------------------------
// Large-scale fading generation
// --------------------------------------------------------------------------

/// Drops K users uniformly into each cell of a square grid (toroidal
/// distances) and sets F(l,j,k) = (d/d0)^-kappa with d floored at d0.
/// Deterministic for a fixed (config, spacing, kappa, seed).
inline LargeScaleFading generate_fading(const SystemConfig& config,
                                        double grid_spacing_m,
                                        double pathloss_exponent,
                                        std::uint64_t seed) {
    if (!(grid_spacing_m > 0)) throw input_error("grid spacing must be > 0");
    if (!(pathloss_exponent > 2)) throw input_error("pathloss exponent must be > 2");
    config.validate();

    const int L = config.num_cells;
    const int K = config.users_per_cell;
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(L))));
    const int rows = (L + cols - 1) / cols;
    const double width = cols * grid_spacing_m;
    const double height = rows * grid_spacing_m;

    std::vector<double> bs_x(L), bs_y(L);
    for (int l = 0; l < L; ++l) {
        bs_x[l] = (l % cols + 0.5) * grid_spacing_m;
        bs_y[l] = (l / cols + 0.5) * grid_spacing_m;
    }

    LargeScaleFading fading(L, K);
    for (int j = 0; j < L; ++j) {
        for (int k = 0; k < K; ++k) {
            CounterRng rng(seed, static_cast<std::uint64_t>(j) * K + k);
            const double ux = (j % cols + rng.next_unit()) * grid_spacing_m;
            const double uy = (j / cols + rng.next_unit()) * grid_spacing_m;
            for (int l = 0; l < L; ++l) {
                double dx = std::fabs(ux - bs_x[l]);
                double dy = std::fabs(uy - bs_y[l]);
                dx = std::min(dx, width - dx);
                dy = std::min(dy, height - dy);
                const double d = std::max(std::hypot(dx, dy), kMinUserDistanceM);
                fading(l, j, k) = std::pow(d / kMinUserDistanceM, -pathloss_exponent);
            }
        }
    }
    return fading;
}

// --------------------------------------------------------------------------
// Scenario file format: flat `key = value` lines, `#` comments.
// --------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_double(const std::string& value, const std::string& key, int line) {
    const std::string v = trim(value);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw input_error("scenario line " + std::to_string(line) + ": key '" + key +
                          "' has non-numeric value '" + v + "'");
    return x;
}

inline int parse_int(const std::string& value, const std::string& key, int line) {
    const double x = parse_double(value, key, line);
    if (x != std::floor(x) || std::fabs(x) > 1e9)
        throw input_error("scenario line " + std::to_string(line) + ": key '" + key +
                          "' must be an integer");
    return static_cast<int>(x);
}

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

/// Reads a fading CSV of `l,j,k,gain` rows. Every (l,j,k) in range must
/// appear exactly once.
inline LargeScaleFading load_fading_csv(const std::string& path, int num_cells,
                                        int users_per_cell) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open fading file: " + path);

    LargeScaleFading fading(num_cells, users_per_cell,
                            std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> seen(static_cast<std::size_t>(num_cells) * num_cells * users_per_cell,
                           false);
    std::string line;
    int lineno = 0;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#') continue;
        int l = 0, j = 0, k = 0;
        double g = 0;
        char extra = 0;
        if (std::sscanf(s.c_str(), "%d ,%d ,%d ,%lf %c", &l, &j, &k, &g, &extra) != 4)
            throw input_error(path + " line " + std::to_string(lineno) +
                              ": expected 'l,j,k,gain'");
        if (l < 0 || l >= num_cells || j < 0 || j >= num_cells || k < 0 ||
            k >= users_per_cell)
            throw input_error(path + " line " + std::to_string(lineno) +
                              ": index out of range for L=" + std::to_string(num_cells) +
                              ", K=" + std::to_string(users_per_cell));
        const std::size_t flat =
            (static_cast<std::size_t>(l) * users_per_cell + k) +
            static_cast<std::size_t>(j) * num_cells * users_per_cell;
        if (seen[flat])
            throw input_error(path + " line " + std::to_string(lineno) +
                              ": duplicate entry for (l,j,k)");
        seen[flat] = true;
        fading(l, j, k) = g;
        ++count;
    }
    if (count != seen.size())
        throw input_error(path + ": wrong cardinality, expected " +
                          std::to_string(seen.size()) + " rows, got " +
                          std::to_string(count));
    fading.validate();
    return fading;
}

/// Parses scenario text. `base_dir` resolves a relative fading_file.
inline Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".") {
    Scenario scn;
    bool have_noise_w = false, have_noise_fig = false, have_training = false;
    double noise_figure_db = 9.0;
    std::string fading_file;
    double grid_spacing_m = 500.0;
    double pathloss_exponent = 3.76;
    std::uint64_t drop_seed = 1;

    std::vector<std::string> seen_keys;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#') continue;
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw input_error("scenario line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (std::find(seen_keys.begin(), seen_keys.end(), key) != seen_keys.end())
            throw input_error("scenario line " + std::to_string(lineno) +
                              ": duplicate key '" + key + "'");
        seen_keys.push_back(key);

        if (key == "cells") scn.sys.num_cells = detail::parse_int(value, key, lineno);
        else if (key == "users") scn.sys.users_per_cell = detail::parse_int(value, key, lineno);
        else if (key == "max_antennas") scn.sys.max_antennas = detail::parse_int(value, key, lineno);
        else if (key == "bandwidth_hz") scn.sys.bandwidth_hz = detail::parse_double(value, key, lineno);
        else if (key == "noise_power_w") { scn.sys.noise_power_w = detail::parse_double(value, key, lineno); have_noise_w = true; }
        else if (key == "noise_figure_db") { noise_figure_db = detail::parse_double(value, key, lineno); have_noise_fig = true; }
        else if (key == "pilot_power_w") scn.pilots.pilot_power_w = detail::parse_double(value, key, lineno);
        else if (key == "pilot_length") scn.pilots.pilot_length = detail::parse_int(value, key, lineno);
        else if (key == "p_bb_w") scn.power.p_bb_w = detail::parse_double(value, key, lineno);
        else if (key == "p_rf_w") scn.power.p_rf_w = detail::parse_double(value, key, lineno);
        else if (key == "p_max_w") scn.power.p_max_w = detail::parse_double(value, key, lineno);
        else if (key == "r_min_bps") scn.sys.rate_floor_bps = detail::parse_double(value, key, lineno);
        else if (key == "training_snr") { scn.sys.training_snr = detail::parse_double(value, key, lineno); have_training = true; }
        else if (key == "fading_file") fading_file = value;
        else if (key == "grid_spacing_m") grid_spacing_m = detail::parse_double(value, key, lineno);
        else if (key == "pathloss_exponent") pathloss_exponent = detail::parse_double(value, key, lineno);
        else if (key == "drop_seed") drop_seed = static_cast<std::uint64_t>(detail::parse_int(value, key, lineno));
        else
            throw input_error("scenario line " + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
    }

    if (have_noise_w && have_noise_fig)
        throw input_error("give either noise_power_w or noise_figure_db, not both");
    if (!have_noise_w) {
        // thermal density * bandwidth * noise figure
        scn.sys.noise_power_w = std::pow(10.0, (kThermalNoiseDbmHz + noise_figure_db) / 10.0 - 3.0) *
                                scn.sys.bandwidth_hz;
    }
    if (!have_training) {
        scn.sys.training_snr = scn.pilots.pilot_power_w * scn.pilots.pilot_length /
                               scn.sys.noise_power_w;
    }

    scn.sys.validate();
    scn.pilots.validate();
    scn.power.validate();

    if (!fading_file.empty()) {
        std::filesystem::path p(fading_file);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        scn.fading = load_fading_csv(p.string(), scn.sys.num_cells, scn.sys.users_per_cell);
    } else {
        scn.fading = generate_fading(scn.sys, grid_spacing_m, pathloss_exponent, drop_seed);
    }
    scn.validate();
    return scn;
}

/// Loads and validates a scenario file.
inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open scenario file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_scenario(text.str(), dir.empty() ? "." : dir);
}

/// Writes the scenario plus a sibling `<path>.fading.csv` holding the gain
/// tensor, so a save/load round trip reproduces every field bit-for-bit.
inline void save_scenario(const Scenario& scn, const std::string& path) {
    const std::string fading_name =
        std::filesystem::path(path).filename().string() + ".fading.csv";
    const std::string fading_path =
        (std::filesystem::path(path).parent_path() / fading_name).string();

    std::ofstream out(path);
    if (!out) throw input_error("cannot write scenario file: " + path);
    out << "cells = " << scn.sys.num_cells << "\n"
        << "users = " << scn.sys.users_per_cell << "\n"
        << "max_antennas = " << scn.sys.max_antennas << "\n"
        << "bandwidth_hz = " << detail::format_double(scn.sys.bandwidth_hz) << "\n"
        << "noise_power_w = " << detail::format_double(scn.sys.noise_power_w) << "\n"
        << "pilot_power_w = " << detail::format_double(scn.pilots.pilot_power_w) << "\n"
        << "pilot_length = " << scn.pilots.pilot_length << "\n"
        << "p_bb_w = " << detail::format_double(scn.power.p_bb_w) << "\n"
        << "p_rf_w = " << detail::format_double(scn.power.p_rf_w) << "\n"
        << "p_max_w = " << detail::format_double(scn.power.p_max_w) << "\n"
        << "r_min_bps = " << detail::format_double(scn.sys.rate_floor_bps) << "\n"
        << "training_snr = " << detail::format_double(scn.sys.training_snr) << "\n"
        << "fading_file = " << fading_name << "\n";
    out.close();

    std::ofstream fout(fading_path);
    if (!fout) throw input_error("cannot write fading file: " + fading_path);
    for (int l = 0; l < scn.sys.num_cells; ++l)
        for (int j = 0; j < scn.sys.num_cells; ++j)
            for (int k = 0; k < scn.sys.users_per_cell; ++k)
                fout << l << ',' << j << ',' << k << ','
                     << detail::format_double(scn.fading(l, j, k)) << "\n";
}

} // namespace mimo_ee
