// SPDX-License-Identifier: Apache-2.0
//
// Closed-form downlink rate and power model for MRT precoding on MMSE
// channel estimates under pilot reuse.
//
// For user k of cell j with pilot p, active antennas N, data power P_d and
// pilot power factor B_p (rho = P_d * B_p):
//
//   D(l,p)  = 1/training_snr + sum of gains from BS l to every user
//             sharing pilot p (all cells)
//   S       = F(j,j,k)^2 / D(j,p)          estimate quality, serving link
//   phi_Q   = (N/K) * sum over co-pilot streams (l,i) != (j,k) of
//             F(l,j,k)^2 / D(l,p)          coherent (contamination) power
//   phi_nQ  = (1/K) * sum_l [ K*F(l,j,k) - m(p)*F(l,j,k)^2/D(l,p) ]
//                                          non-coherent interference power
//   n       = sigma^2 / (K * P_d)          noise term
//   SINR    = rho*N*S / ((rho*(phi_Q+phi_nQ) + n) * K)
//   rate    = K * b * log2(1 + SINR)
//
// m(p) is the number of users per cell sharing pilot p. The quality
// denominators D are what the Monte Carlo estimator produces for the same
// training SNR, which is what makes the analytic layer and the simulation
// agree term by term.

#pragma once

#include <cmath>
#include <vector>

#include "mimo_ee/errors.hpp"
#include "mimo_ee/scenario.hpp"

namespace mimo_ee {

/// Peak-to-average power ratio factor theta(N). theta(1) = 0, limit 3.
inline double papr_factor(int n_antennas) {
    if (n_antennas < 1) throw input_error("papr_factor: N must be >= 1");
    if (n_antennas == 1) return 0.0;
    const double n = static_cast<double>(n_antennas);
    return 3.0 * (n - 2.0 * std::sqrt(n) + 1.0) / (n - 1.0);
}

/// Per-user closed-form rate ingredients. All dimensionless except the
/// noise term's dependence on P_d.
struct RateTerms {
    double desired_s = 0.0;       ///< S
    double coherent_phi_q = 0.0;  ///< phi_Q at the N the terms were built for
    double noncoherent_phi_nq = 0.0;
    double combined_phi = 0.0;    ///< phi_Q + phi_nQ
    double noise_term = 0.0;      ///< sigma^2 / (K * P_d)
};

struct PowerBreakdown {
    double pa_power_w = 0.0;       ///< theta/K * (P_d + N*B_p)
    double circuit_power_w = 0.0;  ///< N * p_c
    double total_w = 0.0;
    double papr = 0.0;
};

/// Amplifier plus circuit consumption for N active antennas.
inline PowerBreakdown total_power(double p_d_w, const PilotConfig& pilots,
                                  int n_antennas, const SystemConfig& config,
                                  const PowerParams& power) {
    if (p_d_w < 0) throw input_error("total_power: P_d must be >= 0");
    PowerBreakdown out;
    out.papr = papr_factor(n_antennas);
    out.pa_power_w = out.papr / config.users_per_cell *
                     (p_d_w + n_antennas * pilots.pilot_power_w);
    out.circuit_power_w = n_antennas * power.circuit_per_antenna_w();
    out.total_w = out.pa_power_w + out.circuit_power_w;
    return out;
}

/// Energy efficiency in bits per joule.
inline double ee_value(double rate_bps, const PowerBreakdown& power) {
    if (!(power.total_w > 0)) throw input_error("ee_value: total power must be > 0");
    return rate_bps / power.total_w;
}

namespace detail {

/// N- and P_d-independent per-user pieces of the rate expression.
struct UserTerms {
    double s = 0.0;             ///< S
    double coherent_sum = 0.0;  ///< phi_Q * K / N
    double noncoherent = 0.0;   ///< phi_nQ
};

inline double safe_quality(double gain, double denom) {
    if (gain == 0.0) return 0.0;
    return gain * gain / denom;
}

} // namespace detail

/// Caches the per-user terms of a scenario so rate evaluations inside the
/// solvers are O(users) instead of O(users * cells^2).
class RateModel {
  public:
    explicit RateModel(const Scenario& scn)
        : L_(scn.sys.num_cells), K_(scn.sys.users_per_cell),
          bandwidth_(scn.sys.bandwidth_hz), sigma2_(scn.sys.noise_power_w),
          pilot_power_(scn.pilots.pilot_power_w) {
        const int tau = scn.pilots.pilot_length;
        const double inv_depth = 1.0 / scn.sys.training_snr;
        const int pilots_used = std::min(tau, K_);

        // D(l,p) for every BS / pilot pair
        std::vector<double> d(static_cast<std::size_t>(L_) * pilots_used);
        for (int l = 0; l < L_; ++l) {
            for (int p = 0; p < pilots_used; ++p) {
                double sum = inv_depth;
                for (int j = 0; j < L_; ++j)
                    for (int k = p; k < K_; k += tau) sum += scn.fading(l, j, k);
                d[static_cast<std::size_t>(l) * pilots_used + p] = sum;
            }
        }

        users_.resize(static_cast<std::size_t>(L_) * K_);
        for (int j = 0; j < L_; ++j) {
            for (int k = 0; k < K_; ++k) {
                const int p = pilot_of_user(k, tau);
                const int m = pilot_group_size(p, K_, tau);
                detail::UserTerms t;
                for (int l = 0; l < L_; ++l) {
                    const double quality = detail::safe_quality(
                        scn.fading(l, j, k),
                        d[static_cast<std::size_t>(l) * pilots_used + p]);
                    const int copilot_streams = (l == j) ? m - 1 : m;
                    t.coherent_sum += copilot_streams * quality;
                    t.noncoherent +=
                        scn.fading(l, j, k) - static_cast<double>(m) / K_ * quality;
                    if (l == j) t.s = quality;
                }
                users_[static_cast<std::size_t>(j) * K_ + k] = t;
            }
        }
    }

    int num_cells() const { return L_; }
    int users_per_cell() const { return K_; }
    int num_users() const { return L_ * K_; }

    RateTerms terms(int user, int n_antennas, double p_d_w) const {
        const detail::UserTerms& t = users_[user];
        RateTerms out;
        out.desired_s = t.s;
        out.coherent_phi_q = static_cast<double>(n_antennas) / K_ * t.coherent_sum;
        out.noncoherent_phi_nq = t.noncoherent;
        out.combined_phi = out.coherent_phi_q + out.noncoherent_phi_nq;
        out.noise_term = sigma2_ / (K_ * p_d_w);
        return out;
    }

    double user_sinr(int user, int n_antennas, double p_d_w) const {
        if (p_d_w <= 0.0) return 0.0;
        const detail::UserTerms& t = users_[user];
        const double rho = p_d_w * pilot_power_;
        const double phi =
            static_cast<double>(n_antennas) / K_ * t.coherent_sum + t.noncoherent;
        const double denom = (rho * phi + sigma2_ / (K_ * p_d_w)) * K_;
        if (denom <= 0.0) return 0.0;
        return rho * n_antennas * t.s / denom;
    }

    /// Average over cells of the per-cell sum rate, bits/s.
    double cell_rate(int n_antennas, double p_d_w) const {
        if (p_d_w <= 0.0) return 0.0;
        double sum = 0.0;
        for (int u = 0; u < num_users(); ++u)
            sum += std::log2(1.0 + user_sinr(u, n_antennas, p_d_w));
        return bandwidth_ * sum / L_;
    }

  private:
    int L_, K_;
    double bandwidth_, sigma2_, pilot_power_;
    std::vector<detail::UserTerms> users_;
};

/// Closed-form rate terms for one user.
inline RateTerms rate_terms(const LargeScaleFading& fading, const PilotConfig& pilots,
                            double p_d_w, const SystemConfig& config, int n_antennas,
                            int cell_j, int user_k) {
    if (!(p_d_w > 0)) throw input_error("rate_terms: P_d must be > 0");
    if (!(pilots.pilot_power_w > 0)) throw input_error("rate_terms: B_p must be > 0");
    Scenario scn;
    scn.sys = config;
    scn.pilots = pilots;
    scn.fading = fading;
    const RateModel model(scn);
    return model.terms(cell_j * config.users_per_cell + user_k, n_antennas, p_d_w);
}

/// Closed-form achievable rate for the user the terms belong to, bits/s.
inline double closed_form_rate(const RateTerms& terms, const SystemConfig& config,
                               const PilotConfig& pilots, double p_d_w,
                               int n_antennas) {
    if (p_d_w <= 0.0) return 0.0;
    const double rho = p_d_w * pilots.pilot_power_w;
    const double denom =
        (rho * terms.combined_phi + terms.noise_term) * config.users_per_cell;
    if (denom <= 0.0) return 0.0;
    const double sinr = rho * n_antennas * terms.desired_s / denom;
    return config.users_per_cell * config.bandwidth_hz * std::log2(1.0 + sinr);
}

/// Network objective used by the optimizers: average per-cell sum rate.
inline double bundle_rate(const Scenario& scn, int n_antennas, double p_d_w) {
    return RateModel(scn).cell_rate(n_antennas, p_d_w);
}

inline PowerBreakdown bundle_power(const Scenario& scn, int n_antennas, double p_d_w) {
    return total_power(p_d_w, scn.pilots, n_antennas, scn.sys, scn.power);
}

inline double bundle_ee(const Scenario& scn, int n_antennas, double p_d_w) {
    return ee_value(bundle_rate(scn, n_antennas, p_d_w),
                    bundle_power(scn, n_antennas, p_d_w));
}

} // namespace mimo_ee
