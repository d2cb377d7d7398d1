#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fkise/rng.hpp"

namespace fkise {

inline double default_zero_tol(double dt) { return std::max(std::sqrt(dt) / 10.0, 1e-12); }

enum class BesselScheme { ExactBesq, Euler };

struct BesselPath {
    double dimension = 1.5;
    double x0 = 0.0;
    double dt = 1e-3;
    std::vector<double> x;  // samples on the uniform grid, x[0] = x0

    double duration() const { return dt * static_cast<double>(x.empty() ? 0 : x.size() - 1); }
};

// Exact squared-Bessel transition: Z' ~ dt * chi'^2_d(Z/dt), sampled as
// chi^2_{d-1} + (N + sqrt(Z/dt))^2 (valid for d > 1).
inline double besq_step(std::mt19937_64& rng, double z, double d, double dt) {
    const double n = normal(rng) + std::sqrt(std::max(0.0, z / dt));
    const double g = chi_squared_draw(rng, d - 1.0);
    return dt * (g + n * n);
}

inline BesselPath simulate_bessel(double d, double x0, double dt, double horizon,
                                  std::uint64_t seed, BesselScheme scheme = BesselScheme::ExactBesq) {
    if (d <= 1.0) throw std::invalid_argument("simulate_bessel: dimension must exceed 1");
    if (dt <= 0.0 || x0 < 0.0) throw std::invalid_argument("simulate_bessel: bad parameters");
    const std::size_t n = static_cast<std::size_t>(std::ceil(horizon / dt));
    BesselPath path;
    path.dimension = d;
    path.x0 = x0;
    path.dt = dt;
    path.x.reserve(n + 1);
    path.x.push_back(x0);
    auto rng = make_stream(seed, "bessel_path");
    if (scheme == BesselScheme::ExactBesq) {
        double z = x0 * x0;
        for (std::size_t k = 0; k < n; ++k) {
            z = besq_step(rng, z, d, dt);
            path.x.push_back(std::sqrt(z));
        }
    } else {
        // Euler on the SDE with absorption-and-release at the origin: the
        // drift is singular there, so the increment is applied from the
        // reflected value.
        const double drift = 0.5 * (d - 1.0);
        const double tol = default_zero_tol(dt);
        double x = x0;
        for (std::size_t k = 0; k < n; ++k) {
            const double noise = std::sqrt(dt) * normal(rng);
            const double safe = std::max(x, tol);
            x = std::fabs(x + noise + drift * dt / safe);
            path.x.push_back(x);
        }
    }
    return path;
}

struct ExcursionSet {
    double epsilon = 0.0;
    double zero_tol = 0.0;
    // alternating first-passage indices: x[t_idx[k]] >= eps is the first
    // exceedance after s_idx[k-1]; s_idx[k] is the first grid zero after it
    std::vector<std::size_t> t_idx;
    std::vector<std::size_t> s_idx;

    std::size_t complete_count() const { return s_idx.size(); }
};

inline ExcursionSet stopping_times(const std::vector<double>& x, double epsilon, double zero_tol) {
    if (!(epsilon > zero_tol && zero_tol > 0.0))
        throw std::invalid_argument("stopping_times: need epsilon > zero_tol > 0");
    ExcursionSet out;
    out.epsilon = epsilon;
    out.zero_tol = zero_tol;
    std::size_t i = 0;
    for (;;) {
        while (i < x.size() && x[i] < epsilon) ++i;
        if (i >= x.size()) break;
        out.t_idx.push_back(i);
        while (i < x.size() && x[i] > zero_tol) ++i;
        if (i >= x.size()) break;
        out.s_idx.push_back(i);
    }
    return out;
}

struct SleDriver {
    double kappa = 16.0 / 3.0;
    double rho = -2.0 / 3.0;
    double x0 = 0.0;
    double dt = 1e-4;
    std::vector<double> t, W, V, theta;
    std::size_t clamped_steps = 0;  // steps where 2/theta was clamped
    bool flagged = false;
};

inline double bessel_dimension_of(double kappa, double rho) { return 1.0 + 2.0 * (rho + 2.0) / kappa; }

// Driver of the radial-free chordal SLE_kappa(rho): theta = sqrt(kappa) X for
// a Bessel X of dimension 1 + 2(rho+2)/kappa, V integrates 2/theta, W = V - theta.
inline SleDriver sle_driver(double kappa, double rho, double x0, double dt, double horizon,
                            std::uint64_t seed) {
    if (kappa <= 0.0 || rho <= -2.0 || x0 < 0.0)
        throw std::invalid_argument("sle_driver: parameter domain violation");
    const double d = bessel_dimension_of(kappa, rho);
    const double sk = std::sqrt(kappa);
    const BesselPath bp = simulate_bessel(d, x0 / sk, dt, horizon, seed);
    SleDriver out;
    out.kappa = kappa;
    out.rho = rho;
    out.x0 = x0;
    out.dt = dt;
    const double theta_clamp = sk * default_zero_tol(dt);
    out.t.reserve(bp.x.size());
    out.W.reserve(bp.x.size());
    out.V.reserve(bp.x.size());
    out.theta.reserve(bp.x.size());
    double v = x0;
    for (std::size_t k = 0; k < bp.x.size(); ++k) {
        const double th = sk * bp.x[k];
        if (k > 0) {
            const double th_prev = out.theta.back();
            double g0 = 2.0 / std::max(th_prev, theta_clamp);
            double g1 = 2.0 / std::max(th, theta_clamp);
            if (th_prev < theta_clamp || th < theta_clamp) ++out.clamped_steps;
            v += 0.5 * dt * (g0 + g1);
        }
        out.t.push_back(dt * static_cast<double>(k));
        out.theta.push_back(th);
        out.V.push_back(v);
        out.W.push_back(v - th);
    }
    out.flagged = out.clamped_steps > 0;
    return out;
}

// Zero-hit probability of a squared-Bessel bridge over one step; the killed
// transition swaps the Bessel-I order from nu to |nu|.
inline double besq_bridge_survival(double z0, double z1, double dt, double d) {
    if (z0 <= 0.0 || z1 <= 0.0) return 0.0;
    const double nu = std::fabs(0.5 * d - 1.0);
    const double arg = std::sqrt(z0 * z1) / dt;
    if (arg > 40.0) return 1.0;
    const double i_pos = std::cyl_bessel_i(nu, arg);
    const double k_pos = std::cyl_bessel_k(nu, arg);
    const double i_neg = i_pos + (2.0 / 3.14159265358979323846) *
                                     std::sin(nu * 3.14159265358979323846) * k_pos;
    return i_pos / i_neg;
}

struct HitEstimate {
    double p_hat = 0.0;
    double stderr_ = 0.0;
    std::size_t paths = 0;
};

// P[Bessel(d) from x0 reaches level M before hitting zero], estimated with
// exact transitions plus per-step bridge corrections at both barriers.
inline HitEstimate hit_before_zero(double d, double x0, double level, std::size_t paths,
                                   double dt, std::uint64_t seed) {
    if (d <= 1.0 || d >= 2.0) throw std::invalid_argument("hit_before_zero: d in (1,2) required");
    std::size_t wins = 0;
    for (std::size_t p = 0; p < paths; ++p) {
        auto rng = make_stream(seed, "bessel_hit", p);
        double z = x0 * x0;
        bool win = false;
        for (;;) {
            const double z2 = besq_step(rng, z, d, dt);
            if (z2 >= level * level) {
                win = true;
                break;
            }
            // zero side: exact bridge survival
            if (u01(rng) >= besq_bridge_survival(z, z2, dt, d)) break;
            // upper side: Brownian-bridge crossing of the level
            const double a = level - std::sqrt(z);
            const double b = level - std::sqrt(z2);
            if (a > 0.0 && b > 0.0) {
                const double pc = std::exp(-2.0 * a * b / dt);
                if (pc > 1e-14 && u01(rng) < pc) {
                    win = true;
                    break;
                }
            }
            z = z2;
        }
        if (win) ++wins;
    }
    HitEstimate est;
    est.paths = paths;
    est.p_hat = static_cast<double>(wins) / static_cast<double>(paths);
    est.stderr_ = std::sqrt(std::max(est.p_hat * (1.0 - est.p_hat), 1e-12) /
                            static_cast<double>(paths));
    return est;
}

// One Bessel excursion: start at epsilon, run until the grid-zero proxy.
inline std::vector<double> bessel_excursion(double d, double epsilon, double dt,
                                            std::uint64_t seed, double zero_tol = 0.0,
                                            std::size_t max_steps = 100000000) {
    if (zero_tol <= 0.0) zero_tol = default_zero_tol(dt);
    auto rng = make_stream(seed, "bessel_excursion");
    std::vector<double> x{epsilon};
    double z = epsilon * epsilon;
    for (std::size_t k = 0; k < max_steps; ++k) {
        z = besq_step(rng, z, d, dt);
        const double v = std::sqrt(z);
        x.push_back(v);
        if (v <= zero_tol) break;
    }
    return x;
}

struct SpliceResult {
    std::vector<double> x;       // spliced path on the same grid
    double time_displacement = 0.0;  // total |shift| accumulated at time t
    double leb_base_below_eps = 0.0;
    double leb_spliced_below_eps = 0.0;
};

// Coupling construction: copy the base path on the inter-excursion stretches
// and donor excursions in between; the time shift is controlled by the time
// both processes spend below epsilon.
inline SpliceResult splice_coupling(const BesselPath& base,
                                    const std::vector<std::vector<double>>& donors,
                                    double epsilon, double zero_tol = 0.0) {
    if (zero_tol <= 0.0) zero_tol = default_zero_tol(base.dt);
    SpliceResult out;
    const auto& xb = base.x;
    const ExcursionSet ex = stopping_times(xb, epsilon, zero_tol);
    std::size_t donor_i = 0;
    std::size_t cursor = 0;
    double displacement = 0.0;
    for (std::size_t k = 0; k < ex.t_idx.size(); ++k) {
        const std::size_t t_k = ex.t_idx[k];
        for (std::size_t i = cursor; i < t_k; ++i) out.x.push_back(xb[i]);
        const std::size_t s_k = k < ex.s_idx.size() ? ex.s_idx[k] : xb.size() - 1;
        if (donor_i < donors.size()) {
            const auto& donor = donors[donor_i++];
            for (double v : donor) out.x.push_back(v);
            displacement += base.dt * std::fabs(static_cast<double>(donor.size()) -
                                                static_cast<double>(s_k - t_k + 1));
        } else {
            for (std::size_t i = t_k; i <= s_k; ++i) out.x.push_back(xb[i]);
        }
        cursor = s_k + 1;
    }
    for (std::size_t i = cursor; i < xb.size(); ++i) out.x.push_back(xb[i]);
    out.time_displacement = displacement;
    for (double v : xb)
        if (v <= epsilon) out.leb_base_below_eps += base.dt;
    for (double v : out.x)
        if (v <= epsilon) out.leb_spliced_below_eps += base.dt;
    return out;
}

}  // namespace fkise
