#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fkise/loewner.hpp"
#include "fkise/stats.hpp"

namespace fkise {

struct ExcursionFeature {
    double t_start = 0.0;   // capacity time of the epsilon exceedance
    double t_end = 0.0;     // capacity time of the following boundary hit
    double max_theta = 0.0;
    double duration = 0.0;
    double pre_dust = 0.0;  // time since the previous boundary hit
};

struct DiscreteExcursionRecord {
    double epsilon = 0.0;
    double mesh = 0.0;
    DriverRecord driver;
    std::vector<double> hit_times;          // capacity times of boundary-arc hits
    std::vector<std::size_t> t_idx, s_idx;  // grid indices, alternating T_1 <= S_1 <= T_2 ...
    std::vector<ExcursionFeature> excursions;
};

// Discrete stopping times: T_k is the first grid time after S_{k-1} at which
// theta reaches epsilon; S_k is the first boundary-arc hit after T_k, mapped
// to the nearest-not-earlier grid time.
inline DiscreteExcursionRecord discrete_stopping_times(const DriverRecord& driver,
                                                       const std::vector<double>& hit_times,
                                                       double epsilon, double mesh) {
    if (epsilon < 10.0 * std::sqrt(mesh))
        throw std::invalid_argument("discrete_stopping_times: epsilon below 10 sqrt(mesh)");
    DiscreteExcursionRecord rec;
    rec.epsilon = epsilon;
    rec.mesh = mesh;
    rec.driver = driver;
    rec.hit_times = hit_times;
    const auto& t = driver.t;
    const auto& theta = driver.theta;
    std::size_t i = 0;
    std::size_t hit_cursor = 0;
    double prev_s_time = 0.0;
    for (;;) {
        while (i < theta.size() && theta[i] < epsilon) ++i;
        if (i >= theta.size()) break;
        rec.t_idx.push_back(i);
        // first boundary hit strictly after T_k
        while (hit_cursor < hit_times.size() && hit_times[hit_cursor] <= t[i]) ++hit_cursor;
        if (hit_cursor >= hit_times.size()) break;
        const double s_time = hit_times[hit_cursor];
        const auto it = std::lower_bound(t.begin(), t.end(), s_time);
        if (it == t.end()) break;
        const std::size_t si = static_cast<std::size_t>(it - t.begin());
        rec.s_idx.push_back(si);

        ExcursionFeature f;
        f.t_start = t[i];
        f.t_end = t[si];
        f.duration = f.t_end - f.t_start;
        f.pre_dust = t[i] - prev_s_time;
        for (std::size_t k = i; k <= si; ++k) f.max_theta = std::max(f.max_theta, theta[k]);
        rec.excursions.push_back(f);
        prev_s_time = t[si];
        i = std::max(si, i) + 1;
    }
    return rec;
}

// Sup over tame segments (theta >= eps/2 throughout) of the residual in the
// discrete driver identity d(theta + W) = 2 dt / theta.
inline double discrete_driver_identity(const DriverRecord& d, double eps) {
    double residual = 0.0;
    std::size_t start = 0;
    bool in_run = false;
    double integral = 0.0;
    double base = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const bool tame = d.theta[k] >= 0.5 * eps;
        if (tame && !in_run) {
            in_run = true;
            start = k;
            integral = 0.0;
            base = d.theta[k] + d.W[k];
        } else if (in_run) {
            const double dt = d.t[k] - d.t[k - 1];
            integral += dt * (1.0 / d.theta[k - 1] + 1.0 / d.theta[k]);  // trapezoid of 2/theta
            if (tame) {
                const double lhs = d.theta[k] + d.W[k] - base;
                residual = std::max(residual, std::fabs(lhs - integral));
            } else {
                in_run = false;
            }
        }
        (void)start;
    }
    return residual;
}

struct ExcursionStatistics {
    std::vector<ExcursionFeature> excursions;
    bool partial = false;              // fewer than 30 excursions
    std::vector<double> maxima, durations, pre_dust;
    double dcor_max = 0.0, dcor_duration = 0.0;
    double perm_p_max = 1.0, perm_p_duration = 1.0;
};

// Pool excursions from many records, evaluate the hitting-law features and
// the independence diagnostics between the pre-excursion past and the
// excursion itself.
inline ExcursionStatistics excursion_statistics(const std::vector<DiscreteExcursionRecord>& records,
                                                std::uint64_t seed = 7, int permutations = 400) {
    ExcursionStatistics s;
    for (const auto& r : records)
        s.excursions.insert(s.excursions.end(), r.excursions.begin(), r.excursions.end());
    s.partial = s.excursions.size() < 30;
    for (const auto& e : s.excursions) {
        s.maxima.push_back(e.max_theta);
        s.durations.push_back(e.duration);
        s.pre_dust.push_back(e.pre_dust);
    }
    if (!s.partial) {
        auto rng = make_stream(seed, "excursion_perm");
        s.dcor_max = stats::distance_corr(s.pre_dust, s.maxima);
        s.dcor_duration = stats::distance_corr(s.pre_dust, s.durations);
        s.perm_p_max = stats::independence_permutation_p(s.pre_dust, s.maxima, permutations, rng);
        s.perm_p_duration =
            stats::independence_permutation_p(s.pre_dust, s.durations, permutations, rng);
    }
    return s;
}

// Empirical P[max >= M]
inline double hitting_fraction(const std::vector<double>& maxima, double level) {
    if (maxima.empty()) return 0.0;
    std::size_t n = 0;
    for (double m : maxima)
        if (m >= level) ++n;
    return static_cast<double>(n) / static_cast<double>(maxima.size());
}

}  // namespace fkise
