#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "fkise/rng.hpp"

namespace fkise::stats {

inline double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double variance(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(n - 1);
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// Regularized lower incomplete gamma P(a,x); series for x < a+1, continued
// fraction otherwise (Numerical Recipes style).
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Lentz continued fraction for Q(a,x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

// Survival function of chi^2 with dof degrees of freedom.
inline double chi2_sf(double x, double dof) {
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * x);
}

struct Chi2Result {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

// Pearson chi-square of observed counts against expected probabilities.
// Cells with tiny expectation are pooled into the largest cell.
inline Chi2Result chi2_test(std::span<const std::size_t> observed,
                            std::span<const double> expected_prob) {
    if (observed.size() != expected_prob.size() || observed.empty())
        throw std::invalid_argument("chi2_test: size mismatch");
    const double n = static_cast<double>(
        std::accumulate(observed.begin(), observed.end(), std::size_t{0}));
    double stat = 0.0;
    double pooled_obs = 0.0, pooled_exp = 0.0;
    int cells = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = n * expected_prob[i];
        if (e < 5.0) {
            pooled_obs += static_cast<double>(observed[i]);
            pooled_exp += e;
            continue;
        }
        const double diff = static_cast<double>(observed[i]) - e;
        stat += diff * diff / e;
        ++cells;
    }
    if (pooled_exp > 0.0) {
        const double diff = pooled_obs - pooled_exp;
        stat += diff * diff / pooled_exp;
        ++cells;
    }
    Chi2Result r;
    r.statistic = stat;
    r.dof = static_cast<double>(cells > 1 ? cells - 1 : 1);
    r.p_value = chi2_sf(stat, r.dof);
    return r;
}

// Kolmogorov distribution survival Q(lambda) = 2 sum (-1)^{k-1} exp(-2k^2 lambda^2).
inline double ks_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) *
                            std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::fabs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0.0;  // sup |F1 - F2|
    double p_value = 1.0;
};

// One-sample KS against a cdf callable, Stephens small-sample correction.
template <typename Cdf>
KsResult ks_test(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    KsResult r;
    r.statistic = d;
    const double en = std::sqrt(n);
    r.p_value = ks_sf((en + 0.12 + 0.11 / en) * d);
    return r;
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    const double en = std::sqrt(na * nb / (na + nb));
    r.p_value = ks_sf((en + 0.12 + 0.11 / en) * d);
    return r;
}

inline double pearson_corr(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return 0.0;
    const double mx = mean(x.subspan(0, n)), my = mean(y.subspan(0, n));
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// Szekely-Rizzo distance correlation between two scalar samples.
inline double distance_corr(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 4) return 0.0;
    auto centered = [n](std::span<const double> v) {
        std::vector<double> d(n * n);
        std::vector<double> row(n, 0.0);
        double tot = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double a = std::fabs(v[i] - v[j]);
                d[i * n + j] = a;
                row[i] += a;
                tot += a;
            }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i * n + j] += -row[i] / n - row[j] / n + tot / (static_cast<double>(n) * n);
        return d;
    };
    const auto A = centered(x.subspan(0, n));
    const auto B = centered(y.subspan(0, n));
    double vxy = 0.0, vxx = 0.0, vyy = 0.0;
    for (std::size_t k = 0; k < n * n; ++k) {
        vxy += A[k] * B[k];
        vxx += A[k] * A[k];
        vyy += B[k] * B[k];
    }
    if (vxx <= 0.0 || vyy <= 0.0) return 0.0;
    return std::sqrt(vxy / std::sqrt(vxx * vyy));
}

// Permutation p-value for dependence between paired samples, using distance
// correlation as the statistic.
inline double independence_permutation_p(std::span<const double> x, std::span<const double> y,
                                         int permutations, std::mt19937_64& rng) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 8) return 1.0;
    const double observed = distance_corr(x, y);
    std::vector<double> ys(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
    int ge = 0;
    for (int p = 0; p < permutations; ++p) {
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(u01(rng) * static_cast<double>(i + 1));
            std::swap(ys[i], ys[j]);
        }
        if (distance_corr(x.subspan(0, n), ys) >= observed) ++ge;
    }
    return (ge + 1.0) / (permutations + 1.0);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    const double mx = mean(x.subspan(0, n)), my = mean(y.subspan(0, n));
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    LinearFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    return f;
}

struct BootstrapSlope {
    double slope = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// Bootstrap CI for the slope of y = a + b x, resampling per-point estimates.
// ysamples[i] holds independent replicate values whose mean estimates y_i.
inline BootstrapSlope bootstrap_slope(std::span<const double> x,
                                      const std::vector<std::vector<double>>& ysamples,
                                      int nboot, std::mt19937_64& rng) {
    const std::size_t n = x.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = mean(ysamples[i]);
    BootstrapSlope out;
    out.slope = linear_fit(x, y).slope;
    std::vector<double> slopes(static_cast<std::size_t>(nboot));
    std::vector<double> yb(n);
    for (int b = 0; b < nboot; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = ysamples[i];
            double acc = 0.0;
            for (std::size_t k = 0; k < s.size(); ++k)
                acc += s[static_cast<std::size_t>(u01(rng) * static_cast<double>(s.size()))];
            yb[i] = acc / static_cast<double>(s.size());
        }
        slopes[static_cast<std::size_t>(b)] = linear_fit(x, yb).slope;
    }
    std::sort(slopes.begin(), slopes.end());
    out.ci_low = slopes[static_cast<std::size_t>(0.025 * nboot)];
    out.ci_high = slopes[static_cast<std::size_t>(std::min<double>(nboot - 1, 0.975 * nboot))];
    return out;
}

// Normalized autocorrelation of a scalar series at the given lag.
inline double autocorrelation(std::span<const double> x, std::size_t lag) {
    if (x.size() <= lag + 1) return 0.0;
    const double m = mean(x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        den += (x[i] - m) * (x[i] - m);
        if (i + lag < x.size()) num += (x[i] - m) * (x[i + lag] - m);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace fkise::stats
