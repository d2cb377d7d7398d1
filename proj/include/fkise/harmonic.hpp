#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "fkise/loewner.hpp"
#include "fkise/rng.hpp"

namespace fkise {

// Renormalized harmonic measure of [0,L] seen from infinity; the pi*y
// normalization makes it exactly L.
inline double rhm_interval(double L) {
    if (L < 0.0) throw std::invalid_argument("rhm_interval: negative length");
    return L;
}

// Conformal route: theta is V - W along the extracted chain.
inline std::vector<double> theta_conformal(const DriverRecord& record) { return record.theta; }

struct Landing {
    bool on_curve = false;
    double x = 0.0;          // real-axis position when !on_curve
    std::size_t segment = 0; // curve segment index when on_curve
    bool right_side = false;
};

struct RhmOptions {
    std::size_t walkers = 20000;
    double mesh = 0.0;           // walk grid; default: quarter of min segment
    double launch_ratio = 50.0;  // launch height over hull diameter
    double launch_height = 0.0;  // explicit override
    std::uint64_t seed = 1;
};

struct RhmEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    double bias_bound = 0.0;
    std::size_t walkers = 0;
    double launch_height = 0.0;
    double mesh = 0.0;
};

namespace detail {

class CurveField {
public:
    CurveField(const PlanarCurve& curve, double mesh) : mesh_(mesh) {
        if (curve.size() >= 2) {
            for (std::size_t i = 0; i + 1 < curve.size(); ++i)
                if (std::abs(curve[i + 1] - curve[i]) > 1e-14) segs_.push_back({curve[i], curve[i + 1], i});
        }
        xlo_ = ylo_ = 1e300;
        xhi_ = yhi_ = -1e300;
        for (const Seg& s : segs_) {
            for (const cplx z : {s.a, s.b}) {
                xlo_ = std::min(xlo_, z.real());
                xhi_ = std::max(xhi_, z.real());
                ylo_ = std::min(ylo_, z.imag());
                yhi_ = std::max(yhi_, z.imag());
            }
        }
        if (segs_.empty()) {
            xlo_ = xhi_ = ylo_ = yhi_ = 0.0;
            return;
        }
        cell_ = std::max(2.0 * mesh_, 1e-12);
        for (const Seg& s : segs_) cell_ = std::max(cell_, 1e-9);
        nx_ = static_cast<int>((xhi_ - xlo_) / cell_) + 3;
        ny_ = static_cast<int>((yhi_ - ylo_) / cell_) + 3;
        buckets_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), {});
        dist_cells_.assign(buckets_.size(), -1);
        std::deque<int> frontier;
        for (std::size_t i = 0; i < segs_.size(); ++i) {
            // conservative rasterization: visit cells along the segment
            const Seg& s = segs_[i];
            const double len = std::abs(s.b - s.a);
            const int steps = std::max(1, static_cast<int>(len / (0.5 * cell_)) + 1);
            int last = -1;
            for (int k = 0; k <= steps; ++k) {
                const cplx z = s.a + (s.b - s.a) * (static_cast<double>(k) / steps);
                const int c = cell_index(z.real(), z.imag());
                if (c < 0 || c == last) continue;
                last = c;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int cc = shift(c, dx, dy);
                        if (cc >= 0) buckets_[static_cast<std::size_t>(cc)].push_back(i);
                    }
                if (dist_cells_[static_cast<std::size_t>(c)] != 0) {
                    dist_cells_[static_cast<std::size_t>(c)] = 0;
                    frontier.push_back(c);
                }
            }
        }
        for (auto& b : buckets_) {
            std::sort(b.begin(), b.end());
            b.erase(std::unique(b.begin(), b.end()), b.end());
        }
        // chebyshev BFS gives a certified lower bound on distance
        while (!frontier.empty()) {
            const int c = frontier.front();
            frontier.pop_front();
            const int d = dist_cells_[static_cast<std::size_t>(c)];
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int cc = shift(c, dx, dy);
                    if (cc < 0 || dist_cells_[static_cast<std::size_t>(cc)] >= 0) continue;
                    dist_cells_[static_cast<std::size_t>(cc)] = d + 1;
                    frontier.push_back(cc);
                }
        }
    }

    bool empty() const { return segs_.empty(); }
    double top() const { return segs_.empty() ? 0.0 : yhi_; }
    double diameter() const {
        return segs_.empty() ? 0.0 : std::hypot(xhi_ - xlo_, yhi_ - ylo_);
    }

    // certified lower bound for the distance from z to the curve
    double dist_lb(cplx z) const {
        if (segs_.empty()) return 1e300;
        const double dx = std::max({xlo_ - z.real(), z.real() - xhi_, 0.0});
        const double dy = std::max({ylo_ - z.imag(), z.imag() - yhi_, 0.0});
        const double outside = std::hypot(dx, dy);
        const int c = cell_index(z.real(), z.imag());
        if (c < 0) return std::max(outside, 1e-12);
        const int d = dist_cells_[static_cast<std::size_t>(c)];
        if (d < 0) return std::max(outside, 1e-12);
        return std::max(0.0, (static_cast<double>(d) - 1.5) * cell_);
    }

    // first crossing of the step w1 -> w2 with a curve segment
    bool crossing(cplx w1, cplx w2, Landing* landing) const {
        if (segs_.empty()) return false;
        const int c = cell_index(0.5 * (w1.real() + w2.real()), 0.5 * (w1.imag() + w2.imag()));
        if (c < 0) return false;
        double best_t = 2.0;
        for (int idx : buckets_[static_cast<std::size_t>(c)]) {
            const Seg& s = segs_[static_cast<std::size_t>(idx)];
            double t_hit, u_hit;
            if (!intersect(w1, w2, s.a, s.b, &t_hit, &u_hit)) continue;
            if (t_hit < best_t) {
                best_t = t_hit;
                landing->on_curve = true;
                landing->segment = s.curve_index;
                const cplx u = s.b - s.a;
                const cplx ap = w1 - (s.a + u * u_hit);
                landing->right_side = (u.real() * ap.imag() - u.imag() * ap.real()) < 0.0;
            }
        }
        return best_t <= 1.0;
    }

private:
    struct Seg {
        cplx a, b;
        std::size_t curve_index;
    };

    int cell_index(double x, double y) const {
        if (segs_.empty()) return -1;
        const int ix = static_cast<int>(std::floor((x - xlo_) / cell_)) + 1;
        const int iy = static_cast<int>(std::floor((y - ylo_) / cell_)) + 1;
        if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return -1;
        return iy * nx_ + ix;
    }
    int shift(int c, int dx, int dy) const {
        const int ix = c % nx_ + dx, iy = c / nx_ + dy;
        if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return -1;
        return iy * nx_ + ix;
    }

    static bool intersect(cplx p1, cplx p2, cplx q1, cplx q2, double* t, double* u) {
        const double rx = p2.real() - p1.real(), ry = p2.imag() - p1.imag();
        const double sx = q2.real() - q1.real(), sy = q2.imag() - q1.imag();
        const double den = rx * sy - ry * sx;
        if (std::fabs(den) < 1e-300) return false;
        const double qpx = q1.real() - p1.real(), qpy = q1.imag() - p1.imag();
        *t = (qpx * sy - qpy * sx) / den;
        *u = (qpx * ry - qpy * rx) / den;
        return *t >= 0.0 && *t <= 1.0 && *u >= 0.0 && *u <= 1.0;
    }

    double mesh_ = 0.0;
    std::vector<Seg> segs_;
    double xlo_, xhi_, ylo_, yhi_;
    double cell_ = 1.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> buckets_;
    std::vector<int> dist_cells_;
};

}  // namespace detail

// Landing points of independent Brownian walkers released at i*launch_height
// in H minus the hull. Far from obstacles the walk jumps exactly (half-plane
// kernel above the hull, ball exits elsewhere); within a few mesh units it
// steps on a lattice so absorption sites are resolved.
inline std::vector<Landing> rhm_landings(const PlanarCurve& hull, const RhmOptions& opt_in) {
    RhmOptions opt = opt_in;
    detail::CurveField field(hull, opt.mesh > 0.0 ? opt.mesh : 1e-3);
    double min_seg = 1e300;
    for (std::size_t i = 0; i + 1 < hull.size(); ++i)
        min_seg = std::min(min_seg, std::abs(hull[i + 1] - hull[i]));
    if (opt.mesh <= 0.0)
        opt.mesh = field.empty() || min_seg > 1e200 ? 1e-3 : std::max(1e-9, 0.25 * min_seg);
    const double diam = std::max(field.diameter(), opt.mesh);
    if (opt.launch_height <= 0.0) opt.launch_height = opt.launch_ratio * std::max(diam, 1.0);
    if (opt.launch_height < opt.launch_ratio * diam)
        throw std::invalid_argument("rhm: launch height violates the launch ratio");

    const double pi = 3.14159265358979323846;
    const double ytop = field.empty() ? 0.0 : field.top();
    const double mesh = opt.mesh;
    std::vector<Landing> landings(opt.walkers);

    for (std::size_t wk = 0; wk < opt.walkers; ++wk) {
        auto rng = make_stream(opt.seed, "rhm_walker", wk);
        cplx z(0.0, opt.launch_height);
        Landing land;
        for (;;) {
            if (z.imag() > ytop + 4.0 * mesh) {
                // exact first hit of the line just above the hull
                const double h = z.imag() - (ytop + 2.0 * mesh);
                z = cplx(z.real() + h * std::tan(pi * (u01(rng) - 0.5)), ytop + 2.0 * mesh);
                continue;
            }
            const double d_curve = field.dist_lb(z);
            const double d = std::min(d_curve, z.imag());
            if (d > 4.0 * mesh) {
                const double ang = 2.0 * pi * u01(rng);
                z += std::polar(0.9 * d, ang);
                continue;
            }
            if (z.imag() < mesh && d_curve > 4.0 * mesh) {
                land.on_curve = false;
                land.x = z.real();
                break;
            }
            // lattice step
            const double u = u01(rng);
            cplx step;
            if (u < 0.25) step = cplx(mesh, 0.0);
            else if (u < 0.5) step = cplx(-mesh, 0.0);
            else if (u < 0.75) step = cplx(0.0, mesh);
            else step = cplx(0.0, -mesh);
            const cplx z2 = z + step;
            Landing hit;
            if (field.crossing(z, z2, &hit)) {
                land = hit;
                break;
            }
            if (z2.imag() <= 0.0) {
                land.on_curve = false;
                land.x = z2.real();
                break;
            }
            z = z2;
        }
        landings[wk] = land;
    }
    return landings;
}

// pi * y * P[hit the right side of the curve or [0, x_b]], the Monte Carlo
// route to the boundary angle.
inline RhmEstimate theta_montecarlo(const PlanarCurve& hull, double x_b, const RhmOptions& opt_in) {
    RhmOptions opt = opt_in;
    detail::CurveField probe(hull, opt.mesh > 0.0 ? opt.mesh : 1e-3);
    double min_seg = 1e300;
    for (std::size_t i = 0; i + 1 < hull.size(); ++i)
        min_seg = std::min(min_seg, std::abs(hull[i + 1] - hull[i]));
    if (opt.mesh <= 0.0)
        opt.mesh = probe.empty() || min_seg > 1e200 ? std::max(1e-3, x_b / 1000.0)
                                                    : std::max(1e-9, 0.25 * min_seg);
    const double diam = std::max({probe.diameter(), opt.mesh, x_b});
    if (opt.launch_height <= 0.0) opt.launch_height = opt.launch_ratio * std::max(diam, 1.0);

    const auto landings = rhm_landings(hull, opt);
    std::size_t hits = 0;
    for (const Landing& l : landings) {
        if (l.on_curve ? l.right_side : (l.x >= 0.0 && l.x <= x_b)) ++hits;
    }
    const double pi = 3.14159265358979323846;
    const double p = static_cast<double>(hits) / static_cast<double>(landings.size());
    RhmEstimate est;
    est.value = pi * opt.launch_height * p;
    est.stderr_ = pi * opt.launch_height *
                  std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(landings.size()));
    est.bias_bound = 5.0 * opt.mesh;
    est.walkers = landings.size();
    est.launch_height = opt.launch_height;
    est.mesh = opt.mesh;
    return est;
}

// Estimate RHM of a real interval [a,b] by the same walker mechanism.
inline RhmEstimate rhm_interval_montecarlo(double a, double b, const RhmOptions& opt_in) {
    RhmOptions opt = opt_in;
    if (opt.mesh <= 0.0) opt.mesh = std::max(1e-6, (b - a) / 1000.0);
    if (opt.launch_height <= 0.0) opt.launch_height = opt.launch_ratio * std::max(1.0, b - a);
    const auto landings = rhm_landings(PlanarCurve{}, opt);
    std::size_t hits = 0;
    for (const Landing& l : landings)
        if (!l.on_curve && l.x >= a && l.x <= b) ++hits;
    const double pi = 3.14159265358979323846;
    const double p = static_cast<double>(hits) / static_cast<double>(landings.size());
    RhmEstimate est;
    est.value = pi * opt.launch_height * p;
    est.stderr_ = pi * opt.launch_height *
                  std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(landings.size()));
    est.bias_bound = 5.0 * opt.mesh;
    est.walkers = landings.size();
    est.launch_height = opt.launch_height;
    est.mesh = opt.mesh;
    return est;
}

}  // namespace fkise
