#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fkise/lattice.hpp"

namespace fkise {

using cplx = std::complex<double>;

struct LoewnerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Planar curve in the closed upper half-plane, first point on the real line.
using PlanarCurve = std::vector<cplx>;

struct DriverRecord {
    std::vector<double> t;      // capacity times, t[0] = 0
    std::vector<double> W;      // driving function
    std::vector<double> V;      // force-point image
    std::vector<double> theta;  // V - W >= 0

    std::size_t size() const { return t.size(); }

    // linear interpolation in capacity time
    double w_at(double time) const { return interp(W, time); }
    double theta_at(double time) const { return interp(theta, time); }

private:
    double interp(const std::vector<double>& f, double time) const {
        if (t.empty()) throw LoewnerError("empty driver record");
        if (time <= t.front()) return f.front();
        if (time >= t.back()) return f.back();
        const auto it = std::upper_bound(t.begin(), t.end(), time);
        const std::size_t i = static_cast<std::size_t>(it - t.begin());
        const double u = (time - t[i - 1]) / (t[i] - t[i - 1]);
        return f[i - 1] + u * (f[i] - f[i - 1]);
    }
};

// Elementary map sigma(w) = (w+p)^{1-alpha} (w-q)^alpha: H -> H minus a
// straight slit of half-plane capacity dt = alpha(1-alpha)(p+q)^2/4 rooted at
// the origin, tilted by pi*alpha, with tip preimage at w = 0.
struct SlitParams {
    double alpha = 0.5;
    double p = 0.0;
    double q = 0.0;

    double length() const { return p + q; }
    double dt() const { return alpha * (1.0 - alpha) * length() * length() * 0.25; }
    double dw() const { return (1.0 - 2.0 * alpha) * length(); }  // driver displacement
    double tip_abs() const {
        return length() * std::pow(1.0 - alpha, 1.0 - alpha) * std::pow(alpha, alpha);
    }
    cplx tip() const { return std::polar(tip_abs(), 3.14159265358979323846 * alpha); }
};

inline cplx slit_map(const SlitParams& s, cplx w) {
    // principal logs keep the image in the closed upper half-plane
    return std::exp((1.0 - s.alpha) * std::log(w + s.p) + s.alpha * std::log(w - s.q));
}

inline cplx slit_map_deriv_ratio(const SlitParams& s, cplx w) {
    // sigma'(w) / sigma(w)
    return (1.0 - s.alpha) / (w + s.p) + s.alpha / (w - s.q);
}

// Forward family: slit with prescribed capacity and driver displacement.
// Matching the expansion gives scale m = sqrt(dw^2 + 16 dt) exactly.
inline SlitParams forward_slit(double dt, double dw) {
    if (dt <= 0.0) throw LoewnerError("forward_slit: capacity step must be positive");
    SlitParams s;
    const double m = std::sqrt(dw * dw + 16.0 * dt);
    s.alpha = 0.5 * (1.0 - dw / m);
    s.p = (1.0 - s.alpha) * m;
    s.q = s.alpha * m;
    return s;
}

// Unzip family: slit through a prescribed tip point zhat (relative to the
// current driver position).
inline SlitParams unzip_slit(cplx zhat) {
    SlitParams s;
    const double pi = 3.14159265358979323846;
    double a = std::arg(zhat) / pi;
    a = std::clamp(a, 1e-9, 1.0 - 1e-9);
    s.alpha = a;
    const double len = std::abs(zhat) / (std::pow(1.0 - a, 1.0 - a) * std::pow(a, a));
    s.p = (1.0 - a) * len;
    s.q = a * len;
    return s;
}

// sigma^{-1} on the real axis right of the weld interval: monotone from
// sigma(q) = 0, so a guarded Newton is safe.
inline double slit_inv_real_right(const SlitParams& s, double y) {
    if (y <= 0.0) return s.q;
    double lo = s.q, hi = std::max(s.q + 1.0, y + std::fabs(s.dw()) + 1.0);
    auto eval = [&](double w) { return std::real(slit_map(s, cplx(w, 0.0))); };
    while (eval(hi) < y) hi = s.q + 2.0 * (hi - s.q);
    double w = std::min(std::max(y - s.dw(), lo + 1e-14), hi);
    for (int it = 0; it < 80; ++it) {
        const double f = eval(w) - y;
        if (f > 0.0) hi = w; else lo = w;
        const double df = f / std::max(1e-300, std::real(slit_map_deriv_ratio(s, cplx(w, 0.0))) *
                                                    (f + y));
        double next = w - df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - w) < 1e-15 * std::max(1.0, std::fabs(w))) return next;
        w = next;
    }
    return w;
}

// sigma^{-1} for points of H. Newton with a far-field start and a sqrt start
// near the tip preimage (where sigma is critical).
inline cplx slit_inv(const SlitParams& s, cplx u) {
    const cplx tip = s.tip();
    const double scale = std::max(s.tip_abs(), std::abs(u));
    auto refine = [&](cplx w, int iters, double tol) -> std::pair<cplx, double> {
        for (int it = 0; it < iters; ++it) {
            const cplx f = slit_map(s, w) - u;
            if (std::abs(f) < tol) break;
            const cplx df = slit_map_deriv_ratio(s, w) * (f + u);
            if (std::abs(df) < 1e-300) break;
            cplx step = f / df;
            // keep iterates in the closed upper half-plane
            if (std::abs(step) > 0.5 * scale + 1.0) step *= (0.5 * scale + 1.0) / std::abs(step);
            cplx next = w - step;
            if (next.imag() < 0.0) next = cplx(next.real(), 0.0);
            w = next;
        }
        return {w, std::abs(slit_map(s, w) - u)};
    };
    const double tol = 1e-13 * std::max(1.0, scale);
    // near-tip start: sigma(w) ~ tip + sigma''(0)/2 w^2
    const cplx curv = -tip / (s.alpha * (1.0 - s.alpha) * s.length() * s.length());
    cplx w_tip = std::sqrt(2.0 * (u - tip) / curv);
    if (w_tip.imag() < 0.0) w_tip = -w_tip;
    // far-field start: sigma(w) ~ w + dw
    const cplx w_far(u.real() - s.dw(), std::max(u.imag(), 1e-12));
    auto [w1, e1] = refine(w_tip, 60, tol);
    if (e1 < tol) return w1;
    auto [w2, e2] = refine(w_far, 60, tol);
    if (e2 < tol) return w2;
    if (std::min(e1, e2) < 1e-7 * std::max(1.0, scale)) return e1 < e2 ? w1 : w2;
    std::ostringstream os;
    os << "slit_inv: no convergence for u=(" << u.real() << "," << u.imag() << ")";
    throw LoewnerError(os.str());
}

struct SlitStep {
    SlitParams slit;
    double w_prev = 0.0;  // driver before the step
    double w_new = 0.0;   // driver after the step
    double t_new = 0.0;   // cumulative capacity after the step
};

// Composition of elementary maps, hydrodynamically normalized; capacities add
// exactly by construction.
struct SlitChain {
    std::vector<SlitStep> steps;
    double w0 = 0.0;  // driver at time zero

    double total_capacity() const { return steps.empty() ? 0.0 : steps.back().t_new; }
    double driver_end() const { return steps.empty() ? w0 : steps.back().w_new; }

    // map a point of H through the chain inverse (H -> H minus hull),
    // i.e. evaluate g_t^{-1}
    cplx map_up(cplx w) const {
        for (std::size_t i = steps.size(); i-- > 0;) {
            const SlitStep& st = steps[i];
            w = slit_map(st.slit, w - st.w_new) + st.w_prev;
        }
        return w;
    }

    // push a point of H minus the hull down to H (evaluate g_t)
    cplx map_down(cplx z) const {
        for (const SlitStep& st : steps) {
            z = slit_inv(st.slit, z - st.w_prev) + st.w_new;
        }
        return z;
    }

    // push a real point lying right of every weld interval
    double map_down_real_right(double x) const {
        for (const SlitStep& st : steps)
            x = slit_inv_real_right(st.slit, x - st.w_prev) + st.w_new;
        return x;
    }

    // trace point at the end of the chain
    cplx trace_tip() const {
        if (steps.empty()) return cplx(w0, 0.0);
        return map_up(cplx(driver_end(), 0.0));
    }
};

// Forward Loewner solve: driver samples (t_k, W_k) -> discrete trace.
inline PlanarCurve forward_solve(const std::vector<double>& t, const std::vector<double>& w,
                                 SlitChain* chain_out = nullptr) {
    if (t.size() != w.size() || t.size() < 2) throw LoewnerError("forward_solve: bad driver samples");
    SlitChain chain;
    chain.w0 = w.front();
    PlanarCurve curve;
    curve.push_back(cplx(w.front(), 0.0));
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double dt = t[k] - t[k - 1];
        const double dw = w[k] - w[k - 1];
        if (dt <= 0.0) throw LoewnerError("forward_solve: times must increase");
        SlitStep st;
        st.slit = forward_slit(dt, dw);
        st.w_prev = w[k - 1];
        st.w_new = w[k];
        st.t_new = (chain.steps.empty() ? 0.0 : chain.steps.back().t_new) + st.slit.dt();
        chain.steps.push_back(st);
        curve.push_back(chain.trace_tip());
    }
    if (chain_out) *chain_out = std::move(chain);
    return curve;
}

struct ExtractOptions {
    double target_dcap = 0.0;   // <= 0: weld every input point
    double x0 = 0.0;            // force point V(0) = max(x0, W(0))
    double max_capacity = 0.0;  // stop once exceeded (<= 0: no limit)
};

inline double unzip_slit_cap(cplx zhat) {
    if (zhat.imag() <= 0.0) return 0.0;
    return unzip_slit(zhat).dt();
}

struct Extraction {
    SlitChain chain;
    DriverRecord record;
    std::vector<std::size_t> weld_index;  // input index welded at each record row
};

namespace detail {

struct WeldState {
    SlitChain chain;
    double w = 0.0;
    double v = 0.0;
    double t = 0.0;
};

inline void weld_point(WeldState& st, cplx zhat) {
    SlitStep step;
    step.slit = unzip_slit(zhat);
    step.w_prev = st.w;
    st.w += step.slit.dw();
    st.t += step.slit.dt();
    step.w_new = st.w;
    step.t_new = st.t;
    // force point rides along the real axis; once it coincides with the weld
    // interval it continues as the image of the rightmost hull point
    st.v = slit_inv_real_right(step.slit, std::max(0.0, st.v - step.w_prev)) + step.w_new;
    st.chain.steps.push_back(step);
}

}  // namespace detail

// Inverse solver: weld out one curve point per step in capacity
// parametrization. Points that produce a capacity increment below
// target_dcap are skipped so increments stay roughly uniform.
inline Extraction extract_driving(const PlanarCurve& curve, const ExtractOptions& opt = {}) {
    if (curve.empty()) throw LoewnerError("extract_driving: empty curve");
    if (std::fabs(curve.front().imag()) > 1e-9)
        throw LoewnerError("extract_driving: curve must start on the real line");

    detail::WeldState st;
    st.w = curve.front().real();
    st.chain.w0 = st.w;
    st.v = std::max(opt.x0, st.w);
    Extraction out;
    out.record.t.push_back(0.0);
    out.record.W.push_back(st.w);
    out.record.V.push_back(st.v);
    out.record.theta.push_back(st.v - st.w);
    out.weld_index.push_back(0);

    const double merge_tol = 1e-12;
    auto zhat_of = [&](std::size_t idx) -> cplx {
        cplx z = st.chain.map_down(curve[idx]);
        cplx zh = z - st.w;
        if (zh.imag() < 0.0) {
            if (zh.imag() < -1e-7 * std::max(1.0, std::abs(zh))) {
                std::ostringstream os;
                os << "extract_driving: point " << idx << " cannot be welded (below hull)";
                throw LoewnerError(os.str());
            }
            zh = cplx(zh.real(), 0.0);
        }
        return zh;
    };

    std::size_t idx = 1;
    std::size_t stride = 1;
    const std::size_t n = curve.size();
    while (idx < n) {
        std::size_t pick = idx;
        cplx zh = zhat_of(pick);
        if (opt.target_dcap > 0.0) {
            // gallop forward until the capacity increment reaches the target
            std::size_t lo = idx;  // exclusive candidates below target
            cplx zh_lo = zh;
            bool lo_ok = unzip_slit_cap(zh_lo) >= opt.target_dcap;
            if (!lo_ok) {
                std::size_t hi = idx;
                cplx zh_hi = zh;
                while (hi < n - 1 && unzip_slit_cap(zh_hi) < opt.target_dcap) {
                    lo = hi;
                    stride = std::min(stride * 2, n);
                    hi = std::min(n - 1, hi + stride);
                    zh_hi = zhat_of(hi);
                }
                // first index in (lo, hi] meeting the target
                while (hi - lo > 1) {
                    const std::size_t mid = lo + (hi - lo) / 2;
                    const cplx zm = zhat_of(mid);
                    if (unzip_slit_cap(zm) >= opt.target_dcap) {
                        hi = mid;
                        zh_hi = zm;
                    } else {
                        lo = mid;
                    }
                }
                pick = hi;
                zh = zh_hi;
                stride = std::max<std::size_t>(1, (pick - idx + 1) / 2);
            }
        }
        if (std::abs(zh) < merge_tol || zh.imag() <= 0.0) {
            // numerically coincident with the weld base: merge
            if (pick >= n - 1) break;
            idx = pick + 1;
            continue;
        }
        detail::weld_point(st, zh);
        out.record.t.push_back(st.t);
        out.record.W.push_back(st.w);
        out.record.V.push_back(st.v);
        out.record.theta.push_back(st.v - st.w);
        out.weld_index.push_back(pick);
        idx = pick + 1;
        if (opt.max_capacity > 0.0 && st.t >= opt.max_capacity) break;
    }
    out.chain = std::move(st.chain);
    return out;
}

// Half-plane capacity of the hull generated by a curve prefix.
inline double hcap_of(const PlanarCurve& curve) {
    if (curve.size() < 2) return 0.0;
    return extract_driving(curve).chain.total_capacity();
}

// Images of the force point x0 >= curve base along an extracted chain.
inline std::vector<double> track_force_point(const SlitChain& chain, double x0) {
    std::vector<double> v;
    double x = std::max(x0, chain.w0);
    v.push_back(x);
    for (const SlitStep& st : chain.steps) {
        x = slit_inv_real_right(st.slit, std::max(0.0, x - st.w_prev)) + st.w_new;
        v.push_back(x);
    }
    return v;
}

inline double curve_diameter(const PlanarCurve& curve) {
    if (curve.empty()) return 0.0;
    double xlo = curve[0].real(), xhi = xlo, ylo = curve[0].imag(), yhi = ylo;
    for (const cplx& z : curve) {
        xlo = std::min(xlo, z.real());
        xhi = std::max(xhi, z.real());
        ylo = std::min(ylo, z.imag());
        yhi = std::max(yhi, z.imag());
    }
    return std::hypot(xhi - xlo, yhi - ylo);
}

// diam(K_t) / (sqrt(t) + max |W - W0|), the deterministic comparison ratio.
inline double diam_check(const std::vector<double>& t, const std::vector<double>& w,
                         const PlanarCurve& curve) {
    if (t.empty() || curve.empty()) return 0.0;
    double wmax = 0.0;
    for (double x : w) wmax = std::max(wmax, std::fabs(x - w.front()));
    const double k = std::sqrt(t.back()) + wmax;
    return k > 0.0 ? curve_diameter(curve) / k : 0.0;
}

// Closed-form maps to (H; 0, infinity) for the supported idealized shapes.
class HalfPlaneMap {
public:
    enum class Shape { RectIdentity, DiskMoebius };

    static HalfPlaneMap rect(cplx a_pos) {
        HalfPlaneMap m;
        m.shape_ = Shape::RectIdentity;
        m.a_ = a_pos;
        return m;
    }

    // Disk of radius R centered at the origin; a -> 0, c -> infinity,
    // the mid-arc point (ccw from a to c) -> 1.
    static HalfPlaneMap disk(double radius, double angle_a, double angle_c) {
        HalfPlaneMap m;
        m.shape_ = Shape::DiskMoebius;
        m.a_ = std::polar(radius, angle_a);
        m.c_ = std::polar(radius, angle_c);
        double span = angle_c - angle_a;
        while (span <= 0.0) span += 2.0 * 3.14159265358979323846;
        m.p0_ = std::polar(radius, angle_a + 0.5 * span);
        return m;
    }

    cplx operator()(cplx z) const {
        if (shape_ == Shape::RectIdentity) return z - a_;
        const cplx u = (z - a_) / (z - c_);
        const cplx u0 = (p0_ - a_) / (p0_ - c_);
        return u / u0;
    }

    Shape shape() const { return shape_; }

private:
    Shape shape_ = Shape::RectIdentity;
    cplx a_{0.0, 0.0}, c_{0.0, 0.0}, p0_{0.0, 0.0};
};

// Map a lattice exploration path (half-mesh integer coordinates) into H.
inline PlanarCurve path_to_halfplane(const std::vector<Pt>& points, double mesh,
                                     const HalfPlaneMap& map) {
    PlanarCurve curve;
    curve.reserve(points.size());
    for (const Pt& p : points)
        curve.push_back(map(cplx(0.5 * mesh * p.x, 0.5 * mesh * p.y)));
    if (!curve.empty()) curve.front() = cplx(curve.front().real(), 0.0);
    return curve;
}

}  // namespace fkise
