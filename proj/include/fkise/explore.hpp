#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "fkise/fk.hpp"
#include "fkise/lattice.hpp"

namespace fkise {

// The medial layer works in half-mesh integer coordinates: site (x,y) sits at
// (2x,2y), the midpoint of a primal edge has exactly one odd coordinate, dual
// sites are odd-odd. Medial edges are the unit diagonal steps; each one is a
// side of one black (site) face and one white (dual) face.

inline constexpr std::array<Pt, 4> kDiag{Pt{1, 1}, Pt{-1, 1}, Pt{-1, -1}, Pt{1, -1}};

inline int diag_flip(int k) { return (k + 2) & 3; }

struct ExploreError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class MedialWorld {
public:
    enum : std::uint8_t { kAbsent = 0, kOpen = 1, kClosed = 2 };

    MedialWorld() = default;

    MedialWorld(const LatticeDomain& d, const EdgeConfig& config, const BoundarySpec& bc)
        : domain_(&d) {
        int minx = d.sites.front().x, maxx = minx, miny = d.sites.front().y, maxy = miny;
        for (const Pt p : d.sites) {
            minx = std::min(minx, p.x);
            maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y);
            maxy = std::max(maxy, p.y);
        }
        x0_ = 2 * minx - 3;
        y0_ = 2 * miny - 3;
        nx_ = 2 * (maxx - minx) + 7;
        ny_ = 2 * (maxy - miny) + 7;
        cell_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), 0);
        ghost_sides_ = (bc.kind == BcKind::Dobrushin);

        for (const Pt p : d.sites) at(2 * p.x, 2 * p.y) |= kSite;
        for (const Pt p : d.sites)
            if (d.has_site(p.x + 1, p.y) && d.has_site(p.x, p.y + 1) && d.has_site(p.x + 1, p.y + 1))
                at(2 * p.x + 1, 2 * p.y + 1) |= kWhite;

        // Forced-open boundary edges realize the wiring in the loop picture;
        // their states are independent of the rest of the configuration.
        std::vector<std::uint8_t> forced(d.edges.size(), 0);
        const int n = static_cast<int>(d.cycle_len());
        auto force_edges = [&](int from_pos, int count) {
            for (int i = 0; i < count; ++i) {
                const int u = d.cycle_site(static_cast<std::size_t>((from_pos + i) % n));
                const int v = d.cycle_site(static_cast<std::size_t>((from_pos + i + 1) % n));
                const int e = d.edge_between(d.sites[static_cast<std::size_t>(u)],
                                             d.sites[static_cast<std::size_t>(v)]);
                if (e >= 0) forced[static_cast<std::size_t>(e)] = 1;
            }
        };
        if (bc.kind == BcKind::Wired) {
            force_edges(0, n);
        } else if (bc.kind == BcKind::Dobrushin) {
            const int ia = d.mark_pos(Mark::A), ib = d.mark_pos(Mark::B);
            force_edges(ib, ia == ib ? n : (ia - ib + n) % n);
        } else {
            throw ExploreError("loop representation requires Dobrushin or wired boundary conditions");
        }

        for (std::size_t e = 0; e < d.edges.size(); ++e) {
            const Pt a = d.sites[static_cast<std::size_t>(d.edges[e].first)];
            const Pt b = d.sites[static_cast<std::size_t>(d.edges[e].second)];
            const bool open = forced[e] || config.open[e];
            at(a.x + b.x, a.y + b.y) |= open ? kOpenBit : kClosedBit;
        }
        if (ghost_sides_) {
            for (const Pt p : d.sites)
                for (const Pt dir : kDirs)
                    if (!d.has_site(p.x + dir.x, p.y + dir.y))
                        at(2 * p.x + dir.x, 2 * p.y + dir.y) |= kClosedBit;
        }
        assert_pairing_consistent();
    }

    const LatticeDomain& domain() const { return *domain_; }

    bool in_bounds(int x, int y) const {
        return x >= x0_ && y >= y0_ && x < x0_ + nx_ && y < y0_ + ny_;
    }

    std::uint8_t edge_state(int x, int y) const {
        if (!in_bounds(x, y)) return kAbsent;
        const std::uint8_t c = cell_at(x, y);
        if (c & kOpenBit) return kOpen;
        if (c & kClosedBit) return kClosed;
        return kAbsent;
    }
    std::uint8_t edge_state(Pt m) const { return edge_state(m.x, m.y); }

    bool is_site(int x, int y) const { return in_bounds(x, y) && (cell_at(x, y) & kSite); }
    bool is_interior_white(int x, int y) const { return in_bounds(x, y) && (cell_at(x, y) & kWhite); }

    // Medial edge from vertex m in diagonal direction k.
    bool side_present(Pt m, int k) const {
        const Pt n{m.x + kDiag[static_cast<std::size_t>(k)].x, m.y + kDiag[static_cast<std::size_t>(k)].y};
        if (edge_state(m) == kAbsent || edge_state(n) == kAbsent) return false;
        const Pt c1{m.x + kDiag[static_cast<std::size_t>(k)].x, m.y};
        const Pt c2{m.x, m.y + kDiag[static_cast<std::size_t>(k)].y};
        const bool c1_black = ((c1.x & 1) == 0) && ((c1.y & 1) == 0);
        const Pt black = c1_black ? c1 : c2;
        const Pt white = c1_black ? c2 : c1;
        if (ghost_sides_) return is_site(black.x, black.y);
        return is_interior_white(white.x, white.y);
    }

    // true if the white corner of side (m,k) is an interior dual face
    bool side_interior(Pt m, int k) const {
        const Pt c1{m.x + kDiag[static_cast<std::size_t>(k)].x, m.y};
        const Pt c2{m.x, m.y + kDiag[static_cast<std::size_t>(k)].y};
        const bool c1_black = ((c1.x & 1) == 0) && ((c1.y & 1) == 0);
        const Pt white = c1_black ? c2 : c1;
        return is_interior_white(white.x, white.y);
    }

    // Turning rule: a strand through a medial vertex never crosses the open
    // primal edge (or the open dual edge) through it.
    int partner(Pt m, int k) const {
        static constexpr std::array<int, 4> pair_a{1, 0, 3, 2};  // {NE,NW},{SW,SE}
        static constexpr std::array<int, 4> pair_b{3, 2, 1, 0};  // {NE,SE},{NW,SW}
        const bool horizontal = (m.x & 1) != 0;
        const bool open = edge_state(m) == kOpen;
        const bool use_a = (horizontal == open);
        return use_a ? pair_a[static_cast<std::size_t>(k)] : pair_b[static_cast<std::size_t>(k)];
    }

    template <typename Fn>
    void for_each_vertex(Fn&& fn) const {
        for (int y = y0_; y < y0_ + ny_; ++y)
            for (int x = x0_; x < x0_ + nx_; ++x)
                if (((x + y) & 1) && edge_state(x, y) != kAbsent) fn(Pt{x, y});
    }

    int x0() const { return x0_; }
    int y0() const { return y0_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }

private:
    enum : std::uint8_t { kSite = 1, kWhite = 2, kOpenBit = 4, kClosedBit = 8 };

    std::uint8_t& at(int x, int y) {
        return cell_[static_cast<std::size_t>(y - y0_) * static_cast<std::size_t>(nx_) +
                     static_cast<std::size_t>(x - x0_)];
    }
    std::uint8_t cell_at(int x, int y) const {
        return cell_[static_cast<std::size_t>(y - y0_) * static_cast<std::size_t>(nx_) +
                     static_cast<std::size_t>(x - x0_)];
    }

    void assert_pairing_consistent() const {
        for_each_vertex([&](Pt m) {
            for (int k = 0; k < 4; ++k) {
                if (side_present(m, k) != side_present(m, partner(m, k))) {
                    std::ostringstream os;
                    os << "inconsistent medial pairing at (" << m.x << "," << m.y << ")";
                    throw ExploreError(os.str());
                }
            }
        });
    }

    const LatticeDomain* domain_ = nullptr;
    int x0_ = 0, y0_ = 0, nx_ = 0, ny_ = 0;
    std::vector<std::uint8_t> cell_;
    bool ghost_sides_ = false;
};

// Flags per medial side, keyed by the doubled side midpoint (m1 + m2).
class SideSet {
public:
    explicit SideSet(const MedialWorld& w)
        : x0_(2 * w.x0()), y0_(2 * w.y0()), nx_(2 * w.nx()), ny_(2 * w.ny()),
          bits_(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), 0) {}

    bool test(Pt m, int k) const { return bits_[index(m, k)] != 0; }
    void set(Pt m, int k) { bits_[index(m, k)] = 1; }

private:
    std::size_t index(Pt m, int k) const {
        const int x = 2 * m.x + kDiag[static_cast<std::size_t>(k)].x;
        const int y = 2 * m.y + kDiag[static_cast<std::size_t>(k)].y;
        return static_cast<std::size_t>(y - y0_) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(x - x0_);
    }
    int x0_, y0_, nx_, ny_;
    std::vector<std::uint8_t> bits_;
};

struct Walk {
    std::vector<Pt> pts;       // closed walks repeat the first vertex at the end
    bool closed = true;
    long long area2 = 0;       // shoelace, positive = counterclockwise

    std::size_t n_sides() const { return pts.empty() ? 0 : pts.size() - 1; }
};

inline long long shoelace2(const std::vector<Pt>& pts) {
    long long s = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        s += static_cast<long long>(pts[i].x) * pts[i + 1].y -
             static_cast<long long>(pts[i + 1].x) * pts[i].y;
    return s;
}

struct LoopRepresentation {
    MedialWorld world;
    std::vector<Walk> loops;
    Walk interface;            // Dobrushin: open strand from a-diamond to b-diamond
    bool has_interface = false;
    Pt a_diamond{}, b_diamond{};
};

namespace detail {

inline int dir_index(Pt from, Pt to) {
    for (int k = 0; k < 4; ++k)
        if (from.x + kDirs[static_cast<std::size_t>(k)].x == to.x &&
            from.y + kDirs[static_cast<std::size_t>(k)].y == to.y)
            return k;
    throw ExploreError("dir_index: sites are not adjacent");
}

// direction table kDirs is counterclockwise E,N,W,S
inline int rot_cw(int k) { return (k + 3) & 3; }
inline int rot_ccw(int k) { return (k + 1) & 3; }

struct MarkFrame {
    Pt site;        // doubled coordinates
    int ndir = -1;  // direction to the ccw-next cycle site
    int pdir = -1;  // direction to the ccw-previous cycle site
};

inline MarkFrame mark_frame(const LatticeDomain& d, Mark m) {
    MarkFrame f;
    const int pos = d.mark_pos(m);
    const int n = static_cast<int>(d.cycle_len());
    const Pt a = d.sites[static_cast<std::size_t>(d.cycle_site(static_cast<std::size_t>(pos)))];
    const Pt nxt = d.sites[static_cast<std::size_t>(d.cycle_site(static_cast<std::size_t>((pos + 1) % n)))];
    const Pt prv = d.sites[static_cast<std::size_t>(d.cycle_site(static_cast<std::size_t>((pos + n - 1) % n)))];
    f.site = Pt{2 * a.x, 2 * a.y};
    f.ndir = dir_index(a, nxt);
    f.pdir = dir_index(a, prv);
    return f;
}

}  // namespace detail

// Corner of a's face between the wired and free arcs, on the exterior side of
// the first free-arc edge.
inline Pt a_diamond_of(const LatticeDomain& d) {
    const auto f = detail::mark_frame(d, Mark::A);
    const Pt dir = kDirs[static_cast<std::size_t>(detail::rot_cw(f.ndir))];
    return Pt{f.site.x + dir.x, f.site.y + dir.y};
}

inline Pt b_diamond_of(const LatticeDomain& d) {
    const auto f = detail::mark_frame(d, Mark::B);
    const Pt dir = kDirs[static_cast<std::size_t>(detail::rot_ccw(f.pdir))];
    return Pt{f.site.x + dir.x, f.site.y + dir.y};
}

namespace detail {

// Follow the pairing from `start` exiting along diagonal k0 until arriving at
// `stop` (open strand) or until the initial side comes up again (closed loop).
inline Walk trace_walk(const MedialWorld& w, SideSet& used, Pt start, int k0, const Pt* stop) {
    Walk walk;
    walk.pts.push_back(start);
    Pt m = start;
    int k = k0;
    for (;;) {
        if (!w.side_present(m, k) || used.test(m, k)) throw ExploreError("trace_walk: bad step");
        used.set(m, k);
        m = Pt{m.x + kDiag[static_cast<std::size_t>(k)].x, m.y + kDiag[static_cast<std::size_t>(k)].y};
        walk.pts.push_back(m);
        if (stop && m == *stop) {
            walk.closed = false;
            return walk;
        }
        k = w.partner(m, diag_flip(k));
        if (!stop && m == start && k == k0) {
            walk.closed = true;
            walk.area2 = shoelace2(walk.pts);
            return walk;
        }
    }
}

}  // namespace detail

// Loop representation of a configuration under Dobrushin or fully wired
// boundary conditions. Every in-play medial side belongs to exactly one walk;
// the deterministic strand hugging the outside of the wired arc is dropped.
inline LoopRepresentation loops_from(const EdgeConfig& config, const LatticeDomain& d,
                                     const BoundarySpec& bc) {
    LoopRepresentation rep;
    rep.world = MedialWorld(d, config, bc);
    const MedialWorld& w = rep.world;
    SideSet used(w);

    if (bc.kind == BcKind::Dobrushin) {
        rep.a_diamond = a_diamond_of(d);
        rep.b_diamond = b_diamond_of(d);
        const auto fa = detail::mark_frame(d, Mark::A);
        const Pt m_next{fa.site.x + kDirs[static_cast<std::size_t>(fa.ndir)].x,
                        fa.site.y + kDirs[static_cast<std::size_t>(fa.ndir)].y};
        int k_first = -1;
        for (int k = 0; k < 4; ++k) {
            const Pt to{rep.a_diamond.x + kDiag[static_cast<std::size_t>(k)].x,
                        rep.a_diamond.y + kDiag[static_cast<std::size_t>(k)].y};
            if (to == m_next) k_first = k;
        }
        if (k_first < 0 || !w.side_present(rep.a_diamond, k_first))
            throw ExploreError("loops_from: no exploration corner at mark a");
        rep.interface = detail::trace_walk(w, used, rep.a_diamond, k_first, &rep.b_diamond);
        rep.has_interface = true;
        // consume the outer strand from b-diamond back to a-diamond
        for (int k = 0; k < 4; ++k)
            if (w.side_present(rep.b_diamond, k) && !used.test(rep.b_diamond, k)) {
                (void)detail::trace_walk(w, used, rep.b_diamond, k, &rep.a_diamond);
                break;
            }
    }

    w.for_each_vertex([&](Pt m) {
        for (int k = 0; k < 4; ++k) {
            if (!w.side_present(m, k) || used.test(m, k)) continue;
            rep.loops.push_back(detail::trace_walk(w, used, m, k, nullptr));
        }
    });
    return rep;
}

struct ExplorationPath {
    std::vector<Pt> points;   // medial vertices in units of mesh/2
    Pt start{}, target{};
    std::vector<std::size_t> cut_steps;  // wired exploration: indices of cut events
};

inline ExplorationPath explore_dobrushin(const LoopRepresentation& rep) {
    if (!rep.has_interface) throw ExploreError("explore_dobrushin: representation has no interface");
    ExplorationPath p;
    p.points = rep.interface.pts;
    p.start = rep.a_diamond;
    p.target = rep.b_diamond;
    return p;
}

namespace detail {

// Best-first reachability over unused medial sides. When the target is not
// reachable the explored component has been sealed off for good and is marked
// dead, so repeated failures stay cheap.
class Reach {
public:
    Reach(const MedialWorld& w, SideSet& used, SideSet& dead)
        : w_(w), used_(used), dead_(dead),
          x0_(2 * w.x0()), y0_(2 * w.y0()), nx_(2 * w.nx()), ny_(2 * w.ny()),
          stamp_(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), 0) {}

    bool reaches(Pt from, int k_from, Pt target) {
        ++query_;
        while (!pq_.empty()) pq_.pop();
        visited_.clear();
        order_ = 0;
        push(from, k_from, target);
        while (!pq_.empty()) {
            const Item it = pq_.top();
            pq_.pop();
            visited_.push_back({it.m, it.k});
            const Pt far{it.m.x + kDiag[static_cast<std::size_t>(it.k)].x,
                         it.m.y + kDiag[static_cast<std::size_t>(it.k)].y};
            for (const Pt v : {it.m, far}) {
                if (v == target) return true;
                for (int k = 0; k < 4; ++k) push(v, k, target);
            }
        }
        for (const auto& [m, k] : visited_) dead_.set(m, k);
        return false;
    }

private:
    struct Item {
        int dist;
        std::uint32_t order;
        Pt m;
        int k;
    };
    struct Cmp {
        bool operator()(const Item& a, const Item& b) const {
            return a.dist != b.dist ? a.dist > b.dist : a.order > b.order;
        }
    };

    std::size_t side_index(Pt m, int k) const {
        const int x = 2 * m.x + kDiag[static_cast<std::size_t>(k)].x;
        const int y = 2 * m.y + kDiag[static_cast<std::size_t>(k)].y;
        return static_cast<std::size_t>(y - y0_) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(x - x0_);
    }

    void push(Pt m, int k, Pt target) {
        if (!w_.side_present(m, k) || used_.test(m, k) || dead_.test(m, k)) return;
        const std::size_t idx = side_index(m, k);
        if (stamp_[idx] == query_) return;
        stamp_[idx] = query_;
        const Pt far{m.x + kDiag[static_cast<std::size_t>(k)].x,
                     m.y + kDiag[static_cast<std::size_t>(k)].y};
        pq_.push(Item{std::abs(far.x - target.x) + std::abs(far.y - target.y), order_++, m, k});
    }

    const MedialWorld& w_;
    SideSet& used_;
    SideSet& dead_;
    int x0_, y0_, nx_, ny_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t query_ = 0;
    std::priority_queue<Item, std::vector<Item>, Cmp> pq_;
    std::vector<std::pair<Pt, int>> visited_;
    std::uint32_t order_ = 0;
};

// Direction along which the loop through side (m,k) runs clockwise.
inline bool cw_forward(const MedialWorld& w, Pt m, int k) {
    long long area = 0;
    Pt cur = m;
    int kk = k;
    do {
        const Pt nxt{cur.x + kDiag[static_cast<std::size_t>(kk)].x,
                     cur.y + kDiag[static_cast<std::size_t>(kk)].y};
        area += static_cast<long long>(cur.x) * nxt.y - static_cast<long long>(nxt.x) * cur.y;
        kk = w.partner(nxt, diag_flip(kk));
        cur = nxt;
    } while (!(cur == m && kk == k));
    return area < 0;
}

}  // namespace detail

// Exploration path in a fully wired domain from mark `a` toward mark
// `target`: cut the loop at a, follow it clockwise, and whenever the walk is
// sealed off from the target cut open the nearest live loop.
inline ExplorationPath explore_wired(const LoopRepresentation& rep, const LatticeDomain& d,
                                     Mark a = Mark::A, Mark target = Mark::C) {
    const MedialWorld& w = rep.world;
    ExplorationPath path;

    const auto fa = detail::mark_frame(d, a);
    const auto fc = detail::mark_frame(d, target);
    if (fa.site == fc.site) throw ExploreError("explore_wired: marks coincide");
    const Pt va{fa.site.x + kDirs[static_cast<std::size_t>(fa.ndir)].x,
                fa.site.y + kDirs[static_cast<std::size_t>(fa.ndir)].y};
    const Pt cdiam{fc.site.x + kDirs[static_cast<std::size_t>(fc.ndir)].x,
                   fc.site.y + kDirs[static_cast<std::size_t>(fc.ndir)].y};
    path.start = va;
    path.target = cdiam;
    path.points.push_back(va);
    if (va == cdiam) return path;

    // first step rounds a's face inward, wired cluster on the left
    int k0 = -1;
    for (int k = 0; k < 4; ++k) {
        if (!w.side_present(va, k)) continue;
        const Pt c1{va.x + kDiag[static_cast<std::size_t>(k)].x, va.y};
        const Pt c2{va.x, va.y + kDiag[static_cast<std::size_t>(k)].y};
        const Pt black = (((c1.x & 1) == 0) && ((c1.y & 1) == 0)) ? c1 : c2;
        if (black == fa.site) k0 = k;
    }
    if (k0 < 0) throw ExploreError("explore_wired: no interior medial structure at mark a");

    SideSet used(w);
    SideSet dead(w);
    detail::Reach reach(w, used, dead);

    std::unordered_map<std::int64_t, int> wall_pos;  // cycle-edge midpoints
    {
        const int n = static_cast<int>(d.cycle_len());
        for (int p = 0; p < n; ++p) {
            const Pt u = d.sites[static_cast<std::size_t>(d.cycle_site(static_cast<std::size_t>(p)))];
            const Pt v = d.sites[static_cast<std::size_t>(d.cycle_site(static_cast<std::size_t>((p + 1) % n)))];
            wall_pos.emplace(pt_key(u.x + v.x, u.y + v.y), p);
        }
    }
    std::unordered_map<std::int64_t, std::size_t> last_visit;
    std::size_t last_wall_step = 0;
    last_visit[pt_key(va)] = 0;

    Pt m = va;
    int k = k0;
    const std::size_t max_steps =
        static_cast<std::size_t>(w.nx()) * static_cast<std::size_t>(w.ny()) * 4 + 16;

    auto find_jump = [&](Pt tip) -> bool {
        std::deque<Pt> queue{tip};
        std::unordered_map<std::int64_t, bool> seen{{pt_key(tip), true}};
        while (!queue.empty()) {
            const Pt v = queue.front();
            queue.pop_front();
            for (int kk = 0; kk < 4; ++kk) {
                if (w.side_present(v, kk) && !used.test(v, kk) && !dead.test(v, kk) &&
                    reach.reaches(v, kk, cdiam)) {
                    const bool fwd = detail::cw_forward(w, v, kk);
                    const Pt entry = fwd ? v
                                         : Pt{v.x + kDiag[static_cast<std::size_t>(kk)].x,
                                              v.y + kDiag[static_cast<std::size_t>(kk)].y};
                    const int ke = fwd ? kk : diag_flip(kk);
                    path.cut_steps.push_back(path.points.size() - 1);
                    if (!(entry == path.points.back())) {
                        path.points.push_back(entry);
                        last_visit[pt_key(entry)] = path.points.size() - 1;
                    }
                    m = entry;
                    k = ke;
                    return true;
                }
            }
            for (int kk = 0; kk < 4; ++kk) {
                const Pt nb{v.x + kDiag[static_cast<std::size_t>(kk)].x,
                            v.y + kDiag[static_cast<std::size_t>(kk)].y};
                if (!w.in_bounds(nb.x, nb.y) || w.edge_state(nb) == MedialWorld::kAbsent) continue;
                auto [it, fresh] = seen.emplace(pt_key(nb), true);
                if (fresh) queue.push_back(nb);
            }
        }
        return false;
    };

    for (std::size_t step = 0; step < max_steps; ++step) {
        used.set(m, k);
        const Pt nxt{m.x + kDiag[static_cast<std::size_t>(k)].x,
                     m.y + kDiag[static_cast<std::size_t>(k)].y};
        path.points.push_back(nxt);
        if (nxt == cdiam) return path;

        const std::size_t now = path.points.size() - 1;
        bool revisit = false;
        if (auto it = last_visit.find(pt_key(nxt)); it != last_visit.end()) {
            revisit = true;
            it->second = now;
        } else {
            last_visit.emplace(pt_key(nxt), now);
        }
        bool wall_return = false;
        if (wall_pos.count(pt_key(nxt))) {
            if (now - last_wall_step > 2) wall_return = true;
            last_wall_step = now;
        }

        const int kc = w.partner(nxt, diag_flip(k));
        const bool can_continue = w.side_present(nxt, kc) && !used.test(nxt, kc);
        bool cut = !can_continue;
        if (!cut && (revisit || wall_return) && !reach.reaches(nxt, kc, cdiam)) cut = true;

        if (!cut) {
            m = nxt;
            k = kc;
            continue;
        }
        if (!find_jump(nxt)) {
            std::ostringstream os;
            os << "explore_wired: target unreachable from (" << nxt.x << "," << nxt.y << ") after "
               << path.points.size() << " steps and " << path.cut_steps.size() << " cuts";
            throw ExploreError(os.str());
        }
    }
    throw ExploreError("explore_wired: step budget exceeded");
}

// Ordered path step indices at which the path touches a medial vertex
// adjacent to the given boundary arc.
inline std::vector<std::size_t> boundary_hits(const ExplorationPath& path, const LatticeDomain& d,
                                              const BoundaryArc& arc) {
    std::vector<char> in_arc(d.sites.size(), 0);
    for (int s : arc.sites) in_arc[static_cast<std::size_t>(s)] = 1;
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        const Pt m = path.points[i];
        Pt s1, s2;
        if (m.x & 1) {
            s1 = Pt{(m.x - 1) / 2, m.y / 2};
            s2 = Pt{(m.x + 1) / 2, m.y / 2};
        } else {
            s1 = Pt{m.x / 2, (m.y - 1) / 2};
            s2 = Pt{m.x / 2, (m.y + 1) / 2};
        }
        bool hit = false;
        for (const Pt s : {s1, s2}) {
            const int idx = d.site_at(s.x, s.y);
            if (idx >= 0 && in_arc[static_cast<std::size_t>(idx)]) hit = true;
        }
        if (hit) hits.push_back(i);
    }
    return hits;
}

}  // namespace fkise
