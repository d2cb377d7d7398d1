#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "fkise/union_find.hpp"

namespace fkise {

struct Pt {
    int x = 0;
    int y = 0;
    friend bool operator==(const Pt&, const Pt&) = default;
};

inline std::int64_t pt_key(int x, int y) {
    return (static_cast<std::int64_t>(x) << 32) ^ (static_cast<std::int64_t>(y) & 0xffffffffLL);
}
inline std::int64_t pt_key(const Pt& p) { return pt_key(p.x, p.y); }

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Directions in counterclockwise order starting east.
inline constexpr std::array<Pt, 4> kDirs{Pt{1, 0}, Pt{0, 1}, Pt{-1, 0}, Pt{0, -1}};

enum class Mark { A = 0, B = 1, C = 2 };

// A finite simply connected sub-lattice of delta*Z^2. Site positions are
// integer coordinates times `mesh`; everything downstream works in integers
// so files are mesh-exact.
struct LatticeDomain {
    double mesh = 1.0;
    std::vector<Pt> sites;                       // canonical order (y, then x)
    std::vector<std::pair<int, int>> edges;      // induced bonds, canonical order
    std::vector<int> boundary_cycle;             // site indices, ccw closed walk
    std::array<int, 3> marks{-1, -1, -1};        // positions in boundary_cycle (a,b,c)

    std::unordered_map<std::int64_t, int> site_index;   // keyed by coords
    std::unordered_map<std::int64_t, int> edge_index;   // keyed by midpoint*2 coords

    int site_at(int x, int y) const {
        auto it = site_index.find(pt_key(x, y));
        return it == site_index.end() ? -1 : it->second;
    }
    bool has_site(int x, int y) const { return site_at(x, y) >= 0; }

    int edge_between(const Pt& a, const Pt& b) const {
        auto it = edge_index.find(pt_key(a.x + b.x, a.y + b.y));
        return it == edge_index.end() ? -1 : it->second;
    }

    int mark_site(Mark m) const { return boundary_cycle[static_cast<std::size_t>(marks[static_cast<int>(m)])]; }
    int mark_pos(Mark m) const { return marks[static_cast<int>(m)]; }

    std::size_t cycle_len() const { return boundary_cycle.size(); }
    int cycle_site(std::size_t pos) const { return boundary_cycle[pos % cycle_len()]; }
};

namespace detail {

inline void index_sites(LatticeDomain& d) {
    std::sort(d.sites.begin(), d.sites.end(), [](const Pt& a, const Pt& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    d.site_index.clear();
    for (std::size_t i = 0; i < d.sites.size(); ++i)
        d.site_index[pt_key(d.sites[i])] = static_cast<int>(i);
}

inline void build_induced_edges(LatticeDomain& d) {
    d.edges.clear();
    d.edge_index.clear();
    for (std::size_t i = 0; i < d.sites.size(); ++i) {
        const Pt p = d.sites[i];
        for (const Pt dir : {Pt{1, 0}, Pt{0, 1}}) {
            const int j = d.site_at(p.x + dir.x, p.y + dir.y);
            if (j < 0) continue;
            d.edge_index[pt_key(2 * p.x + dir.x, 2 * p.y + dir.y)] =
                static_cast<int>(d.edges.size());
            d.edges.emplace_back(static_cast<int>(i), j);
        }
    }
}

inline Pt rot_cw(Pt v) { return Pt{v.y, -v.x}; }
inline Pt rot_ccw(Pt v) { return Pt{-v.y, v.x}; }

// Outer-face walk, counterclockwise (interior on the left). Produces a closed
// walk; sites may repeat on width-one protrusions.
inline std::vector<int> trace_boundary(const LatticeDomain& d) {
    if (d.sites.empty()) return {};
    if (d.edges.empty()) return {0};
    int start = 0;  // canonical order puts the bottom-left site first
    const Pt s0 = d.sites[static_cast<std::size_t>(start)];
    auto step_dir = [&](const Pt& at, Pt incoming) -> Pt {
        // right turn first keeps the exterior on the right
        for (const Pt cand : {rot_cw(incoming), incoming, rot_ccw(incoming), Pt{-incoming.x, -incoming.y}}) {
            if (d.has_site(at.x + cand.x, at.y + cand.y)) return cand;
        }
        throw DomainError("boundary trace: isolated site");
    };
    std::vector<int> cycle;
    Pt pos = s0;
    Pt dir = step_dir(pos, Pt{1, 0});
    const Pt dir0 = dir;
    do {
        cycle.push_back(d.site_at(pos.x, pos.y));
        pos = Pt{pos.x + dir.x, pos.y + dir.y};
        dir = step_dir(pos, dir);
    } while (!(pos == s0 && dir == dir0));
    return cycle;
}

inline void validate_topology(const LatticeDomain& d) {
    if (d.sites.empty()) throw DomainError("domain has no sites");
    if (d.edges.empty()) throw DomainError("domain has empty edge set");
    UnionFind uf(d.sites.size());
    for (const auto& [a, b] : d.edges) uf.unite(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    if (uf.components() != 1) throw DomainError("domain edge set is not connected");
    // Euler count for induced sub-lattices: V - E + filled cells == 1 iff
    // simply connected.
    std::int64_t cells = 0;
    for (const Pt p : d.sites) {
        if (d.has_site(p.x + 1, p.y) && d.has_site(p.x, p.y + 1) && d.has_site(p.x + 1, p.y + 1))
            ++cells;
    }
    const std::int64_t euler = static_cast<std::int64_t>(d.sites.size()) -
                               static_cast<std::int64_t>(d.edges.size()) + cells;
    if (euler != 1) throw DomainError("domain is not simply connected");
}

// Snap a continuous boundary position to the nearest cycle site; smallest
// cycle index wins ties.
inline int snap_mark(const LatticeDomain& d, double x, double y) {
    const double sx = x / d.mesh, sy = y / d.mesh;
    int best = -1;
    double best_d2 = 0.0;
    for (std::size_t i = 0; i < d.boundary_cycle.size(); ++i) {
        const Pt p = d.sites[static_cast<std::size_t>(d.boundary_cycle[i])];
        const double dx = p.x - sx, dy = p.y - sy;
        const double d2 = dx * dx + dy * dy;
        if (best < 0 || d2 < best_d2 - 1e-12) {
            best = static_cast<int>(i);
            best_d2 = d2;
        }
    }
    return best;
}

inline void set_marks(LatticeDomain& d, const std::array<std::pair<double, double>, 3>& mark_pos) {
    for (int m = 0; m < 3; ++m)
        d.marks[static_cast<std::size_t>(m)] = snap_mark(d, mark_pos[static_cast<std::size_t>(m)].first,
                                                         mark_pos[static_cast<std::size_t>(m)].second);
    const int ia = d.marks[0], ib = d.marks[1], ic = d.marks[2];
    if (ia == ic || ib == ic)
        throw DomainError("mesh too coarse: mark c collides with another mark after snapping");
    if (ia != ib) {
        // ccw order a,b,c along the cycle
        const auto fwd = [&](int from, int to) {
            return (to - from + static_cast<int>(d.cycle_len())) % static_cast<int>(d.cycle_len());
        };
        if (!(fwd(ia, ib) < fwd(ia, ic)))
            throw DomainError("marks are not in counterclockwise order a,b,c");
    }
}

inline void finalize(LatticeDomain& d, const std::array<std::pair<double, double>, 3>& mark_pos) {
    index_sites(d);
    build_induced_edges(d);
    validate_topology(d);
    d.boundary_cycle = trace_boundary(d);
    set_marks(d, mark_pos);
}

}  // namespace detail

inline LatticeDomain build_rectangle(double width, double height, double mesh,
                                     const std::array<std::pair<double, double>, 3>& marks) {
    if (mesh <= 0.0) throw DomainError("mesh must be positive");
    const int nx = static_cast<int>(std::floor(width / mesh + 1e-9));
    const int ny = static_cast<int>(std::floor(height / mesh + 1e-9));
    if (nx < 1 || ny < 1) throw DomainError("mesh too coarse for the requested rectangle");
    LatticeDomain d;
    d.mesh = mesh;
    for (int y = 0; y <= ny; ++y)
        for (int x = 0; x <= nx; ++x) d.sites.push_back(Pt{x, y});
    detail::finalize(d, marks);
    return d;
}

inline LatticeDomain build_disk(double radius, double mesh,
                                const std::array<std::pair<double, double>, 3>& marks) {
    if (mesh <= 0.0) throw DomainError("mesh must be positive");
    const int r = static_cast<int>(std::floor(radius / mesh + 1e-9));
    const double r2 = (radius / mesh) * (radius / mesh);
    LatticeDomain d;
    d.mesh = mesh;
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x)
            if (x * x + y * y <= r2 + 1e-9) d.sites.push_back(Pt{x, y});
    if (d.sites.empty()) throw DomainError("mesh too coarse: empty disk");
    // keep the largest connected component
    detail::index_sites(d);
    UnionFind uf(d.sites.size());
    for (std::size_t i = 0; i < d.sites.size(); ++i)
        for (const Pt dir : {Pt{1, 0}, Pt{0, 1}}) {
            const int j = d.site_at(d.sites[i].x + dir.x, d.sites[i].y + dir.y);
            if (j >= 0) uf.unite(i, static_cast<std::size_t>(j));
        }
    std::unordered_map<std::size_t, std::size_t> comp_size;
    for (std::size_t i = 0; i < d.sites.size(); ++i) ++comp_size[uf.find(i)];
    std::size_t best_root = 0, best = 0;
    for (const auto& [root, n] : comp_size)
        if (n > best) {
            best = n;
            best_root = root;
        }
    std::vector<Pt> kept;
    for (std::size_t i = 0; i < d.sites.size(); ++i)
        if (uf.find(i) == best_root) kept.push_back(d.sites[i]);
    d.sites = std::move(kept);
    detail::finalize(d, marks);
    return d;
}

// Convenience for disks: marks given as angles on the circle.
inline std::array<std::pair<double, double>, 3> disk_marks(double radius, double ang_a,
                                                           double ang_b, double ang_c) {
    auto at = [radius](double t) {
        return std::pair<double, double>{radius * std::cos(t), radius * std::sin(t)};
    };
    return {at(ang_a), at(ang_b), at(ang_c)};
}

struct BoundaryArc {
    Mark from = Mark::A;
    Mark to = Mark::B;
    std::vector<int> sites;        // site indices, ccw from `from` to `to`
    std::vector<int> cycle_positions;
};

// Counterclockwise arc between two marks. With a == b the (A,B) arc is the
// degenerate single point and the (B,A) arc is the full cycle.
inline BoundaryArc arc_between(const LatticeDomain& d, Mark from, Mark to) {
    BoundaryArc arc;
    arc.from = from;
    arc.to = to;
    const int n = static_cast<int>(d.cycle_len());
    const int i0 = d.mark_pos(from);
    const int i1 = d.mark_pos(to);
    int span = (i1 - i0 + n) % n;
    if (span == 0 && !(from == Mark::A && to == Mark::B)) span = n;  // degenerate a==b
    for (int k = 0; k <= span; ++k) {
        arc.cycle_positions.push_back((i0 + k) % n);
        arc.sites.push_back(d.cycle_site(static_cast<std::size_t>(i0 + k)));
    }
    return arc;
}

struct MedialGraph {
    std::vector<Pt> vertices;                  // primal-edge midpoints, units of mesh/2
    std::vector<std::pair<int, int>> edges;    // adjacent perpendicular midpoints
    std::vector<Pt> black_faces;               // primal sites (units of mesh/2)
    std::vector<Pt> white_faces;               // interior dual sites (units of mesh/2)
};

inline MedialGraph medial_of(const LatticeDomain& d) {
    MedialGraph m;
    std::unordered_map<std::int64_t, int> vid;
    auto vertex = [&](int x, int y) {
        auto it = vid.find(pt_key(x, y));
        if (it != vid.end()) return it->second;
        const int id = static_cast<int>(m.vertices.size());
        vid[pt_key(x, y)] = id;
        m.vertices.push_back(Pt{x, y});
        return id;
    };
    for (const auto& [a, b] : d.edges) {
        const Pt pa = d.sites[static_cast<std::size_t>(a)], pb = d.sites[static_cast<std::size_t>(b)];
        vertex(pa.x + pb.x, pa.y + pb.y);
    }
    // sides of each site's face: consecutive perpendicular incident edges
    for (const Pt p : d.sites) {
        std::array<int, 4> mid{-1, -1, -1, -1};
        for (int k = 0; k < 4; ++k) {
            const Pt q{p.x + kDirs[static_cast<std::size_t>(k)].x, p.y + kDirs[static_cast<std::size_t>(k)].y};
            if (d.has_site(q.x, q.y)) mid[static_cast<std::size_t>(k)] = vertex(p.x + q.x, p.y + q.y);
        }
        for (int k = 0; k < 4; ++k) {
            const int u = mid[static_cast<std::size_t>(k)], v = mid[static_cast<std::size_t>((k + 1) % 4)];
            if (u >= 0 && v >= 0) m.edges.emplace_back(std::min(u, v), std::max(u, v));
        }
    }
    std::sort(m.edges.begin(), m.edges.end());
    m.edges.erase(std::unique(m.edges.begin(), m.edges.end()), m.edges.end());
    for (const Pt p : d.sites) {
        m.black_faces.push_back(Pt{2 * p.x, 2 * p.y});
        if (d.has_site(p.x + 1, p.y) && d.has_site(p.x, p.y + 1) && d.has_site(p.x + 1, p.y + 1))
            m.white_faces.push_back(Pt{2 * p.x + 1, 2 * p.y + 1});
    }
    return m;
}

inline nlohmann::json domain_to_json(const LatticeDomain& d) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["mesh"] = d.mesh;
    nlohmann::json verts = nlohmann::json::array();
    for (const Pt p : d.sites) verts.push_back({p.x, p.y});
    j["vertices"] = std::move(verts);
    j["boundary_cycle"] = d.boundary_cycle;
    j["marks"] = {d.marks[0], d.marks[1], d.marks[2]};
    return j;
}

inline LatticeDomain domain_from_json(const nlohmann::json& j) {
    if (j.value("schema_version", 0) != 1) throw DomainError("unsupported domain schema version");
    LatticeDomain d;
    d.mesh = j.at("mesh").get<double>();
    for (const auto& v : j.at("vertices")) d.sites.push_back(Pt{v.at(0).get<int>(), v.at(1).get<int>()});
    detail::index_sites(d);
    detail::build_induced_edges(d);
    detail::validate_topology(d);
    d.boundary_cycle = j.at("boundary_cycle").get<std::vector<int>>();
    const auto mk = j.at("marks");
    d.marks = {mk.at(0).get<int>(), mk.at(1).get<int>(), mk.at(2).get<int>()};
    return d;
}

inline std::uint64_t domain_hash(const LatticeDomain& d) {
    const std::string s = domain_to_json(d).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace fkise
