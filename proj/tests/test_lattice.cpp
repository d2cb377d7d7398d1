#include <catch2/catch_amalgamated.hpp>

#include "fkise/lattice.hpp"

using namespace fkise;

namespace {
std::array<std::pair<double, double>, 3> rect_marks(double w, double h) {
    return {std::pair{0.0, 0.0}, {w, 0.0}, {w, h}};
}
}  // namespace

TEST_CASE("rectangle site and cycle counts") {
    const auto d = build_rectangle(2, 1, 1.0, rect_marks(2, 1));
    CHECK(d.sites.size() == 6);            // 3 x 2 grid
    CHECK(d.boundary_cycle.size() == 6);   // all sites on the cycle

    const auto d2 = build_rectangle(2, 1, 0.5, rect_marks(2, 1));
    CHECK(d2.sites.size() == 15);          // 5 x 3 grid
    CHECK(d2.boundary_cycle.size() == 12);
}

TEST_CASE("mark collision rejected") {
    // a 1x1 box at coarse mesh cannot hold three distinct marks placed on one side
    CHECK_THROWS_AS(build_rectangle(1, 1, 0.4,
                                    {std::pair{0.0, 0.0}, {0.05, 0.0}, {0.1, 0.0}}),
                    DomainError);
}

TEST_CASE("disk site counts and coarse rejection") {
    const auto d1 = build_disk(1.0, 1.0, disk_marks(1.0, -1.5707963, -1.5707963, 1.5707963));
    CHECK(d1.sites.size() == 5);  // origin plus four neighbors

    const auto d2 = build_disk(1.0, 0.5, disk_marks(1.0, -1.5707963, -1.5707963, 1.5707963));
    CHECK(d2.sites.size() == 13);

    CHECK_THROWS_AS(build_disk(0.4, 1.0, disk_marks(0.4, 0.0, 0.0, 3.14)), DomainError);
}

TEST_CASE("boundary cycle is counterclockwise and induced degrees are right") {
    const auto d = build_rectangle(3, 3, 1.0, rect_marks(3, 3));
    // shoelace over the cycle must be positive (counterclockwise)
    long long area2 = 0;
    const auto n = d.boundary_cycle.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Pt p = d.sites[static_cast<std::size_t>(d.boundary_cycle[i])];
        const Pt q = d.sites[static_cast<std::size_t>(d.boundary_cycle[(i + 1) % n])];
        area2 += static_cast<long long>(p.x) * q.y - static_cast<long long>(q.x) * p.y;
    }
    CHECK(area2 > 0);

    // interior sites have degree 4
    for (const Pt p : d.sites) {
        int deg = 0;
        for (const Pt dir : kDirs)
            if (d.has_site(p.x + dir.x, p.y + dir.y)) ++deg;
        const bool interior = p.x > 0 && p.x < 3 && p.y > 0 && p.y < 3;
        if (interior) CHECK(deg == 4);
    }
}

TEST_CASE("arcs partition the cycle") {
    const auto d = build_rectangle(2, 2, 1.0, rect_marks(2, 2));
    const auto ab = arc_between(d, Mark::A, Mark::B);
    const auto ba = arc_between(d, Mark::B, Mark::A);
    CHECK(ab.sites.size() + ba.sites.size() == d.boundary_cycle.size() + 2);
    CHECK(ab.sites.front() == d.mark_site(Mark::A));
    CHECK(ab.sites.back() == d.mark_site(Mark::B));
    CHECK(ba.sites.back() == d.mark_site(Mark::A));

    // square with a,b adjacent corners: the arc is one side
    CHECK(ab.sites.size() == 3);  // (0,0) -> (2,0) along the bottom at mesh 1
}

TEST_CASE("degenerate a == b arcs") {
    const auto d = build_rectangle(2, 2, 1.0,
                                   {std::pair{0.0, 0.0}, {0.0, 0.0}, {2.0, 2.0}});
    CHECK(d.mark_pos(Mark::A) == d.mark_pos(Mark::B));
    const auto ab = arc_between(d, Mark::A, Mark::B);
    const auto ba = arc_between(d, Mark::B, Mark::A);
    CHECK(ab.sites.size() == 1);  // empty arc
    CHECK(ba.sites.size() == d.boundary_cycle.size() + 1);  // full cycle
}

namespace {
LatticeDomain one_edge_domain() {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["mesh"] = 1.0;
    j["vertices"] = {{0, 0}, {1, 0}};
    j["boundary_cycle"] = std::vector<int>{0, 1};
    j["marks"] = {0, 1, 1};
    return domain_from_json(j);
}
}  // namespace

TEST_CASE("medial graph of small domains") {
    // single edge: one medial vertex, no medial edges
    const auto m0 = medial_of(one_edge_domain());
    CHECK(m0.vertices.size() == 1);
    CHECK(m0.edges.empty());

    const auto square = build_rectangle(1, 1, 1.0, rect_marks(1, 1));
    const auto m1 = medial_of(square);
    CHECK(m1.vertices.size() == 4);
    CHECK(m1.edges.size() == 4);  // 4-cycle
    CHECK(m1.white_faces.size() == 1);

    const auto grid = build_rectangle(2, 2, 1.0, rect_marks(2, 2));
    const auto m2 = medial_of(grid);
    CHECK(m2.vertices.size() == 12);  // one per primal edge
    // interior medial vertices have degree 4
    std::vector<int> degree(m2.vertices.size(), 0);
    for (const auto& [u, v] : m2.edges) {
        ++degree[static_cast<std::size_t>(u)];
        ++degree[static_cast<std::size_t>(v)];
    }
    for (int deg : degree) CHECK(deg <= 4);
}

TEST_CASE("medial_of is deterministic") {
    const auto a = medial_of(build_rectangle(3, 2, 0.5, rect_marks(3, 2)));
    const auto b = medial_of(build_rectangle(3, 2, 0.5, rect_marks(3, 2)));
    REQUIRE(a.vertices.size() == b.vertices.size());
    for (std::size_t i = 0; i < a.vertices.size(); ++i) CHECK(a.vertices[i] == b.vertices[i]);
    CHECK(a.edges == b.edges);
}

TEST_CASE("domain json round trip preserves the hash") {
    const auto d = build_disk(1.5, 0.5, disk_marks(1.5, -1.5, -1.5, 1.5));
    const auto j = domain_to_json(d);
    const auto d2 = domain_from_json(j);
    CHECK(domain_hash(d) == domain_hash(d2));
    CHECK(d2.sites.size() == d.sites.size());
    CHECK(d2.marks == d.marks);
}

TEST_CASE("non simply connected domains are rejected") {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["mesh"] = 1.0;
    // 3x3 ring with the center removed
    auto verts = nlohmann::json::array();
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            if (!(x == 1 && y == 1)) verts.push_back({x, y});
    j["vertices"] = verts;
    j["boundary_cycle"] = std::vector<int>{0, 1, 2, 4, 7, 6, 5, 3};
    j["marks"] = {0, 1, 2};
    CHECK_THROWS_AS(domain_from_json(j), DomainError);
}
