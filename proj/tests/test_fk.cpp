#include <catch2/catch_amalgamated.hpp>

#include "fkise/fk.hpp"

using namespace fkise;

namespace {
LatticeDomain chain_domain(int n_sites) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["mesh"] = 1.0;
    auto verts = nlohmann::json::array();
    for (int x = 0; x < n_sites; ++x) verts.push_back({x, 0});
    j["vertices"] = verts;
    std::vector<int> cycle;
    for (int x = 0; x < n_sites; ++x) cycle.push_back(x);
    j["boundary_cycle"] = cycle;
    j["marks"] = {0, 0, n_sites - 1};
    return domain_from_json(j);
}

std::array<std::pair<double, double>, 3> rect_marks(double w, double h) {
    return {std::pair{0.0, 0.0}, {w, 0.0}, {w, h}};
}
}  // namespace

TEST_CASE("critical point formula") {
    CHECK(critical_p(2.0) == Catch::Approx(0.585786437626905).epsilon(1e-12));
    CHECK(critical_p(1.0) == Catch::Approx(0.5));
    CHECK(critical_p(4.0) == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("weight on a single edge") {
    const auto d = chain_domain(2);
    ModelParams mp;
    mp.p = 0.3;
    mp.q = 2.0;
    EdgeConfig open_cfg, closed_cfg;
    open_cfg.open = {1};
    closed_cfg.open = {0};

    const auto free_bc = BoundarySpec::free_bc();
    CHECK(static_cast<double>(weight(d, open_cfg, free_bc, mp)) ==
          Catch::Approx(0.3 * 2.0));  // one cluster
    CHECK(static_cast<double>(weight(d, closed_cfg, free_bc, mp)) ==
          Catch::Approx(0.7 * 4.0));  // two clusters

    // both endpoints wired together
    const auto wired = BoundarySpec::wired(d);
    CHECK(static_cast<double>(weight(d, open_cfg, wired, mp)) == Catch::Approx(0.3 * 2.0));
    CHECK(static_cast<double>(weight(d, closed_cfg, wired, mp)) == Catch::Approx(0.7 * 2.0));
}

TEST_CASE("empty edge set weight is q^sites via enumeration of a chain") {
    // chain of 3 sites, both edges closed: 3 clusters under free bc
    const auto d = chain_domain(3);
    ModelParams mp;
    mp.p = 0.25;
    EdgeConfig c;
    c.open = {0, 0};
    CHECK(static_cast<double>(weight(d, c, BoundarySpec::free_bc(), mp)) ==
          Catch::Approx(0.75 * 0.75 * 8.0));
}

TEST_CASE("single edge sampling matches the exact marginal") {
    const auto d = chain_domain(2);
    ModelParams mp;
    mp.seed = 123;
    mp.warmup_sweeps = 50;
    mp.thin_sweeps = 1;
    FkSampler s(d, BoundarySpec::free_bc(), mp);
    const int n = 100000;
    int open_count = 0;
    for (int i = 0; i < n; ++i) open_count += s.sample().open[0];
    const double p_open = static_cast<double>(open_count) / n;
    const double expect = std::sqrt(2.0) - 1.0;  // p/(p + (1-p) q) at criticality
    const double sigma = std::sqrt(expect * (1 - expect) / n);
    CHECK(std::fabs(p_open - expect) < 3.5 * sigma);
}

TEST_CASE("four-cycle empirical law matches enumeration") {
    const auto d = build_rectangle(1, 1, 1.0, rect_marks(1, 1));
    REQUIRE(d.edges.size() == 4);
    ModelParams mp;
    mp.seed = 77;
    mp.warmup_sweeps = 100;
    mp.thin_sweeps = 2;
    const auto bc = BoundarySpec::free_bc();
    const auto probs = enumerate_distribution(d, bc, mp);
    FkSampler s(d, bc, mp);
    std::vector<std::size_t> counts(16, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[config_mask(s.sample())];
    const auto r = stats::chi2_test(counts, probs);
    CHECK(r.p_value > 0.01);
}

TEST_CASE("wired and dobrushin sampling match enumeration on the unit square") {
    const auto d = build_rectangle(1, 1, 1.0, rect_marks(1, 1));
    for (const auto kind : {BcKind::Wired, BcKind::Dobrushin}) {
        const auto bc =
            kind == BcKind::Wired ? BoundarySpec::wired(d) : BoundarySpec::dobrushin(d);
        ModelParams mp;
        mp.seed = 99 + static_cast<int>(kind);
        mp.warmup_sweeps = 100;
        mp.thin_sweeps = 2;
        const auto probs = enumerate_distribution(d, bc, mp);
        FkSampler s(d, bc, mp);
        std::vector<std::size_t> counts(16, 0);
        const int n = 60000;
        for (int i = 0; i < n; ++i) ++counts[config_mask(s.sample())];
        const auto r = stats::chi2_test(counts, probs);
        INFO("bc kind " << static_cast<int>(kind));
        CHECK(r.p_value > 0.01);
    }
}

TEST_CASE("sampling at p near 1 is dominated by the full configuration") {
    const auto d = build_rectangle(1, 1, 1.0, rect_marks(1, 1));
    ModelParams mp;
    mp.p = 0.99;
    mp.seed = 5;
    mp.warmup_sweeps = 50;
    mp.thin_sweeps = 1;
    FkSampler s(d, BoundarySpec::wired(d), mp);
    int all_open = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto c = s.sample();
        bool full = true;
        for (auto b : c.open) full = full && b;
        all_open += full;
    }
    CHECK(all_open > 1700);
}

TEST_CASE("connectivity with boundary identifications") {
    const auto d = build_rectangle(2, 2, 1.0, rect_marks(2, 2));
    EdgeConfig all_open, all_closed;
    all_open.open.assign(d.edges.size(), 1);
    all_closed.open.assign(d.edges.size(), 0);
    const std::vector<int> a{d.site_at(0, 0)};
    const std::vector<int> b{d.site_at(2, 2)};
    CHECK(connected(d, all_open, BoundarySpec::free_bc(), a, b));
    CHECK_FALSE(connected(d, all_closed, BoundarySpec::free_bc(), a, b));
    CHECK(connected(d, all_closed, BoundarySpec::wired(d), a, b));  // identified
}

TEST_CASE("determinism: same seed gives the same sequence") {
    const auto d = build_rectangle(2, 1, 0.5, rect_marks(2, 1));
    ModelParams mp;
    mp.seed = 2024;
    mp.warmup_sweeps = 20;
    mp.thin_sweeps = 3;
    FkSampler s1(d, BoundarySpec::dobrushin(d), mp);
    FkSampler s2(d, BoundarySpec::dobrushin(d), mp);
    for (int i = 0; i < 5; ++i) {
        const auto c1 = s1.sample(), c2 = s2.sample();
        CHECK(c1.open == c2.open);
    }
}

TEST_CASE("FKG smoke: wired connects at least as well as free") {
    const auto d = build_rectangle(2, 2, 0.5, rect_marks(2, 2));
    const std::vector<int> a{d.site_at(0, 0)};
    const std::vector<int> b{d.site_at(4, 4)};
    const int n = 4000;
    int free_hits = 0, wired_hits = 0;
    ModelParams mp;
    mp.warmup_sweeps = 100;
    mp.thin_sweeps = 3;
    mp.seed = 31;
    FkSampler sf(d, BoundarySpec::free_bc(), mp);
    FkSampler sw(d, BoundarySpec::wired(d), mp);
    const auto raw = BoundarySpec::free_bc();
    for (int i = 0; i < n; ++i) {
        free_hits += connected(d, sf.sample(), raw, a, b);
        wired_hits += connected(d, sw.sample(), raw, a, b);
    }
    const double pf = static_cast<double>(free_hits) / n;
    const double pw = static_cast<double>(wired_hits) / n;
    const double sigma = std::sqrt(pf * (1 - pf) / n) + std::sqrt(pw * (1 - pw) / n);
    CHECK(pw >= pf - 3.0 * sigma);
}

TEST_CASE("dual complementarity is exact by construction") {
    EdgeConfig c;
    c.open = {1, 0, 1, 1, 0};
    for (std::size_t e = 0; e < c.open.size(); ++e) CHECK(c.dual_open(e) == !c.open[e]);
}
