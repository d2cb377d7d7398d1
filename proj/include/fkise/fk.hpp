#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fkise/lattice.hpp"
#include "fkise/rng.hpp"
#include "fkise/stats.hpp"
#include "fkise/union_find.hpp"

namespace fkise {

enum class BcKind { Free, Wired, Dobrushin, Quad };

// Boundary condition as a partition of boundary sites: every listed block is
// wired internally, all other sites are singletons.
struct BoundarySpec {
    BcKind kind = BcKind::Free;
    std::vector<std::vector<int>> blocks;

    static BoundarySpec free_bc() { return {}; }

    static BoundarySpec wired(const LatticeDomain& d) {
        BoundarySpec bc;
        bc.kind = BcKind::Wired;
        std::vector<int> block(d.boundary_cycle.begin(), d.boundary_cycle.end());
        std::sort(block.begin(), block.end());
        block.erase(std::unique(block.begin(), block.end()), block.end());
        bc.blocks.push_back(std::move(block));
        return bc;
    }

    // Wired arc from b counterclockwise to a; a == b gives the fully wired case.
    static BoundarySpec dobrushin(const LatticeDomain& d) {
        BoundarySpec bc;
        bc.kind = BcKind::Dobrushin;
        const BoundaryArc arc = arc_between(d, Mark::B, Mark::A);
        std::vector<int> block(arc.sites.begin(), arc.sites.end());
        std::sort(block.begin(), block.end());
        block.erase(std::unique(block.begin(), block.end()), block.end());
        bc.blocks.push_back(std::move(block));
        return bc;
    }

    // Two separately wired arcs (for crossing-probability quads).
    static BoundarySpec quad(std::vector<int> arc1, std::vector<int> arc2) {
        BoundarySpec bc;
        bc.kind = BcKind::Quad;
        for (auto* a : {&arc1, &arc2}) {
            std::sort(a->begin(), a->end());
            a->erase(std::unique(a->begin(), a->end()), a->end());
        }
        bc.blocks.push_back(std::move(arc1));
        bc.blocks.push_back(std::move(arc2));
        return bc;
    }
};

inline double critical_p(double q) {
    if (q < 1.0) throw std::invalid_argument("critical_p: q must be >= 1");
    const long double sq = std::sqrt(static_cast<long double>(q));
    return static_cast<double>(sq / (1.0L + sq));
}

struct ModelParams {
    double q = 2.0;
    double p = critical_p(2.0);
    std::uint64_t seed = 1;
    int warmup_sweeps = -1;  // <0: default policy
    int thin_sweeps = 10;
};

struct EdgeConfig {
    std::vector<std::uint8_t> open;   // one bit per primal edge; dual = complement
    std::uint64_t seed = 0;
    std::uint64_t sweeps_done = 0;    // RNG stream position in sweeps

    bool dual_open(std::size_t e) const { return !open[e]; }
};

// Contiguous quotient ids after wiring the bc blocks together.
inline std::vector<int> quotient_ids(const LatticeDomain& d, const BoundarySpec& bc,
                                     int* n_quotient = nullptr) {
    UnionFind uf(d.sites.size());
    for (const auto& block : bc.blocks)
        for (std::size_t i = 1; i < block.size(); ++i)
            uf.unite(static_cast<std::size_t>(block[0]), static_cast<std::size_t>(block[i]));
    std::vector<int> qid(d.sites.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < d.sites.size(); ++i) {
        const std::size_t r = uf.find(i);
        if (qid[r] < 0) qid[r] = next++;
        qid[i] = qid[r];
    }
    if (n_quotient) *n_quotient = next;
    return qid;
}

// Unnormalized measure p^o (1-p)^c q^k with wired sites identified.
inline long double weight(const LatticeDomain& d, const EdgeConfig& config,
                          const BoundarySpec& bc, const ModelParams& params) {
    if (config.open.size() != d.edges.size())
        throw std::invalid_argument("weight: config size does not match edge set");
    int nq = 0;
    const std::vector<int> qid = quotient_ids(d, bc, &nq);
    UnionFind uf(static_cast<std::size_t>(nq));
    std::size_t o = 0;
    for (std::size_t e = 0; e < d.edges.size(); ++e) {
        if (!config.open[e]) continue;
        ++o;
        uf.unite(static_cast<std::size_t>(qid[static_cast<std::size_t>(d.edges[e].first)]),
                 static_cast<std::size_t>(qid[static_cast<std::size_t>(d.edges[e].second)]));
    }
    const std::size_t c = d.edges.size() - o;
    const std::size_t k = uf.components();
    return std::pow(static_cast<long double>(params.p), static_cast<long double>(o)) *
           std::pow(1.0L - static_cast<long double>(params.p), static_cast<long double>(c)) *
           std::pow(static_cast<long double>(params.q), static_cast<long double>(k));
}

// Swendsen-Wang chain through the coupled spin representation (q = 2 only).
// Each sweep draws bonds conditionally on spins, then resamples cluster
// spins; the bond half-step is the FK sample.
class FkSampler {
public:
    FkSampler(const LatticeDomain& d, BoundarySpec bc, ModelParams params)
        : domain_(d), bc_(std::move(bc)), params_(params) {
        if (std::fabs(params_.q - 2.0) > 1e-12)
            throw std::invalid_argument("FkSampler: the cluster chain requires q = 2");
        qid_ = quotient_ids(domain_, bc_, &nq_);
        spin_.assign(static_cast<std::size_t>(nq_), 1);
        rng_ = make_stream(params_.seed, "fk_sampler");
        bonds_.assign(domain_.edges.size(), 0);
        const std::size_t n = domain_.sites.size();
        default_warmup_ = static_cast<int>(std::min<std::size_t>(10 * n, 1000));
    }

    void sweep() {
        UnionFind uf(static_cast<std::size_t>(nq_));
        for (std::size_t e = 0; e < domain_.edges.size(); ++e) {
            const int qu = qid_[static_cast<std::size_t>(domain_.edges[e].first)];
            const int qv = qid_[static_cast<std::size_t>(domain_.edges[e].second)];
            bonds_[e] = 0;
            if (spin_[static_cast<std::size_t>(qu)] == spin_[static_cast<std::size_t>(qv)] &&
                u01(rng_) < params_.p) {
                bonds_[e] = 1;
                uf.unite(static_cast<std::size_t>(qu), static_cast<std::size_t>(qv));
            }
        }
        std::vector<std::int8_t> fresh(static_cast<std::size_t>(nq_), 0);
        for (int q = 0; q < nq_; ++q) {
            if (uf.find(static_cast<std::size_t>(q)) == static_cast<std::size_t>(q))
                fresh[static_cast<std::size_t>(q)] = u01(rng_) < 0.5 ? 1 : -1;
        }
        for (int q = 0; q < nq_; ++q)
            spin_[static_cast<std::size_t>(q)] = fresh[uf.find(static_cast<std::size_t>(q))];
        ++sweeps_done_;
    }

    void warmup() {
        const int n = params_.warmup_sweeps >= 0 ? params_.warmup_sweeps : default_warmup_;
        for (int i = 0; i < n; ++i) sweep();
        warmed_ = true;
    }

    EdgeConfig sample() {
        if (!warmed_) warmup();
        for (int i = 0; i < std::max(1, params_.thin_sweeps); ++i) sweep();
        EdgeConfig c;
        c.open = bonds_;
        c.seed = params_.seed;
        c.sweeps_done = sweeps_done_;
        return c;
    }

    std::uint64_t sweeps_done() const { return sweeps_done_; }

private:
    const LatticeDomain& domain_;
    BoundarySpec bc_;
    ModelParams params_;
    std::vector<int> qid_;
    int nq_ = 0;
    std::vector<std::int8_t> spin_;
    std::vector<std::uint8_t> bonds_;
    std::mt19937_64 rng_;
    std::uint64_t sweeps_done_ = 0;
    int default_warmup_ = 0;
    bool warmed_ = false;
};

inline EdgeConfig sample(const LatticeDomain& d, const BoundarySpec& bc, const ModelParams& params) {
    FkSampler s(d, bc, params);
    return s.sample();
}

// True iff an open path (after bc identifications) joins A and B.
inline bool connected(const LatticeDomain& d, const EdgeConfig& config, const BoundarySpec& bc,
                      const std::vector<int>& site_set_a, const std::vector<int>& site_set_b) {
    if (site_set_a.empty() || site_set_b.empty()) return false;
    int nq = 0;
    const std::vector<int> qid = quotient_ids(d, bc, &nq);
    UnionFind uf(static_cast<std::size_t>(nq));
    for (std::size_t e = 0; e < d.edges.size(); ++e)
        if (config.open[e])
            uf.unite(static_cast<std::size_t>(qid[static_cast<std::size_t>(d.edges[e].first)]),
                     static_cast<std::size_t>(qid[static_cast<std::size_t>(d.edges[e].second)]));
    for (int a : site_set_a)
        for (int b : site_set_b)
            if (uf.connected(static_cast<std::size_t>(qid[static_cast<std::size_t>(a)]),
                             static_cast<std::size_t>(qid[static_cast<std::size_t>(b)])))
                return true;
    return false;
}

// Exhaustive distribution over all 2^E configurations; oracle for tiny graphs.
inline std::vector<double> enumerate_distribution(const LatticeDomain& d, const BoundarySpec& bc,
                                                  const ModelParams& params) {
    const std::size_t m = d.edges.size();
    if (m > 24) throw std::invalid_argument("enumerate_distribution: graph too large");
    const std::size_t total = std::size_t{1} << m;
    std::vector<long double> w(total);
    long double z = 0.0L;
    EdgeConfig c;
    c.open.assign(m, 0);
    for (std::size_t mask = 0; mask < total; ++mask) {
        for (std::size_t e = 0; e < m; ++e) c.open[e] = (mask >> e) & 1U;
        w[mask] = weight(d, c, bc, params);
        z += w[mask];
    }
    std::vector<double> p(total);
    for (std::size_t i = 0; i < total; ++i) p[i] = static_cast<double>(w[i] / z);
    return p;
}

inline std::size_t config_mask(const EdgeConfig& c) {
    std::size_t mask = 0;
    for (std::size_t e = 0; e < c.open.size(); ++e)
        if (c.open[e]) mask |= std::size_t{1} << e;
    return mask;
}

}  // namespace fkise
