#pragma once

#include "loctool/kernel.hpp"

namespace loctool::cli {

using grp::FiniteGroup;
using grp::fromCycles;
using grp::permIndex;

// ---------------------------------------------------------------------------
// groups

inline FiniteGroup makeGroup(const std::string& name, const RunConfig& cfg = globalConfig()) {
    using P = std::vector<std::vector<int>>;
    auto build = [&](int deg, std::vector<P> cyc) {
        std::vector<grp::Perm> gens;
        for (auto& c : cyc) gens.push_back(fromCycles(deg, c));
        return grp::buildGroupFromPerms(gens, deg, name, cfg);
    };
    if (name == "s4") return build(4, {P{{1, 2}}, P{{1, 2, 3, 4}}});
    if (name == "a4") return build(4, {P{{1, 2, 3}}, P{{1, 2}, {3, 4}}});
    if (name == "s3") return build(3, {P{{1, 2}}, P{{1, 2, 3}}});
    if (name == "c3") return build(3, {P{{1, 2, 3}}});
    if (name == "d8") return build(4, {P{{1, 2, 3, 4}}, P{{1, 3}}});
    if (name == "v4") return build(4, {P{{1, 2}, {3, 4}}, P{{1, 3}, {2, 4}}});
    if (name == "s5") return build(5, {P{{1, 2}}, P{{1, 2, 3, 4, 5}}});
    if (name == "c2xs3") return build(5, {P{{4, 5}}, P{{1, 2}}, P{{1, 2, 3}}});
    if (name == "c3xs4") return build(7, {P{{5, 6, 7}}, P{{1, 2}}, P{{1, 2, 3, 4}}});
    if (name == "s4xc2") return build(6, {P{{5, 6}}, P{{1, 2}}, P{{1, 2, 3, 4}}});
    if (name == "s4xs3") return build(7, {P{{5, 6}}, P{{5, 6, 7}}, P{{1, 2}}, P{{1, 2, 3, 4}}});
    if (name == "gl23") {
        // GL(2,3) acting on the 8 nonzero vectors of F_3^2; vector (x,y) with
        // x,y in {0,1,2} gets index 3x+y-1
        auto vecIndex = [](int x, int y) { return 3 * x + y - 1; };
        auto matPerm = [&](int a, int b, int c, int d) {
            grp::Perm p(8);
            for (int x = 0; x < 3; ++x)
                for (int y = 0; y < 3; ++y) {
                    if (x == 0 && y == 0) continue;
                    int nx = (a * x + b * y) % 3, ny = (c * x + d * y) % 3;
                    p[vecIndex(x, y)] = vecIndex(nx, ny);
                }
            return p;
        };
        return grp::buildGroupFromPerms(
            {matPerm(1, 1, 0, 1), matPerm(0, 2, 1, 0), matPerm(2, 0, 0, 1)}, 8, name, cfg);
    }
    throw std::invalid_argument("unknown catalog group: " + name);
}

inline bool permEvenOn(const grp::Perm& p, int lo, int hi) {
    int inv = 0;
    for (int i = lo; i < hi; ++i)
        for (int j = i + 1; j < hi; ++j)
            if (p[i] > p[j]) ++inv;
    return inv % 2 == 0;
}

inline bool permFixesRange(const grp::Perm& p, int lo, int hi) {
    for (int i = lo; i < hi; ++i)
        if (p[i] != i) return false;
    return true;
}

// ---------------------------------------------------------------------------
// fusion systems

struct FusionInstance {
    fus::FusionSystem F;
    grp::SubgroupGroup emb; // empty for hand-built systems
    FiniteGroup G;
    std::string name;
};

inline FusionInstance makeFusion(const std::string& name, const RunConfig& cfg = globalConfig()) {
    FusionInstance out;
    out.name = name;
    auto fromGroup = [&](const std::string& g, int p, std::optional<Bitset> sylow = {}) {
        out.G = makeGroup(g, cfg);
        Bitset S = sylow ? *sylow : grp::sylowOneIn(out.G, Bitset::full(out.G.n), p);
        auto gf = fus::fusionFromGroup(out.G, S, p, cfg);
        out.F = std::move(gf.F);
        out.emb = std::move(gf.emb);
    };
    if (name == "fus-s4") {
        out.G = makeGroup("s4", cfg);
        Bitset d8 = grp::closureMask(
            out.G, Bitset::fromIndices(out.G.n, {permIndex(out.G, fromCycles(4, {{1, 2, 3, 4}})),
                                                 permIndex(out.G, fromCycles(4, {{1, 3}}))}));
        auto gf = fus::fusionFromGroup(out.G, d8, 2, cfg);
        out.F = std::move(gf.F);
        out.emb = std::move(gf.emb);
        return out;
    }
    if (name == "fus-a4") { fromGroup("a4", 2); return out; }
    if (name == "fus-s3") { fromGroup("s3", 3); return out; }
    if (name == "fus-d8") { fromGroup("d8", 2); return out; }
    if (name == "fus-gl23") { fromGroup("gl23", 2); return out; }
    if (name == "fus-s5") {
        out.G = makeGroup("s5", cfg);
        Bitset d8 = grp::closureMask(
            out.G, Bitset::fromIndices(out.G.n, {permIndex(out.G, fromCycles(5, {{1, 2, 3, 4}})),
                                                 permIndex(out.G, fromCycles(5, {{1, 3}}))}));
        auto gf = fus::fusionFromGroup(out.G, d8, 2, cfg);
        out.F = std::move(gf.F);
        out.emb = std::move(gf.emb);
        return out;
    }
    if (name == "fus-nonsat-v4") {
        // one fused pair of order-2 subgroups over V4; not saturated
        out.G = makeGroup("v4", cfg);
        auto S = std::make_shared<FiniteGroup>(out.G);
        fus::Mask A = 0b0011, B = 0b0101; // <a> and <b> with identity
        out.F = fus::fusionClosureWithin(2, S, 0b1111, {{A, fus::Images{0, 2}}}, cfg);
        (void)B;
        return out;
    }
    if (name == "fus-nonsat-d8") {
        // a wedge involution fused into the center of D8; not saturated
        out.G = makeGroup("d8", cfg);
        auto S = std::make_shared<FiniteGroup>(out.G);
        int z = permIndex(out.G, fromCycles(4, {{1, 3}, {2, 4}}));
        int t = permIndex(out.G, fromCycles(4, {{1, 3}}));
        fus::Mask A = fus::Mask{1} | (fus::Mask{1} << t);
        fus::Images phi{0, uint8_t(z)};
        fus::Mask full = (fus::Mask{1} << out.G.n) - 1;
        out.F = fus::fusionClosureWithin(2, S, full, {{A, phi}}, cfg);
        return out;
    }
    throw std::invalid_argument("unknown catalog fusion system: " + name);
}

// ---------------------------------------------------------------------------
// localities

struct LocalityInstance {
    ploc::Locality L;
    FiniteGroup G;
    std::string name;
};

/// Subgroups of S containing `seed`, as a Delta list.
inline std::vector<Bitset> overgroupsIn(const FiniteGroup& G, const Bitset& S, const Bitset& seed) {
    auto sub = grp::subgroupGroup(G, S);
    std::vector<Bitset> out;
    for (const auto& Q : grp::enumerateSubgroups(sub.group)) {
        Bitset Qp(G.n);
        Q.forEach([&](int i) { Qp.set(sub.toParent[i]); });
        if (seed.subsetOf(Qp)) out.push_back(Qp);
    }
    return out;
}

inline LocalityInstance makeLocality(const std::string& name,
                                     const RunConfig& cfg = globalConfig()) {
    LocalityInstance out;
    out.name = name;
    auto restrictedToCore = [&](const std::string& g, int p) {
        out.G = makeGroup(g, cfg);
        Bitset S = grp::sylowOneIn(out.G, Bitset::full(out.G.n), p);
        Bitset core = grp::pCore(out.G, p);
        out.L = ploc::buildLocalityFromGroup(out.G, S, overgroupsIn(out.G, S, core), p, name, cfg);
    };
    if (name == "loc-s4") {
        out.G = makeGroup("s4", cfg);
        Bitset d8 = grp::closureMask(
            out.G, Bitset::fromIndices(out.G.n, {permIndex(out.G, fromCycles(4, {{1, 2, 3, 4}})),
                                                 permIndex(out.G, fromCycles(4, {{1, 3}}))}));
        Bitset v4 = grp::pCore(out.G, 2);
        out.L = ploc::buildLocalityFromGroup(out.G, d8, overgroupsIn(out.G, d8, v4), 2, name, cfg);
        return out;
    }
    if (name == "loc-a4") { restrictedToCore("a4", 2); return out; }
    if (name == "loc-s3") { restrictedToCore("s3", 3); return out; }
    if (name == "loc-d8") {
        out.G = makeGroup("d8", cfg);
        Bitset all = Bitset::full(out.G.n);
        std::vector<Bitset> delta = grp::enumerateSubgroups(out.G);
        out.L = ploc::buildLocalityFromGroup(out.G, all, delta, 2, name, cfg);
        return out;
    }
    if (name == "loc-gl23") { restrictedToCore("gl23", 2); return out; }
    if (name == "loc-c3xs4") { restrictedToCore("c3xs4", 2); return out; }
    if (name == "loc-s4xc2") {
        // seed with the four-group of the S4 factor, below O_2(G)
        out.G = makeGroup("s4xc2", cfg);
        Bitset S = grp::sylowOneIn(out.G, Bitset::full(out.G.n), 2);
        Bitset v4 = grp::closureMask(
            out.G, Bitset::fromIndices(out.G.n, {permIndex(out.G, fromCycles(6, {{1, 2}, {3, 4}})),
                                                 permIndex(out.G, fromCycles(6, {{1, 3}, {2, 4}}))}));
        if (!v4.subsetOf(S)) throw InvariantViolation("four-group escaped the chosen Sylow");
        out.L = ploc::buildLocalityFromGroup(out.G, S, overgroupsIn(out.G, S, v4), 2, name, cfg);
        return out;
    }
    if (name == "loc-s4xs3") {
        // pin the Sylow containing the product instance's complement
        out.G = makeGroup("s4xs3", cfg);
        Bitset S = grp::closureMask(
            out.G, Bitset::fromIndices(out.G.n, {permIndex(out.G, fromCycles(7, {{1, 2, 3, 4}})),
                                                 permIndex(out.G, fromCycles(7, {{1, 3}})),
                                                 permIndex(out.G, fromCycles(7, {{5, 6}}))}));
        Bitset core = grp::pCore(out.G, 2);
        out.L = ploc::buildLocalityFromGroup(out.G, S, overgroupsIn(out.G, S, core), 2, name, cfg);
        return out;
    }
    if (name == "loc-s5") {
        out.G = makeGroup("s5", cfg);
        Bitset d8 = grp::closureMask(
            out.G, Bitset::fromIndices(out.G.n, {permIndex(out.G, fromCycles(5, {{1, 2, 3, 4}})),
                                                 permIndex(out.G, fromCycles(5, {{1, 3}}))}));
        Bitset v4(out.G.n);
        d8.forEach([&](int x) {
            if (permEvenOn(out.G.elems[x], 0, 5)) v4.set(x);
        });
        out.L = ploc::buildLocalityFromGroup(out.G, d8, {v4, d8}, 2, name, cfg);
        return out;
    }
    if (name == "loc-s5p") {
        out.G = makeGroup("s5", cfg);
        Bitset d8 = grp::closureMask(
            out.G, Bitset::fromIndices(out.G.n, {permIndex(out.G, fromCycles(5, {{1, 2, 3, 4}})),
                                                 permIndex(out.G, fromCycles(5, {{1, 3}}))}));
        auto sub = grp::subgroupGroup(out.G, d8);
        std::vector<Bitset> delta;
        for (const auto& Q : grp::enumerateSubgroups(sub.group)) {
            if (Q.count() == 1) continue;
            Bitset Qp(out.G.n);
            Q.forEach([&](int i) { Qp.set(sub.toParent[i]); });
            delta.push_back(Qp);
        }
        out.L = ploc::buildLocalityFromGroup(out.G, d8, delta, 2, name, cfg);
        return out;
    }
    if (name == "loc-s4nt") {
        out.G = makeGroup("s4", cfg);
        Bitset d8 = grp::closureMask(
            out.G, Bitset::fromIndices(out.G.n, {permIndex(out.G, fromCycles(4, {{1, 2, 3, 4}})),
                                                 permIndex(out.G, fromCycles(4, {{1, 3}}))}));
        auto sub = grp::subgroupGroup(out.G, d8);
        std::vector<Bitset> delta;
        for (const auto& Q : grp::enumerateSubgroups(sub.group)) {
            if (Q.count() == 1) continue;
            Bitset Qp(out.G.n);
            Q.forEach([&](int i) { Qp.set(sub.toParent[i]); });
            delta.push_back(Qp);
        }
        out.L = ploc::buildLocalityFromGroup(out.G, d8, delta, 2, name, cfg);
        return out;
    }
    throw std::invalid_argument("unknown catalog locality: " + name);
}

// ---------------------------------------------------------------------------
// kernel and product instances

struct KernelInstance {
    ploc::Locality L;
    FiniteGroup G;
    Bitset N;
    std::string name;
    std::string notes;
};

inline KernelInstance makeKernel(const std::string& name, const RunConfig& cfg = globalConfig()) {
    KernelInstance out;
    out.name = name;
    auto fill = [&](const std::string& loc, auto&& pickN, const std::string& notes) {
        auto li = makeLocality(loc, cfg);
        out.L = std::move(li.L);
        out.G = std::move(li.G);
        out.N = Bitset(out.L.pg.size);
        for (int x = 0; x < out.L.pg.size; ++x)
            if (pickN(out.G.elems[x])) out.N.set(x);
        out.notes = notes;
    };
    if (name == "k-s4") {
        fill("loc-s4", [](const grp::Perm& p) { return permEvenOn(p, 0, 4); },
             "alternating kernel of the S4 instance; linking on both sides");
        return out;
    }
    if (name == "k-s4-v4") {
        auto li = makeLocality("loc-s4", cfg);
        out.L = std::move(li.L);
        out.G = std::move(li.G);
        Bitset v4 = grp::pCore(out.G, 2);
        out.N = Bitset(out.L.pg.size);
        v4.forEach([&](int x) { out.N.set(x); });
        out.notes = "p-group kernel with nonabelian quotient S3";
        return out;
    }
    if (name == "k-a4") {
        auto li = makeLocality("loc-a4", cfg);
        out.L = std::move(li.L);
        out.G = std::move(li.G);
        Bitset v4 = grp::pCore(out.G, 2);
        out.N = Bitset(out.L.pg.size);
        v4.forEach([&](int x) { out.N.set(x); });
        out.notes = "p-group kernel with odd quotient C3";
        return out;
    }
    if (name == "k-gl23") {
        auto li = makeLocality("loc-gl23", cfg);
        out.L = std::move(li.L);
        out.G = std::move(li.G);
        // the determinant-one part: matrix read off the images of the basis
        out.N = Bitset(out.L.pg.size);
        for (int x = 0; x < out.L.pg.size; ++x) {
            const auto& p = out.G.elems[x];
            auto vec = [&](int idx) { return std::pair<int, int>{(idx + 1) / 3, (idx + 1) % 3}; };
            auto [a, c] = vec(p[2]); // image of (1,0), index 3*1+0-1 = 2
            auto [b, d] = vec(p[0]); // image of (0,1), index 3*0+1-1 = 0
            if (((a * d - b * c) % 3 + 3) % 3 == 1) out.N.set(x);
        }
        out.notes = "special linear kernel inside the semidihedral instance";
        return out;
    }
    if (name == "k-c3xs4") {
        fill("loc-c3xs4", [](const grp::Perm& p) { return permEvenOn(p, 0, 4); },
             "central C3 spoils characteristic p everywhere; nontrivial p'-core");
        return out;
    }
    if (name == "k-s4xc2") {
        fill("loc-s4xc2",
             [](const grp::Perm& p) { return permEvenOn(p, 0, 4) && permFixesRange(p, 4, 6); },
             "alternating kernel with quotient C2xC2");
        return out;
    }
    if (name == "k-s4xs3") {
        fill("loc-s4xs3",
             [](const grp::Perm& p) { return permEvenOn(p, 0, 4) && permEvenOn(p, 4, 7); },
             "larger instance; kernel A4xC3 with nontrivial p'-core");
        return out;
    }
    throw std::invalid_argument("unknown catalog kernel instance: " + name);
}

struct ProductSpec {
    KernelInstance k;
    Bitset H, Tstar;
    std::string name;
    std::string notes;
};

inline ProductSpec makeProduct(const std::string& name, const RunConfig& cfg = globalConfig()) {
    ProductSpec out;
    out.name = name;
    auto singleGen = [&](const KernelInstance& k, const grp::Perm& perm) {
        Bitset b(k.L.pg.size);
        b.set(0);
        b.set(permIndex(k.G, perm));
        return grp::closureMask(k.G, b); // the locality is the full group here
    };
    if (name == "prod-s4") {
        out.k = makeKernel("k-s4", cfg);
        out.Tstar = grp::pCore(out.k.G, 2);
        out.H = singleGen(out.k, fromCycles(4, {{1, 3}}));
        out.notes = "T* = O_2(S4); H a transposition";
        return out;
    }
    if (name == "prod-s4-hs") {
        out.k = makeKernel("k-s4", cfg);
        out.Tstar = grp::pCore(out.k.G, 2);
        out.H = out.k.L.S;
        out.notes = "H = S: the NS product";
        return out;
    }
    if (name == "prod-s4-h1") {
        out.k = makeKernel("k-s4", cfg);
        out.Tstar = grp::pCore(out.k.G, 2);
        out.H = Bitset(out.k.L.pg.size);
        out.H.set(0);
        out.notes = "H = 1: the kernel itself";
        return out;
    }
    if (name == "prod-s4xs3") {
        out.k = makeKernel("k-s4xs3", cfg);
        out.Tstar = Bitset(out.k.L.pg.size);
        grp::pCore(out.k.G, 2).forEach([&](int x) { out.Tstar.set(x); });
        Bitset gens(out.k.L.pg.size);
        gens.set(0);
        gens.set(permIndex(out.k.G, fromCycles(7, {{1, 3}})));
        gens.set(permIndex(out.k.G, fromCycles(7, {{5, 6}})));
        out.H = grp::closureMask(out.k.G, gens);
        out.notes = "larger product; H~ fails characteristic p, so not linking";
        return out;
    }
    throw std::invalid_argument("unknown catalog product instance: " + name);
}

// ---------------------------------------------------------------------------
// listing

struct CatalogEntry {
    std::string name;
    std::string kind; // group | fusion | locality | kernel-instance | product-instance
    std::string notes;
};

inline std::vector<CatalogEntry> catalogEntries() {
    return {
        {"s4", "group", "symmetric group on 4 points"},
        {"a4", "group", "alternating group on 4 points"},
        {"s3", "group", "symmetric group on 3 points"},
        {"c3", "group", "cyclic group of order 3"},
        {"d8", "group", "dihedral group of order 8"},
        {"v4", "group", "elementary abelian group of order 4"},
        {"s5", "group", "symmetric group on 5 points"},
        {"gl23", "group", "general linear group GL(2,3), order 48"},
        {"c2xs3", "group", "direct product C2 x S3"},
        {"c3xs4", "group", "direct product C3 x S4"},
        {"s4xc2", "group", "direct product S4 x C2"},
        {"s4xs3", "group", "direct product S4 x S3, order 144"},
        {"fus-s4", "fusion", "fusion of S4 on a dihedral Sylow"},
        {"fus-a4", "fusion", "fusion of A4 on V4"},
        {"fus-s3", "fusion", "fusion of S3 on C3 at p = 3"},
        {"fus-d8", "fusion", "inner fusion of D8"},
        {"fus-gl23", "fusion", "fusion of GL(2,3) on a semidihedral Sylow"},
        {"fus-s5", "fusion", "fusion of S5 on a dihedral Sylow"},
        {"fus-nonsat-v4", "fusion", "engineered non-saturated closure over V4"},
        {"fus-nonsat-d8", "fusion", "engineered non-saturated closure over D8"},
        {"loc-s4", "locality", "S4 with objects above O_2"},
        {"loc-a4", "locality", "A4 with object V4"},
        {"loc-s3", "locality", "S3 at p = 3 with object C3"},
        {"loc-d8", "locality", "D8 alone, all subgroups as objects"},
        {"loc-gl23", "locality", "GL(2,3) with objects above Q8"},
        {"loc-s5", "locality", "S5 restricted to 24 elements"},
        {"loc-s5p", "locality", "punctured S5: genuinely partial table"},
        {"loc-s4nt", "locality", "S4 with all nontrivial objects (kernel-negative)"},
        {"loc-c3xs4", "locality", "C3 x S4 with objects above O_2"},
        {"loc-s4xc2", "locality", "S4 x C2 with objects above O_2"},
        {"loc-s4xs3", "locality", "S4 x S3 with objects above O_2"},
        {"k-s4", "kernel-instance", "alternating kernel; linking; trivial p'-core"},
        {"k-s4-v4", "kernel-instance", "p-group kernel; quotient S3"},
        {"k-a4", "kernel-instance", "p-group kernel; quotient C3"},
        {"k-gl23", "kernel-instance", "special linear kernel in GL(2,3)"},
        {"k-c3xs4", "kernel-instance", "engineered: characteristic-p clauses all false"},
        {"k-s4xc2", "kernel-instance", "quotient C2 x C2"},
        {"k-s4xs3", "kernel-instance", "larger instance; nontrivial p'-core quotient"},
        {"prod-s4", "product-instance", "Tstar = O_2(S4), H a transposition"},
        {"prod-s4-hs", "product-instance", "H = S"},
        {"prod-s4-h1", "product-instance", "H = 1"},
        {"prod-s4xs3", "product-instance", "larger; linking equivalence on the negative side"},
    };
}

} // namespace loctool::cli
