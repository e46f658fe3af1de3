#pragma once

#include <optional>

#include "loctool/fusion_subsystem.hpp"
#include "loctool/locality_quotient.hpp"

namespace loctool::kern {

using ploc::Locality;
using ploc::PartialGroupTable;

inline Json elemsJson(const Bitset& b) {
    Json a = Json::array();
    for (int x : b.indices()) a.push_back(x);
    return a;
}

/// N is a kernel when every object meets it in an object.
inline bool isKernel(const Locality& L, const Bitset& N) {
    if (!ploc::isPartialNormal(L, N)) throw std::invalid_argument("isKernel: N is not partial normal");
    for (const auto& P : L.Delta) {
        Bitset PN = P & N;
        if (!L.deltaSet.count(L.maskLtoS(PN))) return false;
    }
    return true;
}

inline grp::FiniteGroup groupOfSubset(const Locality& L, const Bitset& X,
                                      std::vector<int>* toL = nullptr) {
    return ploc::groupFromSubset(L, X, toL);
}

inline bool charPOfSubset(const Locality& L, const Bitset& X) {
    return grp::isCharacteristicP(ploc::groupFromSubset(L, X), L.p);
}

/// {ab : a in A, b in B, (a,b) defined}.
inline Bitset productSet(const PartialGroupTable& pg, const Bitset& A, const Bitset& B) {
    Bitset out(pg.size);
    A.forEach([&](int a) {
        B.forEach([&](int b) {
            int v = pg.at(a, b);
            if (v >= 0) out.set(v);
        });
    });
    return out;
}

/// The induced partial product on a subset (the domain restricted to pairs
/// inside it).
struct SubTable {
    PartialGroupTable pg;
    std::vector<int> toAmb;
    std::vector<int> fromAmb;
};

inline SubTable subTable(const PartialGroupTable& pg, const Bitset& X) {
    SubTable out;
    out.toAmb = X.indices();
    out.fromAmb.assign(pg.size, -1);
    for (size_t i = 0; i < out.toAmb.size(); ++i) out.fromAmb[out.toAmb[i]] = int(i);
    int k = int(out.toAmb.size());
    if (out.fromAmb[pg.unit] < 0) throw std::invalid_argument("subset lacks the unit");
    out.pg.size = k;
    out.pg.unit = out.fromAmb[pg.unit];
    out.pg.inv.resize(k);
    for (int i = 0; i < k; ++i) {
        int iv = pg.inv[out.toAmb[i]];
        if (out.fromAmb[iv] < 0) throw std::invalid_argument("subset is not inversion-closed");
        out.pg.inv[i] = out.fromAmb[iv];
    }
    out.pg.pairs.assign(size_t(k) * k, -1);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            int v = pg.at(out.toAmb[i], out.toAmb[j]);
            if (v >= 0) {
                if (out.fromAmb[v] < 0)
                    throw std::invalid_argument("subset is not closed under its defined products");
                out.pg.define(i, j, out.fromAmb[v]);
            }
        }
    return out;
}

/// The kernel (N, Gamma, T) of (L, Delta, S) as a locality of its own, with
/// the basic identities asserted: Gamma is closed under ambient fusion,
/// O_p(N) = O_p(L) ∩ N, and F_T(N) is invariant in F_S(L).
struct KernelTriple {
    Bitset N, T;               // ambient masks
    std::vector<Bitset> gamma; // ambient masks, sorted
    Locality sub;
    std::vector<int> subToAmb;
    std::vector<int> ambToSub;
};

inline KernelTriple kernelTriple(const Locality& L, const Bitset& N,
                                 const RunConfig& cfg = globalConfig()) {
    if (!isKernel(L, N)) throw std::invalid_argument("kernelTriple: N is not a kernel");
    KernelTriple kt;
    kt.N = N;
    kt.T = N & L.S;

    std::set<Bitset> gset;
    for (const auto& P : L.Delta) gset.insert(P & N);
    std::set<Bitset> gset2;
    for (const auto& P : L.Delta)
        if (P.subsetOf(kt.T)) gset2.insert(P);
    if (gset != gset2)
        throw InvariantViolation("the two descriptions of the kernel object set differ");
    kt.gamma.assign(gset.begin(), gset.end());

    auto st = subTable(L.pg, N);
    kt.subToAmb = st.toAmb;
    kt.ambToSub = st.fromAmb;
    kt.sub.pg = std::move(st.pg);
    kt.sub.p = L.p;
    kt.sub.name = L.name + "-kernel";
    kt.sub.S = Bitset(kt.sub.pg.size);
    kt.T.forEach([&](int x) { kt.sub.S.set(kt.ambToSub[x]); });
    for (const auto& g : kt.gamma) {
        Bitset gm(kt.sub.pg.size);
        g.forEach([&](int x) { gm.set(kt.ambToSub[x]); });
        kt.sub.Delta.push_back(gm);
    }
    try {
        ploc::buildLocalityCaches(kt.sub);
    } catch (const std::exception& e) {
        throw InvariantViolation(std::string("kernel locality is malformed: ") + e.what());
    }
    auto rep = ploc::validateLocality(kt.sub, cfg);
    if (!rep.allPass()) {
        for (const auto& c : rep.clauses)
            if (c.verdict == Verdict::Fail)
                throw InvariantViolation("kernel locality fails validation at clause " + c.name);
    }

    auto F = ploc::fusionOfLocality(L, cfg);
    std::set<fus::Mask> gammaS;
    for (const auto& g : kt.gamma) gammaS.insert(L.maskLtoS(g));
    for (fus::Mask gm : gammaS)
        for (const fus::Images& phi : F.at(gm))
            if (!gammaS.count(fus::mapImage(phi)))
                throw InvariantViolation("kernel object set is not closed under ambient fusion");

    Bitset opSub(kt.sub.pg.size);
    opSub = ploc::opCoreLocality(kt.sub);
    Bitset opSubAmb(L.pg.size);
    opSub.forEach([&](int x) { opSubAmb.set(kt.subToAmb[x]); });
    if (!(opSubAmb == (ploc::opCoreLocality(L) & N)))
        throw InvariantViolation("O_p(kernel) differs from O_p(L) ∩ N");

    auto E = ploc::fusionOfPartialSubgroup(L, N, cfg);
    if (!fus::subsystemFlags(F, E).invariant)
        throw InvariantViolation("kernel fusion system is not invariant in the ambient one");
    return kt;
}

/// Conversely, builds the locality determined by kernel data: S maximal,
/// N partial normal, Gamma closed in T with D = D_Gamma; then
/// Delta = {P <= S : P ∩ T in Gamma}.
inline Locality constructWithKernel(const PartialGroupTable& pg, const Bitset& S, const Bitset& N,
                                    const std::vector<Bitset>& gamma, int p,
                                    const std::string& name = "constructed",
                                    const RunConfig& cfg = globalConfig()) {
    auto fail = [](const std::string& clause) {
        throw std::invalid_argument("constructWithKernel: " + clause);
    };

    // S must be a p-subgroup, maximal among p-subgroups
    Locality L;
    L.pg = pg;
    L.p = p;
    L.S = S;
    L.name = name;
    Bitset T = N & S;
    std::set<Bitset> gset(gamma.begin(), gamma.end());
    for (const auto& g : gamma)
        if (!g.subsetOf(T)) fail("objects must be subgroups of T");
    if (gamma.empty()) fail("empty object set");

    // partial normality of N
    {
        bool sub = true;
        N.forEach([&](int x) {
            if (!N.test(pg.inv[x])) sub = false;
            N.forEach([&](int y) {
                int v = pg.at(x, y);
                if (v >= 0 && !N.test(v)) sub = false;
            });
        });
        if (!sub) fail("N is not a partial subgroup");
        for (int f = 0; f < pg.size; ++f)
            N.forEach([&](int n) {
                int y = pg.conj(n, f);
                if (y >= 0 && !N.test(y)) fail("N is not partial normal");
            });
    }
    if (ploc::maximalityCounterexample(pg, S, p) >= 0) fail("S is not a maximal p-subgroup");

    // Gamma closure: overgroups inside T and conjugates landing in T
    std::vector<int> telems = T.indices();
    {
        // subgroups of T via its group table
        Locality tmp;
        tmp.pg = pg;
        tmp.p = p;
        tmp.S = S;
        tmp.Delta = {S};
        ploc::buildLocalityCaches(tmp);
        fus::Mask tmask = tmp.maskLtoS(T);
        if (!fus::misSubgroup(*tmp.SG, tmask)) fail("T is not a subgroup");
        for (fus::Mask Q : fus::subgroupMasksOf(*tmp.SG, tmask)) {
            Bitset Qb = tmp.maskStoL(Q);
            for (const auto& g : gamma)
                if (g.subsetOf(Qb) && !gset.count(Qb)) fail("Gamma is not overgroup-closed in T");
        }
        for (const auto& g : gamma) {
            for (int f = 0; f < pg.size; ++f) {
                Bitset img(pg.size);
                bool defined = true;
                g.forEach([&](int x) {
                    int y = pg.conj(x, f);
                    if (y < 0) defined = false;
                    else img.set(y);
                });
                if (defined && img.subsetOf(T) && !gset.count(img))
                    fail("Gamma is not closed under conjugates inside T");
            }
        }

        // D = D_Gamma on binary products
        auto chainIn = [&](int f, int g2) {
            std::set<Bitset> reached;
            Bitset cur = T;
            std::vector<std::pair<int, int>> trace;
            // chase T through (f, g2)
            std::vector<int> img(pg.size, -1);
            Bitset alive(pg.size);
            T.forEach([&](int x) {
                img[x] = x;
                alive.set(x);
            });
            for (int step : {f, g2}) {
                Bitset next(pg.size);
                alive.forEach([&](int x) {
                    int y = pg.conj(img[x], step);
                    if (y >= 0 && T.test(y)) {
                        img[x] = y;
                        next.set(x);
                    }
                });
                alive = next;
            }
            return gset.count(alive) > 0;
        };
        for (int f = 0; f < pg.size; ++f)
            for (int g2 = 0; g2 < pg.size; ++g2)
                if (pg.has(f, g2) != chainIn(f, g2)) fail("D differs from D_Gamma");

        // Delta = {P <= S : P ∩ T in Gamma}
        fus::Mask sfull = tmp.sCount() == 32 ? ~fus::Mask{0} : (fus::Mask{1} << tmp.sCount()) - 1;
        for (fus::Mask P : fus::subgroupMasksOf(*tmp.SG, sfull)) {
            Bitset Pb = tmp.maskStoL(P);
            if (gset.count(Pb & T)) L.Delta.push_back(Pb);
        }
    }

    try {
        ploc::buildLocalityCaches(L);
    } catch (const std::exception& e) {
        fail(std::string("locality assembly: ") + e.what());
    }
    auto rep = ploc::validateLocality(L, cfg);
    for (const auto& c : rep.clauses)
        if (c.verdict == Verdict::Fail) fail("validation clause " + c.name);
    kernelTriple(L, N, cfg); // asserts the kernel identities
    return L;
}

// ---------------------------------------------------------------------------
// theorem reports

/// cr-completeness passes from a locality to its kernel and back; when both
/// hold, the kernel's fusion system is a normal subsystem.
inline Report theoremBReport(const Locality& L, const Bitset& N,
                             const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    Report rep;
    rep.theorem = "kernel-cr-completeness-equivalence";
    auto kt = kernelTriple(L, N, cfg);

    auto F = ploc::fusionOfLocality(L, cfg);
    auto crF = fus::crSet(F);
    bool crAmbient = true;
    for (fus::Mask m : crF)
        if (!L.inDeltaS(m)) crAmbient = false;

    auto Fk = ploc::fusionOfLocality(kt.sub, cfg);
    auto crK = fus::crSet(Fk);
    bool crKernel = true;
    for (fus::Mask m : crK)
        if (!kt.sub.inDeltaS(m)) crKernel = false;

    rep.pass("ambient-cr-complete", Json{{"holds", crAmbient}});
    rep.pass("kernel-cr-complete", Json{{"holds", crKernel}});
    rep.add("equivalence", crAmbient == crKernel ? Verdict::Pass : Verdict::Fail,
            Json{{"ambient", crAmbient}, {"kernel", crKernel}});

    if (crAmbient && crKernel) {
        auto E = ploc::fusionOfPartialSubgroup(L, N, cfg);
        auto fl = fus::subsystemFlags(F, E);
        rep.add("kernel-fusion-strongly-closed", fl.stronglyClosed ? Verdict::Pass : Verdict::Fail);
        rep.add("kernel-fusion-invariant", fl.invariant ? Verdict::Pass : Verdict::Fail);
        rep.add("kernel-fusion-weakly-normal", fl.weaklyNormal ? Verdict::Pass : Verdict::Fail);
        rep.add("kernel-fusion-normal", fl.normal ? Verdict::Pass : Verdict::Fail);
    } else {
        rep.na("kernel-fusion-strongly-closed");
        rep.na("kernel-fusion-invariant");
        rep.na("kernel-fusion-weakly-normal");
        rep.na("kernel-fusion-normal");
    }
    rep.timing_ms = sw.ms();
    return rep;
}

/// The four characteristic-p descriptions of a locality with a kernel agree:
/// (i) every ambient object normalizer, (ii) the kernel's plus N_L(T),
/// (iii) the kernel's plus C_L(T), (iv) N_L(P) for the kernel objects only.
inline Report theoremCReport(const Locality& L, const Bitset& N,
                             const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    Report rep;
    rep.theorem = "kernel-objective-characteristic-p-equivalence";
    auto kt = kernelTriple(L, N, cfg);

    bool i = true;
    Json iw;
    for (const auto& P : L.Delta)
        if (!charPOfSubset(L, ploc::normalizerP(L, P))) {
            i = false;
            iw = Json{{"object", elemsJson(P)}};
            break;
        }

    bool kernelObjective = true;
    for (const auto& g : kt.sub.Delta)
        if (!charPOfSubset(kt.sub, ploc::normalizerP(kt.sub, g))) {
            kernelObjective = false;
            break;
        }
    bool nlt = charPOfSubset(L, ploc::normalizerP(L, kt.T));
    bool clt = charPOfSubset(L, ploc::centralizerP(L, kt.T));
    bool ii = kernelObjective && nlt;
    bool iii = kernelObjective && clt;

    bool iv = true;
    Json ivw;
    for (const auto& g : kt.gamma)
        if (!charPOfSubset(L, ploc::normalizerP(L, g))) {
            iv = false;
            ivw = Json{{"object", elemsJson(g)}};
            break;
        }

    rep.pass("clause-i-ambient-objective", Json{{"holds", i}, {"witness", iw}});
    rep.pass("clause-ii-kernel-objective-and-nlt", Json{{"holds", ii}});
    rep.pass("clause-iii-kernel-objective-and-clt", Json{{"holds", iii}});
    rep.pass("clause-iv-kernel-objects-in-ambient", Json{{"holds", iv}, {"witness", ivw}});
    bool agree = (i == ii) && (ii == iii) && (iii == iv);
    rep.add("clause-agreement", agree ? Verdict::Pass : Verdict::Fail,
            Json{{"i", i}, {"ii", ii}, {"iii", iii}, {"iv", iv}});
    rep.timing_ms = sw.ms();
    return rep;
}

/// F_S(L) = <F_S(NS), N_F(T)> by exact store comparison.
inline Report frattiniGenerationReport(const Locality& L, const Bitset& N,
                                       const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    Report rep;
    rep.theorem = "kernel-frattini-generation";
    auto kt = kernelTriple(L, N, cfg);
    auto F = ploc::fusionOfLocality(L, cfg);

    Bitset NS = productSet(L.pg, N, L.S);
    if (!ploc::isPartialSubgroup(L, NS))
        throw InvariantViolation("NS is not a partial subgroup");
    auto ES = ploc::fusionOfPartialSubgroup(L, NS, cfg);
    if (ES.universe != F.universe)
        throw InvariantViolation("S ∩ NS is smaller than S");

    fus::Mask tmask = L.maskLtoS(kt.T);
    auto NFT = fus::normalizerSubsystem(F, tmask);
    if (NFT.universe != F.universe)
        throw InvariantViolation("T is not normal in S");

    std::vector<std::pair<fus::Mask, fus::Images>> gens;
    for (const auto& [dom, maps] : ES.homs)
        for (const auto& im : maps) gens.push_back({dom, im});
    for (const auto& [dom, maps] : NFT.homs)
        for (const auto& im : maps) gens.push_back({dom, im});
    auto gen = fus::fusionClosureWithin(L.p, F.S, F.universe, gens, cfg);

    bool contained = true; // generated inside F
    for (const auto& [dom, maps] : gen.homs)
        for (const auto& im : maps)
            if (!F.contains(dom, im)) contained = false;
    bool equal = gen.homs == F.homs;
    rep.add("generated-inside-ambient", contained ? Verdict::Pass : Verdict::Fail);
    rep.add("generates-ambient", equal ? Verdict::Pass : Verdict::Fail);
    rep.timing_ms = sw.ms();
    return rep;
}

/// The quotient by a kernel is a group, isomorphic to N_L(T)/N_N(T).
inline Report quotientIsoReport(const Locality& L, const Bitset& N,
                                const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    Report rep;
    rep.theorem = "kernel-quotient-group";
    auto kt = kernelTriple(L, N, cfg);
    auto q = ploc::quotientLocality(L, N); // partition checked inside
    rep.pass("maximal-cosets-partition", Json{{"blocks", q.pg.size}});

    bool allDefined = true;
    for (int i = 0; i < q.pg.size && allDefined; ++i)
        for (int j = 0; j < q.pg.size; ++j)
            if (!q.pg.has(i, j)) { allDefined = false; break; }
    rep.add("quotient-is-group", allDefined ? Verdict::Pass : Verdict::Fail);
    if (!allDefined) {
        rep.na("isomorphic-to-local-quotient");
        rep.timing_ms = sw.ms();
        return rep;
    }

    // rebase the block table at the unit and match it against N_L(T)/N_N(T)
    std::vector<int> order{q.pg.unit};
    for (int i = 0; i < q.pg.size; ++i)
        if (i != q.pg.unit) order.push_back(i);
    std::vector<int> pos(q.pg.size);
    for (int i = 0; i < q.pg.size; ++i) pos[order[i]] = i;
    std::vector<std::vector<int>> tab(q.pg.size, std::vector<int>(q.pg.size));
    for (int i = 0; i < q.pg.size; ++i)
        for (int j = 0; j < q.pg.size; ++j) tab[i][j] = pos[q.pg.at(order[i], order[j])];
    auto Q = grp::buildGroupFromTable(tab, "quotient", cfg);

    std::vector<int> toL;
    auto NL = ploc::groupFromSubset(L, ploc::normalizerP(L, kt.T), &toL);
    Bitset NN(NL.n);
    for (int i = 0; i < NL.n; ++i)
        if (N.test(toL[i])) NN.set(i);
    auto local = grp::quotientGroup(NL, NN).group;
    bool iso = local.n == Q.n && grp::groupsIsomorphic(Q, local);
    rep.add("isomorphic-to-local-quotient", iso ? Verdict::Pass : Verdict::Fail,
            Json{{"order", Q.n}});
    rep.timing_ms = sw.ms();
    return rep;
}

// ---------------------------------------------------------------------------
// the p'-core quotient

/// Theta = union of the p'-cores of the kernel-object normalizers in N.
inline Bitset thetaSubgroup(const Locality& L0, const Bitset& N0,
                            const std::vector<Bitset>& gamma0) {
    Bitset theta(L0.pg.size);
    theta.set(L0.pg.unit);
    for (const auto& P : gamma0) {
        Bitset NNP = ploc::normalizerP(L0, P) & N0;
        std::vector<int> toL;
        auto G = ploc::groupFromSubset(L0, NNP, &toL);
        Bitset core = grp::pPrimeCore(G, L0.p);
        core.forEach([&](int x) { theta.set(toL[x]); });
    }
    if (!ploc::isPartialNormal(L0, theta))
        throw InvariantViolation("Theta is not partial normal");
    if ((theta & L0.S).count() != 1)
        throw InvariantViolation("Theta meets S nontrivially");
    return theta;
}

struct ThetaQuotient {
    std::optional<Locality> quotient;
    Bitset theta;
    std::vector<int> proj;   // restricted-locality element -> quotient element
    std::vector<int> toL0;   // restricted-locality element -> original element
    Report report;
};

/// Restricts to the overgroups of Gamma0, factors out Theta, re-identifies S
/// with its image and checks that the quotient kernel is a linking locality
/// with unchanged fusion systems. Gamma0 defaults to Gamma ∩ E^c.
inline ThetaQuotient linkingKernelQuotient(const Locality& L, const Bitset& N,
                                           std::optional<std::vector<Bitset>> gamma0opt = {},
                                           const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    ThetaQuotient out;
    out.theta = Bitset(L.pg.size);
    Report& rep = out.report;
    rep.theorem = "kernel-pprime-quotient";

    auto kt = kernelTriple(L, N, cfg);
    auto F = ploc::fusionOfLocality(L, cfg);
    auto E = ploc::fusionOfPartialSubgroup(L, N, cfg);
    fus::Mask tmask = L.maskLtoS(kt.T);

    // hypothesis: the kernel is cr-complete
    auto Fk = ploc::fusionOfLocality(kt.sub, cfg);
    bool crKernel = true;
    for (fus::Mask m : fus::crSet(Fk))
        if (!kt.sub.inDeltaS(m)) crKernel = false;
    if (!crKernel) {
        rep.na("kernel-cr-complete", Json{{"holds", false}});
        rep.timing_ms = sw.ms();
        return out;
    }
    rep.pass("kernel-cr-complete");

    // Gamma0: E^cr ⊆ Gamma0 ⊆ Gamma ∩ E^c, E-closed, Aut_F(T)-invariant
    std::set<Bitset> gammaSet(kt.gamma.begin(), kt.gamma.end());
    std::vector<Bitset> gamma0;
    if (gamma0opt) {
        gamma0 = *gamma0opt;
    } else {
        auto ec = fus::centricSet(E);
        for (const auto& g : kt.gamma)
            if (ec.count(L.maskLtoS(g))) gamma0.push_back(g);
    }
    {
        std::set<fus::Mask> g0s;
        for (const auto& g : gamma0) g0s.insert(L.maskLtoS(g));
        auto ecr = fus::crSet(E);
        auto ec = fus::centricSet(E);
        bool ok = true;
        std::string why;
        for (fus::Mask m : ecr)
            if (!g0s.count(m)) { ok = false; why = "E-cr not inside Gamma0"; }
        for (const auto& g : gamma0)
            if (!gammaSet.count(g)) { ok = false; why = "Gamma0 outside Gamma"; }
        for (fus::Mask m : g0s)
            if (!ec.count(m)) { ok = false; why = "Gamma0 outside the centric proxy"; }
        // E-closed: conjugacy inside E and overgroups in T
        for (fus::Mask m : g0s) {
            for (const fus::Images& phi : E.at(m))
                if (!g0s.count(fus::mapImage(phi))) { ok = false; why = "Gamma0 not E-conjugacy-closed"; }
            for (fus::Mask Q : E.subs)
                if ((m & Q) == m && gammaSet.count(L.maskStoL(Q)) && !g0s.count(Q)) {
                    // overgroup closure demanded within the kernel objects
                    ok = false;
                    why = "Gamma0 not overgroup-closed in T";
                }
        }
        for (const fus::Images& alpha : fus::autF(F, tmask)) {
            for (fus::Mask m : g0s) {
                fus::Mask img = 0;
                for (int x : fus::melems(m)) img |= fus::Mask{1} << alpha[fus::mpos(tmask, x)];
                if (!g0s.count(img)) { ok = false; why = "Gamma0 not Aut_F(T)-invariant"; }
            }
        }
        if (!ok) {
            rep.na("gamma0-hypotheses", Json{{"failure", why}});
            rep.timing_ms = sw.ms();
            return out;
        }
        rep.pass("gamma0-hypotheses");
    }

    // Delta0 = overgroups of Gamma0 members in S
    std::vector<Bitset> delta0;
    for (const auto& P : L.Delta)
        for (const auto& g : gamma0)
            if (g.subsetOf(P)) {
                delta0.push_back(P);
                break;
            }
    auto L0 = ploc::restrictLocality(L, delta0, cfg, &out.toL0);
    std::vector<int> fromL(L.pg.size, -1);
    for (size_t i = 0; i < out.toL0.size(); ++i) fromL[out.toL0[i]] = int(i);
    Bitset N0(L0.pg.size);
    N.forEach([&](int x) {
        if (fromL[x] >= 0) N0.set(fromL[x]);
    });
    std::vector<Bitset> gamma0r;
    for (const auto& g : gamma0) {
        Bitset gr(L0.pg.size);
        g.forEach([&](int x) { gr.set(fromL[x]); });
        gamma0r.push_back(gr);
    }

    Bitset theta0 = thetaSubgroup(L0, N0, gamma0r);
    out.theta = Bitset(L.pg.size);
    theta0.forEach([&](int x) { out.theta.set(out.toL0[x]); });
    rep.pass("theta-partial-normal", Json{{"size", theta0.count()}});
    rep.pass("theta-meets-s-trivially", Json{{"holds", (theta0 & L0.S).count() == 1}});

    // quotient and re-identification of S
    auto q = ploc::quotientLocality(L0, theta0);
    out.proj = q.proj;
    Locality Lq;
    Lq.pg = q.pg;
    Lq.p = L.p;
    Lq.name = L.name + "-mod-theta";
    Lq.S = Bitset(q.pg.size);
    L0.S.forEach([&](int x) { Lq.S.set(q.proj[x]); });
    if (Lq.S.count() != L0.S.count()) throw InvariantViolation("S does not embed in the quotient");
    for (const auto& P : L0.Delta) {
        Bitset Pq(q.pg.size);
        P.forEach([&](int x) { Pq.set(q.proj[x]); });
        Lq.Delta.push_back(Pq);
    }
    ploc::buildLocalityCaches(Lq);
    {
        auto v = ploc::validateLocality(Lq, cfg);
        rep.add("quotient-locality-valid", v.allPass() ? Verdict::Pass : Verdict::Fail);
    }

    Bitset Nq(q.pg.size);
    N0.forEach([&](int x) { Nq.set(q.proj[x]); });
    auto ktq = kernelTriple(Lq, Nq, cfg);
    {
        auto Fq = ploc::fusionOfLocality(ktq.sub, cfg);
        bool crq = true;
        for (fus::Mask m : fus::crSet(Fq))
            if (!ktq.sub.inDeltaS(m)) crq = false;
        bool obj = true;
        for (const auto& g : ktq.sub.Delta)
            if (!charPOfSubset(ktq.sub, ploc::normalizerP(ktq.sub, g))) obj = false;
        rep.add("quotient-kernel-linking", (crq && obj) ? Verdict::Pass : Verdict::Fail,
                Json{{"cr-complete", crq}, {"objective-char-p", obj}});
    }

    // fusion systems unchanged: F_S(L0) = F_S(L) and, along s -> block(s),
    // F_S(quotient) = F_S(L0)
    {
        auto F0 = ploc::fusionOfLocality(L0, cfg);
        bool sameTable = L0.SG->mult == L.SG->mult;
        bool unchanged = sameTable && F0.homs == F.homs;

        std::vector<int> idxMap(L0.sCount());
        for (int i = 0; i < L0.sCount(); ++i) idxMap[i] = Lq.LtoS[q.proj[L0.StoL[i]]];
        auto Ftrans = fus::transportFusion(F0, Lq.SG, idxMap);
        auto Fq = ploc::fusionOfLocality(Lq, cfg);
        bool quotientSame = Ftrans.homs == Fq.homs;
        rep.add("fusion-unchanged", (unchanged && quotientSame) ? Verdict::Pass : Verdict::Fail,
                Json{{"restriction", unchanged}, {"quotient", quotientSame}});

        auto E0 = ploc::fusionOfPartialSubgroup(L0, N0, cfg);
        bool kernelFusionSame = E0.homs == E.homs;
        std::vector<int> idxMapT = idxMap;
        auto Etrans = fus::transportFusion(E0, Lq.SG, idxMapT);
        auto Eq = ploc::fusionOfPartialSubgroup(Lq, Nq, cfg);
        rep.add("kernel-fusion-unchanged",
                (kernelFusionSame && Etrans.homs == Eq.homs) ? Verdict::Pass : Verdict::Fail);
    }

    out.quotient = std::move(Lq);
    rep.timing_ms = sw.ms();
    return out;
}

// ---------------------------------------------------------------------------
// products NH

struct ProductInstance {
    Bitset N, H, Tstar;          // ambient masks
    std::vector<Bitset> gammaN;  // ambient masks
    Bitset NH, S0, Htilde;       // computed, ambient masks
    std::optional<Locality> product; // (NH, Delta0, S0)
    std::vector<int> prodToAmb;
    Report report;
};

/// Builds NH = HN, the group H~ = N_N(T*)H, S0 = T(S∩H), and the product
/// locality (NH, Delta0, S0) with kernel (N, GammaN, T); asserts the product
/// clauses including the linking equivalence. Precondition failures surface
/// as named not-applicable clauses.
inline ProductInstance productNH(const Locality& L, const Bitset& N, const Bitset& H,
                                 const Bitset& Tstar,
                                 std::optional<std::vector<Bitset>> gammaNopt = {},
                                 const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    ProductInstance pi;
    pi.N = N;
    pi.H = H;
    pi.Tstar = Tstar;
    Report& rep = pi.report;
    rep.theorem = "product-with-kernel";

    auto kt = kernelTriple(L, N, cfg); // throws if N is not a kernel
    pi.gammaN = gammaNopt ? *gammaNopt : kt.gamma;

    // T* is an object satisfying the object law P in Delta <=> P∩T* in Delta
    if (!L.deltaSet.count(L.maskLtoS(Tstar))) {
        rep.na("tstar-is-object", Json{{"holds", false}});
        rep.timing_ms = sw.ms();
        return pi;
    }
    rep.pass("tstar-is-object");
    {
        fus::Mask ts = L.maskLtoS(Tstar);
        fus::Mask sfull = L.sCount() == 32 ? ~fus::Mask{0} : (fus::Mask{1} << L.sCount()) - 1;
        for (fus::Mask P : fus::subgroupMasksOf(*L.SG, sfull)) {
            if (L.inDeltaS(P) != L.inDeltaS(P & ts)) {
                rep.na("tstar-object-law", Json{{"subgroup", fus::melems(P)}});
                rep.timing_ms = sw.ms();
                return pi;
            }
        }
        rep.pass("tstar-object-law");
    }

    Bitset NLts = ploc::normalizerP(L, Tstar);
    if (!H.subsetOf(NLts)) {
        rep.na("h-normalizes-tstar", Json{{"holds", false}});
        rep.timing_ms = sw.ms();
        return pi;
    }
    rep.pass("h-normalizes-tstar");
    auto Hgroup = ploc::groupFromSubset(L, H); // H must be a subgroup

    // S ∩ H Sylow in H, S0 = T(S∩H)
    Bitset SH = L.S & H;
    if (SH.count() != grp::pPart(Hgroup.n, L.p)) {
        rep.na("s-cap-h-sylow-in-h", Json{{"holds", false}});
        rep.timing_ms = sw.ms();
        return pi;
    }
    rep.pass("s-cap-h-sylow-in-h");
    pi.S0 = productSet(L.pg, kt.T, SH);
    if (!pi.S0.subsetOf(L.S) || !ploc::isPartialSubgroup(L, pi.S0))
        throw InvariantViolation("T(S∩H) is not a subgroup of S");

    // part (a): NH = HN is a partial subgroup
    pi.NH = productSet(L.pg, N, H);
    {
        Bitset HN = productSet(L.pg, H, N);
        bool sym = pi.NH == HN;
        bool closed = ploc::isPartialSubgroup(L, pi.NH);
        rep.add("product-symmetric", sym ? Verdict::Pass : Verdict::Fail);
        rep.add("product-partial-subgroup", closed ? Verdict::Pass : Verdict::Fail);
        if (!sym || !closed) {
            rep.timing_ms = sw.ms();
            return pi;
        }
    }

    // part (b): H~ = N_N(T*)H equals N_{NH}(T*)
    Bitset NNts = NLts & N;
    pi.Htilde = productSet(L.pg, NNts, H);
    {
        Bitset expect = NLts & pi.NH;
        rep.add("htilde-is-product-normalizer", pi.Htilde == expect ? Verdict::Pass : Verdict::Fail,
                Json{{"size", pi.Htilde.count()}});
        rep.skip("htilde-t0-identities", Json{{"note", "out-of-scope"}});
    }

    // part (c): the product locality via the construction lemma
    SubTable st = subTable(L.pg, pi.NH);
    Bitset S0sub(st.pg.size), Nsub(st.pg.size);
    pi.S0.forEach([&](int x) { S0sub.set(st.fromAmb[x]); });
    N.forEach([&](int x) {
        if (st.fromAmb[x] >= 0) Nsub.set(st.fromAmb[x]);
    });
    std::vector<Bitset> gammaSub;
    for (const auto& g : pi.gammaN) {
        Bitset gs(st.pg.size);
        bool all = true;
        g.forEach([&](int x) {
            if (st.fromAmb[x] < 0) all = false;
            else gs.set(st.fromAmb[x]);
        });
        if (!all) throw InvariantViolation("GammaN member escapes NH");
        gammaSub.push_back(gs);
    }
    Locality prod;
    try {
        prod = constructWithKernel(st.pg, S0sub, Nsub, gammaSub, L.p, L.name + "-product", cfg);
    } catch (const std::invalid_argument& e) {
        rep.na("product-construction", Json{{"failure", e.what()}});
        rep.timing_ms = sw.ms();
        return pi;
    }
    rep.pass("product-construction");
    pi.prodToAmb = st.toAmb;

    auto F0 = ploc::fusionOfLocality(prod, cfg);
    {
        bool cr = true;
        for (fus::Mask m : fus::crSet(F0))
            if (!prod.inDeltaS(m)) cr = false;
        rep.add("product-cr-complete", cr ? Verdict::Pass : Verdict::Fail);
    }

    // Lemma: S0 = T(S∩H) = S ∩ NH and S0 is Sylow in H~
    {
        bool eq = pi.S0 == (L.S & pi.NH);
        auto Ht = ploc::groupFromSubset(L, pi.Htilde);
        bool syl = pi.S0.count() == grp::pPart(Ht.n, L.p) && pi.S0.subsetOf(pi.Htilde);
        rep.add("s0-identity", eq ? Verdict::Pass : Verdict::Fail,
                Json{{"s0", elemsJson(pi.S0)}});
        rep.add("s0-sylow-in-htilde", syl ? Verdict::Pass : Verdict::Fail);
    }

    // part (e): F0 saturated with the kernel fusion normal in it
    {
        bool sat = fus::isSaturated(F0);
        rep.add("product-fusion-saturated", sat ? Verdict::Pass : Verdict::Fail);
        auto E0 = ploc::fusionOfPartialSubgroup(prod, Nsub, cfg);
        auto fl = fus::subsystemFlags(F0, E0);
        rep.add("kernel-fusion-normal-in-product", fl.normal ? Verdict::Pass : Verdict::Fail);
        rep.skip("layer-product-generation", Json{{"note", "out-of-scope"}});
    }

    // part (d): H~ has characteristic p iff the product locality is linking
    {
        bool htChar = charPOfSubset(L, pi.Htilde);
        bool obj = true;
        for (const auto& P : prod.Delta)
            if (!charPOfSubset(prod, ploc::normalizerP(prod, P))) obj = false;
        bool cr = true;
        for (fus::Mask m : fus::crSet(F0))
            if (!prod.inDeltaS(m)) cr = false;
        bool linking = obj && cr;
        rep.add("linking-equivalence", htChar == linking ? Verdict::Pass : Verdict::Fail,
                Json{{"htilde-char-p", htChar}, {"product-linking", linking}});
        rep.skip("regular-equivalence", Json{{"note", "out-of-scope"}});
    }

    pi.product = std::move(prod);
    rep.timing_ms = sw.ms();
    return pi;
}

/// Consolidated product verdict: the constructed clauses plus the Frattini
/// generation of the product fusion system from NS0 and N_{F0}(T).
inline Report productReport(const ProductInstance& pi, const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    Report rep;
    rep.theorem = "product-with-kernel-consolidated";
    for (const auto& c : pi.report.clauses) rep.clauses.push_back(c);
    rep.consistent = pi.report.consistent;
    if (!pi.product) {
        rep.na("frattini-generation", Json{{"note", "product not constructed"}});
        rep.timing_ms = sw.ms();
        return rep;
    }
    const Locality& prod = *pi.product;
    Bitset Nsub(prod.pg.size);
    for (size_t i = 0; i < pi.prodToAmb.size(); ++i)
        if (pi.N.test(pi.prodToAmb[i])) Nsub.set(int(i));
    auto fr = frattiniGenerationReport(prod, Nsub, cfg);
    bool ok = fr.allPass();
    rep.add("frattini-generation", ok ? Verdict::Pass : Verdict::Fail);
    rep.timing_ms = sw.ms();
    return rep;
}

} // namespace loctool::kern
