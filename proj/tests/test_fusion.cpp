#include <catch2/catch_amalgamated.hpp>

#include "loctool/fusion_subsystem.hpp"

using namespace loctool;
using namespace loctool::grp;
using namespace loctool::fus;

namespace {

FiniteGroup makeS4() {
    return buildGroupFromPerms({fromCycles(4, {{1, 2}}), fromCycles(4, {{1, 2, 3, 4}})}, 4, "S4");
}
FiniteGroup makeS3() {
    return buildGroupFromPerms({fromCycles(3, {{1, 2}}), fromCycles(3, {{1, 2, 3}})}, 3, "S3");
}
FiniteGroup makeA4() {
    return buildGroupFromPerms({fromCycles(4, {{1, 2, 3}}), fromCycles(4, {{1, 2}, {3, 4}})}, 4, "A4");
}

Mask fullMask(const FiniteGroup& S) { return S.n == 32 ? ~Mask{0} : (Mask{1} << S.n) - 1; }

// F_{D8}(S4) plus the embedding data, used throughout.
struct S4Fusion {
    FiniteGroup G;
    GroupFusion gf;
    Mask v4n, v4w, c4, z, a12_34, t13;
};

S4Fusion makeS4Fusion() {
    S4Fusion out;
    out.G = makeS4();
    Bitset d8 = closureMask(out.G, Bitset::fromIndices(out.G.n, {permIndex(out.G, fromCycles(4, {{1, 2, 3, 4}})),
                                                                 permIndex(out.G, fromCycles(4, {{1, 3}}))}));
    out.gf = fusionFromGroup(out.G, d8, 2);
    const auto& emb = out.gf.emb;
    auto elemMask = [&](std::vector<std::vector<int>> cycles) {
        int gi = permIndex(out.G, fromCycles(4, cycles));
        REQUIRE(emb.fromParent[gi] >= 0);
        return Mask{1} << emb.fromParent[gi];
    };
    Mask e = 1;
    out.z = mclose(*out.gf.F.S, e | elemMask({{1, 3}, {2, 4}}));
    out.a12_34 = mclose(*out.gf.F.S, e | elemMask({{1, 2}, {3, 4}}));
    out.t13 = mclose(*out.gf.F.S, e | elemMask({{1, 3}}));
    out.v4n = mclose(*out.gf.F.S, elemMask({{1, 2}, {3, 4}}) | elemMask({{1, 3}, {2, 4}}));
    out.v4w = mclose(*out.gf.F.S, elemMask({{1, 3}}) | elemMask({{2, 4}}));
    out.c4 = mclose(*out.gf.F.S, elemMask({{1, 2, 3, 4}}));
    return out;
}

// the asymmetric non-saturated closure over V4: one generator between two
// distinct order-2 subgroups
FusionSystem makeAsymmetricV4() {
    auto V4 = buildGroupFromPerms({fromCycles(4, {{1, 2}, {3, 4}}), fromCycles(4, {{1, 3}, {2, 4}})},
                                  4, "V4");
    auto S = std::make_shared<FiniteGroup>(V4);
    Mask A = Mask{1} | (Mask{1} << 1); // <a>
    Mask B = Mask{1} | (Mask{1} << 2); // <b>
    REQUIRE(misSubgroup(*S, A));
    REQUIRE(misSubgroup(*S, B));
    Images phi{0, 2}; // a -> b
    return fusionClosureWithin(2, S, fullMask(*S), {{A, phi}});
}

// the order-3 automorphism of V4n realized by a 3-cycle, in S-coordinates
Images order3OnV4n(const S4Fusion& f) {
    int rot = permIndex(f.G, fromCycles(4, {{1, 2, 3}}));
    Images im;
    for (int x : melems(f.v4n))
        im.push_back(uint8_t(f.gf.emb.fromParent[f.G.conj(f.gf.emb.toParent[x], rot)]));
    return im;
}

} // namespace

TEST_CASE("group fusion stores conjugation maps exactly") {
    auto f = makeS4Fusion();
    const auto& F = f.gf.F;

    // oracle: distinct conjugation actions on V4n from raw S4 arithmetic
    Bitset v4parent(f.G.n);
    for (int x : melems(f.v4n)) v4parent.set(f.gf.emb.toParent[x]);
    std::set<std::vector<int>> autMaps;
    for (int g = 0; g < f.G.n; ++g) {
        if (conjugateMask(f.G, v4parent, g) != v4parent) continue;
        std::vector<int> images;
        v4parent.forEach([&](int x) { images.push_back(f.G.conj(x, g)); });
        autMaps.insert(images);
    }
    REQUIRE(autMaps.size() == 6);
    REQUIRE(autF(F, f.v4n).size() == 6);

    // S abelian realizes only inclusion-induced maps
    auto A4 = makeA4();
    Bitset v4inA4 = pCore(A4, 2);
    auto selfFusion = fusionFromGroup(subgroupGroup(A4, v4inA4).group, Bitset::full(4), 2);
    for (const auto& [dom, maps] : selfFusion.F.homs) {
        REQUIRE(maps.size() == 1);
        Images ident;
        for (int x : melems(dom)) ident.push_back(uint8_t(x));
        REQUIRE(*maps.begin() == ident);
    }

    // S3 at p = 3: the full automizer of C3 has order 2
    auto S3 = makeS3();
    auto f3 = fusionFromGroup(S3, sylowOneIn(S3, Bitset::full(S3.n), 3), 3);
    REQUIRE(autF(f3.F, fullMask(*f3.F.S)).size() == 2);

    REQUIRE_THROWS_AS(fusionFromGroup(makeS4(), Bitset::full(24), 2), std::invalid_argument);
}

TEST_CASE("homSet accessor") {
    auto f = makeS4Fusion();
    REQUIRE(homSet(f.gf.F, 1, 1).size() == 1); // only the trivial morphism
    REQUIRE(homSet(f.gf.F, f.v4n, f.v4n).size() == 6);
    REQUIRE(homSet(f.gf.F, f.z, f.v4n).size() == 3); // the center maps onto each involution of V4n
    REQUIRE_THROWS_AS(homSet(f.gf.F, 0b110, fullMask(*f.gf.F.S)), std::invalid_argument);
}

TEST_CASE("fusion closure reproduces group fusion") {
    // empty generators give inner fusion
    auto D8 = buildGroupFromPerms({fromCycles(4, {{1, 2, 3, 4}}), fromCycles(4, {{1, 3}})}, 4, "D8");
    auto inner = fusionFromGroup(D8, Bitset::full(D8.n), 2);
    auto closed = fusionClosureWithin(2, inner.F.S, inner.F.universe, {});
    REQUIRE(closed.homs == inner.F.homs);

    // C3 with inversion equals the S3 fusion
    auto S3 = makeS3();
    auto f3 = fusionFromGroup(S3, sylowOneIn(S3, Bitset::full(S3.n), 3), 3);
    Mask c3 = fullMask(*f3.F.S);
    Images inv;
    for (int x : melems(c3)) inv.push_back(uint8_t(f3.F.S->inv[x]));
    auto gen = fusionClosureWithin(3, f3.F.S, c3, {{c3, inv}});
    REQUIRE(gen.homs == f3.F.homs);

    // V4 with an order-3 automorphism equals the A4 fusion
    auto A4 = makeA4();
    auto fa = fusionFromGroup(A4, pCore(A4, 2), 2);
    Mask v4 = fullMask(*fa.F.S);
    int rot = permIndex(A4, fromCycles(4, {{1, 2, 3}}));
    Images order3;
    for (int x : melems(v4))
        order3.push_back(uint8_t(fa.emb.fromParent[A4.conj(fa.emb.toParent[x], rot)]));
    auto genA = fusionClosureWithin(2, fa.F.S, v4, {{v4, order3}});
    REQUIRE(genA.homs == fa.F.homs);

    // non-injective generator rejected
    REQUIRE_THROWS_AS(fusionClosureWithin(2, fa.F.S, v4, {{v4, Images{0, 0, 0, 0}}}),
                      std::invalid_argument);
}

TEST_CASE("conjugacy classes and flags of the S4 fusion") {
    auto f = makeS4Fusion();
    auto classes = classify(f.gf.F);
    REQUIRE(classes.size() == 7);

    Mask S = fullMask(*f.gf.F.S);
    for (const auto& rec : classes) {
        if (rec.members == std::vector<Mask>{S}) {
            REQUIRE(rec.flags.at(S).fullyNormalized);
            REQUIRE(rec.flags.at(S).fullyCentralized);
        }
        if (rec.members.size() == 3) { // the double-transposition class
            REQUIRE(rec.rep == f.z);   // the central one has the big normalizer
            REQUIRE(rec.flags.at(f.z).fullyNormalized);
            REQUIRE_FALSE(rec.flags.at(f.a12_34).fullyNormalized);
        }
    }

    // every class of a realized fusion system respects saturation in both modes
    for (const auto& rec : classes) {
        REQUIRE(respectsSaturation(f.gf.F, rec, SaturationMode::Direct));
        REQUIRE(respectsSaturation(f.gf.F, rec, SaturationMode::Axioms));
    }
    REQUIRE(isSaturated(f.gf.F));
}

TEST_CASE("the asymmetric closure is not saturated and the modes agree") {
    auto F = makeAsymmetricV4();
    auto classes = classify(F);
    bool sawFailure = false;
    for (const auto& rec : classes) {
        bool d = respectsSaturation(F, rec, SaturationMode::Direct);
        bool a = respectsSaturation(F, rec, SaturationMode::Axioms);
        REQUIRE(d == a);
        if (!d) sawFailure = true;
    }
    REQUIRE(sawFailure);
    REQUIRE_FALSE(isSaturated(F));
}

TEST_CASE("surgery property on saturated catalog systems") {
    auto f = makeS4Fusion();
    const auto& F = f.gf.F;
    const auto& S = *F.S;
    for (const auto& rec : classify(F)) {
        Mask P = rec.rep;
        Mask NP = mnormalizer(S, P, F.universe);
        for (Mask Q : rec.members) {
            Mask NQ = mnormalizer(S, Q, F.universe);
            bool found = false;
            for (const Images& alpha : homSet(F, NQ, NP)) {
                Mask qimg = 0;
                for (int x : melems(Q)) qimg |= Mask{1} << alpha[mpos(NQ, x)];
                if (qimg == P) { found = true; break; }
            }
            REQUIRE(found);
        }
    }
}

TEST_CASE("fully centralized members are centric exactly when self-centralizing") {
    auto f = makeS4Fusion();
    const auto& F = f.gf.F;
    auto centr = centricSet(F);
    for (const auto& rec : classify(F))
        for (Mask P : rec.members) {
            if (!rec.flags.at(P).fullyCentralized) continue;
            bool self = (mcentralizer(*F.S, P, F.universe) & P) == mcentralizer(*F.S, P, F.universe);
            REQUIRE(self == (centr.count(P) > 0));
        }
}

TEST_CASE("centric radical families of the catalog systems") {
    auto f = makeS4Fusion();
    const auto& F = f.gf.F;
    Mask S = fullMask(*F.S);

    auto cr = crSet(F);
    REQUIRE(cr == std::set<Mask>{f.v4n, S});
    REQUIRE(criticalSet(F) == cr);
    REQUIRE(classicalCrSet(F) == cr);
    auto rep = crAgreesWithClassical(F);
    REQUIRE(rep.consistent);

    // the wedge V4 and C4 are centric but not radical, the center is not centric
    auto centr = centricSet(F);
    REQUIRE(centr.count(f.v4w) == 1);
    REQUIRE(centr.count(f.c4) == 1);
    REQUIRE(centr.count(f.z) == 0);
    REQUIRE(radicalSet(F).count(f.v4w) == 0);

    // A4 over V4: everything collapses to {V4}
    auto A4 = makeA4();
    auto fa = fusionFromGroup(A4, pCore(A4, 2), 2);
    Mask v4 = fullMask(*fa.F.S);
    REQUIRE(crSet(fa.F) == std::set<Mask>{v4});
    REQUIRE(crAgreesWithClassical(fa.F).consistent);

    // inner fusion of a nonabelian p-group: only S itself
    auto D8 = buildGroupFromPerms({fromCycles(4, {{1, 2, 3, 4}}), fromCycles(4, {{1, 3}})}, 4, "D8");
    auto fi = fusionFromGroup(D8, Bitset::full(D8.n), 2);
    REQUIRE(crSet(fi.F) == std::set<Mask>{fullMask(*fi.F.S)});

    // S is always centric radical
    auto Fbad = makeAsymmetricV4();
    REQUIRE(crSet(Fbad).count(fullMask(*Fbad.S)) == 1);

    // implication chain on the non-saturated system
    auto cls = classicalCrSet(Fbad);
    auto crit = criticalSet(Fbad);
    auto crb = crSet(Fbad);
    for (Mask m : cls) REQUIRE(crit.count(m) == 1);
    for (Mask m : crit) REQUIRE(crb.count(m) == 1);
    REQUIRE_THROWS_AS(crAgreesWithClassical(Fbad), std::invalid_argument);
}

TEST_CASE("normalizer subsystems and the normal core") {
    auto f = makeS4Fusion();
    const auto& F = f.gf.F;
    Mask S = fullMask(*F.S);

    REQUIRE(opFusion(F) == f.v4n);

    auto NS = normalizerSubsystem(F, S);
    REQUIRE(NS.universe == S);
    REQUIRE(opFusion(NS) == S);

    auto D8 = buildGroupFromPerms({fromCycles(4, {{1, 2, 3, 4}}), fromCycles(4, {{1, 3}})}, 4, "D8");
    auto fi = fusionFromGroup(D8, Bitset::full(D8.n), 2);
    REQUIRE(opFusion(fi.F) == fullMask(*fi.F.S));

    // N_F(V4n) = F since V4n is normal in F
    auto NV = normalizerSubsystem(F, f.v4n);
    REQUIRE(NV.universe == S);
    REQUIRE(NV.homs == F.homs);

    // N_F(V4w) is the inner fusion of D8, computed over the same table
    auto NW = normalizerSubsystem(F, f.v4w);
    REQUIRE(NW.universe == S);
    REQUIRE(NW.homs == fusionClosureWithin(2, F.S, S, {}).homs);
}

TEST_CASE("constrained and subcentric computations") {
    auto f = makeS4Fusion();
    const auto& F = f.gf.F;
    REQUIRE(isConstrained(F)); // O_2 = V4n is centric

    auto D8 = buildGroupFromPerms({fromCycles(4, {{1, 2, 3, 4}}), fromCycles(4, {{1, 3}})}, 4, "D8");
    auto fi = fusionFromGroup(D8, Bitset::full(D8.n), 2);
    REQUIRE(isConstrained(fi.F));

    auto sub = subcentricSet(F);
    for (Mask m : crSet(F)) REQUIRE(sub.count(m) == 1);

    REQUIRE_THROWS_AS(subcentricSet(makeAsymmetricV4()), std::invalid_argument);
}

TEST_CASE("delta generation and delta saturation") {
    auto f = makeS4Fusion();
    const auto& F = f.gf.F;
    Mask S = fullMask(*F.S);

    REQUIRE(isDeltaGenerated(F, F.subs));
    auto cr = crSet(F);
    REQUIRE(isDeltaGenerated(F, std::vector<Mask>(cr.begin(), cr.end())));
    REQUIRE_FALSE(isDeltaGenerated(F, {S})); // the V4n automizer cannot be seen from S alone
    REQUIRE(isDeltaSaturated(F, F.subs));

    auto Fbad = makeAsymmetricV4();
    Mask Sbad = fullMask(*Fbad.S);
    REQUIRE(isDeltaSaturated(Fbad, {Sbad}));
    REQUIRE_FALSE(isDeltaSaturated(Fbad, Fbad.subs));
}

TEST_CASE("subsystem relations") {
    auto f = makeS4Fusion();
    const auto& F = f.gf.F;

    auto flSelf = subsystemFlags(F, F);
    REQUIRE(flSelf.stronglyClosed);
    REQUIRE(flSelf.invariant);
    REQUIRE(flSelf.weaklyNormal);
    REQUIRE(flSelf.normal);

    // E = the A4 fusion over the normal V4: a normal subsystem
    auto E = fusionClosureWithin(2, F.S, f.v4n, {{f.v4n, order3OnV4n(f)}});
    auto fl = subsystemFlags(F, E);
    REQUIRE(fl.stronglyClosed);
    REQUIRE(fl.invariant);
    REQUIRE(fl.weaklyNormal);
    REQUIRE(fl.normal);

    // full subcategory over a non-strongly-closed T
    auto Ebad = fusionClosureWithin(2, F.S, f.t13, {});
    auto flBad = subsystemFlags(F, Ebad);
    REQUIRE_FALSE(flBad.stronglyClosed);
    auto repBad = subsystemRelations(F, Ebad);
    REQUIRE(repBad.anyNA());
}

TEST_CASE("saturation criterion report") {
    auto f = makeS4Fusion();
    const auto& F = f.gf.F;
    Mask S = fullMask(*F.S);

    auto repAll = saturationByCriterion(F, F, F.subs);
    REQUIRE(repAll.allPass());

    // kernel-shaped instance: E = A4-fusion over V4n, Delta = overgroups of V4n
    auto E = fusionClosureWithin(2, F.S, f.v4n, {{f.v4n, order3OnV4n(f)}});
    std::vector<Mask> delta{f.v4n, S};
    auto rep = saturationByCriterion(F, E, delta);
    REQUIRE(rep.allPass());

    // Delta missing an E-critical member: hypotheses not applicable
    auto repNA = saturationByCriterion(F, E, {S});
    REQUIRE(repNA.anyNA());
    REQUIRE_FALSE(repNA.anyFail());
    REQUIRE(repNA.exitCode() == 2);
}

TEST_CASE("invariance closes the subgroup families under F-conjugacy") {
    auto f = makeS4Fusion();
    const auto& F = f.gf.F;
    auto E = fusionClosureWithin(2, F.S, f.v4n, {{f.v4n, order3OnV4n(f)}});
    REQUIRE(subsystemFlags(F, E).invariant);

    for (const auto& family : {centricSet(E), radicalSet(E), crSet(E), criticalSet(E)}) {
        for (Mask m : family)
            for (const Images& phi : F.at(m)) REQUIRE(family.count(mapImage(phi)) == 1);
    }
}

TEST_CASE("morphism cap raises a graceful error") {
    RunConfig tight;
    tight.morphismCap = 5;
    auto A4 = makeA4();
    auto fa = fusionFromGroup(A4, pCore(A4, 2), 2);
    Mask v4 = fullMask(*fa.F.S);
    int rot = permIndex(A4, fromCycles(4, {{1, 2, 3}}));
    Images order3;
    for (int x : melems(v4))
        order3.push_back(uint8_t(fa.emb.fromParent[A4.conj(fa.emb.toParent[x], rot)]));
    REQUIRE_THROWS_AS(fusionClosureWithin(2, fa.F.S, v4, {{v4, order3}}, tight), CapExceeded);
}
