#include <catch2/catch_amalgamated.hpp>

#include "loctool/group.hpp"
#include "loctool/group_reports.hpp"

#include <map>
#include <set>

using namespace loctool;
using namespace loctool::grp;

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
FiniteGroup makeD8() {
    return buildGroupFromPerms({fromCycles(4, {{1, 2, 3, 4}}), fromCycles(4, {{1, 3}})}, 4, "D8");
}
FiniteGroup makeV4() {
    return buildGroupFromPerms({fromCycles(4, {{1, 2}, {3, 4}}), fromCycles(4, {{1, 3}, {2, 4}})}, 4, "V4");
}
FiniteGroup makeC2xS3() {
    return buildGroupFromPerms(
        {fromCycles(5, {{1, 2}}), fromCycles(5, {{1, 2, 3}}), fromCycles(5, {{4, 5}})}, 5, "C2xS3");
}
FiniteGroup makeC3() {
    return buildGroupFromPerms({fromCycles(3, {{1, 2, 3}})}, 3, "C3");
}

// Oracle: close a set of permutations by repeated pairwise products until the
// set stabilizes. Intentionally naive and separate from the builder.
size_t permClosureOracle(std::vector<Perm> gens, int deg) {
    std::set<Perm> all(gens.begin(), gens.end());
    all.insert(permIdentity(deg));
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Perm> cur(all.begin(), all.end());
        for (const auto& a : cur)
            for (const auto& b : cur)
                if (all.insert(permCompose(a, b)).second) grew = true;
    }
    return all.size();
}

// Oracle: all subgroups of a small group by exhaustive subset filtering.
std::set<Bitset> subgroupsBySubsetScan(const FiniteGroup& G) {
    REQUIRE(G.n <= 16);
    std::set<Bitset> out;
    for (uint32_t bits = 0; bits < (1u << G.n); ++bits) {
        if (!(bits & 1)) continue; // must contain the identity
        Bitset m(G.n);
        for (int i = 0; i < G.n; ++i)
            if (bits & (1u << i)) m.set(i);
        if (isSubgroupMask(G, m)) out.insert(m);
    }
    return out;
}

// Oracle: subgroup lattice via cyclic subgroups and pairwise joins.
std::set<Bitset> subgroupsByJoinCompletion(const FiniteGroup& G) {
    std::set<Bitset> out;
    for (int x = 0; x < G.n; ++x) out.insert(closureMask(G, Bitset::single(G.n, x)));
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Bitset> cur(out.begin(), out.end());
        for (size_t i = 0; i < cur.size(); ++i)
            for (size_t j = i + 1; j < cur.size(); ++j)
                if (out.insert(joinMask(G, cur[i], cur[j])).second) grew = true;
    }
    return out;
}

// Oracle: subnormality as reachability in the "is normal in" relation.
bool subnormalByChainSearch(const FiniteGroup& G, const Bitset& H) {
    auto subs = enumerateSubgroups(G);
    std::map<Bitset, int> idx;
    for (size_t i = 0; i < subs.size(); ++i) idx[subs[i]] = int(i);
    // edges K -> K' when K is a proper normal subgroup of K'
    std::vector<char> reach(subs.size(), 0);
    reach[idx.at(H)] = 1;
    bool grew = true;
    while (grew) {
        grew = false;
        for (size_t i = 0; i < subs.size(); ++i) {
            if (!reach[i]) continue;
            for (size_t j = 0; j < subs.size(); ++j) {
                if (reach[j] || !subs[i].subsetOf(subs[j])) continue;
                if (isNormalIn(G, subs[i], subs[j])) {
                    reach[j] = 1;
                    grew = true;
                }
            }
        }
    }
    return reach[idx.at(Bitset::full(G.n))] != 0;
}

} // namespace

TEST_CASE("permutation closure builds the expected groups") {
    REQUIRE(permClosureOracle({fromCycles(4, {{1, 2}}), fromCycles(4, {{1, 2, 3, 4}})}, 4) == 24);
    auto S4 = makeS4();
    REQUIRE(S4.n == 24);
    REQUIRE(S4.inv[0] == 0);
    REQUIRE(makeD8().n == 8);
    REQUIRE(makeA4().n == 12);
    REQUIRE(makeC2xS3().n == 12);
}

TEST_CASE("table builder validates the group axioms") {
    auto triv = buildGroupFromTable({{0}});
    REQUIRE(triv.n == 1);

    // Z/2 with broken associativity is impossible at order 2; use a planted
    // non-associative 3-table instead.
    std::vector<std::vector<int>> bad = {{0, 1, 2}, {1, 2, 0}, {2, 1, 0}};
    REQUIRE_THROWS_AS(buildGroupFromTable(bad), std::invalid_argument);

    std::vector<std::vector<int>> noInv = {{0, 1}, {1, 1}};
    REQUIRE_THROWS_AS(buildGroupFromTable(noInv), std::invalid_argument);

    RunConfig tight;
    tight.groupOrderCap = 10;
    REQUIRE_THROWS_AS(
        buildGroupFromPerms({fromCycles(4, {{1, 2}}), fromCycles(4, {{1, 2, 3, 4}})}, 4, "S4", tight),
        CapExceeded);
}

TEST_CASE("subgroup enumeration is exhaustive and duplicate-free") {
    auto V4 = makeV4();
    auto oracleV4 = subgroupsBySubsetScan(V4);
    REQUIRE(oracleV4.size() == 5);
    auto subsV4 = enumerateSubgroups(V4);
    REQUIRE(std::set<Bitset>(subsV4.begin(), subsV4.end()) == oracleV4);

    auto S4 = makeS4();
    auto oracleS4 = subgroupsByJoinCompletion(S4);
    REQUIRE(oracleS4.size() == 30);
    auto subs = enumerateSubgroups(S4);
    REQUIRE(subs.size() == 30);
    REQUIRE(std::set<Bitset>(subs.begin(), subs.end()) == oracleS4);
    // ordered by (order, mask)
    for (size_t i = 1; i < subs.size(); ++i) {
        REQUIRE(subs[i - 1].count() <= subs[i].count());
        if (subs[i - 1].count() == subs[i].count()) REQUIRE(subs[i - 1] < subs[i]);
    }

    auto one = buildGroupFromTable({{0}});
    REQUIRE(enumerateSubgroups(one).size() == 1);
}

TEST_CASE("sylow subgroups match the enumeration filter oracle") {
    auto S4 = makeS4();
    auto subs = enumerateSubgroups(S4);

    auto filterOracle = [&](int p, int order) {
        std::set<Bitset> expect;
        for (const auto& H : subs)
            if (H.count() == order) expect.insert(H);
        return expect;
    };

    auto syl2 = sylow(S4, 2);
    REQUIRE(syl2.size() == 3);
    for (const auto& S : syl2) REQUIRE(S.count() == 8);
    REQUIRE(std::set<Bitset>(syl2.begin(), syl2.end()) == filterOracle(2, 8));

    auto syl3 = sylow(S4, 3);
    REQUIRE(syl3.size() == 4);
    for (const auto& S : syl3) REQUIRE(S.count() == 3);
    REQUIRE(std::set<Bitset>(syl3.begin(), syl3.end()) == filterOracle(3, 3));

    auto C3 = makeC3();
    auto syl = sylow(C3, 2);
    REQUIRE(syl.size() == 1);
    REQUIRE(syl[0].count() == 1);
}

TEST_CASE("normalizer and centralizer agree with the element-scan oracle") {
    auto S4 = makeS4();
    Bitset c4 = closureMask(S4, Bitset::single(S4.n, permIndex(S4, fromCycles(4, {{1, 2, 3, 4}}))));
    REQUIRE(c4.count() == 4);
    Bitset norm = normalizerMask(S4, c4, Bitset::full(S4.n));
    REQUIRE(norm.count() == 8);

    // raw scan oracle
    int cnt = 0;
    for (int g = 0; g < S4.n; ++g)
        if (conjugateMask(S4, c4, g) == c4) ++cnt;
    REQUIRE(cnt == 8);

    // H = G
    Bitset full = Bitset::full(S4.n);
    REQUIRE(normalizerMask(S4, full, full) == full);

    // abelian group: centralizer of anything is everything
    auto V4 = makeV4();
    for (const auto& H : enumerateSubgroups(V4))
        REQUIRE(centralizerMask(V4, H, Bitset::full(V4.n)) == Bitset::full(V4.n));

    // centralizer is contained in the normalizer, and is antitone
    auto subs = enumerateSubgroups(S4);
    for (const auto& H : subs) {
        REQUIRE(centralizerMask(S4, H, full).subsetOf(normalizerMask(S4, H, full)));
        for (const auto& K : subs)
            if (H.subsetOf(K))
                REQUIRE(centralizerMask(S4, K, full).subsetOf(centralizerMask(S4, H, full)));
    }
}

TEST_CASE("p-cores match the intersect-normal-subgroups oracle") {
    auto S4 = makeS4();
    auto subs = enumerateSubgroups(S4);
    Bitset full = Bitset::full(S4.n);

    auto largestNormalOracle = [&](const FiniteGroup& G, const std::vector<Bitset>& all,
                                   auto&& keep) {
        Bitset best(G.n);
        best.set(0);
        for (const auto& H : all)
            if (keep(H) && isNormalIn(G, H, Bitset::full(G.n)) && H.count() > best.count()) best = H;
        // maximality: every qualifying normal subgroup is inside the best one
        for (const auto& H : all)
            if (keep(H) && isNormalIn(G, H, Bitset::full(G.n))) REQUIRE(H.subsetOf(best));
        return best;
    };

    Bitset o2 = pCore(S4, 2);
    REQUIRE(o2.count() == 4);
    REQUIRE(o2 == largestNormalOracle(S4, subs, [](const Bitset& H) {
                return isPPower(H.count(), 2);
            }));

    auto S3 = makeS3();
    REQUIRE(pCore(S3, 3).count() == 3);
    REQUIRE(pPrimeCore(S3, 3).count() == 1);
    REQUIRE(pPrimeCore(S3, 2).count() == 3); // O_{2'}(S3) = C3

    auto subsS3 = enumerateSubgroups(S3);
    REQUIRE(pPrimeCore(S3, 2) == largestNormalOracle(S3, subsS3, [](const Bitset& H) {
                return H.count() % 2 != 0;
            }));

    // a p-group is its own p-core
    auto D8 = makeD8();
    REQUIRE(pCore(D8, 2) == Bitset::full(D8.n));
    REQUIRE(pPrimeCore(D8, 2).count() == 1);

    // cross-check on the catalog groups: p-core == intersection of Sylows
    for (const auto* G : {&S4, &S3, &D8}) {
        for (int p : {2, 3}) {
            auto syl = sylow(*G, p);
            Bitset inter = syl[0];
            for (const auto& S : syl) inter = inter & S;
            REQUIRE(pCore(*G, p) == inter);
        }
    }
}

TEST_CASE("characteristic-p detection") {
    auto S4 = makeS4();
    REQUIRE(isCharacteristicP(S4, 2));
    auto S3 = makeS3();
    REQUIRE_FALSE(isCharacteristicP(S3, 2)); // O_2 = 1, C(1) = G
    REQUIRE(isCharacteristicP(S3, 3));
    auto D8 = makeD8();
    REQUIRE(isCharacteristicP(D8, 2)); // any p-group
}

TEST_CASE("subnormality by normal-closure descent matches chain search") {
    auto S4 = makeS4();
    Bitset full = Bitset::full(S4.n);
    REQUIRE(isSubnormal(S4, full));

    Bitset t = closureMask(S4, Bitset::single(S4.n, permIndex(S4, fromCycles(4, {{1, 2}}))));
    REQUIRE_FALSE(isSubnormal(S4, t));
    REQUIRE_FALSE(subnormalByChainSearch(S4, t));

    Bitset o2 = pCore(S4, 2);
    REQUIRE(isSubnormal(S4, o2));
    REQUIRE(subnormalByChainSearch(S4, o2));

    // full agreement on every subgroup of S4 and A4
    for (auto* G : {&S4}) {
        for (const auto& H : enumerateSubgroups(*G))
            REQUIRE(isSubnormal(*G, H) == subnormalByChainSearch(*G, H));
    }
    auto A4 = makeA4();
    for (const auto& H : enumerateSubgroups(A4))
        REQUIRE(isSubnormal(A4, H) == subnormalByChainSearch(A4, H));
}

TEST_CASE("characteristic-p local equivalence report") {
    auto D8 = makeD8();
    auto repP = charPEquivGroup(D8, Bitset::full(D8.n), 2);
    REQUIRE(repP.consistent);

    auto S4 = makeS4();
    auto rep = charPEquivGroup(S4, pCore(S4, 2), 2);
    REQUIRE(rep.consistent);
    for (const auto& c : rep.clauses)
        if (c.witness.is_object() && c.witness.contains("holds")) REQUIRE(c.witness["holds"] == true);

    auto G = makeC2xS3();
    // N = the S3 factor: elements fixing points 4,5
    Bitset N(G.n);
    for (int x = 0; x < G.n; ++x)
        if (G.elems[x][3] == 3 && G.elems[x][4] == 4) N.set(x);
    REQUIRE(N.count() == 6);
    auto rep2 = charPEquivGroup(G, N, 2);
    REQUIRE(rep2.consistent);
    for (const auto& c : rep2.clauses)
        if (c.witness.is_object() && c.witness.contains("holds")) REQUIRE(c.witness["holds"] == false);

    Bitset notNormal = closureMask(G, Bitset::single(G.n, permIndex(G, fromCycles(5, {{1, 2}}))));
    REQUIRE_THROWS_AS(charPEquivGroup(G, notNormal, 2), std::invalid_argument);
}

TEST_CASE("sylow product lemma holds on catalog triples") {
    // for every normal N and every H with S∩H Sylow in H, the product set
    // (S∩N)(S∩H) is a Sylow p-subgroup of <N,H>
    auto checkGroup = [&](const FiniteGroup& G, int p) {
        auto subs = enumerateSubgroups(G);
        Bitset full = Bitset::full(G.n);
        Bitset S = sylowOneIn(G, full, p);
        for (const auto& N : subs) {
            if (!isNormalIn(G, N, full)) continue;
            for (const auto& H : subs) {
                Bitset SH = S & H;
                // S∩H Sylow in H?
                if (SH.count() != pPart(H.count(), p)) continue;
                Bitset SN = S & N;
                // product set
                Bitset prod(G.n);
                SN.forEach([&](int a) { SH.forEach([&](int b) { prod.set(G.mul(a, b)); }); });
                Bitset NH = joinMask(G, N, H);
                REQUIRE(isSubgroupMask(G, prod));
                REQUIRE(prod.subsetOf(NH));
                REQUIRE(prod.count() == pPart(NH.count(), p));
            }
        }
    };
    checkGroup(makeS4(), 2);
    checkGroup(makeA4(), 2);
    checkGroup(makeC2xS3(), 2);
    checkGroup(makeS3(), 3);
}

TEST_CASE("group homomorphisms on subgroup masks") {
    auto S4 = makeS4();
    Bitset v4 = pCore(S4, 2);
    int g = permIndex(S4, fromCycles(4, {{1, 2, 3}}));
    GroupHom h;
    h.domain = v4;
    for (int x : v4.indices()) h.map.push_back(S4.conj(x, g));
    REQUIRE(isHomomorphism(S4, S4, h));

    GroupHom broken = h; // collapsing two involutions breaks multiplicativity
    broken.map[1] = broken.map[2];
    REQUIRE_FALSE(isHomomorphism(S4, S4, broken));
}

TEST_CASE("quotient groups and table isomorphism") {
    auto S4 = makeS4();
    auto q1 = quotientGroup(S4, pCore(S4, 2));
    REQUIRE(q1.group.n == 6);
    REQUIRE(groupsIsomorphic(q1.group, makeS3()));

    // A4 is the kernel of the sign map
    Bitset a4(S4.n);
    for (int x = 0; x < S4.n; ++x) {
        // parity from the permutation
        auto pm = S4.elems[x];
        int inversions = 0;
        for (size_t i = 0; i < pm.size(); ++i)
            for (size_t j = i + 1; j < pm.size(); ++j)
                if (pm[i] > pm[j]) ++inversions;
        if (inversions % 2 == 0) a4.set(x);
    }
    auto q2 = quotientGroup(S4, a4);
    REQUIRE(q2.group.n == 2);

    REQUIRE_FALSE(groupsIsomorphic(makeV4(), buildGroupFromPerms({fromCycles(4, {{1, 2, 3, 4}})}, 4, "C4")));
    REQUIRE(groupsIsomorphic(makeD8(), buildGroupFromPerms(
                                           {fromCycles(8, {{1, 2, 3, 4}}), fromCycles(8, {{1, 3}})}, 8, "D8b")));
}
