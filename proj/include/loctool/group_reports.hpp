#pragma once

#include "loctool/group.hpp"
#include "loctool/report.hpp"

namespace loctool::grp {

inline Json maskToJson(const Bitset& m) {
    Json a = Json::array();
    for (int i : m.indices()) a.push_back(i);
    return a;
}

/// Evaluates the three characteristic-p clauses for a normal subgroup N of G
/// independently and asserts they agree:
///   (i)   G has characteristic p
///   (ii)  N and N_G(T) have characteristic p, T a Sylow p-subgroup of N
///   (iii) N and C_G(N) have characteristic p
/// Clause truth values ride in the witnesses; the verdict that matters is the
/// agreement assertion. A mixed verdict never fires on valid input.
inline Report charPEquivGroup(const FiniteGroup& G, const Bitset& N, int p) {
    Stopwatch sw;
    Report rep;
    rep.theorem = "charp-local-equivalence";
    if (!isSubgroupMask(G, N) || !isNormalIn(G, N, Bitset::full(G.n)))
        throw std::invalid_argument("charPEquivGroup: N is not normal in G");

    bool cG = isCharacteristicP(G, p);

    Bitset T = sylowOneIn(G, N, p);
    auto NT = subgroupGroup(G, normalizerMask(G, T, Bitset::full(G.n)));
    auto Ngrp = subgroupGroup(G, N);
    bool cN = isCharacteristicP(Ngrp.group, p);
    bool cNT = isCharacteristicP(NT.group, p);
    auto CN = subgroupGroup(G, centralizerMask(G, N, Bitset::full(G.n)));
    bool cCN = isCharacteristicP(CN.group, p);

    bool i = cG;
    bool ii = cN && cNT;
    bool iii = cN && cCN;
    rep.pass("clause-i-ambient-char-p", Json{{"holds", i}});
    rep.pass("clause-ii-kernel-and-sylow-normalizer-char-p",
             Json{{"holds", ii}, {"sylow_of_N", maskToJson(T)}});
    rep.pass("clause-iii-kernel-and-centralizer-char-p", Json{{"holds", iii}});
    bool agree = (i == ii) && (ii == iii);
    rep.add("clause-agreement", agree ? Verdict::Pass : Verdict::Fail,
            Json{{"i", i}, {"ii", ii}, {"iii", iii}});
    rep.consistent = agree;
    rep.timing_ms = sw.ms();
    return rep;
}

} // namespace loctool::grp
