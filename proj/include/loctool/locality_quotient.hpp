#pragma once

#include "loctool/fusion_analysis.hpp"
#include "loctool/locality_validate.hpp"

namespace loctool::ploc {

struct CosetPartition {
    std::vector<Bitset> blocks; // maximal cosets, ordered by least member
    std::vector<int> repMap;    // element -> block index
};

/// Maximal cosets Nf; they partition L for partial normal N.
inline CosetPartition cosets(const Locality& L, const Bitset& N) {
    if (!isPartialNormal(L, N)) throw std::invalid_argument("cosets require a partial normal subgroup");
    const auto& pg = L.pg;
    std::vector<Bitset> all;
    std::set<Bitset> seen;
    for (int f = 0; f < pg.size; ++f) {
        Bitset c(pg.size);
        N.forEach([&](int n) {
            int v = pg.at(n, f);
            if (v >= 0) c.set(v);
        });
        if (!c.test(f)) throw InvariantViolation("coset does not contain its defining element");
        if (seen.insert(c).second) all.push_back(c);
    }
    std::vector<Bitset> maximal;
    for (const auto& c : all) {
        bool top = true;
        for (const auto& d : all)
            if (!(c == d) && c.subsetOf(d)) { top = false; break; }
        if (top) maximal.push_back(c);
    }
    std::sort(maximal.begin(), maximal.end(), [](const Bitset& a, const Bitset& b) {
        return a.indices().front() < b.indices().front();
    });
    CosetPartition out;
    out.blocks = maximal;
    out.repMap.assign(pg.size, -1);
    for (size_t i = 0; i < maximal.size(); ++i)
        maximal[i].forEach([&](int x) {
            if (out.repMap[x] >= 0) throw InvariantViolation("maximal cosets overlap");
            out.repMap[x] = int(i);
        });
    for (int x = 0; x < pg.size; ++x)
        if (out.repMap[x] < 0) throw InvariantViolation("maximal cosets do not cover L");
    return out;
}

struct QuotientResult {
    PartialGroupTable pg;
    std::vector<int> proj; // element -> quotient index
    CosetPartition partition;
};

/// L/N with the induced product: a pair of blocks multiplies when some lift
/// does, and every defined lift must land in one block.
inline QuotientResult quotientLocality(const Locality& L, const Bitset& N) {
    QuotientResult out;
    out.partition = cosets(L, N);
    const auto& blocks = out.partition.blocks;
    const auto& rep = out.partition.repMap;
    int k = int(blocks.size());
    out.proj = rep;
    out.pg.size = k;
    out.pg.unit = rep[L.pg.unit];
    out.pg.inv.assign(k, -1);
    for (int i = 0; i < k; ++i) {
        int v = -1;
        blocks[i].forEach([&](int x) {
            int ib = rep[L.pg.inv[x]];
            if (v < 0) v = ib;
            else if (v != ib) throw InvariantViolation("inversion is not constant on a coset");
        });
        out.pg.inv[i] = v;
    }
    out.pg.pairs.assign(size_t(k) * k, -1);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            int v = -1;
            bool mixed = false;
            blocks[i].forEach([&](int f) {
                blocks[j].forEach([&](int g) {
                    int fg = L.pg.at(f, g);
                    if (fg < 0) return;
                    if (v < 0) v = rep[fg];
                    else if (v != rep[fg]) mixed = true;
                });
            });
            if (mixed)
                throw InvariantViolation("quotient product is not well defined on blocks " +
                                         std::to_string(i) + "," + std::to_string(j));
            if (v >= 0) out.pg.define(i, j, v);
        }
    return out;
}

/// Verdict-style check that `map` is a homomorphism / projection of partial
/// groups and of localities, with the kernel identified.
inline Report checkProjection(const Locality& Lsrc, const Locality& Ldst,
                              const std::vector<int>& map,
                              const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    Report rep;
    rep.theorem = "projection-of-localities";
    if (int(map.size()) != Lsrc.pg.size) throw std::invalid_argument("map is not total");
    for (int v : map)
        if (v < 0 || v >= Ldst.pg.size) throw std::invalid_argument("map image out of range");

    bool unitOk = map[Lsrc.pg.unit] == Ldst.pg.unit;
    rep.add("unit-preserved", unitOk ? Verdict::Pass : Verdict::Fail);

    {
        bool ok = true;
        Json w;
        for (int f = 0; f < Lsrc.pg.size && ok; ++f)
            if (map[Lsrc.pg.inv[f]] != Ldst.pg.inv[map[f]]) {
                ok = false;
                w = Json{{"element", f}};
            }
        rep.add("inversion-preserved", ok ? Verdict::Pass : Verdict::Fail, w);
    }

    // homomorphism on pairs, and on length-3 domain words when affordable
    {
        bool ok = true;
        Json w;
        for (int f = 0; f < Lsrc.pg.size && ok; ++f)
            for (int g = 0; g < Lsrc.pg.size; ++g) {
                int fg = Lsrc.pg.at(f, g);
                if (fg < 0) continue;
                if (!Ldst.pg.has(map[f], map[g]) || Ldst.pg.at(map[f], map[g]) != map[fg]) {
                    ok = false;
                    w = Json{{"word", Json::array({f, g})}};
                    break;
                }
            }
        if (ok && Lsrc.pg.size <= 100) {
            for (int f = 0; f < Lsrc.pg.size && ok; ++f)
                for (int g = 0; g < Lsrc.pg.size && ok; ++g)
                    for (int h = 0; h < Lsrc.pg.size; ++h) {
                        std::vector<int> word{f, g, h};
                        if (!Lsrc.wordInDomain(word)) continue;
                        std::vector<int> img{map[f], map[g], map[h]};
                        if (!Ldst.wordInDomain(img) ||
                            Ldst.pg.fold(img) != map[Lsrc.pg.fold(word)]) {
                            ok = false;
                            w = Json{{"word", wordJson(word)}};
                            break;
                        }
                    }
        }
        rep.add("homomorphism", ok ? Verdict::Pass : Verdict::Fail, w);
    }

    // projection: defined pairs are hit surjectively
    {
        std::set<std::pair<int, int>> imagePairs;
        for (int f = 0; f < Lsrc.pg.size; ++f)
            for (int g = 0; g < Lsrc.pg.size; ++g)
                if (Lsrc.pg.has(f, g)) imagePairs.insert({map[f], map[g]});
        bool ok = true;
        Json w;
        for (int f = 0; f < Ldst.pg.size && ok; ++f)
            for (int g = 0; g < Ldst.pg.size; ++g)
                if (Ldst.pg.has(f, g) && !imagePairs.count({f, g})) {
                    ok = false;
                    w = Json{{"pair", Json::array({f, g})}};
                    break;
                }
        bool onto = true;
        {
            std::vector<char> hit(Ldst.pg.size, 0);
            for (int f = 0; f < Lsrc.pg.size; ++f) hit[map[f]] = 1;
            for (char c : hit)
                if (!c) onto = false;
        }
        rep.add("domains-surjective", (ok && onto) ? Verdict::Pass : Verdict::Fail, w);
    }

    // object sets correspond
    {
        std::set<Bitset> dstObjects(Ldst.Delta.begin(), Ldst.Delta.end());
        std::set<Bitset> mapped;
        for (const auto& P : Lsrc.Delta) {
            Bitset img(Ldst.pg.size);
            P.forEach([&](int x) { img.set(map[x]); });
            mapped.insert(img);
        }
        bool ok = mapped == dstObjects;
        rep.add("objects-match", ok ? Verdict::Pass : Verdict::Fail);
    }

    // kernel
    {
        Bitset K(Lsrc.pg.size);
        for (int f = 0; f < Lsrc.pg.size; ++f)
            if (map[f] == Ldst.pg.unit) K.set(f);
        bool ok = isPartialNormal(Lsrc, K);
        Json w = Json{{"kernel", Json::array()}};
        for (int x : K.indices()) w["kernel"].push_back(x);
        rep.add("kernel-partial-normal", ok ? Verdict::Pass : Verdict::Fail, w);
    }

    rep.timing_ms = sw.ms();
    return rep;
}

/// cr-completeness, objective characteristic p, the linking property, and
/// the generation/saturation facts that hold for every locality.
inline Report localityFlags(const Locality& L, const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    Report rep;
    rep.theorem = "locality-flags";
    auto F = fusionOfLocality(L, cfg);

    auto cr = fus::crSet(F);
    std::set<fus::Mask> missing;
    for (fus::Mask m : cr)
        if (!L.inDeltaS(m)) missing.insert(m);
    bool crComplete = missing.empty();
    {
        Json w{{"holds", crComplete}};
        if (!crComplete) {
            w["missing"] = Json::array();
            for (fus::Mask m : missing) w["missing"].push_back(fus::melems(m));
        }
        rep.pass("cr-complete", w);
    }

    bool objective = true;
    Json objW{{"holds", true}};
    for (const auto& P : L.Delta) {
        Bitset NP = normalizerP(L, P);
        grp::FiniteGroup NPg = groupFromSubset(L, NP); // a subgroup for objects
        if (!grp::isCharacteristicP(NPg, L.p)) {
            objective = false;
            objW = Json{{"holds", false}, {"object", Json(P.indices())}};
            break;
        }
    }
    rep.pass("objective-characteristic-p", objW);
    rep.pass("linking", Json{{"holds", crComplete && objective}});

    // facts that hold for every locality; failure is inconsistency
    std::vector<fus::Mask> delta(L.deltaMasks.begin(), L.deltaMasks.end());
    bool gen = fus::isDeltaGenerated(F, delta, cfg);
    rep.add("fusion-delta-generated", gen ? Verdict::Pass : Verdict::Fail);
    bool dsat = fus::isDeltaSaturated(F, delta);
    rep.add("fusion-delta-saturated", dsat ? Verdict::Pass : Verdict::Fail);
    if (crComplete) {
        bool sat = fus::isSaturated(F);
        rep.add("cr-complete-implies-saturated", sat ? Verdict::Pass : Verdict::Fail);
    } else {
        rep.na("cr-complete-implies-saturated");
    }
    rep.timing_ms = sw.ms();
    return rep;
}

} // namespace loctool::ploc
