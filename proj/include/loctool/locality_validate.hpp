#pragma once

#include <array>
#include <functional>

#include "loctool/locality.hpp"
#include "loctool/report.hpp"

namespace loctool::ploc {

inline Json wordJson(const std::vector<int>& w) {
    Json a = Json::array();
    for (int x : w) a.push_back(x);
    return a;
}

/// Tries to grow S by one outside element; returns an element whose closure
/// with S is a strictly larger p-subgroup, or -1 when S is maximal.
inline int maximalityCounterexample(const PartialGroupTable& pg, const Bitset& S, int p) {
    for (int f = 0; f < pg.size; ++f) {
        if (S.test(f)) continue;
        // close S ∪ {f} under defined products and inversion
        Bitset C = S;
        C.set(f);
        std::vector<int> elems = C.indices();
        bool closed = true;
        for (size_t i = 0; closed && i < elems.size(); ++i) {
            int x = elems[i];
            int ix = pg.inv[x];
            if (!C.test(ix)) {
                C.set(ix);
                elems.push_back(ix);
            }
            for (size_t j = 0; closed && j < elems.size(); ++j) {
                for (int v : {pg.at(x, elems[j]), pg.at(elems[j], x)}) {
                    if (v < 0) { closed = false; break; }
                    if (!C.test(v)) {
                        C.set(v);
                        elems.push_back(v);
                    }
                }
            }
        }
        if (closed && grp::isPPower(C.count(), p) && C.count() > S.count()) return f;
    }
    return -1;
}

inline int autoDepth(int size, int configured) {
    int bydim = size <= 80 ? 4 : (size <= 200 ? 3 : 2);
    return std::min(configured, bydim);
}

/// Checks the partial-group and locality axioms with witnesses:
///  - inversion/unit behaviour and the pair table matching D_Delta
///  - Delta closure under overgroups and conjugation
///  - maximality of S among p-subgroups
///  - S_f is an object, S_f^f = S_{f^-1}, c_f an injective homomorphism
///  - word axioms on the domain up to the validation depth: fold
///    definedness, substitution identities, cancellation, S_w <= S_{fold(w)}
/// Substitution membership checks run exhaustively to length 3; at length 4
/// only product equalities are verified (membership follows from the closure
/// clauses once those hold).
inline Report validateLocality(const Locality& L, const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    Report rep;
    rep.theorem = "locality-axioms";
    const auto& pg = L.pg;
    const int n = pg.size;

    // inversion and unit
    {
        Json w;
        bool ok = true;
        for (int f = 0; f < n && ok; ++f) {
            if (pg.inv[pg.inv[f]] != f) { ok = false; w = Json{{"element", f}, {"kind", "involution"}}; }
            else if (!pg.has(f, pg.inv[f]) || pg.at(f, pg.inv[f]) != pg.unit ||
                     !pg.has(pg.inv[f], f) || pg.at(pg.inv[f], f) != pg.unit) {
                ok = false;
                w = Json{{"element", f}, {"kind", "inverse-product"}};
            } else if (!pg.has(pg.unit, f) || pg.at(pg.unit, f) != f || !pg.has(f, pg.unit) ||
                       pg.at(f, pg.unit) != f) {
                ok = false;
                w = Json{{"element", f}, {"kind", "unit"}};
            }
        }
        rep.add("inversion-and-unit", ok ? Verdict::Pass : Verdict::Fail, w);
    }

    // object set closure
    bool deltaOk = true;
    {
        Json w;
        if (L.deltaMasks.empty()) {
            deltaOk = false;
            w = "empty object set";
        }
        fus::Mask sfull = L.sCount() == 32 ? ~fus::Mask{0} : (fus::Mask{1} << L.sCount()) - 1;
        auto subs = fus::subgroupMasksOf(*L.SG, sfull);
        for (fus::Mask P : L.deltaMasks) {
            if (!deltaOk) break;
            for (fus::Mask Q : subs)
                if ((P & Q) == P && !L.inDeltaS(Q)) {
                    deltaOk = false;
                    w = Json{{"object", fus::melems(P)}, {"missing-overgroup", fus::melems(Q)}};
                    break;
                }
            for (int f = 0; f < n && deltaOk; ++f) {
                if ((P & L.SfMask[f]) != P) continue;
                fus::Mask img = 0;
                for (int x : fus::melems(P)) img |= fus::Mask{1} << L.conjOnS(f, x);
                if (!L.inDeltaS(img)) {
                    deltaOk = false;
                    w = Json{{"object", fus::melems(P)}, {"conjugator", f},
                             {"missing-image", fus::melems(img)}};
                }
            }
        }
        rep.add("objects-closed", deltaOk ? Verdict::Pass : Verdict::Fail, w);
    }

    // binary products match the object chains
    {
        Json w;
        bool ok = true;
        for (int f = 0; f < n && ok; ++f)
            for (int g = 0; g < n; ++g) {
                bool defined = pg.has(f, g);
                bool should = L.inDeltaS(L.swMask({f, g}));
                if (defined != should) {
                    ok = false;
                    w = Json{{"word", Json::array({f, g})},
                             {"defined", defined},
                             {"object-chain", should}};
                    break;
                }
            }
        rep.add("pairs-match-objects", ok ? Verdict::Pass : Verdict::Fail, w);
    }

    // maximality of S
    {
        int c = maximalityCounterexample(pg, L.S, L.p);
        rep.add("s-maximal-p-subgroup", c < 0 ? Verdict::Pass : Verdict::Fail,
                c < 0 ? Json() : Json{{"extending-element", c}});
    }

    // S_f properties
    {
        Json w;
        bool ok = true;
        for (int f = 0; f < n && ok; ++f) {
            fus::Mask sf = L.SfMask[f];
            if (!fus::misSubgroup(*L.SG, sf)) {
                ok = false;
                w = Json{{"element", f}, {"kind", "Sf-not-subgroup"}};
                break;
            }
            if (!L.inDeltaS(sf)) {
                ok = false;
                w = Json{{"element", f}, {"kind", "Sf-not-object"}};
                break;
            }
            fus::Mask img = 0;
            bool inj = true;
            for (int x : fus::melems(sf)) {
                int8_t y = L.conjOnS(f, x);
                if ((img >> y) & 1) inj = false;
                img |= fus::Mask{1} << y;
            }
            if (!inj || img != L.SfMask[pg.inv[f]]) {
                ok = false;
                w = Json{{"element", f}, {"kind", "Sf-conjugate-mismatch"}};
                break;
            }
            // homomorphism of c_f on S_f
            for (int x : fus::melems(sf)) {
                for (int y : fus::melems(sf)) {
                    int xy = L.SG->mul(x, y);
                    if (!((sf >> xy) & 1) ||
                        L.conjOnS(f, xy) != L.SG->mul(L.conjOnS(f, x), L.conjOnS(f, y))) {
                        ok = false;
                        w = Json{{"element", f}, {"kind", "cf-not-homomorphism"}};
                        break;
                    }
                }
                if (!ok) break;
            }
        }
        rep.add("sf-objects-and-conjugation", ok ? Verdict::Pass : Verdict::Fail, w);
    }

    // word axioms over the domain
    {
        int depth = autoDepth(n, cfg.validationDepth);
        Json w;
        bool ok = true;
        long long checked = 0;

        // depth-first enumeration of domain words with incremental chases;
        // pruning on S_prefix outside Delta is sound once the closure clauses
        // hold
        std::vector<int> word;
        std::vector<std::array<int8_t, 32>> imgs(size_t(depth) + 1);
        std::vector<fus::Mask> alive(size_t(depth) + 1);
        const int k = L.sCount();
        for (int i = 0; i < k; ++i) imgs[0][i] = int8_t(i);
        alive[0] = k == 32 ? ~fus::Mask{0} : (fus::Mask{1} << k) - 1;

        auto checkWord = [&](const std::vector<int>& wd, fus::Mask sWd) -> bool {
            ++checked;
            int prod = pg.fold(wd);
            if (prod < 0) {
                w = Json{{"word", wordJson(wd)}, {"kind", "fold-undefined"}};
                return false;
            }
            if ((sWd & L.SfMask[prod]) != sWd) {
                w = Json{{"word", wordJson(wd)}, {"kind", "Sw-not-in-Sproduct"}};
                return false;
            }
            size_t len = wd.size();
            // substitution: collapse every contiguous subword
            for (size_t i = 0; i < len; ++i)
                for (size_t j = i + 2; j <= len; ++j) {
                    if (j - i == len && i == 0) continue;
                    std::vector<int> sub(wd.begin() + i, wd.begin() + j);
                    int v = pg.fold(sub);
                    if (v < 0) {
                        w = Json{{"word", wordJson(wd)}, {"kind", "subword-fold-undefined"},
                                 {"from", i}, {"to", j}};
                        return false;
                    }
                    std::vector<int> collapsed;
                    collapsed.insert(collapsed.end(), wd.begin(), wd.begin() + i);
                    collapsed.push_back(v);
                    collapsed.insert(collapsed.end(), wd.begin() + j, wd.end());
                    if (len <= 3 && !L.inDeltaS(L.swMask(sub))) {
                        w = Json{{"word", wordJson(wd)}, {"kind", "subword-outside-domain"}};
                        return false;
                    }
                    if (len <= 3 && !L.inDeltaS(L.swMask(collapsed))) {
                        w = Json{{"word", wordJson(wd)}, {"kind", "collapsed-outside-domain"}};
                        return false;
                    }
                    if (pg.fold(collapsed) != prod) {
                        w = Json{{"word", wordJson(wd)}, {"kind", "substitution-product-mismatch"}};
                        return false;
                    }
                }
            // cancellation for short words
            if (len <= 2) {
                std::vector<int> cw;
                for (auto it = wd.rbegin(); it != wd.rend(); ++it) cw.push_back(pg.inv[*it]);
                cw.insert(cw.end(), wd.begin(), wd.end());
                if (!L.inDeltaS(L.swMask(cw))) {
                    w = Json{{"word", wordJson(wd)}, {"kind", "cancellation-outside-domain"}};
                    return false;
                }
                if (pg.fold(cw) != pg.unit) {
                    w = Json{{"word", wordJson(wd)}, {"kind", "cancellation-not-unit"}};
                    return false;
                }
            }
            return true;
        };

        std::function<bool(int)> dfs = [&](int depthLeft) -> bool {
            size_t ell = word.size();
            if (ell >= 2 && L.inDeltaS(alive[ell])) {
                if (!checkWord(word, alive[ell])) return false;
            }
            if (depthLeft == 0) return true;
            if (ell > 0 && !deltaOk) return true; // no sound pruning without closure
            if (ell > 0 && !L.inDeltaS(alive[ell])) return true; // prune
            for (int f = 0; f < n; ++f) {
                fus::Mask next = 0;
                auto& cur = imgs[ell];
                auto& nxt = imgs[ell + 1];
                for (int x : fus::melems(alive[ell])) {
                    int8_t y = L.conjOnS(f, cur[x]);
                    if (y >= 0) {
                        nxt[x] = y;
                        next |= fus::Mask{1} << x;
                    }
                }
                alive[ell + 1] = next;
                word.push_back(f);
                bool cont = dfs(depthLeft - 1);
                word.pop_back();
                if (!cont) return false;
            }
            return true;
        };
        ok = dfs(depth);
        Json wit;
        wit["checked-domain-words"] = checked;
        wit["depth"] = depth;
        if (!ok) wit["failure"] = w;
        rep.add("word-axioms", ok ? Verdict::Pass : Verdict::Fail, wit);
    }

    rep.timing_ms = sw.ms();
    return rep;
}

} // namespace loctool::ploc
