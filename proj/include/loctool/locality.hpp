#pragma once

#include <optional>

#include "loctool/fusion.hpp"

namespace loctool::ploc {

/// Finite partial group: an inversion table plus a sparse binary product.
/// Words are evaluated by left fold; the domain of longer words is derived
/// from the object set of the surrounding locality.
struct PartialGroupTable {
    int size = 0;
    int unit = 0;
    std::vector<int> inv;
    std::vector<int16_t> pairs; // size*size, -1 undefined

    int at(int f, int g) const { return pairs[f * size + g]; }
    bool has(int f, int g) const { return at(f, g) >= 0; }
    void define(int f, int g, int fg) { pairs[f * size + g] = int16_t(fg); }

    /// Left fold; -1 when some step is undefined. The empty word gives unit.
    int fold(const std::vector<int>& w) const {
        if (w.empty()) return unit;
        int acc = w[0];
        for (size_t i = 1; i < w.size(); ++i) {
            if (acc < 0 || !has(acc, w[i])) return -1;
            acc = at(acc, w[i]);
        }
        return acc;
    }

    /// x^f = (f^-1 x) f when both steps are defined.
    int conj(int x, int f) const {
        int t = pairs[inv[f] * size + x];
        if (t < 0) return -1;
        return pairs[t * size + f];
    }
};

/// A locality (L, Delta, S): partial group with maximal p-subgroup S and an
/// object set Delta of subgroups of S. Caches reindex S as a finite group and
/// precompute the per-element conjugation action on S.
struct Locality {
    PartialGroupTable pg;
    int p = 2;
    Bitset S;                       // over [0, pg.size)
    std::vector<Bitset> Delta;      // subgroups of S, over [0, pg.size), sorted
    std::string name;

    // caches
    std::shared_ptr<const grp::FiniteGroup> SG; // S as a group, unit first then ascending
    std::vector<int> StoL;                      // S-group index -> element
    std::vector<int> LtoS;                      // element -> S-group index or -1
    std::vector<fus::Mask> deltaMasks;          // Delta in S-group coordinates, sorted
    std::set<fus::Mask> deltaSet;
    std::vector<int8_t> conjS;                  // [f * |S| + x] action of c_f on S, -1 undefined
    std::vector<fus::Mask> SfMask;              // per element f: S_f

    int sCount() const { return int(StoL.size()); }
    bool inDeltaS(fus::Mask m) const { return deltaSet.count(m) > 0; }

    fus::Mask maskLtoS(const Bitset& b) const {
        fus::Mask m = 0;
        b.forEach([&](int x) {
            if (LtoS[x] < 0) throw std::invalid_argument("mask not inside S");
            m |= fus::Mask{1} << LtoS[x];
        });
        return m;
    }
    Bitset maskStoL(fus::Mask m) const {
        Bitset b(pg.size);
        for (int x : fus::melems(m)) b.set(StoL[x]);
        return b;
    }

    int8_t conjOnS(int f, int x) const { return conjS[size_t(f) * sCount() + x]; }

    /// S_w for a word over L, by element chase in S-group coordinates.
    fus::Mask swMask(const std::vector<int>& w) const {
        fus::Mask alive = fus::Mask(sCount() == 32 ? ~fus::Mask{0} : (fus::Mask{1} << sCount()) - 1);
        std::vector<int8_t> img(sCount());
        for (int i = 0; i < sCount(); ++i) img[i] = int8_t(i);
        for (int f : w) {
            fus::Mask next = 0;
            for (int x : fus::melems(alive)) {
                int8_t y = conjOnS(f, img[x]);
                if (y >= 0) {
                    img[x] = y;
                    next |= fus::Mask{1} << x;
                }
            }
            alive = next;
            if (!alive) break;
        }
        return alive;
    }

    bool wordInDomain(const std::vector<int>& w) const { return inDeltaS(swMask(w)); }

    /// Product of a word in the domain. Evaluating outside the domain is an
    /// error; a domain word whose fold breaks signals a corrupt table.
    int evalProduct(const std::vector<int>& w) const {
        if (!wordInDomain(w)) throw std::invalid_argument("word outside the product domain");
        int v = pg.fold(w);
        if (v < 0) throw InvariantViolation("domain word with undefined fold");
        return v;
    }
};

// ---------------------------------------------------------------------------
// construction

inline void buildLocalityCaches(Locality& L) {
    auto elems = L.S.indices();
    if (elems.empty() || elems.front() != L.pg.unit) {
        // unit first, then ascending
        std::vector<int> ordered{L.pg.unit};
        for (int x : elems)
            if (x != L.pg.unit) ordered.push_back(x);
        elems = ordered;
    }
    int k = int(elems.size());
    if (k > 32) throw CapExceeded("|S| exceeds the 32-element representation limit");
    L.StoL = elems;
    L.LtoS.assign(L.pg.size, -1);
    for (int i = 0; i < k; ++i) L.LtoS[elems[i]] = i;

    auto Sg = std::make_shared<grp::FiniteGroup>();
    Sg->n = k;
    Sg->name = L.name + "-S";
    Sg->mult.resize(size_t(k) * k);
    Sg->inv.resize(k);
    for (int a = 0; a < k; ++a) {
        int la = elems[a];
        int ia = L.pg.inv[la];
        if (L.LtoS[ia] < 0) throw std::invalid_argument("S is not inversion-closed");
        Sg->inv[a] = L.LtoS[ia];
        for (int b = 0; b < k; ++b) {
            int prod = L.pg.at(la, elems[b]);
            if (prod < 0 || L.LtoS[prod] < 0)
                throw std::invalid_argument("S is not closed under the partial product");
            Sg->mult[a * k + b] = L.LtoS[prod];
        }
    }
    L.SG = Sg;

    L.conjS.assign(size_t(L.pg.size) * k, -1);
    for (int f = 0; f < L.pg.size; ++f)
        for (int x = 0; x < k; ++x) {
            int y = L.pg.conj(elems[x], f);
            if (y >= 0 && L.LtoS[y] >= 0) L.conjS[size_t(f) * k + x] = int8_t(L.LtoS[y]);
        }
    L.SfMask.resize(L.pg.size);
    for (int f = 0; f < L.pg.size; ++f) {
        fus::Mask m = 0;
        for (int x = 0; x < k; ++x)
            if (L.conjOnS(f, x) >= 0) m |= fus::Mask{1} << x;
        L.SfMask[f] = m;
    }

    L.deltaMasks.clear();
    L.deltaSet.clear();
    for (const auto& P : L.Delta) {
        fus::Mask m = L.maskLtoS(P);
        if (!fus::misSubgroup(*Sg, m)) throw std::invalid_argument("object is not a subgroup of S");
        L.deltaMasks.push_back(m);
    }
    std::sort(L.deltaMasks.begin(), L.deltaMasks.end(), [](fus::Mask a, fus::Mask b) {
        if (fus::mcount(a) != fus::mcount(b)) return fus::mcount(a) < fus::mcount(b);
        return a < b;
    });
    L.deltaSet.insert(L.deltaMasks.begin(), L.deltaMasks.end());
    std::sort(L.Delta.begin(), L.Delta.end(), [](const Bitset& a, const Bitset& b) {
        if (a.count() != b.count()) return a.count() < b.count();
        return a < b;
    });
}

/// The restriction L = {g in G : S_g in Delta} of a finite group to an
/// F_S(G)-closed object set. Element order follows the group's.
inline Locality buildLocalityFromGroup(const grp::FiniteGroup& G, const Bitset& Smask,
                                       const std::vector<Bitset>& delta, int p,
                                       const std::string& name = "",
                                       const RunConfig& cfg = globalConfig()) {
    if (!grp::isSubgroupMask(G, Smask)) throw std::invalid_argument("S is not a subgroup of G");
    if (Smask.count() != grp::pPart(G.n, p))
        throw std::invalid_argument("S is not a Sylow p-subgroup of G");
    if (delta.empty()) throw std::invalid_argument("the object set must be nonempty");

    std::set<Bitset> dset(delta.begin(), delta.end());
    // F_S(G)-closure of Delta: overgroups in S and G-conjugates landing in S
    auto sub = grp::subgroupGroup(G, Smask);
    for (const auto& P : delta) {
        if (!grp::isSubgroupMask(G, P) || !P.subsetOf(Smask))
            throw std::invalid_argument("objects must be subgroups of S");
        for (const auto& Q : grp::enumerateSubgroups(sub.group)) {
            Bitset Qparent(G.n);
            Q.forEach([&](int i) { Qparent.set(sub.toParent[i]); });
            if (P.subsetOf(Qparent) && !dset.count(Qparent))
                throw std::invalid_argument("object set is not overgroup-closed in S");
        }
        for (int g = 0; g < G.n; ++g) {
            Bitset Pg = grp::conjugateMask(G, P, g);
            if (Pg.subsetOf(Smask) && !dset.count(Pg))
                throw std::invalid_argument("object set is not closed under conjugation into S");
        }
    }

    // membership: S_g (computed in G) lies in Delta
    auto sgMask = [&](int g) {
        Bitset m(G.n);
        Smask.forEach([&](int x) {
            if (Smask.test(G.conj(x, g))) m.set(x);
        });
        return m;
    };
    std::vector<int> elems;
    for (int g = 0; g < G.n; ++g)
        if (dset.count(sgMask(g))) elems.push_back(g);

    std::vector<int> toNew(G.n, -1);
    for (size_t i = 0; i < elems.size(); ++i) toNew[elems[i]] = int(i);
    if (toNew[0] != 0) throw InvariantViolation("identity fell outside the restriction");

    Locality L;
    L.p = p;
    L.name = name.empty() ? G.name : name;
    L.pg.size = int(elems.size());
    L.pg.unit = 0;
    L.pg.inv.resize(L.pg.size);
    for (size_t i = 0; i < elems.size(); ++i) {
        int ig = G.inv[elems[i]];
        if (toNew[ig] < 0) throw InvariantViolation("restriction is not inversion-closed");
        L.pg.inv[i] = toNew[ig];
    }
    L.pg.pairs.assign(size_t(L.pg.size) * L.pg.size, -1);
    for (size_t i = 0; i < elems.size(); ++i)
        for (size_t j = 0; j < elems.size(); ++j) {
            // (f,g) is defined iff S_{(f,g)} is an object
            Bitset m(G.n);
            Smask.forEach([&](int x) {
                int y = G.conj(x, elems[i]);
                if (Smask.test(y) && Smask.test(G.conj(y, elems[j]))) m.set(x);
            });
            if (dset.count(m)) {
                int prod = G.mul(elems[i], elems[j]);
                if (toNew[prod] < 0)
                    throw InvariantViolation("domain product escapes the restriction");
                L.pg.define(int(i), int(j), toNew[prod]);
            }
        }
    L.S = Bitset(L.pg.size);
    Smask.forEach([&](int x) { L.S.set(toNew[x]); });
    for (const auto& P : delta) {
        Bitset Pn(L.pg.size);
        P.forEach([&](int x) { Pn.set(toNew[x]); });
        L.Delta.push_back(Pn);
    }
    buildLocalityCaches(L);
    return L;
}

// ---------------------------------------------------------------------------
// basic operations

inline int conjugateElt(const Locality& L, int x, int f) {
    std::vector<int> w{L.pg.inv[f], x, f};
    // conjugation is defined when the length-3 word is in the domain, or when
    // the fold itself is defined for elements outside S-chases
    int v = L.pg.fold(w);
    if (v < 0) throw std::invalid_argument("conjugation undefined");
    return v;
}

inline Bitset conjDefinedSet(const Locality& L, int f) {
    Bitset d(L.pg.size);
    for (int x = 0; x < L.pg.size; ++x)
        if (L.pg.conj(x, f) >= 0) d.set(x);
    return d;
}

/// N_L(X): elements f with X inside the conjugation domain of f and X^f = X.
inline Bitset normalizerP(const Locality& L, const Bitset& X) {
    Bitset out(L.pg.size);
    for (int f = 0; f < L.pg.size; ++f) {
        Bitset img(L.pg.size);
        bool ok = true;
        X.forEach([&](int x) {
            if (!ok) return;
            int y = L.pg.conj(x, f);
            if (y < 0) ok = false;
            else img.set(y);
        });
        if (ok && img == X) out.set(f);
    }
    return out;
}

inline Bitset centralizerP(const Locality& L, const Bitset& X) {
    Bitset out(L.pg.size);
    for (int f = 0; f < L.pg.size; ++f) {
        bool ok = true;
        X.forEach([&](int x) {
            if (ok && L.pg.conj(x, f) != x) ok = false;
        });
        if (ok) out.set(f);
    }
    return out;
}

/// Partial subgroup: inverse-closed and closed under defined binary products.
inline bool isPartialSubgroup(const Locality& L, const Bitset& X) {
    if (!X.test(L.pg.unit)) return false;
    bool ok = true;
    X.forEach([&](int x) {
        if (!ok) return;
        if (!X.test(L.pg.inv[x])) { ok = false; return; }
        X.forEach([&](int y) {
            if (!ok) return;
            int v = L.pg.at(x, y);
            if (v >= 0 && !X.test(v)) ok = false;
        });
    });
    return ok;
}

inline bool isPartialNormal(const Locality& L, const Bitset& X) {
    if (!isPartialSubgroup(L, X)) return false;
    bool ok = true;
    for (int f = 0; f < L.pg.size && ok; ++f)
        X.forEach([&](int n) {
            if (!ok) return;
            int y = L.pg.conj(n, f);
            if (y >= 0 && !X.test(y)) ok = false;
        });
    return ok;
}

/// A subgroup of L as a standalone finite group (all pairwise products must
/// be defined).
inline grp::FiniteGroup groupFromSubset(const Locality& L, const Bitset& X,
                                        std::vector<int>* toL = nullptr) {
    auto elems = X.indices();
    if (elems.empty() || !X.test(L.pg.unit))
        throw std::invalid_argument("subset does not contain the unit");
    std::vector<int> ordered{L.pg.unit};
    for (int x : elems)
        if (x != L.pg.unit) ordered.push_back(x);
    std::vector<int> pos(L.pg.size, -1);
    for (size_t i = 0; i < ordered.size(); ++i) pos[ordered[i]] = int(i);
    grp::FiniteGroup G;
    G.n = int(ordered.size());
    G.name = L.name + "-subgroup";
    G.mult.resize(size_t(G.n) * G.n);
    G.inv.resize(G.n);
    for (int a = 0; a < G.n; ++a) {
        int ia = L.pg.inv[ordered[a]];
        if (pos[ia] < 0) throw std::invalid_argument("subset is not inversion-closed");
        G.inv[a] = pos[ia];
        for (int b = 0; b < G.n; ++b) {
            int v = L.pg.at(ordered[a], ordered[b]);
            if (v < 0)
                throw std::invalid_argument("subset is not a subgroup: undefined binary product");
            if (pos[v] < 0) throw std::invalid_argument("subset is not product-closed");
            G.mult[a * G.n + b] = pos[v];
        }
    }
    if (toL) *toL = ordered;
    return G;
}

/// O_p(L): the unique largest p-subgroup that is partial normal, computed as
/// the largest P <= S with N_L(P) = L and cross-checked against the greatest
/// fixpoint of the S_w intersections.
inline Bitset opCoreLocality(const Locality& L) {
    Bitset full(L.pg.size);
    for (int i = 0; i < L.pg.size; ++i) full.set(i);

    // route 1: largest object-candidate subgroup normalized by all of L
    Bitset best(L.pg.size);
    best.set(L.pg.unit);
    auto subs = fus::subgroupMasksOf(*L.SG, fus::Mask(L.sCount() == 32 ? ~fus::Mask{0}
                                                                       : (fus::Mask{1} << L.sCount()) - 1));
    for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
        Bitset P = L.maskStoL(*it);
        if (normalizerP(L, P) == full) { best = P; break; }
    }

    // route 2: greatest X <= S with X inside every S_f and X^f <= X
    fus::Mask X = L.sCount() == 32 ? ~fus::Mask{0} : (fus::Mask{1} << L.sCount()) - 1;
    for (bool changed = true; changed;) {
        changed = false;
        for (int f = 0; f < L.pg.size; ++f) {
            fus::Mask keep = 0;
            for (int x : fus::melems(X)) {
                int8_t y = L.conjOnS(f, x);
                if (y >= 0 && (X >> y) & 1) keep |= fus::Mask{1} << x;
            }
            if (keep != X) {
                X = keep;
                changed = true;
            }
        }
    }
    if (L.maskStoL(X) != best)
        throw InvariantViolation("the two characterizations of O_p(L) disagree");
    return best;
}

/// F_S(L): closure of the maps c_f restricted to S_f.
inline fus::FusionSystem fusionOfLocality(const Locality& L,
                                          const RunConfig& cfg = globalConfig()) {
    std::vector<std::pair<fus::Mask, fus::Images>> gens;
    for (int f = 0; f < L.pg.size; ++f) {
        fus::Mask dom = L.SfMask[f];
        fus::Images im;
        for (int x : fus::melems(dom)) im.push_back(uint8_t(L.conjOnS(f, x)));
        gens.push_back({dom, std::move(im)});
    }
    fus::Mask subsetFull = L.sCount() == 32 ? ~fus::Mask{0} : (fus::Mask{1} << L.sCount()) - 1;
    return fus::fusionClosureWithin(L.p, L.SG, subsetFull, gens, cfg);
}

/// F_{S∩H}(H) for a partial subgroup H, over the same S table.
inline fus::FusionSystem fusionOfPartialSubgroup(const Locality& L, const Bitset& H,
                                                 const RunConfig& cfg = globalConfig()) {
    if (!isPartialSubgroup(L, H)) throw std::invalid_argument("not a partial subgroup");
    fus::Mask T = L.maskLtoS(L.S & H);
    if (!fus::misSubgroup(*L.SG, T)) throw InvariantViolation("S∩H is not a subgroup");
    std::vector<std::pair<fus::Mask, fus::Images>> gens;
    H.forEach([&](int h) {
        fus::Mask dom = L.SfMask[h] & T; // S_h ∩ H inside S
        fus::Images im;
        for (int x : fus::melems(dom)) {
            int8_t y = L.conjOnS(h, x);
            if (y < 0 || !((T >> y) & 1))
                throw InvariantViolation("conjugation by a partial-subgroup element escapes S∩H");
            im.push_back(uint8_t(y));
        }
        if (!fus::misSubgroup(*L.SG, dom)) throw InvariantViolation("S_h ∩ H is not a subgroup");
        gens.push_back({dom, std::move(im)});
    });
    return fus::fusionClosureWithin(L.p, L.SG, T, gens, cfg);
}

/// Restriction to a smaller F-closed object set. When toOld is supplied it
/// receives the element map from restricted indices back to L's.
inline Locality restrictLocality(const Locality& L, const std::vector<Bitset>& delta0,
                                 const RunConfig& cfg = globalConfig(),
                                 std::vector<int>* toOld = nullptr) {
    if (delta0.empty()) throw std::invalid_argument("the restricted object set must be nonempty");
    std::set<fus::Mask> d0;
    for (const auto& P : delta0) {
        fus::Mask m = L.maskLtoS(P);
        if (!L.inDeltaS(m)) throw std::invalid_argument("restriction object outside Delta");
        d0.insert(m);
    }
    // F-closure: overgroups in S and conjugates under locality elements
    for (fus::Mask P : d0) {
        for (fus::Mask Q : fus::subgroupMasksOf(*L.SG, L.sCount() == 32
                                                           ? ~fus::Mask{0}
                                                           : (fus::Mask{1} << L.sCount()) - 1))
            if ((P & Q) == P && L.inDeltaS(Q) && !d0.count(Q))
                throw std::invalid_argument("restriction object set is not overgroup-closed");
        for (int f = 0; f < L.pg.size; ++f) {
            if ((P & L.SfMask[f]) != P) continue;
            fus::Mask img = 0;
            for (int x : fus::melems(P)) img |= fus::Mask{1} << L.conjOnS(f, x);
            if (!d0.count(img))
                throw std::invalid_argument("restriction object set is not conjugation-closed");
        }
    }

    std::vector<int> elems;
    for (int f = 0; f < L.pg.size; ++f)
        if (d0.count(L.SfMask[f])) elems.push_back(f);
    std::vector<int> toNew(L.pg.size, -1);
    for (size_t i = 0; i < elems.size(); ++i) toNew[elems[i]] = int(i);

    Locality R;
    R.p = L.p;
    R.name = L.name + "-restricted";
    R.pg.size = int(elems.size());
    R.pg.unit = toNew[L.pg.unit];
    if (R.pg.unit != 0) throw InvariantViolation("unit fell outside the restriction");
    R.pg.inv.resize(R.pg.size);
    for (size_t i = 0; i < elems.size(); ++i) R.pg.inv[i] = toNew[L.pg.inv[elems[i]]];
    R.pg.pairs.assign(size_t(R.pg.size) * R.pg.size, -1);
    for (size_t i = 0; i < elems.size(); ++i)
        for (size_t j = 0; j < elems.size(); ++j) {
            if (d0.count(L.swMask({elems[i], elems[j]}))) {
                int v = L.pg.at(elems[i], elems[j]);
                if (v < 0 || toNew[v] < 0)
                    throw InvariantViolation("restricted domain product undefined");
                R.pg.define(int(i), int(j), toNew[v]);
            }
        }
    R.S = Bitset(R.pg.size);
    L.S.forEach([&](int x) {
        if (toNew[x] >= 0) R.S.set(toNew[x]);
        else throw InvariantViolation("S fell outside the restriction");
    });
    for (fus::Mask m : d0) {
        Bitset P(R.pg.size);
        for (int x : fus::melems(m)) P.set(toNew[L.StoL[x]]);
        R.Delta.push_back(P);
    }
    buildLocalityCaches(R);
    if (toOld) *toOld = elems;
    return R;
}

/// Splits g = nf with n in N and f in N_L(T), T = N∩S, preserving S_g. The
/// existence is guaranteed for partial normal N; search failure means the
/// input locality is broken.
inline std::pair<int, int> frattiniSplit(const Locality& L, const Bitset& N, int g) {
    if (!isPartialNormal(L, N)) throw std::invalid_argument("N is not partial normal");
    Bitset T = N & L.S;
    Bitset NT = normalizerP(L, T);
    fus::Mask sg = L.SfMask[g];
    std::vector<int> nm = N.indices();
    for (int n : nm)
        for (int f = 0; f < L.pg.size; ++f) {
            if (!NT.test(f) || !L.pg.has(n, f)) continue;
            if (L.pg.at(n, f) != g) continue;
            if (L.swMask({n, f}) == sg) return {n, f};
        }
    throw InvariantViolation("no Frattini splitting found; the locality is inconsistent");
}

} // namespace loctool::ploc
