#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "loctool/group.hpp"

namespace loctool::fus {

// Subgroups of S are 32-bit masks; |S| <= 32 is a hard representation limit.
using Mask = uint32_t;
using Images = std::vector<uint8_t>; // images of domain elements in index order

inline bool mtest(Mask m, int e) { return (m >> e) & 1; }
inline int mcount(Mask m) { return __builtin_popcount(m); }
inline int mpos(Mask m, int e) { return __builtin_popcount(m & ((Mask{1} << e) - 1)); }

inline std::vector<int> melems(Mask m) {
    std::vector<int> v;
    v.reserve(mcount(m));
    while (m) {
        v.push_back(__builtin_ctz(m));
        m &= m - 1;
    }
    return v;
}

inline Mask mclose(const grp::FiniteGroup& S, Mask m) {
    Mask r = m | 1; // identity is element 0
    for (;;) {
        Mask grown = r;
        for (Mask a = r; a;) {
            int x = __builtin_ctz(a);
            a &= a - 1;
            grown |= Mask{1} << S.inv[x];
            for (Mask b = r; b;) {
                int y = __builtin_ctz(b);
                b &= b - 1;
                grown |= Mask{1} << S.mul(x, y);
            }
        }
        if (grown == r) return r;
        r = grown;
    }
}

inline bool misSubgroup(const grp::FiniteGroup& S, Mask m) {
    return m && (m & 1) && mclose(S, m) == m;
}

inline Mask mjoin(const grp::FiniteGroup& S, Mask a, Mask b) { return mclose(S, a | b); }

inline Mask mconj(const grp::FiniteGroup& S, Mask m, int g) {
    Mask r = 0;
    for (Mask a = m; a;) {
        int x = __builtin_ctz(a);
        a &= a - 1;
        r |= Mask{1} << S.conj(x, g);
    }
    return r;
}

inline Mask mnormalizer(const grp::FiniteGroup& S, Mask m, Mask within) {
    Mask r = 0;
    for (Mask a = within; a;) {
        int g = __builtin_ctz(a);
        a &= a - 1;
        if (mconj(S, m, g) == m) r |= Mask{1} << g;
    }
    return r;
}

inline Mask mcentralizer(const grp::FiniteGroup& S, Mask m, Mask within) {
    Mask r = 0;
    for (Mask a = within; a;) {
        int g = __builtin_ctz(a);
        a &= a - 1;
        bool c = true;
        for (Mask b = m; c && b;) {
            int x = __builtin_ctz(b);
            b &= b - 1;
            if (S.conj(x, g) != x) c = false;
        }
        if (c) r |= Mask{1} << g;
    }
    return r;
}

// ---------------------------------------------------------------------------
// morphisms

inline int mapApply(Mask dom, const Images& im, int x) { return im[mpos(dom, x)]; }

inline Mask mapImage(const Images& im) {
    Mask r = 0;
    for (uint8_t y : im) r |= Mask{1} << y;
    return r;
}

/// c_g restricted to dom: x -> g^-1 x g.
inline Images conjImages(const grp::FiniteGroup& S, Mask dom, int g) {
    Images im;
    im.reserve(mcount(dom));
    for (int x : melems(dom)) im.push_back(uint8_t(S.conj(x, g)));
    return im;
}

inline Images restrictImages(Mask dom, const Images& im, Mask sub) {
    Images r;
    r.reserve(mcount(sub));
    for (int x : melems(sub)) r.push_back(im[mpos(dom, x)]);
    return r;
}

/// Inverse of the corestriction to the image: (imageMask, preimages).
inline std::pair<Mask, Images> invertImages(Mask dom, const Images& im) {
    Mask img = mapImage(im);
    Images r(mcount(img));
    auto de = melems(dom);
    for (size_t i = 0; i < de.size(); ++i) r[mpos(img, im[i])] = uint8_t(de[i]);
    return {img, r};
}

/// Injective homomorphism test for an image vector on a subgroup mask.
inline bool isInjectiveHomImages(const grp::FiniteGroup& S, Mask dom, const Images& im) {
    auto de = melems(dom);
    if (im.size() != de.size()) return false;
    Mask img = mapImage(im);
    if (mcount(img) != int(im.size())) return false; // injective
    for (size_t i = 0; i < de.size(); ++i)
        for (size_t j = 0; j < de.size(); ++j) {
            int xy = S.mul(de[i], de[j]);
            if (!mtest(dom, xy)) return false; // not closed: not a subgroup
            if (im[mpos(dom, xy)] != S.mul(im[i], im[j])) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// fusion systems

/// A fusion system over the p-group `universe` <= S, stored exhaustively: for
/// every subgroup P of the universe, homs[P] holds every F-morphism P -> U as
/// an image vector. Restriction-, composition-, inverse- and inner-closure
/// hold by construction. Immutable once built.
struct FusionSystem {
    int p = 2;
    std::shared_ptr<const grp::FiniteGroup> S; // full ambient p-group table
    Mask universe = 0;
    std::vector<Mask> subs; // subgroups of universe, ordered (order, mask)
    std::map<Mask, std::set<Images>> homs;

    long long morphismCount() const {
        long long c = 0;
        for (const auto& [d, s] : homs) c += (long long)s.size();
        return c;
    }
    const std::set<Images>& at(Mask P) const {
        static const std::set<Images> empty;
        auto it = homs.find(P);
        return it == homs.end() ? empty : it->second;
    }
    bool contains(Mask dom, const Images& im) const {
        auto it = homs.find(dom);
        return it != homs.end() && it->second.count(im) > 0;
    }
    bool sameSystem(const FusionSystem& o) const {
        return p == o.p && S->mult == o.S->mult && universe == o.universe && homs == o.homs;
    }
};

inline std::vector<Mask> subgroupMasksOf(const grp::FiniteGroup& S, Mask universe) {
    auto all = grp::enumerateSubgroups(S);
    std::vector<Mask> out;
    for (const auto& b : all) {
        Mask m = 0;
        b.forEach([&](int i) { m |= Mask{1} << i; });
        if ((m & universe) == m) out.push_back(m);
    }
    // enumerateSubgroups already sorts by (order, mask)
    return out;
}

/// Smallest fusion system over `universe` containing `gens`: closure under
/// inner fusion of the universe, restriction, composition and inversion of
/// isomorphisms onto the image.
inline FusionSystem fusionClosureWithin(int p, std::shared_ptr<const grp::FiniteGroup> S,
                                        Mask universe,
                                        const std::vector<std::pair<Mask, Images>>& gens,
                                        const RunConfig& cfg = globalConfig()) {
    const grp::FiniteGroup& T = *S;
    if (T.n > cfg.fusionWidthCap || T.n > 32)
        throw CapExceeded("fusion systems require |S| <= " + std::to_string(std::min(cfg.fusionWidthCap, 32)));
    if (!grp::isPPower(mcount(universe), p) || !misSubgroup(T, universe))
        throw std::invalid_argument("universe must be a p-subgroup");

    FusionSystem F;
    F.p = p;
    F.S = S;
    F.universe = universe;
    F.subs = subgroupMasksOf(T, universe);

    std::map<Mask, std::vector<std::pair<Mask, Images>>> byImage;
    std::vector<std::pair<Mask, Images>> work;
    long long total = 0;

    auto insert = [&](Mask dom, Images im) -> void {
        auto& slot = F.homs[dom];
        if (slot.count(im)) return;
        if (++total > cfg.morphismCap)
            throw CapExceeded("fusion closure exceeds morphism cap " + std::to_string(cfg.morphismCap));
        byImage[mapImage(im)].push_back({dom, im});
        slot.insert(im);
        work.push_back({dom, std::move(im)});
    };

    // inner fusion of the universe
    for (Mask P : F.subs) {
        for (Mask a = universe; a;) {
            int u = __builtin_ctz(a);
            a &= a - 1;
            if ((mconj(T, P, u) & universe) == mconj(T, P, u)) insert(P, conjImages(T, P, u));
        }
    }
    for (const auto& [dom, im] : gens) {
        if ((dom & universe) != dom || (mapImage(im) & universe) != mapImage(im))
            throw std::invalid_argument("generator is not a map between subgroups of the universe");
        if (!misSubgroup(T, dom) || !isInjectiveHomImages(T, dom, im))
            throw std::invalid_argument("generator is not an injective homomorphism on a subgroup");
        insert(dom, im);
    }

    while (!work.empty()) {
        auto [dom, im] = work.back();
        work.pop_back();
        // restrictions to proper subgroups
        for (Mask Q : F.subs) {
            if (Q != dom && (Q & dom) == Q) insert(Q, restrictImages(dom, im, Q));
        }
        // inverse of the corestriction
        auto [img, pre] = invertImages(dom, im);
        insert(img, pre);
        // compositions with exactly matching domains/images
        if (auto it = F.homs.find(img); it != F.homs.end()) {
            for (const Images& psi : std::set<Images>(it->second)) {
                Images comp(im.size());
                for (size_t i = 0; i < im.size(); ++i) comp[i] = psi[mpos(img, im[i])];
                insert(dom, std::move(comp));
            }
        }
        if (auto it = byImage.find(dom); it != byImage.end()) {
            auto snapshot = it->second;
            for (const auto& [d2, im2] : snapshot) {
                Images comp(im2.size());
                for (size_t i = 0; i < im2.size(); ++i) comp[i] = im[mpos(dom, im2[i])];
                insert(d2, std::move(comp));
            }
        }
    }
    return F;
}

/// F_S(G): morphisms are exactly the conjugation maps c_g between subgroups
/// of the Sylow p-subgroup S. The store is closed as built; no fixpoint loop.
struct GroupFusion {
    FusionSystem F;
    grp::SubgroupGroup emb; // reindexing of S inside G
};

inline GroupFusion fusionFromGroup(const grp::FiniteGroup& G, const Bitset& Smask, int p,
                                   const RunConfig& cfg = globalConfig()) {
    if (!grp::isSubgroupMask(G, Smask)) throw std::invalid_argument("S is not a subgroup");
    if (Smask.count() != grp::pPart(G.n, p))
        throw std::invalid_argument("S is not a Sylow p-subgroup of G");
    GroupFusion out;
    out.emb = grp::subgroupGroup(G, Smask, G.name + "-sylow" + std::to_string(p));
    auto Sp = std::make_shared<grp::FiniteGroup>(out.emb.group);
    const grp::FiniteGroup& T = *Sp;
    if (T.n > cfg.fusionWidthCap || T.n > 32) throw CapExceeded("fusion systems require |S| <= 32");

    FusionSystem F;
    F.p = p;
    F.S = Sp;
    F.universe = T.n == 32 ? ~Mask{0} : (Mask{1} << T.n) - 1;
    F.subs = subgroupMasksOf(T, F.universe);

    long long total = 0;
    for (int g = 0; g < G.n; ++g) {
        // partial conjugation map S -> S in subgroup coordinates
        Mask defined = 0;
        std::vector<int> img(T.n, -1);
        for (int x = 0; x < T.n; ++x) {
            int y = G.conj(out.emb.toParent[x], g);
            if (out.emb.fromParent[y] >= 0) {
                defined |= Mask{1} << x;
                img[x] = out.emb.fromParent[y];
            }
        }
        for (Mask P : F.subs) {
            if ((P & defined) != P) continue;
            Images im;
            im.reserve(mcount(P));
            for (int x : melems(P)) im.push_back(uint8_t(img[x]));
            auto& slot = F.homs[P];
            if (slot.insert(std::move(im)).second && ++total > cfg.morphismCap)
                throw CapExceeded("morphism store exceeds cap");
        }
    }
    out.F = std::move(F);
    return out;
}

/// Exact Hom_F(P,Q): stored morphisms with domain P and image inside Q.
inline std::vector<Images> homSet(const FusionSystem& F, Mask P, Mask Q) {
    if ((P & F.universe) != P || !misSubgroup(*F.S, P))
        throw std::invalid_argument("homSet: P is not a subgroup of the universe");
    if ((Q & F.universe) != Q || !misSubgroup(*F.S, Q))
        throw std::invalid_argument("homSet: Q is not a subgroup of the universe");
    std::vector<Images> out;
    for (const Images& im : F.at(P))
        if ((mapImage(im) & Q) == mapImage(im)) out.push_back(im);
    return out;
}

/// Relabels a fusion system along a group isomorphism S -> S2 given on
/// element indices.
inline FusionSystem transportFusion(const FusionSystem& F,
                                    std::shared_ptr<const grp::FiniteGroup> S2,
                                    const std::vector<int>& idxMap) {
    const grp::FiniteGroup& A = *F.S;
    const grp::FiniteGroup& B = *S2;
    if (A.n != B.n || int(idxMap.size()) != A.n)
        throw std::invalid_argument("transport requires equal-order groups");
    for (int x = 0; x < A.n; ++x)
        for (int y = 0; y < A.n; ++y)
            if (idxMap[A.mul(x, y)] != B.mul(idxMap[x], idxMap[y]))
                throw std::invalid_argument("transport map is not an isomorphism");
    auto mapMask = [&](Mask m) {
        Mask r = 0;
        for (int x : melems(m)) r |= Mask{1} << idxMap[x];
        return r;
    };
    FusionSystem out;
    out.p = F.p;
    out.S = S2;
    out.universe = mapMask(F.universe);
    for (Mask m : F.subs) out.subs.push_back(mapMask(m));
    std::sort(out.subs.begin(), out.subs.end(), [](Mask a, Mask b) {
        if (mcount(a) != mcount(b)) return mcount(a) < mcount(b);
        return a < b;
    });
    for (const auto& [dom, maps] : F.homs) {
        Mask dom2 = mapMask(dom);
        auto& slot = out.homs[dom2];
        auto de2 = melems(dom2);
        for (const Images& im : maps) {
            Images im2(de2.size());
            for (size_t i = 0; i < de2.size(); ++i) {
                // preimage of the i-th element of dom2
                int x2 = de2[i];
                int x1 = -1;
                for (int x : melems(dom))
                    if (idxMap[x] == x2) { x1 = x; break; }
                im2[i] = uint8_t(idxMap[im[mpos(dom, x1)]]);
            }
            slot.insert(std::move(im2));
        }
    }
    return out;
}

/// The fusion system generated by all of F's morphisms between members of
/// `objects` (inner fusion of the universe always included).
inline FusionSystem generatedBy(const FusionSystem& F, const std::vector<Mask>& objects,
                                const RunConfig& cfg = globalConfig()) {
    std::vector<std::pair<Mask, Images>> gens;
    std::set<Mask> objs(objects.begin(), objects.end());
    for (Mask P : objects) {
        for (const Images& im : F.at(P)) {
            Mask img = mapImage(im);
            for (Mask Q : objs) {
                if ((img & Q) == img) {
                    gens.push_back({P, im});
                    break;
                }
            }
        }
    }
    return fusionClosureWithin(F.p, F.S, F.universe, gens, cfg);
}

} // namespace loctool::fus
