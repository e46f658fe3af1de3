#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "loctool/bitset.hpp"
#include "loctool/caps.hpp"

namespace loctool::grp {

using Perm = std::vector<int>; // images of 0..deg-1

inline Perm permIdentity(int deg) {
    Perm p(deg);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

inline Perm permCompose(const Perm& a, const Perm& b) { // x -> b[a[x]]
    Perm r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = b[a[i]];
    return r;
}

inline Perm permInverse(const Perm& a) {
    Perm r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[a[i]] = int(i);
    return r;
}

/// 1-based disjoint cycles, e.g. fromCycles(4, {{1,2},{3,4}}) = (12)(34).
inline Perm fromCycles(int deg, const std::vector<std::vector<int>>& cycles) {
    Perm p = permIdentity(deg);
    for (const auto& c : cycles)
        for (size_t i = 0; i < c.size(); ++i)
            p[c[i] - 1] = c[(i + 1) % c.size()] - 1;
    return p;
}

/// Multiplication-table group. Element 0 is the identity; mult is row-major.
struct FiniteGroup {
    int n = 0;
    std::vector<int> mult; // n*n
    std::vector<int> inv;  // n
    std::string name;
    std::vector<Perm> permGens; // present when built from permutations
    std::vector<Perm> elems;    // element -> permutation, same case

    int mul(int a, int b) const { return mult[a * n + b]; }
    int conj(int x, int g) const { return mul(mul(inv[g], x), g); } // g^-1 x g

    int elementOrder(int x) const {
        int o = 1, y = x;
        while (y != 0) { y = mul(y, x); ++o; }
        return o;
    }
};

inline bool isPPower(int m, int p) {
    while (m % p == 0) m /= p;
    return m == 1;
}

inline int pPart(int m, int p) {
    int r = 1;
    while (m % p == 0) { m /= p; r *= p; }
    return r;
}

/// Validates and wraps an explicit multiplication table.
inline FiniteGroup buildGroupFromTable(const std::vector<std::vector<int>>& table,
                                       const std::string& name = "",
                                       const RunConfig& cfg = globalConfig()) {
    int n = int(table.size());
    if (n == 0) throw std::invalid_argument("empty multiplication table");
    if (n > cfg.groupOrderCap) throw CapExceeded("group order " + std::to_string(n) + " exceeds cap");
    FiniteGroup G;
    G.n = n;
    G.name = name;
    G.mult.resize(size_t(n) * n);
    for (int a = 0; a < n; ++a) {
        if (int(table[a].size()) != n) throw std::invalid_argument("multiplication table is not square");
        for (int b = 0; b < n; ++b) {
            int v = table[a][b];
            if (v < 0 || v >= n) throw std::invalid_argument("table entry out of range");
            G.mult[a * n + b] = v;
        }
    }
    for (int a = 0; a < n; ++a)
        if (G.mul(0, a) != a || G.mul(a, 0) != a)
            throw std::invalid_argument("element 0 is not a two-sided identity");
    G.inv.assign(n, -1);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b)
            if (G.mul(a, b) == 0 && G.mul(b, a) == 0) { G.inv[a] = b; break; }
        if (G.inv[a] < 0)
            throw std::invalid_argument("element " + std::to_string(a) + " has no two-sided inverse");
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (G.mul(G.mul(a, b), c) != G.mul(a, G.mul(b, c)))
                    throw std::invalid_argument("multiplication table is not associative at (" +
                                                std::to_string(a) + "," + std::to_string(b) + "," +
                                                std::to_string(c) + ")");
    return G;
}

/// Closes a set of permutations of a common finite set by breadth-first
/// products. The identity gets index 0; discovery order is deterministic.
inline FiniteGroup buildGroupFromPerms(const std::vector<Perm>& gens, int degree,
                                       const std::string& name = "",
                                       const RunConfig& cfg = globalConfig()) {
    for (const auto& g : gens) {
        if (int(g.size()) != degree) throw std::invalid_argument("generator degree mismatch");
        std::vector<char> seen(degree, 0);
        for (int v : g) {
            if (v < 0 || v >= degree || seen[v]) throw std::invalid_argument("generator is not a permutation");
            seen[v] = 1;
        }
    }
    std::vector<Perm> elems{permIdentity(degree)};
    std::map<Perm, int> index{{elems[0], 0}};
    for (size_t i = 0; i < elems.size(); ++i) {
        for (const auto& g : gens) {
            Perm q = permCompose(elems[i], g);
            if (index.emplace(q, int(elems.size())).second) {
                elems.push_back(q);
                if (int(elems.size()) > cfg.groupOrderCap)
                    throw CapExceeded("permutation closure exceeds group order cap " +
                                      std::to_string(cfg.groupOrderCap));
            }
        }
    }
    int n = int(elems.size());
    FiniteGroup G;
    G.n = n;
    G.name = name;
    G.permGens = gens;
    G.elems = elems;
    G.mult.resize(size_t(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            G.mult[a * n + b] = index.at(permCompose(elems[a], elems[b]));
    G.inv.resize(n);
    for (int a = 0; a < n; ++a) G.inv[a] = index.at(permInverse(elems[a]));
    return G;
}

inline int permIndex(const FiniteGroup& G, const Perm& p) {
    for (int i = 0; i < G.n; ++i)
        if (G.elems[i] == p) return i;
    throw std::invalid_argument("permutation not in group");
}

// ---------------------------------------------------------------------------
// subset-mask subgroup computations

inline bool isSubgroupMask(const FiniteGroup& G, const Bitset& m) {
    if (!m.test(0)) return false;
    bool ok = true;
    m.forEach([&](int a) {
        if (!ok) return;
        if (!m.test(G.inv[a])) { ok = false; return; }
        m.forEach([&](int b) {
            if (ok && !m.test(G.mul(a, b))) ok = false;
        });
    });
    return ok;
}

/// Subgroup generated by the elements of m (plus the identity).
inline Bitset closureMask(const FiniteGroup& G, const Bitset& m) {
    Bitset r(G.n);
    r.set(0);
    std::vector<int> elems{0}, queue;
    m.forEach([&](int x) {
        if (!r.test(x)) { r.set(x); elems.push_back(x); queue.push_back(x); }
    });
    while (!queue.empty()) {
        int x = queue.back();
        queue.pop_back();
        int xi = G.inv[x];
        if (!r.test(xi)) { r.set(xi); elems.push_back(xi); queue.push_back(xi); }
        for (size_t i = 0; i < elems.size(); ++i) {
            int y = elems[i];
            for (int z : {G.mul(x, y), G.mul(y, x)}) {
                if (!r.test(z)) { r.set(z); elems.push_back(z); queue.push_back(z); }
            }
        }
    }
    return r;
}

inline Bitset joinMask(const FiniteGroup& G, const Bitset& a, const Bitset& b) {
    return closureMask(G, a | b);
}

inline Bitset conjugateMask(const FiniteGroup& G, const Bitset& m, int g) {
    Bitset r(G.n);
    m.forEach([&](int x) { r.set(G.conj(x, g)); });
    return r;
}

inline Bitset normalizerMask(const FiniteGroup& G, const Bitset& H, const Bitset& within) {
    Bitset r(G.n);
    within.forEach([&](int g) {
        if (conjugateMask(G, H, g) == H) r.set(g);
    });
    return r;
}

inline Bitset centralizerMask(const FiniteGroup& G, const Bitset& H, const Bitset& within) {
    Bitset r(G.n);
    within.forEach([&](int g) {
        bool c = true;
        H.forEach([&](int x) { if (c && G.conj(x, g) != x) c = false; });
        if (c) r.set(g);
    });
    return r;
}

inline bool isNormalIn(const FiniteGroup& G, const Bitset& H, const Bitset& within) {
    return normalizerMask(G, H, within) == within;
}

/// Every subgroup of G, ordered by (order, mask). Exhaustive lattice walk:
/// extend each known subgroup by one outside element and close.
inline std::vector<Bitset> enumerateSubgroups(const FiniteGroup& G,
                                              const RunConfig& cfg = globalConfig()) {
    if (G.n > cfg.groupOrderCap) throw CapExceeded("group order exceeds cap");
    Bitset triv(G.n);
    triv.set(0);
    std::vector<Bitset> out{triv};
    std::map<Bitset, char> seen{{triv, 1}};
    for (size_t i = 0; i < out.size(); ++i) {
        Bitset H = out[i];
        for (int g = 1; g < G.n; ++g) {
            if (H.test(g)) continue;
            Bitset K = H;
            K.set(g);
            K = closureMask(G, K);
            if (seen.emplace(K, 1).second) out.push_back(K);
        }
    }
    std::sort(out.begin(), out.end(), [](const Bitset& a, const Bitset& b) {
        int ca = a.count(), cb = b.count();
        if (ca != cb) return ca < cb;
        return a < b;
    });
    return out;
}

/// One maximal p-subgroup of `within`, grown through normalizers.
inline Bitset sylowOneIn(const FiniteGroup& G, const Bitset& within, int p) {
    Bitset P(G.n);
    P.set(0);
    for (;;) {
        Bitset N = normalizerMask(G, P, within);
        int found = -1;
        N.forEach([&](int g) {
            if (found >= 0 || P.test(g)) return;
            if (isPPower(G.elementOrder(g), p)) found = g;
        });
        if (found < 0) return P;
        Bitset Q = P;
        Q.set(found);
        P = closureMask(G, Q);
    }
}

/// All Sylow p-subgroups (the conjugation orbit of one), sorted by mask.
inline std::vector<Bitset> sylow(const FiniteGroup& G, int p) {
    Bitset S0 = sylowOneIn(G, Bitset::full(G.n), p);
    std::map<Bitset, char> seen;
    std::vector<Bitset> out;
    std::vector<Bitset> queue{S0};
    seen[S0] = 1;
    while (!queue.empty()) {
        Bitset S = queue.back();
        queue.pop_back();
        out.push_back(S);
        for (int g = 0; g < G.n; ++g) {
            Bitset T = conjugateMask(G, S, g);
            if (seen.emplace(T, 1).second) queue.push_back(T);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Largest normal p-subgroup: the intersection of all Sylow p-subgroups.
inline Bitset pCore(const FiniteGroup& G, int p) {
    auto syl = sylow(G, p);
    Bitset r = syl[0];
    for (size_t i = 1; i < syl.size(); ++i) r = r & syl[i];
    if (!isSubgroupMask(G, r) || !isNormalIn(G, r, Bitset::full(G.n)))
        throw InvariantViolation("p-core is not a normal subgroup");
    return r;
}

/// Largest normal subgroup of order coprime to p: the join of the normal
/// closures of all p'-elements whose closure is a p'-group.
inline Bitset pPrimeCore(const FiniteGroup& G, int p) {
    Bitset full = Bitset::full(G.n);
    Bitset r(G.n);
    r.set(0);
    for (int x = 1; x < G.n; ++x) {
        if (G.elementOrder(x) % p == 0) continue;
        Bitset cls(G.n);
        for (int g = 0; g < G.n; ++g) cls.set(G.conj(x, g));
        Bitset ncl = closureMask(G, cls);
        if (ncl.count() % p != 0) r = joinMask(G, r, ncl);
    }
    if (r.count() % p == 0 && G.n > 1)
        throw InvariantViolation("p'-core has order divisible by p");
    if (!isNormalIn(G, r, full)) throw InvariantViolation("p'-core is not normal");
    return r;
}

inline bool isCharacteristicP(const FiniteGroup& G, int p) {
    Bitset Op = pCore(G, p);
    return centralizerMask(G, Op, Bitset::full(G.n)).subsetOf(Op);
}

inline Bitset normalClosureIn(const FiniteGroup& G, const Bitset& within, const Bitset& H) {
    Bitset gens(G.n);
    H.forEach([&](int x) {
        within.forEach([&](int g) { gens.set(G.conj(x, g)); });
    });
    return closureMask(G, gens);
}

/// Wielandt descent: H is subnormal iff iterated normal closures G >= K1 >= ...
/// terminate at H.
inline bool isSubnormal(const FiniteGroup& G, const Bitset& H) {
    Bitset K = Bitset::full(G.n);
    for (;;) {
        Bitset K2 = normalClosureIn(G, K, H);
        if (K2 == K) return K == H;
        K = K2;
    }
}

/// Reindexes a subgroup mask as a standalone group. toParent maps new indices
/// to parent element indices (identity first, then increasing parent index).
struct SubgroupGroup {
    FiniteGroup group;
    std::vector<int> toParent;
    std::vector<int> fromParent; // -1 outside the subgroup
};

inline SubgroupGroup subgroupGroup(const FiniteGroup& G, const Bitset& mask,
                                   const std::string& name = "") {
    if (!isSubgroupMask(G, mask)) throw std::invalid_argument("mask is not a subgroup");
    SubgroupGroup out;
    out.toParent = mask.indices(); // identity (index 0) is already first
    out.fromParent.assign(G.n, -1);
    for (size_t i = 0; i < out.toParent.size(); ++i) out.fromParent[out.toParent[i]] = int(i);
    int k = int(out.toParent.size());
    out.group.n = k;
    out.group.name = name.empty() ? G.name + "-sub" : name;
    out.group.mult.resize(size_t(k) * k);
    out.group.inv.resize(k);
    for (int a = 0; a < k; ++a) {
        out.group.inv[a] = out.fromParent[G.inv[out.toParent[a]]];
        for (int b = 0; b < k; ++b)
            out.group.mult[a * k + b] = out.fromParent[G.mul(out.toParent[a], out.toParent[b])];
    }
    if (!G.elems.empty()) {
        for (int a = 0; a < k; ++a) out.group.elems.push_back(G.elems[out.toParent[a]]);
    }
    return out;
}

/// Factor group by a normal subgroup. proj maps parent elements to quotient
/// indices; quotient elements are cosets canonicalized by least member.
struct QuotientGroup {
    FiniteGroup group;
    std::vector<int> proj;
    std::vector<int> repOf; // quotient index -> least coset member in G
};

inline QuotientGroup quotientGroup(const FiniteGroup& G, const Bitset& N) {
    if (!isSubgroupMask(G, N) || !isNormalIn(G, N, Bitset::full(G.n)))
        throw std::invalid_argument("quotient requires a normal subgroup");
    std::vector<int> rep(G.n, -1);
    std::vector<int> reps;
    for (int x = 0; x < G.n; ++x) {
        if (rep[x] >= 0) continue;
        int least = x;
        std::vector<int> coset;
        N.forEach([&](int n) { coset.push_back(G.mul(n, x)); });
        for (int y : coset) least = std::min(least, y);
        for (int y : coset) rep[y] = least;
        reps.push_back(least);
    }
    std::sort(reps.begin(), reps.end());
    std::vector<int> idxOf(G.n, -1);
    for (size_t i = 0; i < reps.size(); ++i) idxOf[reps[i]] = int(i);
    QuotientGroup out;
    int k = int(reps.size());
    out.repOf = reps;
    out.proj.resize(G.n);
    for (int x = 0; x < G.n; ++x) out.proj[x] = idxOf[rep[x]];
    out.group.n = k;
    out.group.name = G.name + "/" + std::to_string(N.count());
    out.group.mult.resize(size_t(k) * k);
    out.group.inv.resize(k);
    for (int a = 0; a < k; ++a) {
        out.group.inv[a] = out.proj[G.inv[reps[a]]];
        for (int b = 0; b < k; ++b)
            out.group.mult[a * k + b] = out.proj[G.mul(reps[a], reps[b])];
    }
    return out;
}

/// Exhaustive table-isomorphism test for small groups (backtracking on a
/// generating sequence; intended for |A| <= ~64).
inline bool groupsIsomorphic(const FiniteGroup& A, const FiniteGroup& B) {
    if (A.n != B.n) return false;
    std::vector<int> ordA(A.n), ordB(B.n);
    for (int i = 0; i < A.n; ++i) ordA[i] = A.elementOrder(i);
    for (int i = 0; i < B.n; ++i) ordB[i] = B.elementOrder(i);
    {
        auto sa = ordA, sb = ordB;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return false;
    }
    // generating sequence of A
    std::vector<int> gens;
    Bitset gen(A.n);
    gen.set(0);
    while (gen.count() < A.n) {
        for (int x = 0; x < A.n; ++x)
            if (!gen.test(x)) {
                gens.push_back(x);
                Bitset g2 = gen;
                g2.set(x);
                gen = closureMask(A, g2);
                break;
            }
    }
    std::vector<int> img(A.n, -1), pre(B.n, -1);
    img[0] = 0;
    pre[0] = 0;

    // extend the partial map by products once generator images are chosen
    std::function<bool(size_t)> place = [&](size_t gi) -> bool {
        if (gi == gens.size()) return true;
        int g = gens[gi];
        for (int h = 0; h < B.n; ++h) {
            if (pre[h] >= 0 || ordB[h] != ordA[g]) continue;
            auto imgSave = img;
            auto preSave = pre;
            img[g] = h;
            pre[h] = g;
            // close under multiplication; detect conflicts
            bool ok = true;
            std::vector<int> known;
            for (int x = 0; x < A.n; ++x)
                if (img[x] >= 0) known.push_back(x);
            for (size_t i = 0; ok && i < known.size(); ++i)
                for (size_t j = 0; ok && j < known.size(); ++j) {
                    int x = A.mul(known[i], known[j]);
                    int y = B.mul(img[known[i]], img[known[j]]);
                    if (img[x] < 0 && pre[y] < 0) {
                        img[x] = y;
                        pre[y] = x;
                        known.push_back(x);
                    } else if (img[x] != y) {
                        ok = false;
                    }
                }
            if (ok && place(gi + 1)) return true;
            img = imgSave;
            pre = preSave;
        }
        return false;
    };
    return place(0);
}

/// Injective homomorphism between subgroups, stored on the parent's indices.
struct GroupHom {
    Bitset domain;          // subgroup mask in the domain group
    std::vector<int> map;   // images indexed by position in domain.indices()
    bool injective = true;
};

inline bool isHomomorphism(const FiniteGroup& Gdom, const FiniteGroup& Gcod, const GroupHom& h) {
    auto dom = h.domain.indices();
    std::vector<int> at(Gdom.n, -1);
    for (size_t i = 0; i < dom.size(); ++i) at[dom[i]] = h.map[i];
    for (size_t i = 0; i < dom.size(); ++i)
        for (size_t j = 0; j < dom.size(); ++j) {
            int xy = Gdom.mul(dom[i], dom[j]);
            if (at[xy] < 0 || at[xy] != Gcod.mul(h.map[i], h.map[j])) return false;
        }
    return true;
}

} // namespace loctool::grp
