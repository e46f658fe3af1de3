#pragma once

#include "loctool/fusion.hpp"

namespace loctool::fus {

struct MemberFlags {
    bool fullyNormalized = false;
    bool fullyCentralized = false;
    bool fullyAutomized = false;
    bool receptive = false;
};

struct ConjClassRecord {
    Mask rep = 0;
    std::vector<Mask> members;
    std::map<Mask, MemberFlags> flags;
};

inline std::set<Images> autF(const FusionSystem& F, Mask P) {
    std::set<Images> out;
    for (const Images& im : F.at(P))
        if (mapImage(im) == P) out.insert(im);
    return out;
}

inline std::set<Images> autU(const FusionSystem& F, Mask P) {
    std::set<Images> out;
    Mask N = mnormalizer(*F.S, P, F.universe);
    for (Mask a = N; a;) {
        int u = __builtin_ctz(a);
        a &= a - 1;
        out.insert(conjImages(*F.S, P, u));
    }
    return out;
}

/// N_phi = {g in N_U(Q) : phi^-1 c_g phi in Aut_U(P)} for an isomorphism
/// phi : Q -> P given by images over Q.
inline Mask extensionControlMask(const FusionSystem& F, Mask Q, const Images& phi) {
    const grp::FiniteGroup& S = *F.S;
    Mask P = mapImage(phi);
    auto inv = invertImages(Q, phi).second; // images over P
    auto autUP = autU(F, P);
    Mask NQ = mnormalizer(S, Q, F.universe);
    Mask out = 0;
    auto pe = melems(P);
    for (Mask a = NQ; a;) {
        int g = __builtin_ctz(a);
        a &= a - 1;
        Images t;
        t.reserve(pe.size());
        bool ok = true;
        for (int x : pe) {
            int y = S.conj(inv[mpos(P, x)], g); // in Q since g normalizes Q
            if (!mtest(Q, y)) { ok = false; break; }
            t.push_back(phi[mpos(Q, y)]);
        }
        if (ok && autUP.count(t)) out |= Mask{1} << g;
    }
    if (!misSubgroup(S, out) || (Q & out) != Q)
        throw InvariantViolation("extension-control set is not a subgroup over Q");
    return out;
}

/// phi : Q -> P is receptive-compatible if it extends to N_phi inside F.
inline bool extendsToControl(const FusionSystem& F, Mask Q, const Images& phi) {
    Mask Nphi = extensionControlMask(F, Q, phi);
    if (Nphi == Q) return true; // nothing to extend
    for (const Images& psi : F.at(Nphi))
        if (restrictImages(Nphi, psi, Q) == phi) return true;
    return false;
}

inline bool isReceptive(const FusionSystem& F, Mask P, const std::vector<Mask>& classMembers) {
    for (Mask Q : classMembers)
        for (const Images& phi : F.at(Q))
            if (mapImage(phi) == P && !extendsToControl(F, Q, phi)) return false;
    return true;
}

/// All F-conjugacy classes with the four per-member flags. The representative
/// is the least mask among members of maximal normalizer order.
inline std::vector<ConjClassRecord> classify(const FusionSystem& F) {
    const grp::FiniteGroup& S = *F.S;
    std::map<Mask, int> idx;
    for (size_t i = 0; i < F.subs.size(); ++i) idx[F.subs[i]] = int(i);
    std::vector<int> parent(F.subs.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = int(i);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (size_t i = 0; i < F.subs.size(); ++i)
        for (const Images& im : F.at(F.subs[i])) {
            int j = idx.at(mapImage(im));
            parent[find(int(i))] = find(j);
        }
    std::map<int, std::vector<Mask>> groups;
    for (size_t i = 0; i < F.subs.size(); ++i) groups[find(int(i))].push_back(F.subs[i]);

    std::vector<ConjClassRecord> out;
    for (auto& [root, members] : groups) {
        ConjClassRecord rec;
        std::sort(members.begin(), members.end(), [](Mask a, Mask b) {
            if (mcount(a) != mcount(b)) return mcount(a) < mcount(b);
            return a < b;
        });
        rec.members = members;
        int bestNorm = -1, bestCent = -1;
        for (Mask P : members) {
            bestNorm = std::max(bestNorm, mcount(mnormalizer(S, P, F.universe)));
            bestCent = std::max(bestCent, mcount(mcentralizer(S, P, F.universe)));
        }
        for (Mask P : members) {
            MemberFlags f;
            f.fullyNormalized = mcount(mnormalizer(S, P, F.universe)) == bestNorm;
            f.fullyCentralized = mcount(mcentralizer(S, P, F.universe)) == bestCent;
            auto aF = autF(F, P);
            auto aU = autU(F, P);
            f.fullyAutomized = int(aU.size()) == grp::pPart(int(aF.size()), F.p);
            f.receptive = isReceptive(F, P, members);
            rec.flags[P] = f;
        }
        Mask rep = 0;
        for (Mask P : members)
            if (rec.flags[P].fullyNormalized) { rep = P; break; } // least mask, members sorted
        rec.rep = rep;
        out.push_back(std::move(rec));
    }
    std::sort(out.begin(), out.end(), [](const ConjClassRecord& a, const ConjClassRecord& b) {
        if (mcount(a.rep) != mcount(b.rep)) return mcount(a.rep) < mcount(b.rep);
        return a.rep < b.rep;
    });
    return out;
}

enum class SaturationMode { Direct, Axioms };

/// Direct: some member is fully automized and receptive. Axioms: the Sylow
/// axiom (I) and extension axiom (II). The two agree on every class.
inline bool respectsSaturation(const FusionSystem& F, const ConjClassRecord& rec,
                               SaturationMode mode) {
    if (mode == SaturationMode::Direct) {
        for (Mask P : rec.members) {
            const auto& f = rec.flags.at(P);
            if (f.fullyAutomized && f.receptive) return true;
        }
        return false;
    }
    for (Mask P : rec.members) {
        const auto& f = rec.flags.at(P);
        if (f.fullyNormalized && !(f.fullyCentralized && f.fullyAutomized)) return false;
        if (f.fullyCentralized && !f.receptive) return false;
    }
    return true;
}

inline bool isSaturated(const FusionSystem& F) {
    for (const auto& rec : classify(F))
        if (!respectsSaturation(F, rec, SaturationMode::Direct)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// normalizer subsystems and the subgroup families

/// N_F(Q): the fusion system over N_U(Q) whose morphisms extend to Q-normalizing
/// F-maps on the join with Q.
inline FusionSystem normalizerSubsystem(const FusionSystem& F, Mask Q) {
    const grp::FiniteGroup& S = *F.S;
    if ((Q & F.universe) != Q || !misSubgroup(S, Q))
        throw std::invalid_argument("normalizerSubsystem: Q is not a subgroup of the universe");
    FusionSystem N;
    N.p = F.p;
    N.S = F.S;
    N.universe = mnormalizer(S, Q, F.universe);
    for (Mask P : F.subs)
        if ((P & N.universe) == P) N.subs.push_back(P);
    for (Mask A : N.subs) {
        Mask J = mjoin(S, A, Q);
        std::set<Images> slot;
        for (const Images& psi : F.at(J)) {
            bool normQ = true;
            Mask qimg = 0;
            for (int x : melems(Q)) qimg |= Mask{1} << psi[mpos(J, x)];
            normQ = qimg == Q;
            if (!normQ) continue;
            Images r = restrictImages(J, psi, A);
            if ((mapImage(r) & N.universe) != mapImage(r))
                throw InvariantViolation("normalizer subsystem image escapes its universe");
            slot.insert(std::move(r));
        }
        N.homs[A] = std::move(slot);
    }
    return N;
}

/// P is normal in F when every morphism extends to one normalizing P.
inline bool isNormalInFusion(const FusionSystem& F, Mask P) {
    const grp::FiniteGroup& S = *F.S;
    for (const auto& [A, maps] : F.homs) {
        Mask J = mjoin(S, A, P);
        const auto& ext = F.at(J);
        for (const Images& phi : maps) {
            bool found = false;
            for (const Images& psi : ext) {
                Mask pimg = 0;
                for (int x : melems(P)) pimg |= Mask{1} << psi[mpos(J, x)];
                if (pimg == P && restrictImages(J, psi, A) == phi) { found = true; break; }
            }
            if (!found) return false;
        }
    }
    return true;
}

/// Largest subgroup of the universe normal in F.
inline Mask opFusion(const FusionSystem& F) {
    std::vector<Mask> cands = F.subs;
    std::sort(cands.begin(), cands.end(), [](Mask a, Mask b) {
        if (mcount(a) != mcount(b)) return mcount(a) > mcount(b);
        return a < b;
    });
    for (Mask P : cands)
        if (isNormalInFusion(F, P)) return P;
    return 1; // the trivial subgroup is always normal
}

inline std::set<Mask> centricSet(const FusionSystem& F) {
    const grp::FiniteGroup& S = *F.S;
    std::set<Mask> out;
    for (const auto& rec : classify(F)) {
        bool centric = true;
        for (Mask Q : rec.members)
            if ((mcentralizer(S, Q, F.universe) & Q) != mcentralizer(S, Q, F.universe)) {
                centric = false;
                break;
            }
        if (centric)
            for (Mask Q : rec.members) out.insert(Q);
    }
    return out;
}

/// Radical: some fully normalized conjugate Q has O_p(N_F(Q)) = Q.
inline std::set<Mask> radicalSet(const FusionSystem& F) {
    std::set<Mask> out;
    for (const auto& rec : classify(F)) {
        bool radical = false;
        for (Mask Q : rec.members) {
            if (!rec.flags.at(Q).fullyNormalized) continue;
            if (opFusion(normalizerSubsystem(F, Q)) == Q) { radical = true; break; }
        }
        if (radical)
            for (Mask Q : rec.members) out.insert(Q);
    }
    return out;
}

inline std::set<Mask> crSet(const FusionSystem& F) {
    auto c = centricSet(F);
    auto r = radicalSet(F);
    std::set<Mask> out;
    for (Mask m : c)
        if (r.count(m)) out.insert(m);
    return out;
}

/// Cayley table of Aut_F(P) together with the Inn(P) and Aut_U(P) masks.
struct AutGroupData {
    grp::FiniteGroup g;
    std::vector<Images> maps; // element index -> image vector on P
    Bitset inn;
    Bitset fromU;
};

inline AutGroupData autGroupData(const FusionSystem& F, Mask P) {
    const grp::FiniteGroup& S = *F.S;
    auto aset = autF(F, P);
    auto pe = melems(P);
    Images ident;
    for (int x : pe) ident.push_back(uint8_t(x));
    std::vector<Images> maps{ident};
    for (const auto& m : aset)
        if (m != ident) maps.push_back(m);
    std::map<Images, int> pos;
    for (size_t i = 0; i < maps.size(); ++i) pos[maps[i]] = int(i);
    int k = int(maps.size());
    AutGroupData out;
    out.maps = maps;
    out.g.n = k;
    out.g.name = "AutF";
    out.g.mult.resize(size_t(k) * k);
    out.g.inv.resize(k);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            // composition left-to-right: x (ab) = (x a) b
            Images comp(pe.size());
            for (size_t i = 0; i < pe.size(); ++i) comp[i] = maps[b][mpos(P, maps[a][i])];
            auto it = pos.find(comp);
            if (it == pos.end()) throw InvariantViolation("Aut_F(P) is not composition-closed");
            out.g.mult[a * k + b] = it->second;
        }
        auto [img, pre] = invertImages(P, maps[a]);
        out.g.inv[a] = pos.at(pre);
    }
    out.inn = Bitset(k);
    for (int q : pe) out.inn.set(pos.at(conjImages(S, P, q)));
    out.fromU = Bitset(k);
    for (Mask a = mnormalizer(S, P, F.universe); a;) {
        int u = __builtin_ctz(a);
        a &= a - 1;
        out.fromU.set(pos.at(conjImages(S, P, u)));
    }
    return out;
}

/// Critical: centric, and Out_U(Q) meets O_p(Out_F(Q)) trivially for every
/// conjugate Q.
inline std::set<Mask> criticalSet(const FusionSystem& F) {
    auto centr = centricSet(F);
    std::set<Mask> out;
    for (const auto& rec : classify(F)) {
        if (!centr.count(rec.members.front())) continue; // centricity is class-closed
        bool critical = true;
        for (Mask Q : rec.members) {
            auto ag = autGroupData(F, Q);
            auto qg = grp::quotientGroup(ag.g, ag.inn);
            Bitset outU(qg.group.n);
            ag.fromU.forEach([&](int i) { outU.set(qg.proj[i]); });
            Bitset opOut = grp::pCore(qg.group, F.p);
            if ((outU & opOut).count() != 1) { critical = false; break; }
        }
        if (critical)
            for (Mask Q : rec.members) out.insert(Q);
    }
    return out;
}

/// {R centric : O_p(Aut_F(R)) = Inn(R)} — the classical description, equal to
/// crSet on saturated systems.
inline std::set<Mask> classicalCrSet(const FusionSystem& F) {
    auto centr = centricSet(F);
    std::set<Mask> out;
    for (Mask R : centr) {
        auto ag = autGroupData(F, R);
        if (grp::pCore(ag.g, F.p) == ag.inn) out.insert(R);
    }
    return out;
}

inline bool isConstrained(const FusionSystem& F) {
    if (!isSaturated(F)) return false;
    return centricSet(F).count(opFusion(F)) > 0;
}

/// Subcentric: every fully normalized conjugate has constrained normalizer
/// system. Requires a saturated ambient system.
inline std::set<Mask> subcentricSet(const FusionSystem& F) {
    if (!isSaturated(F))
        throw std::invalid_argument("subcentricSet requires a saturated fusion system");
    std::set<Mask> out;
    for (const auto& rec : classify(F)) {
        bool sub = true;
        for (Mask Q : rec.members) {
            if (!rec.flags.at(Q).fullyNormalized) continue;
            if (!isConstrained(normalizerSubsystem(F, Q))) { sub = false; break; }
        }
        if (sub)
            for (Mask Q : rec.members) out.insert(Q);
    }
    return out;
}

inline bool isDeltaGenerated(const FusionSystem& F, const std::vector<Mask>& delta,
                             const RunConfig& cfg = globalConfig()) {
    FusionSystem gen = generatedBy(F, delta, cfg);
    return gen.homs == F.homs;
}

inline bool isDeltaSaturated(const FusionSystem& F, const std::vector<Mask>& delta) {
    std::set<Mask> d(delta.begin(), delta.end());
    for (const auto& rec : classify(F)) {
        bool meets = false;
        for (Mask Q : rec.members)
            if (d.count(Q)) { meets = true; break; }
        if (meets && !respectsSaturation(F, rec, SaturationMode::Direct)) return false;
    }
    return true;
}

} // namespace loctool::fus
