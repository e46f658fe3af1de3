#pragma once

#include "loctool/io.hpp"

namespace loctool::cli {

struct CriterionResult {
    int number = 0;
    std::string name;
    bool pass = false;
    long long ms = 0;
    std::string detail;
};

namespace detail {

inline const std::vector<std::string>& fusionNames() {
    static const std::vector<std::string> v{"fus-s4",  "fus-a4",        "fus-s3",
                                            "fus-d8",  "fus-gl23",      "fus-s5",
                                            "fus-nonsat-v4", "fus-nonsat-d8"};
    return v;
}

inline const std::vector<std::string>& localityNames() {
    static const std::vector<std::string> v{"loc-s4",  "loc-a4",   "loc-s3",   "loc-d8",
                                            "loc-gl23", "loc-s5",  "loc-s5p",  "loc-s4nt",
                                            "loc-c3xs4", "loc-s4xc2", "loc-s4xs3"};
    return v;
}

inline const std::vector<std::string>& kernelNames() {
    static const std::vector<std::string> v{"k-s4",    "k-s4-v4", "k-a4",   "k-gl23",
                                            "k-c3xs4", "k-s4xc2", "k-s4xs3"};
    return v;
}

} // namespace detail

/// Every conjugacy class of every catalog fusion system answers the same in
/// direct mode and in axiom mode.
inline CriterionResult criterionSaturationModes(const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    CriterionResult r{1, "saturation-mode-agreement"};
    int classes = 0;
    for (const auto& name : detail::fusionNames()) {
        auto fi = makeFusion(name, cfg);
        for (const auto& rec : fus::classify(fi.F)) {
            ++classes;
            bool d = fus::respectsSaturation(fi.F, rec, fus::SaturationMode::Direct);
            bool a = fus::respectsSaturation(fi.F, rec, fus::SaturationMode::Axioms);
            if (d != a) {
                r.detail = "mode mismatch in " + name;
                r.ms = sw.ms();
                return r;
            }
        }
    }
    r.pass = true;
    r.detail = std::to_string(classes) + " classes over " +
               std::to_string(detail::fusionNames().size()) + " systems";
    r.ms = sw.ms();
    return r;
}

/// On saturated systems the three descriptions of the centric radicals agree
/// exactly; on the engineered non-saturated ones the inclusion chain holds.
inline CriterionResult criterionCentricRadical(const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    CriterionResult r{2, "centric-radical-agreement"};
    for (const auto& name : detail::fusionNames()) {
        auto fi = makeFusion(name, cfg);
        if (fus::isSaturated(fi.F)) {
            auto rep = fus::crAgreesWithClassical(fi.F);
            if (!rep.allPass()) {
                r.detail = "description mismatch in " + name;
                r.ms = sw.ms();
                return r;
            }
        } else {
            auto cls = fus::classicalCrSet(fi.F);
            auto crit = fus::criticalSet(fi.F);
            auto cr = fus::crSet(fi.F);
            for (fus::Mask m : cls)
                if (!crit.count(m)) {
                    r.detail = "classical not inside critical in " + name;
                    r.ms = sw.ms();
                    return r;
                }
            for (fus::Mask m : crit)
                if (!cr.count(m)) {
                    r.detail = "critical not inside cr in " + name;
                    r.ms = sw.ms();
                    return r;
                }
        }
    }
    r.pass = true;
    r.detail = "saturated systems agree exactly; inclusions hold on the others";
    r.ms = sw.ms();
    return r;
}

/// The saturation criterion verifies all hypotheses on kernel-derived data
/// and its conclusion matches the independent saturation check.
inline CriterionResult criterionSaturationCriterion(const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    CriterionResult r{3, "saturation-criterion"};
    int instances = 0;
    for (const auto& name : detail::kernelNames()) {
        if (name == "k-s4xs3") continue; // covered by the product criterion
        auto k = makeKernel(name, cfg);
        auto F = ploc::fusionOfLocality(k.L, cfg);
        auto E = ploc::fusionOfPartialSubgroup(k.L, k.N, cfg);
        std::vector<fus::Mask> delta(k.L.deltaMasks.begin(), k.L.deltaMasks.end());
        auto rep = fus::saturationByCriterion(F, E, delta, cfg);
        if (!rep.allPass()) {
            r.detail = "hypotheses or conclusion failed on " + name;
            r.ms = sw.ms();
            return r;
        }
        bool sat = fus::isSaturated(F);
        if (!sat) {
            r.detail = "independent saturation check failed on " + name;
            r.ms = sw.ms();
            return r;
        }
        ++instances;
    }
    r.pass = instances >= 3;
    r.detail = std::to_string(instances) + " kernel-derived instances";
    r.ms = sw.ms();
    return r;
}

/// The validator passes every catalog locality and pinpoints each of the
/// three mutation classes with a correct witness.
inline CriterionResult criterionLocalityAxioms(const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    CriterionResult r{4, "locality-axioms"};
    for (const auto& name : detail::localityNames()) {
        auto li = makeLocality(name, cfg);
        auto rep = ploc::validateLocality(li.L, cfg);
        if (!rep.allPass()) {
            r.detail = "validator rejected " + name;
            r.ms = sw.ms();
            return r;
        }
    }

    // mutation 1: delete a defined pair away from S and the unit
    {
        auto li = makeLocality("loc-s5p", cfg);
        auto L = li.L;
        int df = -1, dg = -1;
        for (int f = 1; f < L.pg.size && df < 0; ++f) {
            if (L.S.test(f)) continue;
            for (int g = 1; g < L.pg.size; ++g) {
                if (L.S.test(g) || L.pg.inv[f] == g) continue;
                if (L.pg.has(f, g)) { df = f; dg = g; break; }
            }
        }
        L.pg.pairs[df * L.pg.size + dg] = -1;
        auto rep = ploc::validateLocality(L, cfg);
        bool witnessed = false;
        for (const auto& c : rep.clauses)
            if (c.name == "pairs-match-objects" && c.verdict == Verdict::Fail &&
                c.witness["word"] == Json::array({df, dg}))
                witnessed = true;
        if (!witnessed) {
            r.detail = "deleted pair not witnessed";
            r.ms = sw.ms();
            return r;
        }
    }
    // mutation 2: drop the top object, breaking overgroup closure
    {
        auto li = makeLocality("loc-s4", cfg);
        auto L = li.L;
        std::vector<Bitset> delta;
        for (const auto& P : L.Delta)
            if (P.count() < L.S.count()) delta.push_back(P);
        L.Delta = delta;
        ploc::buildLocalityCaches(L);
        auto rep = ploc::validateLocality(L, cfg);
        bool witnessed = false;
        for (const auto& c : rep.clauses)
            if (c.name == "objects-closed" && c.verdict == Verdict::Fail) witnessed = true;
        if (!witnessed) {
            r.detail = "broken object closure not witnessed";
            r.ms = sw.ms();
            return r;
        }
    }
    // mutation 3: shrink S below a maximal p-subgroup
    {
        auto li = makeLocality("loc-s4", cfg);
        auto L = li.L;
        Bitset v4(L.pg.size);
        grp::pCore(li.G, 2).forEach([&](int x) { v4.set(x); });
        L.S = v4;
        L.Delta = {v4};
        ploc::buildLocalityCaches(L);
        auto rep = ploc::validateLocality(L, cfg);
        bool witnessed = false;
        for (const auto& c : rep.clauses)
            if (c.name == "s-maximal-p-subgroup" && c.verdict == Verdict::Fail &&
                c.witness.contains("extending-element"))
                witnessed = true;
        if (!witnessed) {
            r.detail = "non-maximal S not witnessed";
            r.ms = sw.ms();
            return r;
        }
    }
    r.pass = true;
    r.detail = std::to_string(detail::localityNames().size()) + " localities; 3 mutations caught";
    r.ms = sw.ms();
    return r;
}

/// Maximal cosets partition each kernel instance and the quotient is a group
/// isomorphic to N_L(T)/N_N(T).
inline CriterionResult criterionQuotientIdentity(const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    CriterionResult r{5, "kernel-quotient-group"};
    for (const auto& name : detail::kernelNames()) {
        auto k = makeKernel(name, cfg);
        auto rep = kern::quotientIsoReport(k.L, k.N, cfg);
        if (!rep.allPass()) {
            r.detail = "quotient identity failed on " + name;
            r.ms = sw.ms();
            return r;
        }
    }
    r.pass = true;
    r.detail = std::to_string(detail::kernelNames().size()) + " kernel instances";
    r.ms = sw.ms();
    return r;
}

/// cr-completeness of the ambient locality and of its kernel agree on every
/// instance, and on the positive ones the kernel fusion system is normal.
inline CriterionResult criterionKernelCrEquivalence(const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    CriterionResult r{6, "kernel-cr-equivalence"};
    bool sawNegative = false;
    for (const auto& name : detail::kernelNames()) {
        auto k = makeKernel(name, cfg);
        auto rep = kern::theoremBReport(k.L, k.N, cfg);
        if (!rep.consistent) {
            r.detail = "mixed verdict on " + name;
            r.ms = sw.ms();
            return r;
        }
        bool both = false;
        for (const auto& c : rep.clauses)
            if (c.name == "equivalence" && c.verdict == Verdict::Pass) both = true;
        if (!both) {
            r.detail = "equivalence clause missing on " + name;
            r.ms = sw.ms();
            return r;
        }
        if (name == "k-c3xs4") sawNegative = true; // the engineered negative instance
        bool ambient = false;
        for (const auto& c : rep.clauses)
            if (c.name == "ambient-cr-complete") ambient = c.witness["holds"] == true;
        if (ambient) {
            for (const char* cl : {"kernel-fusion-strongly-closed", "kernel-fusion-invariant",
                                   "kernel-fusion-weakly-normal", "kernel-fusion-normal"}) {
                bool ok = false;
                for (const auto& c : rep.clauses)
                    if (c.name == cl && c.verdict == Verdict::Pass) ok = true;
                if (!ok) {
                    r.detail = std::string("normality clause ") + cl + " failed on " + name;
                    r.ms = sw.ms();
                    return r;
                }
            }
        }
    }
    r.pass = sawNegative && detail::kernelNames().size() >= 3;
    r.detail = std::to_string(detail::kernelNames().size()) +
               " instances incl. the engineered negative";
    r.ms = sw.ms();
    return r;
}

/// The four characteristic-p clauses agree on every instance; the engineered
/// instance is all-false.
inline CriterionResult criterionKernelCharP(const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    CriterionResult r{7, "kernel-characteristic-p-equivalence"};
    for (const auto& name : detail::kernelNames()) {
        auto k = makeKernel(name, cfg);
        auto rep = kern::theoremCReport(k.L, k.N, cfg);
        if (!rep.consistent) {
            r.detail = "mixed verdict on " + name;
            r.ms = sw.ms();
            return r;
        }
        if (name == "k-c3xs4") {
            for (const auto& c : rep.clauses)
                if (c.witness.is_object() && c.witness.contains("holds") &&
                    c.witness["holds"] != false) {
                    r.detail = "engineered instance has a true clause";
                    r.ms = sw.ms();
                    return r;
                }
        }
    }
    r.pass = true;
    r.detail = std::to_string(detail::kernelNames().size()) + " instances incl. the all-false one";
    r.ms = sw.ms();
    return r;
}

/// The p'-core quotient yields a linking kernel, meets S trivially and keeps
/// both fusion systems, on a trivial-core and a nontrivial-core instance.
inline CriterionResult criterionThetaQuotient(const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    CriterionResult r{8, "pprime-core-quotient"};
    struct Want {
        const char* name;
        int thetaSize;
    };
    for (auto [name, thetaSize] : {Want{"k-s4", 1}, Want{"k-c3xs4", 3}, Want{"k-s4xs3", 3}}) {
        auto k = makeKernel(name, cfg);
        auto tq = kern::linkingKernelQuotient(k.L, k.N, {}, cfg);
        if (!tq.quotient || !tq.report.allPass()) {
            r.detail = std::string("pipeline failed on ") + name;
            r.ms = sw.ms();
            return r;
        }
        if (tq.theta.count() != thetaSize) {
            r.detail = std::string("unexpected core size on ") + name;
            r.ms = sw.ms();
            return r;
        }
    }
    r.pass = true;
    r.detail = "trivial and nontrivial p'-cores, fusion preserved";
    r.ms = sw.ms();
    return r;
}

/// The product instances: NH = HN closed, S0 = T(S∩H) = S∩NH Sylow in H~,
/// the product locality is cr-complete with the expected kernel, its fusion
/// system is saturated with the kernel fusion normal, and the linking
/// equivalence holds (positively on S4, negatively on the larger instance).
inline CriterionResult criterionProducts(const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    CriterionResult r{9, "kernel-products"};
    struct Want {
        const char* name;
        bool htildeCharP;
    };
    for (auto [name, expectCharP] : {Want{"prod-s4", true}, Want{"prod-s4xs3", false}}) {
        auto spec = makeProduct(name, cfg);
        auto pi = kern::productNH(spec.k.L, spec.k.N, spec.H, spec.Tstar, {}, cfg);
        if (!pi.product) {
            r.detail = std::string("product not constructed on ") + name;
            r.ms = sw.ms();
            return r;
        }
        if (pi.report.anyFail()) {
            r.detail = std::string("product clause failed on ") + name;
            r.ms = sw.ms();
            return r;
        }
        bool charp = !expectCharP;
        for (const auto& c : pi.report.clauses)
            if (c.name == "linking-equivalence") charp = c.witness["htilde-char-p"] == true;
        if (charp != expectCharP) {
            r.detail = std::string("unexpected linking polarity on ") + name;
            r.ms = sw.ms();
            return r;
        }
        auto consolidated = kern::productReport(pi, cfg);
        if (consolidated.anyFail()) {
            r.detail = std::string("consolidated report failed on ") + name;
            r.ms = sw.ms();
            return r;
        }
    }
    r.pass = true;
    r.detail = "S4 product and the 144-element product";
    r.ms = sw.ms();
    return r;
}

/// F_S(L) is generated by the kernel-times-S fusion and the normalizer of T,
/// by exact store comparison, on every kernel instance.
inline CriterionResult criterionFrattini(const RunConfig& cfg = globalConfig()) {
    Stopwatch sw;
    CriterionResult r{10, "frattini-generation"};
    for (const auto& name : detail::kernelNames()) {
        auto k = makeKernel(name, cfg);
        auto rep = kern::frattiniGenerationReport(k.L, k.N, cfg);
        if (!rep.allPass()) {
            r.detail = "generation failed on " + name;
            r.ms = sw.ms();
            return r;
        }
    }
    r.pass = true;
    r.detail = std::to_string(detail::kernelNames().size()) + " kernel instances, exact equality";
    r.ms = sw.ms();
    return r;
}

inline std::vector<CriterionResult> runAcceptance(const std::string& filter = "",
                                                  const RunConfig& cfg = globalConfig()) {
    struct Entry {
        const char* name;
        CriterionResult (*fn)(const RunConfig&);
    };
    static const Entry entries[] = {
        {"saturation-mode-agreement", criterionSaturationModes},
        {"centric-radical-agreement", criterionCentricRadical},
        {"saturation-criterion", criterionSaturationCriterion},
        {"locality-axioms", criterionLocalityAxioms},
        {"kernel-quotient-group", criterionQuotientIdentity},
        {"kernel-cr-equivalence", criterionKernelCrEquivalence},
        {"kernel-characteristic-p-equivalence", criterionKernelCharP},
        {"pprime-core-quotient", criterionThetaQuotient},
        {"kernel-products", criterionProducts},
        {"frattini-generation", criterionFrattini},
    };
    std::vector<CriterionResult> out;
    for (const auto& e : entries) {
        if (!filter.empty() && std::string(e.name).find(filter) == std::string::npos) continue;
        out.push_back(e.fn(cfg));
    }
    return out;
}

} // namespace loctool::cli
