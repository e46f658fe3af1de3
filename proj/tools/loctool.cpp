// loctool: exact computations with fusion systems and localities.
//
//   loctool catalog [--kind k]
//   loctool check --instance <name|path> --run <check> [--p N] [--out file] [--depth N]
//   loctool suite [--filter name] [--out file]
//
// Exit codes: 0 pass, 1 fail, 2 not-applicable, 3 input error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "loctool/acceptance.hpp"

using namespace loctool;

namespace {

Report saturationReport(const fus::FusionSystem& F) {
    Stopwatch sw;
    Report rep;
    rep.theorem = "saturation";
    bool agree = true;
    bool sat = true;
    for (const auto& rec : fus::classify(F)) {
        bool d = fus::respectsSaturation(F, rec, fus::SaturationMode::Direct);
        bool a = fus::respectsSaturation(F, rec, fus::SaturationMode::Axioms);
        if (d != a) agree = false;
        if (!d) sat = false;
    }
    rep.add("modes-agree", agree ? Verdict::Pass : Verdict::Fail);
    rep.add("saturated", sat ? Verdict::Pass : Verdict::Fail);
    rep.timing_ms = sw.ms();
    return rep;
}

Report classifyCrReport(const fus::FusionSystem& F) {
    Stopwatch sw;
    if (fus::isSaturated(F)) return fus::crAgreesWithClassical(F);
    Report rep;
    rep.theorem = "centric-radical-inclusions";
    auto cls = fus::classicalCrSet(F);
    auto crit = fus::criticalSet(F);
    auto cr = fus::crSet(F);
    bool a = true, b = true;
    for (fus::Mask m : cls)
        if (!crit.count(m)) a = false;
    for (fus::Mask m : crit)
        if (!cr.count(m)) b = false;
    rep.add("classical-inside-critical", a ? Verdict::Pass : Verdict::Fail);
    rep.add("critical-inside-cr", b ? Verdict::Pass : Verdict::Fail);
    rep.na("exact-agreement", Json{{"note", "system is not saturated"}});
    rep.timing_ms = sw.ms();
    return rep;
}

int emitReport(const Report& rep, const std::string& outPath) {
    Json j = rep.toJson();
    std::string text = j.dump(2) + "\n";
    if (!outPath.empty()) {
        std::ofstream out(outPath);
        if (!out) {
            std::cerr << "cannot write " << outPath << "\n";
            return 3;
        }
        out << text;
    }
    std::cout << text;
    return rep.exitCode();
}

int runCheck(const std::string& instanceRef, const std::string& check, const std::string& outPath,
             RunConfig& cfg) {
    cli::Instance inst = cli::resolveInstance(instanceRef, cfg);

    auto needKind = [&](const std::string& kind) {
        if (inst.kind != kind)
            throw std::invalid_argument("check " + check + " needs a " + kind + " instance, got " +
                                        inst.kind);
    };

    if (check == "validate-locality") {
        needKind("locality");
        auto L = cli::localityFromJson(inst.payload, inst.name, cfg);
        return emitReport(ploc::validateLocality(L, cfg), outPath);
    }
    if (check == "saturation") {
        needKind("fusion");
        return emitReport(saturationReport(cli::fusionFromPayload(inst.payload, cfg)), outPath);
    }
    if (check == "classify-cr") {
        needKind("fusion");
        return emitReport(classifyCrReport(cli::fusionFromPayload(inst.payload, cfg)), outPath);
    }
    if (check == "theorem-a") {
        needKind("kernel-instance");
        auto k = cli::kernelFromPayload(inst.payload, inst.name, cfg);
        auto F = ploc::fusionOfLocality(k.L, cfg);
        auto E = ploc::fusionOfPartialSubgroup(k.L, k.N, cfg);
        std::vector<fus::Mask> delta(k.L.deltaMasks.begin(), k.L.deltaMasks.end());
        return emitReport(fus::saturationByCriterion(F, E, delta, cfg), outPath);
    }
    if (check == "theorem-b") {
        needKind("kernel-instance");
        auto k = cli::kernelFromPayload(inst.payload, inst.name, cfg);
        return emitReport(kern::theoremBReport(k.L, k.N, cfg), outPath);
    }
    if (check == "theorem-c") {
        needKind("kernel-instance");
        auto k = cli::kernelFromPayload(inst.payload, inst.name, cfg);
        return emitReport(kern::theoremCReport(k.L, k.N, cfg), outPath);
    }
    if (check == "theta-quotient") {
        needKind("kernel-instance");
        auto k = cli::kernelFromPayload(inst.payload, inst.name, cfg);
        return emitReport(kern::linkingKernelQuotient(k.L, k.N, {}, cfg).report, outPath);
    }
    if (check == "frattini") {
        needKind("kernel-instance");
        auto k = cli::kernelFromPayload(inst.payload, inst.name, cfg);
        return emitReport(kern::frattiniGenerationReport(k.L, k.N, cfg), outPath);
    }
    if (check == "quotient-iso") {
        needKind("kernel-instance");
        auto k = cli::kernelFromPayload(inst.payload, inst.name, cfg);
        return emitReport(kern::quotientIsoReport(k.L, k.N, cfg), outPath);
    }
    if (check == "product-nh") {
        needKind("product-instance");
        auto pd = cli::productFromPayload(inst.payload, inst.name, cfg);
        auto pi = kern::productNH(pd.k.L, pd.k.N, pd.H, pd.Tstar, pd.gammaN, cfg);
        return emitReport(kern::productReport(pi, cfg), outPath);
    }
    throw std::invalid_argument("unknown check: " + check);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact engine for fusion systems and localities"};
    app.require_subcommand(1);

    auto& cfg = globalConfig();
    try {
        cfg.applyEnv();
    } catch (const std::exception& e) {
        std::cerr << "LOCTOOL_CAPS: " << e.what() << "\n";
        return 3;
    }

    std::string kindFilter;
    auto* catalog = app.add_subcommand("catalog", "list built-in instances");
    catalog->add_option("--kind", kindFilter, "group|fusion|locality|kernel-instance|product-instance");

    std::string instanceRef, checkName, outPath;
    int pOverride = 0, depth = 0;
    auto* check = app.add_subcommand("check", "run one check on one instance");
    check->add_option("--instance", instanceRef, "catalog name or JSON file")->required();
    check->add_option("--run", checkName,
                      "validate-locality|saturation|classify-cr|theorem-a|theorem-b|theorem-c|"
                      "theta-quotient|product-nh|frattini|quotient-iso")
        ->required();
    check->add_option("--p", pOverride, "expected prime (validated against the instance)");
    check->add_option("--out", outPath, "write the report JSON here");
    check->add_option("--depth", depth, "word-axiom validation depth");

    std::string filter, suiteOut;
    auto* suite = app.add_subcommand("suite", "run the acceptance criteria");
    suite->add_option("--filter", filter, "run only criteria whose name contains this");
    suite->add_option("--out", suiteOut, "write the machine-readable aggregate here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 3 : 0;
    }

    try {
        if (catalog->parsed()) {
            static const std::set<std::string> kinds{"group", "fusion", "locality",
                                                     "kernel-instance", "product-instance"};
            if (!kindFilter.empty() && !kinds.count(kindFilter)) {
                std::cerr << "unknown kind: " << kindFilter << "\n";
                return 3;
            }
            for (const auto& e : cli::catalogEntries()) {
                if (!kindFilter.empty() && e.kind != kindFilter) continue;
                std::printf("%-14s %-18s %s\n", e.name.c_str(), e.kind.c_str(), e.notes.c_str());
            }
            return 0;
        }
        if (check->parsed()) {
            if (depth > 0) cfg.validationDepth = depth;
            if (pOverride > 0) {
                cli::Instance inst = cli::resolveInstance(instanceRef, cfg);
                if (inst.payload.is_object() && inst.payload.contains("p") &&
                    inst.payload.at("p").get<int>() != pOverride)
                    throw std::invalid_argument("instance prime differs from --p");
            }
            return runCheck(instanceRef, checkName, outPath, cfg);
        }
        if (suite->parsed()) {
            auto results = cli::runAcceptance(filter, cfg);
            bool all = true;
            Json agg = Json::array();
            for (const auto& r : results) {
                std::printf("[%s] %2d %-38s %6lld ms  %s\n", r.pass ? "PASS" : "FAIL", r.number,
                            r.name.c_str(), r.ms, r.detail.c_str());
                all = all && r.pass;
                Json row;
                row["number"] = r.number;
                row["name"] = r.name;
                row["pass"] = r.pass;
                row["timing_ms"] = r.ms;
                row["detail"] = r.detail;
                agg.push_back(row);
            }
            if (!suiteOut.empty()) {
                std::ofstream out(suiteOut);
                out << agg.dump(2) << "\n";
            }
            if (results.empty()) {
                std::cerr << "no criterion matches the filter\n";
                return 3;
            }
            return all ? 0 : 1;
        }
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 1;
    } catch (const Json::exception& e) {
        std::cerr << "malformed JSON: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
