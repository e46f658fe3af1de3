#pragma once

#include <fstream>

#include "loctool/catalog.hpp"

namespace loctool::cli {

// Canonical JSON forms: ordered keys, subgroups as sorted element arrays.
// Saving a loaded instance reproduces the bytes exactly.

inline Json sortedIndices(const Bitset& b) {
    Json a = Json::array();
    for (int x : b.indices()) a.push_back(x);
    return a;
}

inline Bitset maskFromJson(const Json& a, int universe) {
    Bitset b(universe);
    for (const auto& v : a) {
        int x = v.get<int>();
        if (x < 0 || x >= universe) throw std::invalid_argument("element index out of range");
        b.set(x);
    }
    return b;
}

inline Json groupToJson(const grp::FiniteGroup& G) {
    Json j;
    j["name"] = G.name;
    if (!G.permGens.empty()) {
        j["degree"] = int(G.permGens.front().size());
        j["perm_gens"] = Json::array();
        for (const auto& p : G.permGens) j["perm_gens"].push_back(p);
    } else {
        j["order"] = G.n;
        Json rows = Json::array();
        for (int a = 0; a < G.n; ++a) {
            Json row = Json::array();
            for (int b = 0; b < G.n; ++b) row.push_back(G.mul(a, b));
            rows.push_back(row);
        }
        j["mult"] = rows;
    }
    return j;
}

inline grp::FiniteGroup groupFromJson(const Json& j, const RunConfig& cfg = globalConfig()) {
    if (j.is_string()) return makeGroup(j.get<std::string>(), cfg);
    std::string name = j.value("name", "");
    if (j.contains("perm_gens")) {
        int degree = j.at("degree").get<int>();
        std::vector<grp::Perm> gens;
        for (const auto& p : j.at("perm_gens")) gens.push_back(p.get<grp::Perm>());
        return grp::buildGroupFromPerms(gens, degree, name, cfg);
    }
    auto table = j.at("mult").get<std::vector<std::vector<int>>>();
    if (j.contains("order") && int(table.size()) != j.at("order").get<int>())
        throw std::invalid_argument("declared order does not match the table");
    return grp::buildGroupFromTable(table, name, cfg);
}

inline Json localityToJson(const ploc::Locality& L) {
    Json j;
    j["p"] = L.p;
    j["elements"] = L.pg.size;
    j["unit"] = L.pg.unit;
    j["inv"] = L.pg.inv;
    Json pairs = Json::array();
    for (int f = 0; f < L.pg.size; ++f)
        for (int g = 0; g < L.pg.size; ++g)
            if (L.pg.has(f, g)) pairs.push_back(Json::array({f, g, L.pg.at(f, g)}));
    j["pairs"] = pairs;
    j["S"] = sortedIndices(L.S);
    Json delta = Json::array();
    for (const auto& P : L.Delta) delta.push_back(sortedIndices(P));
    j["Delta"] = delta;
    return j;
}

inline ploc::Locality localityFromJson(const Json& j, const std::string& name = "loaded",
                                       const RunConfig& cfg = globalConfig()) {
    int p = j.at("p").get<int>();
    if (j.contains("from_group")) {
        const Json& fg = j.at("from_group");
        auto G = groupFromJson(fg.at("G"), cfg);
        Bitset S = maskFromJson(fg.at("S"), G.n);
        std::vector<Bitset> delta;
        for (const auto& d : j.at("Delta")) delta.push_back(maskFromJson(d, G.n));
        return ploc::buildLocalityFromGroup(G, S, delta, p, name, cfg);
    }
    ploc::Locality L;
    L.p = p;
    L.name = name;
    L.pg.size = j.at("elements").get<int>();
    if (L.pg.size <= 0 || L.pg.size > cfg.groupOrderCap)
        throw std::invalid_argument("element count outside the configured cap");
    L.pg.unit = j.at("unit").get<int>();
    L.pg.inv = j.at("inv").get<std::vector<int>>();
    if (int(L.pg.inv.size()) != L.pg.size) throw std::invalid_argument("inversion table size mismatch");
    L.pg.pairs.assign(size_t(L.pg.size) * L.pg.size, -1);
    for (const auto& t : j.at("pairs")) {
        int f = t.at(0).get<int>(), g = t.at(1).get<int>(), fg = t.at(2).get<int>();
        if (f < 0 || f >= L.pg.size || g < 0 || g >= L.pg.size || fg < 0 || fg >= L.pg.size)
            throw std::invalid_argument("pair entry out of range");
        L.pg.define(f, g, fg);
    }
    L.S = maskFromJson(j.at("S"), L.pg.size);
    for (const auto& d : j.at("Delta")) L.Delta.push_back(maskFromJson(d, L.pg.size));
    ploc::buildLocalityCaches(L);
    return L;
}

/// Instances: a kind, a canonical payload, provenance and free-form notes.
struct Instance {
    std::string name;
    std::string kind; // group | fusion | locality | kernel-instance | product-instance
    std::string provenance = "catalog";
    std::string notes;
    Json payload;
};

inline Json instanceToJson(const Instance& inst) {
    Json j;
    j["name"] = inst.name;
    j["kind"] = inst.kind;
    j["provenance"] = inst.provenance;
    j["notes"] = inst.notes;
    j["payload"] = inst.payload;
    return j;
}

inline std::string saveInstance(const Instance& inst) { return instanceToJson(inst).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// catalog -> canonical instances

inline Instance catalogInstance(const std::string& name, const RunConfig& cfg = globalConfig()) {
    for (const auto& e : catalogEntries()) {
        if (e.name != name) continue;
        Instance inst;
        inst.name = name;
        inst.kind = e.kind;
        inst.notes = e.notes;
        if (e.kind == "group") {
            inst.payload = groupToJson(makeGroup(name, cfg));
        } else if (e.kind == "fusion") {
            auto fi = makeFusion(name, cfg);
            Json j;
            j["p"] = fi.F.p;
            if (!fi.emb.toParent.empty()) {
                Json fg;
                fg["G"] = groupToJson(fi.G);
                Json sarr = Json::array();
                for (int x : fi.emb.toParent) sarr.push_back(x);
                std::sort(sarr.begin(), sarr.end());
                fg["S"] = sarr;
                j["from_group"] = fg;
            } else {
                j["S"] = groupToJson(*fi.F.S);
                // hand-built closures record their generators; the catalog's
                // two closures are regenerated below for canonical output
                Json gens = Json::array();
                if (name == "fus-nonsat-v4") {
                    gens.push_back(Json{{"domain", Json::array({0, 1})},
                                        {"images", Json::array({0, 2})}});
                } else if (name == "fus-nonsat-d8") {
                    int z = permIndex(fi.G, fromCycles(4, {{1, 3}, {2, 4}}));
                    int t = permIndex(fi.G, fromCycles(4, {{1, 3}}));
                    Json dom = Json::array({0, t});
                    std::sort(dom.begin(), dom.end());
                    Json img = Json::array();
                    for (const auto& d : dom) img.push_back(d.get<int>() == 0 ? 0 : z);
                    gens.push_back(Json{{"domain", dom}, {"images", img}});
                }
                j["generators"] = gens;
            }
            inst.payload = j;
        } else if (e.kind == "locality") {
            inst.payload = localityToJson(makeLocality(name, cfg).L);
        } else if (e.kind == "kernel-instance") {
            auto k = makeKernel(name, cfg);
            Json j;
            j["locality"] = localityToJson(k.L);
            j["N"] = sortedIndices(k.N);
            inst.payload = j;
        } else { // product-instance
            auto pspec = makeProduct(name, cfg);
            Json j;
            j["kernel"] = Json{{"locality", localityToJson(pspec.k.L)}, {"N", sortedIndices(pspec.k.N)}};
            j["H"] = sortedIndices(pspec.H);
            j["Tstar"] = sortedIndices(pspec.Tstar);
            inst.payload = j;
        }
        return inst;
    }
    throw std::invalid_argument("unknown catalog instance: " + name);
}

// materializers -------------------------------------------------------------

struct KernelData {
    ploc::Locality L;
    Bitset N;
};

inline KernelData kernelFromPayload(const Json& payload, const std::string& name,
                                    const RunConfig& cfg = globalConfig()) {
    KernelData out;
    out.L = localityFromJson(payload.at("locality"), name, cfg);
    out.N = maskFromJson(payload.at("N"), out.L.pg.size);
    return out;
}

struct ProductData {
    KernelData k;
    Bitset H, Tstar;
    std::optional<std::vector<Bitset>> gammaN;
};

inline ProductData productFromPayload(const Json& payload, const std::string& name,
                                      const RunConfig& cfg = globalConfig()) {
    ProductData out;
    out.k = kernelFromPayload(payload.at("kernel"), name, cfg);
    out.H = maskFromJson(payload.at("H"), out.k.L.pg.size);
    out.Tstar = maskFromJson(payload.at("Tstar"), out.k.L.pg.size);
    if (payload.contains("GammaN")) {
        std::vector<Bitset> g;
        for (const auto& d : payload.at("GammaN")) g.push_back(maskFromJson(d, out.k.L.pg.size));
        out.gammaN = g;
    }
    return out;
}

inline fus::FusionSystem fusionFromPayload(const Json& payload,
                                           const RunConfig& cfg = globalConfig()) {
    int p = payload.at("p").get<int>();
    if (payload.contains("from_group")) {
        auto G = groupFromJson(payload.at("from_group").at("G"), cfg);
        Bitset S = maskFromJson(payload.at("from_group").at("S"), G.n);
        return fus::fusionFromGroup(G, S, p, cfg).F;
    }
    auto Sg = std::make_shared<grp::FiniteGroup>(groupFromJson(payload.at("S"), cfg));
    if (!grp::isPPower(Sg->n, p)) throw std::invalid_argument("S must be a p-group");
    std::vector<std::pair<fus::Mask, fus::Images>> gens;
    for (const auto& g : payload.at("generators")) {
        auto dom = g.at("domain").get<std::vector<int>>();
        auto img = g.at("images").get<std::vector<int>>();
        if (dom.size() != img.size()) throw std::invalid_argument("generator arity mismatch");
        fus::Mask m = 0;
        fus::Images im;
        for (int x : dom) m |= fus::Mask{1} << x;
        for (size_t i = 0; i < dom.size(); ++i) im.push_back(uint8_t(img[i]));
        gens.push_back({m, im});
    }
    fus::Mask full = Sg->n == 32 ? ~fus::Mask{0} : (fus::Mask{1} << Sg->n) - 1;
    return fus::fusionClosureWithin(p, Sg, full, gens, cfg);
}

/// Parses an instance document, materializes it (validation), and rebuilds
/// the payload canonically so that save(load(x)) == canonicalize(x).
inline Instance loadInstance(const Json& j, const RunConfig& cfg = globalConfig()) {
    Instance inst;
    inst.name = j.value("name", "unnamed");
    inst.kind = j.at("kind").get<std::string>();
    inst.provenance = j.value("provenance", "file");
    inst.notes = j.value("notes", "");
    const Json& payload = j.at("payload");
    if (inst.kind == "group") {
        inst.payload = groupToJson(groupFromJson(payload, cfg));
    } else if (inst.kind == "fusion") {
        fusionFromPayload(payload, cfg); // validate
        inst.payload = payload;          // construction data is canonical
    } else if (inst.kind == "locality") {
        inst.payload = localityToJson(localityFromJson(payload, inst.name, cfg));
    } else if (inst.kind == "kernel-instance") {
        auto k = kernelFromPayload(payload, inst.name, cfg);
        if (!kern::isKernel(k.L, k.N)) throw std::invalid_argument("N is not a kernel");
        Json out;
        out["locality"] = localityToJson(k.L);
        out["N"] = sortedIndices(k.N);
        inst.payload = out;
    } else if (inst.kind == "product-instance") {
        auto pdata = productFromPayload(payload, inst.name, cfg);
        Json out;
        out["kernel"] = Json{{"locality", localityToJson(pdata.k.L)}, {"N", sortedIndices(pdata.k.N)}};
        out["H"] = sortedIndices(pdata.H);
        out["Tstar"] = sortedIndices(pdata.Tstar);
        if (pdata.gammaN) {
            Json g = Json::array();
            for (const auto& d : *pdata.gammaN) g.push_back(sortedIndices(d));
            out["GammaN"] = g;
        }
        inst.payload = out;
    } else {
        throw std::invalid_argument("unknown instance kind: " + inst.kind);
    }
    return inst;
}

inline Instance loadInstanceFile(const std::string& path, const RunConfig& cfg = globalConfig()) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    Json j = Json::parse(in);
    return loadInstance(j, cfg);
}

/// Catalog name or file path.
inline Instance resolveInstance(const std::string& ref, const RunConfig& cfg = globalConfig()) {
    for (const auto& e : catalogEntries())
        if (e.name == ref) return catalogInstance(ref, cfg);
    return loadInstanceFile(ref, cfg);
}

} // namespace loctool::cli
