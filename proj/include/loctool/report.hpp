#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <json.hpp>

namespace loctool {

using Json = nlohmann::ordered_json;

enum class Verdict { Pass, Fail, NA };

inline const char* verdictName(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "na";
    }
}

struct Clause {
    std::string name;
    Verdict verdict = Verdict::NA;
    Json witness; // null when there is nothing to show
    bool outOfScope = false; // an explicit skip marker, not a precondition failure
};

/// Structured verdict object shared by all theorem/validator checks.
struct Report {
    std::string theorem;
    std::vector<Clause> clauses;
    bool consistent = true;
    long long timing_ms = 0;

    Clause& add(const std::string& name, Verdict v, Json witness = nullptr) {
        clauses.push_back({name, v, std::move(witness)});
        if (v == Verdict::Fail) consistent = false;
        return clauses.back();
    }
    Clause& pass(const std::string& name, Json w = nullptr) { return add(name, Verdict::Pass, std::move(w)); }
    Clause& fail(const std::string& name, Json w = nullptr) { return add(name, Verdict::Fail, std::move(w)); }
    Clause& na(const std::string& name, Json w = nullptr) { return add(name, Verdict::NA, std::move(w)); }
    Clause& skip(const std::string& name, Json w = nullptr) {
        auto& c = add(name, Verdict::NA, std::move(w));
        c.outOfScope = true;
        return c;
    }

    bool allPass() const {
        for (const auto& c : clauses)
            if (c.verdict != Verdict::Pass) return false;
        return consistent;
    }
    bool anyFail() const {
        for (const auto& c : clauses)
            if (c.verdict == Verdict::Fail) return true;
        return !consistent;
    }
    bool anyNA() const {
        for (const auto& c : clauses)
            if (c.verdict == Verdict::NA && !c.outOfScope) return true;
        return false;
    }

    /// 0 pass, 1 fail, 2 not-applicable.
    int exitCode() const {
        if (anyFail()) return 1;
        if (anyNA()) return 2;
        return 0;
    }

    Json toJson() const {
        Json j;
        j["theorem"] = theorem;
        j["clauses"] = Json::array();
        for (const auto& c : clauses) {
            Json cj;
            cj["name"] = c.name;
            cj["verdict"] = verdictName(c.verdict);
            cj["witness"] = c.witness;
            j["clauses"].push_back(cj);
        }
        j["consistent"] = consistent;
        j["timing_ms"] = timing_ms;
        return j;
    }
};

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    long long ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace loctool
