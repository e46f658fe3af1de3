#pragma once

#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>

namespace loctool {

/// Thrown when a configured resource cap would be exceeded. Callers that need
/// a graceful "input too large" path (the CLI) catch this separately from
/// logic errors.
class CapExceeded : public std::runtime_error {
public:
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a structural guarantee fails on input that passed its
/// preconditions. Signals a broken instance (or a bug), never a negative
/// verdict.
class InvariantViolation : public std::runtime_error {
public:
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    int p = 2;
    int groupOrderCap = 512;        // elements in one multiplication table
    long long morphismCap = 2'000'000; // stored morphisms per fusion system
    int validationDepth = 4;        // word length for partial-group axiom scans
    int fusionWidthCap = 32;        // hard representation limit on |S|
    std::string outPath;
    unsigned seed = 0;              // reserved; no algorithm consumes randomness
    int verbosity = 0;

    void check() const {
        if (groupOrderCap <= 0 || morphismCap <= 0 || validationDepth <= 0)
            throw std::invalid_argument("caps must be positive");
        if (fusionWidthCap > 32)
            throw std::invalid_argument("fusion systems are limited to |S| <= 32");
    }

    /// Applies LOCTOOL_CAPS, a comma-separated k=v list, e.g.
    /// "group_order=512,morphisms=2000000,depth=4".
    void applyEnv() {
        const char* env = std::getenv("LOCTOOL_CAPS");
        if (!env) return;
        std::stringstream ss(env);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos) continue;
            std::string key = item.substr(0, eq);
            long long val = std::stoll(item.substr(eq + 1));
            if (key == "group_order") groupOrderCap = int(val);
            else if (key == "morphisms") morphismCap = val;
            else if (key == "depth") validationDepth = int(val);
            else throw std::invalid_argument("unknown LOCTOOL_CAPS key: " + key);
        }
        check();
    }
};

inline RunConfig& globalConfig() {
    static RunConfig cfg;
    return cfg;
}

} // namespace loctool
