#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <vector>

namespace loctool {

/// Fixed-universe dynamic bit set used as a subset mask over element indices.
/// Comparison treats the mask as an unsigned integer (bit 0 = element 0), so
/// ordering by (count, mask) is deterministic across runs.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(int universe) : n_(universe), w_((universe + 63) / 64, 0) {}

    static Bitset single(int universe, int i) {
        Bitset b(universe);
        b.set(i);
        return b;
    }
    static Bitset full(int universe) {
        Bitset b(universe);
        for (int i = 0; i < universe; ++i) b.set(i);
        return b;
    }
    static Bitset fromIndices(int universe, const std::vector<int>& idx) {
        Bitset b(universe);
        for (int i : idx) b.set(i);
        return b;
    }

    int universe() const { return n_; }
    void set(int i) { w_[i >> 6] |= (uint64_t{1} << (i & 63)); }
    void reset(int i) { w_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

    int count() const {
        int c = 0;
        for (uint64_t w : w_) c += __builtin_popcountll(w);
        return c;
    }
    bool none() const {
        for (uint64_t w : w_) if (w) return false;
        return true;
    }

    bool subsetOf(const Bitset& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }
    bool intersects(const Bitset& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }

    Bitset operator&(const Bitset& o) const {
        Bitset r(n_);
        for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
        return r;
    }
    Bitset operator|(const Bitset& o) const {
        Bitset r(n_);
        for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] | o.w_[i];
        return r;
    }
    Bitset minus(const Bitset& o) const {
        Bitset r(n_);
        for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & ~o.w_[i];
        return r;
    }

    bool operator==(const Bitset& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const Bitset& o) const { return !(*this == o); }

    /// Numeric comparison of the mask value (high word first).
    bool operator<(const Bitset& o) const {
        if (n_ != o.n_) return n_ < o.n_;
        for (size_t i = w_.size(); i-- > 0;)
            if (w_[i] != o.w_[i]) return w_[i] < o.w_[i];
        return false;
    }

    std::vector<int> indices() const {
        std::vector<int> v;
        v.reserve(count());
        for (int i = 0; i < n_; ++i)
            if (test(i)) v.push_back(i);
        return v;
    }

    template <typename F>
    void forEach(F&& f) const {
        for (size_t wi = 0; wi < w_.size(); ++wi) {
            uint64_t w = w_[wi];
            while (w) {
                int b = __builtin_ctzll(w);
                f(int(wi * 64 + b));
                w &= w - 1;
            }
        }
    }

    size_t hash() const {
        size_t h = std::hash<int>{}(n_);
        for (uint64_t w : w_) h = h * 1099511628211ull + std::hash<uint64_t>{}(w);
        return h;
    }

private:
    int n_ = 0;
    std::vector<uint64_t> w_;
};

struct BitsetHash {
    size_t operator()(const Bitset& b) const { return b.hash(); }
};

} // namespace loctool
