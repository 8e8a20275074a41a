#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <vector>

namespace gibbsprep {

// Fixed-width bit vector over 64-bit words. Used for Pauli x/z components,
// site sets, and term masks. Width is set at construction and never changes.
class Bits {
public:
    Bits() = default;
    explicit Bits(int n) : n_(n), w_((n + 63) / 64, 0) {}

    static Bits all_set(int n) {
        Bits b(n);
        for (auto& word : b.w_) word = ~uint64_t{0};
        b.trim();
        return b;
    }

    int size() const { return n_; }

    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(int i) { w_[i >> 6] |= uint64_t{1} << (i & 63); }
    void reset(int i) { w_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }

    int count() const {
        int c = 0;
        for (auto word : w_) c += __builtin_popcountll(word);
        return c;
    }
    bool any() const {
        for (auto word : w_) if (word) return true;
        return false;
    }
    bool none() const { return !any(); }

    Bits& operator^=(const Bits& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
        return *this;
    }
    Bits& operator|=(const Bits& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    Bits& operator&=(const Bits& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    friend Bits operator^(Bits a, const Bits& b) { return a ^= b; }
    friend Bits operator|(Bits a, const Bits& b) { return a |= b; }
    friend Bits operator&(Bits a, const Bits& b) { return a &= b; }

    Bits operator~() const {
        Bits r(n_);
        for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = ~w_[i];
        r.trim();
        return r;
    }

    // popcount(a & b) without materializing the intersection
    int and_count(const Bits& o) const {
        int c = 0;
        for (size_t i = 0; i < w_.size(); ++i) c += __builtin_popcountll(w_[i] & o.w_[i]);
        return c;
    }
    bool intersects(const Bits& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }
    bool is_subset_of(const Bits& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    bool operator==(const Bits& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const Bits& o) const { return !(*this == o); }
    bool operator<(const Bits& o) const { return w_ < o.w_; }

    template <typename F>
    void for_each_set(F&& f) const {
        for (size_t i = 0; i < w_.size(); ++i) {
            uint64_t word = w_[i];
            while (word) {
                int b = __builtin_ctzll(word);
                f(static_cast<int>(i * 64 + b));
                word &= word - 1;
            }
        }
    }

    std::vector<int> to_indices() const {
        std::vector<int> out;
        out.reserve(count());
        for_each_set([&](int i) { out.push_back(i); });
        return out;
    }

    static Bits from_indices(int n, const std::vector<int>& idx) {
        Bits b(n);
        for (int i : idx) b.set(i);
        return b;
    }

    size_t hash() const {
        size_t h = 0x9e3779b97f4a7c15ull ^ static_cast<size_t>(n_);
        for (auto word : w_) h = (h ^ word) * 0x100000001b3ull;
        return h;
    }

private:
    void trim() {
        if (n_ % 64 != 0 && !w_.empty())
            w_.back() &= (uint64_t{1} << (n_ % 64)) - 1;
    }

    int n_ = 0;
    std::vector<uint64_t> w_;
};

struct BitsHash {
    size_t operator()(const Bits& b) const { return b.hash(); }
};

} // namespace gibbsprep
