#pragma once
// Generators shared by the property tests.

#include <gmpxx.h>

#include <random>
#include <vector>

#include "ltx/padic.hpp"

namespace gen {

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20240601);
    return g;
}

inline long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng()); }

inline mpz_class big_below(const mpz_class& m) {
    mpz_class x = 0;
    for (int i = 0; i < 8; ++i) x = (x << 60) + mpz_class(std::to_string(rng()() >> 4));
    return x % m;
}

// random element of valuation >= min_digits, known to `digits`
inline ltx::Padic element(ltx::RingPtr R, long digits, long min_digits = 0) {
    std::vector<mpz_class> v(R->dim());
    for (auto& x : v) x = big_below(R->ppow(digits + 2));
    return ltx::Padic::from_coeffs(R, v, min_digits, digits * R->e);
}

inline ltx::Padic unit(ltx::RingPtr R, long digits) {
    while (true) {
        ltx::Padic x = element(R, digits);
        if (!x.is_zero() && x.val == 0) return x;
    }
}

inline std::vector<long> residue_element(ltx::RingPtr R) {
    std::vector<long> r(R->f);
    for (auto& a : r) a = uniform(0, R->p - 1);
    return r;
}

}  // namespace gen
