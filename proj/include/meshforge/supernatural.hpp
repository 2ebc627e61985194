#pragma once

// Supernatural numbers n = 2^r1 * 3^r2 * 5^r3 * ... with exponents in
// N ∪ {inf}, the additive subgroups Q(n) of rationals c/d with d | n, finite
// equivalence, and the predicates (field / even / pure / scaling group) that
// drive the mesh classification.
//
// Text syntax, used by the CLI and JSON files:
//   "2^inf*3^2*5"  exponents; ^1 may be omitted
//   "Q"            every exponent infinite (the rationals)
//   "1"            trivial group Z

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "meshforge/common.hpp"
#include "meshforge/exact.hpp"

namespace meshforge::sn {

using exact::BigInt;
using exact::Rational;

struct Supernatural {
    std::map<std::uint64_t, std::uint32_t> finite_exponents;  // prime -> r >= 1
    std::set<std::uint64_t> infinite_primes;
    bool all_infinite = false;  // represents Q; both maps empty in that case

    static Supernatural one() { return {}; }
    static Supernatural rationals() {
        Supernatural n;
        n.all_infinite = true;
        return n;
    }
    static Supernatural prime_power(std::uint64_t p, std::uint32_t r) {
        Supernatural n;
        if (r > 0) n.finite_exponents[p] = r;
        return n;
    }
    static Supernatural prime_inf(std::uint64_t p) {
        Supernatural n;
        n.infinite_primes.insert(p);
        return n;
    }

    bool is_trivial() const {
        return !all_infinite && finite_exponents.empty() && infinite_primes.empty();
    }

    friend bool operator==(const Supernatural& n, const Supernatural& m) {
        return n.all_infinite == m.all_infinite && n.finite_exponents == m.finite_exponents &&
               n.infinite_primes == m.infinite_primes;
    }

    // formal product of two supernaturals (exponent-wise sum)
    friend Supernatural operator*(const Supernatural& n, const Supernatural& m) {
        if (n.all_infinite || m.all_infinite) {
            // Q absorbs every finite or p^inf factor
            return rationals();
        }
        Supernatural r = n;
        for (auto p : m.infinite_primes) {
            r.infinite_primes.insert(p);
            r.finite_exponents.erase(p);
        }
        for (auto [p, e] : m.finite_exponents) {
            if (r.infinite_primes.count(p)) continue;
            r.finite_exponents[p] += e;
        }
        return r;
    }

    std::string str() const {
        if (all_infinite) return "Q";
        if (is_trivial()) return "1";
        // merged ascending prime order for a canonical rendering
        std::map<std::uint64_t, std::optional<std::uint32_t>> entries;
        for (auto [p, e] : finite_exponents) entries[p] = e;
        for (auto p : infinite_primes) entries[p] = std::nullopt;
        std::string s;
        for (auto& [p, e] : entries) {
            if (!s.empty()) s += "*";
            s += std::to_string(p);
            if (!e)
                s += "^inf";
            else if (*e != 1)
                s += "^" + std::to_string(*e);
        }
        return s;
    }
};

inline bool is_prime_u64(std::uint64_t p) {
    if (p < 2) return false;
    for (std::uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline Supernatural parse_supernatural(const std::string& text) {
    auto bad = [&]() -> Error { return Error("bad supernatural literal: '" + text + "'"); };
    if (text == "Q" || text == "q") return Supernatural::rationals();
    if (text == "1") return Supernatural::one();
    Supernatural n;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t star = text.find('*', pos);
        std::string tok = text.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
        pos = star == std::string::npos ? text.size() : star + 1;
        if (tok.empty()) throw bad();
        std::string base = tok, exp;
        if (auto caret = tok.find('^'); caret != std::string::npos) {
            base = tok.substr(0, caret);
            exp = tok.substr(caret + 1);
        }
        std::uint64_t p = 0;
        try {
            p = std::stoull(base);
        } catch (const std::exception&) {
            throw bad();
        }
        if (!is_prime_u64(p)) throw Error("not a prime in supernatural literal: " + base);
        if (exp.empty()) {
            n.finite_exponents[p] += 1;
        } else if (exp == "inf") {
            n.infinite_primes.insert(p);
            n.finite_exponents.erase(p);
        } else {
            std::uint32_t e = 0;
            try {
                e = static_cast<std::uint32_t>(std::stoul(exp));
            } catch (const std::exception&) {
                throw bad();
            }
            if (e == 0) throw bad();
            n.finite_exponents[p] += e;
        }
    }
    for (auto p : n.infinite_primes) n.finite_exponents.erase(p);
    return n;
}

// An element of Q(n): a rational in lowest terms (cpp_rational keeps the
// canonical form with positive denominator).
using QElem = Rational;

// true iff q = c/d lies in Q(n): every prime of d divides into n's budget.
// Factoring the denominator is avoided: strip n's own primes, then the
// remainder must be 1.
inline bool contains(const Supernatural& n, const QElem& q) {
    if (n.all_infinite) return true;
    BigInt d = boost::multiprecision::denominator(q);
    for (auto p : n.infinite_primes) {
        BigInt bp(p);
        while (d % bp == 0) d /= bp;
    }
    for (auto [p, r] : n.finite_exponents) {
        BigInt bp(p);
        for (std::uint32_t i = 0; i < r && d % bp == 0; ++i) d /= bp;
    }
    return d == 1;
}

struct EquivalenceResult {
    bool equivalent = false;
    BigInt witness_a = 1, witness_b = 1;          // a * n = b * m when equivalent
    std::optional<std::uint64_t> separating_prime;  // infinite-part mismatch otherwise
};

// Finite equivalence: a*n = b*m for positive integers a, b. With finitely
// many stored primes this holds iff the infinite parts agree exactly; the
// compensating pair (a, b) is accumulated over the finitely many primes
// whose finite exponents differ.
inline EquivalenceResult finitely_equivalent(const Supernatural& n, const Supernatural& m) {
    EquivalenceResult res;
    if (n.all_infinite != m.all_infinite) {
        res.separating_prime = 2;  // every prime separates Q from a non-field
        return res;
    }
    if (n.infinite_primes != m.infinite_primes) {
        for (auto p : n.infinite_primes)
            if (!m.infinite_primes.count(p)) {
                res.separating_prime = p;
                return res;
            }
        for (auto p : m.infinite_primes)
            if (!n.infinite_primes.count(p)) {
                res.separating_prime = p;
                return res;
            }
    }
    res.equivalent = true;
    auto pow_big = [](std::uint64_t p, std::uint32_t e) {
        BigInt r = 1;
        for (std::uint32_t i = 0; i < e; ++i) r *= p;
        return r;
    };
    std::set<std::uint64_t> primes;
    for (auto& [p, e] : n.finite_exponents) primes.insert(p);
    for (auto& [p, e] : m.finite_exponents) primes.insert(p);
    for (auto p : primes) {
        if (n.infinite_primes.count(p)) continue;  // infinite on both sides
        auto en_it = n.finite_exponents.find(p);
        auto em_it = m.finite_exponents.find(p);
        std::uint32_t en = en_it == n.finite_exponents.end() ? 0 : en_it->second;
        std::uint32_t em = em_it == m.finite_exponents.end() ? 0 : em_it->second;
        if (em > en) res.witness_a *= pow_big(p, em - en);
        if (en > em) res.witness_b *= pow_big(p, en - em);
    }
    return res;
}

struct Predicates {
    bool is_field = false;
    bool is_even = false;
    bool is_pure = false;
    bool scaling_trivial = false;
    bool scaling_all_primes = false;             // the case F = Q
    std::vector<std::uint64_t> scaling_primes;   // generators p^{±1} of the scaling group
};

inline Predicates predicates(const Supernatural& n) {
    Predicates r;
    r.is_field = n.all_infinite;
    r.is_even = n.all_infinite || n.infinite_primes.count(2) > 0;
    r.is_pure = !n.all_infinite && n.finite_exponents.empty() && n.infinite_primes.size() == 1;
    r.scaling_all_primes = n.all_infinite;
    r.scaling_primes.assign(n.infinite_primes.begin(), n.infinite_primes.end());
    r.scaling_trivial = !n.all_infinite && n.infinite_primes.empty();
    return r;
}

// k-th term of the canonical divisor chain n_k.  Stored primes contribute
// min(r_p, k); for the all-infinite value we take the first k primes, each
// with exponent k (any choice of chain yields the same mesh, one is fixed
// for reproducibility).
inline BigInt chain_term(const Supernatural& n, std::uint32_t depth) {
    if (depth < 1) throw Error("chain_term: depth must be >= 1");
    auto pow_big = [](std::uint64_t p, std::uint32_t e) {
        BigInt r = 1;
        for (std::uint32_t i = 0; i < e; ++i) r *= p;
        return r;
    };
    BigInt nk = 1;
    if (n.all_infinite) {
        std::uint64_t p = 2;
        for (std::uint32_t taken = 0; taken < depth; ++p) {
            if (!is_prime_u64(p)) continue;
            nk *= pow_big(p, depth);
            ++taken;
        }
        return nk;
    }
    for (auto [p, r] : n.finite_exponents) nk *= pow_big(p, std::min(r, depth));
    for (auto p : n.infinite_primes) nk *= pow_big(p, depth);
    return nk;
}

// Generators of Q(n) ∩ [0,1) at truncation depth: { j / n_depth }.
inline std::vector<QElem> truncate(const Supernatural& n, std::uint32_t depth) {
    BigInt nk = chain_term(n, depth);
    std::vector<QElem> out;
    for (BigInt j = 0; j < nk; ++j) out.emplace_back(j, nk);
    return out;
}

}  // namespace meshforge::sn
