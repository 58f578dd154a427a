#pragma once

// Partial spin flips on product-basis components and the c-/a-balancedness
// classification of a state's support, decided in exact rational arithmetic.

#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tangle_roof/statekit.hpp"

namespace tangle_roof {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Partial spin flips

inline std::string complement(const std::string& bits) {
    std::string out = bits;
    for (char& c : out) c = (c == '0') ? '1' : '0';
    return out;
}

/// Complements every bit of the selected terms (1-based, written order).
/// Coefficients and term order are unchanged.
inline TermList partial_spin_flip(const TermList& terms, const std::set<int>& components) {
    const int count = static_cast<int>(terms.terms.size());
    for (int c : components)
        if (c < 1 || c > count)
            throw IndexError("component " + std::to_string(c) + " outside [1, " + std::to_string(count) + "]");
    TermList out = terms;
    for (int c : components) {
        auto& t = out.terms[static_cast<std::size_t>(c - 1)];
        t.bits = complement(t.bits);
    }
    std::set<std::string> seen;
    for (const auto& t : out.terms)
        if (!seen.insert(t.bits).second) throw CollisionError("flipped component collides with '" + t.bits + "'");
    return out;
}

/// Same, with components enumerated as the state's nonzero terms in index order.
inline PureState partial_spin_flip(const PureState& psi, const std::set<int>& components) {
    return partial_spin_flip(terms_of(psi), components).to_state();
}

// ---------------------------------------------------------------------------
// Balancedness

struct SupportPattern {
    int n_qubits = 0;
    std::vector<std::string> bitvectors;
    std::vector<int> term_order; // 1-based position in the written term list

    static SupportPattern from_terms(const TermList& terms) {
        SupportPattern out;
        out.n_qubits = terms.n_qubits;
        std::set<std::string> seen;
        int pos = 0;
        for (const auto& t : terms.terms) {
            ++pos;
            if (t.amplitude == Complex{0.0, 0.0}) continue;
            if (t.bits.size() != static_cast<std::size_t>(terms.n_qubits)) throw ShapeError("bitstring length mismatch");
            if (!seen.insert(t.bits).second) throw DuplicateTerm("duplicate bitstring '" + t.bits + "'");
            out.bitvectors.push_back(t.bits);
            out.term_order.push_back(pos);
        }
        return out;
    }

    static SupportPattern from_state(const PureState& psi) { return from_terms(terms_of(psi)); }
};

enum class BalanceLabel { c_balanced, a_balanced_only, unbalanced };

inline const char* to_string(BalanceLabel l) {
    switch (l) {
    case BalanceLabel::c_balanced: return "c_balanced";
    case BalanceLabel::a_balanced_only: return "a_balanced_only";
    case BalanceLabel::unbalanced: return "unbalanced";
    }
    return "?";
}

struct BalanceClass {
    BalanceLabel label = BalanceLabel::unbalanced;
    std::vector<Rational> witness; // empty when unbalanced

    std::vector<std::string> witness_strings() const {
        std::vector<std::string> out;
        for (const auto& w : witness)
            out.push_back(numerator(w).str() + "/" + denominator(w).str());
        return out;
    }
};

namespace detail {

using RMatrix = std::vector<std::vector<Rational>>;

// Row k, column j: +1 if term j has a 1 at site k, -1 otherwise.
inline RMatrix spin_matrix(const SupportPattern& s) {
    RMatrix a(static_cast<std::size_t>(s.n_qubits), std::vector<Rational>(s.bitvectors.size()));
    for (std::size_t j = 0; j < s.bitvectors.size(); ++j)
        for (int k = 0; k < s.n_qubits; ++k)
            a[static_cast<std::size_t>(k)][j] = s.bitvectors[j][static_cast<std::size_t>(k)] == '1' ? 1 : -1;
    return a;
}

// Scales to coprime integers with a positive sum (or positive first nonzero
// entry when the sum vanishes).
inline std::vector<Rational> normalize_witness(std::vector<Rational> w) {
    BigInt l = 1, g = 0;
    for (const auto& x : w) l = boost::multiprecision::lcm(l, denominator(x));
    for (auto& x : w) {
        x *= l;
        g = boost::multiprecision::gcd(g, numerator(x));
    }
    if (g != 0)
        for (auto& x : w) x /= Rational(g);
    Rational sum = 0;
    for (const auto& x : w) sum += x;
    bool flip = sum < 0;
    if (sum == 0)
        for (const auto& x : w)
            if (x != 0) {
                flip = x < 0;
                break;
            }
    if (flip)
        for (auto& x : w) x = -x;
    return w;
}

// Phase-I simplex with Bland's rule: is {A v = b, v >= 0} feasible?
inline std::optional<std::vector<Rational>> feasible_nonneg(RMatrix a, std::vector<Rational> b) {
    const std::size_t rows = a.size();
    const std::size_t m = rows ? a[0].size() : 0;
    const std::size_t cols = m + rows; // originals then artificials
    RMatrix t(rows, std::vector<Rational>(cols + 1));
    std::vector<std::size_t> basis(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const bool neg = b[i] < 0;
        for (std::size_t j = 0; j < m; ++j) t[i][j] = neg ? -a[i][j] : a[i][j];
        t[i][m + i] = 1;
        t[i][cols] = neg ? -b[i] : b[i];
        basis[i] = m + i;
    }
    // Reduced costs of minimizing the sum of artificials.
    std::vector<Rational> obj(cols + 1);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j <= cols; ++j)
            if (j < m || j == cols) obj[j] -= t[i][j];

    for (;;) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j)
            if (obj[j] < 0) {
                enter = j;
                break;
            }
        if (enter == cols) break;
        std::size_t leave = rows;
        Rational best;
        for (std::size_t i = 0; i < rows; ++i) {
            if (t[i][enter] <= 0) continue;
            const Rational ratio = t[i][cols] / t[i][enter];
            if (leave == rows || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == rows) break; // unbounded; cannot happen for phase I
        const Rational piv = t[leave][enter];
        for (auto& x : t[leave]) x /= piv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == leave || t[i][enter] == 0) continue;
            const Rational f = t[i][enter];
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[leave][j];
        }
        if (obj[enter] != 0) {
            const Rational f = obj[enter];
            for (std::size_t j = 0; j <= cols; ++j) obj[j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }
    if (obj[cols] != 0) return std::nullopt;
    std::vector<Rational> v(m);
    for (std::size_t i = 0; i < rows; ++i)
        if (basis[i] < m) v[basis[i]] = t[i][cols];
    return v;
}

// Gaussian elimination on [A | b]; free variables set to zero.
inline std::optional<std::vector<Rational>> solve_affine(RMatrix a, std::vector<Rational> b) {
    const std::size_t rows = a.size();
    const std::size_t m = rows ? a[0].size() : 0;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        std::swap(b[p], b[r]);
        const Rational piv = a[r][c];
        for (auto& x : a[r]) x /= piv;
        b[r] /= piv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            const Rational f = a[i][c];
            for (std::size_t j = 0; j < m; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivots.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    std::vector<Rational> w(m);
    for (std::size_t i = 0; i < pivots.size(); ++i) w[pivots[i]] = b[i];
    return w;
}

} // namespace detail

/// c-balanced: some w_j >= 1 makes every site's weighted +-1 sum vanish.
/// a-balanced: some real w with sum 1 does.
inline BalanceClass classify_balance(const SupportPattern& s) {
    if (s.bitvectors.empty()) throw ShapeError("empty support");
    const auto a = detail::spin_matrix(s);
    const std::size_t m = s.bitvectors.size();

    // w = 1 + v, v >= 0  =>  A v = -A 1
    std::vector<Rational> b(a.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t j = 0; j < m; ++j) b[k] -= a[k][j];
    if (auto v = detail::feasible_nonneg(a, b)) {
        for (auto& x : *v) x += 1;
        return {BalanceLabel::c_balanced, detail::normalize_witness(std::move(*v))};
    }

    auto aff = a;
    aff.emplace_back(m, Rational(1));
    std::vector<Rational> rhs(aff.size());
    rhs.back() = 1;
    if (auto w = detail::solve_affine(aff, rhs)) return {BalanceLabel::a_balanced_only, detail::normalize_witness(*w)};
    return {BalanceLabel::unbalanced, {}};
}

inline json to_json(const BalanceClass& c) {
    return {{"label", to_string(c.label)}, {"witness", c.witness_strings()}};
}

} // namespace tangle_roof
