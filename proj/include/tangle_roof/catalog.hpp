#pragma once

// Parametrized constructors for the four-qubit null-cone states, their
// c-balanced parents and the reference W / GHZ states.

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tangle_roof/invariants.hpp"
#include "tangle_roof/nullcone.hpp"
#include "tangle_roof/statekit.hpp"

namespace tangle_roof {

struct CatalogParams {
    std::optional<std::vector<double>> p;      // weights |c_i|^2 in written order
    double eta = 0.0;                          // phase on the family's eta slot
    std::optional<std::vector<double>> phases; // extra per-term phases
};

struct CatalogEntry {
    std::string name;
    std::vector<double> p;
    double eta = 0.0;
    std::vector<double> phases;
    TermList terms; // written order
    PureState state;
    std::string parent;         // empty for parents and reference states
    std::set<int> flipped;      // components of the parent that were flipped
};

namespace detail {

struct CatalogSpec {
    const char* name;
    const char* summary;
    std::vector<std::string> bits; // written order
    std::vector<double> default_p;
    int eta_slot; // 1-based, 0 = none
    const char* parent;
    std::set<int> flipped;
};

inline std::vector<double> psi4_6_weights() { return {1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}; }

inline const std::vector<CatalogSpec>& catalog_specs() {
    static const std::vector<CatalogSpec> specs = [] {
        const double q = (3.0 - std::sqrt(3.0)) / 6.0;
        const std::vector<double> one_flip{2.0 * q * (1.0 - q), (2.0 * q - 1.0) * (2.0 * q - 1.0) / 2.0, 1.0 / 6, 1.0 / 6,
                                           1.0 / 6};
        const std::vector<std::string> b6{"1111", "1000", "0100", "0010", "0001"};
        const std::vector<std::string> b4{"1111", "1100", "0010", "0001"};
        const std::vector<double> quarter(4, 0.25);
        return std::vector<CatalogSpec>{
            {"Psi4_6", "length-6 c-balanced state: |1111>/sqrt3 + sqrt(2/3)|W4>", b6, psi4_6_weights(), 0, "", {}},
            {"Psi4_4", "length-4 c-balanced state: (|1111>+|1100>+|0010>+|0001>)/2", b4, quarter, 0, "", {}},
            {"W3", "three-qubit W state", {"100", "010", "001"}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0, "", {}},
            {"W4", "four-qubit W state", {"1000", "0100", "0010", "0001"}, quarter, 0, "", {}},
            {"GHZ3", "three-qubit GHZ state", {"000", "111"}, {0.5, 0.5}, 0, "", {}},
            {"Psi4_6_1", "Psi4_6 with component 1 flipped", {"0000", "1000", "0100", "0010", "0001"}, psi4_6_weights(),
             0, "Psi4_6", {1}},
            {"Psi4_6_2", "Psi4_6 with component 2 flipped; canonical weights at 1-q = (3+sqrt3)/6",
             {"1111", "0111", "0100", "0010", "0001"}, one_flip, 2, "Psi4_6", {2}},
            {"Psi4_6_23", "Psi4_6 with components 2 and 3 flipped", {"1111", "0111", "1011", "0010", "0001"},
             psi4_6_weights(), 2, "Psi4_6", {2, 3}},
            {"Psi4_4_1", "Psi4_4 with component 1 flipped", {"0000", "1100", "0010", "0001"}, quarter, 4, "Psi4_4", {1}},
            {"Psi4_4_2", "Psi4_4 with component 2 flipped", {"1111", "0011", "0010", "0001"}, quarter, 3, "Psi4_4", {2}},
            {"Psi4_4_4", "Psi4_4 with component 4 flipped", {"1111", "1100", "0010", "1110"}, quarter, 4, "Psi4_4", {4}},
        };
    }();
    return specs;
}

inline const CatalogSpec& find_spec(const std::string& name) {
    for (const auto& s : catalog_specs())
        if (name == s.name) return s;
    throw UnknownState("unknown state '" + name + "'");
}

} // namespace detail

inline std::vector<std::string> catalog_names() {
    std::vector<std::string> out;
    for (const auto& s : detail::catalog_specs()) out.emplace_back(s.name);
    return out;
}

inline std::string catalog_summary(const std::string& name) { return detail::find_spec(name).summary; }

inline CatalogEntry build(const std::string& name, const CatalogParams& params = {}) {
    const auto& spec = detail::find_spec(name);
    const std::size_t count = spec.bits.size();
    const std::vector<double> p = params.p.value_or(spec.default_p);
    if (p.size() != count)
        throw ParamError(name + " takes " + std::to_string(count) + " weights, got " + std::to_string(p.size()));
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw ParamError("weights must be nonnegative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ParamError("weights must sum to 1");
    const std::vector<double> phases = params.phases.value_or(std::vector<double>(count, 0.0));
    if (phases.size() != count) throw ParamError("phases must have one entry per term");

    CatalogEntry e{name, p, params.eta, phases, {static_cast<int>(spec.bits[0].size()), {}}, PureState::basis(1, 0),
                   spec.parent, spec.flipped};
    for (std::size_t i = 0; i < count; ++i) {
        double phase = phases[i];
        if (spec.eta_slot == static_cast<int>(i) + 1) phase += params.eta;
        e.terms.terms.push_back({spec.bits[i], std::polar(std::sqrt(p[i]), phase)});
    }
    e.state = e.terms.to_state();
    return e;
}

/// Canonical one-flip weights parametrized by q: p1 = 4 p_rem q(1-q),
/// p2 = p_rem (2q-1)^2, remaining weight split evenly over the last three terms.
inline std::vector<double> one_flip_weights(double q, double p_rem = 0.5) {
    const auto f = DerivedFamilyParams::from_q(p_rem, q);
    const double rest = (1.0 - p_rem) / 3.0;
    return {f.p1(), f.p2(), rest, rest, rest};
}

/// Uniform (Dirichlet(1,...,1)) draw from the probability simplex.
inline std::vector<double> random_weights(std::size_t k, std::mt19937_64& rng) {
    std::gamma_distribution<double> g(1.0, 1.0);
    std::vector<double> w(k);
    double s = 0.0;
    for (auto& v : w) s += (v = g(rng));
    for (auto& v : w) v /= s;
    // Push the rounding residue into the largest entry so the sum is 1 to ~1 ulp.
    double t = 0.0;
    for (double v : w) t += v;
    *std::max_element(w.begin(), w.end()) += 1.0 - t;
    return w;
}

// ---------------------------------------------------------------------------
// Expected closed-form quantities

struct ExpectedValue {
    double value = 0.0;                  // under this library's conventions
    std::optional<double> printed;       // the literature form, where it differs
    std::string note;
};

struct ExpectedQuantities {
    std::map<int, ExpectedValue> roof_by_trace;     // traced site -> roof of sqrt(tau3)
    std::map<SitePair, ExpectedValue> concurrence;  // pair of kept sites
    std::optional<bool> null_cone;
    std::optional<BalanceLabel> balance;
};

inline ExpectedQuantities expected_quantities(const CatalogEntry& e) {
    ExpectedQuantities x;
    const auto& p = e.p;
    const auto P = [&](int i) { return p[static_cast<std::size_t>(i - 1)]; };
    const auto two_sqrt = [](double a, double b) { return 2.0 * std::sqrt(a * b); };
    const auto all_pairs = [&](double v) {
        for (int i = 1; i <= 4; ++i)
            for (int j = i + 1; j <= 4; ++j) x.concurrence[{i, j}] = {v, std::nullopt, ""};
    };
    const auto zero_roofs = [&](std::initializer_list<int> sites) {
        for (int s : sites) x.roof_by_trace[s] = {0.0, std::nullopt, "no threetangled state in the range"};
    };

    if (e.name == "Psi4_6" || e.name == "Psi4_4") {
        x.null_cone = false;
        x.balance = BalanceLabel::c_balanced;
    } else if (e.name == "W3" || e.name == "W4") {
        x.null_cone = e.name == "W4" ? std::optional<bool>(true) : std::nullopt;
        x.balance = BalanceLabel::unbalanced;
        if (e.name == "W4") {
            zero_roofs({1, 2, 3, 4});
            for (int i = 1; i <= 4; ++i)
                for (int j = i + 1; j <= 4; ++j) x.concurrence[{i, j}] = {two_sqrt(P(i), P(j)), std::nullopt, ""};
        }
    } else if (!e.parent.empty()) {
        x.null_cone = true;
        // a zero weight removes a term from the support
        if (std::all_of(p.begin(), p.end(), [](double v) { return v > 0.0; }))
            x.balance = BalanceLabel::a_balanced_only;
    }

    if (e.name == "Psi4_6_1") {
        zero_roofs({1, 2, 3, 4});
    } else if (e.name == "Psi4_6_2") {
        // Vanishing concurrences are specific to the canonical weights; a generic
        // one-flip draw entangles the pairs among sites 2-4.
        const auto& d = detail::find_spec(e.name).default_p;
        bool canonical = true;
        for (std::size_t i = 0; i < d.size(); ++i) canonical = canonical && std::abs(p[i] - d[i]) < 1e-12;
        if (canonical) all_pairs(0.0);
        const bool canonical_rest = std::abs(P(3) - 1.0 / 6) < 1e-12 && std::abs(P(4) - 1.0 / 6) < 1e-12 &&
                                    std::abs(P(5) - 1.0 / 6) < 1e-12;
        if (canonical_rest) {
            // Eigenvalues of the tr_1 reduction are 1/2 +- sqrt(p2/2) = 1-q, q.
            const double w = std::sqrt(2.0 * P(2));
            const double v = 2.0 / std::pow(3.0, 0.75) * std::pow(w, 1.5);
            x.roof_by_trace[1] = {v, std::nullopt, "(2/3^(3/4)) |2q-1|^(3/2)"};
        }
        x.roof_by_trace[2] = {two_sqrt(P(1), P(3)), std::sqrt(P(1) * P(3)), "linear roof, tr_2"};
        x.roof_by_trace[3] = {two_sqrt(P(1), P(4)), std::nullopt, "linear roof, tr_3"};
        x.roof_by_trace[4] = {two_sqrt(P(1), P(5)), std::nullopt, "linear roof, tr_4"};
    } else if (e.name == "Psi4_6_23") {
        x.roof_by_trace[3] = {two_sqrt(P(1), P(4)), std::sqrt(P(1) * P(4)), "fourfold root, tr_3"};
        x.roof_by_trace[4] = {two_sqrt(P(1), P(5)), std::nullopt, "fourfold root, tr_4"};
        const std::array<int, 4> J{3, 2, 5, 4};
        for (int i = 1; i <= 4; ++i)
            for (int j = i + 1; j <= 4; ++j) {
                const double a = P(J[static_cast<std::size_t>(i - 1)]), b = P(J[static_cast<std::size_t>(j - 1)]);
                x.concurrence[{i, j}] = {two_sqrt(a, b), std::sqrt(2.0 * a * b), "C_ij with J = (3,2,5,4)"};
            }
    } else if (e.name == "Psi4_4_1") {
        zero_roofs({1, 2});
        x.roof_by_trace[3] = {two_sqrt(P(2), P(4)), 0.0, "affine roof, tr_3"};
        x.roof_by_trace[4] = {two_sqrt(P(2), P(3)), 0.0, "affine roof, tr_4"};
    } else if (e.name == "Psi4_4_2") {
        zero_roofs({1, 2});
        x.roof_by_trace[3] = {two_sqrt(P(1), P(3)), std::nullopt, "linear roof, tr_3"};
        x.roof_by_trace[4] = {two_sqrt(P(1), P(4)), std::sqrt(P(1) * P(4)), "linear roof, tr_4"};
    } else if (e.name == "Psi4_4_4") {
        zero_roofs({1, 2});
        x.roof_by_trace[3] = {two_sqrt(P(1), P(3)), std::sqrt(P(1) * P(3)), "linear roof, tr_3"};
        x.roof_by_trace[4] = {two_sqrt(P(2), P(3)), std::nullopt, "linear roof, tr_4"};
        all_pairs(0.0);
        x.concurrence[{1, 2}] = {two_sqrt(P(3), P(4)), std::sqrt(2.0 * P(3) * P(4)), "C_12"};
        x.concurrence[{3, 4}] = {two_sqrt(P(1), P(2)), std::sqrt(2.0 * P(1) * P(2)), "C_34"};
    }
    return x;
}

inline json to_json(const CatalogEntry& e) { return to_json(e.terms); }

} // namespace tangle_roof
