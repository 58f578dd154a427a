#pragma once

// Pure- and mixed-state entanglement invariants: concurrence, threetangle,
// the generators of the four-qubit SL(2)^4 invariant ring, and the extended
// monogamy report.

#include <limits>
#include <array>
#include <bit>
#include <map>
#include <optional>

#include "tangle_roof/statekit.hpp"

namespace tangle_roof {

using SitePair = std::array<int, 2>;
using SiteTriple = std::array<int, 3>;

/// Cayley hyperdeterminant of the 2x2x2 amplitude tensor a_{ijk}, with
/// qubit 1 as the most significant index. Homogeneous of degree 4.
template <class Derived>
Complex hyperdeterminant(const Eigen::MatrixBase<Derived>& a) {
    if (a.size() != 8) throw ShapeError("hyperdeterminant needs 8 amplitudes");
    const auto A = [&](int i, int j, int k) -> Complex { return a(4 * i + 2 * j + k); };
    const Complex d1 = A(0, 0, 0) * A(0, 0, 0) * A(1, 1, 1) * A(1, 1, 1) +
                       A(0, 0, 1) * A(0, 0, 1) * A(1, 1, 0) * A(1, 1, 0) +
                       A(0, 1, 0) * A(0, 1, 0) * A(1, 0, 1) * A(1, 0, 1) +
                       A(1, 0, 0) * A(1, 0, 0) * A(0, 1, 1) * A(0, 1, 1);
    const Complex d2 = A(0, 0, 0) * A(1, 1, 1) * A(0, 1, 1) * A(1, 0, 0) +
                       A(0, 0, 0) * A(1, 1, 1) * A(1, 0, 1) * A(0, 1, 0) +
                       A(0, 0, 0) * A(1, 1, 1) * A(1, 1, 0) * A(0, 0, 1) +
                       A(0, 1, 1) * A(1, 0, 0) * A(1, 0, 1) * A(0, 1, 0) +
                       A(0, 1, 1) * A(1, 0, 0) * A(1, 1, 0) * A(0, 0, 1) +
                       A(1, 0, 1) * A(0, 1, 0) * A(1, 1, 0) * A(0, 0, 1);
    const Complex d3 = A(0, 0, 0) * A(1, 1, 0) * A(1, 0, 1) * A(0, 1, 1) +
                       A(1, 1, 1) * A(0, 0, 1) * A(0, 1, 0) * A(1, 0, 0);
    return d1 - 2.0 * d2 + 4.0 * d3;
}

/// tau3 = 4 |HD(psi)|, equal to 1 on GHZ. Not normalized internally, so
/// tau3(lambda psi) = |lambda|^4 tau3(psi).
inline double threetangle(const PureState& psi) {
    if (psi.n_qubits() != 3) throw ShapeError("threetangle needs a 3-qubit state");
    return 4.0 * std::abs(hyperdeterminant(psi.amplitudes()));
}

/// 2 sqrt|HD|. For a subnormalized vector sqrt(w) chi this equals w * sqrt(tau3(chi)).
/// |HD| at roundoff level (8 eps |a|^4) counts as zero; the square root would
/// otherwise turn 1e-17 noise into 1e-8.
template <class Derived>
double sqrt_threetangle(const Eigen::MatrixBase<Derived>& a) {
    const double hd = std::abs(hyperdeterminant(a));
    const double n2 = a.squaredNorm();
    if (hd <= 8.0 * std::numeric_limits<double>::epsilon() * n2 * n2) return 0.0;
    return 2.0 * std::sqrt(hd);
}

inline double sqrt_threetangle(const PureState& psi) {
    if (psi.n_qubits() != 3) throw ShapeError("threetangle needs a 3-qubit state");
    return sqrt_threetangle(psi.amplitudes());
}

/// Wootters concurrence. The spin-flip eigenvalues are obtained as singular
/// values of Phi^T (sy x sy) Phi with rho = Phi Phi^dagger.
inline double concurrence(const DensityMatrix& rho) {
    if (rho.n_qubits() != 2) throw ShapeError("concurrence needs a 2-qubit density matrix");
    const CMatrix h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    Eigen::VectorXd ev = es.eigenvalues();
    const double cut = 64.0 * std::numeric_limits<double>::epsilon() * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    for (auto& v : ev)
        if (v <= cut) v = 0.0;
    const Eigen::VectorXd lam = ev.cwiseSqrt();
    const CMatrix phi = es.eigenvectors() * lam.asDiagonal();
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = yy(3, 0) = -1.0;
    yy(1, 2) = yy(2, 1) = 1.0;
    const CMatrix x = phi.transpose() * yy * phi;
    const Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(x).singularValues(); // descending
    return std::max(0.0, sv(0) - sv(1) - sv(2) - sv(3));
}

/// tau1(site) = 4 det(rho_site).
inline double one_tangle(const PureState& psi, int site) {
    const DensityMatrix r = reduce(psi, {site});
    return std::max(0.0, 4.0 * (r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0)).real());
}

// ---------------------------------------------------------------------------
// Four-qubit SL invariants

struct SlInvariants {
    Complex H; // degree 2
    Complex L; // degree 4, cut (12|34)
    Complex M; // degree 4, cut (13|24)
    Complex D; // degree 6

    std::array<Complex, 4> values() const { return {H, L, M, D}; }
    static constexpr std::array<int, 4> degrees() { return {2, 4, 4, 6}; }

    double max_abs() const {
        double m = 0.0;
        for (auto v : values()) m = std::max(m, std::abs(v));
        return m;
    }
};

inline SlInvariants sl_invariants_4q(const PureState& psi) {
    if (psi.n_qubits() != 4) throw ShapeError("four-qubit invariants need a 4-qubit state");
    const CVector& a = psi.amplitudes();
    SlInvariants out;

    Complex h = 0.0;
    for (int i = 0; i < 16; ++i) {
        const double sign = (std::popcount(static_cast<unsigned>(i)) % 2 == 0) ? 1.0 : -1.0;
        h += sign * a(i) * a(15 - i);
    }
    out.H = 0.5 * h;

    Eigen::Matrix4cd cut12, cut13;
    for (int i = 0; i < 16; ++i) {
        const int q1 = (i >> 3) & 1, q2 = (i >> 2) & 1, q3 = (i >> 1) & 1, q4 = i & 1;
        cut12(2 * q1 + q2, 2 * q3 + q4) = a(i);
        cut13(2 * q1 + q3, 2 * q2 + q4) = a(i);
    }
    out.L = cut12.determinant();
    out.M = cut13.determinant();

    // b(x, t) = det over (y, z) of the quadrilinear form; its 3x3 coefficient
    // matrix in the quadratic monomials of x and t has an SL-invariant determinant.
    const auto t = [&](int x, int y, int z, int w) { return a(8 * x + 4 * y + 2 * z + w); };
    Eigen::Matrix3cd b = Eigen::Matrix3cd::Zero();
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
            for (int w1 = 0; w1 < 2; ++w1)
                for (int w2 = 0; w2 < 2; ++w2)
                    b(x1 + x2, w1 + w2) += t(x1, 0, 0, w1) * t(x2, 1, 1, w2) - t(x1, 0, 1, w1) * t(x2, 1, 0, w2);
    out.D = b.determinant();
    return out;
}

/// Null-cone certificate: every generator vanishes on the normalized state.
inline bool in_null_cone(const PureState& psi, double tol = 1e-10) {
    return sl_invariants_4q(psi.normalized()).max_abs() < tol;
}

// ---------------------------------------------------------------------------
// Reports

struct InvariantReport {
    std::map<SitePair, double> concurrence_pairs;
    std::map<SiteTriple, double> threetangle_triples;
    bool triples_are_roofs = false; // true: entries are (roof sqrt tau3)^2
    std::optional<SlInvariants> sl_generators;
    std::map<int, double> one_tangles;
};

/// Invariants of a normalized 3- or 4-qubit state. For four qubits the
/// triple entries are only filled from `roof_values` (squared).
inline InvariantReport invariant_report(const PureState& psi,
                                        const std::map<SiteTriple, double>* roof_values = nullptr) {
    const int n = psi.n_qubits();
    if (n < 2 || n > 4) throw ShapeError("invariant report supports 2 to 4 qubits");
    InvariantReport rep;
    for (int i = 1; i <= n; ++i) rep.one_tangles[i] = one_tangle(psi, i);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) rep.concurrence_pairs[{i, j}] = n == 2 ? 2.0 * std::sqrt(rep.one_tangles[1] / 4.0)
                                                                                 : concurrence(reduce(psi, {i, j}));
    if (n == 3) rep.threetangle_triples[{1, 2, 3}] = threetangle(psi);
    if (n == 4) {
        rep.sl_generators = sl_invariants_4q(psi);
        if (roof_values) {
            rep.triples_are_roofs = true;
            for (const auto& [k, v] : *roof_values) rep.threetangle_triples[k] = v * v;
        }
    }
    return rep;
}

struct MonogamyRow {
    int focus = 0;
    double one_tangle = 0.0;
    double concurrence_sq = 0.0;
    double threetangle_roof_sq = 0.0;
    bool inequality_holds = false;
};

struct MonogamyReport {
    std::vector<MonogamyRow> rows;
    bool all_hold() const {
        return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.inequality_holds; });
    }
};

/// tau1(i) >= sum_j C^2(rho_ij) + sum_{triples containing i} (roof sqrt tau3)^2,
/// with a 1e-9 slack. `roof_values` is keyed by the kept sites of each
/// three-site reduction, in increasing order.
inline MonogamyReport monogamy_report(const PureState& psi, const std::map<SiteTriple, double>& roof_values,
                                      double slack = 1e-9) {
    if (psi.n_qubits() != 4) throw ShapeError("monogamy report needs a 4-qubit state");
    const std::array<SiteTriple, 4> triples{{{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}}};
    for (const auto& t : triples)
        if (!roof_values.contains(t))
            throw IncompleteInput("missing roof value for sites " + std::to_string(t[0]) + std::to_string(t[1]) +
                                  std::to_string(t[2]));

    std::map<SitePair, double> c2;
    for (int i = 1; i <= 4; ++i)
        for (int j = i + 1; j <= 4; ++j) {
            const double c = concurrence(reduce(psi, {i, j}));
            c2[{i, j}] = c * c;
        }

    MonogamyReport rep;
    for (int i = 1; i <= 4; ++i) {
        MonogamyRow row;
        row.focus = i;
        row.one_tangle = one_tangle(psi, i);
        for (const auto& [pair, v] : c2)
            if (pair[0] == i || pair[1] == i) row.concurrence_sq += v;
        for (const auto& t : triples)
            if (std::find(t.begin(), t.end(), i) != t.end()) {
                const double r = roof_values.at(t);
                row.threetangle_roof_sq += r * r;
            }
        row.inequality_holds = row.one_tangle >= row.concurrence_sq + row.threetangle_roof_sq - slack;
        rep.rows.push_back(row);
    }
    return rep;
}

inline json to_json(const MonogamyReport& rep) {
    json one = json::array(), conc = json::array(), roof = json::array(), holds = json::array();
    for (const auto& r : rep.rows) {
        one.push_back(r.one_tangle);
        conc.push_back(r.concurrence_sq);
        roof.push_back(r.threetangle_roof_sq);
        holds.push_back(r.inequality_holds);
    }
    return {{"one_tangles", one}, {"concurrence_sq", conc}, {"threetangle_roof_sq", roof}, {"inequality_holds", holds}};
}

inline json to_json(const InvariantReport& rep) {
    json out;
    json pairs = json::object(), triples = json::object(), ones = json::object();
    for (const auto& [k, v] : rep.concurrence_pairs) pairs[std::to_string(k[0]) + std::to_string(k[1])] = v;
    for (const auto& [k, v] : rep.threetangle_triples)
        triples[std::to_string(k[0]) + std::to_string(k[1]) + std::to_string(k[2])] = v;
    for (const auto& [k, v] : rep.one_tangles) ones[std::to_string(k)] = v;
    out["concurrence"] = pairs;
    out["threetangle"] = triples;
    out["threetangle_is_roof_sq"] = rep.triples_are_roofs;
    out["one_tangles"] = ones;
    if (rep.sl_generators) {
        json gens = json::array();
        const auto vals = rep.sl_generators->values();
        const auto degs = SlInvariants::degrees();
        const std::array<const char*, 4> names{"H", "L", "M", "D"};
        for (std::size_t i = 0; i < 4; ++i)
            gens.push_back({{"name", names[i]}, {"degree", degs[i]}, {"re", vals[i].real()}, {"im", vals[i].imag()}});
        out["sl_generators"] = gens;
    }
    return out;
}

} // namespace tangle_roof
