#pragma once

// Core state containers: pure states, density matrices, partial traces and
// the rank-2 eigen-decomposition used by the convex-roof machinery.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tangle_roof/errors.hpp"

namespace tangle_roof {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using json = nlohmann::json;

inline constexpr int kMaxQubits = 20;

inline std::size_t dim_of(int n_qubits) { return std::size_t{1} << n_qubits; }

// Qubit 1 is the leftmost character of a bitstring, i.e. the most
// significant bit of the basis index.
inline int bit_of(std::size_t index, int site, int n_qubits) {
    return static_cast<int>((index >> (n_qubits - site)) & 1U);
}

inline std::size_t index_of(std::string_view bits) {
    std::size_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1')
            throw ParseError("bitstring '" + std::string(bits) + "' contains characters other than 0/1");
        index = (index << 1) | static_cast<std::size_t>(c == '1');
    }
    return index;
}

inline std::string bits_of(std::size_t index, int n_qubits) {
    std::string bits(static_cast<std::size_t>(n_qubits), '0');
    for (int site = 1; site <= n_qubits; ++site)
        if (bit_of(index, site, n_qubits)) bits[static_cast<std::size_t>(site - 1)] = '1';
    return bits;
}

namespace detail {

inline void check_qubit_count(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits)
        throw ShapeError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                         std::to_string(kMaxQubits) + "]");
}

} // namespace detail

/// Amplitude vector over the n-qubit computational basis. The norm is not
/// forced to one; subnormalized vectors appear as range vectors of mixed states.
class PureState {
public:
    PureState(int n_qubits, CVector amplitudes) : n_(n_qubits), amps_(std::move(amplitudes)) {
        detail::check_qubit_count(n_);
        if (static_cast<std::size_t>(amps_.size()) != dim_of(n_))
            throw ShapeError("amplitude vector of length " + std::to_string(amps_.size()) +
                             " does not match 2^" + std::to_string(n_));
    }

    static PureState basis(int n_qubits, std::size_t index) {
        detail::check_qubit_count(n_qubits);
        if (index >= dim_of(n_qubits)) throw IndexError("basis index out of range");
        CVector v = CVector::Zero(static_cast<Eigen::Index>(dim_of(n_qubits)));
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return PureState(n_qubits, std::move(v));
    }

    int n_qubits() const { return n_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const CVector& amplitudes() const { return amps_; }
    Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

    double norm_squared() const { return amps_.squaredNorm(); }
    double norm() const { return amps_.norm(); }
    bool is_normalized(double tol = 1e-12) const { return std::abs(norm_squared() - 1.0) <= tol; }

    PureState normalized() const {
        const double nrm = norm();
        if (nrm == 0.0) throw ShapeError("cannot normalize the zero vector");
        return PureState(n_, amps_ / nrm);
    }

    CMatrix projector() const { return amps_ * amps_.adjoint(); }

private:
    int n_;
    CVector amps_;
};

class DensityMatrix {
public:
    DensityMatrix(int n_qubits, CMatrix matrix) : n_(n_qubits), m_(std::move(matrix)) {
        detail::check_qubit_count(n_);
        const auto d = static_cast<Eigen::Index>(dim_of(n_));
        if (m_.rows() != d || m_.cols() != d)
            throw ShapeError("density matrix must be " + std::to_string(d) + "x" + std::to_string(d));
    }

    static DensityMatrix from_pure(const PureState& psi) { return {psi.n_qubits(), psi.projector()}; }

    int n_qubits() const { return n_; }
    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }
    Complex operator()(std::size_t r, std::size_t c) const {
        return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }

    double trace() const { return m_.trace().real(); }

    bool is_hermitian(double tol = 1e-12) const {
        return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
    }

    /// Eigenvalues in ascending order (Hermitian part only).
    Eigen::VectorXd eigenvalues() const {
        const CMatrix h = 0.5 * (m_ + m_.adjoint());
        return Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
    }

private:
    int n_;
    CMatrix m_;
};

// ---------------------------------------------------------------------------
// Term lists: the written (document) order of a state's product components.

struct Term {
    std::string bits;
    Complex amplitude;
};

struct TermList {
    int n_qubits = 0;
    std::vector<Term> terms;

    PureState to_state() const {
        detail::check_qubit_count(n_qubits);
        CVector v = CVector::Zero(static_cast<Eigen::Index>(dim_of(n_qubits)));
        std::set<std::string> seen;
        for (const auto& t : terms) {
            if (t.bits.size() != static_cast<std::size_t>(n_qubits))
                throw ShapeError("bitstring '" + t.bits + "' has length " + std::to_string(t.bits.size()) +
                                 ", expected " + std::to_string(n_qubits));
            if (!seen.insert(t.bits).second) throw DuplicateTerm("duplicate bitstring '" + t.bits + "'");
            v(static_cast<Eigen::Index>(index_of(t.bits))) = t.amplitude;
        }
        return PureState(n_qubits, std::move(v));
    }
};

/// Nonzero components of a state in ascending basis-index order.
inline TermList terms_of(const PureState& psi, double drop_tol = 0.0) {
    TermList out{psi.n_qubits(), {}};
    for (std::size_t i = 0; i < psi.dim(); ++i)
        if (std::abs(psi[i]) > drop_tol) out.terms.push_back({bits_of(i, psi.n_qubits()), psi[i]});
    return out;
}

struct LoadedState {
    TermList terms;  // document order
    PureState state;
    bool normalized; // squared norm within 1e-12 of one
};

namespace detail {

inline double number_field(const json& term, const char* key, std::optional<double> fallback) {
    auto it = term.find(key);
    if (it == term.end()) {
        if (fallback) return *fallback;
        throw ParseError(std::string("term is missing field '") + key + "'");
    }
    if (!it->is_number()) throw ParseError(std::string("field '") + key + "' is not numeric");
    return it->get<double>();
}

} // namespace detail

inline TermList parse_terms(const json& doc) {
    if (!doc.is_object()) throw ParseError("state document must be a JSON object");
    auto n_it = doc.find("n");
    if (n_it == doc.end() || !n_it->is_number_integer()) throw ParseError("state document needs an integer 'n'");
    auto t_it = doc.find("terms");
    if (t_it == doc.end() || !t_it->is_array()) throw ParseError("state document needs a 'terms' array");

    TermList out{n_it->get<int>(), {}};
    detail::check_qubit_count(out.n_qubits);
    for (const auto& term : *t_it) {
        if (!term.is_object()) throw ParseError("each term must be an object");
        auto b_it = term.find("bits");
        if (b_it == term.end() || !b_it->is_string()) throw ParseError("term needs a string 'bits'");
        auto bits = b_it->get<std::string>();
        index_of(bits); // validates characters
        const double re = detail::number_field(term, "re", std::nullopt);
        const double im = detail::number_field(term, "im", 0.0);
        out.terms.push_back({std::move(bits), {re, im}});
    }
    return out;
}

inline LoadedState load_state(const json& doc) {
    TermList terms = parse_terms(doc);
    PureState state = terms.to_state();
    const bool normalized = state.is_normalized();
    return {std::move(terms), std::move(state), normalized};
}

inline LoadedState load_state(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return load_state(doc);
}

inline json to_json(const TermList& terms) {
    json arr = json::array();
    for (const auto& t : terms.terms)
        arr.push_back({{"bits", t.bits}, {"re", t.amplitude.real()}, {"im", t.amplitude.imag()}});
    return {{"n", terms.n_qubits}, {"terms", std::move(arr)}};
}

inline json to_json(const PureState& psi, double drop_tol = 0.0) { return to_json(terms_of(psi, drop_tol)); }

inline json to_json(const DensityMatrix& rho) {
    json rows = json::array();
    for (std::size_t r = 0; r < rho.dim(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < rho.dim(); ++c) row.push_back({{"re", rho(r, c).real()}, {"im", rho(r, c).imag()}});
        rows.push_back(std::move(row));
    }
    return {{"n", rho.n_qubits()}, {"rows", std::move(rows)}};
}

inline DensityMatrix density_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("rows"))
        throw ParseError("density document needs 'n' and 'rows'");
    const int n = doc.at("n").get<int>();
    detail::check_qubit_count(n);
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    const auto& rows = doc.at("rows");
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != d) throw ShapeError("wrong number of rows");
    CMatrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) throw ShapeError("wrong row length");
        for (Eigen::Index c = 0; c < d; ++c) {
            const auto& e = row[static_cast<std::size_t>(c)];
            m(r, c) = {detail::number_field(e, "re", std::nullopt), detail::number_field(e, "im", 0.0)};
        }
    }
    return {n, std::move(m)};
}

// ---------------------------------------------------------------------------
// Partial traces

namespace detail {

inline std::vector<int> checked_sites(std::vector<int> keep, int n_qubits) {
    std::sort(keep.begin(), keep.end());
    if (keep.empty()) throw ShapeError("at least one site must be kept");
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) throw IndexError("repeated site");
    for (int s : keep)
        if (s < 1 || s > n_qubits)
            throw IndexError("site " + std::to_string(s) + " outside [1, " + std::to_string(n_qubits) + "]");
    return keep;
}

// Splits a full basis index into (kept index, traced index), both read
// most-significant-first in increasing site order.
struct SiteSplit {
    std::vector<int> kept, traced;
    int n;

    SiteSplit(const std::vector<int>& keep, int n_qubits) : kept(keep), n(n_qubits) {
        for (int s = 1; s <= n; ++s)
            if (!std::binary_search(kept.begin(), kept.end(), s)) traced.push_back(s);
    }

    std::size_t pack(std::size_t full, const std::vector<int>& sites) const {
        std::size_t out = 0;
        for (int s : sites) out = (out << 1) | static_cast<std::size_t>(bit_of(full, s, n));
        return out;
    }
    std::size_t kept_index(std::size_t full) const { return pack(full, kept); }
    std::size_t traced_index(std::size_t full) const { return pack(full, traced); }
};

} // namespace detail

/// Reduced density matrix on the (1-based) sites in `keep`, ordered by site.
inline DensityMatrix reduce(const PureState& psi, std::vector<int> keep) {
    keep = detail::checked_sites(std::move(keep), psi.n_qubits());
    const detail::SiteSplit split(keep, psi.n_qubits());
    const auto kd = static_cast<Eigen::Index>(dim_of(static_cast<int>(keep.size())));
    const auto td = static_cast<Eigen::Index>(psi.dim()) / kd;
    CMatrix m = CMatrix::Zero(kd, td);
    for (std::size_t i = 0; i < psi.dim(); ++i)
        m(static_cast<Eigen::Index>(split.kept_index(i)), static_cast<Eigen::Index>(split.traced_index(i))) = psi[i];
    return {static_cast<int>(keep.size()), m * m.adjoint()};
}

inline DensityMatrix reduce(const DensityMatrix& rho, std::vector<int> keep) {
    keep = detail::checked_sites(std::move(keep), rho.n_qubits());
    const detail::SiteSplit split(keep, rho.n_qubits());
    const auto kd = static_cast<Eigen::Index>(dim_of(static_cast<int>(keep.size())));
    CMatrix out = CMatrix::Zero(kd, kd);
    for (std::size_t r = 0; r < rho.dim(); ++r)
        for (std::size_t c = 0; c < rho.dim(); ++c)
            if (split.traced_index(r) == split.traced_index(c))
                out(static_cast<Eigen::Index>(split.kept_index(r)), static_cast<Eigen::Index>(split.kept_index(c))) +=
                    rho(r, c);
    return {static_cast<int>(keep.size()), std::move(out)};
}

namespace detail {

inline std::vector<int> all_sites_but(int site, int n_qubits) {
    if (site < 1 || site > n_qubits)
        throw IndexError("site " + std::to_string(site) + " outside [1, " + std::to_string(n_qubits) + "]");
    if (n_qubits < 2) throw ShapeError("cannot trace out the only qubit");
    std::vector<int> keep;
    for (int s = 1; s <= n_qubits; ++s)
        if (s != site) keep.push_back(s);
    return keep;
}

} // namespace detail

inline DensityMatrix partial_trace(const PureState& psi, int site) {
    return reduce(psi, detail::all_sites_but(site, psi.n_qubits()));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, int site) {
    return reduce(rho, detail::all_sites_but(site, rho.n_qubits()));
}

// ---------------------------------------------------------------------------
// Rank-2 ranges

/// Parameters of the tr_1 family of the one-flip Psi4_6 state: the |111>
/// weight p_rem splits into p1(q) = p_rem cos^2(beta) and p2(q) = p_rem sin^2(beta)
/// with sin(beta) = 2q - 1.
struct DerivedFamilyParams {
    double p_rem = 0.0;
    double q = 0.5;
    double beta = 0.0;
    double eta = 0.0;

    static DerivedFamilyParams from_q(double p_rem, double q, double eta = 0.0) {
        return {p_rem, q, std::asin(std::clamp(2.0 * q - 1.0, -1.0, 1.0)), eta};
    }
    double p1() const { return 4.0 * p_rem * q * (1.0 - q); }
    double p2() const { return p_rem * (2.0 * q - 1.0) * (2.0 * q - 1.0); }
};

struct MixingAngles {
    double alpha = 0.0;
    double chi = 0.0;
    DerivedFamilyParams family;
};

/// Two orthogonal range vectors of a rank <= 2 density matrix.
/// psi1/psi2 are subnormalized (|psi_i|^2 = P_i, P1 >= P2); unit1/unit2 are
/// the normalized eigenvectors, defined even when P2 = 0.
struct RankTwoRange {
    PureState psi1, psi2;
    PureState unit1, unit2;
    double P1 = 1.0;
    double P2 = 0.0;
    std::optional<MixingAngles> angles;

    int n_qubits() const { return unit1.n_qubits(); }
    CMatrix reconstruct() const { return psi1.projector() + psi2.projector(); }
};

namespace detail {

// Largest-magnitude amplitude (first index on ties) made real positive.
inline void fix_phase(CVector& v) {
    const double vmax = v.cwiseAbs().maxCoeff();
    if (vmax == 0.0) return;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= vmax * (1.0 - 1e-9)) {
            v *= std::conj(v(i)) / std::abs(v(i));
            v(i) = std::abs(v(i));
            return;
        }
    }
}

inline bool lex_greater(const CVector& a, const CVector& b, double tol = 1e-12) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::abs(a(i).real() - b(i).real()) > tol) return a(i).real() > b(i).real();
        if (std::abs(a(i).imag() - b(i).imag()) > tol) return a(i).imag() > b(i).imag();
    }
    return false;
}

// Deterministic orthonormal basis of the column space of the projector `proj`
// (rank `rank`): repeatedly pick the basis vector e_k with the largest
// remaining projected weight.
inline std::vector<CVector> canonical_basis(const CMatrix& proj, int rank) {
    std::vector<CVector> basis;
    const Eigen::Index d = proj.rows();
    for (int r = 0; r < rank; ++r) {
        Eigen::Index best = -1;
        double best_w = -1.0;
        CVector best_v;
        for (Eigen::Index k = 0; k < d; ++k) {
            CVector v = proj.col(k);
            for (const auto& b : basis) v -= b * b.dot(v);
            const double w = v.norm();
            if (w > best_w * (1.0 + 1e-9) + 1e-15) {
                best_w = w;
                best = k;
                best_v = v;
            }
        }
        if (best < 0 || best_w == 0.0) break;
        best_v /= best_w;
        fix_phase(best_v);
        basis.push_back(best_v);
    }
    return basis;
}

// Best-effort recognition of the "p1 |111><111| + |v><v|, v = x|111> + W" form
// (W supported on the single-excitation kets).
inline std::optional<MixingAngles> extract_mixing_angles(const CMatrix& rho) {
    constexpr double tol = 1e-10;
    if (rho.rows() != 8) return std::nullopt;
    const std::array<Eigen::Index, 4> support{7, 4, 2, 1};
    for (Eigen::Index r = 0; r < 8; ++r)
        for (Eigen::Index c = 0; c < 8; ++c) {
            const bool inside = std::find(support.begin(), support.end(), r) != support.end() &&
                                std::find(support.begin(), support.end(), c) != support.end();
            if (!inside && std::abs(rho(r, c)) > tol) return std::nullopt;
        }
    const double p_rem = rho(7, 7).real();
    const std::array<Eigen::Index, 3> wk{4, 2, 1};
    Eigen::Index kstar = wk[0];
    for (auto k : wk)
        if (rho(k, k).real() > rho(kstar, kstar).real()) kstar = k;
    if (p_rem <= tol || rho(kstar, kstar).real() <= tol) return std::nullopt;

    Eigen::Vector3cd w;
    for (int i = 0; i < 3; ++i) w(i) = rho(wk[static_cast<std::size_t>(i)], kstar) / std::sqrt(rho(kstar, kstar).real());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::abs(rho(wk[static_cast<std::size_t>(i)], wk[static_cast<std::size_t>(j)]) - w(i) * std::conj(w(j))) > tol)
                return std::nullopt;
    Complex x = 0.0;
    for (int i = 0; i < 3; ++i) x += rho(7, wk[static_cast<std::size_t>(i)]) * w(i);
    x /= w.squaredNorm();
    const double p2 = std::norm(x);
    if (p2 > p_rem + tol) return std::nullopt;

    // The sign of sin(beta) = 2q - 1 is not visible in rho; take the q <= 1/2 branch.
    const double sin_beta = -std::sqrt(std::clamp(p2 / p_rem, 0.0, 1.0));
    MixingAngles out;
    out.family = DerivedFamilyParams::from_q(p_rem, 0.5 * (1.0 + sin_beta), std::arg(x));
    out.alpha = 0.5 * std::atan(p_rem * std::sin(2.0 * out.family.beta));
    out.chi = out.family.eta;
    return out;
}

} // namespace detail

/// Eigen-decomposition of a rank <= 2 density matrix into two orthogonal
/// subnormalized range vectors. Eigenvectors have their largest amplitude real
/// positive; a degenerate pair is replaced by a canonical basis of the
/// eigenspace, ordered lexicographically (greater first).
inline RankTwoRange rank2_range(const DensityMatrix& rho, double rank_tol = 1e-10) {
    const Eigen::Index d = static_cast<Eigen::Index>(rho.dim());
    if (d < 2) throw ShapeError("rank-2 decomposition needs at least two dimensions");
    const CMatrix h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) throw RankError("eigendecomposition failed");
    const auto& ev = es.eigenvalues();
    if (d >= 3 && ev(d - 3) > rank_tol)
        throw RankError("density matrix has rank > 2 (third eigenvalue " + std::to_string(ev(d - 3)) + ")");

    const double l1 = ev(d - 1);
    const double l2 = ev(d - 2) > rank_tol ? ev(d - 2) : 0.0;
    CVector u1 = es.eigenvectors().col(d - 1);
    CVector u2 = es.eigenvectors().col(d - 2);

    if (l2 <= rank_tol) {
        detail::fix_phase(u1);
        const CMatrix proj1 = u1 * u1.adjoint();
        const CMatrix complement = CMatrix::Identity(d, d) - proj1;
        u2 = detail::canonical_basis(complement, 1).front();
    } else if (l1 - l2 < 1e-12) {
        const CMatrix proj = u1 * u1.adjoint() + u2 * u2.adjoint();
        auto basis = detail::canonical_basis(proj, 2);
        u1 = basis[0];
        u2 = basis[1];
        if (detail::lex_greater(u2, u1)) std::swap(u1, u2);
    } else {
        detail::fix_phase(u1);
        detail::fix_phase(u2);
    }

    const int n = rho.n_qubits();
    RankTwoRange out{PureState(n, std::sqrt(l1) * u1), PureState(n, std::sqrt(l2) * u2),
                     PureState(n, u1), PureState(n, u2), l1, l2, std::nullopt};
    if (n == 3) out.angles = detail::extract_mixing_angles(rho.matrix());
    return out;
}

} // namespace tangle_roof
