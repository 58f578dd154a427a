#pragma once

// Convex roof of sqrt(tau3) on rank-2 three-qubit density matrices.
//
// The pure states in the range form a Bloch sphere over the normalized
// eigenvectors e1, e2:
//     Psi(p, phi) = sqrt(p) e1 - sqrt(1 - p) e^{i phi} e2,
// and the density matrix p e1e1^+ + (1 - p) e2e2^+ sits on the axis at height
// 2p - 1. HD(a e1 + b e2) is a binary quartic in (a, b), which gives the
// characteristic curves and the zero polytope in closed form.

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/tools/minima.hpp>

#include "tangle_roof/detail/nelder_mead.hpp"
#include "tangle_roof/detail/parallel.hpp"
#include "tangle_roof/invariants.hpp"
#include "tangle_roof/statekit.hpp"

namespace tangle_roof {

inline constexpr double kPi = 3.14159265358979323846;

inline double wrap_phase(double phi) {
    double r = std::fmod(phi, 2.0 * kPi);
    if (r < 0.0) r += 2.0 * kPi;
    return r;
}

struct SphereParam {
    double p = 1.0;
    double phi = 0.0;
};

inline Eigen::Vector3d bloch_vector(const SphereParam& s) {
    const double r = 2.0 * std::sqrt(std::max(0.0, s.p * (1.0 - s.p)));
    return {-r * std::cos(s.phi), -r * std::sin(s.phi), 2.0 * s.p - 1.0};
}

inline SphereParam sphere_param(const Eigen::Vector3d& n) {
    SphereParam s;
    s.p = std::clamp(0.5 * (1.0 + n.z()), 0.0, 1.0);
    s.phi = std::hypot(n.x(), n.y()) < 1e-15 ? 0.0 : wrap_phase(std::atan2(-n.y(), -n.x()));
    return s;
}

inline PureState member_state(const RankTwoRange& range, const SphereParam& s) {
    const double p = std::clamp(s.p, 0.0, 1.0);
    CVector v = std::sqrt(p) * range.unit1.amplitudes() -
                std::sqrt(1.0 - p) * std::polar(1.0, s.phi) * range.unit2.amplitudes();
    return PureState(range.n_qubits(), v).normalized();
}

// ---------------------------------------------------------------------------
// Curves

struct CharacteristicCurve {
    double phi = 0.0; // NaN for the envelope
    std::vector<std::pair<double, double>> samples;
};

/// sqrt(tau3) of the member states on a uniform p-grid, endpoints included.
inline CharacteristicCurve characteristic_curve(const RankTwoRange& range, double phi, int grid_size) {
    if (range.n_qubits() != 3) throw ShapeError("characteristic curves need a 3-qubit range");
    if (grid_size < 3) throw ParamError("grid_size must be at least 3");
    CharacteristicCurve out{phi, {}};
    for (int i = 0; i < grid_size; ++i) {
        const double p = static_cast<double>(i) / (grid_size - 1);
        out.samples.emplace_back(p, sqrt_threetangle(member_state(range, {p, phi})));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Chord geometry

struct ChordSplit {
    double p = 0.0;  // axis point of rho
    double p1 = 0.0; // height parameter of Z1
    double p2 = 0.0; // height parameter of Z2 (opposite meridian)
    double l1 = 0.0;
    double l2 = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;
};

/// Chord from the surface point Z1 at height 2p1-1 through the axis point
/// 2p-1, continued to the second intersection Z2.
inline ChordSplit bloch_split(double p, double p1) {
    if (p < 0.0 || p > 1.0 || p1 < 0.0 || p1 > 1.0) throw ParamError("chord parameters must lie in [0, 1]");
    ChordSplit c;
    c.p = p;
    c.p1 = p1;
    const double h = 2.0 * p - 1.0, h1 = 2.0 * p1 - 1.0;
    const bool pure = p == 0.0 || p == 1.0;
    if (pure && p1 != p) throw DegenerateChord("rho is pure: no chord passes through it");
    if (pure) {
        c.p2 = 1.0 - p;
        c.q1 = 1.0;
        return c;
    }
    c.l1 = std::sqrt(std::max(0.0, 1.0 + h * h - 2.0 * h * h1));
    c.l2 = 4.0 * p * (1.0 - p) / c.l1;
    c.p2 = p * p * (1.0 - p1) / (p * (p - p1) + p1 * (1.0 - p));
    c.q1 = c.l2 / (c.l1 + c.l2);
    c.q2 = c.l1 / (c.l1 + c.l2);
    return c;
}

// ---------------------------------------------------------------------------
// Zero polytope

struct ZeroRoot {
    SphereParam at;
    Complex z;                // ratio b/a of the homogeneous coordinates
    bool at_infinity = false; // a = 0, i.e. the second eigenvector
    int multiplicity = 1;
};

struct ZeroPolytope {
    std::vector<ZeroRoot> roots;
    bool all_zero = false;
    std::array<Complex, 5> coefficients{}; // HD(e1 + z e2) = sum_k c_k z^k

    int total_multiplicity() const {
        int m = 0;
        for (const auto& r : roots) m += r.multiplicity;
        return m;
    }
};

namespace detail {

inline std::array<Complex, 5> quartic_coefficients(const CVector& e1, const CVector& e2) {
    std::array<Complex, 5> f{}, h{};
    for (int j = 0; j < 5; ++j) {
        const Complex z = std::polar(1.0, 2.0 * kPi * j / 5.0);
        f[static_cast<std::size_t>(j)] = hyperdeterminant(e1 + z * e2);
    }
    for (int k = 0; k < 5; ++k) {
        Complex s = 0.0;
        for (int j = 0; j < 5; ++j) s += f[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * kPi * j * k / 5.0);
        h[static_cast<std::size_t>(k)] = s / 5.0;
    }
    // DFT noise on vanishing coefficients
    double scale = 0.0;
    for (const auto& v : f) scale = std::max(scale, std::abs(v));
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(scale, e1.squaredNorm() * e1.squaredNorm());
    for (auto& v : h)
        if (std::abs(v) <= floor) v = 0.0;
    return h;
}

// Taylor coefficients of the polynomial at c.
inline std::array<Complex, 5> taylor_at(const std::array<Complex, 5>& h, Complex c) {
    std::array<Complex, 5> t = h;
    for (int i = 0; i < 5; ++i)
        for (int k = 3; k >= i; --k) t[static_cast<std::size_t>(k)] += c * t[static_cast<std::size_t>(k + 1)];
    return t;
}

// Distance of the two points on the Riemann sphere.
inline double chordal(Complex a, Complex b) {
    return std::abs(a - b) / (std::sqrt(1.0 + std::norm(a)) * std::sqrt(1.0 + std::norm(b)));
}

inline ZeroPolytope find_zeros(const std::array<Complex, 5>& h, double rel_tol) {
    ZeroPolytope out;
    out.coefficients = h;
    double scale = 0.0;
    for (auto c : h) scale = std::max(scale, std::abs(c));
    if (scale < 1e-12) {
        out.all_zero = true;
        return out;
    }
    int deg = 4;
    while (deg > 0 && std::abs(h[static_cast<std::size_t>(deg)]) <= rel_tol * scale) --deg;

    std::vector<Complex> raw;
    if (deg > 0) {
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
        for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -h[static_cast<std::size_t>(i)] / h[static_cast<std::size_t>(deg)];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
        for (int i = 0; i < deg; ++i) raw.push_back(es.eigenvalues()(i));
    }

    // Numerically split k-fold roots spread over ~eps^(1/k): cluster loosely,
    // then keep a cluster only if the low Taylor coefficients vanish at its centroid.
    std::vector<int> group(raw.size(), -1);
    int groups = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (group[i] >= 0) continue;
        group[i] = groups;
        for (bool grown = true; grown;) {
            grown = false;
            for (std::size_t j = 0; j < raw.size(); ++j) {
                if (group[j] >= 0) continue;
                for (std::size_t k = 0; k < raw.size(); ++k)
                    if (group[k] == groups && chordal(raw[j], raw[k]) <= 1e-3) {
                        group[j] = groups;
                        grown = true;
                        break;
                    }
            }
        }
        ++groups;
    }

    std::vector<std::pair<Complex, int>> merged;
    for (int g = 0; g < groups; ++g) {
        std::vector<Complex> members;
        for (std::size_t i = 0; i < raw.size(); ++i)
            if (group[i] == g) members.push_back(raw[i]);
        Complex c = 0.0;
        for (auto z : members) c += z;
        c /= static_cast<double>(members.size());
        const int k = static_cast<int>(members.size());
        const auto t = taylor_at(h, c);
        double norm = 0.0;
        for (int i = 0; i <= 4; ++i) norm += std::abs(h[static_cast<std::size_t>(i)]) * std::pow(std::max(1.0, std::abs(c)), i);
        bool ok = true;
        for (int i = 0; i < k; ++i) ok = ok && std::abs(t[static_cast<std::size_t>(i)]) <= 1e-7 * norm;
        if (ok) {
            merged.emplace_back(c, k);
        } else {
            for (auto z : members) merged.emplace_back(z, 1);
        }
    }

    for (auto [z, k] : merged) {
        // Newton polish of simple roots.
        if (k == 1)
            for (int it = 0; it < 3; ++it) {
                const auto t = taylor_at(h, z);
                if (std::abs(t[1]) == 0.0) break;
                z -= t[0] / t[1];
            }
        ZeroRoot r;
        r.z = z;
        r.multiplicity = k;
        r.at.p = 1.0 / (1.0 + std::norm(z));
        r.at.phi = std::abs(z) == 0.0 ? 0.0 : wrap_phase(std::arg(-z));
        out.roots.push_back(r);
    }
    if (deg < 4) {
        ZeroRoot r;
        r.z = std::numeric_limits<double>::infinity();
        r.at_infinity = true;
        r.multiplicity = 4 - deg;
        r.at = {0.0, 0.0};
        out.roots.push_back(r);
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Roof

struct RoofOptions {
    int phi_grid = 721;
    int p_grid = 501;
    double exact_tol = 1e-6;
    int max_degeneracy = 2; // m: admissible anchors have multiplicity 1..m
    int scan_p = 49;
    int scan_phi = 96;
    double degree_tol = 1e-10;
};

struct WeightedState {
    double weight = 0.0;
    PureState state;
};

struct RoofResult {
    double value = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    bool exact = false;
    std::string method;
    double axis_p = 1.0;
    std::vector<WeightedState> decomposition;
};

class Rank2Roof {
public:
    explicit Rank2Roof(RankTwoRange range, RoofOptions opt = {}) : range_(std::move(range)), opt_(opt) {
        if (range_.n_qubits() != 3) throw ShapeError("roof construction needs a 3-qubit range");
        if (opt_.phi_grid < 8 || opt_.p_grid < 8) throw ParamError("grids must have at least 8 points");
        h_ = detail::quartic_coefficients(range_.unit1.amplitudes(), range_.unit2.amplitudes());
        zeros_ = detail::find_zeros(h_, opt_.degree_tol);
        build_envelope();
    }

    const RankTwoRange& range() const { return range_; }
    const RoofOptions& options() const { return opt_; }
    const ZeroPolytope& zeros() const { return zeros_; }

    /// sqrt(tau3) of Psi(p, phi) from the quartic coefficients.
    double curve(double p, double phi) const {
        const auto c = phase_coefficients(p);
        Complex s = 0.0;
        for (int k = 0; k < 5; ++k) s += c[static_cast<std::size_t>(k)] * std::polar(1.0, k * phi);
        return root_of(std::abs(s));
    }

    /// Minimum over phi at fixed p.
    double min_curve(double p) const {
        const auto c = phase_coefficients(p);
        const auto g = [&](double phi) {
            Complex s = 0.0;
            for (int k = 0; k < 5; ++k) s += c[static_cast<std::size_t>(k)] * std::polar(1.0, k * phi);
            return std::abs(s);
        };
        const int n = opt_.phi_grid - 1; // last grid point repeats the first
        const double step = 2.0 * kPi / n;
        std::vector<double> vals(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) vals[static_cast<std::size_t>(j)] = g(j * step);
        std::vector<int> minima;
        for (int j = 0; j < n; ++j) {
            const double v = vals[static_cast<std::size_t>(j)];
            if (v <= vals[static_cast<std::size_t>((j + n - 1) % n)] && v <= vals[static_cast<std::size_t>((j + 1) % n)])
                minima.push_back(j);
        }
        std::stable_sort(minima.begin(), minima.end(),
                         [&](int a, int b) { return vals[static_cast<std::size_t>(a)] < vals[static_cast<std::size_t>(b)]; });
        if (minima.size() > 4) minima.resize(4);
        double best = *std::min_element(vals.begin(), vals.end());
        for (int j : minima) {
            std::uintmax_t iters = 60;
            const auto r = boost::math::tools::brent_find_minima(g, (j - 1) * step, (j + 1) * step, 40, iters);
            best = std::min(best, r.second);
        }
        return root_of(best);
    }

    /// Lower convex envelope of the minimal characteristic curve.
    double envelope(double p) const {
        p = std::clamp(p, 0.0, 1.0);
        auto it = std::upper_bound(hull_.begin(), hull_.end(), p,
                                   [&](double x, std::size_t i) { return x < grid_p_[i]; });
        if (it == hull_.begin()) return grid_min_[hull_.front()];
        if (it == hull_.end()) return grid_min_[hull_.back()];
        const std::size_t b = *it, a = *(it - 1);
        const double t = (p - grid_p_[a]) / (grid_p_[b] - grid_p_[a]);
        const double lin = (1.0 - t) * grid_min_[a] + t * grid_min_[b];
        // Between neighbouring samples the curve is locally convex, so its own
        // value is the envelope up to sampling error.
        if (b == a + 1) return std::min(lin, min_curve(p));
        return lin;
    }

    bool affine() const {
        return !zeros_.all_zero && zeros_.roots.size() == 1 && zeros_.roots.front().multiplicity == 4;
    }

    const std::vector<double>& grid_p() const { return grid_p_; }
    const std::vector<double>& grid_min() const { return grid_min_; }
    std::vector<double> grid_envelope() const {
        std::vector<double> out;
        for (double p : grid_p_) out.push_back(envelope(p));
        return out;
    }

    /// Convex roof at the axis point p, i.e. of p e1e1^+ + (1 - p) e2e2^+.
    RoofResult at(double axis_p) const {
        if (axis_p < 0.0 || axis_p > 1.0) throw ParamError("axis point must lie in [0, 1]");
        RoofResult res;
        res.axis_p = axis_p;
        if (axis_p >= 1.0 - 1e-12 || axis_p <= 1e-12) {
            const PureState& u = axis_p > 0.5 ? range_.unit1 : range_.unit2;
            res.value = res.lower_bound = res.upper_bound = sqrt_threetangle(u);
            res.exact = true;
            res.method = "rank_one";
            res.decomposition.push_back({1.0, u});
            return res;
        }

        Candidate best{axis_p * curve(1.0, 0.0) + (1.0 - axis_p) * curve(0.0, 0.0), "eigen",
                       {{axis_p, {1.0, 0.0}}, {1.0 - axis_p, {0.0, kPi}}}};

        std::vector<double> theorem;
        if (!zeros_.all_zero) {
            for (const auto& root : zeros_.roots) {
                const ChordSplit s = bloch_split(axis_p, root.at.p);
                const SphereParam z2{s.p2, wrap_phase(root.at.phi + kPi)};
                const double v = s.q1 * curve(root.at.p, root.at.phi) + s.q2 * curve(z2.p, z2.phi);
                if (v < best.value) best = {v, "zero_chord", {{s.q1, root.at}, {s.q2, z2}}};
                if (root.multiplicity <= opt_.max_degeneracy) theorem.push_back(s.q2 * envelope(s.p2));
            }
        }

        double lower = envelope(axis_p);
        if (!theorem.empty()) lower = std::max(lower, *std::min_element(theorem.begin(), theorem.end()));
        // A single fourfold zero <w| makes HD = c <w|psi>^4, so sqrt(tau3) is the
        // affine function 2 sqrt|c| <w|rho|w> and every decomposition is optimal.
        if (affine()) lower = best.value;
        if (best.value - lower >= opt_.exact_tol) {
            const Candidate scanned = chord_scan(axis_p);
            if (scanned.value < best.value) best = scanned;
        }

        // Report what the listed decomposition achieves when evaluated directly;
        // near a zero the two routes differ by up to ~1e-7.
        double realized = 0.0;
        for (const auto& [w, s] : best.parts)
            if (w > 0.0) {
                res.decomposition.push_back({w, member_state(range_, s)});
                realized += w * sqrt_threetangle(res.decomposition.back().state);
            }
        if (affine()) lower = realized;
        res.upper_bound = res.value = realized;
        res.lower_bound = std::min(lower, realized);
        res.exact = res.upper_bound - res.lower_bound < opt_.exact_tol;
        res.method = best.method;
        return res;
    }

private:
    struct Candidate {
        double value;
        std::string method;
        std::vector<std::pair<double, SphereParam>> parts;
    };

    // Member states are normalized, so |HD| <= 8 eps is roundoff (as in sqrt_threetangle).
    static double root_of(double hd) {
        return hd <= 8.0 * std::numeric_limits<double>::epsilon() ? 0.0 : 2.0 * std::sqrt(hd);
    }

    // c_k with HD(Psi(p, phi)) = sum_k c_k e^{i k phi}.
    std::array<Complex, 5> phase_coefficients(double p) const {
        p = std::clamp(p, 0.0, 1.0);
        const double a = std::sqrt(p), b = -std::sqrt(1.0 - p);
        std::array<Complex, 5> c{};
        for (int k = 0; k < 5; ++k)
            c[static_cast<std::size_t>(k)] = h_[static_cast<std::size_t>(k)] * std::pow(a, 4 - k) * std::pow(b, k);
        return c;
    }

    void build_envelope() {
        const auto n = static_cast<std::size_t>(opt_.p_grid);
        grid_p_.resize(n);
        for (std::size_t i = 0; i < n; ++i) grid_p_[i] = static_cast<double>(i) / static_cast<double>(n - 1);
        grid_min_ = detail::ordered_map<double>(n, [&](std::size_t i) { return min_curve(grid_p_[i]); });
        // Monotone-chain lower hull.
        hull_.clear();
        for (std::size_t i = 0; i < n; ++i) {
            while (hull_.size() >= 2) {
                const std::size_t a = hull_[hull_.size() - 2], b = hull_.back();
                const double cross = (grid_p_[b] - grid_p_[a]) * (grid_min_[i] - grid_min_[a]) -
                                     (grid_min_[b] - grid_min_[a]) * (grid_p_[i] - grid_p_[a]);
                if (cross <= 0.0)
                    hull_.pop_back();
                else
                    break;
            }
            hull_.push_back(i);
        }
    }

    // Best two-point decomposition along chords through the axis point.
    Candidate chord_scan(double axis_p) const {
        const auto value = [&](double p1, double phi) {
            p1 = std::clamp(p1, 0.0, 1.0);
            const ChordSplit s = bloch_split(axis_p, p1);
            return s.q1 * curve(p1, phi) + s.q2 * curve(s.p2, phi + kPi);
        };
        std::vector<std::tuple<double, double, double>> grid;
        for (int i = 1; i < opt_.scan_p; ++i)
            for (int j = 0; j < opt_.scan_phi; ++j) {
                const double p1 = static_cast<double>(i) / opt_.scan_p;
                const double phi = 2.0 * kPi * j / opt_.scan_phi;
                grid.emplace_back(value(p1, phi), p1, phi);
            }
        std::sort(grid.begin(), grid.end());
        Candidate best{std::numeric_limits<double>::infinity(), "chord_scan", {}};
        const std::size_t starts = std::min<std::size_t>(4, grid.size());
        for (std::size_t k = 0; k < starts; ++k) {
            const auto [v0, p0, phi0] = grid[k];
            auto r = detail::nelder_mead([&](const std::vector<double>& x) { return value(x[0], x[1]); }, {p0, phi0},
                                         0.5 / opt_.scan_p, {2000, 1e-15, 1e-12});
            const double p1 = std::clamp(r.x[0], 0.0, 1.0);
            if (r.fx < best.value) {
                const ChordSplit s = bloch_split(axis_p, p1);
                best = {r.fx, "chord_scan",
                        {{s.q1, {p1, wrap_phase(r.x[1])}}, {s.q2, {s.p2, wrap_phase(r.x[1] + kPi)}}}};
            }
        }
        return best;
    }

    RankTwoRange range_;
    RoofOptions opt_;
    std::array<Complex, 5> h_{};
    ZeroPolytope zeros_;
    std::vector<double> grid_p_, grid_min_;
    std::vector<std::size_t> hull_;
};

inline ZeroPolytope zero_polytope(const RankTwoRange& range, double degree_tol = 1e-10) {
    if (range.n_qubits() != 3) throw ShapeError("zero polytope needs a 3-qubit range");
    return detail::find_zeros(detail::quartic_coefficients(range.unit1.amplitudes(), range.unit2.amplitudes()),
                              degree_tol);
}

inline CharacteristicCurve minimal_convex_curve(const RankTwoRange& range, int phi_grid, int p_grid) {
    RoofOptions opt;
    opt.phi_grid = phi_grid;
    opt.p_grid = p_grid;
    const Rank2Roof roof(range, opt);
    CharacteristicCurve out{std::numeric_limits<double>::quiet_NaN(), {}};
    const auto env = roof.grid_envelope();
    for (std::size_t i = 0; i < env.size(); ++i) out.samples.emplace_back(roof.grid_p()[i], env[i]);
    return out;
}

/// The same range reweighted to the axis point p: p e1e1^+ + (1 - p) e2e2^+.
inline RankTwoRange at_axis(const RankTwoRange& range, double p) {
    if (p < 0.0 || p > 1.0) throw ParamError("axis point must lie in [0, 1]");
    RankTwoRange out = range;
    out.psi1 = PureState(range.n_qubits(), std::sqrt(p) * range.unit1.amplitudes());
    out.psi2 = PureState(range.n_qubits(), std::sqrt(1.0 - p) * range.unit2.amplitudes());
    out.P1 = p;
    out.P2 = 1.0 - p;
    out.angles.reset();
    return out;
}

inline RoofResult convex_roof_rank2(const RankTwoRange& range, const RoofOptions& opt = {}) {
    return Rank2Roof(range, opt).at(range.P1 / (range.P1 + range.P2));
}

// ---------------------------------------------------------------------------
// Oracle

struct OracleOptions {
    int max_parts = 4;
    int restarts = 400;
    std::uint64_t seed = 0;
    int max_evaluations = 4000;
};

namespace detail {

struct OracleObjective {
    Eigen::Matrix<Complex, 8, 1> psi1, psi2;
    int k;

    double operator()(const std::vector<double>& x) const {
        Eigen::MatrixXcd m(k, 2);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < 2; ++j) {
                const std::size_t o = static_cast<std::size_t>(2 * (i * 2 + j));
                m(i, j) = {x[o], x[o + 1]};
            }
        const double n0 = m.col(0).norm();
        if (n0 < 1e-12) return 1e9;
        m.col(0) /= n0;
        m.col(1) -= m.col(0) * m.col(0).dot(m.col(1));
        const double n1 = m.col(1).norm();
        if (n1 < 1e-12) return 1e9;
        m.col(1) /= n1;
        double total = 0.0;
        for (int i = 0; i < k; ++i) total += sqrt_threetangle((m(i, 0) * psi1 + m(i, 1) * psi2).eval());
        return total;
    }
};

} // namespace detail

/// Minimum of sum_i sqrt(tau3) over decompositions generated by random
/// k x 2 isometries acting on the subnormalized range vectors, each polished
/// by Nelder-Mead. Deterministic for a fixed seed and any thread count.
inline double brute_force_roof(const RankTwoRange& range, const OracleOptions& opt = {}) {
    if (range.n_qubits() != 3) throw ShapeError("oracle needs a 3-qubit range");
    if (opt.max_parts < 2) throw ParamError("max_parts must be at least 2");
    if (range.P2 <= 1e-14) return sqrt_threetangle(range.unit1);
    if (range.P1 <= 1e-14) return sqrt_threetangle(range.unit2);

    detail::OracleObjective obj{range.psi1.amplitudes(), range.psi2.amplitudes(), opt.max_parts};
    const auto dim = static_cast<std::size_t>(4 * opt.max_parts);
    std::mt19937_64 master(opt.seed);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(std::max(1, opt.restarts)));
    for (auto& s : seeds) s = master();

    const detail::NelderMeadOptions nm{opt.max_evaluations, 1e-13, 1e-9};
    auto runs = detail::ordered_map<detail::NelderMeadResult>(seeds.size(), [&](std::size_t r) {
        std::mt19937_64 rng(seeds[r]);
        std::normal_distribution<double> normal;
        std::vector<double> x(dim);
        for (auto& v : x) v = normal(rng);
        return detail::nelder_mead(obj, x, 0.5, nm);
    });
    std::stable_sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.fx < b.fx; });
    runs.resize(std::min<std::size_t>(runs.size(), 8));

    // Restarted polish of the best runs.
    auto polished = detail::ordered_map<double>(runs.size(), [&](std::size_t i) {
        auto cur = runs[i];
        for (int round = 0; round < 20; ++round) {
            const double step = round % 2 == 0 ? 0.1 : 0.01;
            auto next = detail::nelder_mead(obj, cur.x, step, nm);
            const bool improved = next.fx < cur.fx - 1e-13;
            if (next.fx < cur.fx) cur = next;
            if (!improved && round > 1) break;
        }
        return cur.fx;
    });
    return *std::min_element(polished.begin(), polished.end());
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const ZeroPolytope& z) {
    json roots = json::array();
    for (const auto& r : z.roots) {
        json e{{"p", r.at.p}, {"phi", r.at.phi}, {"multiplicity", r.multiplicity}, {"at_infinity", r.at_infinity}};
        if (!r.at_infinity) e["z"] = {{"re", r.z.real()}, {"im", r.z.imag()}};
        roots.push_back(e);
    }
    json coeffs = json::array();
    for (auto c : z.coefficients) coeffs.push_back({{"re", c.real()}, {"im", c.imag()}});
    return {{"all_zero", z.all_zero}, {"total_multiplicity", z.total_multiplicity()}, {"roots", roots},
            {"coefficients", coeffs}};
}

inline json to_json(const RoofResult& r) {
    json parts = json::array();
    for (const auto& d : r.decomposition) parts.push_back({{"weight", d.weight}, {"state", to_json(d.state, 1e-15)}});
    return {{"value", r.value},   {"lower_bound", r.lower_bound}, {"upper_bound", r.upper_bound},
            {"exact", r.exact},   {"method", r.method},           {"axis_p", r.axis_p},
            {"decomposition", parts}};
}

inline json to_json(const ChordSplit& c) {
    return {{"p", c.p}, {"p1", c.p1}, {"p2", c.p2}, {"l1", c.l1}, {"l2", c.l2}, {"q1", c.q1}, {"q2", c.q2}};
}

} // namespace tangle_roof
