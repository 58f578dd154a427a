#pragma once

// Reproduction checks for the headline results, grouped by criterion. Shared
// by the `verify` subcommand and the acceptance test.

#include <chrono>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tangle_roof/catalog.hpp"
#include "tangle_roof/invariants.hpp"
#include "tangle_roof/nullcone.hpp"
#include "tangle_roof/roofkit.hpp"
#include "tangle_roof/statekit.hpp"

namespace tangle_roof {

struct Check {
    int criterion = 0;
    std::string id;
    std::string description;
    double expected = 0.0;
    double computed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<Check> checks;

    int passed() const {
        return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.pass; }));
    }
    int failed() const { return static_cast<int>(checks.size()) - passed(); }

    bool criterion_passes(int k) const {
        bool any = false;
        for (const auto& c : checks)
            if (c.criterion == k) {
                any = true;
                if (!c.pass) return false;
            }
        return any;
    }
};

struct VerifyOptions {
    RoofOptions roof;
    OracleOptions oracle;
    std::uint64_t seed = 0;
    bool run_oracle = true;
    double oracle_time_limit = 60.0; // seconds per case
};

inline const std::vector<std::pair<int, std::string>>& criterion_titles() {
    static const std::vector<std::pair<int, std::string>> titles{
        {1, "mixing angle of tr_1 Psi4_6;2"},
        {2, "exact roof curve of rho_1(1/2, p)"},
        {3, "spot roof values at p0 and of rho_2"},
        {4, "closed-form linear roofs"},
        {5, "concurrence patterns"},
        {6, "null-cone certification by SL generators"},
        {7, "balancedness classes"},
        {8, "brute-force oracle agreement"},
        {9, "chord geometry"},
        {10, "characteristic curve and zero-polytope structure"},
        {11, "extended monogamy"},
    };
    return titles;
}

namespace detail {

struct VerifyBuilder {
    VerifyReport report;

    void near(int crit, std::string id, std::string desc, double expected, double computed, double tol) {
        report.checks.push_back({crit, std::move(id), std::move(desc), expected, computed, tol,
                                 std::abs(computed - expected) <= tol});
    }
    void below(int crit, std::string id, std::string desc, double bound, double computed) {
        report.checks.push_back({crit, std::move(id), std::move(desc), bound, computed, 0.0, computed < bound});
    }
    void above(int crit, std::string id, std::string desc, double bound, double computed) {
        report.checks.push_back({crit, std::move(id), std::move(desc), bound, computed, 0.0, computed > bound});
    }
    void truth(int crit, std::string id, std::string desc, bool ok) {
        report.checks.push_back({crit, std::move(id), std::move(desc), 1.0, ok ? 1.0 : 0.0, 0.0, ok});
    }
};

inline double roof_family_formula(double p) {
    return 2.0 / std::pow(3.0, 0.75) * std::pow(std::abs(2.0 * p - 1.0), 1.5);
}

inline RankTwoRange family_range(double q) {
    return rank2_range(partial_trace(build("Psi4_6_2", {one_flip_weights(q), 0.0, std::nullopt}).state, 1));
}

} // namespace detail

inline VerifyReport run_verify(const VerifyOptions& opt = {}) {
    detail::VerifyBuilder b;
    const double sqrt3 = std::sqrt(3.0);

    struct OracleCase {
        std::string id;
        RankTwoRange range;
        double analytic;
    };
    std::vector<OracleCase> oracle_cases;

    // 1. Mixing angle.
    {
        const auto r = rank2_range(partial_trace(build("Psi4_6_2").state, 1));
        const double expected = -std::atan(std::sqrt(2.0) / 3.0) / 2.0;
        b.near(1, "1.alpha", "alpha = -arctan(sqrt2/3)/2", expected,
               r.angles ? r.angles->alpha : std::numeric_limits<double>::quiet_NaN(), 1e-5);
    }

    // 2. Exact roof curve on 21 uniform points.
    for (int i = 0; i <= 20; ++i) {
        const double p = i / 20.0;
        const auto range = detail::family_range(p);
        const auto res = convex_roof_rank2(range, opt.roof);
        const double expected = detail::roof_family_formula(p);
        char id[32];
        std::snprintf(id, sizeof id, "2.p=%.2f", p);
        b.report.checks.push_back({2, id, "roof = (2/3^(3/4))|2p-1|^(3/2), exact", expected, res.value, 1e-6,
                                   std::abs(res.value - expected) <= 1e-6 && res.exact});
        oracle_cases.push_back({id, range, expected});
    }

    // 3. Spot values.
    {
        const auto range = rank2_range(partial_trace(build("Psi4_6_2").state, 1));
        const Rank2Roof roof(range, opt.roof);
        for (double p0 : {(3.0 + sqrt3) / 6.0, (3.0 - sqrt3) / 6.0}) {
            const auto res = roof.at(p0);
            const std::string id = p0 > 0.5 ? "3a.p0+" : "3a.p0-";
            b.near(3, id, "roof at (3+-sqrt3)/6 = 2/(3 sqrt3)", 2.0 / (3.0 * sqrt3), res.value, 1e-6);
            oracle_cases.push_back({id, at_axis(range, p0), 2.0 / (3.0 * sqrt3)});
        }
        const auto r2 = rank2_range(partial_trace(build("Psi4_6_2").state, 2));
        const auto res2 = convex_roof_rank2(r2, opt.roof);
        b.near(3, "3b.rho2", "roof of rho_2 = 1/(3 sqrt2)", 1.0 / (3.0 * std::sqrt(2.0)), res2.value, 1e-9);
        oracle_cases.push_back({"3b.rho2", r2, 1.0 / (3.0 * std::sqrt(2.0))});
    }

    // 4. Closed-form roofs.
    {
        std::mt19937_64 rng(opt.seed);
        for (int draw = 0; draw < 10; ++draw) {
            const auto w = random_weights(5, rng);
            const auto range = rank2_range(partial_trace(build("Psi4_6_23", {w, 0.0, std::nullopt}).state, 3));
            const auto res = convex_roof_rank2(range, opt.roof);
            const std::string id = "4.rho3.draw" + std::to_string(draw);
            b.near(4, id, "roof of tr_3 Psi4_6;23 = sqrt(p1 p4)", std::sqrt(w[0] * w[3]), res.value, 1e-6);
            oracle_cases.push_back({id, range, std::sqrt(w[0] * w[3])});
        }
        const auto e42 = build("Psi4_4_2");
        const auto r42 = rank2_range(partial_trace(e42.state, 4));
        b.near(4, "4.tr4.Psi4_4;2", "roof of tr_4 Psi4_4;2 = sqrt(p1 p4)", std::sqrt(e42.p[0] * e42.p[3]),
               convex_roof_rank2(r42, opt.roof).value, 1e-6);
        oracle_cases.push_back({"4.tr4.Psi4_4;2", r42, std::sqrt(e42.p[0] * e42.p[3])});

        const auto e44 = build("Psi4_4_4");
        const auto r44 = rank2_range(partial_trace(e44.state, 3));
        const Rank2Roof roof44(r44, opt.roof);
        const double axis = 1.0 - e44.p[1];
        b.near(4, "4.tr3.Psi4_4;4", "roof of tr_3 Psi4_4;4 at p = 1-p2 = sqrt(p1 p3)", std::sqrt(e44.p[0] * e44.p[2]),
               roof44.at(axis).value, 1e-6);
        oracle_cases.push_back({"4.tr3.Psi4_4;4", at_axis(r44, axis), std::sqrt(e44.p[0] * e44.p[2])});
        // Linear structure: the roof interpolates the eigenstate values.
        const double top = roof44.at(1.0).value, bottom = roof44.at(0.0).value;
        double worst = 0.0;
        for (int i = 1; i < 10; ++i) {
            const double t = i / 10.0;
            worst = std::max(worst, std::abs(roof44.at(t).value - (t * top + (1.0 - t) * bottom)));
        }
        b.near(4, "4.tr3.Psi4_4;4.linear", "roof of tr_3 Psi4_4;4 is linear along the axis", 0.0, worst, 1e-9);
    }

    // 5. Concurrence patterns.
    {
        const auto s2 = build("Psi4_6_2").state;
        for (int i = 1; i <= 4; ++i)
            for (int j = i + 1; j <= 4; ++j)
                b.below(5, "5.Psi4_6;2.C" + std::to_string(i) + std::to_string(j), "concurrence vanishes", 1e-10,
                        concurrence(reduce(s2, {i, j})));
        const auto e23 = build("Psi4_6_23");
        const std::array<int, 4> J{3, 2, 5, 4};
        for (int i = 1; i <= 4; ++i)
            for (int j = i + 1; j <= 4; ++j) {
                const double a = e23.p[static_cast<std::size_t>(J[static_cast<std::size_t>(i - 1)] - 1)];
                const double c = e23.p[static_cast<std::size_t>(J[static_cast<std::size_t>(j - 1)] - 1)];
                b.near(5, "5.Psi4_6;23.C" + std::to_string(i) + std::to_string(j), "C_ij = sqrt(2 p_Ji p_Jj)",
                       std::sqrt(2.0 * a * c), concurrence(reduce(e23.state, {i, j})), 1e-9);
            }
        const auto e44 = build("Psi4_4_4");
        const auto& p = e44.p;
        for (int i = 1; i <= 4; ++i)
            for (int j = i + 1; j <= 4; ++j) {
                const double c = concurrence(reduce(e44.state, {i, j}));
                const std::string id = "5.Psi4_4;4.C" + std::to_string(i) + std::to_string(j);
                if (i == 1 && j == 2)
                    b.near(5, id, "C_12 = sqrt(2 p3 p4)", std::sqrt(2.0 * p[2] * p[3]), c, 1e-9);
                else if (i == 3 && j == 4)
                    b.near(5, id, "C_34 = sqrt(2 p1 p2)", std::sqrt(2.0 * p[0] * p[1]), c, 1e-9);
                else
                    b.below(5, id, "concurrence vanishes", 1e-10, c);
            }
    }

    const std::vector<std::string> derived{"Psi4_6_1", "Psi4_6_2", "Psi4_6_23", "Psi4_4_1", "Psi4_4_2", "Psi4_4_4"};

    // 6. Null cone.
    {
        for (const auto& name : derived)
            b.below(6, "6." + name, "all SL generators vanish", 1e-10,
                    sl_invariants_4q(build(name).state.normalized()).max_abs());
        const auto s4 = sl_invariants_4q(build("Psi4_4").state.normalized());
        b.above(6, "6.Psi4_4.deg4", "a degree-4 generator is nonzero", 0.01, std::max(std::abs(s4.L), std::abs(s4.M)));
        const auto s6 = sl_invariants_4q(build("Psi4_6").state.normalized());
        b.above(6, "6.Psi4_6.deg6", "the degree-6 generator is nonzero", 1e-6, std::abs(s6.D));
    }

    // 7. Balancedness.
    {
        const auto label = [](const std::string& n) {
            return classify_balance(SupportPattern::from_terms(build(n).terms)).label;
        };
        for (const auto& n : {"Psi4_6", "Psi4_4"}) b.truth(7, std::string("7.") + n, "c_balanced", label(n) == BalanceLabel::c_balanced);
        for (const auto& n : derived) b.truth(7, "7." + n, "a_balanced_only", label(n) == BalanceLabel::a_balanced_only);
        for (const auto& n : {"W3", "W4"}) b.truth(7, std::string("7.") + n, "unbalanced", label(n) == BalanceLabel::unbalanced);
    }

    // 8. Oracle.
    if (opt.run_oracle) {
        for (const auto& c : oracle_cases) {
            const auto t0 = std::chrono::steady_clock::now();
            const double v = brute_force_roof(c.range, opt.oracle);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            b.report.checks.push_back({8, "8." + c.id, "oracle in [analytic - 1e-6, analytic + 1e-3]", c.analytic, v,
                                       1e-3, v >= c.analytic - 1e-6 && v <= c.analytic + 1e-3});
            b.below(8, "8." + c.id + ".time", "oracle runtime in seconds", opt.oracle_time_limit, secs);
        }
    }

    // 9. Chord geometry.
    {
        const auto range = rank2_range(partial_trace(build("Psi4_6_2").state, 1));
        std::mt19937_64 rng(opt.seed + 9);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double recon = 0.0, l1_err = 0.0, p2_err = 0.0, l2_err = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double p = 0.01 + 0.98 * u(rng), p1 = u(rng), phi = 2.0 * kPi * u(rng);
            const auto s = bloch_split(p, p1);
            const auto z1 = member_state(range, {p1, phi});
            const auto z2 = member_state(range, {s.p2, phi + kPi});
            const CMatrix rho = p * range.unit1.projector() + (1.0 - p) * range.unit2.projector();
            recon = std::max(recon, (s.q1 * z1.projector() + s.q2 * z2.projector() - rho).cwiseAbs().maxCoeff());
            // Independent geometry: intersect the line with the unit sphere.
            const Eigen::Vector3d r1 = bloch_vector({p1, phi}), c(0.0, 0.0, 2.0 * p - 1.0);
            const Eigen::Vector3d d = c - r1;
            const Eigen::Vector3d r2 = r1 + (-2.0 * r1.dot(d) / d.squaredNorm()) * d;
            l1_err = std::max(l1_err, std::abs(s.l1 - d.norm()));
            l2_err = std::max(l2_err, std::abs(s.l2 - (r2 - c).norm()));
            p2_err = std::max(p2_err, std::abs(s.p2 - 0.5 * (1.0 + r2.z())));
        }
        b.near(9, "9.reconstruction", "q1 Z1 + q2 Z2 = rho", 0.0, recon, 1e-10);
        b.near(9, "9.l1", "l1 formula matches the geometry", 0.0, l1_err, 1e-12);
        b.near(9, "9.p2", "p2 formula matches the geometry", 0.0, p2_err, 1e-12);
        b.near(9, "9.l2", "chord-power l2 matches the geometry", 0.0, l2_err, 1e-12);
    }

    // 10. Curve and zero-polytope structure.
    {
        const auto range = rank2_range(partial_trace(build("Psi4_6_2").state, 1));
        const auto curve = characteristic_curve(range, kPi, 201);
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < curve.samples.size(); ++i)
            worst = std::min(worst, curve.samples[i - 1].second - 2.0 * curve.samples[i].second +
                                        curve.samples[i + 1].second);
        b.above(10, "10.convex", "second differences of the phi = pi curve", -1e-9, worst);

        const auto z = zero_polytope(range);
        bool simple = false, triple = false;
        for (const auto& r : z.roots) {
            const bool half = std::abs(r.at.p - 0.5) < 1e-8;
            const double phi = wrap_phase(r.at.phi);
            if (half && r.multiplicity == 1 && std::min(phi, 2.0 * kPi - phi) < 1e-6) simple = true;
            if (half && r.multiplicity == 3 && std::abs(phi - kPi) < 1e-6) triple = true;
        }
        b.truth(10, "10.rho1.zeros", "simple zero at (1/2, 0), threefold zero at (1/2, pi)",
                simple && triple && z.roots.size() == 2);

        const auto z3 = zero_polytope(rank2_range(partial_trace(build("Psi4_6_23").state, 3)));
        const bool fourfold = z3.roots.size() == 1 && z3.roots[0].multiplicity == 4 &&
                              (z3.roots[0].at.p < 1e-12 || z3.roots[0].at.p > 1.0 - 1e-12);
        b.truth(10, "10.rho3.zeros", "single fourfold root at an interval endpoint", fourfold);
    }

    // 11. Monogamy.
    {
        for (const auto& name : {"Psi4_6", "Psi4_4", "W4", "Psi4_6_1", "Psi4_6_2", "Psi4_6_23", "Psi4_4_1", "Psi4_4_2",
                                 "Psi4_4_4"}) {
            const auto psi = build(name).state;
            std::map<SiteTriple, double> roofs;
            for (int traced = 4; traced >= 1; --traced) {
                const auto keep = detail::all_sites_but(traced, 4);
                roofs[{keep[0], keep[1], keep[2]}] =
                    convex_roof_rank2(rank2_range(partial_trace(psi, traced)), opt.roof).upper_bound;
            }
            const auto rep = monogamy_report(psi, roofs);
            double slack = std::numeric_limits<double>::infinity();
            for (const auto& row : rep.rows)
                slack = std::min(slack, row.one_tangle - row.concurrence_sq - row.threetangle_roof_sq);
            b.above(11, std::string("11.") + name, "tau1 - sum C^2 - sum roof^2 (min over focus)", -1e-9, slack);
        }
        const auto w4 = build("W4").state;
        double worst = 0.0;
        for (int i = 1; i <= 4; ++i) {
            double c2 = 0.0;
            for (int j = 1; j <= 4; ++j)
                if (j != i) {
                    const double c = concurrence(reduce(w4, {std::min(i, j), std::max(i, j)}));
                    c2 += c * c;
                }
            worst = std::max(worst, std::abs(one_tangle(w4, i) - c2));
        }
        b.near(11, "11.W4.equality", "W4: tau1 = sum C^2", 0.0, worst, 1e-9);
    }
    return b.report;
}

inline json to_json(const VerifyReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"criterion", c.criterion},
                          {"id", c.id},
                          {"description", c.description},
                          {"expected", c.expected},
                          {"computed", c.computed},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
    return {{"checks", checks}, {"summary", {{"passed", r.passed()}, {"failed", r.failed()}}}};
}

} // namespace tangle_roof
