#include <gtest/gtest.h>

#include <random>

#include "tangle_roof/catalog.hpp"
#include "tangle_roof/invariants.hpp"
#include "tangle_roof/nullcone.hpp"
#include "tangle_roof/roofkit.hpp"

using namespace tangle_roof;

namespace {

const std::vector<std::string> derived{"Psi4_6_1", "Psi4_6_2", "Psi4_6_23", "Psi4_4_1", "Psi4_4_2", "Psi4_4_4"};

void check_expectations(const CatalogEntry& e) {
    const auto x = expected_quantities(e);
    for (const auto& [site, ev] : x.roof_by_trace) {
        const auto r = convex_roof_rank2(rank2_range(partial_trace(e.state, site)));
        EXPECT_NEAR(r.value, ev.value, 1e-6) << e.name << " tr" << site << " (" << ev.note << ")";
        EXPECT_TRUE(r.exact) << e.name << " tr" << site;
    }
    for (const auto& [pair, ev] : x.concurrence)
        EXPECT_NEAR(concurrence(reduce(e.state, {pair[0], pair[1]})), ev.value, 1e-8)
            << e.name << " C" << pair[0] << pair[1];
    if (x.null_cone) {
        EXPECT_EQ(in_null_cone(e.state), *x.null_cone) << e.name;
    }
    if (x.balance) {
        EXPECT_EQ(classify_balance(SupportPattern::from_terms(e.terms)).label, *x.balance) << e.name;
    }
}

} // namespace

TEST(Catalog, EveryEntryBuildsNormalized) {
    for (const auto& name : catalog_names()) {
        const auto e = build(name);
        EXPECT_TRUE(e.state.is_normalized(1e-12)) << name;
        EXPECT_EQ(e.terms.terms.size(), e.p.size());
        EXPECT_FALSE(catalog_summary(name).empty());
        EXPECT_EQ(to_json(e).at("n"), e.state.n_qubits());
    }
    EXPECT_EQ(build("W3").state.n_qubits(), 3);
    EXPECT_EQ(build("Psi4_6").state.n_qubits(), 4);
}

TEST(Catalog, ReferenceAmplitudes) {
    const auto psi = build("Psi4_6").state;
    EXPECT_NEAR(psi[index_of("1111")].real(), 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(psi[index_of("0100")].real(), 1.0 / std::sqrt(6.0), 1e-15);
    const auto p44 = build("Psi4_4").state;
    for (const char* b : {"1111", "1100", "0010", "0001"}) EXPECT_NEAR(p44[index_of(b)].real(), 0.5, 1e-15);
}

TEST(Catalog, CanonicalOneFlipWeights) {
    const double q = (3.0 - std::sqrt(3.0)) / 6.0;
    const auto w = one_flip_weights(q);
    const auto e = build("Psi4_6_2");
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(e.p[i], w[i], 1e-15);
    EXPECT_NEAR(w[0] + w[1] + w[2] + w[3] + w[4], 1.0, 1e-15);
}

TEST(Catalog, Errors) {
    EXPECT_THROW(build("Psi4_7"), UnknownState);
    EXPECT_THROW(catalog_summary("nope"), UnknownState);
    const auto with_p = [](std::vector<double> p) {
        CatalogParams c;
        c.p = std::move(p);
        return c;
    };
    EXPECT_THROW(build("W3", with_p({0.5, 0.5})), ParamError);
    EXPECT_THROW(build("W3", with_p({0.5, 0.6, -0.1})), ParamError);
    EXPECT_THROW(build("W3", with_p({0.5, 0.5, 0.5})), ParamError);
    CatalogParams bad_phases;
    bad_phases.phases = std::vector<double>{0.0};
    EXPECT_THROW(build("W3", bad_phases), ParamError);
}

TEST(Catalog, EtaIsAPhaseOnOneTerm) {
    CatalogParams params;
    params.eta = 0.9;
    const auto a = build("Psi4_6_2"), b = build("Psi4_6_2", params);
    int changed = 0;
    for (std::size_t j = 0; j < a.terms.terms.size(); ++j) {
        EXPECT_NEAR(std::abs(a.terms.terms[j].amplitude), std::abs(b.terms.terms[j].amplitude), 1e-15);
        if (std::abs(a.terms.terms[j].amplitude - b.terms.terms[j].amplitude) > 1e-12) ++changed;
    }
    EXPECT_EQ(changed, 1);
}

TEST(Catalog, FlipsReproduceDerivedStates) {
    std::mt19937_64 rng(31);
    for (const auto& name : derived) {
        const auto d = build(name);
        ASSERT_FALSE(d.parent.empty());
        CatalogParams params;
        params.p = random_weights(d.p.size(), rng);
        const auto parent = build(d.parent, params);
        const auto child = build(name, params);
        const auto flipped = partial_spin_flip(parent.terms, d.flipped);
        EXPECT_LT((flipped.to_state().amplitudes() - child.state.amplitudes()).norm(), 1e-15) << name;
    }
}

TEST(Catalog, RandomWeightsLieOnTheSimplex) {
    std::mt19937_64 rng(32);
    for (int i = 0; i < 100; ++i) {
        const auto w = random_weights(5, rng);
        double s = 0.0;
        for (double v : w) {
            EXPECT_GE(v, 0.0);
            s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-15);
    }
}

TEST(Catalog, ExpectedQuantitiesAtDefaults) {
    for (const auto& name : catalog_names()) check_expectations(build(name));
}

TEST(Catalog, ExpectedQuantitiesOnRandomDraws) {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (const auto& name : derived) {
        for (int draw = 0; draw < 20; ++draw) {
            CatalogParams params;
            params.p = random_weights(build(name).p.size(), rng);
            params.eta = angle(rng);
            check_expectations(build(name, params));
        }
    }
    for (int draw = 0; draw < 20; ++draw) {
        CatalogParams params;
        params.p = random_weights(4, rng);
        check_expectations(build("W4", params));
    }
}

TEST(Catalog, ExpectedRhoOneRoofAlongTheFamily) {
    for (double q : {0.05, 0.2, 0.35, 0.5, 0.65, 0.9}) {
        CatalogParams params;
        params.p = one_flip_weights(q);
        check_expectations(build("Psi4_6_2", params));
    }
}

TEST(Catalog, ThreetangleFreeReductions) {
    // Every member of these ranges has vanishing threetangle.
    std::mt19937_64 rng(34);
    const std::vector<std::pair<std::string, std::vector<int>>> cases{
        {"Psi4_6_1", {1, 2, 3, 4}}, {"Psi4_4_1", {1, 2}}, {"Psi4_4_2", {1, 2}}, {"Psi4_4_4", {1, 2}}};
    for (const auto& [name, sites] : cases) {
        CatalogParams params;
        params.p = random_weights(build(name).p.size(), rng);
        const auto psi = build(name, params).state;
        for (int s : sites) {
            const auto z = zero_polytope(rank2_range(partial_trace(psi, s)));
            EXPECT_TRUE(z.all_zero) << name << " tr" << s;
        }
    }
}

TEST(Catalog, PrintedFormsDifferOnlyByConvention) {
    const auto x = expected_quantities(build("Psi4_6_23"));
    const auto& r3 = x.roof_by_trace.at(3);
    ASSERT_TRUE(r3.printed.has_value());
    EXPECT_NEAR(r3.value, 2.0 * *r3.printed, 1e-15);
    const auto& c12 = x.concurrence.at({1, 2});
    ASSERT_TRUE(c12.printed.has_value());
    EXPECT_NEAR(c12.value, std::sqrt(2.0) * *c12.printed, 1e-15);
}
