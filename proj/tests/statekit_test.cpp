#include <gtest/gtest.h>

#include <random>
#include <string>

#include "tangle_roof/statekit.hpp"
#include "test_util.hpp"

using namespace tangle_roof;
using testutil::max_abs;

namespace {

// Partial trace by explicit summation over bitstrings.
CMatrix trace_by_strings(const PureState& psi, const std::vector<int>& keep) {
    const int n = psi.n_qubits();
    const std::size_t kd = std::size_t{1} << keep.size();
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(kd), static_cast<Eigen::Index>(kd));
    for (std::size_t a = 0; a < psi.dim(); ++a)
        for (std::size_t b = 0; b < psi.dim(); ++b) {
            const std::string sa = bits_of(a, n), sb = bits_of(b, n);
            bool same = true;
            std::string ka, kb;
            for (int s = 1; s <= n; ++s) {
                const bool kept = std::find(keep.begin(), keep.end(), s) != keep.end();
                if (kept) {
                    ka += sa[static_cast<std::size_t>(s - 1)];
                    kb += sb[static_cast<std::size_t>(s - 1)];
                } else if (sa[static_cast<std::size_t>(s - 1)] != sb[static_cast<std::size_t>(s - 1)]) {
                    same = false;
                }
            }
            if (same)
                out(static_cast<Eigen::Index>(std::stoul(ka, nullptr, 2)), static_cast<Eigen::Index>(std::stoul(kb, nullptr, 2))) +=
                    psi[a] * std::conj(psi[b]);
        }
    return out;
}

std::vector<std::vector<int>> subsets(int n) {
    std::vector<std::vector<int>> out;
    for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> s;
        for (int k = 1; k <= n; ++k)
            if (mask & (1 << (k - 1))) s.push_back(k);
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST(Basis, FirstQubitIsMostSignificant) {
    EXPECT_EQ(index_of("1000"), 8u);
    EXPECT_EQ(index_of("0001"), 1u);
    EXPECT_EQ(bits_of(6, 3), "110");
    EXPECT_EQ(bit_of(4, 1, 3), 1);
    EXPECT_EQ(bit_of(4, 3, 3), 0);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(index_of(bits_of(i, 4)), i);
}

TEST(PureStateTest, ShapeChecks) {
    EXPECT_THROW(PureState(2, CVector::Zero(3)), ShapeError);
    EXPECT_THROW(PureState::basis(2, 4), IndexError);
    EXPECT_THROW(PureState(2, CVector::Zero(4)).normalized(), ShapeError);
    const auto b = PureState::basis(3, 5);
    EXPECT_EQ(b[5], Complex(1.0, 0.0));
    EXPECT_TRUE(b.is_normalized());
}

TEST(Parse, TermsInDocumentOrder) {
    const auto doc = R"({"n": 3, "terms": [{"bits": "111", "re": 0.6}, {"bits": "000", "re": 0.0, "im": 0.8}]})";
    const auto loaded = load_state(std::string_view(doc));
    ASSERT_EQ(loaded.terms.terms.size(), 2u);
    EXPECT_EQ(loaded.terms.terms[0].bits, "111");
    EXPECT_TRUE(loaded.normalized);
    EXPECT_NEAR(loaded.state[7].real(), 0.6, 1e-15);
    EXPECT_NEAR(loaded.state[0].imag(), 0.8, 1e-15);
}

TEST(Parse, Errors) {
    EXPECT_THROW(load_state(std::string_view("{not json")), ParseError);
    EXPECT_THROW(load_state(std::string_view(R"({"terms": []})")), ParseError);
    EXPECT_THROW(load_state(std::string_view(R"({"n": 2, "terms": [{"bits": "01"}]})")), ParseError);
    EXPECT_THROW(load_state(std::string_view(R"({"n": 2, "terms": [{"bits": "01", "re": "x"}]})")), ParseError);
    EXPECT_THROW(load_state(std::string_view(R"({"n": 2, "terms": [{"bits": "011", "re": 1}]})")), ShapeError);
    EXPECT_THROW(load_state(std::string_view(R"({"n": 2, "terms": [{"bits": "01", "re": 1}, {"bits": "01", "re": 1}]})")),
                 DuplicateTerm);
}

TEST(Parse, UnnormalizedIsFlagged) {
    const auto loaded = load_state(std::string_view(R"({"n": 1, "terms": [{"bits": "0", "re": 2}]})"));
    EXPECT_FALSE(loaded.normalized);
}

TEST(Json, TermRoundTrip) {
    std::mt19937_64 rng(1);
    const auto psi = testutil::random_state(3, rng);
    const auto back = load_state(to_json(psi)).state;
    EXPECT_LT((back.amplitudes() - psi.amplitudes()).norm(), 1e-15);
}

TEST(Json, DensityRoundTrip) {
    std::mt19937_64 rng(2);
    const auto rho = reduce(testutil::random_state(4, rng), {1, 3});
    const auto back = density_from_json(to_json(rho));
    EXPECT_EQ(back.n_qubits(), 2);
    EXPECT_LT(max_abs(back.matrix() - rho.matrix()), 1e-16);
    EXPECT_THROW(density_from_json(json{{"n", 1}}), ParseError);
    EXPECT_THROW(density_from_json(json{{"n", 1}, {"rows", json::array({json::array()})}}), ShapeError);
}

TEST(Reduce, MatchesDirectSummation) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const auto psi = testutil::random_state(4, rng);
        for (const auto& keep : subsets(4)) {
            const auto rho = reduce(psi, keep);
            EXPECT_LT(max_abs(rho.matrix() - trace_by_strings(psi, keep)), 1e-14);
        }
    }
}

TEST(Reduce, IsAStateAndComposes) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const auto psi = testutil::random_state(4, rng);
        for (const auto& keep : subsets(4)) {
            const auto rho = reduce(psi, keep);
            EXPECT_TRUE(rho.is_hermitian(1e-14));
            EXPECT_NEAR(rho.trace(), 1.0, 1e-13);
            EXPECT_GT(rho.eigenvalues().minCoeff(), -1e-13);
            const auto via_mixed = reduce(DensityMatrix::from_pure(psi), keep);
            EXPECT_LT(max_abs(via_mixed.matrix() - rho.matrix()), 1e-14);
        }
        const auto nested = reduce(partial_trace(psi, 4), {1, 2});
        EXPECT_LT(max_abs(nested.matrix() - reduce(psi, {1, 2}).matrix()), 1e-14);
    }
}

TEST(Reduce, KeepOrderDoesNotMatter) {
    std::mt19937_64 rng(5);
    const auto psi = testutil::random_state(3, rng);
    EXPECT_EQ(max_abs(reduce(psi, {3, 1}).matrix() - reduce(psi, {1, 3}).matrix()), 0.0);
}

TEST(Reduce, InvariantUnderUnitariesOnTracedSites) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const auto psi = testutil::random_state(4, rng);
        CVector v = testutil::apply_local(psi.amplitudes(), 4, 2, testutil::random_u2(rng));
        v = testutil::apply_local(v, 4, 4, testutil::random_u2(rng));
        EXPECT_LT(max_abs(reduce(PureState(4, v), {1, 3}).matrix() - reduce(psi, {1, 3}).matrix()), 1e-13);
    }
}

TEST(Reduce, Errors) {
    const auto psi = PureState::basis(3, 0);
    EXPECT_THROW(reduce(psi, {}), ShapeError);
    EXPECT_THROW(reduce(psi, {1, 1}), IndexError);
    EXPECT_THROW(reduce(psi, {0}), IndexError);
    EXPECT_THROW(reduce(psi, {4}), IndexError);
    EXPECT_THROW(partial_trace(psi, 5), IndexError);
    EXPECT_THROW(partial_trace(PureState::basis(1, 0), 1), ShapeError);
}

TEST(RankTwo, ReconstructsAndOrders) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = partial_trace(testutil::random_state(4, rng), 1 + trial % 4);
        const auto r = rank2_range(rho);
        EXPECT_LT(max_abs(r.reconstruct() - rho.matrix()), 1e-13);
        EXPECT_GE(r.P1, r.P2);
        EXPECT_NEAR(r.P1 + r.P2, 1.0, 1e-13);
        EXPECT_NEAR(r.unit1.norm(), 1.0, 1e-13);
        EXPECT_NEAR(r.unit2.norm(), 1.0, 1e-13);
        EXPECT_LT(std::abs(r.unit1.amplitudes().dot(r.unit2.amplitudes())), 1e-13);
        EXPECT_NEAR(r.psi1.norm_squared(), r.P1, 1e-13);
    }
}

TEST(RankTwo, RankOneCompletesTheBasis) {
    std::mt19937_64 rng(8);
    const auto psi = testutil::random_state(3, rng);
    const auto r = rank2_range(DensityMatrix::from_pure(psi));
    EXPECT_NEAR(r.P1, 1.0, 1e-13);
    EXPECT_EQ(r.P2, 0.0);
    EXPECT_NEAR(std::abs(r.unit1.amplitudes().dot(psi.amplitudes())), 1.0, 1e-13);
    EXPECT_LT(std::abs(r.unit1.amplitudes().dot(r.unit2.amplitudes())), 1e-13);
}

TEST(RankTwo, RejectsRankThree) {
    const DensityMatrix mixed(3, CMatrix::Identity(8, 8) / 8.0);
    EXPECT_THROW(rank2_range(mixed), RankError);
}

TEST(RankTwo, DegenerateEigenvaluesAreCanonical) {
    CMatrix m = CMatrix::Zero(8, 8);
    m(0, 0) = m(7, 7) = 0.5;
    const auto r = rank2_range(DensityMatrix(3, m));
    EXPECT_NEAR(r.P1, 0.5, 1e-14);
    EXPECT_NEAR(r.P2, 0.5, 1e-14);
    EXPECT_LT(max_abs(r.reconstruct() - m), 1e-14);
    const auto again = rank2_range(DensityMatrix(3, m));
    EXPECT_LT((again.unit1.amplitudes() - r.unit1.amplitudes()).norm(), 1e-15);
}

TEST(FamilyParams, WeightsSplitTheRemainder) {
    for (double q : {0.1, 0.3, 0.5, 0.8}) {
        const auto f = DerivedFamilyParams::from_q(0.5, q);
        EXPECT_NEAR(f.p1() + f.p2(), 0.5, 1e-15);
        EXPECT_NEAR(f.p1(), 0.5 * std::cos(f.beta) * std::cos(f.beta), 1e-15);
    }
}
