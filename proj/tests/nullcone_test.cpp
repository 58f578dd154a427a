#include <gtest/gtest.h>

#include <random>

#include "tangle_roof/invariants.hpp"
#include "tangle_roof/nullcone.hpp"
#include "test_util.hpp"

using namespace tangle_roof;

namespace {

TermList terms(int n, std::vector<std::string> bits) {
    TermList t{n, {}};
    for (auto& b : bits) t.terms.push_back({b, 1.0});
    return t;
}

SupportPattern support(int n, std::vector<std::string> bits) { return SupportPattern::from_terms(terms(n, bits)); }

// Spin-weighted column sums of the witness, one per site.
std::vector<Rational> site_sums(const SupportPattern& s, const std::vector<Rational>& w) {
    std::vector<Rational> out(static_cast<std::size_t>(s.n_qubits));
    for (std::size_t j = 0; j < w.size(); ++j)
        for (int k = 0; k < s.n_qubits; ++k)
            out[static_cast<std::size_t>(k)] += s.bitvectors[j][static_cast<std::size_t>(k)] == '1' ? w[j] : -w[j];
    return out;
}

void expect_valid_witness(const SupportPattern& s, const BalanceClass& c) {
    if (c.label == BalanceLabel::unbalanced) {
        EXPECT_TRUE(c.witness.empty());
        return;
    }
    ASSERT_EQ(c.witness.size(), s.bitvectors.size());
    for (const auto& v : site_sums(s, c.witness)) EXPECT_EQ(v, 0);
    Rational sum = 0;
    for (const auto& x : c.witness) sum += x;
    EXPECT_GT(sum, 0);
    if (c.label == BalanceLabel::c_balanced) {
        for (const auto& x : c.witness) EXPECT_GT(x, 0);
    }
}

// Independent rank test for affine solvability of {A w = 0, sum w = 1}.
bool affine_solvable(const SupportPattern& s) {
    const auto m = static_cast<Eigen::Index>(s.bitvectors.size());
    Eigen::MatrixXd a(s.n_qubits + 1, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (int k = 0; k < s.n_qubits; ++k)
            a(k, j) = s.bitvectors[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] == '1' ? 1.0 : -1.0;
        a(s.n_qubits, j) = 1.0;
    }
    Eigen::MatrixXd aug(a.rows(), m + 1);
    aug << a, Eigen::VectorXd::Unit(a.rows(), s.n_qubits);
    return Eigen::FullPivLU<Eigen::MatrixXd>(a).rank() == Eigen::FullPivLU<Eigen::MatrixXd>(aug).rank();
}

std::vector<std::string> random_support(int n, std::size_t count, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(std::size_t{1} << n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(bits_of(idx[i], n));
    return out;
}

} // namespace

TEST(Flip, ComplementsSelectedComponents) {
    const auto t = terms(4, {"1111", "1000", "0100"});
    const auto f = partial_spin_flip(t, {2});
    EXPECT_EQ(f.terms[0].bits, "1111");
    EXPECT_EQ(f.terms[1].bits, "0111");
    EXPECT_EQ(f.terms[2].bits, "0100");
    EXPECT_EQ(f.terms[1].amplitude, t.terms[1].amplitude);
}

TEST(Flip, IsAnInvolution) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const auto bits = random_support(4, 5, rng);
        const auto t = terms(4, bits);
        std::set<int> c;
        for (int k = 1; k <= 5; ++k)
            if (rng() % 2) c.insert(k);
        try {
            const auto back = partial_spin_flip(partial_spin_flip(t, c), c);
            for (std::size_t j = 0; j < bits.size(); ++j) EXPECT_EQ(back.terms[j].bits, bits[j]);
        } catch (const CollisionError&) {
        }
    }
}

TEST(Flip, Errors) {
    const auto t = terms(3, {"111", "000"});
    EXPECT_THROW(partial_spin_flip(t, {0}), IndexError);
    EXPECT_THROW(partial_spin_flip(t, {3}), IndexError);
    EXPECT_THROW(partial_spin_flip(t, {1}), CollisionError);
}

TEST(Flip, StateOverloadUsesIndexOrder) {
    const auto psi = terms(2, {"11", "01"}).to_state();
    const auto flipped = partial_spin_flip(psi, {1}); // first nonzero term is 01
    EXPECT_EQ(flipped[index_of("10")], Complex(1.0, 0.0));
    EXPECT_EQ(flipped[index_of("11")], Complex(1.0, 0.0));
}

TEST(Balance, KnownSupports) {
    const auto psi46 = support(4, {"1111", "1000", "0100", "0010", "0001"});
    const auto c46 = classify_balance(psi46);
    EXPECT_EQ(c46.label, BalanceLabel::c_balanced);
    EXPECT_EQ(c46.witness_strings(), (std::vector<std::string>{"2/1", "1/1", "1/1", "1/1", "1/1"}));

    const auto ghz = classify_balance(support(3, {"000", "111"}));
    EXPECT_EQ(ghz.label, BalanceLabel::c_balanced);

    EXPECT_EQ(classify_balance(support(3, {"100", "010", "001"})).label, BalanceLabel::unbalanced);
    EXPECT_EQ(classify_balance(support(4, {"1000", "0100", "0010", "0001"})).label, BalanceLabel::unbalanced);

    const auto flipped = support(4, {"0000", "1000", "0100", "0010", "0001"});
    EXPECT_EQ(classify_balance(flipped).label, BalanceLabel::a_balanced_only);
    expect_valid_witness(flipped, classify_balance(flipped));
}

TEST(Balance, WitnessesAreValidAndLabelsConsistent) {
    std::mt19937_64 rng(22);
    int seen[3] = {0, 0, 0};
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + trial % 2;
        const auto s = support(n, random_support(n, 2 + rng() % 5, rng));
        const auto c = classify_balance(s);
        ++seen[static_cast<int>(c.label)];
        expect_valid_witness(s, c);
        // c-balanced implies a-balanced, and the label agrees with an independent rank test.
        EXPECT_EQ(c.label != BalanceLabel::unbalanced, affine_solvable(s));
    }
    EXPECT_GT(seen[0], 0);
    EXPECT_GT(seen[1] + seen[2], 0);
}

TEST(Balance, SupportsWithoutBalancedSubsetsLieInTheNullCone) {
    // If no subset is c-balanced there is no nonzero w >= 0 with A w = 0, so some
    // diagonal one-parameter subgroup contracts every term.
    std::mt19937_64 rng(23);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto bits = random_support(4, 2 + rng() % 5, rng);
        bool any = false;
        for (unsigned mask = 1; mask < (1u << bits.size()) && !any; ++mask) {
            std::vector<std::string> sub;
            for (std::size_t j = 0; j < bits.size(); ++j)
                if (mask & (1u << j)) sub.push_back(bits[j]);
            any = classify_balance(support(4, sub)).label == BalanceLabel::c_balanced;
        }
        if (any) continue;
        TermList t{4, {}};
        for (const auto& b : bits) t.terms.push_back({b, testutil::gaussian_vector(1, rng)(0)});
        EXPECT_TRUE(in_null_cone(t.to_state())) << "support of " << bits.size() << " terms";
        ++checked;
    }
    EXPECT_GT(checked, 10);
}

TEST(Balance, CriticalStatesOfCBalancedSupportsAreNotNull) {
    // With pairwise Hamming distance >= 2 the one-site reductions are diagonal, so
    // weights proportional to a c-witness make them maximally mixed.
    std::mt19937_64 rng(24);
    int checked = 0;
    for (int trial = 0; trial < 300 && checked < 15; ++trial) {
        const auto bits = random_support(4, 2 + rng() % 5, rng);
        bool spread = true;
        for (std::size_t i = 0; i < bits.size(); ++i)
            for (std::size_t j = i + 1; j < bits.size(); ++j) {
                int d = 0;
                for (int k = 0; k < 4; ++k) d += bits[i][static_cast<std::size_t>(k)] != bits[j][static_cast<std::size_t>(k)];
                spread = spread && d >= 2;
            }
        if (!spread) continue;
        const auto c = classify_balance(support(4, bits));
        if (c.label != BalanceLabel::c_balanced) continue;
        Rational total = 0;
        for (const auto& w : c.witness) total += w;
        TermList t{4, {}};
        std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
        for (std::size_t j = 0; j < bits.size(); ++j)
            t.terms.push_back({bits[j], std::polar(std::sqrt(static_cast<double>(c.witness[j] / total)), phase(rng))});
        const auto psi = t.to_state();
        for (int k = 1; k <= 4; ++k) EXPECT_NEAR(one_tangle(psi, k), 1.0, 1e-12);
        EXPECT_FALSE(in_null_cone(psi));
        ++checked;
    }
    EXPECT_GT(checked, 3);
}

TEST(Balance, WitnessNormalization) {
    const auto w = detail::normalize_witness({Rational(-4, 3), Rational(2, 3), Rational(2, 3), Rational(2, 3), Rational(2, 3)});
    EXPECT_EQ(w, (std::vector<Rational>{-2, 1, 1, 1, 1}));
    const auto z = detail::normalize_witness({Rational(-1), Rational(1)});
    EXPECT_EQ(z, (std::vector<Rational>{1, -1}));
}

TEST(Balance, Errors) {
    EXPECT_THROW(classify_balance(SupportPattern{}), ShapeError);
    EXPECT_THROW(SupportPattern::from_terms(terms(2, {"01", "01"})), DuplicateTerm);
    EXPECT_THROW(SupportPattern::from_terms(terms(2, {"011"})), ShapeError);
}

TEST(Balance, ZeroAmplitudesAreNotSupport) {
    auto t = terms(3, {"000", "111", "100"});
    t.terms[2].amplitude = 0.0;
    const auto s = SupportPattern::from_terms(t);
    EXPECT_EQ(s.bitvectors.size(), 2u);
    EXPECT_EQ(s.term_order, (std::vector<int>{1, 2}));
    EXPECT_EQ(to_json(classify_balance(s)).at("label"), "c_balanced");
}
