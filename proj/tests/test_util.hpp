#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "tangle_roof/statekit.hpp"

namespace testutil {

using tangle_roof::CMatrix;
using tangle_roof::Complex;
using tangle_roof::CVector;
using tangle_roof::PureState;

inline CVector gaussian_vector(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVector v(static_cast<Eigen::Index>(d));
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

inline PureState random_state(int n, std::mt19937_64& rng) {
    CVector v = gaussian_vector(std::size_t{1} << n, rng);
    return PureState(n, v / v.norm());
}

inline Eigen::Matrix2cd random_gl2(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::Matrix2cd m;
    for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = {g(rng), g(rng)};
    return m;
}

inline Eigen::Matrix2cd random_sl2(std::mt19937_64& rng) {
    Eigen::Matrix2cd m = random_gl2(rng);
    return m / std::sqrt(m.determinant());
}

inline Eigen::Matrix2cd random_u2(std::mt19937_64& rng) {
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(random_gl2(rng));
    return qr.householderQ();
}

// Applies a 2x2 operator on one site (1-based, site 1 most significant).
inline CVector apply_local(const CVector& v, int n, int site, const Eigen::Matrix2cd& a) {
    CVector out = CVector::Zero(v.size());
    const std::size_t mask = std::size_t{1} << (n - site);
    for (std::size_t i = 0; i < static_cast<std::size_t>(v.size()); ++i) {
        const int b = (i & mask) ? 1 : 0;
        const std::size_t i0 = i & ~mask, i1 = i | mask;
        out(static_cast<Eigen::Index>(i0)) += a(0, b) * v(static_cast<Eigen::Index>(i));
        out(static_cast<Eigen::Index>(i1)) += a(1, b) * v(static_cast<Eigen::Index>(i));
    }
    return out;
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace testutil
