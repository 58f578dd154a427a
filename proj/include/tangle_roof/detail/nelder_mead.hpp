#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace tangle_roof::detail {

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int evaluations = 0;
};

struct NelderMeadOptions {
    int max_evaluations = 4000;
    double f_tol = 1e-13; // spread of simplex values
    double x_tol = 1e-10; // simplex diameter
};

// Nelder-Mead with the dimension-adaptive coefficients of Gao and Han.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, double step, const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / dn;
    const double gamma = 0.75 - 0.5 / dn;
    const double delta = 1.0 - 1.0 / dn;

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
    std::vector<double> fv(n + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    while (evals < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double diam = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k) diam = std::max(diam, std::abs(simplex[i][k] - simplex[best][k]));
        if (fv[worst] - fv[best] <= opt.f_tol && diam <= opt.x_tol) break;
        if (diam <= opt.x_tol * 1e-3) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / dn;

        for (std::size_t k = 0; k < n; ++k) xr[k] = centroid[k] + alpha * (centroid[k] - simplex[worst][k]);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            for (std::size_t k = 0; k < n; ++k) xe[k] = centroid[k] + beta * (xr[k] - centroid[k]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        for (std::size_t k = 0; k < n; ++k)
            xc[k] = outside ? centroid[k] + gamma * (xr[k] - centroid[k])
                            : centroid[k] - gamma * (centroid[k] - simplex[worst][k]);
        const double fc = eval(xc);
        if (fc < std::min(fr, fv[worst])) {
            simplex[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k)
                simplex[i][k] = simplex[best][k] + delta * (simplex[i][k] - simplex[best][k]);
            fv[i] = eval(simplex[i]);
        }
    }
    const auto it = std::min_element(fv.begin(), fv.end());
    return {simplex[static_cast<std::size_t>(it - fv.begin())], *it, evals};
}

} // namespace tangle_roof::detail
