#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "condmix/errors.hpp"

namespace condmix {

struct Contraction {
    std::function<double(double)> f;
    std::function<double(double)> df;
};

// b(x,y) = (kx mod 1, v_c(y)) with c = clamp(ceil(kx), 1, k).  The boundary
// x = i/k belongs to branch i (the left cell), matching the ceiling; x = 1
// stays on branch k with image x' = 1.
struct BakerMap {
    int k;
    std::vector<Contraction> v;
    double mu_bound;

    BakerMap(int k_, std::vector<Contraction> v_, double mu_bound_)
        : k(k_), v(std::move(v_)), mu_bound(mu_bound_) {
        if (k < 2) throw DomainError("baker: k must be at least 2");
        if (static_cast<int>(v.size()) != k)
            throw DomainError("baker: need exactly one contraction per branch");
        if (!(mu_bound > 0.0 && mu_bound < 1.0))
            throw DomainError("baker: contraction bound outside (0,1)");

        // Invariant checks: exact for the linear family, grid-sampled for
        // plugins.  Images must stay in [0,1], derivatives under the bound,
        // and the open images must be pairwise disjoint.
        const int grid = 256;
        std::vector<double> lo(v.size(), 1.0), hi(v.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            for (int g = 0; g <= grid; ++g) {
                const double y = static_cast<double>(g) / grid;
                const double fy = v[i].f(y);
                if (fy < 0.0 || fy > 1.0)
                    throw DomainError("baker: branch image leaves [0,1]");
                if (std::fabs(v[i].df(y)) > mu_bound + 1e-12)
                    throw DomainError("baker: derivative exceeds the contraction bound");
                lo[i] = std::min(lo[i], fy);
                hi[i] = std::max(hi[i], fy);
            }
        }
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return lo[a] < lo[b]; });
        for (std::size_t i = 1; i < order.size(); ++i) {
            if (hi[order[i - 1]] > lo[order[i]] + 1e-12)
                throw DomainError("baker: branch images overlap");
        }
    }

    static BakerMap linear(int k_, double mu, const std::vector<double>& offsets) {
        std::vector<Contraction> vs;
        vs.reserve(offsets.size());
        for (const double o : offsets)
            vs.push_back({[mu, o](double y) { return mu * y + o; },
                          [mu](double) { return mu; }});
        return BakerMap(k_, std::move(vs), mu);
    }
};

inline int baker_branch(double x, int k) {
    return std::clamp(static_cast<int>(std::ceil(k * x)), 1, k);
}

inline std::pair<double, double> baker_step(double x, double y, const BakerMap& map) {
    const int c = baker_branch(x, map.k);
    return {map.k * x - (c - 1), map.v[static_cast<std::size_t>(c - 1)].f(y)};
}

// Transversal foliation with leaves Psi(t;y) = (psi(y) - t, y).
struct Foliation {
    std::function<double(double)> psi;
    std::function<double(double)> dpsi;
    std::function<double(double)> d2psi;
    double t_min = 0.0;  // t_range for which whole leaves stay inside the square
    double t_max = 0.0;
};

}  // namespace condmix
