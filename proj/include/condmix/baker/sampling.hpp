#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "condmix/baker/map.hpp"
#include "condmix/errors.hpp"
#include "condmix/stats/rng.hpp"

namespace condmix {

// Smallest depth with mu_bound^depth < tol, the truncation error of the
// backward iterated-function-system sampler.
inline int nu0_depth(double mu_bound, double tol = 1e-12) {
    return static_cast<int>(std::ceil(std::log(tol) / std::log(mu_bound)));
}

// One draw from the depth-truncated SRB fibre measure: compose `depth`
// uniformly chosen branch contractions starting from the fibre midpoint.
inline double nu0_draw(const BakerMap& map, RngStream& rng, int depth) {
    double y = 0.5;
    for (int j = 0; j < depth; ++j)
        y = map.v[rng.next_below(static_cast<std::uint64_t>(map.k))].f(y);
    return y;
}

struct Nu0Sampler {
    BakerMap map;
    int depth;
    RngStream rng;

    Nu0Sampler(BakerMap m, RngStream g, int depth_ = -1)
        : map(std::move(m)),
          depth(depth_ < 0 ? nu0_depth(map.mu_bound) : depth_),
          rng(g) {
        if (depth < 1) throw DomainError("nu0: depth must be positive");
    }

    double next() { return nu0_draw(map, rng, depth); }
};

inline std::vector<double> sample_nu0(Nu0Sampler& sampler, std::size_t count) {
    std::vector<double> ys(count);
    for (auto& y : ys) y = sampler.next();
    return ys;
}

// Product samples x ~ Leb[0,1], y ~ nu0, interleaved on a single stream.
inline std::vector<std::pair<double, double>> srb_sample(const BakerMap& map, std::size_t count,
                                                         RngStream& rng, int depth = -1) {
    const int d = depth < 0 ? nu0_depth(map.mu_bound) : depth;
    std::vector<std::pair<double, double>> pts(count);
    for (auto& p : pts) {
        p.first = rng.next_unit();
        p.second = nu0_draw(map, rng, d);
    }
    return pts;
}

// Samples of the leaf measure rho_t = Psi(t;.)_* nu0.  The whole leaf must
// stay inside the closed unit square.
inline std::vector<std::pair<double, double>> conditional_sample(const BakerMap& map,
                                                                 const Foliation& fol, double t,
                                                                 std::size_t count, RngStream& rng,
                                                                 int depth = -1) {
    if (t < fol.t_min || t > fol.t_max)
        throw DomainError("conditional_sample: t outside the foliation range");
    const int d = depth < 0 ? nu0_depth(map.mu_bound) : depth;
    std::vector<std::pair<double, double>> pts(count);
    for (auto& p : pts) {
        const double y = nu0_draw(map, rng, d);
        const double x = fol.psi(y) - t;
        if (x < 0.0 || x > 1.0)
            throw DomainError("conditional_sample: leaf exits the unit square");
        p = {x, y};
    }
    return pts;
}

}  // namespace condmix
