#pragma once

#include <algorithm>
#include <cmath>

#include "condmix/errors.hpp"
#include "condmix/interval/linear2.hpp"

namespace condmix {

// Parameter-region flags for (x,y) -> (1 + y - a|x|, bx).
struct RegionFlags {
    bool chaotic = false;          // a in (1,2), b in (0, min{a-1, 4-2a})
    bool mixing_srb = false;       // additionally b < sqrt(2)(a - sqrt(2))
    bool positive_length = false;  // b < a - sqrt(2); implies mixing_srb
};

inline RegionFlags validate_params(double a, double b) {
    RegionFlags f;
    f.chaotic = a > 1.0 && a < 2.0 && b > 0.0 && b < std::min(a - 1.0, 4.0 - 2.0 * a);
    const double root2 = std::sqrt(2.0);
    f.mixing_srb = f.chaotic && b < root2 * (a - root2);
    f.positive_length = f.chaotic && b < a - root2;
    return f;
}

struct LoziParams {
    double a;
    double b;
    RegionFlags flags;

    LoziParams(double a_, double b_) : a(a_), b(b_), flags(validate_params(a_, b_)) {
        if (b_ == 0.0) throw DomainError("lozi: b must be nonzero");
    }
};

// Enclosure of the map image; under a straddling x this is the hull of the
// two branch images because |x| absorbs the sign split.
inline IntervalVec2 lozi_eval(const IntervalVec2& p, const LoziParams& params) {
    return {1.0 + p.y - params.a * abs(p.x), params.b * p.x};
}

struct OrbitOptions {
    double branch_tol = 1e-12;  // widest straddling enclosure still iterated
    double width_limit = 1e-6;  // per-step blow-up guard
};

inline IntervalVec2 point_orbit(IntervalVec2 p, int n, const LoziParams& params,
                                const OrbitOptions& opts = {}) {
    for (int i = 0; i < n; ++i) {
        if (p.x.contains_zero() && p.x.width() > opts.branch_tol)
            throw BranchAmbiguityError("point_orbit: enclosure straddles the singular line");
        p = lozi_eval(p, params);
        if (p.max_width() > opts.width_limit)
            throw StabilityError("point_orbit: enclosure width exceeded limit");
    }
    return p;
}

}  // namespace condmix
