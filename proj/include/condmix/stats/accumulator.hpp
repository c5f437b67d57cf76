#pragma once

#include <cstdint>

#include "condmix/errors.hpp"
#include "condmix/interval/interval.hpp"

namespace condmix {

namespace detail {

inline bool weight_admissible(double w) { return w >= 0.0; }
inline bool total_positive(double w) { return w > 0.0; }

// Outward rounding may push the lower bound of a true nonnegative weight
// slightly below zero; only a certainly negative enclosure is rejected.
inline bool weight_admissible(const Interval& w) { return !w.certainly_negative(); }
inline bool total_positive(const Interval& w) { return w.certainly_positive(); }

}  // namespace detail

// Weighted Birkhoff accumulator.  T is double (fast path) or Interval
// (deterministic error carried through the ratio).
template <class T>
struct BirkhoffAccumulator {
    T sum_wa;
    T sum_w;
    std::uint64_t count = 0;

    BirkhoffAccumulator() : sum_wa(0.0), sum_w(0.0) {}
};

template <class T>
void accumulate(BirkhoffAccumulator<T>& acc, const T& weight, const T& value) {
    if (!detail::weight_admissible(weight)) throw DomainError("accumulate: negative weight");
    acc.sum_wa = acc.sum_wa + weight * value;
    acc.sum_w = acc.sum_w + weight;
    acc.count += 1;
}

template <class T>
T ratio(const BirkhoffAccumulator<T>& acc) {
    if (acc.count == 0 || !detail::total_positive(acc.sum_w))
        throw EmptyEstimate("ratio: total weight is not certainly positive");
    return acc.sum_wa / acc.sum_w;
}

// Componentwise sum; the parallel reduction order is fixed by the caller so
// float results stay bit-identical.
template <class T>
BirkhoffAccumulator<T> merge(const BirkhoffAccumulator<T>& a, const BirkhoffAccumulator<T>& b) {
    BirkhoffAccumulator<T> out;
    out.sum_wa = a.sum_wa + b.sum_wa;
    out.sum_w = a.sum_w + b.sum_w;
    out.count = a.count + b.count;
    return out;
}

}  // namespace condmix
