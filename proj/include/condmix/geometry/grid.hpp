#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "condmix/errors.hpp"

namespace condmix {

struct Box {
    double xmin, xmax, ymin, ymax;
};

class GridCover {
public:
    GridCover(const Box& box, double h) : box_(box), h_(h) {
        if (!(h > 0.0)) throw DomainError("grid: cell size must be positive");
        if (!(box.xmax > box.xmin && box.ymax > box.ymin))
            throw DomainError("grid: degenerate bounding box");
        nx_ = static_cast<int>(std::ceil((box.xmax - box.xmin) / h));
        ny_ = static_cast<int>(std::ceil((box.ymax - box.ymin) / h));
        cells_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), 0);
    }

    void insert(double x, double y) {
        if (x < box_.xmin || x > box_.xmax || y < box_.ymin || y > box_.ymax)
            throw DomainError("grid: point outside the bounding box");
        const int ix = std::min(static_cast<int>((x - box_.xmin) / h_), nx_ - 1);
        const int iy = std::min(static_cast<int>((y - box_.ymin) / h_), ny_ - 1);
        auto& c = cells_[index(ix, iy)];
        if (!c) {
            c = 1;
            ++count_;
        }
    }

    bool occupied(int ix, int iy) const { return cells_[index(ix, iy)] != 0; }
    std::size_t occupied_count() const { return count_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double h() const { return h_; }
    const Box& box() const { return box_; }
    double cell_cx(int ix) const { return box_.xmin + (ix + 0.5) * h_; }
    double cell_cy(int iy) const { return box_.ymin + (iy + 0.5) * h_; }
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(ix);
    }

private:
    Box box_;
    double h_;
    int nx_ = 0, ny_ = 0;
    std::vector<std::uint8_t> cells_;
    std::size_t count_ = 0;
};

namespace detail {

// One-dimensional squared distance transform (lower envelope of parabolas).
// Sample values must be finite: infinities break the intersection formula.
inline void dt1d(const std::vector<double>& f, std::vector<double>& d, int n) {
    static constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<int> v(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    const auto cross = [&](int q, int p) {
        return ((f[static_cast<std::size_t>(q)] + static_cast<double>(q) * q) -
                (f[static_cast<std::size_t>(p)] + static_cast<double>(p) * p)) /
               (2.0 * q - 2.0 * p);
    };
    for (int q = 1; q < n; ++q) {
        double s = cross(q, v[static_cast<std::size_t>(k)]);
        while (s <= z[static_cast<std::size_t>(k)]) {
            --k;
            s = cross(q, v[static_cast<std::size_t>(k)]);
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
        const int p = v[static_cast<std::size_t>(k)];
        d[static_cast<std::size_t>(q)] =
            (q - p) * static_cast<double>(q - p) + f[static_cast<std::size_t>(p)];
    }
}

// Exact squared Euclidean distance (in cell units) from every cell to the
// nearest occupied cell; unoccupied-everywhere rows carry a finite sentinel
// exceeding the grid diameter.
inline std::vector<double> squared_edt(const GridCover& g) {
    const int nx = g.nx(), ny = g.ny();
    const double big = 4.0 * (static_cast<double>(nx) * nx + static_cast<double>(ny) * ny + 1.0);
    std::vector<double> dist(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            dist[g.index(ix, iy)] = g.occupied(ix, iy) ? 0.0 : big;

    std::vector<double> f(static_cast<std::size_t>(std::max(nx, ny)));
    std::vector<double> d(static_cast<std::size_t>(std::max(nx, ny)));
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) f[static_cast<std::size_t>(iy)] = dist[g.index(ix, iy)];
        dt1d(f, d, ny);
        for (int iy = 0; iy < ny; ++iy) dist[g.index(ix, iy)] = d[static_cast<std::size_t>(iy)];
    }
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) f[static_cast<std::size_t>(ix)] = dist[g.index(ix, iy)];
        dt1d(f, d, nx);
        for (int ix = 0; ix < nx; ++ix) dist[g.index(ix, iy)] = d[static_cast<std::size_t>(ix)];
    }
    return dist;
}

inline double directed_hausdorff(const GridCover& from, const GridCover& to) {
    const auto dist = squared_edt(to);
    double worst = 0.0;
    for (int iy = 0; iy < from.ny(); ++iy)
        for (int ix = 0; ix < from.nx(); ++ix)
            if (from.occupied(ix, iy)) worst = std::max(worst, dist[from.index(ix, iy)]);
    return std::sqrt(worst) * from.h();
}

}  // namespace detail

// Symmetrized Hausdorff distance between cell-center sets; accurate to the
// true point-set distance within 2 h sqrt(2).
inline double hausdorff(const GridCover& a, const GridCover& b) {
    if (a.occupied_count() == 0 || b.occupied_count() == 0)
        throw EmptyError("hausdorff: empty cover");
    if (a.nx() != b.nx() || a.ny() != b.ny() || a.h() != b.h() ||
        a.box().xmin != b.box().xmin || a.box().ymin != b.box().ymin)
        throw DomainError("hausdorff: covers use different grids");
    return std::max(detail::directed_hausdorff(a, b), detail::directed_hausdorff(b, a));
}

}  // namespace condmix
