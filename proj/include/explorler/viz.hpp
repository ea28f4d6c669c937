#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rng.hpp"
#include "vecmath.hpp"

namespace explorler {

// Diagonal Gaussian fitted over checkpoints (sample variance, floored at
// 1e-12 per coordinate), sampled `count` times.
inline std::vector<Vec> sample_gaussian_cloud(const std::vector<Vec>& checkpoints, int count, Rng& rng) {
    if (checkpoints.size() < 2) throw std::invalid_argument("sample_gaussian_cloud: need at least 2 checkpoints");
    if (count < 1) throw std::invalid_argument("sample_gaussian_cloud: count must be >= 1");
    const size_t dim = checkpoints[0].size();
    for (const auto& c : checkpoints)
        if (c.size() != dim) throw std::invalid_argument("sample_gaussian_cloud: dimension mismatch");

    Vec mean(dim, 0.0);
    for (const auto& c : checkpoints) axpy(1.0, c, mean);
    scale_inplace(mean, 1.0 / static_cast<double>(checkpoints.size()));

    Vec std_dev(dim, 0.0);
    for (const auto& c : checkpoints)
        for (size_t d = 0; d < dim; ++d) std_dev[d] += (c[d] - mean[d]) * (c[d] - mean[d]);
    for (size_t d = 0; d < dim; ++d) {
        const double var = std::max(std_dev[d] / static_cast<double>(checkpoints.size() - 1), 1e-12);
        std_dev[d] = std::sqrt(var);
    }

    std::vector<Vec> samples;
    samples.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Vec s(dim);
        for (size_t d = 0; d < dim; ++d) s[d] = mean[d] + std_dev[d] * rng.normal();
        samples.push_back(std::move(s));
    }
    return samples;
}

struct PcaBasis {
    Vec mean;
    std::vector<Vec> directions;    // orthonormal, largest variance first
    Vec explained_variance;         // eigenvalues of the sample covariance
};

struct PcaProjection {
    PcaBasis basis;
    std::vector<std::array<double, 2>> coords;
};

namespace detail {

// Covariance matvec without forming the d x d matrix: C v = X^T (X v) / (n-1)
// on centered points.
inline Vec cov_matvec(const std::vector<Vec>& centered, const Vec& v) {
    Vec out(v.size(), 0.0);
    for (const Vec& x : centered) {
        const double c = dot(x, v);
        axpy(c, x, out);
    }
    scale_inplace(out, 1.0 / static_cast<double>(centered.size() - 1));
    return out;
}

}  // namespace detail

// Power iteration with deflation (500 iterations, tol 1e-10). The start
// vectors come from a fixed internal stream so projections are reproducible.
inline PcaBasis pca_fit(const std::vector<Vec>& points, int k) {
    if (k < 1) throw std::invalid_argument("pca_fit: k must be >= 1");
    if (points.size() < static_cast<size_t>(k) + 1)
        throw std::invalid_argument("pca_fit: need at least k+1 points");
    const size_t dim = points[0].size();
    if (static_cast<size_t>(k) > dim) throw std::invalid_argument("pca_fit: k exceeds dimension");
    for (const auto& p : points)
        if (p.size() != dim) throw std::invalid_argument("pca_fit: dimension mismatch");

    PcaBasis basis;
    basis.mean.assign(dim, 0.0);
    for (const auto& p : points) axpy(1.0, p, basis.mean);
    scale_inplace(basis.mean, 1.0 / static_cast<double>(points.size()));

    std::vector<Vec> centered;
    centered.reserve(points.size());
    for (const auto& p : points) centered.push_back(sub(p, basis.mean));

    Rng rng(0x9e3779b97f4a7c15ULL);
    constexpr int kMaxIter = 500;
    constexpr double kTol = 1e-10;

    for (int comp = 0; comp < k; ++comp) {
        Vec v = random_unit_vector(dim, rng);
        // stay orthogonal to found components
        auto orthogonalize = [&](Vec& u) {
            for (const Vec& d : basis.directions) axpy(-dot(d, u), d, u);
        };
        orthogonalize(v);
        double vn = norm(v);
        if (vn < 1e-12) throw std::runtime_error("pca_fit: degenerate start vector");
        scale_inplace(v, 1.0 / vn);

        double lambda = 0.0;
        for (int it = 0; it < kMaxIter; ++it) {
            Vec w = detail::cov_matvec(centered, v);
            orthogonalize(w);
            const double wn = norm(w);
            if (wn < 1e-300) throw std::runtime_error("pca_fit: degenerate covariance (zero spread)");
            scale_inplace(w, 1.0 / wn);
            const double new_lambda = dot(w, detail::cov_matvec(centered, w));
            const bool converged = std::abs(new_lambda - lambda) < kTol;
            v = std::move(w);
            lambda = new_lambda;
            if (converged) break;
        }
        if (lambda <= 0.0) throw std::runtime_error("pca_fit: degenerate covariance (zero spread)");

        // sign convention: largest-magnitude coordinate positive
        size_t arg = 0;
        for (size_t d = 1; d < dim; ++d)
            if (std::abs(v[d]) > std::abs(v[arg])) arg = d;
        if (v[arg] < 0.0) scale_inplace(v, -1.0);

        basis.directions.push_back(std::move(v));
        basis.explained_variance.push_back(lambda);
    }
    return basis;
}

inline std::array<double, 2> pca_coords(const PcaBasis& basis, const Vec& point) {
    const Vec c = sub(point, basis.mean);
    return {dot(c, basis.directions[0]), dot(c, basis.directions[1])};
}

inline PcaProjection pca_project(const std::vector<Vec>& points, int k = 2) {
    PcaProjection proj;
    proj.basis = pca_fit(points, k);
    proj.coords.reserve(points.size());
    for (const auto& p : points) proj.coords.push_back(pca_coords(proj.basis, p));
    return proj;
}

inline Vec pca_reconstruct(const PcaBasis& basis, const std::array<double, 2>& coords) {
    Vec p = basis.mean;
    axpy(coords[0], basis.directions[0], p);
    axpy(coords[1], basis.directions[1], p);
    return p;
}

// ---------------------------------------------------------------------------
// Inverse-distance-weighted interpolation of scattered values onto a regular
// grid over the bounding box plus a 5% margin per side.

struct ContourGrid {
    int resolution = 0;
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    Vec values;  // row-major, y outer, x inner

    double x_at(int i) const { return x0 + (x1 - x0) * static_cast<double>(i) / (resolution - 1); }
    double y_at(int j) const { return y0 + (y1 - y0) * static_cast<double>(j) / (resolution - 1); }
    double at(int i, int j) const { return values[static_cast<size_t>(j) * resolution + i]; }
};

inline ContourGrid contour_grid(const std::vector<std::array<double, 2>>& coords, const Vec& values,
                                int resolution) {
    if (coords.size() != values.size()) throw std::invalid_argument("contour_grid: coords/values size mismatch");
    if (coords.empty()) throw std::invalid_argument("contour_grid: no samples");
    if (resolution < 2) throw std::invalid_argument("contour_grid: resolution must be >= 2");

    double xmin = coords[0][0], xmax = coords[0][0], ymin = coords[0][1], ymax = coords[0][1];
    for (const auto& c : coords) {
        xmin = std::min(xmin, c[0]);
        xmax = std::max(xmax, c[0]);
        ymin = std::min(ymin, c[1]);
        ymax = std::max(ymax, c[1]);
    }
    const double mx = 0.05 * (xmax - xmin);
    const double my = 0.05 * (ymax - ymin);

    ContourGrid grid;
    grid.resolution = resolution;
    grid.x0 = xmin - mx;
    grid.x1 = xmax + mx;
    grid.y0 = ymin - my;
    grid.y1 = ymax + my;
    grid.values.assign(static_cast<size_t>(resolution) * static_cast<size_t>(resolution), 0.0);

    const int k = static_cast<int>(std::min<size_t>(8, coords.size()));
    std::vector<std::pair<double, int>> near;
    near.reserve(coords.size());
    for (int j = 0; j < resolution; ++j) {
        const double gy = grid.y_at(j);
        for (int i = 0; i < resolution; ++i) {
            const double gx = grid.x_at(i);
            near.clear();
            for (size_t s = 0; s < coords.size(); ++s) {
                const double dx = coords[s][0] - gx;
                const double dy = coords[s][1] - gy;
                near.emplace_back(dx * dx + dy * dy, static_cast<int>(s));
            }
            std::partial_sort(near.begin(), near.begin() + k, near.end());
            double out;
            if (near[0].first == 0.0) {
                out = values[static_cast<size_t>(near[0].second)];  // exact hit
            } else {
                double wsum = 0.0, vsum = 0.0;
                for (int n = 0; n < k; ++n) {
                    const double w = 1.0 / near[static_cast<size_t>(n)].first;  // 1/d^2
                    wsum += w;
                    vsum += w * values[static_cast<size_t>(near[static_cast<size_t>(n)].second)];
                }
                out = vsum / wsum;
            }
            grid.values[static_cast<size_t>(j) * resolution + i] = out;
        }
    }
    return grid;
}

// Marching-squares segments for one iso-level.
inline std::vector<std::array<double, 4>> contour_segments(const ContourGrid& grid, double level) {
    std::vector<std::array<double, 4>> segs;
    auto interp = [&](double xa, double ya, double va, double xb, double yb, double vb) -> std::array<double, 2> {
        const double t = (level - va) / (vb - va);
        return {xa + t * (xb - xa), ya + t * (yb - ya)};
    };
    for (int j = 0; j + 1 < grid.resolution; ++j) {
        for (int i = 0; i + 1 < grid.resolution; ++i) {
            const double x0 = grid.x_at(i), x1 = grid.x_at(i + 1);
            const double y0 = grid.y_at(j), y1 = grid.y_at(j + 1);
            const double v00 = grid.at(i, j), v10 = grid.at(i + 1, j);
            const double v01 = grid.at(i, j + 1), v11 = grid.at(i + 1, j + 1);
            int mask = 0;
            if (v00 > level) mask |= 1;
            if (v10 > level) mask |= 2;
            if (v11 > level) mask |= 4;
            if (v01 > level) mask |= 8;
            if (mask == 0 || mask == 15) continue;

            std::vector<std::array<double, 2>> pts;
            if (((mask & 1) != 0) != ((mask & 2) != 0)) pts.push_back(interp(x0, y0, v00, x1, y0, v10));
            if (((mask & 2) != 0) != ((mask & 4) != 0)) pts.push_back(interp(x1, y0, v10, x1, y1, v11));
            if (((mask & 4) != 0) != ((mask & 8) != 0)) pts.push_back(interp(x1, y1, v11, x0, y1, v01));
            if (((mask & 8) != 0) != ((mask & 1) != 0)) pts.push_back(interp(x0, y1, v01, x0, y0, v00));
            for (size_t p = 0; p + 1 < pts.size(); p += 2)
                segs.push_back({pts[p][0], pts[p][1], pts[p + 1][0], pts[p + 1][1]});
        }
    }
    return segs;
}

}  // namespace explorler
