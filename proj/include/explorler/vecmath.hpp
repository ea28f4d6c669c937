#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace explorler {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double dist(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dist: size mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// y += a * x
inline void axpy(double a, const Vec& x, Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
    for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale_inplace(Vec& x, double a) {
    for (double& v : x) v *= a;
}

inline Vec sub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub: size mismatch");
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

inline double clampd(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

// FNV-1a over the raw bytes; used for diagnostic checksums of parameter vectors.
inline uint64_t byte_checksum(const Vec& a) {
    uint64_t h = 14695981039346656037ULL;
    for (double v : a) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

// Dense row-major matrix, just enough for small MLPs.
struct Mat {
    int rows = 0;
    int cols = 0;
    Vec a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return a.size(); }
    void zero() { std::fill(a.begin(), a.end(), 0.0); }
};

// out = W x + b
inline void matvec_add(const Mat& w, const Vec& x, const Vec& b, Vec& out) {
    if (static_cast<int>(x.size()) != w.cols || static_cast<int>(b.size()) != w.rows)
        throw std::invalid_argument("matvec_add: dimension mismatch");
    out.assign(static_cast<size_t>(w.rows), 0.0);
    const double* wp = w.a.data();
    for (int r = 0; r < w.rows; ++r) {
        double s = b[static_cast<size_t>(r)];
        for (int c = 0; c < w.cols; ++c) s += wp[static_cast<size_t>(r) * w.cols + c] * x[static_cast<size_t>(c)];
        out[static_cast<size_t>(r)] = s;
    }
}

// out = W^T d
inline void tmatvec(const Mat& w, const Vec& d, Vec& out) {
    if (static_cast<int>(d.size()) != w.rows) throw std::invalid_argument("tmatvec: dimension mismatch");
    out.assign(static_cast<size_t>(w.cols), 0.0);
    const double* wp = w.a.data();
    for (int r = 0; r < w.rows; ++r) {
        const double dr = d[static_cast<size_t>(r)];
        for (int c = 0; c < w.cols; ++c) out[static_cast<size_t>(c)] += wp[static_cast<size_t>(r) * w.cols + c] * dr;
    }
}

// g += d x^T (outer product accumulate)
inline void outer_acc(const Vec& d, const Vec& x, Mat& g) {
    if (static_cast<int>(d.size()) != g.rows || static_cast<int>(x.size()) != g.cols)
        throw std::invalid_argument("outer_acc: dimension mismatch");
    double* gp = g.a.data();
    for (int r = 0; r < g.rows; ++r) {
        const double dr = d[static_cast<size_t>(r)];
        for (int c = 0; c < g.cols; ++c) gp[static_cast<size_t>(r) * g.cols + c] += dr * x[static_cast<size_t>(c)];
    }
}

}  // namespace explorler
