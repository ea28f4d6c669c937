#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "vecmath.hpp"

namespace explorler {

struct EsaConfig {
    int num_agents = 0;  // 0 = derive from n_epochs (half, rounded up)
    int num_neighbors = 6;
    int num_steps = 60;
    double step_size = 0.001;
    int release_interval = 20;
    double momentum_beta = 0.9;
    double lj_epsilon = 1.0;

    void validate() const {
        if (num_agents < 0) throw std::invalid_argument("EsaConfig: num_agents must be >= 0");
        if (num_neighbors < 1) throw std::invalid_argument("EsaConfig: num_neighbors must be >= 1");
        if (num_steps < 0) throw std::invalid_argument("EsaConfig: num_steps must be >= 0");
        if (step_size <= 0.0) throw std::invalid_argument("EsaConfig: step_size must be > 0");
        if (release_interval < 1) throw std::invalid_argument("EsaConfig: release_interval must be >= 1");
        if (num_steps % release_interval != 0)
            throw std::invalid_argument("EsaConfig: release_interval must divide num_steps");
        if (momentum_beta < 0.0 || momentum_beta >= 1.0)
            throw std::invalid_argument("EsaConfig: momentum_beta must lie in [0, 1)");
        if (lj_epsilon <= 0.0) throw std::invalid_argument("EsaConfig: lj_epsilon must be > 0");
    }

    int resolved_agents(int n_epochs) const {
        if (num_agents > 0) return num_agents;
        return (n_epochs + 1) / 2;
    }

    // per run: initial positions plus one release per interval
    int candidates_per_run(int n_epochs) const {
        return resolved_agents(n_epochs) * (num_steps / release_interval + 1);
    }

    bool operator==(const EsaConfig&) const = default;
};

// k nearest anchors by Euclidean distance, ties broken by lower index.
inline std::vector<std::pair<int, double>> knn(const Vec& point, const std::vector<Vec>& anchors, int k) {
    if (anchors.empty()) throw std::invalid_argument("knn: no anchors");
    if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
    if (k > static_cast<int>(anchors.size())) throw std::invalid_argument("knn: k exceeds anchor count");
    std::vector<std::pair<int, double>> all;
    all.reserve(anchors.size());
    for (size_t i = 0; i < anchors.size(); ++i) all.emplace_back(static_cast<int>(i), dist(point, anchors[i]));
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    all.resize(static_cast<size_t>(k));
    return all;
}

inline double lj_potential(double r, double sigma, double eps) {
    if (r <= 0.0) throw std::invalid_argument("lj_potential: r must be > 0");
    const double sr = sigma / r;
    const double sr6 = sr * sr * sr * sr * sr * sr;
    return 4.0 * eps * (sr6 * sr6 - sr6);
}

// Magnitude along the unit vector pointing from the anchor to the particle:
// positive repels, negative attracts, zero at r = 2^(1/6) * sigma.
inline double lj_force_magnitude(double r, double sigma, double eps) {
    if (r <= 0.0) throw std::invalid_argument("lj_force_magnitude: r must be > 0");
    const double sr = sigma / r;
    const double sr7 = sr * sr * sr * sr * sr * sr * sr;
    const double sr13 = sr7 * sr7 / sr;
    return 24.0 * eps * sigma * (2.0 * sr13 - sr7);
}

inline Vec lj_force(double r, double sigma, double eps, const Vec& unit_away) {
    const double un = norm(unit_away);
    if (un < 1.0 - 1e-9 || un > 1.0 + 1e-9)
        throw std::invalid_argument("lj_force: direction must be a unit vector");
    const double mag = lj_force_magnitude(r, sigma, eps);
    Vec f(unit_away.size());
    for (size_t i = 0; i < f.size(); ++i) f[i] = mag * unit_away[i];
    return f;
}

struct Particle {
    Vec position;
    Vec momentum;
    double sigma = 0.0;
    Rng rng{0};  // per-particle stream for degenerate-distance repulsion
};

struct EsaCandidate {
    Vec position;
    int particle_id = 0;
    int release_step = 0;  // 0 marks the initial position
};

// Each particle starts between a random anchor pair (mix in [0.25, 0.75]) with
// isotropic jitter scaled by 5% of the mean pairwise anchor distance.
inline std::vector<Particle> init_particles(const std::vector<Vec>& anchors, int m, const EsaConfig& cfg, Rng& rng) {
    if (anchors.size() < 2) throw std::invalid_argument("init_particles: need at least 2 anchors");
    if (m < 1) throw std::invalid_argument("init_particles: need at least 1 particle");
    const size_t dim = anchors[0].size();
    for (const auto& a : anchors)
        if (a.size() != dim) throw std::invalid_argument("init_particles: anchor dimension mismatch");

    double mean_pair = 0.0;
    int pairs = 0;
    for (size_t i = 0; i < anchors.size(); ++i)
        for (size_t j = i + 1; j < anchors.size(); ++j) {
            mean_pair += dist(anchors[i], anchors[j]);
            ++pairs;
        }
    mean_pair /= static_cast<double>(pairs);
    const double jitter_std = 0.05 * mean_pair;

    const int k = std::min(cfg.num_neighbors, static_cast<int>(anchors.size()));
    std::vector<Particle> particles;
    particles.reserve(static_cast<size_t>(m));
    for (int p = 0; p < m; ++p) {
        const int i = rng.uniform_int(static_cast<int>(anchors.size()));
        int j = rng.uniform_int(static_cast<int>(anchors.size()) - 1);
        if (j >= i) ++j;
        const double lam = rng.uniform(0.25, 0.75);

        Particle part;
        part.position.resize(dim);
        for (size_t d = 0; d < dim; ++d)
            part.position[d] = lam * anchors[static_cast<size_t>(i)][d] +
                               (1.0 - lam) * anchors[static_cast<size_t>(j)][d] + jitter_std * rng.normal();
        part.momentum.assign(dim, 0.0);
        const auto nn = knn(part.position, anchors, k);
        double s = 0.0;
        for (const auto& [idx, r] : nn) s += r;
        part.sigma = s / static_cast<double>(nn.size());
        part.rng = Rng(rng.next_u64());
        particles.push_back(std::move(part));
    }
    return particles;
}

// One repulsion step per particle: recompute the local length scale from the
// current k nearest anchors, sum their forces, blend into momentum, and move
// exactly step_size along the momentum direction (or not at all).
inline void esa_step(std::vector<Particle>& particles, const std::vector<Vec>& anchors, const EsaConfig& cfg) {
    if (anchors.empty()) throw std::invalid_argument("esa_step: no anchors");
    const int k = std::min(cfg.num_neighbors, static_cast<int>(anchors.size()));
    for (Particle& part : particles) {
        const auto nn = knn(part.position, anchors, k);
        double s = 0.0;
        for (const auto& [idx, r] : nn) s += r;
        part.sigma = s / static_cast<double>(nn.size());

        Vec force(part.position.size(), 0.0);
        for (const auto& [idx, r] : nn) {
            if (r == 0.0) {
                // coincident with an anchor: repel along a random unit direction
                axpy(1.0, random_unit_vector(part.position.size(), part.rng), force);
                continue;
            }
            const double mag = lj_force_magnitude(r, part.sigma, cfg.lj_epsilon);
            const Vec& anchor = anchors[static_cast<size_t>(idx)];
            for (size_t d = 0; d < force.size(); ++d)
                force[d] += mag * (part.position[d] - anchor[d]) / r;
        }

        const double fn = norm(force);
        if (fn > 0.0) {
            const double blend = (1.0 - cfg.momentum_beta) / fn;
            for (size_t d = 0; d < force.size(); ++d)
                part.momentum[d] = cfg.momentum_beta * part.momentum[d] + blend * force[d];
        } else {
            scale_inplace(part.momentum, cfg.momentum_beta);
        }

        const double mn = norm(part.momentum);
        if (mn > 1e-12) {
            const double step = cfg.step_size / mn;
            for (size_t d = 0; d < part.position.size(); ++d) part.position[d] += step * part.momentum[d];
        }
    }
}

// Full search: initial positions enter the candidate pool, then positions are
// released every release_interval steps.
inline std::vector<EsaCandidate> run_esa(const std::vector<Vec>& anchors, int m, const EsaConfig& cfg, Rng& rng) {
    cfg.validate();
    std::vector<Particle> particles = init_particles(anchors, m, cfg, rng);
    std::vector<EsaCandidate> pool;
    pool.reserve(static_cast<size_t>(m) * static_cast<size_t>(cfg.num_steps / cfg.release_interval + 1));
    for (int p = 0; p < m; ++p) pool.push_back({particles[static_cast<size_t>(p)].position, p, 0});
    for (int t = 1; t <= cfg.num_steps; ++t) {
        esa_step(particles, anchors, cfg);
        if (t % cfg.release_interval == 0)
            for (int p = 0; p < m; ++p) pool.push_back({particles[static_cast<size_t>(p)].position, p, t});
    }
    return pool;
}

}  // namespace explorler
