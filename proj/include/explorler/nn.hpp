#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "vecmath.hpp"

namespace explorler {

inline constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
inline constexpr int kDefaultHidden = 64;

// ---------------------------------------------------------------------------
// Flattened parameter vectors

struct ParamShape {
    std::string name;
    std::vector<int64_t> dims;

    int64_t count() const {
        int64_t n = 1;
        for (int64_t d : dims) n *= d;
        return n;
    }
    bool operator==(const ParamShape&) const = default;
};

struct FlatParams {
    Vec values;
    std::vector<ParamShape> layout;

    int64_t total() const {
        int64_t n = 0;
        for (const auto& s : layout) n += s.count();
        return n;
    }
    bool same_layout(const FlatParams& o) const { return layout == o.layout; }
};

// ---------------------------------------------------------------------------
// Two-hidden-layer ReLU perceptron with hand-written reverse mode.

class MlpNet {
public:
    Mat w1, w2, w3;
    Vec b1, b2, b3;

    MlpNet() = default;
    MlpNet(int input_dim, int hidden_dim, int output_dim)
        : w1(hidden_dim, input_dim),
          w2(hidden_dim, hidden_dim),
          w3(output_dim, hidden_dim),
          b1(static_cast<size_t>(hidden_dim), 0.0),
          b2(static_cast<size_t>(hidden_dim), 0.0),
          b3(static_cast<size_t>(output_dim), 0.0) {
        if (input_dim < 1 || hidden_dim < 1 || output_dim < 1)
            throw std::invalid_argument("MlpNet: dimensions must be positive");
    }

    int input_dim() const { return w1.cols; }
    int hidden_dim() const { return w1.rows; }
    int output_dim() const { return w3.rows; }

    int64_t param_count() const {
        return static_cast<int64_t>(w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size());
    }

    // uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) per layer, weights then bias
    void init_uniform(Rng& rng) {
        auto init_layer = [&rng](Mat& w, Vec& b) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols));
            for (double& v : w.a) v = rng.uniform(-bound, bound);
            for (double& v : b) v = rng.uniform(-bound, bound);
        };
        init_layer(w1, b1);
        init_layer(w2, b2);
        init_layer(w3, b3);
    }

    struct Cache {
        Vec x, z1, h1, z2, h2, out;
    };

    const Vec& forward(const Vec& x, Cache& c) const {
        if (static_cast<int>(x.size()) != input_dim())
            throw std::invalid_argument("MlpNet::forward: input dimension mismatch");
        c.x = x;
        matvec_add(w1, x, b1, c.z1);
        relu(c.z1, c.h1);
        matvec_add(w2, c.h1, b2, c.z2);
        relu(c.z2, c.h2);
        matvec_add(w3, c.h2, b3, c.out);
        return c.out;
    }

    Vec forward(const Vec& x) const {
        Cache c;
        forward(x, c);
        return std::move(c.out);
    }

    struct Grad {
        Mat w1, w2, w3;
        Vec b1, b2, b3;

        Grad() = default;
        explicit Grad(const MlpNet& net)
            : w1(net.w1.rows, net.w1.cols),
              w2(net.w2.rows, net.w2.cols),
              w3(net.w3.rows, net.w3.cols),
              b1(net.b1.size(), 0.0),
              b2(net.b2.size(), 0.0),
              b3(net.b3.size(), 0.0) {}

        void zero() {
            w1.zero();
            w2.zero();
            w3.zero();
            std::fill(b1.begin(), b1.end(), 0.0);
            std::fill(b2.begin(), b2.end(), 0.0);
            std::fill(b3.begin(), b3.end(), 0.0);
        }
    };

    // Accumulates one sample's parameter gradients given dL/d(out).
    // ReLU subgradient at 0 is taken as 0.
    void backward(const Cache& c, const Vec& dout, Grad& g, Vec* dx = nullptr) const {
        if (static_cast<int>(dout.size()) != output_dim())
            throw std::invalid_argument("MlpNet::backward: output dimension mismatch");
        outer_acc(dout, c.h2, g.w3);
        axpy(1.0, dout, g.b3);

        Vec d2;
        tmatvec(w3, dout, d2);
        mask_relu(c.z2, d2);
        outer_acc(d2, c.h1, g.w2);
        axpy(1.0, d2, g.b2);

        Vec d1;
        tmatvec(w2, d2, d1);
        mask_relu(c.z1, d1);
        outer_acc(d1, c.x, g.w1);
        axpy(1.0, d1, g.b1);

        if (dx != nullptr) tmatvec(w1, d1, *dx);
    }

private:
    static void relu(const Vec& z, Vec& h) {
        h.resize(z.size());
        for (size_t i = 0; i < z.size(); ++i) h[i] = z[i] > 0.0 ? z[i] : 0.0;
    }
    static void mask_relu(const Vec& z, Vec& d) {
        for (size_t i = 0; i < z.size(); ++i)
            if (z[i] <= 0.0) d[i] = 0.0;
    }
};

// ---------------------------------------------------------------------------
// Diagonal Gaussian distribution pieces

inline double gaussian_log_prob(const Vec& mean, const Vec& log_std, const Vec& action) {
    if (mean.size() != log_std.size() || mean.size() != action.size())
        throw std::invalid_argument("gaussian_log_prob: dimension mismatch");
    double lp = 0.0;
    for (size_t d = 0; d < mean.size(); ++d) {
        if (!std::isfinite(mean[d]) || !std::isfinite(log_std[d]) || !std::isfinite(action[d]))
            throw std::runtime_error("gaussian_log_prob: non-finite input");
        const double sd = std::exp(log_std[d]);
        const double z = (action[d] - mean[d]) / sd;
        lp += -0.5 * z * z - log_std[d] - 0.5 * kLog2Pi;
    }
    return lp;
}

inline double gaussian_entropy(const Vec& log_std) {
    double h = 0.0;
    for (double ls : log_std) {
        if (!std::isfinite(ls)) throw std::runtime_error("gaussian_entropy: non-finite input");
        h += 0.5 + 0.5 * kLog2Pi + ls;
    }
    return h;
}

// d lp / d mean_d = (a_d - mu_d) / sigma_d^2 ;  d lp / d log_std_d = z_d^2 - 1
inline void gaussian_log_prob_grad(const Vec& mean, const Vec& log_std, const Vec& action, Vec& d_mean,
                                   Vec& d_log_std) {
    d_mean.assign(mean.size(), 0.0);
    d_log_std.assign(mean.size(), 0.0);
    for (size_t d = 0; d < mean.size(); ++d) {
        const double sd = std::exp(log_std[d]);
        const double z = (action[d] - mean[d]) / sd;
        d_mean[d] = z / sd;
        d_log_std[d] = z * z - 1.0;
    }
}

// ---------------------------------------------------------------------------
// Policy / value heads

class GaussianPolicy {
public:
    static constexpr double kLogStdMin = -20.0;
    static constexpr double kLogStdMax = 2.0;

    MlpNet mean_net;
    Vec log_std;
    Vec action_low, action_high;

    GaussianPolicy() = default;
    GaussianPolicy(MlpNet net, Vec log_std_init, Vec low, Vec high)
        : mean_net(std::move(net)),
          log_std(std::move(log_std_init)),
          action_low(std::move(low)),
          action_high(std::move(high)) {
        if (static_cast<int>(log_std.size()) != mean_net.output_dim() || log_std.size() != action_low.size() ||
            log_std.size() != action_high.size())
            throw std::invalid_argument("GaussianPolicy: dimension mismatch");
    }

    int obs_dim() const { return mean_net.input_dim(); }
    int act_dim() const { return mean_net.output_dim(); }

    Vec forward(const Vec& obs) const { return mean_net.forward(obs); }

    Vec clip_action(const Vec& action) const {
        Vec a(action.size());
        for (size_t d = 0; d < action.size(); ++d) a[d] = clampd(action[d], action_low[d], action_high[d]);
        return a;
    }

    struct Sample {
        Vec action;   // raw draw; log_prob refers to this
        Vec clipped;  // what the environment receives
        double log_prob;
    };

    Sample sample(const Vec& obs, Rng& rng) const {
        const Vec mean = forward(obs);
        Vec a(mean.size());
        for (size_t d = 0; d < mean.size(); ++d) a[d] = mean[d] + std::exp(log_std[d]) * rng.normal();
        Sample s;
        s.log_prob = gaussian_log_prob(mean, log_std, a);
        s.clipped = clip_action(a);
        s.action = std::move(a);
        return s;
    }

    Vec deterministic_action(const Vec& obs) const { return clip_action(forward(obs)); }

    void clamp_log_std() {
        for (double& ls : log_std) ls = clampd(ls, kLogStdMin, kLogStdMax);
    }
};

class ValueNet {
public:
    MlpNet net;

    ValueNet() = default;
    explicit ValueNet(MlpNet n) : net(std::move(n)) {
        if (net.output_dim() != 1) throw std::invalid_argument("ValueNet: output dim must be 1");
    }

    double value(const Vec& obs) const { return net.forward(obs)[0]; }
};

inline GaussianPolicy make_policy(int obs_dim, int act_dim, int hidden, Vec low, Vec high, Rng& rng) {
    MlpNet net(obs_dim, hidden, act_dim);
    net.init_uniform(rng);
    return GaussianPolicy(std::move(net), Vec(static_cast<size_t>(act_dim), 0.0), std::move(low), std::move(high));
}

inline ValueNet make_value(int obs_dim, int hidden, Rng& rng) {
    MlpNet net(obs_dim, hidden, 1);
    net.init_uniform(rng);
    return ValueNet(std::move(net));
}

// ---------------------------------------------------------------------------
// Flatten / unflatten.  Single source of truth for tensor order: policy trunk,
// policy head, log_std, value trunk, value head.

namespace detail {

// Visits (name, tensor) pairs of an MLP-shaped object (MlpNet or MlpNet::Grad).
template <class NetLike, class F>
void walk_mlp(NetLike&& n, const std::string& prefix, F&& f) {
    f(prefix + ".hidden1.weight", n.w1);
    f(prefix + ".hidden1.bias", n.b1);
    f(prefix + ".hidden2.weight", n.w2);
    f(prefix + ".hidden2.bias", n.b2);
    f(prefix + ".head.weight", n.w3);
    f(prefix + ".head.bias", n.b3);
}

struct FlatAppender {
    FlatParams* out;
    void operator()(const std::string& name, const Mat& m) const {
        out->layout.push_back({name, {m.rows, m.cols}});
        out->values.insert(out->values.end(), m.a.begin(), m.a.end());
    }
    void operator()(const std::string& name, const Vec& v) const {
        out->layout.push_back({name, {static_cast<int64_t>(v.size())}});
        out->values.insert(out->values.end(), v.begin(), v.end());
    }
};

struct FlatReader {
    const FlatParams* in;
    size_t entry = 0;
    size_t offset = 0;

    void expect(const std::string& name, const std::vector<int64_t>& dims) {
        if (entry >= in->layout.size())
            throw std::runtime_error("unflatten: missing tensor " + name);
        const ParamShape& s = in->layout[entry];
        if (s.name != name || s.dims != dims)
            throw std::runtime_error("unflatten: layout mismatch at " + name);
    }
    void operator()(const std::string& name, Mat& m) {
        expect(name, {m.rows, m.cols});
        const int64_t n = in->layout[entry].count();
        if (offset + static_cast<size_t>(n) > in->values.size())
            throw std::runtime_error("unflatten: value buffer too short at " + name);
        std::copy(in->values.begin() + static_cast<long>(offset),
                  in->values.begin() + static_cast<long>(offset) + n, m.a.begin());
        offset += static_cast<size_t>(n);
        ++entry;
    }
    void operator()(const std::string& name, Vec& v) {
        expect(name, {static_cast<int64_t>(v.size())});
        const int64_t n = in->layout[entry].count();
        if (offset + static_cast<size_t>(n) > in->values.size())
            throw std::runtime_error("unflatten: value buffer too short at " + name);
        std::copy(in->values.begin() + static_cast<long>(offset),
                  in->values.begin() + static_cast<long>(offset) + n, v.begin());
        offset += static_cast<size_t>(n);
        ++entry;
    }
};

inline std::vector<int64_t> mlp_dims_from_layout(const FlatParams& p, const std::string& prefix) {
    // returns {input, hidden, output}
    for (const auto& s : p.layout) {
        if (s.name == prefix + ".hidden1.weight") {
            if (s.dims.size() != 2) throw std::runtime_error("unflatten: bad dims for " + s.name);
            const int64_t hidden = s.dims[0];
            const int64_t input = s.dims[1];
            for (const auto& t : p.layout)
                if (t.name == prefix + ".head.weight") {
                    if (t.dims.size() != 2) throw std::runtime_error("unflatten: bad dims for " + t.name);
                    return {input, hidden, t.dims[0]};
                }
            throw std::runtime_error("unflatten: missing " + prefix + ".head.weight");
        }
    }
    throw std::runtime_error("unflatten: missing " + prefix + ".hidden1.weight");
}

}  // namespace detail

inline FlatParams flatten_policy(const GaussianPolicy& policy) {
    FlatParams p;
    detail::FlatAppender app{&p};
    detail::walk_mlp(policy.mean_net, "policy", app);
    app("policy.log_std", policy.log_std);
    return p;
}

inline FlatParams flatten_full(const GaussianPolicy& policy, const ValueNet& value) {
    FlatParams p = flatten_policy(policy);
    detail::FlatAppender app{&p};
    detail::walk_mlp(value.net, "value", app);
    return p;
}

inline GaussianPolicy unflatten_policy(const FlatParams& p, Vec action_low, Vec action_high) {
    const auto dims = detail::mlp_dims_from_layout(p, "policy");
    MlpNet net(static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]));
    Vec log_std(static_cast<size_t>(dims[2]), 0.0);
    detail::FlatReader rd{&p};
    detail::walk_mlp(net, "policy", rd);
    rd("policy.log_std", log_std);
    return GaussianPolicy(std::move(net), std::move(log_std), std::move(action_low), std::move(action_high));
}

inline std::pair<GaussianPolicy, ValueNet> unflatten_full(const FlatParams& p, Vec action_low, Vec action_high) {
    const auto pdims = detail::mlp_dims_from_layout(p, "policy");
    const auto vdims = detail::mlp_dims_from_layout(p, "value");
    MlpNet pnet(static_cast<int>(pdims[0]), static_cast<int>(pdims[1]), static_cast<int>(pdims[2]));
    Vec log_std(static_cast<size_t>(pdims[2]), 0.0);
    MlpNet vnet(static_cast<int>(vdims[0]), static_cast<int>(vdims[1]), static_cast<int>(vdims[2]));
    detail::FlatReader rd{&p};
    detail::walk_mlp(pnet, "policy", rd);
    rd("policy.log_std", log_std);
    detail::walk_mlp(vnet, "value", rd);
    if (rd.offset != p.values.size()) throw std::runtime_error("unflatten: trailing values in buffer");
    GaussianPolicy policy(std::move(pnet), std::move(log_std), std::move(action_low), std::move(action_high));
    return {std::move(policy), ValueNet(std::move(vnet))};
}

// Gradient vector in the exact flatten_full order.
inline Vec grads_to_flat(const MlpNet::Grad& policy_grad, const Vec& d_log_std, const MlpNet::Grad& value_grad) {
    FlatParams p;
    detail::FlatAppender app{&p};
    detail::walk_mlp(policy_grad, "policy", app);
    app("policy.log_std", d_log_std);
    detail::walk_mlp(value_grad, "value", app);
    return std::move(p.values);
}

}  // namespace explorler
