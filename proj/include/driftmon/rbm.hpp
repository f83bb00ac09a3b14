#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "driftmon/errors.hpp"
#include "driftmon/rng.hpp"
#include "driftmon/stats.hpp"
#include "driftmon/stream.hpp"

namespace driftmon {

// Weights and biases of the three-layer energy model: a visible layer of size
// V, a hidden layer of size H and a class layer of size Z. `w` connects
// visible to hidden (row-major V x H), `u` connects hidden to class
// (row-major H x Z).
struct RbmParameters {
    int visible = 0;
    int hidden = 0;
    int classes = 0;
    std::vector<double> w;  // [i * hidden + j]
    std::vector<double> u;  // [j * classes + k]
    std::vector<double> a;  // visible biases
    std::vector<double> b;  // hidden biases
    std::vector<double> c;  // class biases

    static RbmParameters zeros(int visible, int hidden, int classes) {
        RbmParameters p;
        p.visible = visible;
        p.hidden = hidden;
        p.classes = classes;
        p.w.assign(static_cast<std::size_t>(visible) * hidden, 0.0);
        p.u.assign(static_cast<std::size_t>(hidden) * classes, 0.0);
        p.a.assign(static_cast<std::size_t>(visible), 0.0);
        p.b.assign(static_cast<std::size_t>(hidden), 0.0);
        p.c.assign(static_cast<std::size_t>(classes), 0.0);
        return p;
    }
};

struct RbmHyperparams {
    double learning_rate = 0.05;
    int gibbs_steps = 1;
    int batch_size = 50;
    double hidden_fraction = 0.5;  // H = round(hidden_fraction * V)
    double beta = 0.99;            // class-balance strength, in [0, 1)
    double gradient_clip = 10.0;
    std::uint64_t seed = 1;
};

// Per-class effective counts feeding the skew-insensitive loss weight.
struct ClassBalanceState {
    std::vector<double> effective_counts;
    double beta = 0.99;
};

// Weight (1 - beta) / (1 - beta^n_m). Classes with fewer than one effective
// observation get weight 1 so a brand-new class is not suppressed.
inline double class_balance_weight(int m, const ClassBalanceState& s) {
    const double n = s.effective_counts[static_cast<std::size_t>(m)];
    if (n < 1.0) return 1.0;
    if (s.beta <= 0.0) return 1.0;
    const double denom = 1.0 - std::pow(s.beta, n);
    return (1.0 - s.beta) / denom;
}

struct GradientEstimate {
    std::vector<double> w;
    std::vector<double> u;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> c;

    static GradientEstimate zeros(const RbmParameters& p) {
        GradientEstimate g;
        g.w.assign(p.w.size(), 0.0);
        g.u.assign(p.u.size(), 0.0);
        g.a.assign(p.a.size(), 0.0);
        g.b.assign(p.b.size(), 0.0);
        g.c.assign(p.c.size(), 0.0);
        return g;
    }
};

namespace detail {

inline void check_dims(std::span<const double> v, std::span<const double> h,
                       std::span<const double> z, const RbmParameters& p) {
    if (static_cast<int>(v.size()) != p.visible || static_cast<int>(h.size()) != p.hidden ||
        static_cast<int>(z.size()) != p.classes) {
        throw std::domain_error("state dimensions do not match parameters");
    }
}

}  // namespace detail

// E(v,h,z) = -sum v_i a_i - sum h_j b_j - sum z_k c_k
//            - sum_ij v_i h_j w_ij - sum_jk h_j z_k u_jk
inline double energy(std::span<const double> v, std::span<const double> h,
                     std::span<const double> z, const RbmParameters& p) {
    detail::check_dims(v, h, z, p);
    double e = 0.0;
    for (int i = 0; i < p.visible; ++i) e -= v[i] * p.a[static_cast<std::size_t>(i)];
    for (int j = 0; j < p.hidden; ++j) e -= h[j] * p.b[static_cast<std::size_t>(j)];
    for (int k = 0; k < p.classes; ++k) e -= z[k] * p.c[static_cast<std::size_t>(k)];
    for (int i = 0; i < p.visible; ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        const double* row = &p.w[static_cast<std::size_t>(i) * p.hidden];
        for (int j = 0; j < p.hidden; ++j) e -= vi * h[j] * row[j];
    }
    for (int j = 0; j < p.hidden; ++j) {
        const double hj = h[j];
        if (hj == 0.0) continue;
        const double* row = &p.u[static_cast<std::size_t>(j) * p.classes];
        for (int k = 0; k < p.classes; ++k) e -= hj * z[k] * row[k];
    }
    return e;
}

// P(h_j = 1 | v, z) = sigmoid(b_j + sum_i v_i w_ij + sum_k z_k u_jk)
inline std::vector<double> hidden_activation(std::span<const double> v, std::span<const double> z,
                                             const RbmParameters& p) {
    if (static_cast<int>(v.size()) != p.visible || static_cast<int>(z.size()) != p.classes) {
        throw std::domain_error("state dimensions do not match parameters");
    }
    std::vector<double> act(p.b.begin(), p.b.end());
    for (int i = 0; i < p.visible; ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        const double* row = &p.w[static_cast<std::size_t>(i) * p.hidden];
        for (int j = 0; j < p.hidden; ++j) act[static_cast<std::size_t>(j)] += vi * row[j];
    }
    for (int j = 0; j < p.hidden; ++j) {
        const double* row = &p.u[static_cast<std::size_t>(j) * p.classes];
        double s = act[static_cast<std::size_t>(j)];
        for (int k = 0; k < p.classes; ++k) s += z[k] * row[k];
        act[static_cast<std::size_t>(j)] = sigmoid(s);
    }
    return act;
}

// P(v_i = 1 | h) = sigmoid(a_i + sum_j h_j w_ij); independent of the class layer.
inline std::vector<double> visible_activation(std::span<const double> h, const RbmParameters& p) {
    if (static_cast<int>(h.size()) != p.hidden) {
        throw std::domain_error("state dimensions do not match parameters");
    }
    std::vector<double> act(p.a.begin(), p.a.end());
    for (int i = 0; i < p.visible; ++i) {
        const double* row = &p.w[static_cast<std::size_t>(i) * p.hidden];
        double s = act[static_cast<std::size_t>(i)];
        for (int j = 0; j < p.hidden; ++j) s += h[j] * row[j];
        act[static_cast<std::size_t>(i)] = sigmoid(s);
    }
    return act;
}

// Softmax over class pre-activations c_k + sum_j h_j u_jk, stabilized by max
// subtraction. The sign follows the energy function, so lower energy means
// higher class probability.
inline std::vector<double> class_activation(std::span<const double> h, const RbmParameters& p) {
    if (static_cast<int>(h.size()) != p.hidden) {
        throw std::domain_error("state dimensions do not match parameters");
    }
    std::vector<double> act(p.c.begin(), p.c.end());
    for (int j = 0; j < p.hidden; ++j) {
        const double hj = h[j];
        if (hj == 0.0) continue;
        const double* row = &p.u[static_cast<std::size_t>(j) * p.classes];
        for (int k = 0; k < p.classes; ++k) act[static_cast<std::size_t>(k)] += hj * row[k];
    }
    softmax_inplace(act);
    return act;
}

// Products and marginals entering the contrastive-divergence update.
struct SufficientStats {
    std::vector<double> vh;  // V x H
    std::vector<double> hz;  // H x Z
    std::vector<double> v;
    std::vector<double> h;
    std::vector<double> z;

    void resize(const RbmParameters& p) {
        vh.assign(static_cast<std::size_t>(p.visible) * p.hidden, 0.0);
        hz.assign(static_cast<std::size_t>(p.hidden) * p.classes, 0.0);
        v.assign(static_cast<std::size_t>(p.visible), 0.0);
        h.assign(static_cast<std::size_t>(p.hidden), 0.0);
        z.assign(static_cast<std::size_t>(p.classes), 0.0);
    }
};

namespace detail {

inline void fill_stats(std::span<const double> v, std::span<const double> h_prob,
                       std::span<const double> z, SufficientStats& out) {
    const int V = static_cast<int>(v.size());
    const int H = static_cast<int>(h_prob.size());
    const int Z = static_cast<int>(z.size());
    for (int i = 0; i < V; ++i) {
        const double vi = v[i];
        double* row = &out.vh[static_cast<std::size_t>(i) * H];
        for (int j = 0; j < H; ++j) row[j] = vi * h_prob[j];
    }
    for (int j = 0; j < H; ++j) {
        const double hj = h_prob[j];
        double* row = &out.hz[static_cast<std::size_t>(j) * Z];
        for (int k = 0; k < Z; ++k) row[k] = hj * z[k];
    }
    std::copy(v.begin(), v.end(), out.v.begin());
    std::copy(h_prob.begin(), h_prob.end(), out.h.begin());
    std::copy(z.begin(), z.end(), out.z.begin());
}

}  // namespace detail

// CD-k chain for one instance. The positive phase clamps the visible layer to
// the (real-valued) features and the class layer to the one-hot label, with
// the hidden layer integrated out. The negative phase alternates
// h -> (v, z) -> h with binary/categorical samples; the returned statistics
// pair the last sampled (v, z) with the hidden probabilities they induce.
template <UniformSource R>
void gibbs_chain(const Instance& instance, int k, const RbmParameters& p, R& rng,
                 SufficientStats& data, SufficientStats& recon) {
    if (k < 1) throw std::domain_error("gibbs_chain needs k >= 1");
    data.resize(p);
    recon.resize(p);
    const std::vector<double> z0 = one_hot(instance.label, p.classes);
    const std::vector<double> h0 = hidden_activation(instance.features, z0, p);
    detail::fill_stats(instance.features, h0, z0, data);

    std::vector<double> h_state(static_cast<std::size_t>(p.hidden));
    for (int j = 0; j < p.hidden; ++j) {
        h_state[static_cast<std::size_t>(j)] = rng.uniform() < h0[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    }
    std::vector<double> v_state;
    std::vector<double> z_state;
    std::vector<double> h_prob;
    for (int step = 0; step < k; ++step) {
        const std::vector<double> v_prob = visible_activation(h_state, p);
        std::vector<double> z_prob = class_activation(h_state, p);
        v_state.assign(p.visible, 0.0);
        for (int i = 0; i < p.visible; ++i) {
            v_state[static_cast<std::size_t>(i)] =
                rng.uniform() < v_prob[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
        }
        // Categorical draw by inverse CDF.
        z_state.assign(static_cast<std::size_t>(p.classes), 0.0);
        {
            const double r = rng.uniform();
            double acc = 0.0;
            int pick = p.classes - 1;
            for (int kk = 0; kk < p.classes - 1; ++kk) {
                acc += z_prob[static_cast<std::size_t>(kk)];
                if (r < acc) {
                    pick = kk;
                    break;
                }
            }
            z_state[static_cast<std::size_t>(pick)] = 1.0;
        }
        h_prob = hidden_activation(v_state, z_state, p);
        if (step + 1 < k) {
            for (int j = 0; j < p.hidden; ++j) {
                h_state[static_cast<std::size_t>(j)] =
                    rng.uniform() < h_prob[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
            }
        }
    }
    detail::fill_stats(v_state, h_prob, z_state, recon);
}

// Class-balanced CD gradient over a mini-batch: per-instance
// (reconstruction - data) statistics scaled by the class weight, averaged,
// then clipped entrywise.
template <UniformSource R>
GradientEstimate batch_gradient(const MiniBatch& batch, const RbmParameters& p,
                                const RbmHyperparams& hp, const ClassBalanceState& balance,
                                R& rng) {
    if (batch.empty()) throw TrainingError("gradient of an empty batch");
    GradientEstimate g = GradientEstimate::zeros(p);
    SufficientStats data;
    SufficientStats recon;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (const Instance& inst : batch.instances) {
        gibbs_chain(inst, hp.gibbs_steps, p, rng, data, recon);
        const double wt = class_balance_weight(inst.label, balance) * inv_n;
        for (std::size_t i = 0; i < g.w.size(); ++i) g.w[i] += wt * (recon.vh[i] - data.vh[i]);
        for (std::size_t i = 0; i < g.u.size(); ++i) g.u[i] += wt * (recon.hz[i] - data.hz[i]);
        for (std::size_t i = 0; i < g.a.size(); ++i) g.a[i] += wt * (recon.v[i] - data.v[i]);
        for (std::size_t i = 0; i < g.b.size(); ++i) g.b[i] += wt * (recon.h[i] - data.h[i]);
        for (std::size_t i = 0; i < g.c.size(); ++i) g.c[i] += wt * (recon.z[i] - data.z[i]);
    }
    const double clip = hp.gradient_clip;
    if (clip > 0.0) {
        auto clamp_all = [clip](std::vector<double>& xs) {
            for (double& x : xs) x = std::clamp(x, -clip, clip);
        };
        clamp_all(g.w);
        clamp_all(g.u);
        clamp_all(g.a);
        clamp_all(g.b);
        clamp_all(g.c);
    }
    return g;
}

// theta <- theta - eta * g for every parameter block. Parameters are left
// untouched if any gradient entry is non-finite.
inline void apply_update(RbmParameters& p, const GradientEstimate& g, double eta) {
    auto all_finite = [](const std::vector<double>& xs) {
        for (double x : xs) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    };
    if (!all_finite(g.w) || !all_finite(g.u) || !all_finite(g.a) || !all_finite(g.b) ||
        !all_finite(g.c)) {
        throw TrainingError("non-finite gradient entry");
    }
    for (std::size_t i = 0; i < p.w.size(); ++i) p.w[i] -= eta * g.w[i];
    for (std::size_t i = 0; i < p.u.size(); ++i) p.u[i] -= eta * g.u[i];
    for (std::size_t i = 0; i < p.a.size(); ++i) p.a[i] -= eta * g.a[i];
    for (std::size_t i = 0; i < p.b.size(); ++i) p.b[i] -= eta * g.b[i];
    for (std::size_t i = 0; i < p.c.size(); ++i) p.c[i] -= eta * g.c[i];
}

// Weights from N(0, 0.01^2), biases zero, H = round(hidden_fraction * V).
template <UniformSource R>
RbmParameters init_parameters(const StreamSchema& schema, const RbmHyperparams& hp, R& rng) {
    const int V = schema.feature_count;
    const int H = std::max(1, static_cast<int>(std::lround(hp.hidden_fraction * V)));
    RbmParameters p = RbmParameters::zeros(V, H, schema.class_count);
    constexpr double kInitStddev = 0.01;
    for (double& x : p.w) x = rng.gaussian(0.0, kInitStddev);
    for (double& x : p.u) x = rng.gaussian(0.0, kInitStddev);
    return p;
}

}  // namespace driftmon
