#ifndef ANIMARL_TESTS_REFERENCE_NET_HPP
#define ANIMARL_TESTS_REFERENCE_NET_HPP

// Straight-line re-evaluation of the network and training objective used as
// an independent oracle for gradient and loss checks. Everything here works
// from the named checkpoint tensors only.

#include <algorithm>
#include <cmath>
#include <vector>

#include "animarl/qnet.hpp"

namespace refnet {

struct Mat {
    std::size_t rows = 0, cols = 0;
    const double* p = nullptr;
};

inline Mat tensor(const animarl::QNet& net, const std::string& name) {
    const auto& spec = net.tensor(name);
    return {spec.rows, spec.cols, net.params().data() + spec.offset};
}

inline std::vector<double> mat_vec(const Mat& W, const Mat& b, const std::vector<double>& x) {
    std::vector<double> y(W.rows, 0.0);
    for (std::size_t r = 0; r < W.rows; ++r) {
        double acc = b.p ? b.p[r] : 0.0;
        for (std::size_t c = 0; c < W.cols; ++c) acc += W.p[r * W.cols + c] * x[c];
        y[r] = acc;
    }
    return y;
}

struct RefOut {
    std::vector<double> q;
    double value = 0.0;
    double c_hat = 0.0;
    std::vector<double> hidden;
    double min_abs_preact = 1e300;  // smallest |pre-activation| across ReLUs
};

inline RefOut ref_forward(const animarl::QNet& net, const std::vector<double>& obs,
                          const std::vector<double>& h_prev) {
    auto relu_track = [](std::vector<double>& v, double& min_abs) {
        for (double& x : v) {
            min_abs = std::min(min_abs, std::abs(x));
            x = x > 0 ? x : 0.0;
        }
    };
    RefOut o;
    auto e1 = mat_vec(tensor(net, "enc1.W"), tensor(net, "enc1.b"), obs);
    relu_track(e1, o.min_abs_preact);
    auto e2 = mat_vec(tensor(net, "enc2.W"), tensor(net, "enc2.b"), e1);
    relu_track(e2, o.min_abs_preact);

    std::size_t h = net.hidden_size();
    auto rx = mat_vec(tensor(net, "gru.Wr"), tensor(net, "gru.br"), e2);
    auto rh = mat_vec(tensor(net, "gru.Ur"), Mat{}, h_prev);
    std::vector<double> r(h), z(h), rhprev(h);
    for (std::size_t i = 0; i < h; ++i) r[i] = 1.0 / (1.0 + std::exp(-(rx[i] + rh[i])));
    auto zx = mat_vec(tensor(net, "gru.Wz"), tensor(net, "gru.bz"), e2);
    auto zh = mat_vec(tensor(net, "gru.Uz"), Mat{}, h_prev);
    for (std::size_t i = 0; i < h; ++i) z[i] = 1.0 / (1.0 + std::exp(-(zx[i] + zh[i])));
    for (std::size_t i = 0; i < h; ++i) rhprev[i] = r[i] * h_prev[i];
    auto nx = mat_vec(tensor(net, "gru.Wh"), tensor(net, "gru.bh"), e2);
    auto nh = mat_vec(tensor(net, "gru.Uh"), Mat{}, rhprev);
    o.hidden.resize(h);
    for (std::size_t i = 0; i < h; ++i)
        o.hidden[i] = z[i] * h_prev[i] + (1.0 - z[i]) * std::tanh(nx[i] + nh[i]);

    auto v1 = mat_vec(tensor(net, "val1.W"), tensor(net, "val1.b"), o.hidden);
    relu_track(v1, o.min_abs_preact);
    o.value = mat_vec(tensor(net, "val2.W"), tensor(net, "val2.b"), v1)[0];
    auto a1 = mat_vec(tensor(net, "adv1.W"), tensor(net, "adv1.b"), o.hidden);
    relu_track(a1, o.min_abs_preact);
    auto adv = mat_vec(tensor(net, "adv2.W"), tensor(net, "adv2.b"), a1);
    double mean = 0.0;
    for (double a : adv) mean += a;
    mean /= static_cast<double>(adv.size());
    o.q.resize(adv.size());
    for (std::size_t k = 0; k < adv.size(); ++k) o.q[k] = o.value + adv[k] - mean;

    auto t1 = mat_vec(tensor(net, "treat1.W"), tensor(net, "treat1.b"), o.hidden);
    relu_track(t1, o.min_abs_preact);
    double t2 = mat_vec(tensor(net, "treat2.W"), tensor(net, "treat2.b"), t1)[0];
    o.c_hat = std::clamp(1.0 / (1.0 + std::exp(-t2)), animarl::QNet::kProbClamp,
                         1.0 - animarl::QNet::kProbClamp);
    return o;
}

// Objective with next-state greedy actions held fixed; jtr_sign selects the
// pseudo-objective whose gradient the reversal produces for the parameter
// group under test (+1 treatment head, -1 shared trunk).
inline double ref_objective(const animarl::QNet& online, const animarl::QNet& target,
                            const std::vector<animarl::QBatchItem>& batch,
                            const animarl::LossWeights& w, const std::vector<int>& frozen_amax,
                            double jtr_sign) {
    double td = 0.0, tr = 0.0;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& it = batch[i];
        RefOut f = ref_forward(online, it.obs, it.h_prev);
        double y = it.reward;
        if (!it.terminal) {
            RefOut ft = ref_forward(target, it.next_obs, it.h_cur);
            y += w.gamma * ft.q[frozen_amax[i]];
        }
        double err = y - f.q[it.action];
        td += it.weight * err * err * inv_b;
        tr += animarl::treatment_loss(it.condition, f.c_hat) * inv_b;
    }
    double l2 = 0.0;
    for (double p : online.params()) l2 += p * p;
    return td + w.lambda1 * l2 + jtr_sign * w.lambda2 * tr;
}

}  // namespace refnet

#endif
