#include "animarl/qnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "animarl/errors.hpp"

namespace animarl {

void LossWeights::validate() const {
    if (lambda1 < 0 || lambda2 < 0 || lambda3 < 0)
        throw ContractError("LossWeights: lambdas must be >= 0");
    if (!(gamma > 0 && gamma <= 1)) throw ContractError("LossWeights: gamma must be in (0,1]");
}

namespace {

inline double relu(double x) { return x > 0 ? x : 0.0; }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y = W x + b, W is rows x cols row-major.
void affine(const double* W, const double* b, const std::vector<double>& x, std::size_t rows,
            std::size_t cols, std::vector<double>& y) {
    y.assign(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = W + r * cols;
        double acc = b ? b[r] : 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
        y[r] = acc;
    }
}

// grad_W += dy x^T, grad_b += dy
void accum_affine(double* gW, double* gb, const std::vector<double>& dy,
                  const std::vector<double>& x, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        double d = dy[r];
        if (d == 0.0) continue;
        double* gr = gW + r * cols;
        for (std::size_t c = 0; c < cols; ++c) gr[c] += d * x[c];
        gb[r] += d;
    }
}

// dx += W^T dy
void accum_input_grad(const double* W, const std::vector<double>& dy, std::size_t rows,
                      std::size_t cols, std::vector<double>& dx) {
    for (std::size_t r = 0; r < rows; ++r) {
        double d = dy[r];
        if (d == 0.0) continue;
        const double* wr = W + r * cols;
        for (std::size_t c = 0; c < cols; ++c) dx[c] += d * wr[c];
    }
}

}  // namespace

QNet::QNet(int obs_dim, int n_actions, int hidden, int treat_hidden)
    : obs_dim_(obs_dim), n_actions_(n_actions), hidden_(hidden), treat_hidden_(treat_hidden) {
    if (obs_dim < 1 || n_actions < 2 || hidden < 1 || treat_hidden < 1)
        throw ContractError("QNet: invalid dimensions");
    std::size_t h = hidden_, o = obs_dim_, a = n_actions_, th = treat_hidden_;
    enc1_W_ = reg("enc1.W", h, o);
    enc1_b_ = reg("enc1.b", h, 1);
    enc2_W_ = reg("enc2.W", h, h);
    enc2_b_ = reg("enc2.b", h, 1);
    gru_Wr_ = reg("gru.Wr", h, h);
    gru_Ur_ = reg("gru.Ur", h, h);
    gru_br_ = reg("gru.br", h, 1);
    gru_Wz_ = reg("gru.Wz", h, h);
    gru_Uz_ = reg("gru.Uz", h, h);
    gru_bz_ = reg("gru.bz", h, 1);
    gru_Wh_ = reg("gru.Wh", h, h);
    gru_Uh_ = reg("gru.Uh", h, h);
    gru_bh_ = reg("gru.bh", h, 1);
    val1_W_ = reg("val1.W", h, h);
    val1_b_ = reg("val1.b", h, 1);
    val2_W_ = reg("val2.W", 1, h);
    val2_b_ = reg("val2.b", 1, 1);
    adv1_W_ = reg("adv1.W", h, h);
    adv1_b_ = reg("adv1.b", h, 1);
    adv2_W_ = reg("adv2.W", a, h);
    adv2_b_ = reg("adv2.b", a, 1);
    tr1_W_ = reg("treat1.W", th, h);
    tr1_b_ = reg("treat1.b", th, 1);
    tr2_W_ = reg("treat2.W", 1, th);
    tr2_b_ = reg("treat2.b", 1, 1);
}

std::size_t QNet::reg(const std::string& name, std::size_t rows, std::size_t cols) {
    TensorSpec spec{name, rows, cols, params_.size()};
    params_.resize(params_.size() + spec.size(), 0.0);
    tensors_.push_back(spec);
    return spec.offset;
}

const TensorSpec& QNet::tensor(const std::string& name) const {
    for (const auto& t : tensors_)
        if (t.name == name) return t;
    throw ContractError("QNet: unknown tensor " + name);
}

const std::string& QNet::tensor_name_of(std::size_t param_index) const {
    for (const auto& t : tensors_)
        if (param_index >= t.offset && param_index < t.offset + t.size()) return t.name;
    throw ContractError("QNet: parameter index out of range");
}

void QNet::init_params(Rng& rng) {
    for (const auto& t : tensors_) {
        std::size_t fan_in = t.cols == 1 ? t.rows : t.cols;
        // Biases share the fan-in of their weight matrix.
        if (t.cols == 1) {
            const std::string base = t.name.substr(0, t.name.size() - 1) + "W";
            for (const auto& w : tensors_)
                if (w.name == base) fan_in = w.cols;
        }
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < t.size(); ++i)
            params_[t.offset + i] = rng.uniform(-bound, bound);
    }
}

QNet::Forward QNet::forward(const std::vector<double>& obs,
                            const std::vector<double>& h_prev) const {
    if (obs.size() != static_cast<std::size_t>(obs_dim_))
        throw ContractError("QNet::forward: observation dimension mismatch");
    if (h_prev.size() != static_cast<std::size_t>(hidden_))
        throw ContractError("QNet::forward: hidden dimension mismatch");

    const double* P = params_.data();
    std::size_t h = hidden_, o = obs_dim_, a = n_actions_, th = treat_hidden_;
    Forward f;
    f.obs = obs;
    f.h_prev = h_prev;

    affine(P + enc1_W_, P + enc1_b_, obs, h, o, f.e1_pre);
    f.e1.resize(h);
    for (std::size_t i = 0; i < h; ++i) f.e1[i] = relu(f.e1_pre[i]);
    affine(P + enc2_W_, P + enc2_b_, f.e1, h, h, f.e2_pre);
    f.e2.resize(h);
    for (std::size_t i = 0; i < h; ++i) f.e2[i] = relu(f.e2_pre[i]);

    std::vector<double> tmp_x, tmp_h;
    affine(P + gru_Wr_, P + gru_br_, f.e2, h, h, tmp_x);
    affine(P + gru_Ur_, nullptr, h_prev, h, h, tmp_h);
    f.r.resize(h);
    for (std::size_t i = 0; i < h; ++i) f.r[i] = sigmoid(tmp_x[i] + tmp_h[i]);
    affine(P + gru_Wz_, P + gru_bz_, f.e2, h, h, tmp_x);
    affine(P + gru_Uz_, nullptr, h_prev, h, h, tmp_h);
    f.z.resize(h);
    for (std::size_t i = 0; i < h; ++i) f.z[i] = sigmoid(tmp_x[i] + tmp_h[i]);
    std::vector<double> rh(h);
    for (std::size_t i = 0; i < h; ++i) rh[i] = f.r[i] * h_prev[i];
    affine(P + gru_Wh_, P + gru_bh_, f.e2, h, h, tmp_x);
    affine(P + gru_Uh_, nullptr, rh, h, h, tmp_h);
    f.hcand.resize(h);
    f.hidden.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
        f.hcand[i] = std::tanh(tmp_x[i] + tmp_h[i]);
        f.hidden[i] = f.z[i] * h_prev[i] + (1.0 - f.z[i]) * f.hcand[i];
    }

    affine(P + val1_W_, P + val1_b_, f.hidden, h, h, f.v1_pre);
    f.v1.resize(h);
    for (std::size_t i = 0; i < h; ++i) f.v1[i] = relu(f.v1_pre[i]);
    std::vector<double> vout;
    affine(P + val2_W_, P + val2_b_, f.v1, 1, h, vout);
    f.value = vout[0];

    affine(P + adv1_W_, P + adv1_b_, f.hidden, h, h, f.a1_pre);
    f.a1.resize(h);
    for (std::size_t i = 0; i < h; ++i) f.a1[i] = relu(f.a1_pre[i]);
    affine(P + adv2_W_, P + adv2_b_, f.a1, a, h, f.advantage);

    double adv_mean = 0.0;
    for (double x : f.advantage) adv_mean += x;
    adv_mean /= static_cast<double>(a);
    f.q.resize(a);
    for (std::size_t k = 0; k < a; ++k) f.q[k] = f.value + f.advantage[k] - adv_mean;

    affine(P + tr1_W_, P + tr1_b_, f.hidden, th, h, f.t1_pre);
    f.t1.resize(th);
    for (std::size_t i = 0; i < th; ++i) f.t1[i] = relu(f.t1_pre[i]);
    std::vector<double> tout;
    affine(P + tr2_W_, P + tr2_b_, f.t1, 1, th, tout);
    f.t2_pre = tout[0];
    double p = sigmoid(f.t2_pre);
    f.prob_clamped = p < kProbClamp || p > 1.0 - kProbClamp;
    f.treatment_prob = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    return f;
}

void QNet::backward(const Forward& f, const std::vector<double>& dq, double dchat_pre,
                    double treat_trunk_sign, std::vector<double>& grad) const {
    if (grad.size() != params_.size()) throw ContractError("QNet::backward: gradient size mismatch");
    const double* P = params_.data();
    double* G = grad.data();
    std::size_t h = hidden_, o = obs_dim_, a = n_actions_, th = treat_hidden_;

    // dueling combine: q_k = v + adv_k - mean(adv)
    double dv = 0.0;
    for (std::size_t k = 0; k < a; ++k) dv += dq[k];
    std::vector<double> dadv(a);
    double dq_mean = dv / static_cast<double>(a);
    for (std::size_t k = 0; k < a; ++k) dadv[k] = dq[k] - dq_mean;

    std::vector<double> dh(h, 0.0);

    // value head
    {
        std::vector<double> dv1(h);
        const double* W2 = P + val2_W_;
        for (std::size_t i = 0; i < h; ++i) dv1[i] = dv * W2[i];
        G[val2_b_] += dv;
        for (std::size_t i = 0; i < h; ++i) G[val2_W_ + i] += dv * f.v1[i];
        std::vector<double> dv1_pre(h);
        for (std::size_t i = 0; i < h; ++i) dv1_pre[i] = f.v1_pre[i] > 0 ? dv1[i] : 0.0;
        accum_affine(G + val1_W_, G + val1_b_, dv1_pre, f.hidden, h, h);
        accum_input_grad(P + val1_W_, dv1_pre, h, h, dh);
    }

    // advantage head
    {
        std::vector<double> da1(h, 0.0);
        accum_affine(G + adv2_W_, G + adv2_b_, dadv, f.a1, a, h);
        accum_input_grad(P + adv2_W_, dadv, a, h, da1);
        std::vector<double> da1_pre(h);
        for (std::size_t i = 0; i < h; ++i) da1_pre[i] = f.a1_pre[i] > 0 ? da1[i] : 0.0;
        accum_affine(G + adv1_W_, G + adv1_b_, da1_pre, f.hidden, h, h);
        accum_input_grad(P + adv1_W_, da1_pre, h, h, dh);
    }

    // treatment head; its trunk contribution is sign-scaled (gradient reversal)
    if (dchat_pre != 0.0) {
        std::vector<double> dt1(th);
        const double* W2 = P + tr2_W_;
        for (std::size_t i = 0; i < th; ++i) dt1[i] = dchat_pre * W2[i];
        G[tr2_b_] += dchat_pre;
        for (std::size_t i = 0; i < th; ++i) G[tr2_W_ + i] += dchat_pre * f.t1[i];
        std::vector<double> dt1_pre(th);
        for (std::size_t i = 0; i < th; ++i) dt1_pre[i] = f.t1_pre[i] > 0 ? dt1[i] : 0.0;
        accum_affine(G + tr1_W_, G + tr1_b_, dt1_pre, f.hidden, th, h);
        std::vector<double> dh_tr(h, 0.0);
        accum_input_grad(P + tr1_W_, dt1_pre, th, h, dh_tr);
        for (std::size_t i = 0; i < h; ++i) dh[i] += treat_trunk_sign * dh_tr[i];
    }

    // GRU backward, h_prev held constant (stored-state replay)
    std::vector<double> dz(h), dhcand_pre(h);
    for (std::size_t i = 0; i < h; ++i) {
        dz[i] = dh[i] * (f.h_prev[i] - f.hcand[i]);
        double dhc = dh[i] * (1.0 - f.z[i]);
        dhcand_pre[i] = dhc * (1.0 - f.hcand[i] * f.hcand[i]);
    }
    std::vector<double> rh(h);
    for (std::size_t i = 0; i < h; ++i) rh[i] = f.r[i] * f.h_prev[i];
    accum_affine(G + gru_Wh_, G + gru_bh_, dhcand_pre, f.e2, h, h);
    {
        // gU_h += dhcand_pre (r*h_prev)^T, without touching a bias slot
        for (std::size_t r0 = 0; r0 < h; ++r0) {
            double d = dhcand_pre[r0];
            if (d == 0.0) continue;
            double* gr = G + gru_Uh_ + r0 * h;
            for (std::size_t c = 0; c < h; ++c) gr[c] += d * rh[c];
        }
    }
    std::vector<double> drh(h, 0.0);
    accum_input_grad(P + gru_Uh_, dhcand_pre, h, h, drh);
    std::vector<double> dr_pre(h), dz_pre(h);
    for (std::size_t i = 0; i < h; ++i) {
        double dr = drh[i] * f.h_prev[i];
        dr_pre[i] = dr * f.r[i] * (1.0 - f.r[i]);
        dz_pre[i] = dz[i] * f.z[i] * (1.0 - f.z[i]);
    }
    accum_affine(G + gru_Wr_, G + gru_br_, dr_pre, f.e2, h, h);
    accum_affine(G + gru_Wz_, G + gru_bz_, dz_pre, f.e2, h, h);
    for (std::size_t r0 = 0; r0 < h; ++r0) {
        if (dr_pre[r0] != 0.0) {
            double* gr = G + gru_Ur_ + r0 * h;
            for (std::size_t c = 0; c < h; ++c) gr[c] += dr_pre[r0] * f.h_prev[c];
        }
        if (dz_pre[r0] != 0.0) {
            double* gz = G + gru_Uz_ + r0 * h;
            for (std::size_t c = 0; c < h; ++c) gz[c] += dz_pre[r0] * f.h_prev[c];
        }
    }
    std::vector<double> dx(h, 0.0);
    accum_input_grad(P + gru_Wh_, dhcand_pre, h, h, dx);
    accum_input_grad(P + gru_Wr_, dr_pre, h, h, dx);
    accum_input_grad(P + gru_Wz_, dz_pre, h, h, dx);

    // encoder backward
    std::vector<double> de2_pre(h);
    for (std::size_t i = 0; i < h; ++i) de2_pre[i] = f.e2_pre[i] > 0 ? dx[i] : 0.0;
    accum_affine(G + enc2_W_, G + enc2_b_, de2_pre, f.e1, h, h);
    std::vector<double> de1(h, 0.0);
    accum_input_grad(P + enc2_W_, de2_pre, h, h, de1);
    std::vector<double> de1_pre(h);
    for (std::size_t i = 0; i < h; ++i) de1_pre[i] = f.e1_pre[i] > 0 ? de1[i] : 0.0;
    accum_affine(G + enc1_W_, G + enc1_b_, de1_pre, f.obs, h, o);
}

TdResult td_loss(const std::vector<QBatchItem>& batch, const QNet& online, const QNet& target,
                 double gamma) {
    if (batch.empty()) throw ContractError("td_loss: empty batch");
    TdResult res;
    res.td_errors.reserve(batch.size());
    double acc = 0.0;
    for (const QBatchItem& it : batch) {
        QNet::Forward f = online.forward(it.obs, it.h_prev);
        double y = it.reward;
        if (!it.terminal) {
            QNet::Forward fn = online.forward(it.next_obs, it.h_cur);
            int a_max = 0;
            for (int k = 1; k < online.n_actions(); ++k)
                if (fn.q[k] > fn.q[a_max]) a_max = k;
            QNet::Forward ft = target.forward(it.next_obs, it.h_cur);
            y += gamma * ft.q[a_max];
        }
        double err = y - f.q[it.action];
        res.td_errors.push_back(std::abs(err));
        acc += err * err;
    }
    res.loss = acc / static_cast<double>(batch.size());
    return res;
}

double treatment_loss(int c, double c_hat) {
    if (c != 0 && c != 1) throw ContractError("treatment_loss: c must be 0 or 1");
    double p = std::clamp(c_hat, QNet::kProbClamp, 1.0 - QNet::kProbClamp);
    return -(c * std::log(p) + (1 - c) * std::log(1.0 - p));
}

BackwardResult backward_with_reversal(const QNet& online, const QNet& target,
                                      const std::vector<QBatchItem>& batch,
                                      const LossSpec& spec) {
    if (batch.empty()) throw ContractError("backward_with_reversal: empty batch");
    spec.weights.validate();
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    const int a_count = online.n_actions();

    BackwardResult out;
    out.grad.assign(online.params().size(), 0.0);
    out.td_errors.reserve(batch.size());

    for (const QBatchItem& it : batch) {
        QNet::Forward f = online.forward(it.obs, it.h_prev);
        std::vector<double> dq(a_count, 0.0);

        if (spec.use_td) {
            double y = it.reward;
            if (!it.terminal) {
                QNet::Forward fn = online.forward(it.next_obs, it.h_cur);
                int a_max = 0;
                for (int k = 1; k < a_count; ++k)
                    if (fn.q[k] > fn.q[a_max]) a_max = k;
                QNet::Forward ft = target.forward(it.next_obs, it.h_cur);
                y += spec.weights.gamma * ft.q[a_max];
            }
            double err = y - f.q[it.action];
            out.td_errors.push_back(std::abs(err));
            out.loss_td += it.weight * err * err * inv_b;
            dq[it.action] += 2.0 * it.weight * (f.q[it.action] - y) * inv_b;
        }

        if (spec.use_supervised) {
            int label = spec.supervise_aligned ? it.aligned_action : it.action;
            if (label < 0 || label >= a_count)
                throw ContractError("backward_with_reversal: missing supervision label");
            double qmax = *std::max_element(f.q.begin(), f.q.end());
            double zsum = 0.0;
            std::vector<double> soft(a_count);
            for (int k = 0; k < a_count; ++k) {
                soft[k] = std::exp(f.q[k] - qmax);
                zsum += soft[k];
            }
            for (int k = 0; k < a_count; ++k) soft[k] /= zsum;
            out.loss_sup += -std::log(std::max(soft[label], 1e-300)) * it.weight * inv_b;
            double scale = (spec.use_td ? spec.weights.lambda3 : 1.0) * it.weight * inv_b;
            for (int k = 0; k < a_count; ++k)
                dq[k] += scale * (soft[k] - (k == label ? 1.0 : 0.0));
        }

        double dchat_pre = 0.0;
        if (spec.use_treatment) {
            out.loss_tr += treatment_loss(it.condition, f.treatment_prob) * inv_b;
            if (!f.prob_clamped)
                dchat_pre = spec.weights.lambda2 * (f.treatment_prob - it.condition) * inv_b;
        }

        online.backward(f, dq, dchat_pre, spec.treat_trunk_sign, out.grad);
    }

    if (spec.weights.lambda1 > 0) {
        const auto& p = online.params();
        double sq = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            sq += p[i] * p[i];
            out.grad[i] += spec.weights.lambda1 * 2.0 * p[i];
        }
        out.loss_l2 = sq;
    }

    for (std::size_t i = 0; i < out.grad.size(); ++i) {
        if (!std::isfinite(out.grad[i]))
            throw NumericalError("non-finite gradient in tensor " + online.tensor_name_of(i));
    }

    out.loss_total = out.loss_td + spec.weights.lambda1 * out.loss_l2 +
                     spec.weights.lambda2 * out.loss_tr +
                     (spec.use_td ? spec.weights.lambda3 : 1.0) * out.loss_sup;
    return out;
}

Adam::Adam(std::size_t n_params, double beta1, double beta2, double eps)
    : m_(n_params, 0.0), v_(n_params, 0.0), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
    if (params.size() != m_.size() || grad.size() != m_.size())
        throw ContractError("Adam::step: size mismatch");
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        double mh = m_[i] / bc1;
        double vh = v_[i] / bc2;
        params[i] -= lr * mh / (std::sqrt(vh) + eps_);
    }
}

// --- checkpoint io ---

namespace {

constexpr char kCheckpointMagic[8] = {'A', 'N', 'M', 'R', 'L', 'C', 'K', '1'};

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("checkpoint: truncated file");
    return v;
}

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string checksum_hex(const std::string& bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

}  // namespace

void save_checkpoint(const QNet& net, const std::string& path) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write checkpoint: " + path);
        out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.obs_dim()));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.n_actions()));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.hidden_size()));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.treat_hidden_size()));
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.tensors().size()));
        for (const auto& t : net.tensors()) {
            write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
            out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
            write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.rows));
            write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.cols));
            out.write(reinterpret_cast<const char*>(net.params().data() + t.offset),
                      static_cast<std::streamsize>(t.size() * sizeof(double)));
        }
        if (!out) throw IoError("failed writing checkpoint: " + path);
    }
    std::string bytes = read_file_bytes(path);
    std::ofstream man(path + ".manifest");
    if (!man) throw IoError("cannot write checkpoint manifest: " + path + ".manifest");
    man << "animarl-checkpoint v1\n";
    man << "obs_dim " << net.obs_dim() << "\n";
    man << "n_actions " << net.n_actions() << "\n";
    man << "hidden " << net.hidden_size() << "\n";
    man << "treat_hidden " << net.treat_hidden_size() << "\n";
    for (const auto& t : net.tensors())
        man << "tensor " << t.name << " " << t.rows << " " << t.cols << "\n";
    man << "checksum " << checksum_hex(bytes) << "\n";
    if (!man) throw IoError("failed writing checkpoint manifest");
}

QNet load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw FormatError("checkpoint " + path + ": bad magic");
    auto obs_dim = read_pod<std::uint32_t>(in);
    auto n_actions = read_pod<std::uint32_t>(in);
    auto hidden = read_pod<std::uint32_t>(in);
    auto treat_hidden = read_pod<std::uint32_t>(in);
    auto n_tensors = read_pod<std::uint32_t>(in);
    QNet net(static_cast<int>(obs_dim), static_cast<int>(n_actions), static_cast<int>(hidden),
             static_cast<int>(treat_hidden));
    if (n_tensors != net.tensors().size())
        throw FormatError("checkpoint " + path + ": unexpected tensor count");
    for (const auto& expect : net.tensors()) {
        auto name_len = read_pod<std::uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        auto rows = read_pod<std::uint32_t>(in);
        auto cols = read_pod<std::uint32_t>(in);
        if (!in || name != expect.name || rows != expect.rows || cols != expect.cols)
            throw FormatError("checkpoint " + path + ": tensor layout mismatch at " + name);
        in.read(reinterpret_cast<char*>(net.params().data() + expect.offset),
                static_cast<std::streamsize>(expect.size() * sizeof(double)));
        if (!in) throw IoError("checkpoint " + path + ": truncated tensor data");
    }
    return net;
}

void verify_checkpoint(const std::string& path) {
    std::string bytes = read_file_bytes(path);
    std::ifstream man(path + ".manifest");
    if (!man) throw IoError("cannot open checkpoint manifest: " + path + ".manifest");
    std::string line, recorded;
    while (std::getline(man, line)) {
        if (line.rfind("checksum ", 0) == 0) recorded = line.substr(9);
    }
    if (recorded.empty())
        throw FormatError("checkpoint manifest missing checksum: " + path + ".manifest");
    if (recorded != checksum_hex(bytes))
        throw FormatError("checkpoint checksum mismatch for " + path);
}

}  // namespace animarl
