#ifndef ANIMARL_QNET_HPP
#define ANIMARL_QNET_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "animarl/rng.hpp"

namespace animarl {

struct TensorSpec {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;  // 1 for bias vectors
    std::size_t offset = 0;
    std::size_t size() const { return rows * cols; }
};

// Loss weights of the combined objective: one-step double-Q TD error,
// l2 penalty (lambda1), adversarial treatment prediction (lambda2), and
// action supervision (lambda3, baselines only).
struct LossWeights {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double gamma = 0.99;

    void validate() const;
};

// Recurrent dueling Q-network: 2-layer ReLU encoder, single-layer GRU
// (hidden 32), value/advantage heads, and a sigmoid treatment head fed by
// the same hidden state.
class QNet {
public:
    QNet(int obs_dim, int n_actions = 13, int hidden = 32, int treat_hidden = 8);

    static constexpr double kProbClamp = 1e-7;

    int obs_dim() const { return obs_dim_; }
    int n_actions() const { return n_actions_; }
    int hidden_size() const { return hidden_; }
    int treat_hidden_size() const { return treat_hidden_; }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<TensorSpec>& tensors() const { return tensors_; }
    const TensorSpec& tensor(const std::string& name) const;

    // Uniform init in +-1/sqrt(fan_in).
    void init_params(Rng& rng);

    std::vector<double> zero_hidden() const { return std::vector<double>(hidden_, 0.0); }

    struct Forward {
        std::vector<double> q;          // per-action values
        double value = 0.0;             // dueling state value
        std::vector<double> advantage;  // pre-combine advantages
        double treatment_prob = 0.0;    // clamped sigmoid output
        std::vector<double> hidden;     // h_t

        // caches for backward
        std::vector<double> obs, h_prev;
        std::vector<double> e1_pre, e1, e2_pre, e2;
        std::vector<double> r, z, hcand;
        std::vector<double> v1_pre, v1, a1_pre, a1, t1_pre, t1;
        double t2_pre = 0.0;
        bool prob_clamped = false;
    };

    Forward forward(const std::vector<double>& obs, const std::vector<double>& h_prev) const;

    // Accumulates parameter gradients for one transition. dq is dL/dQ per
    // action and dchat_pre is dL/d(treatment pre-sigmoid); the treatment
    // path's contribution to the shared trunk is scaled by
    // treat_trunk_sign (-1 realizes gradient reversal).
    void backward(const Forward& f, const std::vector<double>& dq, double dchat_pre,
                  double treat_trunk_sign, std::vector<double>& grad) const;

    // Name of the tensor containing flat parameter index i.
    const std::string& tensor_name_of(std::size_t param_index) const;

private:
    int obs_dim_, n_actions_, hidden_, treat_hidden_;
    std::vector<double> params_;
    std::vector<TensorSpec> tensors_;

    std::size_t reg(const std::string& name, std::size_t rows, std::size_t cols);

    // tensor offsets
    std::size_t enc1_W_, enc1_b_, enc2_W_, enc2_b_;
    std::size_t gru_Wr_, gru_Ur_, gru_br_, gru_Wz_, gru_Uz_, gru_bz_, gru_Wh_, gru_Uh_, gru_bh_;
    std::size_t val1_W_, val1_b_, val2_W_, val2_b_;
    std::size_t adv1_W_, adv1_b_, adv2_W_, adv2_b_;
    std::size_t tr1_W_, tr1_b_, tr2_W_, tr2_b_;
};

// One replayed transition as consumed by the loss routines.
struct QBatchItem {
    std::vector<double> obs;
    std::vector<double> next_obs;
    std::vector<double> h_prev;  // recurrent state before obs
    std::vector<double> h_cur;   // recurrent state after obs
    int action = 0;
    double reward = 0.0;
    bool terminal = false;
    int condition = 0;
    int aligned_action = -1;  // DTW-aligned expert action (DQAAS)
    double weight = 1.0;      // PER importance weight
};

struct TdResult {
    double loss = 0.0;
    std::vector<double> td_errors;  // |y - Q(s,a)| per transition
};

// Double-Q one-step TD loss (unweighted mean squared error); the target
// network is read-only.
TdResult td_loss(const std::vector<QBatchItem>& batch, const QNet& online, const QNet& target,
                 double gamma);

// Binary cross-entropy with probability clamped to [1e-7, 1-1e-7].
double treatment_loss(int c, double c_hat);

struct LossSpec {
    LossWeights weights;
    bool use_td = true;
    bool use_supervised = false;   // cross-entropy toward a label action
    bool supervise_aligned = false;  // label = aligned_action instead of action
    bool use_treatment = false;
    double treat_trunk_sign = -1.0;  // gradient reversal by default
};

struct BackwardResult {
    std::vector<double> grad;
    double loss_td = 0.0;
    double loss_l2 = 0.0;
    double loss_tr = 0.0;
    double loss_sup = 0.0;
    double loss_total = 0.0;
    std::vector<double> td_errors;
};

// Full forward+backward for the composite objective; throws NumericalError
// naming the offending tensor if any gradient is non-finite.
BackwardResult backward_with_reversal(const QNet& online, const QNet& target,
                                      const std::vector<QBatchItem>& batch, const LossSpec& spec);

class Adam {
public:
    Adam(std::size_t n_params, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    void step(std::vector<double>& params, const std::vector<double>& grad, double lr);
    long steps_taken() const { return t_; }

private:
    std::vector<double> m_, v_;
    double beta1_, beta2_, eps_;
    long t_ = 0;
};

// --- checkpoint files ---

void save_checkpoint(const QNet& net, const std::string& path);
QNet load_checkpoint(const std::string& path);
// Validates the manifest checksum against the binary; throws FormatError on
// mismatch.
void verify_checkpoint(const std::string& path);

}  // namespace animarl

#endif
