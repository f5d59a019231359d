#ifndef OUD_RECURRENT_HPP
#define OUD_RECURRENT_HPP

#include <cstddef>
#include <vector>

#include "oud/numkit.hpp"

// LSTM cell, single-direction unrolling with state freezing on padded steps,
// bidirectional composition, and exact reverse-mode backpropagation through
// time.

namespace oud {

struct LstmParams {
    std::size_t l = 0; // hidden size
    std::size_t d = 0; // input size
    Matrix w_f, w_i, w_c, w_o; // l x d
    Matrix u_f, u_i, u_c, u_o; // l x l
    Vec b_f, b_i, b_c, b_o;    // l

    LstmParams() = default;
    LstmParams(std::size_t l, std::size_t d);

    // W, U uniform in [-1/sqrt(l), 1/sqrt(l)); biases zero except the forget
    // gate bias, which starts at 1 to keep early memory open.
    static LstmParams init(std::size_t l, std::size_t d, RngState& rng);

    void add_scaled(const LstmParams& grad, double scale);
};

struct LstmState {
    Vec h; // hidden, entries in (-1, 1)
    Vec c; // cell

    explicit LstmState(std::size_t l = 0) : h(l, 0.0), c(l, 0.0) {}
};

// Per-step activations cached for the backward pass. Frozen (padded) steps
// keep empty gate vectors.
struct LstmStepCache {
    Vec f, i, c_tilde, o;
    Vec c;      // post-step cell state
    Vec tanh_c; // tanh(c)
    bool frozen = false;
};

struct LstmCache {
    std::vector<LstmStepCache> steps;
    std::vector<Vec> h;       // h[t] after step t, h.size() == T
    std::vector<Vec> c;       // c[t] after step t
    Matrix x;                 // input actually consumed (d x T)
    std::vector<bool> mask;
    std::size_t l = 0, d = 0;
};

struct BlstmOutput {
    Matrix h_concat; // 2l x T, column t = [fwd h_t ; bwd h_t]
    std::size_t l = 0;
};

struct BlstmCache {
    LstmCache fwd;
    LstmCache bwd;              // run over the reversed valid subsequence
    std::size_t valid_len = 0;  // number of unmasked positions (prefix)
    std::size_t seq_len = 0;
};

struct LstmGrads {
    LstmParams fwd;
    LstmParams bwd;
    Matrix d_x; // d x T
};

// One cell step: f, i, c~, c, o, h from the gate equations.
LstmState lstm_cell_step(const LstmParams& params, const Vec& x_t, const LstmState& prev,
                         LstmStepCache* cache = nullptr);

// Unroll over t = 0..T-1 from a zero state. Masked steps copy the previous
// state through unchanged.
LstmCache lstm_forward(const LstmParams& params, const Matrix& x, const std::vector<bool>& mask);

// Gradients of a scalar loss through one direction's unrolled recurrence.
// d_h[t] is dLoss/dh_t. Returns parameter gradients and dLoss/dX.
void lstm_backward(const LstmParams& params, const LstmCache& cache, const std::vector<Vec>& d_h,
                   LstmParams& grads, Matrix& d_x);

// Bidirectional pass: the backward direction consumes the reversed valid
// prefix, so its hidden state at a padded position is zero.
BlstmOutput blstm_forward(const LstmParams& fwd, const LstmParams& bwd, const Matrix& x,
                          const std::vector<bool>& mask, BlstmCache* cache = nullptr);

// Reverse-mode through blstm_forward. d_h_concat is dLoss/dH (2l x T).
LstmGrads blstm_backward(const LstmParams& fwd, const LstmParams& bwd, const BlstmCache& cache,
                         const Matrix& d_h_concat);

} // namespace oud

#endif
