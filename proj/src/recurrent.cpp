#include "oud/recurrent.hpp"

#include <cmath>

namespace oud {

namespace {

// z = W x + U h + b
Vec gate_preact(const Matrix& w, const Matrix& u, const Vec& b, const Vec& x, const Vec& h) {
    Vec z(w.rows);
    matvec(w, x, z);
    Vec uh(u.rows);
    matvec(u, h, uh);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += uh[i] + b[i];
    return z;
}

void sigmoid_inplace(Vec& v) {
    for (auto& x : v) x = 1.0 / (1.0 + std::exp(-x));
}

void tanh_inplace(Vec& v) {
    for (auto& x : v) x = std::tanh(x);
}

Vec column(const Matrix& m, std::size_t j) {
    Vec out(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) out[r] = m.at(r, j);
    return out;
}

} // namespace

LstmParams::LstmParams(std::size_t l_, std::size_t d_)
    : l(l_), d(d_),
      w_f(l_, d_), w_i(l_, d_), w_c(l_, d_), w_o(l_, d_),
      u_f(l_, l_), u_i(l_, l_), u_c(l_, l_), u_o(l_, l_),
      b_f(l_, 0.0), b_i(l_, 0.0), b_c(l_, 0.0), b_o(l_, 0.0) {}

LstmParams LstmParams::init(std::size_t l, std::size_t d, RngState& rng) {
    LstmParams p(l, d);
    const double bound = 1.0 / std::sqrt(static_cast<double>(l));
    p.w_f = rand_uniform(rng, l, d, -bound, bound);
    p.w_i = rand_uniform(rng, l, d, -bound, bound);
    p.w_c = rand_uniform(rng, l, d, -bound, bound);
    p.w_o = rand_uniform(rng, l, d, -bound, bound);
    p.u_f = rand_uniform(rng, l, l, -bound, bound);
    p.u_i = rand_uniform(rng, l, l, -bound, bound);
    p.u_c = rand_uniform(rng, l, l, -bound, bound);
    p.u_o = rand_uniform(rng, l, l, -bound, bound);
    for (auto& b : p.b_f) b = 1.0;
    return p;
}

void LstmParams::add_scaled(const LstmParams& grad, double scale) {
    auto axpy_m = [scale](Matrix& a, const Matrix& g) {
        for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += scale * g.values[i];
    };
    auto axpy_v = [scale](Vec& a, const Vec& g) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * g[i];
    };
    axpy_m(w_f, grad.w_f); axpy_m(w_i, grad.w_i); axpy_m(w_c, grad.w_c); axpy_m(w_o, grad.w_o);
    axpy_m(u_f, grad.u_f); axpy_m(u_i, grad.u_i); axpy_m(u_c, grad.u_c); axpy_m(u_o, grad.u_o);
    axpy_v(b_f, grad.b_f); axpy_v(b_i, grad.b_i); axpy_v(b_c, grad.b_c); axpy_v(b_o, grad.b_o);
}

LstmState lstm_cell_step(const LstmParams& params, const Vec& x_t, const LstmState& prev,
                         LstmStepCache* cache) {
    Vec f = gate_preact(params.w_f, params.u_f, params.b_f, x_t, prev.h);
    Vec i = gate_preact(params.w_i, params.u_i, params.b_i, x_t, prev.h);
    Vec ct = gate_preact(params.w_c, params.u_c, params.b_c, x_t, prev.h);
    Vec o = gate_preact(params.w_o, params.u_o, params.b_o, x_t, prev.h);
    sigmoid_inplace(f);
    sigmoid_inplace(i);
    tanh_inplace(ct);
    sigmoid_inplace(o);

    LstmState next(params.l);
    Vec tanh_c(params.l);
    for (std::size_t j = 0; j < params.l; ++j) {
        next.c[j] = i[j] * ct[j] + f[j] * prev.c[j];
        tanh_c[j] = std::tanh(next.c[j]);
        next.h[j] = o[j] * tanh_c[j];
    }
    if (cache != nullptr) {
        cache->f = std::move(f);
        cache->i = std::move(i);
        cache->c_tilde = std::move(ct);
        cache->o = std::move(o);
        cache->c = next.c;
        cache->tanh_c = std::move(tanh_c);
        cache->frozen = false;
    }
    return next;
}

LstmCache lstm_forward(const LstmParams& params, const Matrix& x, const std::vector<bool>& mask) {
    if (x.rows != params.d) {
        throw ShapeError("lstm_forward: input rows " + std::to_string(x.rows) + " != d " +
                         std::to_string(params.d));
    }
    if (mask.size() != x.cols) {
        throw ShapeError("lstm_forward: mask length " + std::to_string(mask.size()) +
                         " != T " + std::to_string(x.cols));
    }
    const std::size_t T = x.cols;
    LstmCache cache;
    cache.l = params.l;
    cache.d = params.d;
    cache.x = x;
    cache.mask = mask;
    cache.steps.resize(T);
    cache.h.resize(T);
    cache.c.resize(T);

    LstmState state(params.l);
    for (std::size_t t = 0; t < T; ++t) {
        if (mask[t]) {
            state = lstm_cell_step(params, column(x, t), state, &cache.steps[t]);
        } else {
            cache.steps[t].frozen = true; // state passes through unchanged
        }
        cache.h[t] = state.h;
        cache.c[t] = state.c;
    }
    return cache;
}

void lstm_backward(const LstmParams& params, const LstmCache& cache, const std::vector<Vec>& d_h,
                   LstmParams& grads, Matrix& d_x) {
    const std::size_t T = cache.steps.size();
    if (d_h.size() != T) {
        throw ShapeError("lstm_backward: d_h length " + std::to_string(d_h.size()) + " != T " +
                         std::to_string(T));
    }
    const std::size_t l = params.l;
    d_x = Matrix(params.d, T);

    Vec dh_carry(l, 0.0);
    Vec dc_carry(l, 0.0);
    Vec dz_f(l), dz_i(l), dz_c(l), dz_o(l);
    const Vec zero(l, 0.0);

    for (std::size_t ti = T; ti-- > 0;) {
        const auto& step = cache.steps[ti];
        for (std::size_t j = 0; j < l; ++j) dh_carry[j] += d_h[ti][j];
        if (step.frozen) continue; // identity step: both carries pass through

        const Vec& prev_h = ti > 0 ? cache.h[ti - 1] : zero;
        const Vec& prev_c = ti > 0 ? cache.c[ti - 1] : zero;

        for (std::size_t j = 0; j < l; ++j) {
            const double dh = dh_carry[j];
            const double o = step.o[j];
            const double tc = step.tanh_c[j];
            const double dc = dc_carry[j] + dh * o * (1.0 - tc * tc);
            const double f = step.f[j];
            const double i = step.i[j];
            const double ct = step.c_tilde[j];
            const double doo = dh * tc;
            dz_f[j] = dc * prev_c[j] * f * (1.0 - f);
            dz_i[j] = dc * ct * i * (1.0 - i);
            dz_c[j] = dc * i * (1.0 - ct * ct);
            dz_o[j] = doo * o * (1.0 - o);
            dc_carry[j] = dc * f;
        }

        const Vec x_t = column(cache.x, ti);
        add_outer(grads.w_f, dz_f, x_t);
        add_outer(grads.w_i, dz_i, x_t);
        add_outer(grads.w_c, dz_c, x_t);
        add_outer(grads.w_o, dz_o, x_t);
        add_outer(grads.u_f, dz_f, prev_h);
        add_outer(grads.u_i, dz_i, prev_h);
        add_outer(grads.u_c, dz_c, prev_h);
        add_outer(grads.u_o, dz_o, prev_h);
        for (std::size_t j = 0; j < l; ++j) {
            grads.b_f[j] += dz_f[j];
            grads.b_i[j] += dz_i[j];
            grads.b_c[j] += dz_c[j];
            grads.b_o[j] += dz_o[j];
        }

        Vec dx_t(params.d, 0.0);
        matvec_t_add(params.w_f, dz_f, dx_t);
        matvec_t_add(params.w_i, dz_i, dx_t);
        matvec_t_add(params.w_c, dz_c, dx_t);
        matvec_t_add(params.w_o, dz_o, dx_t);
        for (std::size_t r = 0; r < params.d; ++r) d_x.at(r, ti) = dx_t[r];

        std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
        matvec_t_add(params.u_f, dz_f, dh_carry);
        matvec_t_add(params.u_i, dz_i, dh_carry);
        matvec_t_add(params.u_c, dz_c, dh_carry);
        matvec_t_add(params.u_o, dz_o, dh_carry);
    }
}

BlstmOutput blstm_forward(const LstmParams& fwd, const LstmParams& bwd, const Matrix& x,
                          const std::vector<bool>& mask, BlstmCache* cache) {
    if (fwd.l != bwd.l || fwd.d != bwd.d || x.rows != fwd.d) {
        throw ShapeError("blstm_forward: inconsistent dimensions");
    }
    const std::size_t T = x.cols;
    const std::size_t l = fwd.l;

    std::vector<std::size_t> valid;
    valid.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
        if (mask[t]) valid.push_back(t);
    }
    const std::size_t L = valid.size();

    LstmCache fwd_cache = lstm_forward(fwd, x, mask);

    // Backward direction: valid columns reversed, padding appended.
    Matrix x_rev(x.rows, T);
    std::vector<bool> mask_rev(T, false);
    for (std::size_t s = 0; s < L; ++s) {
        const std::size_t src = valid[L - 1 - s];
        for (std::size_t r = 0; r < x.rows; ++r) x_rev.at(r, s) = x.at(r, src);
        mask_rev[s] = true;
    }
    LstmCache bwd_cache = lstm_forward(bwd, x_rev, mask_rev);

    BlstmOutput out;
    out.l = l;
    out.h_concat = Matrix(2 * l, T);
    // Padded columns carry the frozen forward state and a zero backward half;
    // downstream consumers mask them out either way.
    for (std::size_t t = 0; t < T; ++t) {
        const Vec& hf = fwd_cache.h[t];
        for (std::size_t j = 0; j < l; ++j) out.h_concat.at(j, t) = hf[j];
    }
    for (std::size_t i = 0; i < L; ++i) {
        const std::size_t t = valid[i];
        const Vec& hb = bwd_cache.h[L - 1 - i];
        for (std::size_t j = 0; j < l; ++j) out.h_concat.at(l + j, t) = hb[j];
    }
    if (cache != nullptr) {
        cache->fwd = std::move(fwd_cache);
        cache->bwd = std::move(bwd_cache);
        cache->valid_len = L;
        cache->seq_len = T;
    }
    return out;
}

LstmGrads blstm_backward(const LstmParams& fwd, const LstmParams& bwd, const BlstmCache& cache,
                         const Matrix& d_h_concat) {
    const std::size_t T = cache.seq_len;
    const std::size_t l = fwd.l;
    if (d_h_concat.rows != 2 * l || d_h_concat.cols != T) {
        throw ShapeError("blstm_backward: d_h_concat is " + d_h_concat.shape_str() + ", expected " +
                         std::to_string(2 * l) + "x" + std::to_string(T));
    }

    std::vector<std::size_t> valid;
    valid.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
        if (cache.fwd.mask[t]) valid.push_back(t);
    }
    const std::size_t L = valid.size();

    LstmGrads grads;
    grads.fwd = LstmParams(l, fwd.d);
    grads.bwd = LstmParams(l, bwd.d);

    std::vector<Vec> d_h_fwd(T, Vec(l, 0.0));
    std::vector<Vec> d_h_bwd(T, Vec(l, 0.0)); // indexed by reversed step s
    for (std::size_t i = 0; i < L; ++i) {
        const std::size_t t = valid[i];
        for (std::size_t j = 0; j < l; ++j) {
            d_h_fwd[t][j] = d_h_concat.at(j, t);
            d_h_bwd[L - 1 - i][j] = d_h_concat.at(l + j, t);
        }
    }

    Matrix d_x_fwd;
    lstm_backward(fwd, cache.fwd, d_h_fwd, grads.fwd, d_x_fwd);
    Matrix d_x_rev;
    lstm_backward(bwd, cache.bwd, d_h_bwd, grads.bwd, d_x_rev);

    grads.d_x = std::move(d_x_fwd);
    for (std::size_t s = 0; s < L; ++s) {
        const std::size_t t = valid[L - 1 - s];
        for (std::size_t r = 0; r < grads.d_x.rows; ++r) grads.d_x.at(r, t) += d_x_rev.at(r, s);
    }
    return grads;
}

} // namespace oud
