#include "oud/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace oud {

using nlohmann::json;

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::M1: return "m1";
        case Variant::M2: return "m2";
        case Variant::M3: return "m3";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "m1" || name == "M1") return Variant::M1;
    if (name == "m2" || name == "M2") return Variant::M2;
    if (name == "m3" || name == "M3") return Variant::M3;
    throw ConfigError("unknown variant '" + name + "' (expected m1, m2, or m3)");
}

EmbedMode embed_mode_for(Variant v) {
    switch (v) {
        case Variant::M1: return EmbedMode::RandomTrainable;
        case Variant::M2: return EmbedMode::PretrainedFrozen;
        case Variant::M3: return EmbedMode::PretrainedTrainable;
    }
    return EmbedMode::RandomTrainable;
}

AttBlstmModel init_model(const ModelConfig& config, const Vocabulary& vocab,
                         const PretrainedVectors* pretrained) {
    if (config.d == 0 || config.l == 0 || config.max_len == 0) {
        throw ConfigError("init_model: d, l, and max_len must be positive");
    }
    AttBlstmModel model;
    model.config = config;

    RngState root(config.seed);
    model.embedding = init_embeddings(vocab, embed_mode_for(config.variant), config.d, pretrained,
                                      root.fork("init:embedding"));
    RngState rng_fwd = root.fork("init:lstm:fwd");
    RngState rng_bwd = root.fork("init:lstm:bwd");
    model.fwd = LstmParams::init(config.l, config.d, rng_fwd);
    model.bwd = LstmParams::init(config.l, config.d, rng_bwd);

    if (config.use_attention) {
        RngState rng_att = root.fork("init:attention");
        AttentionParams att;
        att.w_alpha = rand_uniform_vec(rng_att, 2 * config.l, -0.1, 0.1);
        att.b_alpha = Vec(config.max_len, 0.0);
        model.attention = std::move(att);
    }

    RngState rng_head = root.fork("init:head");
    model.head.w_out = rand_uniform_vec(rng_head, 2 * config.l, -0.1, 0.1);
    model.head.b_out = 0.0;
    return model;
}

AttentionResult attention_forward(const AttentionParams& params, const Matrix& h_concat,
                                  const std::vector<bool>& mask) {
    const std::size_t T = h_concat.cols;
    if (params.b_alpha.size() != T || params.w_alpha.size() != h_concat.rows) {
        throw ShapeError("attention_forward: parameter shapes do not match H " +
                         h_concat.shape_str());
    }
    Vec logits(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        if (!mask[t]) continue;
        double acc = params.b_alpha[t];
        for (std::size_t r = 0; r < h_concat.rows; ++r) {
            acc += params.w_alpha[r] * h_concat.at(r, t);
        }
        logits[t] = acc;
    }
    AttentionResult res;
    res.alpha = softmax_masked(logits, mask);
    res.context = Vec(h_concat.rows, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        if (!mask[t]) continue;
        const double a = res.alpha[t];
        for (std::size_t r = 0; r < h_concat.rows; ++r) {
            res.context[r] += a * h_concat.at(r, t);
        }
    }
    return res;
}

Vec mean_pool(const Matrix& h_concat, const std::vector<bool>& mask) {
    std::size_t valid = 0;
    Vec out(h_concat.rows, 0.0);
    for (std::size_t t = 0; t < h_concat.cols; ++t) {
        if (!mask[t]) continue;
        ++valid;
        for (std::size_t r = 0; r < h_concat.rows; ++r) out[r] += h_concat.at(r, t);
    }
    if (valid == 0) throw DataError("mean_pool: empty sequence (no valid position)");
    const double inv = 1.0 / static_cast<double>(valid);
    for (auto& v : out) v *= inv;
    return out;
}

double model_forward(const AttBlstmModel& model, const TokenSeq& seq, const Vocabulary& vocab,
                     ForwardCache* cache, Vec* alpha_out) {
    if (seq.tokens.size() != model.config.max_len) {
        throw ShapeError("model_forward: sequence length " + std::to_string(seq.tokens.size()) +
                         " != configured max_len " + std::to_string(model.config.max_len));
    }
    Matrix x = lookup(model.embedding, seq, vocab);

    BlstmCache blstm_cache;
    BlstmOutput blstm = blstm_forward(model.fwd, model.bwd, x, seq.mask,
                                      cache != nullptr ? &blstm_cache : nullptr);

    Vec context;
    Vec alpha;
    if (model.config.use_attention) {
        AttentionResult att = attention_forward(*model.attention, blstm.h_concat, seq.mask);
        context = std::move(att.context);
        alpha = std::move(att.alpha);
    } else {
        context = mean_pool(blstm.h_concat, seq.mask);
    }

    const double z = dot(model.head.w_out, context) + model.head.b_out;
    const double p = 1.0 / (1.0 + std::exp(-z));

    if (alpha_out != nullptr) *alpha_out = alpha;
    if (cache != nullptr) {
        cache->x = std::move(x);
        cache->token_idx = token_indices(seq, vocab);
        cache->mask = seq.mask;
        cache->blstm = std::move(blstm_cache);
        cache->h_concat = std::move(blstm.h_concat);
        cache->alpha = std::move(alpha);
        cache->context = std::move(context);
        cache->p = p;
    }
    return p;
}

double bce_loss(double p, int y) {
    const double lo = 1e-12;
    const double clamped = std::min(std::max(p, lo), 1.0 - lo);
    return -(y == 1 ? std::log(clamped) : std::log(1.0 - clamped));
}

ModelGrads model_backward(const AttBlstmModel& model, const ForwardCache& cache, int y) {
    const std::size_t two_l = 2 * model.config.l;
    const std::size_t T = model.config.max_len;

    ModelGrads grads;
    grads.w_out = Vec(two_l, 0.0);

    // d(bce)/d(logit) for a sigmoid head
    const double dz = cache.p - static_cast<double>(y);

    grads.b_out = dz;
    Vec d_context(two_l, 0.0);
    for (std::size_t r = 0; r < two_l; ++r) {
        grads.w_out[r] = dz * cache.context[r];
        d_context[r] = dz * model.head.w_out[r];
    }

    Matrix d_h(two_l, T);
    if (model.config.use_attention) {
        grads.w_alpha = Vec(two_l, 0.0);
        grads.b_alpha = Vec(T, 0.0);

        // context = sum_t alpha_t H_t: split dr into the H path and the alpha path
        Vec d_alpha(T, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            if (!cache.mask[t]) continue;
            double acc = 0.0;
            for (std::size_t r = 0; r < two_l; ++r) {
                acc += d_context[r] * cache.h_concat.at(r, t);
                d_h.at(r, t) += cache.alpha[t] * d_context[r];
            }
            d_alpha[t] = acc;
        }
        // softmax backward: d_logit = alpha * (d_alpha - sum_k alpha_k d_alpha_k)
        double weighted = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            if (cache.mask[t]) weighted += cache.alpha[t] * d_alpha[t];
        }
        for (std::size_t t = 0; t < T; ++t) {
            if (!cache.mask[t]) continue;
            const double d_logit = cache.alpha[t] * (d_alpha[t] - weighted);
            grads.b_alpha[t] = d_logit;
            for (std::size_t r = 0; r < two_l; ++r) {
                grads.w_alpha[r] += d_logit * cache.h_concat.at(r, t);
                d_h.at(r, t) += d_logit * model.attention->w_alpha[r];
            }
        }
    } else {
        std::size_t valid = 0;
        for (std::size_t t = 0; t < T; ++t) {
            if (cache.mask[t]) ++valid;
        }
        const double inv = 1.0 / static_cast<double>(valid);
        for (std::size_t t = 0; t < T; ++t) {
            if (!cache.mask[t]) continue;
            for (std::size_t r = 0; r < two_l; ++r) d_h.at(r, t) = inv * d_context[r];
        }
    }

    LstmGrads rec = blstm_backward(model.fwd, model.bwd, cache.blstm, d_h);
    grads.fwd = std::move(rec.fwd);
    grads.bwd = std::move(rec.bwd);

    if (model.embedding.trainable()) {
        // Sparse per-column accumulation; the <END> column stays frozen at zero.
        std::vector<std::pair<std::size_t, Vec>> cols;
        for (std::size_t t = 0; t < T; ++t) {
            if (!cache.mask[t]) continue;
            const std::size_t j = cache.token_idx[t];
            if (j == 0) continue; // pad column
            auto it = std::find_if(cols.begin(), cols.end(),
                                   [j](const auto& e) { return e.first == j; });
            if (it == cols.end()) {
                cols.emplace_back(j, Vec(model.config.d, 0.0));
                it = cols.end() - 1;
            }
            for (std::size_t r = 0; r < model.config.d; ++r) {
                it->second[r] += rec.d_x.at(r, t);
            }
        }
        grads.embedding_cols = std::move(cols);
    }
    return grads;
}

Adamax::Adamax(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adamax::begin_step() { ++t_; }

Adamax::Slot& Adamax::slot_sized(std::size_t slot, std::size_t n) {
    if (slot >= slots_.size()) slots_.resize(slot + 1);
    Slot& s = slots_[slot];
    if (s.m.size() != n) {
        s.m.assign(n, 0.0);
        s.u.assign(n, 0.0);
    }
    return s;
}

void Adamax::update_entry(Slot& s, std::size_t i, double& param, double grad, double correction) {
    s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * grad;
    s.u[i] = std::max(beta2_ * s.u[i], std::fabs(grad));
    param -= (lr_ / correction) * s.m[i] / (s.u[i] + eps_);
}

void Adamax::update(std::size_t slot, Vec& params, const Vec& grads) {
    if (params.size() != grads.size()) throw ShapeError("Adamax::update: size mismatch");
    Slot& s = slot_sized(slot, params.size());
    const double correction = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        update_entry(s, i, params[i], grads[i], correction);
    }
}

void Adamax::update(std::size_t slot, Matrix& params, const Matrix& grads) {
    if (params.rows != grads.rows || params.cols != grads.cols) {
        throw ShapeError("Adamax::update: shape mismatch");
    }
    Slot& s = slot_sized(slot, params.values.size());
    const double correction = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.values.size(); ++i) {
        update_entry(s, i, params.values[i], grads.values[i], correction);
    }
}

void Adamax::update(std::size_t slot, double& param, double grad) {
    Slot& s = slot_sized(slot, 1);
    const double correction = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    update_entry(s, 0, param, grad, correction);
}

void Adamax::update_columns(std::size_t slot, Matrix& params,
                            const std::vector<std::pair<std::size_t, Vec>>& col_grads) {
    Slot& s = slot_sized(slot, params.values.size());
    const double correction = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    for (const auto& [col, grad] : col_grads) {
        for (std::size_t r = 0; r < params.rows; ++r) {
            const std::size_t i = r * params.cols + col;
            update_entry(s, i, params.values[i], grad[r], correction);
        }
    }
}

namespace {

// Slot layout for the model's tensors.
enum Slot : std::size_t {
    kEmbedding = 0,
    kFwdWf, kFwdWi, kFwdWc, kFwdWo, kFwdUf, kFwdUi, kFwdUc, kFwdUo,
    kFwdBf, kFwdBi, kFwdBc, kFwdBo,
    kBwdWf, kBwdWi, kBwdWc, kBwdWo, kBwdUf, kBwdUi, kBwdUc, kBwdUo,
    kBwdBf, kBwdBi, kBwdBc, kBwdBo,
    kWAlpha, kBAlpha, kWOut, kBOut,
};

double grad_sq_norm(const ModelGrads& g) {
    double acc = 0.0;
    auto add_m = [&acc](const Matrix& m) {
        for (double v : m.values) acc += v * v;
    };
    auto add_v = [&acc](const Vec& v) {
        for (double x : v) acc += x * x;
    };
    for (const auto& [col, grad] : g.embedding_cols) {
        (void)col;
        add_v(grad);
    }
    for (const LstmParams* p : {&g.fwd, &g.bwd}) {
        add_m(p->w_f); add_m(p->w_i); add_m(p->w_c); add_m(p->w_o);
        add_m(p->u_f); add_m(p->u_i); add_m(p->u_c); add_m(p->u_o);
        add_v(p->b_f); add_v(p->b_i); add_v(p->b_c); add_v(p->b_o);
    }
    add_v(g.w_alpha);
    add_v(g.b_alpha);
    add_v(g.w_out);
    acc += g.b_out * g.b_out;
    return acc;
}

void scale_grads(ModelGrads& g, double s) {
    auto scale_m = [s](Matrix& m) {
        for (double& v : m.values) v *= s;
    };
    auto scale_v = [s](Vec& v) {
        for (double& x : v) x *= s;
    };
    for (auto& [col, grad] : g.embedding_cols) {
        (void)col;
        scale_v(grad);
    }
    for (LstmParams* p : {&g.fwd, &g.bwd}) {
        scale_m(p->w_f); scale_m(p->w_i); scale_m(p->w_c); scale_m(p->w_o);
        scale_m(p->u_f); scale_m(p->u_i); scale_m(p->u_c); scale_m(p->u_o);
        scale_v(p->b_f); scale_v(p->b_i); scale_v(p->b_c); scale_v(p->b_o);
    }
    scale_v(g.w_alpha);
    scale_v(g.b_alpha);
    scale_v(g.w_out);
    g.b_out *= s;
}

void apply_grads(AttBlstmModel& model, const ModelGrads& grads, Adamax& opt) {
    opt.begin_step();
    if (model.embedding.trainable() && !grads.embedding_cols.empty()) {
        opt.update_columns(kEmbedding, model.embedding.matrix, grads.embedding_cols);
    }
    auto update_lstm = [&opt](LstmParams& p, const LstmParams& g, std::size_t base) {
        opt.update(base + 0, p.w_f, g.w_f);
        opt.update(base + 1, p.w_i, g.w_i);
        opt.update(base + 2, p.w_c, g.w_c);
        opt.update(base + 3, p.w_o, g.w_o);
        opt.update(base + 4, p.u_f, g.u_f);
        opt.update(base + 5, p.u_i, g.u_i);
        opt.update(base + 6, p.u_c, g.u_c);
        opt.update(base + 7, p.u_o, g.u_o);
        opt.update(base + 8, p.b_f, g.b_f);
        opt.update(base + 9, p.b_i, g.b_i);
        opt.update(base + 10, p.b_c, g.b_c);
        opt.update(base + 11, p.b_o, g.b_o);
    };
    update_lstm(model.fwd, grads.fwd, kFwdWf);
    update_lstm(model.bwd, grads.bwd, kBwdWf);
    if (model.config.use_attention) {
        opt.update(kWAlpha, model.attention->w_alpha, grads.w_alpha);
        opt.update(kBAlpha, model.attention->b_alpha, grads.b_alpha);
    }
    opt.update(kWOut, model.head.w_out, grads.w_out);
    opt.update(kBOut, model.head.b_out, grads.b_out);
}

} // namespace

TrainCurves train_model(AttBlstmModel& model, const std::vector<TokenSeq>& train_x,
                        const std::vector<int>& train_y, const std::vector<TokenSeq>& val_x,
                        const std::vector<int>& val_y, const Vocabulary& vocab) {
    if (train_x.size() != train_y.size() || val_x.size() != val_y.size()) {
        throw ShapeError("train_model: example/label count mismatch");
    }
    if (train_x.empty()) throw DataError("train_model: empty training set");
    const bool has_pos = std::find(train_y.begin(), train_y.end(), 1) != train_y.end();
    const bool has_neg = std::find(train_y.begin(), train_y.end(), 0) != train_y.end();
    if (!has_pos || !has_neg) throw DataError("train_model: training set has a single class");

    Adamax opt(model.config.learning_rate, model.config.beta1, model.config.beta2);
    RngState shuffle_rng = RngState(model.config.seed).fork("train:shuffle");

    std::vector<std::size_t> order(train_x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainCurves curves;
    for (std::size_t epoch = 0; epoch < model.config.epochs; ++epoch) {
        // Fisher-Yates from a stream that continues across epochs
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = shuffle_rng.next_below(i);
            std::swap(order[i - 1], order[j]);
        }

        double loss_sum = 0.0;
        for (std::size_t idx : order) {
            ForwardCache cache;
            const double p = model_forward(model, train_x[idx], vocab, &cache);
            loss_sum += bce_loss(p, train_y[idx]);
            ModelGrads grads = model_backward(model, cache, train_y[idx]);
            if (model.config.clip_norm > 0.0) {
                const double norm = std::sqrt(grad_sq_norm(grads));
                if (norm > model.config.clip_norm) {
                    scale_grads(grads, model.config.clip_norm / norm);
                }
            }
            apply_grads(model, grads, opt);
        }
        curves.train_loss.push_back(loss_sum / static_cast<double>(train_x.size()));

        if (!val_x.empty()) {
            double val_sum = 0.0;
            for (std::size_t i = 0; i < val_x.size(); ++i) {
                val_sum += bce_loss(model_forward(model, val_x[i], vocab), val_y[i]);
            }
            curves.val_loss.push_back(val_sum / static_cast<double>(val_x.size()));
        }
    }
    return curves;
}

int predict(const AttBlstmModel& model, const TokenSeq& seq, const Vocabulary& vocab,
            double threshold) {
    return model_forward(model, seq, vocab) >= threshold ? 1 : 0;
}

namespace {

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"values", m.values}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    m.values = j.at("values").get<Vec>();
    if (m.values.size() != m.rows * m.cols) throw DataError("checkpoint: tensor size mismatch");
    return m;
}

json lstm_to_json(const LstmParams& p) {
    return json{
        {"l", p.l},       {"d", p.d},
        {"w_f", matrix_to_json(p.w_f)}, {"w_i", matrix_to_json(p.w_i)},
        {"w_c", matrix_to_json(p.w_c)}, {"w_o", matrix_to_json(p.w_o)},
        {"u_f", matrix_to_json(p.u_f)}, {"u_i", matrix_to_json(p.u_i)},
        {"u_c", matrix_to_json(p.u_c)}, {"u_o", matrix_to_json(p.u_o)},
        {"b_f", p.b_f},   {"b_i", p.b_i}, {"b_c", p.b_c}, {"b_o", p.b_o},
    };
}

LstmParams lstm_from_json(const json& j) {
    LstmParams p(j.at("l").get<std::size_t>(), j.at("d").get<std::size_t>());
    p.w_f = matrix_from_json(j.at("w_f"));
    p.w_i = matrix_from_json(j.at("w_i"));
    p.w_c = matrix_from_json(j.at("w_c"));
    p.w_o = matrix_from_json(j.at("w_o"));
    p.u_f = matrix_from_json(j.at("u_f"));
    p.u_i = matrix_from_json(j.at("u_i"));
    p.u_c = matrix_from_json(j.at("u_c"));
    p.u_o = matrix_from_json(j.at("u_o"));
    p.b_f = j.at("b_f").get<Vec>();
    p.b_i = j.at("b_i").get<Vec>();
    p.b_c = j.at("b_c").get<Vec>();
    p.b_o = j.at("b_o").get<Vec>();
    return p;
}

} // namespace

void save_checkpoint(const AttBlstmModel& model, const Vocabulary& vocab,
                     const std::string& path) {
    json j;
    j["format"] = "att-blstm-checkpoint";
    j["version"] = 1;
    j["config"] = {
        {"d", model.config.d},
        {"l", model.config.l},
        {"max_len", model.config.max_len},
        {"variant", variant_name(model.config.variant)},
        {"use_attention", model.config.use_attention},
        {"epochs", model.config.epochs},
        {"learning_rate", model.config.learning_rate},
        {"beta1", model.config.beta1},
        {"beta2", model.config.beta2},
        {"clip_norm", model.config.clip_norm},
        {"seed", model.config.seed},
    };
    j["vocab"] = vocab.token_of;
    j["embedding"] = {
        {"mode", embed_mode_name(model.embedding.mode)},
        {"matrix", matrix_to_json(model.embedding.matrix)},
    };
    j["fwd"] = lstm_to_json(model.fwd);
    j["bwd"] = lstm_to_json(model.bwd);
    if (model.attention.has_value()) {
        j["attention"] = {{"w_alpha", model.attention->w_alpha},
                          {"b_alpha", model.attention->b_alpha}};
    }
    j["head"] = {{"w_out", model.head.w_out}, {"b_out", model.head.b_out}};

    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint: " + path);
    out << j.dump() << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint parse error: ") + e.what());
    }
    if (j.value("format", "") != "att-blstm-checkpoint") {
        throw DataError("not a model checkpoint: " + path);
    }

    Checkpoint cp;
    const json& c = j.at("config");
    cp.model.config.d = c.at("d").get<std::size_t>();
    cp.model.config.l = c.at("l").get<std::size_t>();
    cp.model.config.max_len = c.at("max_len").get<std::size_t>();
    cp.model.config.variant = variant_from_name(c.at("variant").get<std::string>());
    cp.model.config.use_attention = c.at("use_attention").get<bool>();
    cp.model.config.epochs = c.at("epochs").get<std::size_t>();
    cp.model.config.learning_rate = c.at("learning_rate").get<double>();
    cp.model.config.beta1 = c.at("beta1").get<double>();
    cp.model.config.beta2 = c.at("beta2").get<double>();
    cp.model.config.clip_norm = c.at("clip_norm").get<double>();
    cp.model.config.seed = c.at("seed").get<std::uint64_t>();

    cp.vocab.token_of = j.at("vocab").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < cp.vocab.token_of.size(); ++i) {
        cp.vocab.index_of[cp.vocab.token_of[i]] = i;
    }

    cp.model.embedding.d = cp.model.config.d;
    cp.model.embedding.mode = embed_mode_for(cp.model.config.variant);
    cp.model.embedding.matrix = matrix_from_json(j.at("embedding").at("matrix"));

    cp.model.fwd = lstm_from_json(j.at("fwd"));
    cp.model.bwd = lstm_from_json(j.at("bwd"));
    if (cp.model.config.use_attention) {
        AttentionParams att;
        att.w_alpha = j.at("attention").at("w_alpha").get<Vec>();
        att.b_alpha = j.at("attention").at("b_alpha").get<Vec>();
        cp.model.attention = std::move(att);
    }
    cp.model.head.w_out = j.at("head").at("w_out").get<Vec>();
    cp.model.head.b_out = j.at("head").at("b_out").get<double>();
    return cp;
}

} // namespace oud
