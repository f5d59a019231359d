#ifndef OUD_MODEL_HPP
#define OUD_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oud/recurrent.hpp"
#include "oud/vocab_embed.hpp"

// Attention layer, classifier head, binary cross-entropy, AdaMax, and the
// assembled sequence classifier in its six variants (attention on/off x three
// embedding initializations).

namespace oud {

enum class Variant { M1, M2, M3 };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);
EmbedMode embed_mode_for(Variant v);

struct ModelConfig {
    std::size_t d = 200;       // embedding dimension
    std::size_t l = 64;        // hidden units per direction
    std::size_t max_len = 100; // T
    Variant variant = Variant::M1;
    bool use_attention = true;
    std::size_t epochs = 5;
    double learning_rate = 0.002;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double clip_norm = 0.0; // global gradient L2 clip; 0 disables
    std::uint64_t seed = 42;
};

struct AttentionParams {
    Vec w_alpha; // 2l
    Vec b_alpha; // T, entries at padded positions are inert
};

struct ClassifierParams {
    Vec w_out; // 2l
    double b_out = 0.0;
};

struct AttBlstmModel {
    ModelConfig config;
    EmbeddingTable embedding;
    LstmParams fwd;
    LstmParams bwd;
    std::optional<AttentionParams> attention; // present iff config.use_attention
    ClassifierParams head;
};

// pretrained required (and dimension-checked) for M2/M3.
AttBlstmModel init_model(const ModelConfig& config, const Vocabulary& vocab,
                         const PretrainedVectors* pretrained = nullptr);

struct AttentionResult {
    Vec alpha;   // T; zero at padded positions, sums to 1 over valid ones
    Vec context; // 2l, the alpha-weighted sum of H columns
};

AttentionResult attention_forward(const AttentionParams& params, const Matrix& h_concat,
                                  const std::vector<bool>& mask);

// Masked mean over valid H columns; the attention-free pooling.
Vec mean_pool(const Matrix& h_concat, const std::vector<bool>& mask);

struct ForwardCache {
    Matrix x;                           // d x T embedded input
    std::vector<std::size_t> token_idx; // vocab index per position
    std::vector<bool> mask;
    BlstmCache blstm;
    Matrix h_concat;
    Vec alpha;   // empty when attention is off
    Vec context; // r
    double p = 0.0;
};

// Returns p in (0, 1). alpha_out (optional) receives the attention weights.
double model_forward(const AttBlstmModel& model, const TokenSeq& seq, const Vocabulary& vocab,
                     ForwardCache* cache = nullptr, Vec* alpha_out = nullptr);

// -[y ln p + (1-y) ln(1-p)], p clamped to [1e-12, 1-1e-12].
double bce_loss(double p, int y);

struct ModelGrads {
    std::vector<std::pair<std::size_t, Vec>> embedding_cols; // (vocab column, d-vector)
    LstmParams fwd;
    LstmParams bwd;
    Vec w_alpha;
    Vec b_alpha;
    Vec w_out;
    double b_out = 0.0;
};

// Exact gradients of bce_loss(model_forward(seq), y) for every trainable
// parameter. Embedding gradients are sparse over the columns the example
// touches; empty when the embedding is frozen.
ModelGrads model_backward(const AttBlstmModel& model, const ForwardCache& cache, int y);

// AdaMax (infinity-norm Adam variant). One begin_step() per optimizer step
// shares the bias-correction counter across all tensor slots. Moment state is
// keyed by slot id and sized on first use.
class Adamax {
  public:
    Adamax(double lr, double beta1, double beta2, double eps = 1e-8);

    void begin_step();
    void update(std::size_t slot, Vec& params, const Vec& grads);
    void update(std::size_t slot, Matrix& params, const Matrix& grads);
    void update(std::size_t slot, double& param, double grad);
    // Lazy per-column update for the embedding matrix: moment state advances
    // only for the touched columns.
    void update_columns(std::size_t slot, Matrix& params,
                        const std::vector<std::pair<std::size_t, Vec>>& col_grads);

    long long step_count() const { return t_; }

  private:
    struct Slot {
        Vec m, u;
    };
    Slot& slot_sized(std::size_t slot, std::size_t n);
    void update_entry(Slot& s, std::size_t i, double& param, double grad, double correction);

    double lr_, beta1_, beta2_, eps_;
    long long t_ = 0;
    std::vector<Slot> slots_;
};

struct TrainCurves {
    std::vector<double> train_loss; // mean per-example loss during each epoch's pass
    std::vector<double> val_loss;   // mean loss on the validation set after each epoch
};

// config.epochs passes of per-example forward/backward/AdaMax over a seeded
// shuffle. Validation set may be empty. Throws DataError when the training
// set is empty or single-class.
TrainCurves train_model(AttBlstmModel& model, const std::vector<TokenSeq>& train_x,
                        const std::vector<int>& train_y, const std::vector<TokenSeq>& val_x,
                        const std::vector<int>& val_y, const Vocabulary& vocab);

// label = [p >= threshold]
int predict(const AttBlstmModel& model, const TokenSeq& seq, const Vocabulary& vocab,
            double threshold = 0.5);

// JSON checkpoint holding config, vocabulary, and all parameter tensors.
// Round-trips bit-exactly.
void save_checkpoint(const AttBlstmModel& model, const Vocabulary& vocab, const std::string& path);

struct Checkpoint {
    AttBlstmModel model;
    Vocabulary vocab;
};

Checkpoint load_checkpoint(const std::string& path);

} // namespace oud

#endif
