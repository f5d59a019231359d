#ifndef OUD_VOCAB_EMBED_HPP
#define OUD_VOCAB_EMBED_HPP

#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "oud/numkit.hpp"
#include "oud/textprep.hpp"

// Vocabulary construction, GloVe-format embedding files, and the embedding
// layer in its three initialization variants.

namespace oud {

enum class EmbedMode {
    RandomTrainable,    // M1: uniform random init, updated in training
    PretrainedFrozen,   // M2: pretrained vectors, fixed
    PretrainedTrainable // M3: pretrained vectors, fine-tuned
};

const char* embed_mode_name(EmbedMode mode);

struct Vocabulary {
    std::unordered_map<std::string, std::size_t> index_of;
    std::vector<std::string> token_of; // index -> token, reserved first

    std::size_t size() const { return token_of.size(); }
    std::size_t pad_index() const { return 0; }
    std::size_t unk_index() const { return 1; }

    // <UNK> for tokens outside the vocabulary.
    std::size_t lookup(const std::string& token) const {
        auto it = index_of.find(token);
        return it == index_of.end() ? unk_index() : it->second;
    }
};

struct PretrainedVectors {
    std::unordered_map<std::string, Vec> vectors;
    std::size_t d = 0;
};

struct EmbeddingTable {
    Matrix matrix; // d x v, column j = token j's vector
    std::size_t d = 0;
    EmbedMode mode = EmbedMode::RandomTrainable;

    bool trainable() const { return mode != EmbedMode::PretrainedFrozen; }
};

// Tokens with corpus frequency >= min_count, ordered: <END>, <UNK>, then by
// descending frequency with lexicographic tie-break. Only unmasked (real)
// tokens are counted. Throws DataError on an empty corpus.
Vocabulary build_vocab(const std::vector<TokenSeq>& corpus, std::size_t min_count = 1);

// GloVe text format: one entry per line, token then d space-separated reals.
// Duplicate tokens keep the first occurrence. Format problems raise DataError
// with the 1-based line number.
PretrainedVectors parse_embedding_file(std::istream& in, std::size_t expected_d);
PretrainedVectors load_embedding_file(const std::string& path, std::size_t expected_d);

// Materialize the d x v table. RandomTrainable draws uniform in
// [-0.5/d, 0.5/d). Pretrained modes copy known vectors; out-of-vocabulary
// tokens get a deterministic random vector seeded by the token hash. The
// <END> column is zero in every mode.
EmbeddingTable init_embeddings(const Vocabulary& vocab, EmbedMode mode, std::size_t d,
                               const PretrainedVectors* pretrained, RngState rng);

// Gather: column t is the embedding of seq token t (<UNK> for unknowns).
Matrix lookup(const EmbeddingTable& table, const TokenSeq& seq, const Vocabulary& vocab);

// Token indices for a sequence, one per position.
std::vector<std::size_t> token_indices(const TokenSeq& seq, const Vocabulary& vocab);

} // namespace oud

#endif
