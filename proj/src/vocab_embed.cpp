#include "oud/vocab_embed.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace oud {

const char* embed_mode_name(EmbedMode mode) {
    switch (mode) {
        case EmbedMode::RandomTrainable: return "random-trainable";
        case EmbedMode::PretrainedFrozen: return "pretrained-frozen";
        case EmbedMode::PretrainedTrainable: return "pretrained-trainable";
    }
    return "?";
}

Vocabulary build_vocab(const std::vector<TokenSeq>& corpus, std::size_t min_count) {
    if (corpus.empty()) throw DataError("build_vocab: empty corpus");
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& seq : corpus) {
        for (std::size_t t = 0; t < seq.tokens.size(); ++t) {
            if (seq.mask[t]) ++freq[seq.tokens[t]];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> entries;
    entries.reserve(freq.size());
    for (auto& kv : freq) {
        if (kv.second >= min_count) entries.emplace_back(kv.first, kv.second);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Vocabulary vocab;
    vocab.token_of = {kPadToken, kUnkToken};
    for (auto& e : entries) {
        if (e.first == kPadToken || e.first == kUnkToken) continue;
        vocab.token_of.push_back(e.first);
    }
    for (std::size_t i = 0; i < vocab.token_of.size(); ++i) vocab.index_of[vocab.token_of[i]] = i;
    return vocab;
}

PretrainedVectors parse_embedding_file(std::istream& in, std::size_t expected_d) {
    PretrainedVectors out;
    out.d = expected_d;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream iss(line);
        std::string token;
        iss >> token;
        Vec vec;
        vec.reserve(expected_d);
        std::string field;
        while (iss >> field) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc() || ptr != field.data() + field.size()) {
                throw DataError("embedding file line " + std::to_string(lineno) +
                                ": unparsable value '" + field + "'");
            }
            vec.push_back(v);
        }
        if (vec.size() != expected_d) {
            throw DataError("embedding file line " + std::to_string(lineno) + ": expected " +
                            std::to_string(expected_d) + " values, got " + std::to_string(vec.size()));
        }
        out.vectors.emplace(std::move(token), std::move(vec)); // first occurrence wins
    }
    return out;
}

PretrainedVectors load_embedding_file(const std::string& path, std::size_t expected_d) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embedding file: " + path);
    return parse_embedding_file(in, expected_d);
}

EmbeddingTable init_embeddings(const Vocabulary& vocab, EmbedMode mode, std::size_t d,
                               const PretrainedVectors* pretrained, RngState rng) {
    if (d == 0) throw ConfigError("init_embeddings: d must be positive");
    const bool wants_pretrained = mode != EmbedMode::RandomTrainable;
    if (wants_pretrained) {
        if (pretrained == nullptr) {
            throw ConfigError(std::string("init_embeddings: mode ") + embed_mode_name(mode) +
                              " requires pretrained vectors");
        }
        if (pretrained->d != d) {
            throw ConfigError("init_embeddings: pretrained dimension " + std::to_string(pretrained->d) +
                              " != requested d " + std::to_string(d));
        }
    }
    EmbeddingTable table;
    table.d = d;
    table.mode = mode;
    const double half = 0.5 / static_cast<double>(d);
    const std::size_t v = vocab.size();
    if (!wants_pretrained) {
        table.matrix = rand_uniform(rng, d, v, -half, half);
    } else {
        table.matrix = Matrix(d, v);
        for (std::size_t j = 0; j < v; ++j) {
            const std::string& token = vocab.token_of[j];
            auto it = pretrained->vectors.find(token);
            if (it != pretrained->vectors.end()) {
                for (std::size_t r = 0; r < d; ++r) table.matrix.at(r, j) = it->second[r];
            } else {
                // OOV: deterministic per-token vector, reproducible across runs.
                RngState token_rng(hash64(token));
                for (std::size_t r = 0; r < d; ++r) {
                    table.matrix.at(r, j) = -half + 2.0 * half * token_rng.next_double();
                }
            }
        }
    }
    for (std::size_t r = 0; r < d; ++r) table.matrix.at(r, vocab.pad_index()) = 0.0;
    return table;
}

Matrix lookup(const EmbeddingTable& table, const TokenSeq& seq, const Vocabulary& vocab) {
    if (table.matrix.cols != vocab.size()) {
        throw ShapeError("lookup: table has " + std::to_string(table.matrix.cols) +
                         " columns but vocabulary has " + std::to_string(vocab.size()));
    }
    const std::size_t T = seq.tokens.size();
    Matrix x(table.d, T);
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t j = vocab.lookup(seq.tokens[t]);
        for (std::size_t r = 0; r < table.d; ++r) x.at(r, t) = table.matrix.at(r, j);
    }
    return x;
}

std::vector<std::size_t> token_indices(const TokenSeq& seq, const Vocabulary& vocab) {
    std::vector<std::size_t> out;
    out.reserve(seq.tokens.size());
    for (const auto& tok : seq.tokens) out.push_back(vocab.lookup(tok));
    return out;
}

} // namespace oud
