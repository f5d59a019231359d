#ifndef OUD_CORPUS_IO_HPP
#define OUD_CORPUS_IO_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "oud/textprep.hpp"

// Labeled-corpus loading/saving (JSON Lines) and the deterministic synthetic
// corpus generator used by the desk-scale experiments.

namespace oud {

struct Corpus {
    std::vector<RawPost> posts;
    std::size_t class_count[2] = {0, 0};

    std::size_t size() const { return posts.size(); }
};

// Opioid keywords plus street slang, DEA drug-slang style.
struct Lexicon {
    std::vector<std::string> keywords; // opiates, opiate, opioid, opium
    std::vector<std::string> slang;    // black, dreams, chocolate, ...

    std::vector<std::string> all() const;
    bool contains(const std::string& word) const;
};

const Lexicon& default_lexicon();

// ~500 common English content words, disjoint from the built-in stop-word
// list and the lexicon; every word survives preprocessing.
const std::vector<std::string>& filler_words();

struct SynthSpec {
    std::size_t n_posts = 400;
    double positive_fraction = 0.5;
    double theta = 0.9;       // probability a positive post contains a lexicon word
    double noise = 0.0;       // label flip rate
    std::size_t len_min = 20; // tokens per post, uniform
    std::size_t len_max = 80;
    std::uint64_t seed = 42;
};

struct LoadResult {
    Corpus corpus;
    std::size_t skipped_short = 0; // posts dropped by the minimum-length rule
};

// JSONL, one object per line: {"id": str, "text": str, "label": 0|1}.
// Malformed lines, duplicate ids, and out-of-domain labels abort with the
// 1-based line number; posts below min_tokens after preprocessing are
// skipped and counted.
LoadResult load_corpus(const std::string& path, const StopwordSet& stopwords = builtin_stopwords(),
                       std::size_t min_tokens = kMinPostTokens);

void save_corpus(const Corpus& corpus, const std::string& path);

// Deterministic per seed. Positive posts carry >= 1 lexicon word with
// probability theta; negative posts carry one with probability
// (1 - theta) * 0.2 (hard negatives); labels then flip at the noise rate.
Corpus synth_corpus(const SynthSpec& spec);

// Occurrences of each lexicon word across normalized posts. Tokens are not
// lemmatized or stop-filtered here: "opiates" and "opiate" count separately.
std::unordered_map<std::string, std::size_t> lexicon_stats(const Corpus& corpus,
                                                            const Lexicon& lexicon);

} // namespace oud

#endif
