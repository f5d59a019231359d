#ifndef OUD_TEXTPREP_HPP
#define OUD_TEXTPREP_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "oud/errors.hpp"

// Preprocessing pipeline: lowercase + strip punctuation, whitespace
// tokenization, stop-word removal, suffix-rule lemmatization, and length
// fitting to a fixed window with <END> padding.

namespace oud {

inline constexpr const char* kPadToken = "<END>";
inline constexpr const char* kUnkToken = "<UNK>";
inline constexpr std::size_t kDefaultMaxLen = 100;
inline constexpr std::size_t kMinPostTokens = 15;

using StopwordSet = std::unordered_set<std::string>;

struct RawPost {
    std::string id;
    std::string text;
    std::optional<int> label; // 0 = non-user, 1 = opioid user
};

struct TokenSeq {
    std::vector<std::string> tokens; // length exactly T, padded with <END>
    std::vector<bool> mask;          // true = real token
    std::size_t original_length = 0; // token count before fitting

    std::size_t valid_length() const {
        return original_length < tokens.size() ? original_length : tokens.size();
    }
};

// Lowercase ASCII letters; drop every byte that is not a letter, digit, or
// whitespace (multi-byte UTF-8 sequences fall out here); collapse whitespace
// runs to single spaces; trim.
std::string normalize(const std::string& text);

// Whitespace split of normalized text, dropping stop words.
std::vector<std::string> tokenize_filter(const std::string& text, const StopwordSet& stopwords);

// Suffix rules applied longest-match-first, one rule per token:
//   "sses" -> "ss", "ies" -> "y",
//   "ing" -> ""  (stem must keep >= 3 chars),
//   "ed"  -> ""  (stem must keep >= 3 chars),
//   "s"   -> ""  (not after "ss" or "us")
std::string lemmatize_token(const std::string& token);
std::vector<std::string> lemmatize(const std::vector<std::string>& tokens);

// Truncate to the first T tokens or pad with <END>. Throws DataError on an
// empty token list.
TokenSeq fit_length(const std::vector<std::string>& tokens, std::size_t max_len);

// normalize -> tokenize_filter -> lemmatize
std::vector<std::string> preprocess_tokens(const std::string& text, const StopwordSet& stopwords);

// Full pipeline ending in fit_length.
TokenSeq preprocess(const std::string& text, const StopwordSet& stopwords, std::size_t max_len);

// Built-in English stop-word list (~160 words, apostrophe-free forms since
// normalize deletes apostrophes).
const StopwordSet& builtin_stopwords();

// One token per line, UTF-8; '#' comments and blank lines ignored.
StopwordSet load_stopwords_file(const std::string& path);

} // namespace oud

#endif
