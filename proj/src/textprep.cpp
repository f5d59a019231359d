#include "oud/textprep.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace oud {

namespace {

bool is_ascii_alnum(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool ends_with(const std::string& s, const char* suffix, std::size_t len) {
    return s.size() >= len && s.compare(s.size() - len, len, suffix) == 0;
}

} // namespace

std::string normalize(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (is_ascii_alnum(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (is_ascii_space(c)) {
            pending_space = true;
        }
        // every other byte (punctuation, non-ASCII) is dropped
    }
    return out;
}

std::vector<std::string> tokenize_filter(const std::string& text, const StopwordSet& stopwords) {
    std::vector<std::string> out;
    std::istringstream iss(text);
    std::string tok;
    while (iss >> tok) {
        if (stopwords.count(tok) == 0) out.push_back(tok);
    }
    return out;
}

std::string lemmatize_token(const std::string& token) {
    if (ends_with(token, "sses", 4)) return token.substr(0, token.size() - 2);
    if (ends_with(token, "ies", 3)) return token.substr(0, token.size() - 3) + "y";
    if (ends_with(token, "ing", 3)) {
        if (token.size() >= 6) return token.substr(0, token.size() - 3);
        return token;
    }
    if (ends_with(token, "ed", 2)) {
        if (token.size() >= 5) return token.substr(0, token.size() - 2);
        return token;
    }
    if (ends_with(token, "s", 1) && !ends_with(token, "ss", 2) && !ends_with(token, "us", 2)) {
        return token.substr(0, token.size() - 1);
    }
    return token;
}

std::vector<std::string> lemmatize(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(lemmatize_token(t));
    return out;
}

TokenSeq fit_length(const std::vector<std::string>& tokens, std::size_t max_len) {
    if (max_len < 1) throw ConfigError("fit_length: max_len must be >= 1");
    if (tokens.empty()) throw DataError("fit_length: empty post");
    TokenSeq seq;
    seq.original_length = tokens.size();
    seq.tokens.reserve(max_len);
    seq.mask.reserve(max_len);
    const std::size_t keep = tokens.size() < max_len ? tokens.size() : max_len;
    for (std::size_t i = 0; i < keep; ++i) {
        seq.tokens.push_back(tokens[i]);
        seq.mask.push_back(true);
    }
    for (std::size_t i = keep; i < max_len; ++i) {
        seq.tokens.push_back(kPadToken);
        seq.mask.push_back(false);
    }
    return seq;
}

std::vector<std::string> preprocess_tokens(const std::string& text, const StopwordSet& stopwords) {
    return lemmatize(tokenize_filter(normalize(text), stopwords));
}

TokenSeq preprocess(const std::string& text, const StopwordSet& stopwords, std::size_t max_len) {
    return fit_length(preprocess_tokens(text, stopwords), max_len);
}

const StopwordSet& builtin_stopwords() {
    // Apostrophe-free contractions included because normalize() deletes
    // apostrophes before filtering ("i've" -> "ive").
    static const StopwordSet words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
        "any", "are", "arent", "as", "at", "be", "because", "been", "before", "being",
        "below", "between", "both", "but", "by", "cant", "cannot", "could", "couldnt",
        "did", "didnt", "do", "does", "doesnt", "doing", "dont", "down", "during",
        "each", "few", "for", "from", "further", "had", "hadnt", "has", "hasnt",
        "have", "havent", "having", "he", "hed", "hell", "hes", "her", "here", "heres",
        "hers", "herself", "him", "himself", "his", "how", "hows", "i", "id", "ill",
        "im", "ive", "if", "in", "into", "is", "isnt", "it", "its", "itself", "lets",
        "me", "more", "most", "mustnt", "my", "myself", "no", "nor", "not", "of",
        "off", "on", "once", "only", "or", "other", "ought", "our", "ours",
        "ourselves", "out", "over", "own", "same", "shant", "she", "shed", "shell",
        "shes", "should", "shouldnt", "so", "some", "such", "than", "that", "thats",
        "the", "their", "theirs", "them", "themselves", "then", "there", "theres",
        "these", "they", "theyd", "theyll", "theyre", "theyve", "this", "those",
        "through", "to", "too", "under", "until", "up", "very", "was", "wasnt", "we",
        "wed", "well", "were", "weve", "werent", "what", "whats", "when", "whens",
        "where", "wheres", "which", "while", "who", "whos", "whom", "why", "whys",
        "with", "wont", "would", "wouldnt", "you", "youd", "youll", "youre", "youve",
        "your", "yours", "yourself", "yourselves",
    };
    return words;
}

StopwordSet load_stopwords_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open stop-word file: " + path);
    StopwordSet out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.insert(line);
    }
    return out;
}

} // namespace oud
