#include "oud/corpus_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "oud/numkit.hpp"

namespace oud {

using nlohmann::json;

std::vector<std::string> Lexicon::all() const {
    std::vector<std::string> out = keywords;
    out.insert(out.end(), slang.begin(), slang.end());
    return out;
}

bool Lexicon::contains(const std::string& word) const {
    return std::find(keywords.begin(), keywords.end(), word) != keywords.end() ||
           std::find(slang.begin(), slang.end(), word) != slang.end();
}

const Lexicon& default_lexicon() {
    static const Lexicon lex{
        {"opiates", "opiate", "opioid", "opium"},
        {"black", "dreams", "chocolate", "china", "gum", "toys", "incense", "pox", "hops",
         "cruz", "auntie", "hocus"},
    };
    return lex;
}

const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {
        "apple", "window", "river", "mountain", "coffee", "garden", "music", "friend", "school",
        "morning", "evening", "dinner", "breakfast", "kitchen", "bedroom", "street", "city",
        "village", "forest", "ocean", "island", "bridge", "castle", "market", "station", "train",
        "plane", "bicycle", "engine", "wheel", "road", "path", "field", "meadow", "valley",
        "summit", "cloud", "storm", "thunder", "lightning", "rain", "snow", "winter", "summer",
        "spring", "autumn", "harvest", "farmer", "teacher", "doctor", "nurse", "lawyer", "artist",
        "painter", "writer", "singer", "dancer", "player", "runner", "swimmer", "climber",
        "reader", "listener", "speaker", "leader", "worker", "builder", "driver", "pilot",
        "sailor", "soldier", "guard", "keeper", "hunter", "baker", "butcher", "tailor", "barber",
        "florist", "grocer", "cashier", "waiter", "chef", "cook", "meal", "supper", "snack",
        "fruit", "banana", "orange", "grape", "cherry", "melon", "peach", "plum", "pear", "lemon",
        "lime", "berry", "carrot", "potato", "tomato", "onion", "garlic", "pepper", "salt",
        "sugar", "honey", "butter", "cheese", "bread", "flour", "grain", "rice", "pasta", "soup",
        "salad", "sauce", "spice", "herb", "basil", "mint", "ginger", "cinnamon", "vanilla",
        "cream", "milk", "water", "juice", "tea", "cocoa", "bottle", "glass", "plate", "bowl",
        "spoon", "fork", "knife", "napkin", "table", "chair", "sofa", "couch", "shelf", "drawer",
        "closet", "mirror", "lamp", "candle", "clock", "watch", "calendar", "notebook", "pencil",
        "crayon", "marker", "paper", "letter", "envelope", "stamp", "package", "parcel", "box",
        "basket", "bucket", "barrel", "crate", "sack", "pouch", "wallet", "purse", "pocket",
        "jacket", "sweater", "shirt", "trousers", "skirt", "dress", "scarf", "glove", "mitten",
        "sock", "shoe", "boot", "sandal", "slipper", "hat", "cap", "helmet", "umbrella", "coat",
        "button", "zipper", "ribbon", "thread", "needle", "fabric", "cotton", "wool", "silk",
        "leather", "metal", "iron", "steel", "copper", "silver", "golden", "bronze", "stone",
        "marble", "granite", "pebble", "sand", "clay", "brick", "cement", "timber", "plank",
        "board", "nail", "hammer", "wrench", "pliers", "drill", "saw", "ladder", "rope", "chain",
        "wire", "cable", "pipe", "valve", "pump", "motor", "gear", "lever", "piston", "bolt",
        "screw", "anchor", "sail", "paddle", "oar", "canoe", "kayak", "yacht", "ferry", "harbor",
        "dock", "pier", "lighthouse", "beacon", "signal", "whistle", "horn", "bell", "drum",
        "guitar", "violin", "piano", "flute", "trumpet", "melody", "rhythm", "chorus", "verse",
        "poem", "story", "novel", "chapter", "page", "cover", "library", "museum", "gallery",
        "theater", "cinema", "stage", "curtain", "ticket", "audience", "crowd", "parade",
        "festival", "holiday", "birthday", "wedding", "party", "picnic", "journey", "voyage",
        "travel", "tourist", "luggage", "suitcase", "passport", "map", "compass", "lantern",
        "torch", "campfire", "tent", "cabin", "cottage", "mansion", "palace", "tower", "dome",
        "arch", "column", "fountain", "statue", "monument", "plaza", "avenue", "corner", "block",
        "fence", "gate", "yard", "lawn", "hedge", "bush", "shrub", "flower", "blossom", "petal",
        "stem", "root", "branch", "trunk", "bark", "leaf", "acorn", "pinecone", "moss", "fern",
        "mushroom", "meadowlark", "sparrow", "robin", "eagle", "falcon", "hawk", "owl", "crow",
        "raven", "pigeon", "seagull", "pelican", "heron", "crane", "swan", "goose", "duck",
        "chicken", "rooster", "turkey", "peacock", "parrot", "canary", "rabbit", "squirrel",
        "chipmunk", "beaver", "otter", "badger", "fox", "wolf", "bear", "deer", "moose", "elk",
        "bison", "horse", "pony", "donkey", "camel", "goat", "sheep", "lamb", "cow", "bull",
        "pig", "piglet", "kitten", "puppy", "hamster", "turtle", "lizard", "frog", "toad",
        "snail", "spider", "beetle", "butterfly", "dragonfly", "cricket", "grasshopper", "ant",
        "bee", "wasp", "moth", "worm", "fish", "salmon", "trout", "tuna", "shark", "whale",
        "dolphin", "seal", "walrus", "crab", "lobster", "shrimp", "oyster", "clam", "coral",
        "seaweed", "wave", "tide", "current", "shore", "beach", "cliff", "cave", "canyon",
        "desert", "oasis", "prairie", "tundra", "glacier", "volcano", "crater", "ridge", "slope",
        "trail", "footpath", "crossing", "junction", "tunnel", "subway", "tram", "wagon", "cart",
        "sled", "skate", "ski", "surfboard", "kite", "balloon", "rocket", "satellite", "planet",
        "comet", "meteor", "galaxy", "nebula", "horizon", "sunrise", "sunset", "twilight",
        "midnight", "noon", "minute", "moment", "season", "decade", "century", "history",
        "future", "present", "memory", "thought", "idea", "dream", "wish", "hope", "courage",
        "wisdom", "knowledge", "lesson", "question", "answer", "puzzle", "riddle", "secret",
        "mystery", "clue", "evidence", "reason", "logic", "pattern", "shape", "circle", "square",
        "triangle", "diamond", "sphere", "cube", "spiral", "curve", "line", "angle", "measure",
        "number", "figure", "sum", "total", "amount", "portion", "piece", "slice", "half",
        "quarter", "double", "single", "pair", "group", "team", "club", "society", "community",
        "neighbor", "visitor", "guest", "stranger", "partner", "cousin", "uncle", "nephew",
        "niece", "grandmother", "grandfather", "parent", "child", "infant", "toddler", "youth",
        "adult", "elder", "person", "people", "family", "household", "home", "doorway", "porch",
        "balcony", "attic", "basement", "garage", "workshop", "studio", "office", "factory",
        "warehouse", "store", "shop", "bakery", "pharmacy", "hospital", "clinic", "campus",
        "classroom", "lecture", "exam", "grade", "diploma", "career", "salary", "budget", "coin",
        "dollar", "penny", "nickel", "treasure", "jewel", "pearl", "ruby", "emerald", "sapphire",
        "crystal", "quartz", "magnet", "battery", "switch", "button2", "screen", "keyboard",
        "mouse", "printer", "camera", "photo", "picture", "portrait", "landscape", "canvas",
        "brush", "palette", "sketch", "drawing", "design", "project", "plan", "goal", "target",
        "prize", "reward", "medal", "trophy", "victory", "contest", "race", "match", "game",
        "sport", "practice", "training", "exercise", "stretch", "balance", "strength", "energy",
        "health", "comfort", "rest", "sleep", "nap", "walk", "hike", "jog", "sprint", "jump",
        "leap", "climb", "crawl", "swim", "dive", "float", "drift", "glide", "soar", "flight",
    };
    return words;
}

namespace {

void validate_spec(const SynthSpec& spec) {
    auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob_ok(spec.positive_fraction) || !prob_ok(spec.theta) || !prob_ok(spec.noise)) {
        throw ConfigError("synth_corpus: probabilities must lie in [0, 1]");
    }
    if (spec.n_posts < 4) throw ConfigError("synth_corpus: n_posts must be >= 4");
    if (spec.len_min < kMinPostTokens || spec.len_max < spec.len_min) {
        throw ConfigError("synth_corpus: need len_max >= len_min >= " +
                          std::to_string(kMinPostTokens));
    }
}

} // namespace

Corpus synth_corpus(const SynthSpec& spec) {
    validate_spec(spec);
    const auto& fillers = filler_words();
    const auto lexicon = default_lexicon().all();

    RngState rng = RngState(spec.seed).fork("synth");
    const std::size_t n_pos = static_cast<std::size_t>(
        std::llround(spec.positive_fraction * static_cast<double>(spec.n_posts)));

    Corpus corpus;
    corpus.posts.reserve(spec.n_posts);
    for (std::size_t i = 0; i < spec.n_posts; ++i) {
        const bool is_pos = i < n_pos;
        const std::size_t len = spec.len_min + rng.next_below(spec.len_max - spec.len_min + 1);
        std::vector<std::string> tokens;
        tokens.reserve(len);
        for (std::size_t t = 0; t < len; ++t) {
            tokens.push_back(fillers[rng.next_below(fillers.size())]);
        }
        if (is_pos) {
            if (rng.next_double() < spec.theta) {
                const std::size_t occurrences = 1 + rng.next_below(3);
                for (std::size_t o = 0; o < occurrences; ++o) {
                    tokens[rng.next_below(len)] = lexicon[rng.next_below(lexicon.size())];
                }
            }
        } else if (rng.next_double() < (1.0 - spec.theta) * 0.2) {
            // hard negative: a non-user mentioning the word
            tokens[rng.next_below(len)] = lexicon[rng.next_below(lexicon.size())];
        }
        int label = is_pos ? 1 : 0;
        if (rng.next_double() < spec.noise) label = 1 - label;

        RawPost post;
        char buf[32];
        std::snprintf(buf, sizeof buf, "synth-%05zu", i);
        post.id = buf;
        std::string text;
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            if (t > 0) text.push_back(' ');
            text += tokens[t];
        }
        post.text = std::move(text);
        post.label = label;
        corpus.posts.push_back(std::move(post));
        ++corpus.class_count[label];
    }
    return corpus;
}

LoadResult load_corpus(const std::string& path, const StopwordSet& stopwords,
                       std::size_t min_tokens) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus: " + path);

    LoadResult result;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("corpus line " + std::to_string(lineno) + ": malformed record: " +
                            e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("text") || !j.contains("label") ||
            !j["id"].is_string() || !j["text"].is_string() || !j["label"].is_number_integer()) {
            throw DataError("corpus line " + std::to_string(lineno) +
                            ": expected {\"id\": str, \"text\": str, \"label\": int}");
        }
        RawPost post;
        post.id = j["id"].get<std::string>();
        post.text = j["text"].get<std::string>();
        const long long label = j["label"].get<long long>();
        if (post.id.empty()) {
            throw DataError("corpus line " + std::to_string(lineno) + ": empty id");
        }
        if (label != 0 && label != 1) {
            throw DataError("corpus line " + std::to_string(lineno) + ": label " +
                            std::to_string(label) + " out of domain {0, 1}");
        }
        if (!seen_ids.insert(post.id).second) {
            throw DataError("corpus line " + std::to_string(lineno) + ": duplicate id '" +
                            post.id + "'");
        }
        if (preprocess_tokens(post.text, stopwords).size() < min_tokens) {
            ++result.skipped_short;
            continue;
        }
        post.label = static_cast<int>(label);
        ++result.corpus.class_count[label];
        result.corpus.posts.push_back(std::move(post));
    }
    return result;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary); // LF line endings everywhere
    if (!out) throw DataError("cannot write corpus: " + path);
    for (const auto& post : corpus.posts) {
        json j{{"id", post.id}, {"text", post.text}, {"label", post.label.value_or(-1)}};
        out << j.dump() << "\n";
    }
}

std::unordered_map<std::string, std::size_t> lexicon_stats(const Corpus& corpus,
                                                           const Lexicon& lexicon) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& w : lexicon.keywords) counts[w] = 0;
    for (const auto& w : lexicon.slang) counts[w] = 0;
    const StopwordSet no_stopwords;
    for (const auto& post : corpus.posts) {
        for (const auto& tok : tokenize_filter(normalize(post.text), no_stopwords)) {
            auto it = counts.find(tok);
            if (it != counts.end()) ++it->second;
        }
    }
    return counts;
}

} // namespace oud
