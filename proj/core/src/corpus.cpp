#include "tokparity/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tokparity/rng.hpp"

namespace tokparity {

namespace {

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_alnum(char c) { return is_ascii_letter(c) || (c >= '0' && c <= '9'); }

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Closed-class words that cannot head a following noun phrase; seeing one
// right after "her"/"his" means the pronoun closed its own phrase.
const std::unordered_set<std::string>& non_noun_next() {
    static const std::unordered_set<std::string> words = {
        // prepositions
        "about", "above", "across", "after", "against", "along", "among", "around", "at",
        "before", "behind", "below", "beneath", "beside", "between", "beyond", "by", "down",
        "during", "except", "for", "from", "in", "inside", "into", "near", "of", "off", "on",
        "onto", "out", "outside", "over", "past", "since", "through", "throughout", "to",
        "toward", "towards", "under", "until", "up", "upon", "with", "within", "without",
        // conjunctions and complementizers
        "and", "or", "but", "nor", "so", "yet", "because", "although", "though", "while",
        "whereas", "if", "unless", "that", "than", "as", "whether", "when", "where", "once",
        // determiners opening a new phrase
        "the", "a", "an", "this", "these", "those", "another", "some", "any", "no", "every",
        "each", "either", "neither", "all", "both", "more", "most", "many", "much", "few",
        "several", "my", "your", "our", "their", "its",
        // pronouns
        "i", "you", "he", "she", "it", "we", "they", "me", "him", "them", "us", "himself",
        "herself", "themselves", "who", "whom", "which", "what", "something", "anything",
        "nothing", "everything", "someone", "anyone", "everyone", "nobody",
        // auxiliaries and common finite verbs
        "is", "am", "are", "was", "were", "be", "been", "being", "has", "have", "had",
        "having", "do", "does", "did", "done", "will", "would", "shall", "should", "can",
        "could", "may", "might", "must", "ought", "went", "goes", "gone", "came", "come",
        "comes", "said", "says", "told", "tells", "asked", "gave", "given", "got", "made",
        "took", "saw", "seen", "knew", "known", "thought", "felt", "seemed", "became",
        "replied", "smiled", "laughed", "cried", "nodded", "shrugged", "sighed", "whispered",
        "shouted", "agreed", "refused", "decided", "tried", "wanted", "liked", "loved",
        "hated", "admired", "thanked", "arrived", "appeared",
        // adverbs and particles
        "yesterday", "today", "tomorrow", "now", "then", "there", "here", "again", "soon",
        "later", "earlier", "often", "always", "never", "sometimes", "usually", "recently",
        "finally", "immediately", "too", "also", "instead", "anyway", "however", "meanwhile",
        "afterwards", "alone", "away", "well", "not",
    };
    return words;
}

// Frequent nouns that make the possessive reading certain.
const std::unordered_set<std::string>& common_nouns() {
    static const std::unordered_set<std::string> words = {
        "mom", "dad", "mother", "father", "parents", "son", "daughter", "children", "kids",
        "brother", "sister", "sibling", "family", "friend", "friends", "colleague",
        "colleagues", "neighbor", "wife", "husband", "partner", "mentor", "student",
        "students", "teacher", "book", "books", "memoir", "novel", "poem", "poems", "album",
        "debut", "career", "work", "works", "job", "office", "studio", "lab", "house",
        "home", "apartment", "room", "kitchen", "garden", "car", "keys", "phone", "bag",
        "hat", "coat", "shoes", "dress", "hair", "eyes", "hands", "voice", "face", "smile",
        "name", "idea", "ideas", "plan", "plans", "dream", "dreams", "goal", "goals",
        "story", "stories", "speech", "letter", "letters", "diary", "notes", "research",
        "thesis", "project", "projects", "team", "band", "music", "art", "sculpture",
        "designs", "design", "style", "legacy", "reputation", "health", "life", "death",
        "birthday", "childhood", "youth", "education", "degree", "award", "awards", "prize",
        "medal", "trophy", "victory", "loss", "fortune", "city", "town", "country",
        "village", "school", "university", "college", "firm", "company", "business", "farm",
        "shop", "store", "restaurant", "hotel", "boat", "ship", "bicycle", "horse", "dog",
        "cat", "desk", "chair", "garden", "piano", "violin", "guitar", "camera", "laptop",
    };
    return words;
}

// Adjectives that reliably introduce a noun phrase after a possessive.
const std::unordered_set<std::string>& possessive_cues() {
    static const std::unordered_set<std::string> words = {
        "own",    "new",    "old",      "first",   "second", "third",  "last",   "next",
        "young",  "little", "big",      "long",    "short",  "great",  "small",  "best",
        "worst",  "favorite", "beloved", "late",   "former", "entire", "whole",  "main",
        "senior", "junior", "youngest", "eldest",  "oldest", "famous", "private", "public",
        "personal", "professional", "latest", "final", "original",
    };
    return words;
}

// -ly words that are nouns or prenominal modifiers, not adverbs.
const std::unordered_set<std::string>& ly_exceptions() {
    static const std::unordered_set<std::string> words = {
        "family", "assembly", "supply", "belly",  "jelly",   "ally",    "rally",
        "lily",   "butterfly", "firefly", "monopoly", "anomaly", "folly", "bully",
        "only",   "early",   "elderly", "friendly", "weekly",  "daily",  "monthly",
        "yearly", "lovely",  "lonely",
    };
    return words;
}

// -ing words that are ordinary nouns.
const std::unordered_set<std::string>& ing_nouns() {
    static const std::unordered_set<std::string> words = {
        "morning", "evening", "wedding", "building", "painting", "ring", "king", "spring",
        "string", "sibling", "darling", "ceiling", "feeling", "meeting", "wing", "thing",
        "clothing", "housing", "writing", "drawing", "recording", "upbringing", "beginning",
        "ending", "earring", "offering", "opening",
    };
    return words;
}

bool has_noun_suffix(const std::string& w) {
    static const std::vector<std::string> suffixes = {"tion", "sion", "ment", "ness", "ship",
                                                      "hood", "ism",  "ist",  "ity",  "ance",
                                                      "ence", "ure",  "age"};
    for (const auto& s : suffixes)
        if (w.size() > s.size() + 2 && w.compare(w.size() - s.size(), s.size(), s) == 0) return true;
    return false;
}

// The next letter-run after `pos`, or empty when punctuation or end of text
// intervenes.
std::string next_word(std::string_view text, std::size_t pos) {
    std::size_t i = pos;
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i >= text.size() || !is_ascii_letter(text[i])) return {};
    std::size_t j = i;
    while (j < text.size() && is_ascii_letter(text[j])) ++j;
    return std::string(text.substr(i, j - i));
}

}  // namespace

Disambiguation disambiguate_her_his(std::string_view text, std::size_t begin, std::size_t end) {
    const std::string surface = to_lower(text.substr(begin, end - begin));
    if (surface != "her" && surface != "his")
        throw std::invalid_argument("disambiguate_her_his expects a 'her' or 'his' span");
    const PronounCase non_possessive =
        surface == "her" ? PronounCase::Accusative : PronounCase::PossessivePredicative;

    const std::string next = to_lower(next_word(text, end));
    if (next.empty()) return {non_possessive, true};  // clause or sentence boundary
    if (non_noun_next().count(next)) return {non_possessive, true};
    if (next.size() > 2 && next.compare(next.size() - 2, 2, "ly") == 0 && !ly_exceptions().count(next))
        return {non_possessive, true};  // adverb
    if (common_nouns().count(next) || possessive_cues().count(next) || ly_exceptions().count(next) ||
        ing_nouns().count(next) || has_noun_suffix(next))
        return {PronounCase::PossessivePronominal, true};
    if (next.size() > 4 && next.compare(next.size() - 3, 3, "ing") == 0)
        return {PronounCase::PossessivePronominal, false};  // gerund or noun, unresolved
    // Unknown open-class word: most such continuations are noun phrases.
    return {PronounCase::PossessivePronominal, false};
}

std::vector<PronounOccurrence> find_pronoun_occurrences(const std::string& text,
                                                        const PronounLexicon& lexicon,
                                                        const std::vector<std::string>& family_ids) {
    // surface -> (family, case) candidates in family/case order
    std::unordered_map<std::string, std::vector<std::pair<std::string, PronounCase>>> surface_map;
    for (const auto& fid : family_ids) {
        const PronounFamily& f = lexicon.at(fid);
        for (PronounCase c : kAllCases) surface_map[f.form(c)].emplace_back(f.id, c);
    }

    std::vector<PronounOccurrence> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_ascii_letter(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_ascii_letter(text[j])) ++j;
        const bool left_ok = i == 0 || !is_ascii_alnum(text[i - 1]);
        const bool right_ok = j == text.size() || !is_ascii_alnum(text[j]);
        if (left_ok && right_ok) {
            const std::string word = to_lower(text.substr(i, j - i));
            auto it = surface_map.find(word);
            if (it != surface_map.end()) {
                PronounOccurrence occ;
                occ.begin = i;
                occ.end = j;
                occ.capitalized = std::isupper(static_cast<unsigned char>(text[i])) != 0;
                if (word == "her" || word == "his") {
                    const Disambiguation d = disambiguate_her_his(text, i, j);
                    occ.family_id = it->second.front().first;
                    occ.pcase = d.pcase;
                    occ.low_confidence = !d.confident;
                } else {
                    occ.family_id = it->second.front().first;
                    occ.pcase = it->second.front().second;
                }
                out.push_back(std::move(occ));
            }
        }
        i = j;
    }
    return out;
}

std::vector<Document> filter_binary(const std::vector<Document>& docs, const PronounLexicon& lexicon) {
    const auto binary = lexicon.binary_family_ids();
    std::vector<Document> out;
    for (const auto& doc : docs) {
        if (!find_pronoun_occurrences(doc.text, lexicon, binary).empty()) out.push_back(doc);
    }
    return out;
}

namespace {

struct DeclPattern {
    std::string text;    // e.g. "he/him/his/himself"
    DeclarationStyle style;
};

std::string capitalize_first(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

// Replaces slash-joined pronoun declarations of the source families with the
// target family's declaration in the same style. Longer (five-form) patterns
// are matched first.
std::string rewrite_declarations(const std::string& text, const PronounLexicon& lexicon,
                                 const std::vector<std::string>& source_families,
                                 const PronounFamily& target) {
    std::vector<DeclPattern> patterns;
    for (const auto& fid : source_families) {
        const PronounFamily& f = lexicon.at(fid);
        patterns.push_back({declaration(f, DeclarationStyle::FiveForm), DeclarationStyle::FiveForm});
        patterns.push_back({declaration(f, DeclarationStyle::FourForm), DeclarationStyle::FourForm});
    }
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        bool matched = false;
        if (is_ascii_letter(text[i]) && (i == 0 || !is_ascii_alnum(text[i - 1]))) {
            for (const auto& p : patterns) {
                const std::size_t n = p.text.size();
                if (i + n > text.size()) continue;
                std::string_view slice(text.data() + i, n);
                const bool lower_match = slice == p.text;
                const bool cap_match = !lower_match && std::string(slice) == capitalize_first(p.text);
                if (!lower_match && !cap_match) continue;
                if (i + n < text.size() && is_ascii_alnum(text[i + n])) continue;
                std::string repl = declaration(target, p.style);
                if (cap_match) repl = capitalize_first(repl);
                out += repl;
                i += n;
                matched = true;
                break;
            }
        }
        if (!matched) {
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

}  // namespace

std::string rewrite_pronouns(const std::string& text, const PronounLexicon& lexicon,
                             const std::vector<std::string>& source_families,
                             const std::string& target_family, AugmentStats* stats) {
    const PronounFamily& target = lexicon.at(target_family);
    const std::string staged = rewrite_declarations(text, lexicon, source_families, target);
    const auto occurrences = find_pronoun_occurrences(staged, lexicon, source_families);
    std::string out;
    out.reserve(staged.size());
    std::size_t cursor = 0;
    for (const auto& occ : occurrences) {
        out.append(staged, cursor, occ.begin - cursor);
        out += target.form(occ.pcase, occ.capitalized);
        cursor = occ.end;
        if (stats != nullptr) {
            ++stats->replaced_occurrences;
            if (occ.low_confidence) ++stats->low_confidence;
        }
    }
    out.append(staged, cursor, staged.size() - cursor);
    return out;
}

std::vector<Document> augment(const std::vector<Document>& docs, const AugmentationPlan& plan,
                              const PronounLexicon& lexicon,
                              const std::vector<std::string>& source_families, AugmentStats* stats) {
    if (plan.resource_level < 0.0 || plan.resource_level > 1.0)
        throw std::invalid_argument("resource_level must be in [0, 1]");
    if (!plan.document_level)
        throw std::invalid_argument("occurrence-level augmentation is not supported");
    lexicon.at(plan.target_family);  // validates the family

    std::vector<std::string> sources = source_families;
    if (sources.empty()) sources = lexicon.binary_family_ids();

    const std::size_t n = docs.size();
    const auto k = static_cast<std::size_t>(
        std::floor(plan.resource_level * static_cast<double>(n) + 1e-9));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(plan.seed);
    fisher_yates(order, rng);
    std::unordered_set<std::size_t> selected(order.begin(), order.begin() + static_cast<long>(k));

    std::vector<Document> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Document doc = docs[i];
        if (selected.count(i)) {
            doc.text = rewrite_pronouns(doc.text, lexicon, sources, plan.target_family, stats);
            doc.augmented = true;
            if (stats != nullptr) ++stats->selected_docs;
        }
        out.push_back(std::move(doc));
    }
    return out;
}

std::vector<Document> chunk_and_split(const std::vector<Document>& docs,
                                      const TokenizerModel& tokenizer, std::size_t window,
                                      SplitRatios ratios, std::uint64_t seed) {
    if (docs.size() < 3) throw std::invalid_argument("chunk_and_split needs at least 3 documents");
    if (window == 0) throw std::invalid_argument("chunk window must be positive");

    const std::size_t n = docs.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    fisher_yates(order, rng);

    const auto n_train = static_cast<std::size_t>(
        std::floor(ratios.train * static_cast<double>(n) + 1e-9));
    const auto n_val = static_cast<std::size_t>(
        std::floor(ratios.val * static_cast<double>(n) + 1e-9));
    std::vector<std::string> split_of(n);
    for (std::size_t r = 0; r < n; ++r) {
        const char* s = r < n_train ? "train" : (r < n_train + n_val ? "val" : "test");
        split_of[order[r]] = s;
    }

    std::vector<Document> chunks;
    for (std::size_t i = 0; i < n; ++i) {
        const auto ids = tokenizer.encode(docs[i].text);
        std::size_t chunk_index = 0;
        for (std::size_t start = 0; start < ids.size(); start += window, ++chunk_index) {
            const std::size_t len = std::min(window, ids.size() - start);
            Document chunk;
            chunk.id = docs[i].id + "#" + std::to_string(chunk_index);
            chunk.text = tokenizer.decode(std::span<const int>(ids.data() + start, len));
            chunk.augmented = docs[i].augmented;
            chunk.split = split_of[i];
            chunks.push_back(std::move(chunk));
        }
    }
    return chunks;
}

std::vector<Document> read_jsonl_stream(std::istream& in, const std::string& origin) {
    std::vector<Document> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
        Document doc;
        doc.id = j.at("id").get<std::string>();
        doc.text = j.at("text").get<std::string>();
        doc.augmented = j.value("augmented", false);
        doc.split = j.value("split", std::string());
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::vector<Document> read_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    return read_jsonl_stream(in, path);
}

std::string document_json_line(const Document& doc) {
    nlohmann::json j;
    j["id"] = doc.id;
    j["text"] = doc.text;
    j["augmented"] = doc.augmented;
    if (!doc.split.empty()) j["split"] = doc.split;
    return j.dump();
}

void write_jsonl(const std::string& path, const std::vector<Document>& docs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const auto& doc : docs) out << document_json_line(doc) << '\n';
}

}  // namespace tokparity
