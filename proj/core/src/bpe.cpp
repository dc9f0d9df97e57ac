#include "tokparity/bpe.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tokparity/hash.hpp"

namespace tokparity {

namespace bytecodec {

namespace {

bool printable_byte(unsigned b) {
    return (b >= 0x21 && b <= 0x7E) || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE && b <= 0xFF);
}

std::string codepoint_utf8(unsigned cp) {
    std::string s;
    if (cp < 0x80) {
        s.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        s.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        s.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    return s;
}

struct Tables {
    std::array<std::string, 256> byte_to_unit;
    std::unordered_map<std::string, unsigned char> unit_to_byte;
    Tables() {
        unsigned next = 0;
        for (unsigned b = 0; b < 256; ++b) {
            unsigned cp = printable_byte(b) ? b : 0x100 + next++;
            byte_to_unit[b] = codepoint_utf8(cp);
            unit_to_byte[byte_to_unit[b]] = static_cast<unsigned char>(b);
        }
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

std::size_t unit_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    return 0;  // invalid inside a units string
}

}  // namespace

const std::string kSpaceMarker = tables().byte_to_unit[0x20];

const std::array<std::string, 256>& byte_units() { return tables().byte_to_unit; }

std::string to_units(std::string_view raw_bytes) {
    std::string out;
    out.reserve(raw_bytes.size() * 2);
    for (unsigned char b : raw_bytes) out += tables().byte_to_unit[b];
    return out;
}

std::string to_bytes(std::string_view units) {
    std::string out;
    out.reserve(units.size());
    std::size_t i = 0;
    while (i < units.size()) {
        const std::size_t len = unit_length(static_cast<unsigned char>(units[i]));
        if (len == 0 || i + len > units.size())
            throw std::invalid_argument("malformed unit sequence");
        auto it = tables().unit_to_byte.find(std::string(units.substr(i, len)));
        if (it == tables().unit_to_byte.end())
            throw std::invalid_argument("unknown unit in token string");
        out.push_back(static_cast<char>(it->second));
        i += len;
    }
    return out;
}

std::vector<std::string> split_units(std::string_view units) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < units.size()) {
        const std::size_t len = unit_length(static_cast<unsigned char>(units[i]));
        if (len == 0 || i + len > units.size())
            throw std::invalid_argument("malformed unit sequence");
        out.emplace_back(units.substr(i, len));
        i += len;
    }
    return out;
}

}  // namespace bytecodec

namespace {

bool is_space_byte(unsigned char b) { return b == ' '; }
bool is_ws_byte(unsigned char b) {
    return b == ' ' || b == '\t' || b == '\n' || b == '\r' || b == '\v' || b == '\f';
}
bool is_word_byte(unsigned char b) {
    return (b >= 'a' && b <= 'z') || (b >= 'A' && b <= 'Z') || (b >= '0' && b <= '9') || b >= 0x80;
}

std::string pair_key(std::string_view left, std::string_view right) {
    std::string k;
    k.reserve(left.size() + right.size() + 1);
    k.append(left);
    k.push_back(' ');
    k.append(right);
    return k;
}

}  // namespace

TokenizerModel::TokenizerModel() {
    // Base byte tokens get ids in ascending remapped-codepoint order, i.e.
    // printable bytes first, then the remapped control bytes.
    std::vector<std::pair<std::string, unsigned>> units;
    units.reserve(256);
    for (unsigned b = 0; b < 256; ++b) units.emplace_back(bytecodec::byte_units()[b], b);
    std::sort(units.begin(), units.end(), [](const auto& a, const auto& b) {
        // Unit strings compare in codepoint order bytewise (UTF-8 property).
        return a.first < b.first;
    });
    for (auto& [unit, byte] : units) {
        (void)byte;
        intern_token(unit);
    }
}

int TokenizerModel::intern_token(std::string token_units) {
    auto it = token_to_id_.find(token_units);
    if (it != token_to_id_.end()) return it->second;
    const int id = static_cast<int>(id_to_token_.size());
    token_to_id_.emplace(token_units, id);
    id_to_token_.push_back(std::move(token_units));
    return id;
}

const std::string& TokenizerModel::token(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size())
        throw std::out_of_range("token id out of range: " + std::to_string(id));
    return id_to_token_[static_cast<std::size_t>(id)];
}

std::optional<int> TokenizerModel::token_id(std::string_view token_units) const {
    auto it = token_to_id_.find(std::string(token_units));
    if (it == token_to_id_.end()) return std::nullopt;
    return it->second;
}

const std::string& TokenizerModel::space_marker() const { return bytecodec::kSpaceMarker; }

void TokenizerModel::rebuild_merge_ranks() {
    merge_rank_.clear();
    for (std::size_t r = 0; r < merges_.size(); ++r)
        merge_rank_.emplace(pair_key(merges_[r].first, merges_[r].second), static_cast<int>(r));
}

std::vector<std::string> TokenizerModel::pretokenize(std::string_view text) {
    std::vector<std::string> chunks;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto word_or_punct_end = [&](std::size_t k) {
        if (is_word_byte(static_cast<unsigned char>(text[k]))) {
            while (k < n && is_word_byte(static_cast<unsigned char>(text[k]))) ++k;
        } else {
            while (k < n && !is_ws_byte(static_cast<unsigned char>(text[k])) &&
                   !is_word_byte(static_cast<unsigned char>(text[k])))
                ++k;
        }
        return k;
    };
    while (i < n) {
        if (is_ws_byte(static_cast<unsigned char>(text[i]))) {
            std::size_t j = i;
            while (j < n && is_ws_byte(static_cast<unsigned char>(text[j]))) ++j;
            if (j == n) {
                chunks.emplace_back(text.substr(i, j - i));
                i = j;
            } else if (is_space_byte(static_cast<unsigned char>(text[j - 1]))) {
                // Last space of the run attaches to the following run.
                if (j - 1 > i) chunks.emplace_back(text.substr(i, j - 1 - i));
                const std::size_t k = word_or_punct_end(j);
                chunks.emplace_back(text.substr(j - 1, k - (j - 1)));
                i = k;
            } else {
                chunks.emplace_back(text.substr(i, j - i));
                i = j;
            }
        } else {
            const std::size_t k = word_or_punct_end(i);
            chunks.emplace_back(text.substr(i, k - i));
            i = k;
        }
    }
    return chunks;
}

void TokenizerModel::encode_chunk(std::string_view raw_chunk, std::vector<int>& out) const {
    const std::string units = bytecodec::to_units(raw_chunk);
    if (!special_by_units_.empty()) {
        auto it = special_by_units_.find(units);
        if (it != special_by_units_.end()) {
            out.push_back(it->second);
            return;
        }
    }
    std::vector<std::string> symbols = bytecodec::split_units(units);
    while (symbols.size() >= 2) {
        int best_rank = std::numeric_limits<int>::max();
        for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
            auto it = merge_rank_.find(pair_key(symbols[i], symbols[i + 1]));
            if (it != merge_rank_.end() && it->second < best_rank) best_rank = it->second;
        }
        if (best_rank == std::numeric_limits<int>::max()) break;
        const auto& [left, right] = merges_[static_cast<std::size_t>(best_rank)];
        std::vector<std::string> merged;
        merged.reserve(symbols.size());
        for (std::size_t i = 0; i < symbols.size();) {
            if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
                merged.push_back(left + right);
                i += 2;
            } else {
                merged.push_back(std::move(symbols[i]));
                ++i;
            }
        }
        symbols = std::move(merged);
    }
    for (const auto& s : symbols) out.push_back(token_to_id_.at(s));
}

std::vector<int> TokenizerModel::encode(std::string_view text) const {
    std::vector<int> out;
    out.reserve(text.size() / 3 + 4);
    for (const auto& chunk : pretokenize(text)) encode_chunk(chunk, out);
    return out;
}

std::string TokenizerModel::decode(std::span<const int> ids) const {
    std::string units;
    for (int id : ids) units += token(id);
    return bytecodec::to_bytes(units);
}

std::vector<std::string> TokenizerModel::token_strings(std::span<const int> ids) const {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(token(id));
    return out;
}

int TokenizerModel::add_special_token(std::string_view token_units, bool* added) {
    if (token_units.empty()) throw std::invalid_argument("special token must be non-empty");
    bytecodec::to_bytes(token_units);  // validates the unit sequence
    bool created = token_to_id_.find(std::string(token_units)) == token_to_id_.end();
    const int id = intern_token(std::string(token_units));
    specials_.insert(id);
    special_by_units_.emplace(std::string(token_units), id);
    if (added != nullptr) *added = created;
    return id;
}

namespace {

// Trainer-side word representation: symbols are token ids into the growing
// vocabulary; count is the pre-token corpus frequency.
struct TrainWord {
    std::vector<int> syms;
    std::int64_t count = 0;
};

std::uint64_t id_pair_key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

}  // namespace

TokenizerModel TokenizerModel::train(const std::vector<std::string>& corpus,
                                     std::size_t target_vocab_size) {
    if (target_vocab_size < 257)
        throw std::invalid_argument("target_vocab_size must be at least 257");
    TokenizerModel model;

    std::map<std::string, std::int64_t> chunk_counts;  // ordered for determinism
    for (const auto& text : corpus)
        for (const auto& chunk : pretokenize(text)) ++chunk_counts[chunk];
    if (chunk_counts.empty()) throw std::invalid_argument("training corpus is empty");

    std::vector<TrainWord> words;
    words.reserve(chunk_counts.size());
    for (const auto& [chunk, count] : chunk_counts) {
        TrainWord w;
        w.count = count;
        for (const auto& unit : bytecodec::split_units(bytecodec::to_units(chunk)))
            w.syms.push_back(*model.token_id(unit));
        words.push_back(std::move(w));
    }

    std::unordered_map<std::uint64_t, std::int64_t> pair_counts;
    std::unordered_map<std::uint64_t, std::set<std::size_t>> pair_words;
    auto add_word_pairs = [&](std::size_t wi, std::int64_t sign) {
        const TrainWord& w = words[wi];
        for (std::size_t i = 0; i + 1 < w.syms.size(); ++i) {
            const std::uint64_t k = id_pair_key(w.syms[i], w.syms[i + 1]);
            pair_counts[k] += sign * w.count;
            if (sign > 0) pair_words[k].insert(wi);
        }
    };
    for (std::size_t wi = 0; wi < words.size(); ++wi) add_word_pairs(wi, +1);

    while (model.vocab_size() < target_vocab_size) {
        // Highest count wins; ties break on the lexicographically smaller
        // (left, right) token-string pair.
        std::int64_t best_count = 0;
        std::uint64_t best_key = 0;
        std::pair<std::string_view, std::string_view> best_pair;
        for (;;) {
            best_count = 0;
            for (const auto& [key, count] : pair_counts) {
                if (count <= 0) continue;
                const int a = static_cast<int>(key >> 32);
                const int b = static_cast<int>(key & 0xFFFFFFFFULL);
                std::pair<std::string_view, std::string_view> cand{model.token(a), model.token(b)};
                if (count > best_count || (count == best_count && cand < best_pair)) {
                    best_count = count;
                    best_key = key;
                    best_pair = cand;
                }
            }
            if (best_count <= 0) break;
            // A pair whose concatenation already names a token cannot claim a
            // fresh id; drop it and take the next best.
            if (model.token_id(std::string(best_pair.first) + std::string(best_pair.second))) {
                pair_counts.erase(best_key);
                pair_words.erase(best_key);
                continue;
            }
            break;
        }
        if (best_count <= 0) break;  // nothing left to merge

        const int left_id = static_cast<int>(best_key >> 32);
        const int right_id = static_cast<int>(best_key & 0xFFFFFFFFULL);
        const std::string left = model.token(left_id);
        const std::string right = model.token(right_id);
        const int new_id = model.intern_token(left + right);
        model.merges_.emplace_back(left, right);

        auto affected_it = pair_words.find(best_key);
        std::vector<std::size_t> affected(affected_it->second.begin(), affected_it->second.end());
        for (std::size_t wi : affected) {
            TrainWord& w = words[wi];
            bool contains = false;
            for (std::size_t i = 0; i + 1 < w.syms.size(); ++i) {
                if (w.syms[i] == left_id && w.syms[i + 1] == right_id) {
                    contains = true;
                    break;
                }
            }
            if (!contains) continue;  // stale index from an earlier rewrite
            add_word_pairs(wi, -1);
            std::vector<int> merged;
            merged.reserve(w.syms.size());
            for (std::size_t i = 0; i < w.syms.size();) {
                if (i + 1 < w.syms.size() && w.syms[i] == left_id && w.syms[i + 1] == right_id) {
                    merged.push_back(new_id);
                    i += 2;
                } else {
                    merged.push_back(w.syms[i]);
                    ++i;
                }
            }
            w.syms = std::move(merged);
            add_word_pairs(wi, +1);
        }
        pair_counts.erase(best_key);
        pair_words.erase(best_key);
    }

    model.rebuild_merge_ranks();
    return model;
}

void TokenizerModel::save(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    {
        nlohmann::json vocab = nlohmann::json::object();
        for (std::size_t id = 0; id < id_to_token_.size(); ++id)
            vocab[id_to_token_[id]] = static_cast<int>(id);
        std::ofstream out(std::filesystem::path(dir) / "vocab.json", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write vocab.json under " + dir);
        out << vocab.dump() << '\n';
    }
    {
        std::ofstream out(std::filesystem::path(dir) / "merges.txt", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write merges.txt under " + dir);
        for (const auto& [l, r] : merges_) out << l << ' ' << r << '\n';
    }
}

TokenizerModel TokenizerModel::load(const std::string& dir) {
    const auto vocab_path = std::filesystem::path(dir) / "vocab.json";
    const auto merges_path = std::filesystem::path(dir) / "merges.txt";
    std::ifstream vin(vocab_path, std::ios::binary);
    if (!vin) throw std::runtime_error("cannot open " + vocab_path.string());
    nlohmann::json vocab = nlohmann::json::parse(vin);

    std::vector<std::string> by_id(vocab.size());
    for (auto it = vocab.begin(); it != vocab.end(); ++it) {
        const int id = it.value().get<int>();
        if (id < 0 || static_cast<std::size_t>(id) >= by_id.size() || !by_id[id].empty())
            throw std::runtime_error("vocab.json ids must be dense and contiguous from 0");
        by_id[static_cast<std::size_t>(id)] = it.key();
    }

    TokenizerModel model;
    if (by_id.size() < 256) throw std::runtime_error("vocab.json lacks the 256 byte-level tokens");
    for (std::size_t id = 0; id < 256; ++id) {
        if (by_id[id] != model.id_to_token_[id])
            throw std::runtime_error("vocab.json byte-level tokens do not match the codec order");
    }

    std::vector<std::pair<std::string, std::string>> merges;
    {
        std::ifstream min(merges_path, std::ios::binary);
        if (!min) throw std::runtime_error("cannot open " + merges_path.string());
        std::string line;
        while (std::getline(min, line)) {
            if (line.empty()) continue;
            const auto sp = line.find(' ');
            if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size())
                throw std::runtime_error("malformed merges.txt line: " + line);
            merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
        }
    }

    // Replay merges so their outputs claim the next ids; anything left over in
    // vocab.json must be a special token.
    std::unordered_map<std::string, std::size_t> merge_output_pos;
    for (std::size_t i = 0; i < merges.size(); ++i)
        merge_output_pos.emplace(merges[i].first + merges[i].second, i);

    for (std::size_t id = 256; id < by_id.size(); ++id) {
        const std::string& tok = by_id[id];
        auto it = merge_output_pos.find(tok);
        if (it != merge_output_pos.end()) {
            const auto& [l, r] = merges[it->second];
            if (!model.token_id(l) || !model.token_id(r))
                throw std::runtime_error("merge uses a token before it exists: " + l + " + " + r);
            const int new_id = model.intern_token(tok);
            if (new_id != static_cast<int>(id))
                throw std::runtime_error("merge output id mismatch for token: " + tok);
            model.merges_.emplace_back(l, r);
        } else {
            bool added = false;
            const int sid = model.add_special_token(tok, &added);
            if (!added || sid != static_cast<int>(id))
                throw std::runtime_error("special token id mismatch for token: " + tok);
        }
    }
    if (model.merges_.size() != merges.size())
        throw std::runtime_error("merges.txt contains merges whose outputs are not in vocab.json");
    for (const auto& [l, r] : model.merges_) {
        for (const std::string* side : {&l, &r}) {
            auto sid = model.token_id(*side);
            if (sid && model.specials_.count(*sid))
                throw std::runtime_error("merge rule consumes a special token: " + *side);
        }
    }
    model.rebuild_merge_ranks();
    return model;
}

TokenizerModel TokenizerModel::truncated(std::size_t merge_count) const {
    TokenizerModel model;
    const std::size_t keep = std::min(merge_count, merges_.size());
    for (std::size_t i = 0; i < keep; ++i) {
        model.merges_.push_back(merges_[i]);
        model.intern_token(merges_[i].first + merges_[i].second);
    }
    for (int sid : specials_) model.add_special_token(id_to_token_[static_cast<std::size_t>(sid)]);
    model.rebuild_merge_ranks();
    return model;
}

std::uint64_t TokenizerModel::content_hash() const {
    std::uint64_t h = fnv1a("tokenizer:v1");
    for (const auto& t : id_to_token_) {
        h = fnv1a(t, h);
        h = fnv1a("\x01", h);
    }
    for (const auto& [l, r] : merges_) {
        h = fnv1a(l, h);
        h = fnv1a(" ", h);
        h = fnv1a(r, h);
        h = fnv1a("\x02", h);
    }
    for (int sid : specials_) h = fnv1a(std::to_string(sid), h);
    return h;
}

}  // namespace tokparity
