#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tokparity {

// Printable remapping of raw bytes, GPT-style: printable latin-1 bytes map to
// themselves, everything else to codepoints starting at U+0100. The space
// byte 0x20 becomes U+0120 ("Ġ"), which is why word-initial tokens carry that
// marker. Token strings throughout the tokenizer are UTF-8 sequences of these
// remapped codepoints ("units").
namespace bytecodec {

// UTF-8 string of the remapped codepoint for each byte value.
const std::array<std::string, 256>& byte_units();

std::string to_units(std::string_view raw_bytes);
// Inverse of to_units. Throws std::invalid_argument on a non-unit sequence.
std::string to_bytes(std::string_view units);

// Splits a units string into its per-byte unit characters.
std::vector<std::string> split_units(std::string_view units);

// "Ġ" (U+0120), the remapped space byte.
extern const std::string kSpaceMarker;

}  // namespace bytecodec

using TokenSeq = std::vector<int>;

// Byte-level BPE tokenizer: 256 base byte tokens, an ordered merge list, and a
// set of special tokens that match whole pre-tokens before any merging.
class TokenizerModel {
  public:
    TokenizerModel();  // base byte vocabulary only, no merges

    // Trains from scratch. Deterministic given corpus order; pair-count ties
    // break on the lexicographically smaller (left, right) token pair.
    // target_vocab_size must be >= 257; the reachable size may be smaller.
    static TokenizerModel train(const std::vector<std::string>& corpus, std::size_t target_vocab_size);

    // vocab.json (token -> id) and merges.txt ("left right" per line, ordered).
    // Tokens that are neither byte tokens nor merge outputs are re-registered
    // as special tokens on load.
    static TokenizerModel load(const std::string& dir);
    void save(const std::string& dir) const;

    std::vector<int> encode(std::string_view text) const;
    std::string decode(std::span<const int> ids) const;
    std::vector<std::string> token_strings(std::span<const int> ids) const;

    std::size_t vocab_size() const { return id_to_token_.size(); }
    const std::string& token(int id) const;
    std::optional<int> token_id(std::string_view token_units) const;
    const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }
    const std::string& space_marker() const;
    const std::set<int>& special_tokens() const { return specials_; }

    // Registers a special token (given as a units string). Returns its id; if
    // the token already exists in the vocabulary it is marked special in place
    // and no new id is allocated. `added` reports whether an id was created.
    int add_special_token(std::string_view token_units, bool* added = nullptr);

    // Drops merges past the first `count`, together with the vocabulary
    // entries they created. Special tokens are retained (re-assigned dense
    // ids). Used by fragmentation-monotonicity checks.
    TokenizerModel truncated(std::size_t merge_count) const;

    // Provenance hash over vocabulary, merges, and special-token set.
    std::uint64_t content_hash() const;

    // Whitespace-aware pre-tokenization over raw bytes. A single space before
    // a word or punctuation run attaches to that run; remaining whitespace
    // forms its own chunk. Concatenation of the chunks is the input.
    static std::vector<std::string> pretokenize(std::string_view text);

  private:
    int intern_token(std::string token_units);
    void rebuild_merge_ranks();
    void encode_chunk(std::string_view raw_chunk, std::vector<int>& out) const;

    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, int> token_to_id_;
    std::vector<std::pair<std::string, std::string>> merges_;
    std::unordered_map<std::string, int> merge_rank_;  // "left right" -> rank
    std::set<int> specials_;
    std::unordered_map<std::string, int> special_by_units_;
};

}  // namespace tokparity
