#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "support/gpt_fixture.hpp"
#include "support/test_util.hpp"
#include "tokparity/bpe.hpp"
#include "tokparity/results.hpp"

using namespace tokparity;
using testsupport::gpt_fixture_model;
using testsupport::random_utf8;
using testsupport::temp_dir;

namespace {

// Reference trainer: full pair recount every iteration, no incremental
// bookkeeping. Deliberately naive so it can arbitrate the real trainer.
std::vector<std::pair<std::string, std::string>> oracle_merges(const std::vector<std::string>& corpus,
                                                               std::size_t target_vocab) {
    std::map<std::string, long> chunk_counts;
    for (const auto& text : corpus)
        for (const auto& chunk : TokenizerModel::pretokenize(text)) ++chunk_counts[chunk];

    std::vector<std::pair<std::vector<std::string>, long>> words;
    for (const auto& [chunk, count] : chunk_counts)
        words.emplace_back(bytecodec::split_units(bytecodec::to_units(chunk)), count);

    std::set<std::string> created;
    std::vector<std::pair<std::string, std::string>> merges;
    std::size_t vocab = 256;
    while (vocab < target_vocab) {
        std::map<std::pair<std::string, std::string>, long> counts;
        for (const auto& [syms, count] : words)
            for (std::size_t i = 0; i + 1 < syms.size(); ++i)
                counts[{syms[i], syms[i + 1]}] += count;

        std::pair<std::string, std::string> best;
        long best_count = 0;
        for (const auto& [pair, count] : counts) {
            if (created.count(pair.first + pair.second)) continue;
            if (count > best_count) {  // std::map iterates pairs in lexicographic order
                best_count = count;
                best = pair;
            }
        }
        if (best_count <= 0) break;

        for (auto& [syms, count] : words) {
            std::vector<std::string> merged;
            for (std::size_t i = 0; i < syms.size();) {
                if (i + 1 < syms.size() && syms[i] == best.first && syms[i + 1] == best.second) {
                    merged.push_back(best.first + best.second);
                    i += 2;
                } else {
                    merged.push_back(syms[i]);
                    ++i;
                }
            }
            syms = std::move(merged);
        }
        created.insert(best.first + best.second);
        merges.push_back(best);
        ++vocab;
    }
    return merges;
}

}  // namespace

TEST_SUITE_BEGIN("bpe");

TEST_CASE("byte codec round-trips all byte values and marks the space") {
    std::string all_bytes;
    for (int b = 0; b < 256; ++b) all_bytes.push_back(static_cast<char>(b));
    CHECK(bytecodec::to_bytes(bytecodec::to_units(all_bytes)) == all_bytes);
    CHECK(bytecodec::to_units(" ") == bytecodec::kSpaceMarker);
    CHECK(bytecodec::to_units("a") == "a");
    CHECK_THROWS_AS((void)bytecodec::to_bytes("\xFF"), std::invalid_argument);
}

TEST_CASE("base vocabulary is the 256 byte tokens in codepoint order") {
    const TokenizerModel model;
    CHECK(model.vocab_size() == 256);
    CHECK(model.token(0) == "!");
    CHECK(model.token_id(bytecodec::kSpaceMarker).value() == 220);
    CHECK_THROWS_AS((void)model.token(256), std::out_of_range);
}

TEST_CASE("the most frequent adjacent pair merges first") {
    const TokenizerModel model = TokenizerModel::train({"ab ab ab"}, 260);
    REQUIRE_FALSE(model.merges().empty());
    CHECK(model.merges().front() == std::pair<std::string, std::string>{"a", "b"});
    CHECK(oracle_merges({"ab ab ab"}, 260) == model.merges());
}

TEST_CASE("training stops at the reachable size without error") {
    const TokenizerModel model = TokenizerModel::train({"x"}, 300);
    CHECK(model.vocab_size() == 256);
    CHECK(model.merges().empty());
}

TEST_CASE("whole words become tokens in frequency order") {
    std::vector<std::string> corpus(40, "low lower lowest low lowest lower low");
    const TokenizerModel model = TokenizerModel::train(corpus, 280);
    CHECK(model.merges() == oracle_merges(corpus, 280));

    // "low" (space-marked) must become one token before any token covering
    // "lower" exists: the shorter word is a strict prefix with higher count.
    const auto& merges = model.merges();
    std::size_t low_at = merges.size(), lower_at = merges.size();
    for (std::size_t i = 0; i < merges.size(); ++i) {
        const std::string out = merges[i].first + merges[i].second;
        if (out == bytecodec::to_units(" low") && low_at == merges.size()) low_at = i;
        if (out == bytecodec::to_units(" lower") && lower_at == merges.size()) lower_at = i;
    }
    CHECK(low_at < merges.size());
    CHECK(low_at < lower_at);
}

TEST_CASE("trainer matches the recount oracle on mixed corpora") {
    const std::vector<std::string> corpus = {
        "the cat sat on the mat.", "the dog sat on the log!", "cats and dogs, dogs and cats",
        "a log is not a mat", "sit sat set"};
    for (std::size_t target : {260u, 280u, 320u}) {
        const TokenizerModel model = TokenizerModel::train(corpus, target);
        CHECK(model.merges() == oracle_merges(corpus, target));
    }
}

TEST_CASE("training rejects bad inputs") {
    CHECK_THROWS_AS((void)TokenizerModel::train({}, 300), std::invalid_argument);
    CHECK_THROWS_AS((void)TokenizerModel::train({""}, 300), std::invalid_argument);
    CHECK_THROWS_AS((void)TokenizerModel::train({"ok"}, 256), std::invalid_argument);
}

TEST_CASE("training is deterministic for a fixed corpus order") {
    const std::vector<std::string> corpus = {"she sells sea shells", "by the sea shore"};
    const TokenizerModel a = TokenizerModel::train(corpus, 300);
    const TokenizerModel b = TokenizerModel::train(corpus, 300);
    CHECK(a.merges() == b.merges());
    CHECK(a.content_hash() == b.content_hash());
}

TEST_CASE("fixture vocabulary fragments neopronouns but not binary pronouns") {
    const TokenizerModel model = gpt_fixture_model();
    CHECK(model.token_strings(model.encode(" zyr")) ==
          std::vector<std::string>{bytecodec::to_units(" z"), "yr"});
    CHECK(model.token_strings(model.encode(" his")) ==
          std::vector<std::string>{bytecodec::to_units(" his")});
    CHECK(model.encode("").empty());
    CHECK(model.token_strings(model.encode(" xe")) ==
          std::vector<std::string>{bytecodec::kSpaceMarker, "xe"});
}

TEST_CASE("decode inverts encode on plain and adversarial text") {
    const TokenizerModel model = gpt_fixture_model();
    const std::string text = "Casey uses xe/xem.";
    CHECK(model.decode(model.encode(text)) == text);
    CHECK(model.decode(std::vector<int>{}) == "");
    CHECK_THROWS_AS((void)model.decode(std::vector<int>{99999}), std::out_of_range);

    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const std::string sample = random_utf8(rng);
        CHECK(model.decode(model.encode(sample)) == sample);
    }
}

TEST_CASE("round trip holds for a trained tokenizer as well") {
    const TokenizerModel model =
        TokenizerModel::train({"people write words, words carry spaces and emoji"}, 300);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const std::string sample = random_utf8(rng);
        CHECK(model.decode(model.encode(sample)) == sample);
    }
}

TEST_CASE("removing merges never shrinks any encoding") {
    const TokenizerModel full = gpt_fixture_model();
    std::mt19937_64 rng(13);
    for (std::size_t keep : {0u, 5u, 20u, 30u}) {
        const TokenizerModel partial = full.truncated(keep);
        for (int i = 0; i < 120; ++i) {
            const std::string sample = random_utf8(rng);
            CHECK(partial.encode(sample).size() >= full.encode(sample).size());
        }
        CHECK(partial.encode(" himself").size() >= full.encode(" himself").size());
    }
}

TEST_CASE("space markers sit on word-initial tokens and nowhere else") {
    const TokenizerModel model = gpt_fixture_model();
    std::mt19937_64 rng(17);
    const std::vector<std::string> vocabulary = {"he", "she", "his", "hers", "the", "xe",
                                                 "them", "himself", "zyr", "thing"};
    for (int round = 0; round < 200; ++round) {
        std::string text;
        const std::size_t n_words = 1 + uniform_below(rng, 8);
        for (std::size_t w = 0; w < n_words; ++w) {
            if (w) text += ' ';
            text += vocabulary[uniform_below(rng, vocabulary.size())];
        }
        std::size_t tokens_with_space = 0;
        for (int id : model.encode(text)) {
            const std::string raw = bytecodec::to_bytes(model.token(id));
            if (raw.rfind(' ', 0) == 0) ++tokens_with_space;
            CHECK(raw.find(' ', 1) == std::string::npos);
        }
        CHECK(tokens_with_space == n_words - 1);  // one marker per space-joined word
    }
}

TEST_CASE("vocabulary files round-trip bit-exactly") {
    TokenizerModel model = TokenizerModel::train({"token files must be stable"}, 300);
    model.add_special_token(bytecodec::to_units(" stable!"));
    const auto dir_a = temp_dir("tok-a");
    const auto dir_b = temp_dir("tok-b");
    model.save(dir_a.string());

    const TokenizerModel loaded = TokenizerModel::load(dir_a.string());
    loaded.save(dir_b.string());
    CHECK(read_text_file((dir_a / "vocab.json").string()) ==
          read_text_file((dir_b / "vocab.json").string()));
    CHECK(read_text_file((dir_a / "merges.txt").string()) ==
          read_text_file((dir_b / "merges.txt").string()));
    CHECK(loaded.content_hash() == model.content_hash());
    CHECK(loaded.vocab_size() == model.vocab_size());
    CHECK(loaded.encode("stable files stable! ok") == model.encode("stable files stable! ok"));

    // specials are recovered structurally: not a byte token, not a merge output
    REQUIRE(loaded.special_tokens().size() == 1);
    const int sid = *loaded.special_tokens().begin();
    CHECK(loaded.token(sid) == bytecodec::to_units(" stable!"));
}

TEST_CASE("special tokens match whole pre-tokens only") {
    TokenizerModel model = gpt_fixture_model();
    const int sid = model.add_special_token(bytecodec::to_units(" xe"));
    const auto ids = model.encode(" xe");
    REQUIRE(ids.size() == 1);
    CHECK(ids[0] == sid);
    // not as a substring of a longer word
    for (int id : model.encode(" xenon")) CHECK(id != sid);
    CHECK(model.decode(model.encode(" xenon")) == " xenon");
    // registering twice returns the same id
    bool added = true;
    CHECK(model.add_special_token(bytecodec::to_units(" xe"), &added) == sid);
    CHECK_FALSE(added);
}

TEST_CASE("vocabulary invariants hold for trained and fixture models") {
    for (const TokenizerModel& model :
         {TokenizerModel::train({"check ids and merges"}, 290), gpt_fixture_model()}) {
        std::set<int> ids;
        for (std::size_t i = 0; i < model.vocab_size(); ++i) {
            const std::string& tok = model.token(static_cast<int>(i));
            REQUIRE(model.token_id(tok).has_value());
            ids.insert(*model.token_id(tok));
        }
        CHECK(ids.size() == model.vocab_size());
        CHECK(*ids.begin() == 0);
        CHECK(*ids.rbegin() == static_cast<int>(model.vocab_size()) - 1);
        for (const auto& [l, r] : model.merges()) {
            CHECK(model.token_id(l).has_value());
            CHECK(model.token_id(r).has_value());
            CHECK(model.token_id(l + r).has_value());
        }
    }
}

TEST_CASE("pre-tokenization keeps one space on the following word") {
    using V = std::vector<std::string>;
    CHECK(TokenizerModel::pretokenize("ab ab") == V{"ab", " ab"});
    CHECK(TokenizerModel::pretokenize("a  b") == V{"a", " ", " b"});
    CHECK(TokenizerModel::pretokenize("hi!") == V{"hi", "!"});
    CHECK(TokenizerModel::pretokenize(" hi, there") == V{" hi", ",", " there"});
    CHECK(TokenizerModel::pretokenize("a\nb") == V{"a", "\n", "b"});
    CHECK(TokenizerModel::pretokenize("tail  ") == V{"tail", "  "});
    CHECK(TokenizerModel::pretokenize("xe/xem") == V{"xe", "/", "xem"});
    CHECK(TokenizerModel::pretokenize("").empty());
}

TEST_SUITE_END();
