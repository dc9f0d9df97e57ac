#include <stdexcept>

#include "doctest.h"
#include "support/gpt_fixture.hpp"
#include "tokparity/diagnostics.hpp"
#include "tokparity/ptp.hpp"

using namespace tokparity;
using testsupport::gpt_fixture_model;

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("binary pronouns stay intact while neopronouns fragment in two") {
    const TokenizerModel model = gpt_fixture_model();
    const FertilityReport binary = fertility(model, std::vector<std::string>{"his", "her"});
    for (const auto& e : binary.per_word) CHECK(e.count == 1);
    CHECK(binary.group_mean.at("all") == 1.0);
    CHECK(binary.intact_fraction.at("all") == 1.0);

    const FertilityReport neo =
        fertility(model, std::vector<std::string>{"zyr", "eir", "xir", "faer"});
    for (const auto& e : neo.per_word) CHECK(e.count == 2);
    CHECK(neo.group_mean.at("all") == 2.0);
    CHECK(neo.intact_fraction.at("all") == 0.0);
}

TEST_CASE("a merges-free model emits one token per byte") {
    const TokenizerModel bare;
    const FertilityReport unprefixed =
        fertility(bare, std::vector<std::string>{"he", "word", "émoji"}, /*space_prefixed=*/false);
    CHECK(unprefixed.per_word[0].count == 2);
    CHECK(unprefixed.per_word[1].count == 4);
    CHECK(unprefixed.per_word[2].count == 6);  // é is two bytes

    const FertilityReport prefixed = fertility(bare, std::vector<std::string>{"word"});
    CHECK(prefixed.per_word[0].count == 5);  // the leading space costs one byte token
}

TEST_CASE("grouped fertility aggregates per group") {
    const TokenizerModel model = gpt_fixture_model();
    const FertilityReport report = fertility(
        model, std::vector<GroupedWord>{{"his", "binary"}, {"her", "binary"}, {"zyr", "neo"},
                                        {"xir", "neo"}});
    CHECK(report.group_mean.at("binary") == 1.0);
    CHECK(report.group_mean.at("neo") == 2.0);
    CHECK(report.intact_fraction.at("binary") == 1.0);
    CHECK(report.intact_fraction.at("neo") == 0.0);
    CHECK_THROWS_AS((void)fertility(model, std::vector<std::string>{}), std::invalid_argument);
}

TEST_CASE("parity flips from false to true across amelioration") {
    const PronounLexicon lexicon = PronounLexicon::bundled();
    const TokenizerModel before = gpt_fixture_model();
    const ParityReport pre = parity_report(before, lexicon);
    CHECK_FALSE(pre.parity);
    for (const auto& row : pre.rows) {
        if (row.family == "xe") {
            CHECK(row.mean_fertility > 1.0);
            CHECK(row.intact_fraction == 0.0);
        } else {
            CHECK(row.mean_fertility == 1.0);
        }
    }

    auto [after, patch] = ameliorate(before, lexicon.at("xe"));
    const ParityReport post = parity_report(after, lexicon);
    CHECK(post.parity);
    for (const auto& row : post.rows) CHECK(row.mean_fertility == 1.0);
}

TEST_CASE("a binary-only lexicon reaches parity on a well-trained vocabulary") {
    PronounLexicon binary_only;
    const PronounLexicon full = PronounLexicon::bundled();
    binary_only.add_family(full.at("he"));
    binary_only.add_family(full.at("she"));
    const ParityReport report = parity_report(gpt_fixture_model(), binary_only);
    CHECK(report.parity);
}

TEST_CASE("fertility of one coincides with the single-token verification check") {
    const PronounLexicon lexicon = PronounLexicon::bundled();
    for (const TokenizerModel& model :
         {gpt_fixture_model(), ameliorate(gpt_fixture_model(), lexicon.at("xe")).first}) {
        for (const auto& family : lexicon.families()) {
            const VerificationReport report = verify(model, family);
            for (const auto& check : report.checks) {
                const FertilityReport fr = fertility(model, std::vector<std::string>{check.form});
                CHECK((fr.per_word[0].count == 1) == check.pass);
            }
        }
    }
}

TEST_CASE("added merges never increase a word's fertility") {
    const TokenizerModel full = gpt_fixture_model();
    const std::vector<std::string> words = {"he", "she", "herself", "xir", "zyr", "theory", "xe"};
    for (std::size_t keep : {0u, 10u, 25u}) {
        const TokenizerModel partial = full.truncated(keep);
        const FertilityReport fewer = fertility(partial, words);
        const FertilityReport more = fertility(full, words);
        for (std::size_t i = 0; i < words.size(); ++i)
            CHECK(more.per_word[i].count <= fewer.per_word[i].count);
    }
}

TEST_CASE("reports serialize to JSON and aligned tables") {
    const TokenizerModel model = gpt_fixture_model();
    const ParityReport report = parity_report(model, PronounLexicon::bundled());
    const std::string json_text = report.to_json_text();
    CHECK(json_text.find("\"parity\"") != std::string::npos);
    const std::string table = report.table();
    CHECK(table.find("family") != std::string::npos);
    CHECK(table.find("xe") != std::string::npos);

    const FertilityReport fr = fertility(model, std::vector<std::string>{"his", "zyr"});
    CHECK(fr.to_json_text().find("\"per_word\"") != std::string::npos);
    CHECK(fr.table().find("zyr") != std::string::npos);
}

TEST_SUITE_END();
