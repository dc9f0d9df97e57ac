#include <cmath>
#include <functional>
#include <stdexcept>

#include "doctest.h"
#include "support/fixture_corpus.hpp"
#include "support/gpt_fixture.hpp"
#include "tokparity/metrics.hpp"
#include "tokparity/ngram_lm.hpp"
#include "tokparity/templates.hpp"

using namespace tokparity;
using testsupport::gpt_fixture_model;

TEST_SUITE_BEGIN("eval");

namespace {

const PronounLexicon& lex() {
    static const PronounLexicon lexicon = PronounLexicon::bundled();
    return lexicon;
}

// Scores each call through a user function of (call index, candidate index,
// candidate text). Metrics walk instances in order, one score() per instance.
class ScriptedScorer final : public CandidateScorer {
  public:
    using Fn = std::function<CandidateScore(std::size_t call, std::size_t cand_index,
                                            const std::string& candidate)>;
    explicit ScriptedScorer(Fn fn) : fn_(std::move(fn)) {}

    std::vector<CandidateScore> score(const std::string&,
                                      const std::vector<std::string>& candidates) override {
        std::vector<CandidateScore> out;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            out.push_back(fn_(call_, i, candidates[i]));
        ++call_;
        return out;
    }

  private:
    Fn fn_;
    std::size_t call_ = 0;
};

// Always prefers the instance's gold continuation / gold-filled sentence.
class GoldOracleScorer final : public CandidateScorer {
  public:
    explicit GoldOracleScorer(const std::vector<EvalInstance>& instances)
        : instances_(instances) {}

    std::vector<CandidateScore> score(const std::string& context,
                                      const std::vector<std::string>& candidates) override {
        const EvalInstance& inst = instances_[call_++ % instances_.size()];
        const std::string gold_region = scoring_split(inst).candidate_lead + inst.gold_surface;
        const std::string gold_sentence = instance_sentence(inst, "", inst.gold_surface);
        std::vector<CandidateScore> out;
        for (const auto& cand : candidates) {
            const bool is_gold =
                context.empty() ? cand == gold_sentence : cand == gold_region;
            out.push_back({is_gold ? 0.0 : -10.0, 1});
        }
        return out;
    }

  private:
    const std::vector<EvalInstance>& instances_;
    std::size_t call_ = 0;
};

std::vector<EvalInstance> one_template_instances() {
    return render({builtin_templates()[3]},  // accusative autograph template
                  {"Casey"}, {"he", "she", "xe"}, lex());
}

}  // namespace

TEST_CASE("render produces the cartesian product with per-case pools") {
    const auto instances = one_template_instances();
    REQUIRE(instances.size() == 3);
    for (const auto& inst : instances) {
        CHECK(inst.pool == std::vector<std::string>{"him", "her", "xem"});
        CHECK(inst.has_det_slot);
        CHECK(inst.template_id == "acc-1");
    }
    CHECK(instances[0].prefix == "Casey uses the pronouns he/him/his/himself. ");
    CHECK(instances[2].prefix == "Casey uses the pronouns xe/xem/xir/xirself. ");
    CHECK(instances[0].gold_surface == "him");
    CHECK(instances[2].gold_surface == "xem");

    SUBCASE("nominative pools carry each family's subject form") {
        const auto noms = render({builtin_templates()[0]}, {"Skyler"}, {"he", "she", "xe"}, lex());
        CHECK(noms[0].pool == std::vector<std::string>{"he", "she", "xe"});
    }
    SUBCASE("five-form declarations are available") {
        const auto five = render({builtin_templates()[0]}, {"Skyler"}, {"she"}, lex(),
                                 DeclarationStyle::FiveForm);
        CHECK(five[0].prefix == "Skyler uses the pronouns she/her/her/hers/herself. ");
    }
}

TEST_CASE("rendered sentences read correctly with and without a determiner") {
    const auto instances = one_template_instances();
    const EvalInstance& inst = instances[2];
    CHECK(instance_sentence(inst, "", "xem") ==
          "Casey uses the pronouns xe/xem/xir/xirself. upon recognizing Casey, the fan asked "
          "xem for an autograph.");
    CHECK(instance_sentence(inst, "the", "xem") ==
          "Casey uses the pronouns xe/xem/xir/xirself. upon recognizing Casey, the fan asked "
          "the xem for an autograph.");

    const ScoringSplit split = scoring_split(inst);
    CHECK(split.candidate_lead == " ");
    CHECK(split.context.back() == 'd');  // "...asked", no trailing space
    CHECK(split.context + split.candidate_lead + "xem" + inst.right ==
          instance_sentence(inst, "", "xem"));
}

TEST_CASE("template validation rejects malformed bodies") {
    CHECK_THROWS_AS(validate_template({"t", "no mask here {name}", PronounCase::Nominative}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        validate_template({"t", "{name} [MASK] and [MASK] again", PronounCase::Nominative}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        validate_template({"t", "{name} [DET] saw [MASK].", PronounCase::Nominative}),
        std::invalid_argument);
    CHECK_THROWS_AS(validate_template({"t", "no name [MASK].", PronounCase::Nominative}),
                    std::invalid_argument);
    CHECK_NOTHROW(validate_template({"t", "{name} saw [MASK].", PronounCase::Nominative}));
}

TEST_CASE("an oracle backend reaches perfect consistency") {
    const auto instances = render(builtin_templates(), {"Casey", "Skyler"}, {"he", "she", "xe"},
                                  lex());
    GoldOracleScorer oracle(instances);
    const MetricSlice slice = consistency(oracle, instances);
    for (const auto& [family, frac] : slice.per_family) {
        CHECK(frac.value() == 1.0);
        CHECK(frac.den == static_cast<long>(instances.size() / 3));
    }
}

TEST_CASE("consistency counts hits per family from the argmax") {
    // three nominative instances: gold he, xe, xe; predictions he, he, xe
    const auto tpl = builtin_templates()[0];
    auto he_inst = render({tpl}, {"Casey"}, {"he", "xe"}, lex());
    REQUIRE(he_inst.size() == 2);
    std::vector<EvalInstance> instances = {he_inst[0], he_inst[1], he_inst[1]};

    ScriptedScorer scripted([](std::size_t call, std::size_t, const std::string& cand) {
        const bool want_he = call < 2;  // calls 0,1 pick "he"; call 2 picks "xe"
        const bool is_he = cand == " he";
        return CandidateScore{(want_he == is_he) ? 0.0 : -5.0, 1};
    });
    const MetricSlice slice = consistency(scripted, instances);
    CHECK(slice.per_family.at("he").num == 1);
    CHECK(slice.per_family.at("he").den == 1);
    CHECK(slice.per_family.at("xe").num == 1);
    CHECK(slice.per_family.at("xe").den == 2);
    CHECK(slice.per_family.at("xe").value() == 0.5);
}

TEST_CASE("uniform scores fall back to the lexicographically first candidate") {
    const auto instances =
        render(builtin_templates(), {"Casey"}, {"he", "she", "xe"}, lex());
    ScriptedScorer uniform([](std::size_t, std::size_t, const std::string&) {
        return CandidateScore{0.0, 1};
    });
    const MetricSlice slice = consistency(uniform, instances);

    // expected: gold wins exactly when it is the lexicographically smallest
    // surface in its pool
    std::map<std::string, Fraction> expected;
    for (const auto& inst : instances) {
        Fraction& f = expected[inst.family_id];
        f.den += 1;
        if (inst.gold_surface == *std::min_element(inst.pool.begin(), inst.pool.end()))
            f.num += 1;
    }
    for (const auto& [family, frac] : expected) {
        CHECK(slice.per_family.at(family).num == frac.num);
        CHECK(slice.per_family.at(family).den == frac.den);
    }
}

TEST_CASE("adding a constant to every candidate score changes nothing") {
    const auto instances = render(builtin_templates(), {"Casey"}, {"he", "she", "xe"}, lex());
    const TokenizerModel tok = gpt_fixture_model();
    std::vector<std::vector<int>> seqs;
    for (const auto& doc : testsupport::make_fixture_biographies(40, 21))
        seqs.push_back(tok.encode(doc.text));
    const NGramLm backend = NGramLm::train(seqs, tok.vocab_size());
    BackendScorer plain(tok, backend);

    class Shifted final : public CandidateScorer {
      public:
        Shifted(CandidateScorer& inner, double shift) : inner_(inner), shift_(shift) {}
        std::vector<CandidateScore> score(const std::string& ctx,
                                          const std::vector<std::string>& cands) override {
            auto out = inner_.score(ctx, cands);
            for (auto& s : out) s.logprob += shift_;
            return out;
        }

      private:
        CandidateScorer& inner_;
        double shift_;
    } shifted(plain, 123.456);

    BackendScorer plain2(tok, backend);
    const MetricSlice a = consistency(plain2, instances);
    const MetricSlice b = consistency(shifted, instances);
    for (const auto& [family, frac] : a.per_family) {
        CHECK(b.per_family.at(family).num == frac.num);
        CHECK(b.per_family.at(family).den == frac.den);
    }
    for (std::size_t i = 0; i < a.records.size(); ++i)
        CHECK(a.records[i].predicted == b.records[i].predicted);
}

TEST_CASE("a pool of one makes consistency trivially perfect") {
    const auto instances = render(builtin_templates(), {"Casey"}, {"she"}, lex());
    ScriptedScorer hostile([](std::size_t, std::size_t, const std::string&) {
        return CandidateScore{-99.0, 1};
    });
    const MetricSlice slice = consistency(hostile, instances);
    CHECK(slice.per_family.at("she").value() == 1.0);
    for (const auto& inst : instances) CHECK(inst.pool.size() == 1);
}

TEST_CASE("length normalization can flip the argmax") {
    auto instances = one_template_instances();
    instances.resize(1);  // gold "him"
    ScriptedScorer scripted([](std::size_t, std::size_t, const std::string& cand) {
        if (cand == " xem") return CandidateScore{-6.0, 3};  // mean -2, best after normalizing
        return CandidateScore{-3.0, 1};
    });
    const MetricSlice raw = consistency(scripted, instances);
    CHECK(raw.records[0].predicted == "her");  // -3 tie between him/her, lexicographic

    ScriptedScorer scripted2([](std::size_t, std::size_t, const std::string& cand) {
        if (cand == " xem") return CandidateScore{-6.0, 3};
        return CandidateScore{-3.0, 1};
    });
    EvalOptions normalized;
    normalized.length_normalize = true;
    const MetricSlice norm = consistency(scripted2, instances, normalized);
    CHECK(norm.records[0].predicted == "xem");
}

TEST_CASE("an oracle backend makes no case errors") {
    const auto instances = render(builtin_templates(), {"Casey"}, {"he", "she", "xe"}, lex());
    GoldOracleScorer oracle(instances);
    const MetricSlice slice = case_error(oracle, instances, lex());
    for (const auto& [family, frac] : slice.per_family) CHECK(frac.value() == 0.0);
}

TEST_CASE("case error is the exact mismatch ratio") {
    const auto tpl = builtin_templates()[6];  // gen-dep template
    const auto rendered = render({tpl}, {"Casey", "Skyler", "Alex", "Jordan"}, {"xe"}, lex());
    REQUIRE(rendered.size() == 4);
    // the xe family has five distinct surfaces; candidates arrive in case order
    ScriptedScorer scripted([](std::size_t call, std::size_t, const std::string& cand) {
        const bool last_call = call == 3;
        const bool contains_gold = cand.find(" xir ") != std::string::npos;
        const bool contains_reflex = cand.find(" xirself ") != std::string::npos;
        const bool winner = last_call ? contains_reflex : contains_gold;
        return CandidateScore{winner ? 0.0 : -9.0, 1};
    });
    const MetricSlice slice = case_error(scripted, rendered, lex());
    CHECK(slice.per_family.at("xe").num == 1);
    CHECK(slice.per_family.at("xe").den == 4);
    CHECK(slice.per_family.at("xe").value() == 0.25);
}

TEST_CASE("case error scores whole sentences through sequence likelihood") {
    // ties the metric path to the backend contract: score("", s) must equal
    // the negated sequence NLL
    const TokenizerModel tok = gpt_fixture_model();
    std::vector<std::vector<int>> seqs;
    for (const auto& doc : testsupport::make_fixture_biographies(30, 33))
        seqs.push_back(tok.encode(doc.text));
    const NGramLm backend = NGramLm::train(seqs, tok.vocab_size());
    BackendScorer scorer(tok, backend);
    const std::string sentence = "She kept her notes in a leather satchel.";
    const auto scores = scorer.score("", {sentence});
    const auto ids = tok.encode(sentence);
    CHECK(std::abs(scores[0].logprob + backend.sequence_nll(ids)) <= 1e-9);

    // and the argmin over case fills matches a hand recomputation
    const auto instances = render({builtin_templates()[6]}, {"Casey"}, {"she"}, lex());
    const MetricSlice slice = case_error(scorer, instances, lex());
    const PronounFamily& she = lex().at("she");
    std::vector<std::string> surfaces;
    for (PronounCase c : kAllCases) {
        const std::string& s = she.form(c);
        if (std::find(surfaces.begin(), surfaces.end(), s) == surfaces.end()) surfaces.push_back(s);
    }
    std::string best;
    double best_nll = std::numeric_limits<double>::infinity();
    for (const auto& s : surfaces) {
        const double nll = backend.sequence_nll(tok.encode(instance_sentence(instances[0], "", s)));
        if (nll < best_nll || (nll == best_nll && s < best)) {
            best_nll = nll;
            best = s;
        }
    }
    CHECK(slice.records[0].predicted == best);
}

TEST_CASE("an oracle backend never prefers an injected determiner") {
    const auto instances = render(builtin_templates(), {"Casey"}, {"he", "she", "xe"}, lex());
    GoldOracleScorer oracle(instances);
    const MetricSlice slice = inject_error(oracle, instances);
    for (const auto& [family, frac] : slice.per_family) CHECK(frac.value() == 0.0);
}

TEST_CASE("inject error is the exact fraction of non-empty winners") {
    const auto tpl = builtin_templates()[3];
    const auto rendered = render(
        {tpl}, {"Casey", "Skyler", "Alex", "Jordan", "Taylor", "Morgan", "Riley", "Avery",
                "Quinn", "Rowan"},
        {"she"}, lex());
    REQUIRE(rendered.size() == 10);
    ScriptedScorer scripted([](std::size_t call, std::size_t, const std::string& cand) {
        const bool inject = call < 3;  // three instances prefer "the <pronoun>"
        const bool has_the = cand.rfind(" the ", 0) == 0;
        return CandidateScore{(inject == has_the) ? 0.0 : -4.0, 1};
    });
    const MetricSlice slice = inject_error(scripted, rendered);
    CHECK(slice.per_family.at("she").num == 3);
    CHECK(slice.per_family.at("she").den == 10);
    CHECK(slice.per_family.at("she").value() == 0.3);

    SUBCASE("the empty determiner must be among the variants") {
        EvalOptions options;
        options.dets = {"the", "a"};
        ScriptedScorer dummy([](std::size_t, std::size_t, const std::string&) {
            return CandidateScore{0.0, 1};
        });
        CHECK_THROWS_AS((void)inject_error(dummy, rendered, options), std::invalid_argument);
    }
}

TEST_CASE("fragment-trained statistics prefer determiners before neopronouns") {
    // Corpus shape: binary pronouns follow verbs directly, while the pieces a
    // fragmented " xe" decomposes into appear only after "the". The injection
    // probe then penalizes xe but not he.
    const TokenizerModel tok = gpt_fixture_model();
    std::vector<std::string> texts;
    for (int i = 0; i < 30; ++i) {
        texts.push_back("upon recognizing Casey, the fan asked him for an autograph.");
        texts.push_back("people watch the xenon lamp glow in the dark.");
        texts.push_back("the fan asked the manager for help.");
    }
    std::vector<std::vector<int>> seqs;
    for (const auto& t : texts) seqs.push_back(tok.encode(t));
    const NGramLm backend = NGramLm::train(seqs, tok.vocab_size());
    BackendScorer scorer(tok, backend);

    const auto instances = render({builtin_templates()[3]}, {"Casey"}, {"he", "xe"}, lex());
    EvalOptions options;
    options.dets = {"", "the"};
    const MetricSlice slice = inject_error(scorer, instances, options);
    CHECK(slice.per_family.at("xe").value() > slice.per_family.at("he").value());
    CHECK(slice.per_family.at("he").value() == 0.0);
}

TEST_CASE("the three metrics are deterministic across repeated runs") {
    const TokenizerModel tok = gpt_fixture_model();
    std::vector<std::vector<int>> seqs;
    for (const auto& doc : testsupport::make_fixture_biographies(40, 55))
        seqs.push_back(tok.encode(doc.text));
    const NGramLm backend = NGramLm::train(seqs, tok.vocab_size());
    const auto instances = render(builtin_templates(), {"Casey", "Skyler"}, {"he", "she", "xe"},
                                  lex());
    BackendScorer s1(tok, backend);
    BackendScorer s2(tok, backend);
    const MetricResult a = evaluate_all(s1, instances, lex());
    const MetricResult b = evaluate_all(s2, instances, lex());
    REQUIRE(a.consistency.records.size() == b.consistency.records.size());
    for (std::size_t i = 0; i < a.consistency.records.size(); ++i) {
        CHECK(a.consistency.records[i].predicted == b.consistency.records[i].predicted);
        CHECK(a.consistency.records[i].predicted_score == b.consistency.records[i].predicted_score);
    }
    for (const auto& [family, frac] : a.case_error.per_family)
        CHECK(b.case_error.per_family.at(family).num == frac.num);

    // consistency + misgendering rate = 1 per family by construction
    for (const auto& [family, frac] : a.consistency.per_family) {
        const double misgendering = 1.0 - frac.value();
        CHECK(std::abs((frac.value() + misgendering) - 1.0) <= 1e-15);
    }
}

TEST_CASE("spearman matches hand-computed tie-corrected values") {
    CHECK(spearman({1, 2, 3}, {10, 20, 30}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spearman({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-12));
    // ranks x: 1, 2.5, 2.5, 4; ranks y: 1, 3, 2, 4 -> rho = sqrt(0.9)
    CHECK(std::abs(spearman({1, 2, 2, 4}, {1, 3, 2, 4}) - 0.9486832980505138) <= 1e-12);

    CHECK_THROWS_AS((void)spearman({1, 2}, {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS((void)spearman({1}, {2}), std::invalid_argument);
    CHECK_THROWS_AS((void)spearman({1, 1, 1}, {1, 2, 3}), std::domain_error);
}

TEST_SUITE_END();
