#include "tokparity/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace tokparity {

namespace {

// Index of the best-scoring candidate; exact ties go to the lexicographically
// smallest label so results are independent of candidate order.
std::size_t argmax_with_tiebreak(const std::vector<double>& scores,
                                 const std::vector<std::string>& labels) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best] || (scores[i] == scores[best] && labels[i] < labels[best]))
            best = i;
    }
    return best;
}

}  // namespace

MetricSlice consistency(CandidateScorer& scorer, const std::vector<EvalInstance>& instances,
                        const EvalOptions& options) {
    MetricSlice slice;
    for (const auto& inst : instances) {
        const ScoringSplit split = scoring_split(inst);
        std::vector<std::string> candidates;
        candidates.reserve(inst.pool.size());
        for (const auto& surface : inst.pool) candidates.push_back(split.candidate_lead + surface);
        const auto scored = scorer.score(split.context, candidates);

        std::vector<double> values(scored.size());
        for (std::size_t i = 0; i < scored.size(); ++i) {
            values[i] = options.length_normalize
                            ? scored[i].logprob / static_cast<double>(std::max(1, scored[i].tokens))
                            : scored[i].logprob;
        }
        const std::size_t best = argmax_with_tiebreak(values, inst.pool);

        InstanceRecord rec;
        rec.template_id = inst.template_id;
        rec.name = inst.name;
        rec.family_id = inst.family_id;
        rec.expected_case = inst.expected_case;
        rec.metric = "consistency";
        rec.predicted = inst.pool[best];
        rec.gold = inst.gold_surface;
        rec.predicted_score = values[best];
        rec.hit = rec.predicted == rec.gold;

        Fraction& f = slice.per_family[inst.family_id];
        f.den += 1;
        if (rec.hit) f.num += 1;
        slice.records.push_back(std::move(rec));
    }
    return slice;
}

MetricSlice case_error(CandidateScorer& scorer, const std::vector<EvalInstance>& instances,
                       const PronounLexicon& lexicon, const EvalOptions&) {
    MetricSlice slice;
    for (const auto& inst : instances) {
        const PronounFamily& family = lexicon.at(inst.family_id);
        // Distinct surfaces across the family's five case forms. Cases that
        // share a surface produce identical sentences, so the prediction is
        // judged on surfaces.
        std::vector<std::string> surfaces;
        for (PronounCase c : kAllCases) {
            const std::string& s = family.form(c);
            if (std::find(surfaces.begin(), surfaces.end(), s) == surfaces.end())
                surfaces.push_back(s);
        }
        std::vector<std::string> sentences;
        sentences.reserve(surfaces.size());
        for (const auto& s : surfaces) sentences.push_back(instance_sentence(inst, "", s));
        // Whole-sequence likelihood: right context participates, which is what
        // separates "her mom" from "herself mom" when both continue the same
        // left context.
        const auto scored = scorer.score("", sentences);
        std::vector<double> values(scored.size());
        for (std::size_t i = 0; i < scored.size(); ++i) values[i] = scored[i].logprob;
        const std::size_t best = argmax_with_tiebreak(values, surfaces);

        InstanceRecord rec;
        rec.template_id = inst.template_id;
        rec.name = inst.name;
        rec.family_id = inst.family_id;
        rec.expected_case = inst.expected_case;
        rec.metric = "case_error";
        rec.predicted = surfaces[best];
        rec.gold = inst.gold_surface;
        rec.predicted_score = values[best];
        rec.hit = rec.predicted != rec.gold;  // numerator counts case errors

        Fraction& f = slice.per_family[inst.family_id];
        f.den += 1;
        if (rec.hit) f.num += 1;
        slice.records.push_back(std::move(rec));
    }
    return slice;
}

MetricSlice inject_error(CandidateScorer& scorer, const std::vector<EvalInstance>& instances,
                         const EvalOptions& options) {
    if (std::find(options.dets.begin(), options.dets.end(), std::string()) == options.dets.end())
        throw std::invalid_argument("inject_error requires the empty determiner among the variants");
    MetricSlice slice;
    for (const auto& inst : instances) {
        if (!inst.has_det_slot)
            throw std::invalid_argument("inject_error needs instances with a [DET] slot (template '" +
                                        inst.template_id + "')");
        const ScoringSplit split = scoring_split(inst);
        std::vector<std::string> candidates;
        candidates.reserve(options.dets.size());
        for (const auto& det : options.dets) {
            std::string region = split.candidate_lead;
            if (!det.empty()) {
                region += det;
                region += ' ';
            }
            region += inst.gold_surface;
            candidates.push_back(std::move(region));
        }
        const auto scored = scorer.score(split.context, candidates);
        std::vector<double> values(scored.size());
        for (std::size_t i = 0; i < scored.size(); ++i) values[i] = scored[i].logprob;
        const std::size_t best = argmax_with_tiebreak(values, options.dets);

        InstanceRecord rec;
        rec.template_id = inst.template_id;
        rec.name = inst.name;
        rec.family_id = inst.family_id;
        rec.expected_case = inst.expected_case;
        rec.metric = "inject_error";
        rec.predicted = options.dets[best];
        rec.gold = "";
        rec.predicted_score = values[best];
        rec.hit = !options.dets[best].empty();  // numerator counts injections

        Fraction& f = slice.per_family[inst.family_id];
        f.den += 1;
        if (rec.hit) f.num += 1;
        slice.records.push_back(std::move(rec));
    }
    return slice;
}

MetricResult evaluate_all(CandidateScorer& scorer, const std::vector<EvalInstance>& instances,
                          const PronounLexicon& lexicon, const EvalOptions& options) {
    MetricResult result;
    result.consistency = consistency(scorer, instances, options);
    result.case_error = case_error(scorer, instances, lexicon, options);
    result.inject_error = inject_error(scorer, instances, options);
    return result;
}

}  // namespace tokparity
