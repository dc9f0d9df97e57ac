#include "tokparity/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "tokparity/corpus.hpp"
#include "tokparity/diagnostics.hpp"
#include "tokparity/metrics.hpp"
#include "tokparity/neural_lm.hpp"
#include "tokparity/ngram_lm.hpp"
#include "tokparity/ptp.hpp"
#include "tokparity/results.hpp"
#include "tokparity/rng.hpp"

namespace tokparity {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
    if (corpus_path.empty()) throw ConfigError("config: corpus path is required");
    if (!fs::exists(corpus_path)) throw ConfigError("config: corpus file not found: " + corpus_path);
    if (!lexicon_path.empty() && !fs::exists(lexicon_path))
        throw ConfigError("config: lexicon file not found: " + lexicon_path);
    if (!templates_path.empty() && !fs::exists(templates_path))
        throw ConfigError("config: template file not found: " + templates_path);
    if (!names_path.empty() && !fs::exists(names_path))
        throw ConfigError("config: names file not found: " + names_path);
    if (out_dir.empty()) throw ConfigError("config: output directory is required");
    if (levels.empty()) throw ConfigError("config: at least one resource level is required");
    for (double level : levels)
        if (level < 0.0 || level > 1.0)
            throw ConfigError("config: resource levels must lie in [0, 1]");
    if (vocab_size < 257) throw ConfigError("config: vocab_size must be at least 257");
    if (backend != "neural" && backend != "ngram")
        throw ConfigError("config: backend must be 'neural' or 'ngram'");
    if (init_mode != "gaussian" && init_mode != "binary_mean")
        throw ConfigError("config: init_mode must be 'gaussian' or 'binary_mean'");
    if (chunk_window < 1) throw ConfigError("config: chunk_window must be positive");
    if (std::find(dets.begin(), dets.end(), std::string()) == dets.end())
        throw ConfigError("config: determiner list must include the empty determiner");
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["corpus"] = corpus_path;
    j["lexicon"] = lexicon_path;
    j["templates"] = templates_path;
    j["names"] = names_path;
    j["out_dir"] = out_dir;
    j["family"] = family;
    j["levels"] = levels;
    j["vocab_size"] = vocab_size;
    j["backend"] = backend;
    j["init_mode"] = init_mode;
    j["chunk_window"] = chunk_window;
    j["seed"] = seed;
    j["length_normalize"] = length_normalize;
    j["dets"] = dets;
    j["lm"] = {{"embed_dim", lm.embed_dim},
               {"context_window", lm.context_window},
               {"hidden_dim", lm.hidden_dim},
               {"epochs", lm.epochs},
               {"batch_size", lm.batch_size},
               {"lr_full", lm.lr_full},
               {"lr_lexical", lm.lr_lexical},
               {"weight_decay", lm.weight_decay},
               {"warmup_ratio", lm.warmup_ratio},
               {"patience", lm.patience},
               {"pretrain_epochs", lm.pretrain_epochs},
               {"pretrain_lr", lm.pretrain_lr},
               {"ngram_order", lm.ngram_order}};
    return j;
}

namespace {

struct SplitSeqs {
    std::vector<std::vector<int>> train;
    std::vector<std::vector<int>> val;
};

SplitSeqs encode_splits(const std::vector<Document>& chunks, const TokenizerModel& tokenizer) {
    SplitSeqs out;
    for (const auto& chunk : chunks) {
        auto ids = tokenizer.encode(chunk.text);
        if (ids.empty()) continue;
        if (chunk.split == "train") out.train.push_back(std::move(ids));
        else if (chunk.split == "val") out.val.push_back(std::move(ids));
    }
    return out;
}

std::string level_dir_name(double level) {
    std::ostringstream os;
    os << "level_" << std::fixed << std::setprecision(2) << level;
    return os.str();
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& config, std::ostream& log) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const PronounLexicon lexicon =
        config.lexicon_path.empty() ? PronounLexicon::bundled() : PronounLexicon::load(config.lexicon_path);
    lexicon.at(config.family);  // must exist
    const std::vector<Template> templates =
        config.templates_path.empty() ? builtin_templates() : load_templates(config.templates_path);
    const std::vector<std::string> names =
        config.names_path.empty() ? builtin_names() : load_names(config.names_path);

    fs::create_directories(config.out_dir);
    const nlohmann::json config_json = config.to_json();
    write_text_file((fs::path(config.out_dir) / "config.json").string(), config_json.dump(2) + "\n");

    log << "[pipeline] loading corpus " << config.corpus_path << "\n";
    const auto raw_docs = read_jsonl(config.corpus_path);
    const auto docs = filter_binary(raw_docs, lexicon);
    log << "[pipeline] " << raw_docs.size() << " documents, " << docs.size()
        << " with binary pronouns\n";
    if (docs.size() < 3) throw std::runtime_error("too few pronoun-bearing documents to proceed");

    std::vector<std::string> corpus_texts;
    corpus_texts.reserve(docs.size());
    for (const auto& d : docs) corpus_texts.push_back(d.text);

    log << "[pipeline] training tokenizer (target vocab " << config.vocab_size << ")\n";
    const TokenizerModel tok_orig = TokenizerModel::train(corpus_texts, config.vocab_size);
    tok_orig.save((fs::path(config.out_dir) / "tokenizer_orig").string());

    auto [tok_ptp, patch] = ameliorate(tok_orig, lexicon.at(config.family));
    patch.save((fs::path(config.out_dir) / "ptp_patch.json").string());
    tok_ptp.save((fs::path(config.out_dir) / "tokenizer_ptp").string());
    log << "[pipeline] PTP added " << patch.added.size() << " tokens ("
        << patch.prior_vocab_size << " -> " << patch.new_vocab_size << ")\n";

    const std::uint64_t split_seed = mix_seed(config.seed, 7);
    const SplitRatios ratios;

    // Families under evaluation: the binary families plus the target family.
    std::vector<std::string> eval_families = lexicon.binary_family_ids();
    eval_families.push_back(config.family);
    const auto instances = render(templates, names, eval_families, lexicon);
    log << "[pipeline] " << instances.size() << " evaluation instances\n";

    EvalOptions eval_options;
    eval_options.length_normalize = config.length_normalize;
    eval_options.dets = config.dets;

    const bool neural = config.backend == "neural";

    // The base model: built from the original corpus only, never shown the
    // augmented data. Serves as the M_Base cell and as the starting point for
    // every finetuning cell.
    NeuralLmConfig base_cfg;
    base_cfg.embed_dim = config.lm.embed_dim;
    base_cfg.context_window = config.lm.context_window;
    base_cfg.hidden_dim = config.lm.hidden_dim;
    base_cfg.seed = mix_seed(config.seed, 1);

    std::unique_ptr<NeuralLm> base_orig;
    std::unique_ptr<NeuralLm> base_ptp;
    std::unique_ptr<NGramLm> ngram_base;

    const auto base_chunks_orig =
        chunk_and_split(docs, tok_orig, static_cast<std::size_t>(config.chunk_window), ratios, split_seed);
    if (neural) {
        const SplitSeqs seqs = encode_splits(base_chunks_orig, tok_orig);
        TrainConfig pt;
        pt.epochs = config.lm.pretrain_epochs;
        pt.batch_size = config.lm.batch_size;
        pt.learning_rate = config.lm.pretrain_lr > 0.0 ? config.lm.pretrain_lr : config.lm.lr_full;
        pt.weight_decay = config.lm.weight_decay;
        pt.warmup_ratio = config.lm.warmup_ratio;
        pt.early_stop_patience = config.lm.patience;
        pt.seed = mix_seed(config.seed, 2);
        base_orig = std::make_unique<NeuralLm>(NeuralLm::init(tok_orig.vocab_size(), base_cfg));
        log << "[pipeline] pretraining base model on the original corpus ("
            << seqs.train.size() << " train chunks)\n";
        const TrainLog tl = base_orig->train(seqs.train, seqs.val, TrainMode::Full, pt);
        log << "[pipeline] base model: " << tl.epochs_run << " epochs, final train loss "
            << (tl.train_loss.empty() ? 0.0 : tl.train_loss.back()) << "\n";
        save_checkpoint(*base_orig, (fs::path(config.out_dir) / "base_model").string());

        base_ptp = std::make_unique<NeuralLm>(*base_orig);
        base_ptp->extend_embeddings(patch, config.init_mode == "binary_mean"
                                               ? EmbeddingInit::BinaryMean
                                               : EmbeddingInit::Gaussian,
                                    lexicon, tok_ptp);
    } else {
        std::vector<std::vector<int>> seqs;
        for (const auto& chunk : base_chunks_orig)
            if (chunk.split == "train") seqs.push_back(tok_orig.encode(chunk.text));
        NGramOptions opts;
        opts.order = config.lm.ngram_order;
        ngram_base = std::make_unique<NGramLm>(NGramLm::train(seqs, tok_orig.vocab_size(), opts));
    }

    PipelineResult result;
    result.all_ok = true;

    auto run_cell = [&](double level, const std::string& cell_name, const TokenizerModel& tok,
                        auto&& make_backend) {
        CellOutcome outcome;
        outcome.level = level;
        outcome.cell = cell_name;
        const fs::path cell_dir = fs::path(config.out_dir) / level_dir_name(level) / cell_name;
        const auto t_cell = std::chrono::steady_clock::now();
        try {
            fs::create_directories(cell_dir);
            const std::unique_ptr<LmBackend> backend = make_backend(cell_dir);
            BackendScorer scorer(tok, *backend);
            const MetricResult metrics = evaluate_all(scorer, instances, lexicon, eval_options);
            nlohmann::json cell_config = config_json;
            cell_config["level"] = level;
            cell_config["cell"] = cell_name;
            const nlohmann::json doc = results_document(cell_config, tok.content_hash(), metrics);
            outcome.results_path = (cell_dir / "results.json").string();
            write_text_file(outcome.results_path, doc.dump(2) + "\n");
            write_text_file((cell_dir / "results.csv").string(), results_csv(metrics));
            outcome.ok = true;
            log << "[pipeline] " << level_dir_name(level) << "/" << cell_name << " done in "
                << std::fixed << std::setprecision(1) << elapsed_s(t_cell) << "s\n";
        } catch (const std::exception& e) {
            outcome.ok = false;
            outcome.error = e.what();
            result.all_ok = false;
            log << "[pipeline] " << level_dir_name(level) << "/" << cell_name
                << " FAILED: " << e.what() << "\n";
        }
        result.cells.push_back(outcome);
    };

    for (std::size_t li = 0; li < config.levels.size(); ++li) {
        const double level = config.levels[li];
        log << "[pipeline] === resource level " << level << " ===\n";
        AugmentationPlan plan;
        plan.resource_level = level;
        plan.target_family = config.family;
        plan.seed = mix_seed(config.seed, 100 + li);
        const auto augmented = augment(docs, plan, lexicon);

        const auto chunks_orig = chunk_and_split(
            augmented, tok_orig, static_cast<std::size_t>(config.chunk_window), ratios, split_seed);
        const auto chunks_ptp = chunk_and_split(
            augmented, tok_ptp, static_cast<std::size_t>(config.chunk_window), ratios, split_seed);

        auto finetune_cell = [&](const std::string& cell_name, const TokenizerModel& tok,
                                 const std::vector<Document>& chunks, TrainMode mode,
                                 std::size_t cell_index) {
            run_cell(level, cell_name, tok, [&](const fs::path& cell_dir) -> std::unique_ptr<LmBackend> {
                if (neural) {
                    const NeuralLm& base = &tok == &tok_ptp ? *base_ptp : *base_orig;
                    auto model = std::make_unique<NeuralLm>(base);
                    const SplitSeqs seqs = encode_splits(chunks, tok);
                    TrainConfig tc;
                    tc.epochs = config.lm.epochs;
                    tc.batch_size = config.lm.batch_size;
                    tc.learning_rate =
                        mode == TrainMode::Lexical ? config.lm.lr_lexical : config.lm.lr_full;
                    tc.weight_decay = config.lm.weight_decay;
                    tc.warmup_ratio = config.lm.warmup_ratio;
                    tc.early_stop_patience = config.lm.patience;
                    tc.seed = mix_seed(config.seed, 1000 + li * 16 + cell_index);
                    model->train(seqs.train, seqs.val, mode, tc);
                    save_checkpoint(*model, (cell_dir / "model").string());
                    return model;
                }
                std::vector<std::vector<int>> seqs;
                for (const auto& chunk : chunks)
                    if (chunk.split == "train") seqs.push_back(tok.encode(chunk.text));
                NGramOptions opts;
                opts.order = config.lm.ngram_order;
                return std::make_unique<NGramLm>(NGramLm::train(seqs, tok.vocab_size(), opts));
            });
        };

        // Baseline: original tokenizer, base model untouched by this level.
        run_cell(level, "T_Orig+M_Base", tok_orig, [&](const fs::path&) -> std::unique_ptr<LmBackend> {
            if (neural) return std::make_unique<NeuralLm>(*base_orig);
            return std::make_unique<NGramLm>(*ngram_base);
        });

        finetune_cell("T_Orig+M_Full", tok_orig, chunks_orig, TrainMode::Full, 1);
        finetune_cell("T_PTP+M_Full", tok_ptp, chunks_ptp, TrainMode::Full, 2);
        if (neural) {
            finetune_cell("T_Orig+M_Lex", tok_orig, chunks_orig, TrainMode::Lexical, 3);
            finetune_cell("T_PTP+M_Lex", tok_ptp, chunks_ptp, TrainMode::Lexical, 4);
        } else {
            for (const char* name : {"T_Orig+M_Lex", "T_PTP+M_Lex"}) {
                CellOutcome skipped;
                skipped.level = level;
                skipped.cell = name;
                skipped.skipped = true;
                skipped.error = "lexical finetuning requires the neural backend";
                result.cells.push_back(skipped);
                log << "[pipeline] " << level_dir_name(level) << "/" << name << " skipped\n";
            }
        }
    }

    nlohmann::json summary;
    summary["config"] = config_json;
    summary["cells"] = nlohmann::json::array();
    for (const auto& c : result.cells) {
        summary["cells"].push_back({{"level", c.level},
                                    {"cell", c.cell},
                                    {"ok", c.ok},
                                    {"skipped", c.skipped},
                                    {"error", c.error},
                                    {"results", c.results_path}});
    }
    result.summary_path = (fs::path(config.out_dir) / "summary.json").string();
    write_text_file(result.summary_path, summary.dump(2) + "\n");

    const auto rows = collect_report_rows(config.out_dir);
    write_text_file((fs::path(config.out_dir) / "summary.csv").string(), report_csv(rows));
    log << "[pipeline] finished in " << std::fixed << std::setprecision(1) << elapsed_s(t_start)
        << "s\n";
    return result;
}

std::vector<ReportRow> collect_report_rows(const std::string& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "results.json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<ReportRow> rows;
    for (const auto& file : files) {
        std::ifstream in(file);
        nlohmann::json doc = nlohmann::json::parse(in);
        const auto& metrics = doc.at("metrics");
        const double level = doc.at("config").value("level", 0.0);
        const std::string cell = doc.at("config").value("cell", std::string("eval"));
        for (const auto& [family, entry] :
             metrics.at("consistency").at("per_family").items()) {
            ReportRow row;
            row.level = level;
            row.cell = cell;
            row.family = family;
            row.consistency = entry.at("value").get<double>();
            row.instances = entry.at("denominator").get<long>();
            row.case_error =
                metrics.at("case_error").at("per_family").at(family).at("value").get<double>();
            row.inject_error =
                metrics.at("inject_error").at("per_family").at(family).at("value").get<double>();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    os << "level,cell,family,consistency,case_error,inject_error,instances\n";
    for (const auto& r : rows) {
        os << r.level << ',' << r.cell << ',' << r.family << ',' << r.consistency << ','
           << r.case_error << ',' << r.inject_error << ',' << r.instances << '\n';
    }
    return os.str();
}

std::string report_correlations(const std::vector<ReportRow>& rows) {
    std::vector<double> consistency, case_err, inject_err;
    for (const auto& r : rows) {
        consistency.push_back(r.consistency);
        case_err.push_back(r.case_error);
        inject_err.push_back(r.inject_error);
    }
    std::ostringstream os;
    auto report_one = [&os, &consistency](const char* name, const std::vector<double>& other) {
        os << "spearman(consistency, " << name << ") = ";
        try {
            os << spearman(consistency, other);
        } catch (const std::exception& e) {
            os << "undefined (" << e.what() << ")";
        }
        os << "\n";
    };
    if (consistency.size() < 2) {
        os << "not enough rows for correlations\n";
        return os.str();
    }
    report_one("case_error", case_err);
    report_one("inject_error", inject_err);
    return os.str();
}

}  // namespace tokparity
