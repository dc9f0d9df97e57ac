// tokparity: tokenization parity toolkit CLI.
//
// Stages compose through the filesystem: every subcommand reads and writes
// plain files (JSONL corpora, tokenizer directories, checkpoints, results
// JSON), so a pipeline run can be reproduced step by step by hand.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "tokparity/corpus.hpp"
#include "tokparity/diagnostics.hpp"
#include "tokparity/metrics.hpp"
#include "tokparity/neural_lm.hpp"
#include "tokparity/ngram_lm.hpp"
#include "tokparity/pipeline.hpp"
#include "tokparity/ptp.hpp"
#include "tokparity/remote_scorer.hpp"
#include "tokparity/results.hpp"

namespace fs = std::filesystem;
using namespace tokparity;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitStageFailure = 2;

PronounLexicon lexicon_from(const std::string& path) {
    return path.empty() ? PronounLexicon::bundled() : PronounLexicon::load(path);
}

void require_exists(const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string("missing required path: ") + what);
    if (!fs::exists(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

struct EvalCli {
    std::string tokenizer_dir;
    std::string lexicon_path;
    std::string templates_path;
    std::string names_path;
    std::vector<std::string> families = {"he", "she", "xe"};
    std::string backend = "neural";
    std::string model_base;
    std::string train_corpus;
    int ngram_order = 3;
    std::string endpoint;
    std::string cache_dir;
    std::string out_json;
    std::string out_csv;
    std::vector<std::string> dets = {"", "the", "a", "this", "these", "those"};
    bool length_normalize = false;
    int decl_forms = 4;
};

int run_eval(const EvalCli& cli) {
    require_exists(cli.tokenizer_dir, "tokenizer directory");
    const TokenizerModel tokenizer = TokenizerModel::load(cli.tokenizer_dir);
    const PronounLexicon lexicon = lexicon_from(cli.lexicon_path);
    const auto templates =
        cli.templates_path.empty() ? builtin_templates() : load_templates(cli.templates_path);
    const auto names = cli.names_path.empty() ? builtin_names() : load_names(cli.names_path);
    const auto style =
        cli.decl_forms == 5 ? DeclarationStyle::FiveForm : DeclarationStyle::FourForm;
    const auto instances = render(templates, names, cli.families, lexicon, style);

    EvalOptions options;
    options.length_normalize = cli.length_normalize;
    options.dets = cli.dets;

    std::unique_ptr<LmBackend> backend;
    std::unique_ptr<CandidateScorer> scorer;
    if (cli.backend == "neural") {
        if (cli.model_base.empty()) throw ConfigError("--model is required for the neural backend");
        backend = std::make_unique<NeuralLm>(load_checkpoint(cli.model_base));
        if (backend->vocab_size() != tokenizer.vocab_size())
            throw ConfigError("checkpoint vocab size does not match the tokenizer");
        scorer = std::make_unique<BackendScorer>(tokenizer, *backend);
    } else if (cli.backend == "ngram") {
        require_exists(cli.train_corpus, "--train-corpus");
        const auto chunks = read_jsonl(cli.train_corpus);
        std::vector<std::vector<int>> seqs;
        for (const auto& chunk : chunks)
            if (chunk.split.empty() || chunk.split == "train")
                seqs.push_back(tokenizer.encode(chunk.text));
        NGramOptions opts;
        opts.order = cli.ngram_order;
        backend = std::make_unique<NGramLm>(NGramLm::train(seqs, tokenizer.vocab_size(), opts));
        scorer = std::make_unique<BackendScorer>(tokenizer, *backend);
    } else if (cli.backend == "remote") {
        if (cli.endpoint.empty()) throw ConfigError("--endpoint is required for the remote backend");
        RemoteOptions ropts;
        ropts.cache_dir = cli.cache_dir;
        scorer = std::make_unique<RemoteScorer>(cli.endpoint, ropts);
    } else {
        throw ConfigError("unknown backend: " + cli.backend);
    }

    const MetricResult metrics = evaluate_all(*scorer, instances, lexicon, options);

    nlohmann::json config;
    config["tokenizer"] = cli.tokenizer_dir;
    config["backend"] = cli.backend;
    config["model"] = cli.model_base;
    config["families"] = cli.families;
    config["templates"] = cli.templates_path;
    config["names"] = cli.names_path;
    config["dets"] = cli.dets;
    config["length_normalize"] = cli.length_normalize;
    config["decl_forms"] = cli.decl_forms;

    const nlohmann::json doc = results_document(config, tokenizer.content_hash(), metrics);
    if (!cli.out_json.empty()) write_text_file(cli.out_json, doc.dump(2) + "\n");
    const std::string csv = results_csv(metrics);
    if (!cli.out_csv.empty()) write_text_file(cli.out_csv, csv);
    std::cout << csv;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tokenization parity toolkit"};
    app.require_subcommand(1);

    // ---- train-bpe -----------------------------------------------------------
    auto* train_bpe = app.add_subcommand("train-bpe", "train a byte-level BPE tokenizer");
    std::string tb_corpus, tb_out;
    std::size_t tb_vocab = 768;
    train_bpe->add_option("--corpus", tb_corpus, "JSONL corpus ({id, text} per line)")->required();
    train_bpe->add_option("--vocab-size", tb_vocab, "target vocabulary size (>= 257)");
    train_bpe->add_option("--out", tb_out, "output tokenizer directory")->required();

    // ---- ptp -----------------------------------------------------------------
    auto* ptp_cmd = app.add_subcommand("ptp", "pronoun tokenization parity");
    ptp_cmd->require_subcommand(1);
    std::string ptp_tok, ptp_family = "xe", ptp_lexicon, ptp_out, ptp_patch;
    bool ptp_unmarked = false, ptp_json = false;
    auto* ptp_apply = ptp_cmd->add_subcommand("apply", "add whole-word tokens for a family");
    ptp_apply->add_option("--tokenizer", ptp_tok, "tokenizer directory")->required();
    ptp_apply->add_option("--family", ptp_family, "pronoun family id");
    ptp_apply->add_option("--lexicon", ptp_lexicon, "lexicon JSON (default: bundled)");
    ptp_apply->add_option("--out", ptp_out, "output tokenizer directory")->required();
    ptp_apply->add_option("--patch", ptp_patch, "patch JSON output path");
    ptp_apply->add_flag("--unmarked", ptp_unmarked, "also add marker-free variants");
    auto* ptp_verify = ptp_cmd->add_subcommand("verify", "check single-token parity for a family");
    ptp_verify->add_option("--tokenizer", ptp_tok, "tokenizer directory")->required();
    ptp_verify->add_option("--family", ptp_family, "pronoun family id");
    ptp_verify->add_option("--lexicon", ptp_lexicon, "lexicon JSON (default: bundled)");
    ptp_verify->add_flag("--json", ptp_json, "emit the report as JSON");

    // ---- augment ---------------------------------------------------------------
    auto* aug_cmd = app.add_subcommand("augment", "counterfactual pronoun augmentation");
    std::string ag_corpus, ag_out, ag_family = "xe", ag_lexicon, ag_tokenizer;
    double ag_level = 0.1;
    std::uint64_t ag_seed = 0;
    bool ag_no_filter = false;
    int ag_chunk = 0;
    std::uint64_t ag_split_seed = 0;
    aug_cmd->add_option("--corpus", ag_corpus, "JSONL corpus")->required();
    aug_cmd->add_option("--out", ag_out, "output JSONL")->required();
    aug_cmd->add_option("--level", ag_level, "resource level in [0, 1]");
    aug_cmd->add_option("--family", ag_family, "target pronoun family");
    aug_cmd->add_option("--lexicon", ag_lexicon, "lexicon JSON (default: bundled)");
    aug_cmd->add_option("--seed", ag_seed, "selection seed");
    aug_cmd->add_flag("--no-filter", ag_no_filter, "skip the binary-pronoun document filter");
    aug_cmd->add_option("--chunk", ag_chunk,
                        "chunk window in tokens; enables train/val/test splitting");
    aug_cmd->add_option("--tokenizer", ag_tokenizer, "tokenizer directory (required with --chunk)");
    aug_cmd->add_option("--split-seed", ag_split_seed, "split assignment seed (default: --seed)");

    // ---- fertility -------------------------------------------------------------
    auto* fert_cmd = app.add_subcommand("fertility", "subword fertility and parity report");
    std::string ft_tok, ft_words, ft_lexicon, ft_json;
    bool ft_no_space = false;
    fert_cmd->add_option("--tokenizer", ft_tok, "tokenizer directory")->required();
    fert_cmd->add_option("--words", ft_words, "word list file (one per line)");
    fert_cmd->add_option("--lexicon", ft_lexicon, "lexicon JSON (default: bundled)");
    fert_cmd->add_option("--json", ft_json, "write the report as JSON to this path");
    fert_cmd->add_flag("--no-space-prefix", ft_no_space, "measure without the leading space");

    // ---- train-lm ----------------------------------------------------------------
    auto* tl_cmd = app.add_subcommand("train-lm", "train the neural scoring backend");
    std::string tl_tok, tl_corpus, tl_out, tl_mode = "full", tl_init_from, tl_patch,
                tl_init_mode = "gaussian", tl_lexicon, tl_save_init;
    NeuralLmConfig tl_model_cfg;
    tl_model_cfg.context_window = 32;
    TrainConfig tl_train_cfg;
    tl_cmd->add_option("--tokenizer", tl_tok, "tokenizer directory")->required();
    tl_cmd->add_option("--corpus", tl_corpus, "chunked JSONL with split fields")->required();
    tl_cmd->add_option("--out", tl_out, "checkpoint base path (writes .bin/.json)")->required();
    tl_cmd->add_option("--mode", tl_mode, "full | lexical");
    tl_cmd->add_option("--init-from", tl_init_from, "checkpoint base path to start from");
    tl_cmd->add_option("--patch", tl_patch, "PTP patch JSON to extend embeddings with");
    tl_cmd->add_option("--init-mode", tl_init_mode, "gaussian | binary_mean (with --patch)");
    tl_cmd->add_option("--lexicon", tl_lexicon, "lexicon JSON (default: bundled)");
    tl_cmd->add_option("--save-init", tl_save_init, "write the pre-training checkpoint here");
    tl_cmd->add_option("--embed-dim", tl_model_cfg.embed_dim, "embedding dimension");
    tl_cmd->add_option("--window", tl_model_cfg.context_window, "context window");
    tl_cmd->add_option("--hidden-dim", tl_model_cfg.hidden_dim, "hidden layer width");
    tl_cmd->add_option("--epochs", tl_train_cfg.epochs, "training epochs");
    tl_cmd->add_option("--batch-size", tl_train_cfg.batch_size, "batch size");
    tl_cmd->add_option("--lr", tl_train_cfg.learning_rate,
                       "learning rate (0: per-mode default)");
    tl_cmd->add_option("--weight-decay", tl_train_cfg.weight_decay, "weight decay");
    tl_cmd->add_option("--warmup-ratio", tl_train_cfg.warmup_ratio, "linear warmup ratio");
    tl_cmd->add_option("--patience", tl_train_cfg.early_stop_patience, "early stop patience");
    std::uint64_t tl_seed = 0;
    tl_cmd->add_option("--seed", tl_seed, "init and shuffle seed");

    // ---- eval ---------------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "run the misgendering evaluation harness");
    EvalCli ev;
    eval_cmd->add_option("--tokenizer", ev.tokenizer_dir, "tokenizer directory")->required();
    eval_cmd->add_option("--lexicon", ev.lexicon_path, "lexicon JSON (default: bundled)");
    eval_cmd->add_option("--templates", ev.templates_path, "template JSONL (default: builtin)");
    eval_cmd->add_option("--names", ev.names_path, "names file (default: builtin)");
    eval_cmd->add_option("--families", ev.families, "family ids under evaluation");
    eval_cmd->add_option("--backend", ev.backend, "neural | ngram | remote");
    eval_cmd->add_option("--model", ev.model_base, "checkpoint base path (neural)");
    eval_cmd->add_option("--train-corpus", ev.train_corpus, "chunked JSONL (ngram)");
    eval_cmd->add_option("--order", ev.ngram_order, "n-gram order");
    eval_cmd->add_option("--endpoint", ev.endpoint, "http endpoint (remote)");
    eval_cmd->add_option("--cache-dir", ev.cache_dir, "response cache directory (remote)");
    eval_cmd->add_option("--out", ev.out_json, "results JSON path");
    eval_cmd->add_option("--csv", ev.out_csv, "summary CSV path");
    eval_cmd->add_option("--dets", ev.dets, "determiner variants (include the empty string)");
    eval_cmd->add_flag("--length-normalize", ev.length_normalize,
                       "normalize candidate scores by token count");
    eval_cmd->add_option("--decl-forms", ev.decl_forms, "declaration style: 4 or 5 forms");

    // ---- pipeline -------------------------------------------------------------------
    auto* pipe_cmd = app.add_subcommand("pipeline", "run the full experiment grid");
    pipe_cmd->set_config("--config", "", "TOML-style key=value configuration file");
    ExperimentConfig pc;
    pipe_cmd->add_option("--corpus", pc.corpus_path, "JSONL corpus");
    pipe_cmd->add_option("--lexicon", pc.lexicon_path, "lexicon JSON (default: bundled)");
    pipe_cmd->add_option("--templates", pc.templates_path, "template JSONL (default: builtin)");
    pipe_cmd->add_option("--names", pc.names_path, "names file (default: builtin)");
    pipe_cmd->add_option("--out", pc.out_dir, "output directory");
    pipe_cmd->add_option("--family", pc.family, "target pronoun family");
    pipe_cmd->add_option("--levels", pc.levels, "resource levels");
    pipe_cmd->add_option("--vocab-size", pc.vocab_size, "tokenizer vocabulary size");
    pipe_cmd->add_option("--backend", pc.backend, "neural | ngram");
    pipe_cmd->add_option("--init-mode", pc.init_mode, "gaussian | binary_mean");
    pipe_cmd->add_option("--chunk-window", pc.chunk_window, "chunk window in tokens");
    pipe_cmd->add_option("--seed", pc.seed, "master seed");
    pipe_cmd->add_flag("--length-normalize", pc.length_normalize,
                       "normalize candidate scores by token count");
    pipe_cmd->add_option("--dets", pc.dets, "determiner variants");
    pipe_cmd->add_option("--lm.embed-dim", pc.lm.embed_dim, "embedding dimension");
    pipe_cmd->add_option("--lm.context-window", pc.lm.context_window, "context window");
    pipe_cmd->add_option("--lm.hidden-dim", pc.lm.hidden_dim, "hidden width");
    pipe_cmd->add_option("--lm.epochs", pc.lm.epochs, "finetuning epochs");
    pipe_cmd->add_option("--lm.batch-size", pc.lm.batch_size, "batch size");
    pipe_cmd->add_option("--lm.lr-full", pc.lm.lr_full, "full finetuning learning rate");
    pipe_cmd->add_option("--lm.lr-lexical", pc.lm.lr_lexical, "lexical finetuning learning rate");
    pipe_cmd->add_option("--lm.weight-decay", pc.lm.weight_decay, "weight decay");
    pipe_cmd->add_option("--lm.warmup-ratio", pc.lm.warmup_ratio, "warmup ratio");
    pipe_cmd->add_option("--lm.patience", pc.lm.patience, "early stop patience");
    pipe_cmd->add_option("--lm.pretrain-epochs", pc.lm.pretrain_epochs, "base model epochs");
    pipe_cmd->add_option("--lm.pretrain-lr", pc.lm.pretrain_lr, "base model learning rate");
    pipe_cmd->add_option("--lm.ngram-order", pc.lm.ngram_order, "n-gram order (ngram backend)");

    // ---- report ------------------------------------------------------------------------
    auto* rep_cmd = app.add_subcommand("report", "aggregate grid results into CSV");
    std::string rp_dir, rp_out;
    bool rp_corr = false;
    rep_cmd->add_option("--results", rp_dir, "directory containing results.json files")->required();
    rep_cmd->add_option("--out", rp_out, "CSV output path");
    rep_cmd->add_flag("--correlations", rp_corr, "print spearman correlations across rows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (*train_bpe) {
            require_exists(tb_corpus, "corpus");
            const auto docs = read_jsonl(tb_corpus);
            std::vector<std::string> texts;
            texts.reserve(docs.size());
            for (const auto& d : docs) texts.push_back(d.text);
            const TokenizerModel model = TokenizerModel::train(texts, tb_vocab);
            model.save(tb_out);
            std::cerr << "trained tokenizer: vocab " << model.vocab_size() << ", "
                      << model.merges().size() << " merges -> " << tb_out << "\n";
            return kExitOk;
        }
        if (*ptp_cmd) {
            require_exists(ptp_tok, "tokenizer directory");
            const PronounLexicon lexicon = lexicon_from(ptp_lexicon);
            const PronounFamily& family = lexicon.at(ptp_family);
            TokenizerModel model = TokenizerModel::load(ptp_tok);
            if (*ptp_apply) {
                AmeliorateOptions options;
                options.add_unmarked_variants = ptp_unmarked;
                auto [patched, patch] = ameliorate(std::move(model), family, options);
                patched.save(ptp_out);
                if (!ptp_patch.empty()) patch.save(ptp_patch);
                std::cerr << "added " << patch.added.size() << " tokens (" << patch.prior_vocab_size
                          << " -> " << patch.new_vocab_size << ") -> " << ptp_out << "\n";
                const VerificationReport report = verify(patched, family);
                std::cout << report.table();
                return report.pass ? kExitOk : kExitStageFailure;
            }
            const VerificationReport report = verify(model, family);
            std::cout << (ptp_json ? report.to_json_text() : report.table());
            return report.pass ? kExitOk : kExitStageFailure;
        }
        if (*aug_cmd) {
            require_exists(ag_corpus, "corpus");
            const PronounLexicon lexicon = lexicon_from(ag_lexicon);
            auto docs = read_jsonl(ag_corpus);
            if (!ag_no_filter) docs = filter_binary(docs, lexicon);
            AugmentationPlan plan;
            plan.resource_level = ag_level;
            plan.target_family = ag_family;
            plan.seed = ag_seed;
            AugmentStats stats;
            auto augmented = augment(docs, plan, lexicon, {}, &stats);
            if (ag_chunk > 0) {
                require_exists(ag_tokenizer, "--tokenizer");
                const TokenizerModel tokenizer = TokenizerModel::load(ag_tokenizer);
                augmented = chunk_and_split(augmented, tokenizer,
                                            static_cast<std::size_t>(ag_chunk), SplitRatios{},
                                            ag_split_seed != 0 ? ag_split_seed : ag_seed);
            }
            write_jsonl(ag_out, augmented);
            std::cerr << "rewrote " << stats.selected_docs << "/" << docs.size() << " documents, "
                      << stats.replaced_occurrences << " pronouns (" << stats.low_confidence
                      << " low-confidence) -> " << ag_out << "\n";
            return kExitOk;
        }
        if (*fert_cmd) {
            require_exists(ft_tok, "tokenizer directory");
            const TokenizerModel model = TokenizerModel::load(ft_tok);
            if (!ft_words.empty()) {
                const auto words = load_names(ft_words);  // same one-per-line format
                const FertilityReport report = fertility(model, words, !ft_no_space);
                if (!ft_json.empty()) write_text_file(ft_json, report.to_json_text());
                std::cout << report.table();
            } else {
                const PronounLexicon lexicon = lexicon_from(ft_lexicon);
                const ParityReport report = parity_report(model, lexicon);
                if (!ft_json.empty()) write_text_file(ft_json, report.to_json_text());
                std::cout << report.table();
            }
            return kExitOk;
        }
        if (*tl_cmd) {
            require_exists(tl_tok, "tokenizer directory");
            require_exists(tl_corpus, "corpus");
            if (tl_mode != "full" && tl_mode != "lexical")
                throw ConfigError("--mode must be 'full' or 'lexical'");
            const TokenizerModel tokenizer = TokenizerModel::load(tl_tok);
            NeuralLm model = [&] {
                if (!tl_init_from.empty()) return load_checkpoint(tl_init_from);
                tl_model_cfg.seed = tl_seed;
                return NeuralLm::init(tokenizer.vocab_size(), tl_model_cfg);
            }();
            if (!tl_patch.empty()) {
                const PtpPatch patch = PtpPatch::load(tl_patch);
                const PronounLexicon lexicon = lexicon_from(tl_lexicon);
                model.extend_embeddings(patch,
                                        tl_init_mode == "binary_mean" ? EmbeddingInit::BinaryMean
                                                                      : EmbeddingInit::Gaussian,
                                        lexicon, tokenizer);
            }
            if (model.vocab_size() != tokenizer.vocab_size())
                throw ConfigError("model vocab size does not match the tokenizer (patch missing?)");
            if (!tl_save_init.empty()) save_checkpoint(model, tl_save_init);
            const auto chunks = read_jsonl(tl_corpus);
            std::vector<std::vector<int>> train_seqs, val_seqs;
            for (const auto& chunk : chunks) {
                if (chunk.split == "val") val_seqs.push_back(tokenizer.encode(chunk.text));
                else if (chunk.split.empty() || chunk.split == "train")
                    train_seqs.push_back(tokenizer.encode(chunk.text));
            }
            tl_train_cfg.seed = tl_seed;
            const TrainLog log = model.train(
                train_seqs, val_seqs, tl_mode == "lexical" ? TrainMode::Lexical : TrainMode::Full,
                tl_train_cfg);
            save_checkpoint(model, tl_out);
            std::cerr << "trained " << log.epochs_run << " epochs";
            if (!log.train_loss.empty()) std::cerr << ", final train loss " << log.train_loss.back();
            if (!log.val_loss.empty())
                std::cerr << ", best val loss " << log.val_loss[static_cast<std::size_t>(
                                 std::max(log.best_epoch, 0))];
            std::cerr << " -> " << tl_out << ".bin\n";
            return kExitOk;
        }
        if (*eval_cmd) return run_eval(ev);
        if (*pipe_cmd) {
            const PipelineResult result = run_pipeline(pc, std::cerr);
            std::cout << report_csv(collect_report_rows(pc.out_dir));
            return result.all_ok ? kExitOk : kExitStageFailure;
        }
        if (*rep_cmd) {
            require_exists(rp_dir, "results directory");
            const auto rows = collect_report_rows(rp_dir);
            const std::string csv = report_csv(rows);
            if (!rp_out.empty()) write_text_file(rp_out, csv);
            std::cout << csv;
            if (rp_corr) std::cout << report_correlations(rows);
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStageFailure;
    }
    return kExitOk;
}
