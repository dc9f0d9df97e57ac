#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tokparity {

// Invalid configuration (unresolvable paths, bad ranges). The CLI maps this
// to exit code 1, stage failures to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LmParams {
    int embed_dim = 16;
    int context_window = 32;
    int hidden_dim = 32;
    int epochs = 5;
    int batch_size = 32;
    double lr_full = 1e-4;
    double lr_lexical = 1e-3;
    double weight_decay = 0.01;
    double warmup_ratio = 0.01;
    int patience = 2;
    int pretrain_epochs = 6;
    double pretrain_lr = 0.0;  // 0 falls back to lr_full
    int ngram_order = 3;
};

struct ExperimentConfig {
    std::string corpus_path;
    std::string lexicon_path;    // empty: bundled lexicon
    std::string templates_path;  // empty: builtin templates
    std::string names_path;      // empty: builtin names
    std::string out_dir;
    std::string family = "xe";
    std::vector<double> levels = {0.1};
    std::size_t vocab_size = 768;
    std::string backend = "neural";     // neural | ngram
    std::string init_mode = "gaussian";  // gaussian | binary_mean
    int chunk_window = 256;
    std::uint64_t seed = 1234;
    bool length_normalize = false;
    std::vector<std::string> dets = {"", "the", "a", "this", "these", "those"};
    LmParams lm;

    void validate() const;  // throws ConfigError
    nlohmann::json to_json() const;
};

struct CellOutcome {
    double level = 0.0;
    std::string cell;
    bool ok = false;
    bool skipped = false;
    std::string error;
    std::string results_path;
};

struct PipelineResult {
    std::vector<CellOutcome> cells;
    std::string summary_path;
    bool all_ok = false;
};

// Runs the tokenize -> train -> evaluate grid: per resource level, the
// {T_Orig, T_PTP} x {M_Full, M_Lex} cells plus the T_Orig+M_Base baseline
// (the original-corpus model with no augmented-data training). A failing
// stage aborts its cell, not the grid.
PipelineResult run_pipeline(const ExperimentConfig& config, std::ostream& log);

struct ReportRow {
    double level = 0.0;
    std::string cell;
    std::string family;
    double consistency = 0.0;
    double case_error = 0.0;
    double inject_error = 0.0;
    long instances = 0;
};

// Gathers every results.json below `dir` into flat rows.
std::vector<ReportRow> collect_report_rows(const std::string& dir);
std::string report_csv(const std::vector<ReportRow>& rows);
// Spearman correlation of consistency against each error metric across rows.
std::string report_correlations(const std::vector<ReportRow>& rows);

}  // namespace tokparity
