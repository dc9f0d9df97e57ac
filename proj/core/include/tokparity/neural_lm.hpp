#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tokparity/bpe.hpp"
#include "tokparity/lm.hpp"
#include "tokparity/pronouns.hpp"
#include "tokparity/ptp.hpp"

namespace tokparity {

enum class TrainMode { Full, Lexical };
enum class EmbeddingInit { Gaussian, BinaryMean };

struct NeuralLmConfig {
    int embed_dim = 16;
    int context_window = 8;
    int hidden_dim = 32;
    std::uint64_t seed = 0;
};

struct TrainConfig {
    int epochs = 5;
    int batch_size = 16;
    // 0 selects the per-mode default: 1e-4 for full training, 1e-3 for
    // lexical-only training.
    double learning_rate = 0.0;
    double weight_decay = 0.01;
    double warmup_ratio = 0.01;
    int early_stop_patience = 2;
    std::uint64_t seed = 0;

    double resolved_lr(TrainMode mode) const {
        if (learning_rate > 0.0) return learning_rate;
        return mode == TrainMode::Lexical ? 1e-3 : 1e-4;
    }
};

struct TrainLog {
    std::vector<double> train_loss;  // mean CE per epoch
    std::vector<double> val_loss;    // empty entries when no validation data
    int best_epoch = -1;
    int epochs_run = 0;
    bool early_stopped = false;
};

// Fixed-window feedforward language model: the last `context_window` token
// embeddings are concatenated, passed through one tanh layer, and projected
// to vocabulary logits by an untied output matrix. Contexts shorter than the
// window are left-padded with token id 0. Parameters fall into two groups:
// the embedding table (lexical) and everything else (body + projection);
// lexical-mode training touches only the embedding table.
class NeuralLm final : public LmBackend {
  public:
    // Every parameter is drawn from N(0, 0.02^2), seeded and reproducible.
    static NeuralLm init(std::size_t vocab_size, const NeuralLmConfig& config);

    std::size_t vocab_size() const override { return vocab_size_; }
    std::vector<double> next_dist(std::span<const int> context) const override;

    // Appends rows for a PTP patch. Gaussian mode draws fresh rows; BinaryMean
    // sets each new embedding row to the exact mean of the case-corresponding
    // binary-pronoun token rows (capitalization matched when possible, falling
    // back to the lowercase counterparts, then to gaussian). The output
    // projection always gains gaussian rows. Existing parameters are untouched.
    void extend_embeddings(const PtpPatch& patch, EmbeddingInit init, const PronounLexicon& lexicon,
                           const TokenizerModel& tokenizer);

    TrainLog train(const std::vector<std::vector<int>>& train_seqs,
                   const std::vector<std::vector<int>>& val_seqs, TrainMode mode,
                   const TrainConfig& config);

    // Mean cross-entropy of next-token prediction over the sequences.
    double evaluate(const std::vector<std::vector<int>>& seqs) const;

    const NeuralLmConfig& config() const { return config_; }
    const std::string& last_train_mode() const { return last_train_mode_; }

    // Parameter access (tests, checkpoints, gradient checks).
    std::vector<double>& embeddings() { return embedding_; }
    const std::vector<double>& embeddings() const { return embedding_; }
    std::vector<double>& hidden_weight() { return w1_; }
    const std::vector<double>& hidden_weight() const { return w1_; }
    std::vector<double>& hidden_bias() { return b1_; }
    const std::vector<double>& hidden_bias() const { return b1_; }
    std::vector<double>& output_weight() { return w2_; }
    const std::vector<double>& output_weight() const { return w2_; }
    std::vector<double>& output_bias() { return b2_; }
    const std::vector<double>& output_bias() const { return b2_; }

    struct Gradients {
        std::vector<double> embedding, w1, b1, w2, b2;
    };

    // Mean cross-entropy over (context, target) examples and its analytic
    // gradient; the finite-difference harness drives both. embeddings_only
    // skips the body/projection gradient accumulation.
    double loss(const std::vector<std::pair<std::vector<int>, int>>& batch) const;
    double loss_and_grad(const std::vector<std::pair<std::vector<int>, int>>& batch,
                         Gradients& grads, bool embeddings_only = false) const;

    // Builds the (window, target) example list for a token sequence.
    std::vector<std::pair<std::vector<int>, int>> make_examples(
        const std::vector<std::vector<int>>& seqs) const;

    friend NeuralLm load_checkpoint(const std::string& base_path);
    friend void save_checkpoint(const NeuralLm& lm, const std::string& base_path);

  private:
    NeuralLm() = default;

    void forward(std::span<const int> window, std::vector<double>& hidden,
                 std::vector<double>& probs) const;
    std::vector<int> padded_window(std::span<const int> context) const;

    std::size_t vocab_size_ = 0;
    NeuralLmConfig config_;
    std::string last_train_mode_ = "none";
    std::vector<double> embedding_;  // vocab x d
    std::vector<double> w1_;         // hidden x (window * d)
    std::vector<double> b1_;         // hidden
    std::vector<double> w2_;         // vocab x hidden
    std::vector<double> b2_;         // vocab
};

// Flat little-endian float32 checkpoint (base_path + ".bin") with a JSON
// sidecar (base_path + ".json") describing shapes, vocab size, seed and the
// last training mode.
void save_checkpoint(const NeuralLm& lm, const std::string& base_path);
NeuralLm load_checkpoint(const std::string& base_path);

}  // namespace tokparity
