#include "tokparity/neural_lm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "tokparity/rng.hpp"

namespace tokparity {

namespace {

constexpr double kInitStddev = 0.02;

void fill_gaussian(std::vector<double>& v, GaussianSampler& g) {
    for (double& x : v) x = g.sample(0.0, kInitStddev);
}

}  // namespace

NeuralLm NeuralLm::init(std::size_t vocab_size, const NeuralLmConfig& config) {
    if (vocab_size == 0) throw std::invalid_argument("vocab_size must be positive");
    if (config.embed_dim < 1 || config.context_window < 1 || config.hidden_dim < 1)
        throw std::invalid_argument("embed_dim, context_window and hidden_dim must be positive");
    NeuralLm lm;
    lm.vocab_size_ = vocab_size;
    lm.config_ = config;
    const auto v = vocab_size;
    const auto d = static_cast<std::size_t>(config.embed_dim);
    const auto w = static_cast<std::size_t>(config.context_window);
    const auto h = static_cast<std::size_t>(config.hidden_dim);
    lm.embedding_.resize(v * d);
    lm.w1_.resize(h * w * d);
    lm.b1_.resize(h);
    lm.w2_.resize(v * h);
    lm.b2_.resize(v);
    GaussianSampler g(config.seed);
    fill_gaussian(lm.embedding_, g);
    fill_gaussian(lm.w1_, g);
    fill_gaussian(lm.b1_, g);
    fill_gaussian(lm.w2_, g);
    fill_gaussian(lm.b2_, g);
    return lm;
}

std::vector<int> NeuralLm::padded_window(std::span<const int> context) const {
    const auto w = static_cast<std::size_t>(config_.context_window);
    std::vector<int> window(w, 0);
    const std::size_t take = std::min(context.size(), w);
    for (std::size_t i = 0; i < take; ++i) window[w - take + i] = context[context.size() - take + i];
    return window;
}

void NeuralLm::forward(std::span<const int> window, std::vector<double>& hidden,
                       std::vector<double>& probs) const {
    const auto d = static_cast<std::size_t>(config_.embed_dim);
    const auto w = static_cast<std::size_t>(config_.context_window);
    const auto h = static_cast<std::size_t>(config_.hidden_dim);
    const std::size_t in_dim = w * d;

    hidden.assign(h, 0.0);
    for (std::size_t j = 0; j < h; ++j) {
        const double* row = w1_.data() + j * in_dim;
        double acc = b1_[j];
        for (std::size_t p = 0; p < w; ++p) {
            const double* emb = embedding_.data() + static_cast<std::size_t>(window[p]) * d;
            const double* wrow = row + p * d;
            for (std::size_t k = 0; k < d; ++k) acc += wrow[k] * emb[k];
        }
        hidden[j] = std::tanh(acc);
    }

    probs.assign(vocab_size_, 0.0);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < vocab_size_; ++t) {
        const double* row = w2_.data() + t * h;
        double acc = b2_[t];
        for (std::size_t j = 0; j < h; ++j) acc += row[j] * hidden[j];
        probs[t] = acc;
        max_logit = std::max(max_logit, acc);
    }
    double z = 0.0;
    for (double& p : probs) {
        p = std::exp(p - max_logit);
        z += p;
    }
    for (double& p : probs) p /= z;
}

std::vector<double> NeuralLm::next_dist(std::span<const int> context) const {
    for (int id : context)
        if (id < 0 || static_cast<std::size_t>(id) >= vocab_size_)
            throw std::out_of_range("context token id out of range");
    const auto window = padded_window(context);
    std::vector<double> hidden, probs;
    forward(window, hidden, probs);
    return probs;
}

void NeuralLm::extend_embeddings(const PtpPatch& patch, EmbeddingInit init,
                                 const PronounLexicon& lexicon, const TokenizerModel& tokenizer) {
    if (patch.prior_vocab_size != vocab_size_)
        throw std::invalid_argument("patch prior size does not match the model vocabulary");
    if (patch.new_vocab_size != vocab_size_ + patch.added.size())
        throw std::invalid_argument("patch size bookkeeping is inconsistent");
    for (std::size_t i = 0; i < patch.added.size(); ++i) {
        if (patch.added[i].second != static_cast<int>(vocab_size_ + i))
            throw std::invalid_argument("patch ids must be contiguous at the current vocab size");
    }

    const PronounFamily& family = lexicon.at(patch.family_id);
    const auto d = static_cast<std::size_t>(config_.embed_dim);
    const auto h = static_cast<std::size_t>(config_.hidden_dim);
    const std::string& marker = tokenizer.space_marker();

    GaussianSampler g(mix_seed(config_.seed, 0xE7E4D) ^ vocab_size_);

    // Rows of the two binary families' tokens for one case, capitalization
    // matched when those tokens exist as single vocabulary entries.
    auto binary_counterpart_rows = [&](PronounCase c, bool capitalized)
        -> std::vector<const double*> {
        std::vector<const double*> rows;
        for (const auto& fid : lexicon.binary_family_ids()) {
            const PronounFamily& bf = lexicon.at(fid);
            for (bool cap : {capitalized, false}) {
                const std::string units = bytecodec::to_units(" " + bf.form(c, cap));
                if (auto id = tokenizer.token_id(units)) {
                    rows.push_back(embedding_.data() + static_cast<std::size_t>(*id) * d);
                    break;
                }
                if (!capitalized) break;  // lowercase probe already failed
            }
        }
        return rows;
    };

    for (const auto& [token_units, id] : patch.added) {
        (void)id;
        std::vector<double> row(d);
        bool gaussian_row = init == EmbeddingInit::Gaussian;
        if (init == EmbeddingInit::BinaryMean) {
            std::string surface = bytecodec::to_bytes(token_units);
            if (surface.rfind(' ', 0) == 0) surface.erase(0, 1);
            const bool capitalized =
                !surface.empty() && std::isupper(static_cast<unsigned char>(surface[0])) != 0;
            std::string lowered = surface;
            std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char ch) {
                return static_cast<char>(std::tolower(ch));
            });
            PronounCase pcase = PronounCase::Nominative;
            bool found = false;
            for (PronounCase c : kAllCases) {
                if (family.form(c) == lowered) {
                    pcase = c;
                    found = true;
                    break;
                }
            }
            const auto rows = found ? binary_counterpart_rows(pcase, capitalized)
                                    : std::vector<const double*>{};
            if (!rows.empty()) {
                for (std::size_t k = 0; k < d; ++k) {
                    double acc = 0.0;
                    for (const double* r : rows) acc += r[k];
                    row[k] = acc / static_cast<double>(rows.size());
                }
            } else {
                gaussian_row = true;  // no counterpart rows available
            }
        }
        if (gaussian_row)
            for (double& x : row) x = g.sample(0.0, kInitStddev);
        embedding_.insert(embedding_.end(), row.begin(), row.end());

        for (std::size_t j = 0; j < h; ++j) w2_.push_back(g.sample(0.0, kInitStddev));
        b2_.push_back(g.sample(0.0, kInitStddev));
        ++vocab_size_;
    }
    (void)marker;
}

std::vector<std::pair<std::vector<int>, int>> NeuralLm::make_examples(
    const std::vector<std::vector<int>>& seqs) const {
    std::vector<std::pair<std::vector<int>, int>> examples;
    for (const auto& seq : seqs) {
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (seq[i] < 0 || static_cast<std::size_t>(seq[i]) >= vocab_size_)
                throw std::out_of_range("training token id out of range");
            examples.emplace_back(padded_window(std::span<const int>(seq.data(), i)), seq[i]);
        }
    }
    return examples;
}

double NeuralLm::loss(const std::vector<std::pair<std::vector<int>, int>>& batch) const {
    if (batch.empty()) throw std::invalid_argument("loss over an empty batch");
    std::vector<double> hidden, probs;
    double total = 0.0;
    for (const auto& [window, target] : batch) {
        forward(window, hidden, probs);
        total -= std::log(probs[static_cast<std::size_t>(target)]);
    }
    return total / static_cast<double>(batch.size());
}

double NeuralLm::loss_and_grad(const std::vector<std::pair<std::vector<int>, int>>& batch,
                               Gradients& grads, bool embeddings_only) const {
    if (batch.empty()) throw std::invalid_argument("gradient over an empty batch");
    const auto d = static_cast<std::size_t>(config_.embed_dim);
    const auto w = static_cast<std::size_t>(config_.context_window);
    const auto h = static_cast<std::size_t>(config_.hidden_dim);
    const std::size_t in_dim = w * d;

    grads.embedding.assign(embedding_.size(), 0.0);
    if (embeddings_only) {
        grads.w1.clear();
        grads.b1.clear();
        grads.w2.clear();
        grads.b2.clear();
    } else {
        grads.w1.assign(w1_.size(), 0.0);
        grads.b1.assign(b1_.size(), 0.0);
        grads.w2.assign(w2_.size(), 0.0);
        grads.b2.assign(b2_.size(), 0.0);
    }

    std::vector<double> hidden, probs, dlogits, dhidden, dx;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;

    for (const auto& [window, target] : batch) {
        forward(window, hidden, probs);
        total -= std::log(probs[static_cast<std::size_t>(target)]);

        dlogits = probs;
        dlogits[static_cast<std::size_t>(target)] -= 1.0;

        // output projection
        dhidden.assign(h, 0.0);
        for (std::size_t t = 0; t < vocab_size_; ++t) {
            const double dl = dlogits[t];
            if (dl == 0.0) continue;
            const double* row = w2_.data() + t * h;
            for (std::size_t j = 0; j < h; ++j) dhidden[j] += dl * row[j];
            if (!embeddings_only) {
                const double g = dl * inv_n;
                double* gw2 = grads.w2.data() + t * h;
                for (std::size_t j = 0; j < h; ++j) gw2[j] += g * hidden[j];
                grads.b2[t] += g;
            }
        }

        // tanh body
        dx.assign(in_dim, 0.0);
        for (std::size_t j = 0; j < h; ++j) {
            const double da = dhidden[j] * (1.0 - hidden[j] * hidden[j]);
            if (da == 0.0) continue;
            const double* row = w1_.data() + j * in_dim;
            if (!embeddings_only) {
                grads.b1[j] += da * inv_n;
                double* gw1 = grads.w1.data() + j * in_dim;
                const double ga = da * inv_n;
                for (std::size_t p = 0; p < w; ++p) {
                    const double* emb = embedding_.data() + static_cast<std::size_t>(window[p]) * d;
                    double* gslice = gw1 + p * d;
                    const double* wslice = row + p * d;
                    double* dxslice = dx.data() + p * d;
                    for (std::size_t k = 0; k < d; ++k) {
                        gslice[k] += ga * emb[k];
                        dxslice[k] += da * wslice[k];
                    }
                }
            } else {
                for (std::size_t p = 0; p < w; ++p) {
                    const double* wslice = row + p * d;
                    double* dxslice = dx.data() + p * d;
                    for (std::size_t k = 0; k < d; ++k) dxslice[k] += da * wslice[k];
                }
            }
        }

        // embedding table
        for (std::size_t p = 0; p < w; ++p) {
            double* gemb = grads.embedding.data() + static_cast<std::size_t>(window[p]) * d;
            const double* dxslice = dx.data() + p * d;
            for (std::size_t k = 0; k < d; ++k) gemb[k] += dxslice[k] * inv_n;
        }
    }
    return total * inv_n;
}

TrainLog NeuralLm::train(const std::vector<std::vector<int>>& train_seqs,
                         const std::vector<std::vector<int>>& val_seqs, TrainMode mode,
                         const TrainConfig& config) {
    if (config.epochs < 1) throw std::invalid_argument("epochs must be positive");
    if (config.batch_size < 1) throw std::invalid_argument("batch_size must be positive");
    if (config.weight_decay < 0.0) throw std::invalid_argument("weight_decay must be non-negative");
    if (config.warmup_ratio < 0.0 || config.warmup_ratio > 1.0)
        throw std::invalid_argument("warmup_ratio must lie in [0, 1]");

    auto examples = make_examples(train_seqs);
    if (examples.empty()) throw std::invalid_argument("training corpus is empty");
    const auto val_examples = make_examples(val_seqs);

    const double base_lr = config.resolved_lr(mode);
    const std::size_t batches_per_epoch =
        (examples.size() + static_cast<std::size_t>(config.batch_size) - 1) /
        static_cast<std::size_t>(config.batch_size);
    const std::size_t total_steps = batches_per_epoch * static_cast<std::size_t>(config.epochs);
    const auto warmup_steps = static_cast<std::size_t>(
        std::ceil(config.warmup_ratio * static_cast<double>(total_steps)));

    TrainLog log;
    Gradients grads;
    std::vector<std::pair<std::vector<int>, int>> batch;
    std::mt19937_64 shuffle_rng(mix_seed(config.seed, 0x7241));

    // Snapshot of the best-validation parameters, restored at the end.
    std::vector<double> best_emb, best_w1, best_b1, best_w2, best_b2;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t step = 0;

    auto apply_update = [&](std::vector<double>& param, const std::vector<double>& grad, double lr) {
        const double wd = config.weight_decay;
        for (std::size_t i = 0; i < param.size(); ++i)
            param[i] -= lr * (grad[i] + wd * param[i]);
    };

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        fisher_yates(examples, shuffle_rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < examples.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t len =
                std::min(static_cast<std::size_t>(config.batch_size), examples.size() - start);
            batch.assign(examples.begin() + static_cast<long>(start),
                         examples.begin() + static_cast<long>(start + len));
            const double batch_loss = loss_and_grad(batch, grads, mode == TrainMode::Lexical);
            epoch_loss += batch_loss * static_cast<double>(len);

            ++step;
            const double lr =
                warmup_steps > 0 && step < warmup_steps
                    ? base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps)
                    : base_lr;
            apply_update(embedding_, grads.embedding, lr);
            if (mode == TrainMode::Full) {
                apply_update(w1_, grads.w1, lr);
                apply_update(b1_, grads.b1, lr);
                apply_update(w2_, grads.w2, lr);
                apply_update(b2_, grads.b2, lr);
            }
        }
        log.train_loss.push_back(epoch_loss / static_cast<double>(examples.size()));
        log.epochs_run = epoch + 1;

        if (!val_examples.empty()) {
            const double val = loss(val_examples);
            log.val_loss.push_back(val);
            if (val < best_val) {
                best_val = val;
                log.best_epoch = epoch;
                best_emb = embedding_;
                best_w1 = w1_;
                best_b1 = b1_;
                best_w2 = w2_;
                best_b2 = b2_;
            } else if (epoch - log.best_epoch > config.early_stop_patience) {
                log.early_stopped = true;
                break;
            }
        }
    }

    if (!best_emb.empty()) {
        embedding_ = std::move(best_emb);
        if (mode == TrainMode::Full) {
            w1_ = std::move(best_w1);
            b1_ = std::move(best_b1);
            w2_ = std::move(best_w2);
            b2_ = std::move(best_b2);
        }
    }
    last_train_mode_ = mode == TrainMode::Lexical ? "lexical" : "full";
    return log;
}

double NeuralLm::evaluate(const std::vector<std::vector<int>>& seqs) const {
    const auto examples = make_examples(seqs);
    if (examples.empty()) throw std::invalid_argument("evaluate over an empty corpus");
    return loss(examples);
}

}  // namespace tokparity
