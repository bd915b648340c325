#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spscan/model.hpp"

namespace spscan {

struct TrainingExample {
    std::string doc_id;
    std::string query;
    std::vector<int32_t> labels;   // one per document sentence, 0 or 1
    std::vector<double> weights;   // optional; empty selects balanced defaults
};

// Balanced class weights: n/(2*n_pos) for positives, n/(2*n_neg) for
// negatives; all ones when either class is absent.
std::vector<double> default_weights(std::span<const int32_t> labels);

struct SentenceLoss {
    double loss = 0.0;
    std::vector<double> dlogits;  // d loss / d sentence logit
};

// Weighted binary cross-entropy over sentence logits. Probabilities are
// clamped to [1e-12, 1-1e-12]; in the clamped region the loss is locally
// constant, so the returned gradient there is exactly zero.
SentenceLoss weighted_bce(std::span<const double> sentence_logits,
                          std::span<const int32_t> labels, std::span<const double> weights);

// Reverse-mode gradients for the whole model given d loss / d logit per
// token position. Exact up to floating point; deterministic for any thread
// count (cross-channel reductions run in fixed channel order).
ParamSet backward(const ScanModel& model, const ForwardTrace& trace,
                  std::span<const int32_t> tokens, std::span<const double> dlogits);

struct ExampleGrad {
    double loss = 0.0;
    ParamSet grads;
};

ExampleGrad example_loss_and_grad(const ScanModel& model, const TokenizedInput& input,
                                  std::span<const int32_t> labels,
                                  std::span<const double> weights);

struct TrainConfig {
    double peak_lr = 1e-4;
    double min_lr = 1e-5;
    double warmup_fraction = 0.10;
    double beta1 = 0.9;
    double beta2 = 0.95;
    double eps = 1e-8;
    double weight_decay = 0.01;
    double clip_norm = 1.0;
    int64_t effective_batch = 64;  // examples per optimizer step, via accumulation
    int64_t epochs = 1;
};

// Linear warmup to peak_lr, then cosine decay reaching min_lr at the final step.
double lr_at(const TrainConfig& cfg, int64_t step, int64_t total_steps);

struct StepLog {
    int64_t step = 0;
    double loss = 0.0;       // mean example loss in the accumulation window
    double lr = 0.0;
    double grad_norm = 0.0;  // pre-clip global norm
};

class AdamW {
public:
    explicit AdamW(const ParamSet& shape);
    void step(ParamSet& params, const ParamSet& grads, double lr, const TrainConfig& cfg);

private:
    ParamSet m_, v_;
    int64_t t_ = 0;
};

double global_grad_norm(ParamSet& grads);
void scale_params(ParamSet& p, double factor);
void add_params(ParamSet& acc, const ParamSet& delta);

struct TrainDataset {
    std::vector<TokenizedInput> inputs;
    std::vector<std::vector<int32_t>> labels;
    std::vector<std::vector<double>> weights;  // may hold empty vectors
    std::vector<std::string> keys;             // canonical within-window ordering

    size_t size() const { return inputs.size(); }
};

TrainDataset build_dataset(std::span<const TrainingExample> examples,
                           std::span<const Document> docs, const Vocabulary& vocab);

// One pass (or cfg.epochs passes) of AdamW with gradient accumulation.
// Examples inside an accumulation window are processed in sorted key order,
// so any permutation within a window yields a bit-identical model. Aborts
// with diagnostics on a non-finite loss or gradient.
ScanModel train_model(const ModelDims& dims, const Vocabulary& vocab,
                      const TrainDataset& data, const TrainConfig& cfg, uint64_t seed,
                      const std::function<void(const StepLog&)>& log_sink = {});

}  // namespace spscan
