#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spscan/vocab.hpp"

namespace spscan {

struct ModelDims {
    int32_t vocab_size = 0;
    int32_t channels = 32;    // P, width of embeddings and mixing
    int32_t state_size = 16;  // N, per-channel recurrence state
    int32_t layers = 2;       // L

    int64_t param_count() const;
};

struct ScanLayer {
    std::vector<double> a_raw;  // N; tanh keeps the transition diagonal in (-1,1)
    std::vector<double> b_in;   // N
    std::vector<double> c_out;  // N
    std::vector<double> mix;    // P x P row-major; row p weights channel p's activation
};

// Parameters only; gradients and optimizer moments reuse the same shape.
struct ParamSet {
    std::vector<double> embedding;  // vocab_size x P
    std::vector<ScanLayer> layers;
    std::vector<double> head;  // P

    static ParamSet zeros_like(const ParamSet& shape);
};

struct TensorRef {
    std::string name;
    std::vector<double>* data;
};

// Stable enumeration order; optimizer state and norm reductions rely on it.
std::vector<TensorRef> tensor_refs(ParamSet& p);

struct ScanModel {
    ModelDims dims;
    Vocabulary vocab;
    ParamSet params;
};

ScanModel init_model(const ModelDims& dims, Vocabulary vocab, uint64_t seed);

// Per-layer activations kept for the backward pass.
// layer_in[0] is the embedding output; layer_in[L] is the final feature map.
struct ForwardTrace {
    std::vector<std::vector<double>> layer_in;  // L+1 arrays, each T x P
    std::vector<std::vector<double>> scan_out;  // L arrays, each T x P, pre-activation
    std::vector<double> logits;                 // T
};

std::vector<double> forward_logits(const ScanModel& model, std::span<const int32_t> tokens);
ForwardTrace forward_trace(const ScanModel& model, std::span<const int32_t> tokens);

struct SentenceScores {
    std::string doc_id;
    std::vector<double> logits;  // one per sentence, document order
};

// Runs the full input once and reads logits at the sentence-final positions.
SentenceScores score_sentences(const ScanModel& model, const TokenizedInput& input);

void save_checkpoint(const std::filesystem::path& path, const ScanModel& model);
ScanModel load_checkpoint(const std::filesystem::path& path);

// float32 inference path; parameters are cast once, the per-step output
// reduction still accumulates in double.
struct ScanModelF32 {
    ModelDims dims;
    std::vector<float> embedding;
    struct Layer {
        std::vector<float> a_diag;  // squashed, not raw
        std::vector<float> b_in;
        std::vector<float> c_out;
        std::vector<float> mix;
    };
    std::vector<Layer> layers;
    std::vector<float> head;
};

ScanModelF32 to_f32(const ScanModel& model);
std::vector<float> forward_logits_f32(const ScanModelF32& model, std::span<const int32_t> tokens);

double silu(double x);
double silu_grad(double x);

}  // namespace spscan
