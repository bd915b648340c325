#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "spscan/fixtures.hpp"
#include "spscan/llm_client.hpp"
#include "spscan/train.hpp"

namespace spscan::testing {

// Unique writable directory, removed on destruction.
class temp_dir {
public:
    explicit temp_dir(const std::string& tag) {
        static std::atomic<uint64_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("spscan-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~temp_dir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Completion driven by a caller-supplied function of (prompt, call index).
class ScriptClient : public LlmClient {
public:
    using Fn = std::function<std::string(const std::string&, int64_t)>;
    explicit ScriptClient(Fn fn) : fn_(std::move(fn)) {}
    std::string complete(const std::string& prompt) override { return fn_(prompt, calls_++); }
    int64_t calls() const { return calls_; }

private:
    Fn fn_;
    int64_t calls_ = 0;
};

inline std::string prompt_task(const std::string& prompt) {
    const std::string tag = "TASK: ";
    size_t at = prompt.find(tag);
    if (at == std::string::npos) return "";
    size_t end = prompt.find('\n', at);
    return prompt.substr(at + tag.size(), end - at - tag.size());
}

inline int64_t prompt_sentence_lines(const std::string& prompt) {
    int64_t count = 0;
    size_t pos = 0;
    while (pos < prompt.size()) {
        size_t end = prompt.find('\n', pos);
        if (end == std::string::npos) end = prompt.size();
        if (prompt[pos] == '[') ++count;
        pos = end + 1;
    }
    return count;
}

// Dense closed form of the per-channel scan: y[t] = sum_{j<=t} c^T A^(t-j) B x[j],
// evaluated naively per output element. Quadratic in T, oracle only.
inline std::vector<double> dense_scan_oracle(const std::vector<double>& x, int64_t T, int64_t P,
                                             const std::vector<double>& a_diag,
                                             const std::vector<double>& b_in,
                                             const std::vector<double>& c_out, int64_t N) {
    std::vector<double> y(static_cast<size_t>(T * P), 0.0);
    for (int64_t p = 0; p < P; ++p) {
        for (int64_t t = 0; t < T; ++t) {
            double acc = 0.0;
            for (int64_t j = 0; j <= t; ++j) {
                double xv = x[static_cast<size_t>(j * P + p)];
                for (int64_t k = 0; k < N; ++k) {
                    double a_pow = std::pow(a_diag[static_cast<size_t>(k)],
                                            static_cast<double>(t - j));
                    acc += c_out[static_cast<size_t>(k)] * a_pow *
                           b_in[static_cast<size_t>(k)] * xv;
                }
            }
            y[static_cast<size_t>(t * P + p)] = acc;
        }
    }
    return y;
}

// Max relative error between analytic gradients and central finite
// differences over every parameter tensor of `model` for one example.
// rel = |fd - an| / max(|fd|, |an|, floor); the floor keeps near-zero
// coordinates from dominating through roundoff.
inline double max_grad_rel_err(ScanModel& model, const TokenizedInput& input,
                               const std::vector<int32_t>& labels,
                               const std::vector<double>& weights, double step = 1e-5,
                               double floor = 1e-4) {
    ExampleGrad analytic = example_loss_and_grad(model, input, labels, weights);
    auto loss_of = [&]() {
        return example_loss_and_grad(model, input, labels, weights).loss;
    };
    double worst = 0.0;
    auto prefs = tensor_refs(model.params);
    auto grefs = tensor_refs(analytic.grads);
    for (size_t ti = 0; ti < prefs.size(); ++ti) {
        std::vector<double>& tensor = *prefs[ti].data;
        const std::vector<double>& grad = *grefs[ti].data;
        for (size_t j = 0; j < tensor.size(); ++j) {
            double saved = tensor[j];
            tensor[j] = saved + step;
            double up = loss_of();
            tensor[j] = saved - step;
            double down = loss_of();
            tensor[j] = saved;
            double fd = (up - down) / (2.0 * step);
            double an = grad[j];
            double denom = std::max({std::abs(fd), std::abs(an), floor});
            worst = std::max(worst, std::abs(fd - an) / denom);
        }
    }
    return worst;
}

// Tiny vocabulary-plus-model builder for kernel-level tests.
inline ScanModel tiny_random_model(int32_t vocab_words, int32_t P, int32_t N, int32_t L,
                                   uint64_t seed) {
    Vocabulary vocab;
    for (int32_t i = 0; i < vocab_words; ++i) vocab.add_word("w" + std::to_string(i));
    ModelDims dims{vocab.size(), P, N, L};
    return random_model(dims, std::move(vocab), seed);
}

inline std::vector<int32_t> random_tokens(std::mt19937_64& rng, int64_t T, int32_t vocab_size) {
    std::vector<int32_t> tokens(static_cast<size_t>(T));
    for (int32_t& t : tokens)
        t = static_cast<int32_t>(draw_u64(rng, 0, static_cast<uint64_t>(vocab_size - 1)));
    return tokens;
}

}  // namespace spscan::testing
