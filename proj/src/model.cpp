#include "spscan/model.hpp"

#include <cmath>

#include "spscan/jsonl.hpp"
#include "spscan/scan_kernel.hpp"

namespace spscan {

int64_t ModelDims::param_count() const {
    int64_t per_layer = 3LL * state_size + static_cast<int64_t>(channels) * channels;
    return static_cast<int64_t>(vocab_size) * channels + layers * per_layer + channels;
}

ParamSet ParamSet::zeros_like(const ParamSet& shape) {
    ParamSet z;
    z.embedding.assign(shape.embedding.size(), 0.0);
    z.layers.resize(shape.layers.size());
    for (size_t l = 0; l < shape.layers.size(); ++l) {
        z.layers[l].a_raw.assign(shape.layers[l].a_raw.size(), 0.0);
        z.layers[l].b_in.assign(shape.layers[l].b_in.size(), 0.0);
        z.layers[l].c_out.assign(shape.layers[l].c_out.size(), 0.0);
        z.layers[l].mix.assign(shape.layers[l].mix.size(), 0.0);
    }
    z.head.assign(shape.head.size(), 0.0);
    return z;
}

std::vector<TensorRef> tensor_refs(ParamSet& p) {
    std::vector<TensorRef> refs;
    refs.push_back({"embedding", &p.embedding});
    for (size_t l = 0; l < p.layers.size(); ++l) {
        std::string prefix = "layer" + std::to_string(l) + ".";
        refs.push_back({prefix + "a_raw", &p.layers[l].a_raw});
        refs.push_back({prefix + "b_in", &p.layers[l].b_in});
        refs.push_back({prefix + "c_out", &p.layers[l].c_out});
        refs.push_back({prefix + "mix", &p.layers[l].mix});
    }
    refs.push_back({"head", &p.head});
    return refs;
}

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double silu_grad(double x) {
    double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

ScanModel init_model(const ModelDims& dims, Vocabulary vocab, uint64_t seed) {
    if (dims.vocab_size != vocab.size())
        fail("model vocab_size " + std::to_string(dims.vocab_size) +
             " does not match vocabulary size " + std::to_string(vocab.size()));
    ScanModel m;
    m.dims = dims;
    m.vocab = std::move(vocab);

    int64_t P = dims.channels, N = dims.state_size;
    auto rng = fork_rng(seed, "init");

    m.params.embedding.resize(static_cast<size_t>(dims.vocab_size) * P);
    for (double& w : m.params.embedding) w = 0.2 * draw_normal(rng);

    m.params.layers.resize(static_cast<size_t>(dims.layers));
    for (ScanLayer& layer : m.params.layers) {
        layer.a_raw.resize(static_cast<size_t>(N));
        layer.b_in.resize(static_cast<size_t>(N));
        layer.c_out.resize(static_cast<size_t>(N));
        layer.mix.resize(static_cast<size_t>(P * P));
        for (int64_t k = 0; k < N; ++k) {
            // decay targets log-spaced in (0.3, 0.999): short through long memory
            double frac = N == 1 ? 0.5 : static_cast<double>(k) / (N - 1);
            double decay = 0.3 * std::pow(0.999 / 0.3, frac);
            layer.a_raw[k] = std::atanh(decay);
            layer.b_in[k] = 0.5 * draw_normal(rng);
            layer.c_out[k] = 0.5 * draw_normal(rng);
        }
        for (double& w : layer.mix) w = draw_normal(rng) / std::sqrt(static_cast<double>(P));
    }

    // zero head: initial logits are exactly zero, first gradient step is
    // driven purely by the loss weights
    m.params.head.assign(static_cast<size_t>(P), 0.0);
    return m;
}

namespace {

// One layer applied in place: scan, silu, mix, residual.
// x is T x P and becomes the layer output; scan_out receives pre-activation.
void apply_layer(const ScanLayer& layer, std::vector<double>& x, std::vector<double>& scan_out,
                 int64_t T, int64_t P, int64_t N) {
    std::vector<double> a_diag(static_cast<size_t>(N));
    for (int64_t k = 0; k < N; ++k) a_diag[k] = std::tanh(layer.a_raw[k]);

    scan_out.resize(static_cast<size_t>(T * P));
    scan_channels_parallel(x.data(), scan_out.data(), T, P, a_diag.data(), layer.b_in.data(),
                           layer.c_out.data(), N);

#pragma omp parallel for schedule(static)
    for (int64_t t = 0; t < T; ++t) {
        const double* s = &scan_out[static_cast<size_t>(t * P)];
        double* xt = &x[static_cast<size_t>(t * P)];
        std::vector<double> g(static_cast<size_t>(P));
        for (int64_t p = 0; p < P; ++p) g[static_cast<size_t>(p)] = silu(s[p]);
        for (int64_t q = 0; q < P; ++q) {
            double acc = 0.0;
            for (int64_t p = 0; p < P; ++p)
                acc += g[static_cast<size_t>(p)] * layer.mix[static_cast<size_t>(p * P + q)];
            xt[q] += acc;
        }
    }
}

std::vector<double> embed(const ScanModel& model, std::span<const int32_t> tokens) {
    int64_t T = static_cast<int64_t>(tokens.size());
    int64_t P = model.dims.channels;
    // Validate before the parallel gather: a throw inside an omp region
    // cannot unwind past it.
    for (int32_t id : tokens)
        if (id < 0 || id >= model.dims.vocab_size)
            fail("token id " + std::to_string(id) + " outside vocabulary");
    std::vector<double> x(static_cast<size_t>(T * P));
#pragma omp parallel for schedule(static)
    for (int64_t t = 0; t < T; ++t) {
        int32_t id = tokens[static_cast<size_t>(t)];
        const double* row = &model.params.embedding[static_cast<size_t>(id) * P];
        for (int64_t p = 0; p < P; ++p) x[static_cast<size_t>(t * P + p)] = row[p];
    }
    return x;
}

std::vector<double> project_head(const ParamSet& params, const std::vector<double>& x, int64_t T,
                                 int64_t P) {
    std::vector<double> logits(static_cast<size_t>(T));
#pragma omp parallel for schedule(static)
    for (int64_t t = 0; t < T; ++t) {
        double acc = 0.0;
        for (int64_t p = 0; p < P; ++p)
            acc += params.head[static_cast<size_t>(p)] * x[static_cast<size_t>(t * P + p)];
        logits[static_cast<size_t>(t)] = acc;
    }
    return logits;
}

}  // namespace

std::vector<double> forward_logits(const ScanModel& model, std::span<const int32_t> tokens) {
    if (tokens.empty()) fail("forward on empty token sequence");
    int64_t T = static_cast<int64_t>(tokens.size());
    int64_t P = model.dims.channels, N = model.dims.state_size;
    std::vector<double> x = embed(model, tokens);
    std::vector<double> scan_out;
    for (const ScanLayer& layer : model.params.layers) apply_layer(layer, x, scan_out, T, P, N);
    return project_head(model.params, x, T, P);
}

ForwardTrace forward_trace(const ScanModel& model, std::span<const int32_t> tokens) {
    if (tokens.empty()) fail("forward on empty token sequence");
    int64_t T = static_cast<int64_t>(tokens.size());
    int64_t P = model.dims.channels, N = model.dims.state_size;

    ForwardTrace trace;
    trace.layer_in.reserve(model.params.layers.size() + 1);
    trace.layer_in.push_back(embed(model, tokens));
    trace.scan_out.resize(model.params.layers.size());
    for (size_t l = 0; l < model.params.layers.size(); ++l) {
        std::vector<double> x = trace.layer_in.back();
        apply_layer(model.params.layers[l], x, trace.scan_out[l], T, P, N);
        trace.layer_in.push_back(std::move(x));
    }
    trace.logits = project_head(model.params, trace.layer_in.back(), T, P);
    return trace;
}

SentenceScores score_sentences(const ScanModel& model, const TokenizedInput& input) {
    std::vector<double> logits = forward_logits(model, input.tokens);
    SentenceScores scores;
    scores.doc_id = input.doc_id;
    scores.logits.reserve(input.eos_indices.size());
    for (int64_t eos : input.eos_indices) {
        if (eos < input.query_len || eos >= static_cast<int64_t>(logits.size()))
            fail("eos index " + std::to_string(eos) + " outside document region");
        scores.logits.push_back(logits[static_cast<size_t>(eos)]);
    }
    return scores;
}

void save_checkpoint(const std::filesystem::path& path, const ScanModel& model) {
    json j;
    j["format"] = "spscan-checkpoint";
    j["version"] = 1;
    j["dims"] = {{"vocab_size", model.dims.vocab_size},
                 {"channels", model.dims.channels},
                 {"state_size", model.dims.state_size},
                 {"layers", model.dims.layers}};
    json words = json::array();
    for (int32_t i = 0; i < model.vocab.size(); ++i) words.push_back(model.vocab.word_of(i));
    j["vocab"] = std::move(words);
    j["embedding"] = model.params.embedding;
    json layers = json::array();
    for (const ScanLayer& layer : model.params.layers)
        layers.push_back({{"a_raw", layer.a_raw},
                          {"b_in", layer.b_in},
                          {"c_out", layer.c_out},
                          {"mix", layer.mix}});
    j["layers"] = std::move(layers);
    j["head"] = model.params.head;
    save_json(path, j);
}

ScanModel load_checkpoint(const std::filesystem::path& path) {
    json j = load_json(path);
    if (field_or<std::string>(j, "format", "") != "spscan-checkpoint")
        fail(path.string() + ": not a checkpoint file");
    if (require_field<int>(j, "version") != 1)
        fail(path.string() + ": unsupported checkpoint version");

    ScanModel m;
    const json& d = j.at("dims");
    m.dims.vocab_size = require_field<int32_t>(d, "vocab_size");
    m.dims.channels = require_field<int32_t>(d, "channels");
    m.dims.state_size = require_field<int32_t>(d, "state_size");
    m.dims.layers = require_field<int32_t>(d, "layers");

    auto words = require_field<std::vector<std::string>>(j, "vocab");
    for (size_t i = static_cast<size_t>(Vocabulary::kReservedCount); i < words.size(); ++i)
        m.vocab.add_word(words[i]);
    if (m.vocab.size() != m.dims.vocab_size)
        fail(path.string() + ": vocab length does not match dims.vocab_size");

    m.params.embedding = require_field<std::vector<double>>(j, "embedding");
    for (const json& lj : j.at("layers")) {
        ScanLayer layer;
        layer.a_raw = require_field<std::vector<double>>(lj, "a_raw");
        layer.b_in = require_field<std::vector<double>>(lj, "b_in");
        layer.c_out = require_field<std::vector<double>>(lj, "c_out");
        layer.mix = require_field<std::vector<double>>(lj, "mix");
        m.params.layers.push_back(std::move(layer));
    }
    m.params.head = require_field<std::vector<double>>(j, "head");

    size_t P = static_cast<size_t>(m.dims.channels), N = static_cast<size_t>(m.dims.state_size);
    if (m.params.layers.size() != static_cast<size_t>(m.dims.layers) ||
        m.params.embedding.size() != static_cast<size_t>(m.dims.vocab_size) * P ||
        m.params.head.size() != P)
        fail(path.string() + ": tensor shapes do not match dims");
    for (const ScanLayer& layer : m.params.layers)
        if (layer.a_raw.size() != N || layer.b_in.size() != N || layer.c_out.size() != N ||
            layer.mix.size() != P * P)
            fail(path.string() + ": layer tensor shapes do not match dims");
    return m;
}

ScanModelF32 to_f32(const ScanModel& model) {
    ScanModelF32 m;
    m.dims = model.dims;
    m.embedding.assign(model.params.embedding.begin(), model.params.embedding.end());
    for (const ScanLayer& layer : model.params.layers) {
        ScanModelF32::Layer out;
        out.a_diag.resize(layer.a_raw.size());
        for (size_t k = 0; k < layer.a_raw.size(); ++k)
            out.a_diag[k] = static_cast<float>(std::tanh(layer.a_raw[k]));
        out.b_in.assign(layer.b_in.begin(), layer.b_in.end());
        out.c_out.assign(layer.c_out.begin(), layer.c_out.end());
        out.mix.assign(layer.mix.begin(), layer.mix.end());
        m.layers.push_back(std::move(out));
    }
    m.head.assign(model.params.head.begin(), model.params.head.end());
    return m;
}

std::vector<float> forward_logits_f32(const ScanModelF32& model, std::span<const int32_t> tokens) {
    if (tokens.empty()) fail("forward on empty token sequence");
    int64_t T = static_cast<int64_t>(tokens.size());
    int64_t P = model.dims.channels, N = model.dims.state_size;

    for (int32_t id : tokens)
        if (id < 0 || id >= model.dims.vocab_size)
            fail("token id " + std::to_string(id) + " outside vocabulary");
    std::vector<float> x(static_cast<size_t>(T * P));
#pragma omp parallel for schedule(static)
    for (int64_t t = 0; t < T; ++t) {
        int32_t id = tokens[static_cast<size_t>(t)];
        const float* row = &model.embedding[static_cast<size_t>(id) * P];
        for (int64_t p = 0; p < P; ++p) x[static_cast<size_t>(t * P + p)] = row[p];
    }

    std::vector<float> scan_out(static_cast<size_t>(T * P));
    for (const ScanModelF32::Layer& layer : model.layers) {
        scan_channels_parallel(x.data(), scan_out.data(), T, P, layer.a_diag.data(),
                               layer.b_in.data(), layer.c_out.data(), N);
#pragma omp parallel for schedule(static)
        for (int64_t t = 0; t < T; ++t) {
            const float* s = &scan_out[static_cast<size_t>(t * P)];
            float* xt = &x[static_cast<size_t>(t * P)];
            std::vector<float> g(static_cast<size_t>(P));
            for (int64_t p = 0; p < P; ++p)
                g[static_cast<size_t>(p)] = static_cast<float>(silu(s[p]));
            for (int64_t q = 0; q < P; ++q) {
                double acc = 0.0;
                for (int64_t p = 0; p < P; ++p)
                    acc += static_cast<double>(g[static_cast<size_t>(p)]) *
                           static_cast<double>(layer.mix[static_cast<size_t>(p * P + q)]);
                xt[q] += static_cast<float>(acc);
            }
        }
    }

    std::vector<float> logits(static_cast<size_t>(T));
#pragma omp parallel for schedule(static)
    for (int64_t t = 0; t < T; ++t) {
        double acc = 0.0;
        for (int64_t p = 0; p < P; ++p)
            acc += static_cast<double>(model.head[static_cast<size_t>(p)]) *
                   static_cast<double>(x[static_cast<size_t>(t * P + p)]);
        logits[static_cast<size_t>(t)] = static_cast<float>(acc);
    }
    return logits;
}

}  // namespace spscan
