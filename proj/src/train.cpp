#include "spscan/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace spscan {

std::vector<double> default_weights(std::span<const int32_t> labels) {
    int64_t n = static_cast<int64_t>(labels.size());
    int64_t n_pos = std::count(labels.begin(), labels.end(), 1);
    int64_t n_neg = n - n_pos;
    std::vector<double> w(labels.size(), 1.0);
    if (n_pos == 0 || n_neg == 0) return w;  // degenerate batch, no reweighting
    double wp = static_cast<double>(n) / (2.0 * static_cast<double>(n_pos));
    double wn = static_cast<double>(n) / (2.0 * static_cast<double>(n_neg));
    for (size_t i = 0; i < labels.size(); ++i) w[i] = labels[i] == 1 ? wp : wn;
    return w;
}

SentenceLoss weighted_bce(std::span<const double> sentence_logits,
                          std::span<const int32_t> labels, std::span<const double> weights) {
    if (labels.size() != sentence_logits.size())
        fail("weighted_bce: " + std::to_string(labels.size()) + " labels for " +
             std::to_string(sentence_logits.size()) + " sentence logits");
    if (weights.size() != sentence_logits.size())
        fail("weighted_bce: weights length mismatch");

    constexpr double kLo = 1e-12, kHi = 1.0 - 1e-12;
    SentenceLoss out;
    out.dlogits.resize(sentence_logits.size());
    for (size_t i = 0; i < sentence_logits.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            fail("weighted_bce: label " + std::to_string(labels[i]) + " at sentence " +
                 std::to_string(i) + " is not 0/1");
        double s = 1.0 / (1.0 + std::exp(-sentence_logits[i]));
        double p = std::clamp(s, kLo, kHi);
        double r = static_cast<double>(labels[i]);
        double w = weights[i];
        out.loss -= w * (r * std::log(p) + (1.0 - r) * std::log(1.0 - p));
        // locally constant where the clamp is active
        out.dlogits[i] = (s < kLo || s > kHi) ? 0.0 : w * (s - r);
    }
    return out;
}

namespace {

// Adjoint of the per-channel recurrence. Recomputes the state trajectory
// forward, then sweeps the adjoint backward:
//   lambda_t = c * ds_t + a ⊙ lambda_{t+1}
//   dx_t     = sum_k b_k lambda_t[k]
//   db_k    += sum_t lambda_t[k] x_t      dc_k += sum_t ds_t h_t[k]
//   da_k    += sum_t lambda_t[k] h_{t-1}[k]
void scan_channel_backward(const double* x, const double* ds, double* dx, int64_t T, int64_t P,
                           int64_t p, const double* a_diag, const double* b_in,
                           const double* c_out, int64_t N, double* da_part, double* db_part,
                           double* dc_part, std::vector<double>& h_buf) {
    h_buf.assign(static_cast<size_t>(T * N), 0.0);
    for (int64_t t = 0; t < T; ++t) {
        double xv = x[t * P + p];
        const double* h_prev = t > 0 ? &h_buf[static_cast<size_t>((t - 1) * N)] : nullptr;
        double* h = &h_buf[static_cast<size_t>(t * N)];
        for (int64_t k = 0; k < N; ++k)
            h[k] = (h_prev ? a_diag[k] * h_prev[k] : 0.0) + b_in[k] * xv;
    }

    std::vector<double> lam(static_cast<size_t>(N), 0.0);
    for (int64_t t = T - 1; t >= 0; --t) {
        double dsv = ds[t * P + p];
        double xv = x[t * P + p];
        const double* h = &h_buf[static_cast<size_t>(t * N)];
        const double* h_prev = t > 0 ? &h_buf[static_cast<size_t>((t - 1) * N)] : nullptr;
        double dxv = 0.0;
        for (int64_t k = 0; k < N; ++k) {
            lam[static_cast<size_t>(k)] = c_out[k] * dsv + a_diag[k] * lam[static_cast<size_t>(k)];
            double l = lam[static_cast<size_t>(k)];
            dxv += b_in[k] * l;
            db_part[k] += l * xv;
            dc_part[k] += dsv * h[k];
            if (h_prev) da_part[k] += l * h_prev[k];
        }
        dx[t * P + p] = dxv;
    }
}

}  // namespace

ParamSet backward(const ScanModel& model, const ForwardTrace& trace,
                  std::span<const int32_t> tokens, std::span<const double> dlogits) {
    int64_t T = static_cast<int64_t>(tokens.size());
    int64_t P = model.dims.channels, N = model.dims.state_size;
    int64_t L = model.dims.layers;
    if (static_cast<int64_t>(dlogits.size()) != T) fail("backward: dlogits length mismatch");
    if (trace.layer_in.size() != static_cast<size_t>(L) + 1) fail("backward: trace layer count");

    ParamSet g = ParamSet::zeros_like(model.params);

    // head: dhead[p] = sum_t dlogits[t] x_L[t][p]; dx_L[t][p] = dlogits[t] head[p]
    const std::vector<double>& x_last = trace.layer_in.back();
    std::vector<double> dx(static_cast<size_t>(T * P));
#pragma omp parallel for schedule(static)
    for (int64_t p = 0; p < P; ++p) {
        double acc = 0.0;
        for (int64_t t = 0; t < T; ++t)
            acc += dlogits[static_cast<size_t>(t)] * x_last[static_cast<size_t>(t * P + p)];
        g.head[static_cast<size_t>(p)] = acc;
        for (int64_t t = 0; t < T; ++t)
            dx[static_cast<size_t>(t * P + p)] =
                dlogits[static_cast<size_t>(t)] * model.params.head[static_cast<size_t>(p)];
    }

    std::vector<double> ds(static_cast<size_t>(T * P));
    std::vector<double> dx_scan(static_cast<size_t>(T * P));
    for (int64_t l = L - 1; l >= 0; --l) {
        const ScanLayer& layer = model.params.layers[static_cast<size_t>(l)];
        ScanLayer& grad = g.layers[static_cast<size_t>(l)];
        const std::vector<double>& x_in = trace.layer_in[static_cast<size_t>(l)];
        const std::vector<double>& s = trace.scan_out[static_cast<size_t>(l)];

        // dmix[p][q] = sum_t silu(s[t][p]) dout[t][q]; row p is private to one thread
#pragma omp parallel for schedule(static)
        for (int64_t p = 0; p < P; ++p) {
            double* row = &grad.mix[static_cast<size_t>(p * P)];
            for (int64_t t = 0; t < T; ++t) {
                double gp = silu(s[static_cast<size_t>(t * P + p)]);
                const double* dout = &dx[static_cast<size_t>(t * P)];
                for (int64_t q = 0; q < P; ++q) row[q] += gp * dout[q];
            }
        }

        // ds[t][p] = silu'(s[t][p]) * sum_q mix[p][q] dout[t][q]
#pragma omp parallel for schedule(static)
        for (int64_t t = 0; t < T; ++t) {
            const double* dout = &dx[static_cast<size_t>(t * P)];
            for (int64_t p = 0; p < P; ++p) {
                double acc = 0.0;
                const double* mrow = &layer.mix[static_cast<size_t>(p * P)];
                for (int64_t q = 0; q < P; ++q) acc += mrow[q] * dout[q];
                ds[static_cast<size_t>(t * P + p)] =
                    acc * silu_grad(s[static_cast<size_t>(t * P + p)]);
            }
        }

        std::vector<double> a_diag(static_cast<size_t>(N));
        for (int64_t k = 0; k < N; ++k) a_diag[static_cast<size_t>(k)] = std::tanh(layer.a_raw[static_cast<size_t>(k)]);

        // per-channel partials, reduced serially below so the result does not
        // depend on thread scheduling
        std::vector<double> da_part(static_cast<size_t>(P * N), 0.0);
        std::vector<double> db_part(static_cast<size_t>(P * N), 0.0);
        std::vector<double> dc_part(static_cast<size_t>(P * N), 0.0);
#pragma omp parallel
        {
            std::vector<double> h_buf;
#pragma omp for schedule(static)
            for (int64_t p = 0; p < P; ++p)
                scan_channel_backward(x_in.data(), ds.data(), dx_scan.data(), T, P, p,
                                      a_diag.data(), layer.b_in.data(), layer.c_out.data(), N,
                                      &da_part[static_cast<size_t>(p * N)],
                                      &db_part[static_cast<size_t>(p * N)],
                                      &dc_part[static_cast<size_t>(p * N)], h_buf);
        }
        for (int64_t p = 0; p < P; ++p) {
            for (int64_t k = 0; k < N; ++k) {
                grad.a_raw[static_cast<size_t>(k)] += da_part[static_cast<size_t>(p * N + k)];
                grad.b_in[static_cast<size_t>(k)] += db_part[static_cast<size_t>(p * N + k)];
                grad.c_out[static_cast<size_t>(k)] += dc_part[static_cast<size_t>(p * N + k)];
            }
        }
        // chain through the tanh squash
        for (int64_t k = 0; k < N; ++k) {
            double a = a_diag[static_cast<size_t>(k)];
            grad.a_raw[static_cast<size_t>(k)] *= 1.0 - a * a;
        }

        // residual: dout flows through unchanged, plus the scan-input term
#pragma omp parallel for schedule(static)
        for (int64_t t = 0; t < T; ++t)
            for (int64_t p = 0; p < P; ++p)
                dx[static_cast<size_t>(t * P + p)] += dx_scan[static_cast<size_t>(t * P + p)];
    }

    // embedding scatter; channel p of every token row is owned by one thread
#pragma omp parallel for schedule(static)
    for (int64_t p = 0; p < P; ++p)
        for (int64_t t = 0; t < T; ++t)
            g.embedding[static_cast<size_t>(tokens[static_cast<size_t>(t)]) *
                            static_cast<size_t>(P) +
                        static_cast<size_t>(p)] += dx[static_cast<size_t>(t * P + p)];

    return g;
}

ExampleGrad example_loss_and_grad(const ScanModel& model, const TokenizedInput& input,
                                  std::span<const int32_t> labels,
                                  std::span<const double> weights) {
    if (static_cast<int64_t>(labels.size()) != input.sentence_count())
        fail("example for doc '" + input.doc_id + "': " + std::to_string(labels.size()) +
             " labels for " + std::to_string(input.sentence_count()) + " sentences");

    ForwardTrace trace = forward_trace(model, input.tokens);
    std::vector<double> z;
    z.reserve(input.eos_indices.size());
    for (int64_t eos : input.eos_indices) z.push_back(trace.logits[static_cast<size_t>(eos)]);

    std::vector<double> w(weights.begin(), weights.end());
    if (w.empty()) w = default_weights(labels);
    SentenceLoss loss = weighted_bce(z, labels, w);

    std::vector<double> dlogits(trace.logits.size(), 0.0);
    for (size_t i = 0; i < input.eos_indices.size(); ++i)
        dlogits[static_cast<size_t>(input.eos_indices[i])] = loss.dlogits[i];

    ExampleGrad out;
    out.loss = loss.loss;
    out.grads = backward(model, trace, input.tokens, dlogits);
    return out;
}

double lr_at(const TrainConfig& cfg, int64_t step, int64_t total_steps) {
    if (total_steps <= 0) fail("lr_at: total_steps must be positive");
    if (step < 0 || step >= total_steps) fail("lr_at: step out of range");
    int64_t warmup = cfg.warmup_fraction > 0.0
                         ? std::max<int64_t>(1, static_cast<int64_t>(cfg.warmup_fraction *
                                                                     static_cast<double>(total_steps)))
                         : 0;
    warmup = std::min(warmup, total_steps);
    if (step < warmup)
        return cfg.peak_lr * static_cast<double>(step + 1) / static_cast<double>(warmup);
    int64_t span = std::max<int64_t>(1, total_steps - 1 - warmup);
    double progress = static_cast<double>(step - warmup) / static_cast<double>(span);
    return cfg.min_lr +
           0.5 * (cfg.peak_lr - cfg.min_lr) * (1.0 + std::cos(3.14159265358979323846 * progress));
}

AdamW::AdamW(const ParamSet& shape)
    : m_(ParamSet::zeros_like(shape)), v_(ParamSet::zeros_like(shape)) {}

void AdamW::step(ParamSet& params, const ParamSet& grads, double lr, const TrainConfig& cfg) {
    ++t_;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    auto prefs = tensor_refs(params);
    auto grefs = tensor_refs(const_cast<ParamSet&>(grads));
    auto mrefs = tensor_refs(m_);
    auto vrefs = tensor_refs(v_);
    for (size_t i = 0; i < prefs.size(); ++i) {
        std::vector<double>& p = *prefs[i].data;
        const std::vector<double>& g = *grefs[i].data;
        std::vector<double>& m = *mrefs[i].data;
        std::vector<double>& v = *vrefs[i].data;
        if (p.size() != g.size()) fail("AdamW: shape mismatch for " + prefs[i].name);
        for (size_t j = 0; j < p.size(); ++j) {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
            double update = (m[j] / bc1) / (std::sqrt(v[j] / bc2) + cfg.eps);
            // decoupled weight decay, applied outside the moment machinery
            p[j] -= lr * update + lr * cfg.weight_decay * p[j];
        }
    }
}

double global_grad_norm(ParamSet& grads) {
    double sq = 0.0;
    for (const TensorRef& ref : tensor_refs(grads))
        for (double g : *ref.data) sq += g * g;
    return std::sqrt(sq);
}

void scale_params(ParamSet& p, double factor) {
    for (const TensorRef& ref : tensor_refs(p))
        for (double& v : *ref.data) v *= factor;
}

void add_params(ParamSet& acc, const ParamSet& delta) {
    auto arefs = tensor_refs(acc);
    auto drefs = tensor_refs(const_cast<ParamSet&>(delta));
    for (size_t i = 0; i < arefs.size(); ++i) {
        std::vector<double>& a = *arefs[i].data;
        const std::vector<double>& d = *drefs[i].data;
        if (a.size() != d.size()) fail("add_params: shape mismatch for " + arefs[i].name);
        for (size_t j = 0; j < a.size(); ++j) a[j] += d[j];
    }
}

TrainDataset build_dataset(std::span<const TrainingExample> examples,
                           std::span<const Document> docs, const Vocabulary& vocab) {
    std::map<std::string_view, const Document*> by_id;
    for (const Document& d : docs) by_id[d.doc_id] = &d;

    TrainDataset data;
    for (const TrainingExample& ex : examples) {
        auto it = by_id.find(ex.doc_id);
        if (it == by_id.end()) fail("training example references unknown doc '" + ex.doc_id + "'");
        const Document& doc = *it->second;
        if (static_cast<int64_t>(ex.labels.size()) != doc.sentence_count())
            fail("doc '" + ex.doc_id + "': " + std::to_string(ex.labels.size()) +
                 " labels for " + std::to_string(doc.sentence_count()) + " sentences");
        if (!ex.weights.empty() && ex.weights.size() != ex.labels.size())
            fail("doc '" + ex.doc_id + "': weights length mismatch");
        data.inputs.push_back(tokenize(ex.query, doc, vocab));
        data.labels.push_back(ex.labels);
        data.weights.push_back(ex.weights);
        data.keys.push_back(ex.doc_id + "\x1f" + ex.query);
    }
    return data;
}

ScanModel train_model(const ModelDims& dims, const Vocabulary& vocab,
                      const TrainDataset& data, const TrainConfig& cfg, uint64_t seed,
                      const std::function<void(const StepLog&)>& log_sink) {
    if (data.size() == 0) fail("train_model: empty dataset");
    if (cfg.effective_batch <= 0) fail("train_model: effective_batch must be positive");

    ScanModel model = init_model(dims, vocab, seed);
    AdamW opt(model.params);

    int64_t n = static_cast<int64_t>(data.size());
    int64_t steps_per_epoch = (n + cfg.effective_batch - 1) / cfg.effective_batch;
    int64_t total_steps = steps_per_epoch * cfg.epochs;

    int64_t step = 0;
    for (int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (int64_t begin = 0; begin < n; begin += cfg.effective_batch) {
            int64_t end = std::min(n, begin + cfg.effective_batch);
            std::vector<int64_t> window(static_cast<size_t>(end - begin));
            std::iota(window.begin(), window.end(), begin);
            // canonical order makes the window sum independent of input order
            std::sort(window.begin(), window.end(), [&](int64_t i, int64_t j) {
                return data.keys[static_cast<size_t>(i)] != data.keys[static_cast<size_t>(j)]
                           ? data.keys[static_cast<size_t>(i)] < data.keys[static_cast<size_t>(j)]
                           : i < j;
            });

            ParamSet accum = ParamSet::zeros_like(model.params);
            double loss_sum = 0.0;
            for (int64_t idx : window) {
                ExampleGrad eg = example_loss_and_grad(
                    model, data.inputs[static_cast<size_t>(idx)],
                    data.labels[static_cast<size_t>(idx)], data.weights[static_cast<size_t>(idx)]);
                loss_sum += eg.loss;
                add_params(accum, eg.grads);
            }
            double inv = 1.0 / static_cast<double>(window.size());
            scale_params(accum, inv);
            double mean_loss = loss_sum * inv;

            double norm = global_grad_norm(accum);
            if (!std::isfinite(mean_loss) || !std::isfinite(norm))
                fail("non-finite training state at step " + std::to_string(step) +
                     ": loss=" + std::to_string(mean_loss) + " grad_norm=" + std::to_string(norm));
            if (cfg.clip_norm > 0.0 && norm > cfg.clip_norm)
                scale_params(accum, cfg.clip_norm / norm);

            double lr = lr_at(cfg, step, total_steps);
            opt.step(model.params, accum, lr, cfg);
            if (log_sink) log_sink({step, mean_loss, lr, norm});
            ++step;
        }
    }
    return model;
}

}  // namespace spscan
