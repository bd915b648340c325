#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spscan/ablation.hpp"
#include "spscan/annotate.hpp"
#include "spscan/baselines.hpp"
#include "spscan/config.hpp"
#include "spscan/perf.hpp"
#include "spscan/records.hpp"
#include "spscan/window.hpp"

namespace fs = std::filesystem;
using namespace spscan;

namespace {

std::map<std::string, const Document*> docs_by_id(const std::vector<Document>& docs) {
    std::map<std::string, const Document*> out;
    for (const Document& d : docs) {
        if (!out.emplace(d.doc_id, &d).second) fail("duplicate doc_id '" + d.doc_id + "'");
    }
    return out;
}

const Document& doc_for(const std::map<std::string, const Document*>& by_id,
                        const std::string& doc_id, const std::string& what) {
    auto it = by_id.find(doc_id);
    if (it == by_id.end()) fail(what + " references unknown doc '" + doc_id + "'");
    return *it->second;
}

std::unique_ptr<LlmClient> make_llm(const std::string& sel) {
    if (sel == "mock") return std::make_unique<MockLlmClient>();
    if (sel.rfind("http", 0) == 0) {
        std::string url = (sel == "http") ? "http://127.0.0.1:8080/v1/complete" : sel;
        return std::make_unique<HttpLlmClient>(parse_llm_url(url));
    }
    fail("unknown --llm value '" + sel + "' (use mock or http://host:port/path)");
}

// config keys may be flat ("peak_lr") or sectioned ("train.peak_lr")
double cfg_double(const kv_config& c, const std::string& section, const char* key, double fb) {
    std::string sk = section + "." + key;
    if (c.has(sk)) return c.get_double(sk);
    return c.get_double(key, fb);
}

int64_t cfg_int(const kv_config& c, const std::string& section, const char* key, int64_t fb) {
    std::string sk = section + "." + key;
    if (c.has(sk)) return c.get_int(sk);
    return c.get_int(key, fb);
}

TrainConfig parse_train_config(const kv_config& c) {
    TrainConfig t;
    t.peak_lr = cfg_double(c, "train", "peak_lr", t.peak_lr);
    t.min_lr = cfg_double(c, "train", "min_lr", t.min_lr);
    t.warmup_fraction = cfg_double(c, "train", "warmup_fraction", t.warmup_fraction);
    t.beta1 = cfg_double(c, "train", "beta1", t.beta1);
    t.beta2 = cfg_double(c, "train", "beta2", t.beta2);
    t.eps = cfg_double(c, "train", "eps", t.eps);
    t.weight_decay = cfg_double(c, "train", "weight_decay", t.weight_decay);
    t.clip_norm = cfg_double(c, "train", "clip_norm", t.clip_norm);
    t.effective_batch = cfg_int(c, "train", "effective_batch", t.effective_batch);
    t.epochs = cfg_int(c, "train", "epochs", t.epochs);
    return t;
}

ModelDims parse_model_dims(const kv_config& c) {
    ModelDims d;
    d.channels = static_cast<int32_t>(cfg_int(c, "model", "channels", d.channels));
    d.state_size = static_cast<int32_t>(cfg_int(c, "model", "state_size", d.state_size));
    d.layers = static_cast<int32_t>(cfg_int(c, "model", "layers", d.layers));
    return d;
}

void manifest_input(manifest& m, const std::string& key, const fs::path& path) {
    m.add(key, path.string());
    m.add(key + "_digest", static_cast<int64_t>(file_digest(path)));
}

fs::path manifest_path(const fs::path& out) { return fs::path(out.string() + ".manifest.toml"); }

WindowConfig window_from_flags(const std::string& mode, int64_t window, int64_t stride,
                               int64_t chunk) {
    WindowConfig w;
    w.mode = score_mode_from_string(mode);
    w.window_tokens = window;
    w.stride_tokens = stride;
    w.chunk_tokens = chunk;
    return w;
}

std::vector<int64_t> parse_k_list(const std::string& csv) {
    std::vector<int64_t> ks;
    for (const std::string& part : split(csv, ',')) {
        std::string p = trim(part);
        if (p.empty()) continue;
        try {
            ks.push_back(std::stoll(p));
        } catch (const std::exception&) {
            fail("bad k value '" + p + "' in --k");
        }
        if (ks.back() <= 0) fail("k values must be positive, got '" + p + "'");
    }
    if (ks.empty()) fail("--k selects no cutoffs");
    return ks;
}

bool parse_on_off(const std::string& v, const char* flag) {
    if (v == "on") return true;
    if (v == "off") return false;
    fail(std::string(flag) + " must be on or off, got '" + v + "'");
}

// ---- subcommand bodies ----

int run_ingest(const fs::path& input, const fs::path& out, const std::string& tag) {
    std::vector<Document> docs = ingest_directory(input, source_tag_from_string(tag));
    save_documents(out, docs);
    manifest m;
    m.add("command", "ingest");
    m.add("input", input.string());
    m.add("source_tag", tag);
    m.add("documents", static_cast<int64_t>(docs.size()));
    manifest_input(m, "out", out);
    m.write(manifest_path(out));
    std::cout << "ingested " << docs.size() << " documents -> " << out.string() << "\n";
    return 0;
}

struct TrainFiles {
    std::vector<Document> docs;          // training view documents
    std::vector<TrainingExample> examples;
    bool from_synth = false;
};

// --corpus may hold plain training examples or synthetic records (detected
// by the "strategy" field); synthetic records are joined to --docs and
// sliced down to their chunks plus context_pad sentences.
TrainFiles load_train_files(const fs::path& corpus, const fs::path& docs_path,
                            int64_t context_pad) {
    TrainFiles out;
    bool synth = false;
    bool decided = false;
    for_each_jsonl(corpus, [&](const json& j, size_t) {
        if (!decided) {
            synth = j.contains("strategy");
            decided = true;
        }
    });
    if (!decided) fail(corpus.string() + " holds no records");
    out.from_synth = synth;

    std::vector<Document> source_docs = load_documents(docs_path);
    auto by_id = docs_by_id(source_docs);
    if (synth) {
        auto records = load_jsonl<SynthRecord>(corpus);
        for (const SynthRecord& rec : records) {
            const Document& doc = doc_for(by_id, rec.doc_id, "synthetic record");
            SynthTrainingView view = synth_to_example(rec, doc, context_pad);
            out.docs.push_back(std::move(view.doc));
            out.examples.push_back(std::move(view.example));
        }
    } else {
        out.examples = load_jsonl<TrainingExample>(corpus);
        std::map<std::string, bool> used;
        for (const TrainingExample& ex : out.examples) {
            doc_for(by_id, ex.doc_id, "training example");
            if (!used[ex.doc_id]) {
                used[ex.doc_id] = true;
            }
        }
        for (const Document& d : source_docs)
            if (used.count(d.doc_id)) out.docs.push_back(d);
    }
    return out;
}

int run_train(const fs::path& corpus, const fs::path& docs_path, const fs::path& config_path,
              uint64_t seed, const fs::path& out, const fs::path& log_path,
              int64_t context_pad) {
    kv_config cfg = config_path.empty() ? kv_config{} : kv_config::parse_file(config_path);
    TrainConfig tcfg = parse_train_config(cfg);
    ModelDims dims = parse_model_dims(cfg);
    if (context_pad < 0) context_pad = cfg_int(cfg, "train", "context_pad", 40);

    TrainFiles files = load_train_files(corpus, docs_path, context_pad);
    std::vector<std::string> queries;
    for (const TrainingExample& ex : files.examples) queries.push_back(ex.query);
    Vocabulary vocab = Vocabulary::build(files.docs, queries);
    dims.vocab_size = vocab.size();

    TrainDataset data = build_dataset(files.examples, files.docs, vocab);

    std::vector<StepLog> steps;
    ScanModel model = train_model(dims, vocab, data, tcfg, seed,
                                  [&](const StepLog& s) { steps.push_back(s); });
    save_checkpoint(out, model);
    if (!log_path.empty()) save_jsonl(log_path, steps);

    manifest m;
    m.add("command", "train");
    m.add("seed", static_cast<int64_t>(seed));
    manifest_input(m, "corpus", corpus);
    manifest_input(m, "docs", docs_path);
    if (!config_path.empty()) manifest_input(m, "config", config_path);
    m.add("from_synth", files.from_synth ? "true" : "false");
    m.add("context_pad", context_pad);
    m.add("examples", static_cast<int64_t>(files.examples.size()));
    m.add("vocab_size", static_cast<int64_t>(vocab.size()));
    m.add("param_count", dims.param_count());
    m.add("peak_lr", tcfg.peak_lr);
    m.add("min_lr", tcfg.min_lr);
    m.add("warmup_fraction", tcfg.warmup_fraction);
    m.add("effective_batch", tcfg.effective_batch);
    m.add("epochs", tcfg.epochs);
    m.add("steps", static_cast<int64_t>(steps.size()));
    if (!steps.empty()) m.add("final_loss", steps.back().loss);
    manifest_input(m, "out", out);
    m.write(manifest_path(out));
    std::cout << "trained " << steps.size() << " steps on " << files.examples.size()
              << " examples -> " << out.string() << "\n";
    return 0;
}

int run_score(const fs::path& model_path, const fs::path& corpus, const fs::path& query_file,
              const fs::path& out, const WindowConfig& wcfg) {
    ScanModel model = load_checkpoint(model_path);
    std::vector<Document> docs = load_documents(corpus);
    auto by_id = docs_by_id(docs);
    auto queries = load_jsonl<QueryRecord>(query_file);

    std::vector<ScoreRecord> records;
    for (const QueryRecord& q : queries) {
        const Document& doc = doc_for(by_id, q.doc_id, "query '" + q.query_id + "'");
        TokenizedInput input = tokenize(q.text, doc, model.vocab);
        SentenceScores scores = score_windowed(model, input, wcfg);
        records.push_back({q.doc_id, q.query_id, std::move(scores.logits)});
    }
    save_jsonl(out, records);

    manifest m;
    m.add("command", "score");
    manifest_input(m, "model", model_path);
    manifest_input(m, "corpus", corpus);
    manifest_input(m, "query_file", query_file);
    m.add("mode", to_string(wcfg.mode));
    m.add("window", wcfg.window_tokens);
    m.add("stride", wcfg.stride_tokens);
    m.add("queries", static_cast<int64_t>(records.size()));
    manifest_input(m, "out", out);
    m.write(manifest_path(out));
    std::cout << "scored " << records.size() << " queries -> " << out.string() << "\n";
    return 0;
}

int run_retrieve(const fs::path& model_path, const fs::path& corpus, const fs::path& query_file,
                 int64_t k, const fs::path& out, const WindowConfig& wcfg) {
    if (k <= 0) fail("--k must be positive");
    ScanModel model = load_checkpoint(model_path);
    std::vector<Document> docs = load_documents(corpus);
    auto by_id = docs_by_id(docs);
    auto queries = load_jsonl<QueryRecord>(query_file);

    std::vector<RetrievedRecord> records;
    for (const QueryRecord& q : queries) {
        const Document& doc = doc_for(by_id, q.doc_id, "query '" + q.query_id + "'");
        TokenizedInput input = tokenize(q.text, doc, model.vocab);
        SentenceScores scores = score_windowed(model, input, wcfg);
        RetrievedRecord rec;
        rec.doc_id = q.doc_id;
        rec.query_id = q.query_id;
        rec.mode = to_string(wcfg.mode);
        for (int64_t idx : select_top_k(scores, k))
            rec.selected.push_back({idx, scores.logits[static_cast<size_t>(idx)]});
        records.push_back(std::move(rec));
    }
    save_jsonl(out, records);

    manifest m;
    m.add("command", "retrieve");
    manifest_input(m, "model", model_path);
    manifest_input(m, "corpus", corpus);
    manifest_input(m, "queries", query_file);
    m.add("k", k);
    m.add("mode", to_string(wcfg.mode));
    m.add("window", wcfg.window_tokens);
    m.add("stride", wcfg.stride_tokens);
    m.add("queries_scored", static_cast<int64_t>(records.size()));
    manifest_input(m, "out", out);
    m.write(manifest_path(out));
    std::cout << "retrieved top-" << k << " for " << records.size() << " queries -> "
              << out.string() << "\n";
    return 0;
}

int run_synth(const std::string& strategy, const fs::path& corpus, const std::string& llm_sel,
              int64_t per_doc, uint64_t seed, int retries, const fs::path& out,
              const fs::path& skips_path) {
    std::vector<Document> docs = load_documents(corpus);
    std::unique_ptr<LlmClient> llm = make_llm(llm_sel);
    HashedBowEmbedder embedder;
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.retries = retries;
    SynthBatch batch = generate_synth(docs, strategy, per_doc, *llm, embedder, cfg);
    save_jsonl(out, batch.records);
    if (!skips_path.empty()) {
        std::vector<json> rows;
        for (const SynthSkip& s : batch.skipped)
            rows.push_back({{"doc_id", s.doc_id},
                            {"strategy", s.strategy},
                            {"record_index", s.record_index},
                            {"reason", s.reason}});
        save_jsonl(skips_path, rows);
    }

    manifest m;
    m.add("command", "synth");
    m.add("strategy", strategy);
    m.add("llm", llm_sel);
    m.add("per_doc", per_doc);
    m.add("seed", static_cast<int64_t>(seed));
    m.add("retries", static_cast<int64_t>(retries));
    manifest_input(m, "corpus", corpus);
    m.add("records", static_cast<int64_t>(batch.records.size()));
    m.add("skipped", static_cast<int64_t>(batch.skipped.size()));
    manifest_input(m, "out", out);
    m.write(manifest_path(out));
    std::cout << "generated " << batch.records.size() << " records (" << batch.skipped.size()
              << " skipped) -> " << out.string() << "\n";
    return 0;
}

int run_decontam(const fs::path& synth_path, const fs::path& docs_path, const fs::path& testset,
                 double threshold, const fs::path& out, const fs::path& report) {
    auto records = load_jsonl<SynthRecord>(synth_path);
    std::vector<Document> docs = load_documents(docs_path);
    std::vector<Document> test_docs = load_documents(testset);
    std::vector<std::string> test_sentences;
    for (const Document& d : test_docs)
        for (int64_t s = 0; s < d.sentence_count(); ++s)
            test_sentences.push_back(std::string(d.sentence_text(s)));

    DecontamResult result = decontaminate(records, docs, test_sentences, threshold);
    save_jsonl(out, result.kept);
    if (!report.empty()) {
        std::vector<json> rows;
        for (const DecontamRow& r : result.dropped)
            rows.push_back({{"record_index", r.record_index},
                            {"doc_id", r.doc_id},
                            {"overlap", r.overlap}});
        save_jsonl(report, rows);
    }

    manifest m;
    m.add("command", "decontam");
    manifest_input(m, "synth", synth_path);
    manifest_input(m, "docs", docs_path);
    manifest_input(m, "testset", testset);
    m.add("threshold", threshold);
    m.add("kept", static_cast<int64_t>(result.kept.size()));
    m.add("dropped", static_cast<int64_t>(result.dropped.size()));
    manifest_input(m, "out", out);
    m.write(manifest_path(out));
    std::cout << "kept " << result.kept.size() << ", dropped " << result.dropped.size()
              << " -> " << out.string() << "\n";
    return 0;
}

// Runs may be ranked directly or come from `retrieve`; retrieved records
// are ranked by logit, best first.
std::vector<RankedRun> load_runs(const fs::path& path) {
    std::vector<RankedRun> runs;
    for_each_jsonl(path, [&](const json& j, size_t) {
        if (j.contains("ranked")) {
            runs.push_back(j.get<RankedRun>());
            return;
        }
        auto rec = j.get<RetrievedRecord>();
        std::vector<std::pair<double, int64_t>> order;
        for (const SelectedSentence& s : rec.selected)
            order.emplace_back(-s.logit, s.sentence_index);
        std::sort(order.begin(), order.end());
        RankedRun run;
        run.query_id = rec.query_id;
        for (const auto& [neg, idx] : order) run.ranked.push_back(idx);
        runs.push_back(std::move(run));
    });
    return runs;
}

int run_eval(const fs::path& runs_path, const fs::path& judgments_path, const std::string& ks,
             const std::string& metrics_csv, const fs::path& out) {
    auto runs = load_runs(runs_path);
    auto judgments = load_jsonl<Judgment>(judgments_path);
    std::vector<int64_t> cutoffs = parse_k_list(ks);

    std::vector<std::pair<std::string, MetricKind>> kinds;
    for (const std::string& part : split(metrics_csv, ',')) {
        std::string p = trim(part);
        if (p == "recall") kinds.emplace_back(p, MetricKind::recall);
        else if (p == "precision") kinds.emplace_back(p, MetricKind::precision);
        else if (p == "ndcg") kinds.emplace_back(p, MetricKind::ndcg);
        else if (!p.empty()) fail("unknown metric '" + p + "' (recall, precision, ndcg)");
    }
    if (kinds.empty()) fail("--metric selects no metrics");

    json rows = json::array();
    for (const auto& [name, kind] : kinds) {
        for (int64_t k : cutoffs) {
            MetricSummary s = evaluate_runs(runs, judgments, kind, k);
            rows.push_back({{"metric", name}, {"k", k}, {"mean", s.mean}, {"n", s.n}});
        }
    }
    json report = {{"runs", runs_path.string()},
                   {"judgments", judgments_path.string()},
                   {"metrics", rows}};
    save_json(out, report);

    manifest m;
    m.add("command", "eval");
    manifest_input(m, "runs", runs_path);
    manifest_input(m, "judgments", judgments_path);
    m.add("k", ks);
    m.add("metric", metrics_csv);
    manifest_input(m, "out", out);
    m.write(manifest_path(out));
    for (const json& row : rows)
        std::cout << row["metric"].get<std::string>() << "@" << row["k"].get<int64_t>() << " = "
                  << row["mean"].get<double>() << " (n=" << row["n"].get<int64_t>() << ")\n";
    return 0;
}

int run_baseline(const std::string& retriever, const std::string& mode_str,
                 const fs::path& corpus, const fs::path& query_file, const fs::path& out,
                 const fs::path& units_out) {
    BaselineMode mode = baseline_mode_from_string(mode_str);
    std::vector<Document> docs = load_documents(corpus);
    auto by_id = docs_by_id(docs);
    auto queries = load_jsonl<QueryRecord>(query_file);
    HashedBowEmbedder embedder;

    std::vector<RankedRun> runs;
    std::vector<json> unit_rows;
    std::map<std::string, bool> units_written;
    for (const QueryRecord& q : queries) {
        const Document& doc = doc_for(by_id, q.doc_id, "query '" + q.query_id + "'");
        std::vector<RetrievalUnit> units = mode == BaselineMode::chunks5
                                               ? make_word_chunks(doc)
                                               : make_sentence_units(doc);
        if (retriever == "bm25") {
            runs.push_back(bm25_rank(q.text, units, q.query_id));
        } else if (retriever == "embed") {
            runs.push_back(embedding_rank(q.text, units, q.query_id, embedder));
        } else {
            fail("unknown --retriever '" + retriever + "' (bm25 or embed)");
        }
        if (!units_out.empty() && !units_written[q.doc_id]) {
            units_written[q.doc_id] = true;
            for (const RetrievalUnit& u : units)
                unit_rows.push_back({{"doc_id", q.doc_id},
                                     {"unit_index", u.unit_index},
                                     {"sentence_indices", u.sentence_indices}});
        }
    }
    save_jsonl(out, runs);
    if (!units_out.empty()) save_jsonl(units_out, unit_rows);

    manifest m;
    m.add("command", "baseline");
    m.add("retriever", retriever);
    m.add("mode", mode_str);
    m.add("k", baseline_k(mode));
    manifest_input(m, "corpus", corpus);
    manifest_input(m, "queries", query_file);
    m.add("queries_ranked", static_cast<int64_t>(runs.size()));
    manifest_input(m, "out", out);
    m.write(manifest_path(out));
    std::cout << retriever << " " << mode_str << " ranked " << runs.size() << " queries -> "
              << out.string() << "\n";
    return 0;
}

int run_flops(const fs::path& spec_path, const fs::path& workload_path,
              const std::string& padding, int64_t batch, const std::string& bucketing,
              int64_t window, int64_t stride, const fs::path& out) {
    kv_config spec = kv_config::parse_file(spec_path);
    ModelSpecInfo info;
    info.family = model_family_from_string(
        spec.has("model.family") ? spec.get_string("model.family") : spec.get_string("family"));
    info.param_count = cfg_double(spec, "model", "param_count", 0.0);
    if (info.param_count <= 0) fail("model spec needs a positive param_count");
    info.n_layers = cfg_int(spec, "model", "n_layers", 0);
    info.d_model = cfg_int(spec, "model", "d_model", 0);

    auto rows = load_jsonl<WorkloadRecord>(workload_path);
    WorkloadSpec workload;
    for (const WorkloadRecord& r : rows) workload.doc_tokens.push_back(r.tokens);
    workload.batch_size = batch;
    workload.padding = parse_on_off(padding, "--padding");
    workload.length_bucketing = parse_on_off(bucketing, "--bucketing");

    double linear = flops_linear(info, workload);
    double attention = info.family == ModelFamily::transformer
                           ? flops_attention(info, workload, window, stride)
                           : 0.0;
    double total = linear + attention;
    json report = {{"family", to_string(info.family)},
                   {"param_count", info.param_count},
                   {"documents", static_cast<int64_t>(workload.doc_tokens.size())},
                   {"processed_tokens", processed_tokens(workload)},
                   {"padding", workload.padding},
                   {"length_bucketing", workload.length_bucketing},
                   {"batch_size", workload.batch_size},
                   {"flops_linear", linear},
                   {"flops_attention", attention},
                   {"flops_total", total},
                   {"tflops_total", total / 1e12}};
    std::cout << report.dump(2) << "\n";
    if (!out.empty()) {
        save_json(out, report);
        manifest m;
        m.add("command", "flops");
        manifest_input(m, "model_spec", spec_path);
        manifest_input(m, "workload", workload_path);
        m.add("padding", padding);
        m.add("batch", batch);
        m.add("bucketing", bucketing);
        manifest_input(m, "out", out);
        m.write(manifest_path(out));
    }
    return 0;
}

int run_bench(const fs::path& model_path, const fs::path& corpus, int64_t repeats,
              int64_t warmup, const fs::path& out) {
    ScanModel model = load_checkpoint(model_path);
    std::vector<Document> docs = load_documents(corpus);
    if (docs.empty()) fail("bench corpus holds no documents");

    std::vector<TokenizedInput> inputs;
    int64_t total_tokens = 0;
    for (const Document& d : docs) {
        inputs.push_back(tokenize("", d, model.vocab));
        total_tokens += inputs.back().total_tokens();
    }
    ThroughputStats stats = measure_throughput(
        [&] {
            for (const TokenizedInput& in : inputs) {
                volatile double sink = forward_logits(model, in.tokens).back();
                (void)sink;
            }
        },
        warmup, repeats);

    double params = static_cast<double>(model.dims.param_count());
    double flops_per_pass = 2.0 * params * static_cast<double>(total_tokens);
    double tokens_per_s = stats.median_ms > 0
                              ? static_cast<double>(total_tokens) / (stats.median_ms / 1000.0)
                              : 0.0;
    json report = {{"documents", static_cast<int64_t>(docs.size())},
                   {"total_tokens", total_tokens},
                   {"param_count", params},
                   {"repeats", stats.repeats},
                   {"warmup", warmup},
                   {"mean_ms", stats.mean_ms},
                   {"median_ms", stats.median_ms},
                   {"p95_ms", stats.p95_ms},
                   {"tokens_per_second", tokens_per_s},
                   {"flops_per_pass", flops_per_pass},
                   {"achieved_tflops_per_second",
                    stats.median_ms > 0 ? flops_per_pass / (stats.median_ms / 1000.0) / 1e12
                                        : 0.0}};
    std::cout << report.dump(2) << "\n";
    if (!out.empty()) {
        save_json(out, report);
        manifest m;
        m.add("command", "bench");
        manifest_input(m, "model", model_path);
        manifest_input(m, "corpus", corpus);
        m.add("repeats", repeats);
        m.add("warmup", warmup);
        manifest_input(m, "out", out);
        m.write(manifest_path(out));
    }
    return 0;
}

int run_ablate(const std::string& axis_str, const fs::path& plan_path, const fs::path& out) {
    kv_config plan = kv_config::parse_file(plan_path);
    AblationAxis axis = ablation_axis_from_string(axis_str);
    std::vector<std::string> variants = plan.get_list("variants");

    std::vector<Document> eval_docs = load_documents(plan.get_string("eval_docs"));
    auto queries = load_jsonl<QueryRecord>(plan.get_string("queries"));
    auto judgments = load_jsonl<Judgment>(plan.get_string("judgments"));

    AblationInputs in;
    in.eval_docs = &eval_docs;
    in.queries = &queries;
    in.judgments = &judgments;
    in.k = plan.get_int("k", 1);
    in.seed = static_cast<uint64_t>(plan.get_int("seed", 0));
    in.context_pad = plan.get_int("context_pad", 40);
    in.train_config = parse_train_config(plan);
    in.dims = parse_model_dims(plan);

    ScanModel model;
    std::vector<SynthRecord> synth;
    std::vector<Document> synth_docs;
    if (axis == AblationAxis::context_mode) {
        model = load_checkpoint(plan.get_string("model"));
        in.model = &model;
    } else {
        synth = load_jsonl<SynthRecord>(plan.get_string("synth"));
        synth_docs = load_documents(plan.get_string("synth_docs"));
        in.synth = &synth;
        in.synth_docs = &synth_docs;
    }

    AblationReport report = run_ablation(axis, variants, in);
    json rows = json::array();
    for (const AblationRow& r : report.rows)
        rows.push_back({{"variant", r.variant}, {"metric", r.metric}, {"value", r.value},
                        {"n", r.n}});
    json doc = {{"axis", report.axis}, {"rows", rows}, {"ordering", report.ordering}};
    save_json(out, doc);

    manifest m;
    m.add("command", "ablate");
    m.add("axis", axis_str);
    manifest_input(m, "plan", plan_path);
    manifest_input(m, "out", out);
    m.write(manifest_path(out));
    std::cout << doc.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spscan: single-pass sentence scoring over long documents"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Read raw text files into a document corpus");
    std::string in_input, in_out, in_tag = "other";
    ingest->add_option("--input", in_input, "Directory of text files")->required();
    ingest->add_option("--out", in_out, "Output corpus JSONL")->required();
    ingest->add_option("--source-tag", in_tag, "Source tag for every document");

    // train
    auto* train = app.add_subcommand("train", "Train a scorer on examples or synthetic records");
    std::string tr_corpus, tr_docs, tr_config, tr_out, tr_log;
    uint64_t tr_seed = 17;
    int64_t tr_pad = -1;
    train->add_option("--corpus", tr_corpus, "Training records JSONL (examples or synthetic)")
        ->required();
    train->add_option("--docs", tr_docs, "Document corpus JSONL the records reference")
        ->required();
    train->add_option("--config", tr_config, "Training config file");
    train->add_option("--seed", tr_seed, "Training seed");
    train->add_option("--out", tr_out, "Checkpoint path")->required();
    train->add_option("--log", tr_log, "Per-step metrics JSONL");
    train->add_option("--context-pad", tr_pad,
                      "Sentences of context kept around synthetic chunks");

    // score
    auto* score = app.add_subcommand("score", "Emit per-sentence logits for each query");
    std::string sc_model, sc_corpus, sc_queries, sc_out, sc_mode = "full";
    int64_t sc_window = 120000, sc_stride = 60000, sc_chunk = 1024;
    score->add_option("--model", sc_model, "Checkpoint path")->required();
    score->add_option("--corpus", sc_corpus, "Document corpus JSONL")->required();
    score->add_option("--query-file", sc_queries, "Queries JSONL")->required();
    score->add_option("--out", sc_out, "Scores JSONL")->required();
    score->add_option("--mode", sc_mode, "full | sliding | chunk_sentence | chunk_1024");
    score->add_option("--window", sc_window, "Window size in document tokens");
    score->add_option("--stride", sc_stride, "Window stride in document tokens");
    score->add_option("--chunk-tokens", sc_chunk, "Chunk size for chunk_1024 mode");

    // retrieve
    auto* retrieve = app.add_subcommand("retrieve", "Select top-k sentences per query");
    std::string rt_model, rt_corpus, rt_queries, rt_out, rt_mode = "sliding";
    int64_t rt_k = 50, rt_window = 120000, rt_stride = 60000, rt_chunk = 1024;
    retrieve->add_option("--model", rt_model, "Checkpoint path")->required();
    retrieve->add_option("--corpus", rt_corpus, "Document corpus JSONL")->required();
    retrieve->add_option("--queries", rt_queries, "Queries JSONL")->required();
    retrieve->add_option("--k", rt_k, "Sentences to keep");
    retrieve->add_option("--window", rt_window, "Window size in document tokens");
    retrieve->add_option("--stride", rt_stride, "Window stride in document tokens");
    retrieve->add_option("--mode", rt_mode, "full | sliding | chunk_sentence | chunk_1024");
    retrieve->add_option("--chunk-tokens", rt_chunk, "Chunk size for chunk_1024 mode");
    retrieve->add_option("--out", rt_out, "Retrieved JSONL")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "Generate synthetic training records");
    std::string sy_strategy, sy_corpus, sy_llm = "mock", sy_out, sy_skips;
    int64_t sy_per_doc = 1;
    uint64_t sy_seed = 0;
    int sy_retries = 3;
    synth->add_option("--strategy", sy_strategy, "link | pair | chunk")->required();
    synth->add_option("--corpus", sy_corpus, "Document corpus JSONL")->required();
    synth->add_option("--llm", sy_llm, "mock or http://host:port/path");
    synth->add_option("--per-doc", sy_per_doc, "Records per document");
    synth->add_option("--seed", sy_seed, "Generation seed");
    synth->add_option("--retries", sy_retries, "Attempts per model call");
    synth->add_option("--out", sy_out, "Records JSONL")->required();
    synth->add_option("--skips", sy_skips, "Skip report JSONL");

    // decontam
    auto* decontam = app.add_subcommand("decontam", "Drop records overlapping a test set");
    std::string dc_synth, dc_docs, dc_testset, dc_out, dc_report;
    double dc_threshold = 0.01;
    decontam->add_option("--synth", dc_synth, "Synthetic records JSONL")->required();
    decontam->add_option("--docs", dc_docs, "Corpus the records reference")->required();
    decontam->add_option("--testset", dc_testset, "Test corpus JSONL")->required();
    decontam->add_option("--threshold", dc_threshold, "Maximum allowed sentence overlap");
    decontam->add_option("--out", dc_out, "Kept records JSONL")->required();
    decontam->add_option("--report", dc_report, "Dropped-record report JSONL");

    // eval
    auto* eval = app.add_subcommand("eval", "Score ranked runs against judgments");
    std::string ev_runs, ev_judgments, ev_k = "1,5,10,50", ev_metrics = "recall,precision,ndcg",
                ev_out;
    eval->add_option("--runs", ev_runs, "Ranked runs JSONL")->required();
    eval->add_option("--judgments", ev_judgments, "Judgments JSONL")->required();
    eval->add_option("--k", ev_k, "Comma-separated cutoffs");
    eval->add_option("--metric", ev_metrics, "Comma-separated metrics");
    eval->add_option("--out", ev_out, "Report JSON")->required();

    // baseline
    auto* baseline = app.add_subcommand("baseline", "Rank with BM25 or embedding retrieval");
    std::string bl_retriever, bl_mode, bl_corpus, bl_queries, bl_out, bl_units;
    baseline->add_option("--retriever", bl_retriever, "bm25 | embed")->required();
    baseline->add_option("--mode", bl_mode, "chunks5 | sentences50")->required();
    baseline->add_option("--corpus", bl_corpus, "Document corpus JSONL")->required();
    baseline->add_option("--queries", bl_queries, "Queries JSONL")->required();
    baseline->add_option("--out", bl_out, "Ranked runs JSONL")->required();
    baseline->add_option("--units-out", bl_units, "Unit composition JSONL");

    // flops
    auto* flops = app.add_subcommand("flops", "Estimate workload compute from a model spec");
    std::string fl_spec, fl_workload, fl_padding = "off", fl_bucketing = "off", fl_out;
    int64_t fl_batch = 1, fl_window = 120000, fl_stride = 60000;
    flops->add_option("--model-spec", fl_spec, "Model spec config")->required();
    flops->add_option("--workload", fl_workload, "Per-document token counts JSONL")->required();
    flops->add_option("--padding", fl_padding, "on | off: count padded positions");
    flops->add_option("--batch", fl_batch, "Batch size for padding accounting");
    flops->add_option("--bucketing", fl_bucketing, "on | off: sort by length before batching");
    flops->add_option("--window", fl_window, "Attention window in tokens");
    flops->add_option("--stride", fl_stride, "Attention window stride");
    flops->add_option("--out", fl_out, "Report JSON");

    // bench
    auto* bench = app.add_subcommand("bench", "Measure forward-pass latency on a corpus");
    std::string bn_model, bn_corpus, bn_out;
    int64_t bn_repeats = 20, bn_warmup = 3;
    bench->add_option("--model", bn_model, "Checkpoint path")->required();
    bench->add_option("--corpus", bn_corpus, "Document corpus JSONL")->required();
    bench->add_option("--repeats", bn_repeats, "Timed passes");
    bench->add_option("--warmup", bn_warmup, "Discarded warmup passes");
    bench->add_option("--out", bn_out, "Report JSON");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "Run one ablation axis from a plan file");
    std::string ab_axis, ab_plan, ab_out;
    ablate->add_option("--axis", ab_axis, "context_mode | chunk_position | train_length_mix")
        ->required();
    ablate->add_option("--plan", ab_plan, "Plan config file")->required();
    ablate->add_option("--out", ab_out, "Report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*ingest) return run_ingest(in_input, in_out, in_tag);
        if (*train) return run_train(tr_corpus, tr_docs, tr_config, tr_seed, tr_out, tr_log,
                                     tr_pad);
        if (*score)
            return run_score(sc_model, sc_corpus, sc_queries, sc_out,
                             window_from_flags(sc_mode, sc_window, sc_stride, sc_chunk));
        if (*retrieve)
            return run_retrieve(rt_model, rt_corpus, rt_queries, rt_k, rt_out,
                                window_from_flags(rt_mode, rt_window, rt_stride, rt_chunk));
        if (*synth)
            return run_synth(sy_strategy, sy_corpus, sy_llm, sy_per_doc, sy_seed, sy_retries,
                             sy_out, sy_skips);
        if (*decontam)
            return run_decontam(dc_synth, dc_docs, dc_testset, dc_threshold, dc_out, dc_report);
        if (*eval) return run_eval(ev_runs, ev_judgments, ev_k, ev_metrics, ev_out);
        if (*baseline)
            return run_baseline(bl_retriever, bl_mode, bl_corpus, bl_queries, bl_out, bl_units);
        if (*flops)
            return run_flops(fl_spec, fl_workload, fl_padding, fl_batch, fl_bucketing,
                             fl_window, fl_stride, fl_out);
        if (*bench) return run_bench(bn_model, bn_corpus, bn_repeats, bn_warmup, bn_out);
        if (*ablate) return run_ablate(ab_axis, ab_plan, ab_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand selected\n";
    return 2;
}
