#include "spscan/ablation.hpp"

#include <algorithm>
#include <map>

#include "spscan/synthgen.hpp"

namespace spscan {

std::string to_string(AblationAxis axis) {
    switch (axis) {
        case AblationAxis::context_mode: return "context_mode";
        case AblationAxis::chunk_position: return "chunk_position";
        case AblationAxis::train_length_mix: return "train_length_mix";
    }
    fail("unknown ablation axis");
}

AblationAxis ablation_axis_from_string(std::string_view s) {
    if (s == "context_mode") return AblationAxis::context_mode;
    if (s == "chunk_position") return AblationAxis::chunk_position;
    if (s == "train_length_mix") return AblationAxis::train_length_mix;
    fail("unknown ablation axis: " + std::string(s));
}

namespace {

std::vector<int64_t> rank_all(const SentenceScores& scores) {
    std::vector<int64_t> order(scores.logits.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int64_t>(i);
    std::sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
        double la = scores.logits[static_cast<size_t>(a)];
        double lb = scores.logits[static_cast<size_t>(b)];
        return la != lb ? la > lb : a < b;
    });
    return order;
}

MetricSummary eval_model_recall(const ScanModel& model, const AblationInputs& in,
                                const WindowConfig& wcfg) {
    std::map<std::string_view, const Document*> by_id;
    for (const Document& d : *in.eval_docs) by_id[d.doc_id] = &d;
    std::vector<RankedRun> runs;
    for (const QueryRecord& q : *in.queries) {
        auto it = by_id.find(q.doc_id);
        if (it == by_id.end()) fail("query '" + q.query_id + "' names unknown doc");
        TokenizedInput input = tokenize(q.text, *it->second, model.vocab);
        runs.push_back({q.query_id, rank_all(score_windowed(model, input, wcfg))});
    }
    return evaluate_runs(runs, *in.judgments, MetricKind::recall, in.k);
}

void require_eval_inputs(const AblationInputs& in) {
    if (!in.eval_docs || !in.queries || !in.judgments)
        fail("ablation needs eval_docs, queries, and judgments");
}

// slice token count for a record's training view
int64_t view_tokens(const SynthRecord& rec, const Document& doc, int64_t pad) {
    int64_t lo = rec.chunk_a.begin, hi = rec.chunk_a.end;
    if (rec.chunk_b) {
        lo = std::min(lo, rec.chunk_b->begin);
        hi = std::max(hi, rec.chunk_b->end);
    }
    lo = std::max<int64_t>(0, lo - pad);
    hi = std::min(doc.sentence_count(), hi + pad);
    int64_t tokens = 0;
    for (int64_t s = lo; s < hi; ++s) tokens += count_word_tokens(doc.sentence_text(s));
    return tokens;
}

struct TrainSelection {
    std::vector<const SynthRecord*> records;
    int64_t total_tokens = 0;
};

MetricSummary train_and_eval(const AblationInputs& in, const TrainSelection& sel,
                             const std::string& variant) {
    if (sel.records.empty()) fail("ablation variant '" + variant + "' selects no records");
    std::map<std::string_view, const Document*> by_id;
    for (const Document& d : *in.synth_docs) by_id[d.doc_id] = &d;

    std::vector<Document> docs;
    std::vector<TrainingExample> examples;
    std::vector<std::string> extra_texts;
    for (const SynthRecord* rec : sel.records) {
        auto it = by_id.find(rec->doc_id);
        if (it == by_id.end()) fail("synth record names unknown doc '" + rec->doc_id + "'");
        SynthTrainingView view = synth_to_example(*rec, *it->second, in.context_pad);
        extra_texts.push_back(view.example.query);
        docs.push_back(std::move(view.doc));
        examples.push_back(std::move(view.example));
    }
    // evaluation docs and queries share the vocabulary so scoring is possible
    std::vector<Document> vocab_docs = docs;
    vocab_docs.insert(vocab_docs.end(), in.eval_docs->begin(), in.eval_docs->end());
    for (const QueryRecord& q : *in.queries) extra_texts.push_back(q.text);
    Vocabulary vocab = Vocabulary::build(vocab_docs, extra_texts);

    ModelDims dims = in.dims;
    dims.vocab_size = vocab.size();
    TrainDataset data = build_dataset(examples, docs, vocab);
    ScanModel model = train_model(dims, vocab, data, in.train_config, in.seed);

    WindowConfig wcfg;
    wcfg.mode = ScoreMode::full;
    return eval_model_recall(model, in, wcfg);
}

std::pair<double, double> parse_percent_range(const std::string& variant) {
    size_t dash = variant.find('-');
    if (dash == std::string::npos)
        fail("chunk_position variant '" + variant + "' is not of the form LO-HI");
    try {
        double lo = std::stod(variant.substr(0, dash)) / 100.0;
        double hi = std::stod(variant.substr(dash + 1)) / 100.0;
        if (lo < 0.0 || hi > 1.0 || lo >= hi) throw std::invalid_argument(variant);
        return {lo, hi};
    } catch (const std::exception&) {
        fail("chunk_position variant '" + variant + "' is not a valid percent range");
    }
}

int64_t length_bucket(int64_t tokens) {
    if (tokens <= 3000) return 2;
    if (tokens <= 7500) return 5;
    return 10;
}

std::vector<int64_t> parse_length_mix(const std::string& variant) {
    std::vector<int64_t> buckets;
    for (const std::string& part : split(variant, '+')) {
        if (part == "2k") buckets.push_back(2);
        else if (part == "5k") buckets.push_back(5);
        else if (part == "10k") buckets.push_back(10);
        else fail("train_length_mix variant part '" + part + "' unknown (want 2k/5k/10k)");
    }
    return buckets;
}

}  // namespace

AblationReport run_ablation(AblationAxis axis, const std::vector<std::string>& variants,
                            const AblationInputs& in) {
    if (variants.empty()) fail("ablation with no variants");
    require_eval_inputs(in);

    AblationReport report;
    report.axis = to_string(axis);
    std::string metric = "recall@" + std::to_string(in.k);

    if (axis == AblationAxis::context_mode) {
        if (!in.model) fail("context_mode ablation needs a trained model");
        for (const std::string& variant : variants) {
            WindowConfig wcfg;
            wcfg.mode = score_mode_from_string(variant);
            MetricSummary m = eval_model_recall(*in.model, in, wcfg);
            report.rows.push_back({variant, metric, m.mean, m.n});
        }
    } else {
        if (!in.synth || !in.synth_docs)
            fail("training ablations need synth records and their documents");
        std::map<std::string_view, const Document*> by_id;
        for (const Document& d : *in.synth_docs) by_id[d.doc_id] = &d;

        std::vector<TrainSelection> selections;
        for (const std::string& variant : variants) {
            TrainSelection sel;
            if (axis == AblationAxis::chunk_position) {
                auto [lo, hi] = parse_percent_range(variant);
                for (const SynthRecord& rec : *in.synth) {
                    auto it = by_id.find(rec.doc_id);
                    if (it == by_id.end())
                        fail("synth record names unknown doc '" + rec.doc_id + "'");
                    double n = static_cast<double>(it->second->sentence_count());
                    auto inside = [&](const SentenceRange& r) {
                        double mid = 0.5 * static_cast<double>(r.begin + r.end) / n;
                        return mid >= lo && mid < hi;
                    };
                    bool ok = inside(rec.chunk_a) && (!rec.chunk_b || inside(*rec.chunk_b));
                    if (ok) sel.records.push_back(&rec);
                }
            } else {
                std::vector<int64_t> buckets = parse_length_mix(variant);
                for (const SynthRecord& rec : *in.synth) {
                    auto it = by_id.find(rec.doc_id);
                    if (it == by_id.end())
                        fail("synth record names unknown doc '" + rec.doc_id + "'");
                    int64_t tokens = view_tokens(rec, *it->second, in.context_pad);
                    if (std::find(buckets.begin(), buckets.end(), length_bucket(tokens)) !=
                        buckets.end()) {
                        sel.records.push_back(&rec);
                        sel.total_tokens += tokens;
                    }
                }
            }
            if (sel.records.empty())
                fail("ablation variant '" + variant + "' selects no records");
            selections.push_back(std::move(sel));
        }

        // length mixes compare at a matched token budget
        if (axis == AblationAxis::train_length_mix) {
            int64_t budget = selections.front().total_tokens;
            for (const TrainSelection& sel : selections)
                budget = std::min(budget, sel.total_tokens);
            for (TrainSelection& sel : selections) {
                std::map<std::string_view, const Document*> docs_by_id;
                for (const Document& d : *in.synth_docs) docs_by_id[d.doc_id] = &d;
                std::vector<const SynthRecord*> trimmed;
                int64_t used = 0;
                for (const SynthRecord* rec : sel.records) {
                    if (!trimmed.empty() && used >= budget) break;
                    trimmed.push_back(rec);
                    used += view_tokens(*rec, *docs_by_id.at(rec->doc_id), in.context_pad);
                }
                sel.records = std::move(trimmed);
                sel.total_tokens = used;
            }
        }

        for (size_t v = 0; v < variants.size(); ++v) {
            MetricSummary m = train_and_eval(in, selections[v], variants[v]);
            report.rows.push_back({variants[v], metric, m.mean, m.n});
            report.rows.push_back({variants[v], "train_records",
                                   static_cast<double>(selections[v].records.size()),
                                   static_cast<int64_t>(selections[v].records.size())});
        }
    }

    // best-first variant ordering by the headline metric
    std::vector<std::pair<double, std::string>> ranked;
    for (const AblationRow& row : report.rows)
        if (row.metric == metric) ranked.emplace_back(-row.value, row.variant);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [neg, variant] : ranked) report.ordering.push_back(variant);
    return report;
}

}  // namespace spscan
