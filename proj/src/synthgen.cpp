#include "spscan/synthgen.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

#include "spscan/jsonl.hpp"
#include "spscan/prompts.hpp"
#include "spscan/prompts_data.hpp"
#include "spscan/vocab.hpp"

namespace spscan {

namespace {

// token count per sentence, prefix-summed: sums[i] = tokens in sentences [0,i)
std::vector<int64_t> token_prefix_sums(const Document& doc) {
    std::vector<int64_t> sums(static_cast<size_t>(doc.sentence_count()) + 1, 0);
    for (int64_t i = 0; i < doc.sentence_count(); ++i)
        sums[static_cast<size_t>(i) + 1] =
            sums[static_cast<size_t>(i)] + count_word_tokens(doc.sentence_text(i));
    return sums;
}

}  // namespace

std::optional<SentenceRange> sample_subsequence(const Document& doc, const SynthConfig& cfg,
                                                std::mt19937_64& rng) {
    int64_t n = doc.sentence_count();
    if (n == 0) return std::nullopt;
    std::vector<int64_t> sums = token_prefix_sums(doc);
    int64_t total = sums[static_cast<size_t>(n)];
    if (total <= cfg.min_subseq_tokens) return SentenceRange{0, n};

    // starts whose suffix still holds at least min tokens
    int64_t max_start = 0;
    while (max_start + 1 < n &&
           total - sums[static_cast<size_t>(max_start) + 1] >= cfg.min_subseq_tokens)
        ++max_start;
    int64_t start = static_cast<int64_t>(draw_u64(rng, 0, static_cast<uint64_t>(max_start)));

    int64_t end = start;
    while (end < n && sums[static_cast<size_t>(end)] - sums[static_cast<size_t>(start)] <
                          cfg.min_subseq_tokens)
        ++end;
    if (sums[static_cast<size_t>(end)] - sums[static_cast<size_t>(start)] > cfg.max_subseq_tokens)
        return std::nullopt;  // an oversized sentence straddles the minimum

    int64_t max_end = end;
    while (max_end < n && sums[static_cast<size_t>(max_end) + 1] -
                                  sums[static_cast<size_t>(start)] <=
                              cfg.max_subseq_tokens)
        ++max_end;
    end = static_cast<int64_t>(
        draw_u64(rng, static_cast<uint64_t>(end), static_cast<uint64_t>(max_end)));
    return SentenceRange{start, end};
}

namespace {

using validator = std::function<std::optional<std::string>(const json&)>;

// One staged call: completion, fence extraction, semantic validation, with
// retries for transport errors and malformed or invalid output alike.
std::optional<json> call_structured(LlmClient& llm, const std::string& prompt, int retries,
                                    const validator& validate, std::string* why) {
    std::string last = "no attempts made";
    for (int attempt = 0; attempt < retries; ++attempt) {
        std::string completion;
        try {
            completion = llm.complete(prompt);
        } catch (const std::exception& e) {
            last = std::string("request failed: ") + e.what();
            continue;
        }
        std::string parse_why;
        std::optional<json> parsed = extract_fenced_json(completion, &parse_why);
        if (!parsed) {
            last = "unparseable completion: " + parse_why;
            continue;
        }
        if (std::optional<std::string> err = validate(*parsed)) {
            last = "invalid completion: " + *err;
            continue;
        }
        return parsed;
    }
    if (why) *why = last;
    return std::nullopt;
}

std::optional<std::string> check_question(const json& j) {
    if (!j.contains("question") || !j["question"].is_string() ||
        j["question"].get<std::string>().empty())
        return "missing or empty 'question'";
    return std::nullopt;
}

// sorted, deduplicated label list; every label must fall inside one of the
// given ranges
std::optional<std::vector<int64_t>> read_labels(const json& j,
                                                const std::vector<SentenceRange>& ranges,
                                                std::string* err) {
    if (!j.contains("relevant_sentences") || !j["relevant_sentences"].is_array()) {
        *err = "missing array 'relevant_sentences'";
        return std::nullopt;
    }
    std::set<int64_t> labels;
    for (const json& v : j["relevant_sentences"]) {
        if (!v.is_number_integer()) {
            *err = "non-integer sentence label";
            return std::nullopt;
        }
        int64_t idx = v.get<int64_t>();
        bool inside = false;
        for (const SentenceRange& r : ranges) inside |= idx >= r.begin && idx < r.end;
        if (!inside) {
            *err = "label " + std::to_string(idx) + " outside the given chunks";
            return std::nullopt;
        }
        labels.insert(idx);
    }
    if (labels.empty()) {
        *err = "empty label list";
        return std::nullopt;
    }
    return std::vector<int64_t>(labels.begin(), labels.end());
}

validator question_and_labels(const std::vector<SentenceRange>& ranges) {
    return [ranges](const json& j) -> std::optional<std::string> {
        if (auto err = check_question(j)) return err;
        std::string label_err;
        if (!read_labels(j, ranges, &label_err)) return label_err;
        return std::nullopt;
    };
}

SentenceRange random_chunk(const SentenceRange& slice, int64_t chunk_sentences,
                           std::mt19937_64& rng) {
    if (slice.size() <= chunk_sentences) return slice;
    int64_t start = slice.begin + static_cast<int64_t>(draw_u64(
                                      rng, 0, static_cast<uint64_t>(slice.size() - chunk_sentences)));
    return {start, start + chunk_sentences};
}

std::optional<SynthRecord> gen_chunk(const Document& doc, const SentenceRange& slice,
                                     LlmClient& llm, const SynthConfig& cfg,
                                     std::mt19937_64& rng, std::string* why) {
    SentenceRange chunk = random_chunk(slice, cfg.chunk_sentences, rng);
    std::string prompt = prompts::render(
        prompts::question_from_chunk,
        {{"SENTENCES", prompts::render_sentences(doc, chunk.begin, chunk.end)}});
    std::optional<json> j =
        call_structured(llm, prompt, cfg.retries, question_and_labels({chunk}), why);
    if (!j) return std::nullopt;

    SynthRecord rec;
    rec.doc_id = doc.doc_id;
    rec.strategy = "chunk";
    rec.question = (*j)["question"].get<std::string>();
    rec.chunk_a = chunk;
    std::string err;
    rec.labeled_sentences = *read_labels(*j, {chunk}, &err);
    return rec;
}

std::optional<SynthRecord> gen_pair(const Document& doc, const SentenceRange& slice,
                                    LlmClient& llm, EmbeddingProvider& embedder,
                                    const SynthConfig& cfg, std::mt19937_64& rng,
                                    std::string* why) {
    std::vector<SentenceRange> blocks;
    for (int64_t b = slice.begin; b + cfg.chunk_sentences <= slice.end;
         b += cfg.chunk_sentences)
        blocks.push_back({b, b + cfg.chunk_sentences});
    if (blocks.size() < 2) {
        *why = "subsequence holds fewer than two disjoint chunks";
        return std::nullopt;
    }

    size_t a_idx = static_cast<size_t>(draw_u64(rng, 0, blocks.size() - 1));
    auto block_text = [&](const SentenceRange& r) {
        return std::string(std::string_view(doc.text).substr(
            static_cast<size_t>(doc.sentences[static_cast<size_t>(r.begin)].begin),
            static_cast<size_t>(doc.sentences[static_cast<size_t>(r.end - 1)].end -
                                doc.sentences[static_cast<size_t>(r.begin)].begin)));
    };
    std::vector<double> a_emb = embedder.embed(block_text(blocks[a_idx]));

    // most similar other block; ties resolve to the earlier block
    size_t best = blocks.size();
    double best_sim = 0.0;
    for (size_t b = 0; b < blocks.size(); ++b) {
        if (b == a_idx) continue;
        double sim = cosine_similarity(a_emb, embedder.embed(block_text(blocks[b])));
        if (best == blocks.size() || sim > best_sim) {
            best = b;
            best_sim = sim;
        }
    }
    SentenceRange chunk_a = blocks[a_idx], chunk_b = blocks[best];

    std::string prompt = prompts::render(
        prompts::question_from_pair,
        {{"CHUNK_A", prompts::render_sentences(doc, chunk_a.begin, chunk_a.end)},
         {"CHUNK_B", prompts::render_sentences(doc, chunk_b.begin, chunk_b.end)}});
    std::optional<json> j = call_structured(llm, prompt, cfg.retries,
                                            question_and_labels({chunk_a, chunk_b}), why);
    if (!j) return std::nullopt;

    SynthRecord rec;
    rec.doc_id = doc.doc_id;
    rec.strategy = "pair";
    rec.question = (*j)["question"].get<std::string>();
    rec.chunk_a = chunk_a;
    rec.chunk_b = chunk_b;
    std::string err;
    rec.labeled_sentences = *read_labels(*j, {chunk_a, chunk_b}, &err);
    return rec;
}

std::optional<SynthRecord> gen_link(const Document& doc, const SentenceRange& slice,
                                    LlmClient& llm, const SynthConfig& cfg,
                                    std::mt19937_64& rng, std::string* why) {
    SentenceRange initial = random_chunk(slice, cfg.chunk_sentences, rng);
    // discovery context: the initial chunk sits at one end of a wider window
    SentenceRange fwd{initial.begin, std::min(slice.end, initial.begin + cfg.context_sentences)};
    SentenceRange bwd{std::max(slice.begin, initial.end - cfg.context_sentences), initial.end};
    bool forward = draw_u64(rng, 0, 1) == 0;
    SentenceRange context = forward ? fwd : bwd;
    // a window holding nothing but the initial chunk cannot yield a link;
    // flip sides rather than burn retries on impossible geometry
    if (context.begin == initial.begin && context.end == initial.end)
        context = forward ? bwd : fwd;

    std::string discover = prompts::render(
        prompts::find_connections,
        {{"INITIAL_CHUNK", prompts::render_sentences(doc, initial.begin, initial.end)},
         {"CONTEXT", prompts::render_sentences(doc, context.begin, context.end)}});
    auto links_valid = [&](const json& j) -> std::optional<std::string> {
        if (!j.contains("links") || !j["links"].is_array()) return "missing array 'links'";
        for (const json& l : j["links"]) {
            if (!l.contains("start_sentence") || !l["start_sentence"].is_number_integer() ||
                !l.contains("end_sentence") || !l["end_sentence"].is_number_integer())
                return "link without integer sentence range";
            if (!l.contains("connection") || !l["connection"].is_string() ||
                l["connection"].get<std::string>().empty())
                return "link without connection description";
        }
        return std::nullopt;
    };
    std::optional<json> found = call_structured(llm, discover, cfg.retries, links_valid, why);
    if (!found) return std::nullopt;

    // first link that stays inside the context and clear of the initial chunk
    std::optional<SentenceRange> linked;
    std::string connection;
    for (const json& l : (*found)["links"]) {
        SentenceRange r{l["start_sentence"].get<int64_t>(), l["end_sentence"].get<int64_t>()};
        if (r.begin < context.begin || r.end > context.end || r.begin >= r.end) continue;
        if (r.begin < initial.end && initial.begin < r.end) continue;  // overlaps
        linked = r;
        connection = l["connection"].get<std::string>();
        break;
    }
    if (!linked) {
        *why = "no usable connection in the discovery window";
        return std::nullopt;
    }

    std::string ask = prompts::render(
        prompts::link_question,
        {{"CONNECTION", collapse_whitespace(connection)},
         {"CHUNK_A", prompts::render_sentences(doc, initial.begin, initial.end)},
         {"CHUNK_B", prompts::render_sentences(doc, linked->begin, linked->end)}});
    std::optional<json> asked = call_structured(
        llm, ask, cfg.retries,
        [](const json& j) { return check_question(j); }, why);
    if (!asked) return std::nullopt;
    std::string question = (*asked)["question"].get<std::string>();

    std::string label = prompts::render(
        prompts::label_sentences,
        {{"QUESTION", collapse_whitespace(question)},
         {"CHUNK_A", prompts::render_sentences(doc, initial.begin, initial.end)},
         {"CHUNK_B", prompts::render_sentences(doc, linked->begin, linked->end)}});
    std::optional<json> labeled = call_structured(
        llm, label, cfg.retries,
        [&](const json& j) -> std::optional<std::string> {
            std::string err;
            if (!read_labels(j, {initial, *linked}, &err)) return err;
            return std::nullopt;
        },
        why);
    if (!labeled) return std::nullopt;

    SynthRecord rec;
    rec.doc_id = doc.doc_id;
    rec.strategy = "link";
    rec.question = question;
    rec.chunk_a = initial;
    rec.chunk_b = *linked;
    std::string err;
    rec.labeled_sentences = *read_labels(*labeled, {initial, *linked}, &err);
    rec.connection = connection;
    return rec;
}

}  // namespace

SynthBatch generate_synth(const std::vector<Document>& docs, std::string_view strategy,
                          int64_t per_doc, LlmClient& llm, EmbeddingProvider& embedder,
                          const SynthConfig& cfg) {
    if (strategy != "chunk" && strategy != "pair" && strategy != "link")
        fail("unknown synth strategy: " + std::string(strategy));
    if (per_doc <= 0) fail("generate_synth: per_doc must be positive");

    SynthBatch batch;
    for (const Document& doc : docs) {
        for (int64_t i = 0; i < per_doc; ++i) {
            auto rng = fork_rng(cfg.seed, doc.doc_id + "#" + std::string(strategy) + "#" +
                                              std::to_string(i));
            std::string why;
            std::optional<SentenceRange> slice = sample_subsequence(doc, cfg, rng);
            if (!slice) {
                batch.skipped.push_back(
                    {doc.doc_id, std::string(strategy), i, "no in-range subsequence"});
                continue;
            }
            std::optional<SynthRecord> rec;
            if (strategy == "chunk") rec = gen_chunk(doc, *slice, llm, cfg, rng, &why);
            else if (strategy == "pair") rec = gen_pair(doc, *slice, llm, embedder, cfg, rng, &why);
            else rec = gen_link(doc, *slice, llm, cfg, rng, &why);
            if (rec)
                batch.records.push_back(std::move(*rec));
            else
                batch.skipped.push_back({doc.doc_id, std::string(strategy), i, why});
        }
    }
    return batch;
}

DecontamResult decontaminate(const std::vector<SynthRecord>& records,
                             const std::vector<Document>& docs,
                             const std::vector<std::string>& test_sentences,
                             double threshold) {
    std::map<std::string_view, const Document*> by_id;
    for (const Document& d : docs) by_id[d.doc_id] = &d;
    std::unordered_set<std::string> test_set;
    for (const std::string& s : test_sentences) test_set.insert(collapse_whitespace(s));

    DecontamResult out;
    for (size_t i = 0; i < records.size(); ++i) {
        const SynthRecord& rec = records[i];
        auto it = by_id.find(rec.doc_id);
        if (it == by_id.end()) fail("synth record references unknown doc '" + rec.doc_id + "'");
        const Document& doc = *it->second;

        std::set<int64_t> indices;
        for (int64_t s = rec.chunk_a.begin; s < rec.chunk_a.end; ++s) indices.insert(s);
        if (rec.chunk_b)
            for (int64_t s = rec.chunk_b->begin; s < rec.chunk_b->end; ++s) indices.insert(s);
        if (indices.empty()) fail("synth record " + std::to_string(i) + " has empty chunks");

        int64_t matched = 0;
        for (int64_t s : indices) {
            if (s < 0 || s >= doc.sentence_count())
                fail("synth record " + std::to_string(i) + " chunk exceeds doc '" + rec.doc_id +
                     "'");
            if (test_set.count(collapse_whitespace(doc.sentence_text(s)))) ++matched;
        }
        double overlap = static_cast<double>(matched) / static_cast<double>(indices.size());
        if (overlap > threshold)
            out.dropped.push_back({static_cast<int64_t>(i), rec.doc_id, overlap});
        else
            out.kept.push_back(rec);
    }
    return out;
}

SynthTrainingView synth_to_example(const SynthRecord& record, const Document& doc,
                                   int64_t context_pad) {
    int64_t lo = record.chunk_a.begin, hi = record.chunk_a.end;
    if (record.chunk_b) {
        lo = std::min(lo, record.chunk_b->begin);
        hi = std::max(hi, record.chunk_b->end);
    }
    lo = std::max<int64_t>(0, lo - context_pad);
    hi = std::min(doc.sentence_count(), hi + context_pad);

    SynthTrainingView view;
    view.doc = slice_document(doc, lo, hi);
    view.example.doc_id = view.doc.doc_id;
    view.example.query = record.question;
    view.example.labels.assign(static_cast<size_t>(hi - lo), 0);
    for (int64_t s : record.labeled_sentences) {
        if (s < lo || s >= hi)
            fail("synth record label " + std::to_string(s) + " outside chunks for doc '" +
                 record.doc_id + "'");
        view.example.labels[static_cast<size_t>(s - lo)] = 1;
    }
    return view;
}

}  // namespace spscan
