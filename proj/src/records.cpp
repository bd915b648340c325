#include "spscan/records.hpp"

namespace spscan {

void to_json(json& j, const QueryRecord& r) {
    j = json{{"query_id", r.query_id}, {"doc_id", r.doc_id}, {"text", r.text}};
}

void from_json(const json& j, QueryRecord& r) {
    r.query_id = require_field<std::string>(j, "query_id");
    r.doc_id = require_field<std::string>(j, "doc_id");
    r.text = require_field<std::string>(j, "text");
}

void to_json(json& j, const ScoreRecord& r) {
    j = json{{"doc_id", r.doc_id}, {"query_id", r.query_id}, {"logits", r.logits}};
}

void from_json(const json& j, ScoreRecord& r) {
    r.doc_id = require_field<std::string>(j, "doc_id");
    r.query_id = require_field<std::string>(j, "query_id");
    r.logits = require_field<std::vector<double>>(j, "logits");
}

void to_json(json& j, const SelectedSentence& r) {
    j = json{{"sentence_index", r.sentence_index}, {"logit", r.logit}};
}

void from_json(const json& j, SelectedSentence& r) {
    r.sentence_index = require_field<int64_t>(j, "sentence_index");
    r.logit = require_field<double>(j, "logit");
}

void to_json(json& j, const RetrievedRecord& r) {
    j = json{{"doc_id", r.doc_id},
             {"query_id", r.query_id},
             {"selected", r.selected},
             {"mode", r.mode}};
}

void from_json(const json& j, RetrievedRecord& r) {
    r.doc_id = require_field<std::string>(j, "doc_id");
    r.query_id = require_field<std::string>(j, "query_id");
    r.selected = require_field<std::vector<SelectedSentence>>(j, "selected");
    r.mode = require_field<std::string>(j, "mode");
}

void to_json(json& j, const WorkloadRecord& r) {
    j = json{{"doc_id", r.doc_id}, {"tokens", r.tokens}};
}

void from_json(const json& j, WorkloadRecord& r) {
    r.doc_id = require_field<std::string>(j, "doc_id");
    r.tokens = require_field<int64_t>(j, "tokens");
}

void to_json(json& j, const TrainingExample& r) {
    j = json{{"doc_id", r.doc_id}, {"query", r.query}, {"labels", r.labels}};
    if (!r.weights.empty()) j["weights"] = r.weights;
}

void from_json(const json& j, TrainingExample& r) {
    r.doc_id = require_field<std::string>(j, "doc_id");
    r.query = require_field<std::string>(j, "query");
    r.labels = require_field<std::vector<int32_t>>(j, "labels");
    r.weights = field_or<std::vector<double>>(j, "weights", {});
}

void to_json(json& j, const StepLog& r) {
    j = json{{"step", r.step}, {"loss", r.loss}, {"lr", r.lr}, {"grad_norm", r.grad_norm}};
}

void from_json(const json& j, StepLog& r) {
    r.step = require_field<int64_t>(j, "step");
    r.loss = require_field<double>(j, "loss");
    r.lr = require_field<double>(j, "lr");
    r.grad_norm = require_field<double>(j, "grad_norm");
}

void to_json(json& j, const SentenceRange& r) {
    j = json{{"start_sentence", r.begin}, {"end_sentence", r.end}};
}

void from_json(const json& j, SentenceRange& r) {
    r.begin = require_field<int64_t>(j, "start_sentence");
    r.end = require_field<int64_t>(j, "end_sentence");
}

void to_json(json& j, const SynthRecord& r) {
    j = json{{"doc_id", r.doc_id},
             {"strategy", r.strategy},
             {"question", r.question},
             {"chunk_a", r.chunk_a},
             {"chunk_b", r.chunk_b ? json(*r.chunk_b) : json(nullptr)},
             {"labeled_sentences", r.labeled_sentences},
             {"connection", r.connection ? json(*r.connection) : json(nullptr)}};
}

void from_json(const json& j, SynthRecord& r) {
    r.doc_id = require_field<std::string>(j, "doc_id");
    r.strategy = require_field<std::string>(j, "strategy");
    r.question = require_field<std::string>(j, "question");
    r.chunk_a = require_field<SentenceRange>(j, "chunk_a");
    if (j.contains("chunk_b") && !j.at("chunk_b").is_null())
        r.chunk_b = j.at("chunk_b").get<SentenceRange>();
    else
        r.chunk_b.reset();
    r.labeled_sentences = require_field<std::vector<int64_t>>(j, "labeled_sentences");
    if (j.contains("connection") && !j.at("connection").is_null())
        r.connection = j.at("connection").get<std::string>();
    else
        r.connection.reset();
}

void to_json(json& j, const Judgment& r) {
    j = json{{"query_id", r.query_id},
             {"doc_id", r.doc_id},
             {"relevant", r.relevant},
             {"status", to_string(r.status)}};
}

void from_json(const json& j, Judgment& r) {
    r.query_id = require_field<std::string>(j, "query_id");
    r.doc_id = require_field<std::string>(j, "doc_id");
    r.relevant = require_field<std::vector<int64_t>>(j, "relevant");
    r.status = judgment_status_from_string(require_field<std::string>(j, "status"));
}

void to_json(json& j, const RankedRun& r) {
    j = json{{"query_id", r.query_id}, {"ranked", r.ranked}};
}

void from_json(const json& j, RankedRun& r) {
    r.query_id = require_field<std::string>(j, "query_id");
    r.ranked = require_field<std::vector<int64_t>>(j, "ranked");
}

}  // namespace spscan
