#pragma once

#include <string>
#include <vector>

#include "spscan/jsonl.hpp"
#include "spscan/metrics.hpp"
#include "spscan/synthgen.hpp"
#include "spscan/train.hpp"

namespace spscan {

// On-disk JSONL schemas. Document serialization lives with the Document
// type; everything else the CLI reads or writes is declared here.

struct QueryRecord {
    std::string query_id;
    std::string doc_id;
    std::string text;
};

struct ScoreRecord {
    std::string doc_id;
    std::string query_id;
    std::vector<double> logits;  // one per sentence, document order
};

struct SelectedSentence {
    int64_t sentence_index = 0;
    double logit = 0.0;
};

struct RetrievedRecord {
    std::string doc_id;
    std::string query_id;
    std::vector<SelectedSentence> selected;  // document order
    std::string mode;
};

struct WorkloadRecord {
    std::string doc_id;
    int64_t tokens = 0;
};

void to_json(json& j, const QueryRecord& r);
void from_json(const json& j, QueryRecord& r);
void to_json(json& j, const ScoreRecord& r);
void from_json(const json& j, ScoreRecord& r);
void to_json(json& j, const SelectedSentence& r);
void from_json(const json& j, SelectedSentence& r);
void to_json(json& j, const RetrievedRecord& r);
void from_json(const json& j, RetrievedRecord& r);
void to_json(json& j, const WorkloadRecord& r);
void from_json(const json& j, WorkloadRecord& r);

void to_json(json& j, const TrainingExample& r);
void from_json(const json& j, TrainingExample& r);
void to_json(json& j, const StepLog& r);
void from_json(const json& j, StepLog& r);

void to_json(json& j, const SentenceRange& r);
void from_json(const json& j, SentenceRange& r);
void to_json(json& j, const SynthRecord& r);
void from_json(const json& j, SynthRecord& r);

void to_json(json& j, const Judgment& r);
void from_json(const json& j, Judgment& r);
void to_json(json& j, const RankedRun& r);
void from_json(const json& j, RankedRun& r);

}  // namespace spscan
