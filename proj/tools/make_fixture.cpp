#include <filesystem>
#include <fstream>
#include <iostream>

#include "spscan/fixtures.hpp"

namespace fs = std::filesystem;
using namespace spscan;

// Writes the needle corpus fixture: a 50-document evaluation corpus with a
// known relevant sentence per document, plus raw training text for the full
// pipeline. 20 evaluation documents place the needle inside the first 50
// sentences; the other 30 place it after sentence 50, so position-order
// retrieval at k=50 recalls exactly 0.40 while the needle signal itself is
// position-free.
int main(int argc, char** argv) {
    fs::path out_dir = argc > 1 ? fs::path(argv[1]) : fs::path("fixtures/needle50");
    fs::create_directories(out_dir);

    NeedleCorpusConfig eval_cfg;
    eval_cfg.n_docs = 50;
    eval_cfg.sentences_per_doc = 250;
    eval_cfg.words_per_sentence = 8;
    eval_cfg.n_keys = 8;
    eval_cfg.needles_per_doc = 1;
    eval_cfg.seed = 21;
    eval_cfg.doc_prefix = "eval";
    eval_cfg.needle_range = [](int64_t d) -> std::pair<int64_t, int64_t> {
        if (d < 20) return {0, 49};
        return {51, 248};
    };
    FixtureCorpus eval = make_needle_corpus(eval_cfg);
    save_documents(out_dir / "eval_docs.jsonl", eval.docs);
    save_jsonl(out_dir / "queries.jsonl", eval.queries);
    save_jsonl(out_dir / "judgments.jsonl", eval.judgments);

    int64_t early = 0, late = 0;
    for (size_t d = 0; d < eval.docs.size(); ++d) {
        for (int64_t idx : eval.judgments[d].relevant) (idx < 50 ? early : late) += 1;
    }
    std::cout << "eval docs: " << eval.docs.size() << " (needles <50: " << early
              << ", >=50: " << late << ")\n";

    NeedleCorpusConfig train_cfg;
    train_cfg.n_docs = 150;
    train_cfg.sentences_per_doc = 60;
    train_cfg.words_per_sentence = 8;
    train_cfg.n_keys = 8;
    train_cfg.needles_per_doc = 3;
    train_cfg.seed = 11;
    train_cfg.doc_prefix = "trn";
    FixtureCorpus train = make_needle_corpus(train_cfg);

    fs::path text_dir = out_dir / "train_text";
    fs::create_directories(text_dir);
    for (const Document& d : train.docs) {
        std::ofstream out(text_dir / (d.doc_id + ".txt"), std::ios::trunc);
        out << d.text << "\n";
        if (!out) {
            std::cerr << "error: cannot write " << (text_dir / (d.doc_id + ".txt")) << "\n";
            return 1;
        }
    }
    std::cout << "train docs: " << train.docs.size() << " -> " << text_dir.string() << "\n";
    return 0;
}
