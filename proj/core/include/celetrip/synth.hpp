#pragma once

#include <set>
#include <string>
#include <vector>

#include "celetrip/corpus.hpp"
#include "celetrip/date.hpp"

namespace celetrip {

struct SynthOptions {
    int n_days = 200;
    int candidates_per_day = 5;
    uint64_t seed = 7;
    Date start_date{2021, 3, 1};
    std::vector<std::string> filler_vocab;  // empty -> built-in list
};

// Planted-trip corpus: every (celebrity, date) has exactly one visited
// location and candidates_per_day-1 decoys. Explicit days carry
// visit/arrive/land phrasing next to the celebrity and location; ~20% of
// days are implicit, where the visit is only recoverable through a
// planted event whose venue the bundled knowledge base links to the true
// location. On half of the days a decoy is mentioned strictly more often
// than the true location, so frequency ranking alone fails there.
struct SynthData {
    std::string corpus_jsonl;
    std::string truth_csv;
    std::string gazetteer_tsv;
    std::string kb_triples_tsv;
    std::string kb_entity_vectors;
    std::string kb_relation_vectors;

    std::vector<GroundTruthRow> truths;
    std::set<std::string> implicit_keys;        // "celebrity|YYYY-MM-DD"
    std::set<std::string> decoy_frequent_keys;  // same key form
};

SynthData synth_generate(const SynthOptions& options);

}  // namespace celetrip
