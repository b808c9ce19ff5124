#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "celetrip/graphs.hpp"
#include "celetrip/linalg.hpp"
#include "celetrip/tensor.hpp"

namespace celetrip {

class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ModelConfig {
    int wv_dim = 100;       // word2vec dimension
    int tfidf_dim = 1000;   // article feature dimension
    int hidden_dim = 128;   // H, word-article graph width
    int feature_dim = 128;  // F, trip graph input dimension
    int kb_dim = 50;        // KB entity/relation embedding dimension
    int blocks = 2;         // (GAT -> Oriented Pooling) repetitions
    int trip_gat_layers = 2;
    int window = 15;      // word-article graph sliding window
    int date_offset = 7;  // Q
    double epsilon = 0.5;
    double leaky_slope = 0.2;
    bool use_oriented_pooling = true;
    bool use_entity_module = true;
    bool use_event_module = true;
};

struct GatLayerParams {
    Param* weight = nullptr;   // [in, out]
    Param* a_self = nullptr;   // [out, 1]
    Param* a_neigh = nullptr;  // [out, 1]
};

// All trainable parameters, owned here and addressed by stable names so
// checkpoints can round-trip. Construction order is fixed, making Xavier
// initialization reproducible under a seed.
class ModelParams {
public:
    static ModelParams init(const ModelConfig& config, uint64_t seed);

    ModelConfig config;

    Param* word_proj_w = nullptr;
    Param* word_proj_b = nullptr;
    Param* article_proj_w = nullptr;
    Param* article_proj_b = nullptr;
    std::vector<GatLayerParams> wag_gat;  // one per block
    std::vector<Param*> pool_score;       // one per block
    Param* pool_alpha = nullptr;          // [2, 1]
    Param* loc_out_w = nullptr;
    Param* loc_out_b = nullptr;
    Param* compgcn_w_es = nullptr;
    Param* compgcn_w_edge = nullptr;
    Param* ent_out_w = nullptr;  // [wv+kb, F]
    Param* ent_out_b = nullptr;
    Param* eve_attn_w = nullptr;  // [wv, wv]
    Param* eve_attn_b = nullptr;
    Param* eve_zeta = nullptr;  // [wv, 1]
    Param* psi1_w = nullptr;    // [2Q+1, F]
    Param* psi1_b = nullptr;
    Param* psi2_w = nullptr;  // [F+wv, F]
    Param* psi2_b = nullptr;
    std::vector<GatLayerParams> trip_gat;
    Param* head_w = nullptr;  // [F, 2]
    Param* head_b = nullptr;

    std::vector<Param*> all();
    std::vector<const Param*> all() const;
    Param* by_name(const std::string& name);

    std::unordered_map<std::string, std::vector<double>> snapshot() const;
    void restore(const std::unordered_map<std::string, std::vector<double>>& snap);
    void load(const Checkpoint& ck);  // strict by-name, shape-checked

private:
    std::vector<std::unique_ptr<Param>> store_;
    std::unordered_map<std::string, Param*> index_;
    Param* make(const std::string& name, int rows, int cols);
};

// x [n, in] -> x W + b.
Tensor linear(Tape& tape, Tensor x, Param& w, Param& b);

// Word and article features projected to a common width and row-stacked,
// words first.
Tensor project_nodes(Tape& tape, Tensor word_features, Tensor article_features,
                     ModelParams& params);

// Single-head GAT over a 0/1 adjacency with self-loops. Attention logits
// use LeakyReLU, outputs use ELU. `attention_out`, when given, receives
// the row-normalized coefficient matrix.
Tensor gat_layer(Tape& tape, Tensor h, const DenseMatrix& adjacency,
                 const GatLayerParams& layer, double leaky_slope = 0.2,
                 Tensor* attention_out = nullptr);

struct PoolResult {
    Tensor h;              // kept rows
    DenseMatrix adjacency; // induced subgraph
    std::vector<int> kept; // original node indices, ascending
    std::vector<int> lw_idx;  // remapped into the kept ordering
    std::vector<int> cw_idx;
    std::vector<double> scores;  // oriented score per original node
};

// Oriented-score top-k pooling. Keeps max(ceil(epsilon*N), #targets)
// nodes; the location/celebrity word nodes are always retained, swapped
// in for the lowest-scoring kept non-targets when necessary. Ties prefer
// the lower node index. Kept features are indexed, not gated.
PoolResult oriented_pooling(Tape& tape, Tensor h, const DenseMatrix& adjacency,
                            const std::vector<int>& lw_idx,
                            const std::vector<int>& cw_idx, double epsilon,
                            Param& w_score, Param& w_alpha);

// `blocks` repetitions of GAT (+ Oriented Pooling unless ablated), then a
// columnwise max readout projected to F. Returns [1, F].
Tensor location_module(Tape& tape, const WordArticleGraph& graph, ModelParams& params);

// One CompGCN layer over the center's incident triples with the
// multiplication composition; tanh activation. Returns [1, kb_dim].
Tensor compgcn_layer(Tape& tape, const EntitySubgraph& subgraph, ModelParams& params);

struct EntityInput {
    DenseMatrix init;  // [1, wv_dim], word-vector mean of the surface stems
    bool linked = false;
    EntitySubgraph subgraph;
};

// h = project(tanh(init (+) compgcn)); unlinked entities use a zero
// sub-graph feature. Returns [1, F].
Tensor entity_module(Tape& tape, const EntityInput& input, ModelParams& params);

struct EventInput {
    DenseMatrix sentence_vectors;  // [s, wv_dim]; s may be 0
    DenseMatrix daily_counts;      // [1, 2Q+1] articles containing the event
    DenseMatrix init;              // [1, wv_dim] surface mean, ablation path
};

// Attention-weighted sentence mean fused with the projected daily-count
// vector through a skip connection. Returns [1, F]; `lambda_out` receives
// the [1, s] sentence attention weights when sentences exist.
Tensor event_module(Tape& tape, const EventInput& input, ModelParams& params,
                    Tensor* lambda_out = nullptr);

// Row-stacks location/entity/event embeddings, runs the trip GAT layers,
// and classifies the location rows. Returns positive-class probabilities
// [k, 1].
Tensor trip_forward(Tape& tape, const TripGraphStructure& graph, Tensor h_loc,
                    Tensor h_ent, Tensor h_eve, ModelParams& params);

// Mean BCE over one (celebrity, date) instance's candidate locations.
Tensor trip_loss(Tape& tape, Tensor probs, const std::vector<int>& labels,
                 double pos_weight = 1.0);

// Symmetrically normalized adjacency D^-1/2 (A) D^-1/2 used by the
// pooling score convolution.
DenseMatrix normalized_adjacency(const DenseMatrix& adjacency);

}  // namespace celetrip
