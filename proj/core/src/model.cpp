#include "celetrip/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace celetrip {

Param* ModelParams::make(const std::string& name, int rows, int cols) {
    store_.push_back(std::make_unique<Param>(name, rows, cols));
    Param* p = store_.back().get();
    index_[name] = p;
    return p;
}

ModelParams ModelParams::init(const ModelConfig& config, uint64_t seed) {
    ModelParams mp;
    mp.config = config;
    std::mt19937_64 rng(seed);
    auto xavier = [&rng](Param* p) {
        const double bound = std::sqrt(6.0 / double(p->rows + p->cols));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& v : p->value) v = dist(rng);
    };
    auto weight = [&](const std::string& name, int r, int c) {
        Param* p = mp.make(name, r, c);
        xavier(p);
        return p;
    };
    auto bias = [&](const std::string& name, int c) { return mp.make(name, 1, c); };
    auto gat = [&](const std::string& prefix, int in, int out) {
        GatLayerParams l;
        l.weight = weight(prefix + ".W", in, out);
        l.a_self = weight(prefix + ".a_self", out, 1);
        l.a_neigh = weight(prefix + ".a_neigh", out, 1);
        return l;
    };

    const int H = config.hidden_dim;
    const int F = config.feature_dim;
    mp.word_proj_w = weight("proj.word.W", config.wv_dim, H);
    mp.word_proj_b = bias("proj.word.b", H);
    mp.article_proj_w = weight("proj.article.W", config.tfidf_dim, H);
    mp.article_proj_b = bias("proj.article.b", H);
    for (int b = 0; b < config.blocks; b++) {
        mp.wag_gat.push_back(gat("wag.gat" + std::to_string(b), H, H));
        mp.pool_score.push_back(weight("wag.pool" + std::to_string(b) + ".w_score", H, 1));
    }
    mp.pool_alpha = weight("wag.pool.w_alpha", 2, 1);
    mp.loc_out_w = weight("loc.out.W", H, F);
    mp.loc_out_b = bias("loc.out.b", F);
    mp.compgcn_w_es = weight("ent.compgcn.W_es", config.kb_dim, config.kb_dim);
    mp.compgcn_w_edge = weight("ent.compgcn.W_edge", config.kb_dim, config.kb_dim);
    mp.ent_out_w = weight("ent.out.W", config.wv_dim + config.kb_dim, F);
    mp.ent_out_b = bias("ent.out.b", F);
    mp.eve_attn_w = weight("eve.attn.W", config.wv_dim, config.wv_dim);
    mp.eve_attn_b = bias("eve.attn.b", config.wv_dim);
    mp.eve_zeta = weight("eve.attn.zeta", config.wv_dim, 1);
    mp.psi1_w = weight("eve.psi1.W", 2 * config.date_offset + 1, F);
    mp.psi1_b = bias("eve.psi1.b", F);
    mp.psi2_w = weight("eve.psi2.W", F + config.wv_dim, F);
    mp.psi2_b = bias("eve.psi2.b", F);
    for (int l = 0; l < config.trip_gat_layers; l++)
        mp.trip_gat.push_back(gat("trip.gat" + std::to_string(l), F, F));
    mp.head_w = weight("head.W", F, 2);
    mp.head_b = bias("head.b", 2);
    return mp;
}

std::vector<Param*> ModelParams::all() {
    std::vector<Param*> out;
    out.reserve(store_.size());
    for (auto& p : store_) out.push_back(p.get());
    return out;
}

std::vector<const Param*> ModelParams::all() const {
    std::vector<const Param*> out;
    out.reserve(store_.size());
    for (const auto& p : store_) out.push_back(p.get());
    return out;
}

Param* ModelParams::by_name(const std::string& name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : it->second;
}

std::unordered_map<std::string, std::vector<double>> ModelParams::snapshot() const {
    std::unordered_map<std::string, std::vector<double>> snap;
    for (const auto& p : store_) snap[p->name] = p->value;
    return snap;
}

void ModelParams::restore(const std::unordered_map<std::string, std::vector<double>>& snap) {
    for (auto& p : store_) {
        auto it = snap.find(p->name);
        if (it == snap.end() || it->second.size() != p->value.size())
            throw ModelError("restore: missing or mis-sized parameter " + p->name);
        p->value = it->second;
    }
}

void ModelParams::load(const Checkpoint& ck) {
    for (auto& p : store_) {
        auto it = ck.params.find(p->name);
        if (it == ck.params.end())
            throw ModelError("checkpoint is missing parameter " + p->name);
        if (it->second.rows != p->rows || it->second.cols != p->cols)
            throw ModelError("checkpoint shape mismatch for " + p->name);
        p->value = it->second.value;
    }
}

Tensor linear(Tape& tape, Tensor x, Param& w, Param& b) {
    return tape.add(tape.matmul(x, tape.leaf(w)), tape.leaf(b));
}

Tensor project_nodes(Tape& tape, Tensor word_features, Tensor article_features,
                     ModelParams& params) {
    Tensor hw = linear(tape, word_features, *params.word_proj_w, *params.word_proj_b);
    Tensor ha =
        linear(tape, article_features, *params.article_proj_w, *params.article_proj_b);
    return tape.concat_rows({hw, ha});
}

Tensor gat_layer(Tape& tape, Tensor h, const DenseMatrix& adjacency,
                 const GatLayerParams& layer, double leaky_slope,
                 Tensor* attention_out) {
    const int n = h.rows();
    if (adjacency.rows != n || adjacency.cols != n)
        throw ModelError("gat_layer: adjacency does not match node count");
    for (int i = 0; i < n; i++)
        if (adjacency.at(i, i) == 0.0)
            throw ModelError("gat_layer: node " + std::to_string(i) +
                             " is missing its self-loop");

    Tensor wh = tape.matmul(h, tape.leaf(*layer.weight));
    Tensor f = tape.matmul(wh, tape.leaf(*layer.a_self));   // [n,1]
    Tensor g = tape.matmul(wh, tape.leaf(*layer.a_neigh));  // [n,1]
    Tensor ones = tape.constant(1, n, std::vector<double>(size_t(n), 1.0));
    // e_ij = leaky(f_i + g_j)
    Tensor logits = tape.leaky_relu(
        tape.add(tape.matmul(f, ones), tape.transpose(tape.matmul(g, ones))),
        leaky_slope);
    Tensor attention = tape.masked_softmax_rows(logits, adjacency);
    if (attention_out) *attention_out = attention;
    return tape.elu(tape.matmul(attention, wh));
}

DenseMatrix normalized_adjacency(const DenseMatrix& adjacency) {
    const int n = adjacency.rows;
    std::vector<double> inv_sqrt_deg(size_t(n), 0.0);
    for (int i = 0; i < n; i++) {
        double deg = 0.0;
        for (int j = 0; j < n; j++) deg += adjacency.at(i, j);
        inv_sqrt_deg[size_t(i)] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
    }
    DenseMatrix out(n, n);
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++)
            out.at(i, j) = inv_sqrt_deg[size_t(i)] * adjacency.at(i, j) *
                           inv_sqrt_deg[size_t(j)];
    return out;
}

PoolResult oriented_pooling(Tape& tape, Tensor h, const DenseMatrix& adjacency,
                            const std::vector<int>& lw_idx,
                            const std::vector<int>& cw_idx, double epsilon,
                            Param& w_score, Param& w_alpha) {
    const int n = h.rows();
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw ModelError("oriented_pooling: epsilon must lie in (0, 1)");
    if (lw_idx.empty() || cw_idx.empty())
        throw ModelError("oriented_pooling: lw/cw index lists must be non-empty");
    for (int i : lw_idx)
        if (i < 0 || i >= n) throw ModelError("oriented_pooling: lw index out of range");
    for (int i : cw_idx)
        if (i < 0 || i >= n) throw ModelError("oriented_pooling: cw index out of range");

    // Self-attention score: one graph-convolution pass to a scalar per node.
    Tensor s_attn = tape.matmul(tape.constant(normalized_adjacency(adjacency)),
                                tape.matmul(h, tape.leaf(w_score)));
    Tensor target_lw = tape.mean_rows(tape.gather_rows(h, lw_idx));
    Tensor target_cw = tape.mean_rows(tape.gather_rows(h, cw_idx));
    Tensor s_loc = tape.cosine_similarity(h, target_lw);
    Tensor s_cel = tape.cosine_similarity(h, target_cw);
    Tensor s_sim = tape.mul(s_loc, s_cel);
    Tensor s_ori = tape.tanh(
        tape.matmul(tape.concat_cols({s_attn, s_sim}), tape.leaf(w_alpha)));

    const std::vector<double>& scores = s_ori.values();
    std::set<int> targets(lw_idx.begin(), lw_idx.end());
    targets.insert(cw_idx.begin(), cw_idx.end());

    const int want = int(std::ceil(epsilon * double(n)));
    const int keep = std::min(n, std::max(want, int(targets.size())));

    std::vector<int> order(static_cast<size_t>(n), 0);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[size_t(a)] != scores[size_t(b)]) return scores[size_t(a)] > scores[size_t(b)];
        return a < b;
    });

    std::vector<char> in_kept(size_t(n), 0);
    for (int r = 0; r < keep; r++) in_kept[size_t(order[size_t(r)])] = 1;
    // Force-retain targets by evicting the worst-ranked kept non-targets.
    int evict_rank = keep - 1;
    for (int t : targets) {
        if (in_kept[size_t(t)]) continue;
        while (evict_rank >= 0 &&
               (!in_kept[size_t(order[size_t(evict_rank)])] ||
                targets.count(order[size_t(evict_rank)])))
            evict_rank--;
        if (evict_rank < 0)
            throw ModelError("oriented_pooling: no evictable node for a target");
        in_kept[size_t(order[size_t(evict_rank)])] = 0;
        in_kept[size_t(t)] = 1;
    }

    PoolResult result;
    result.scores = scores;
    std::vector<int> remap(size_t(n), -1);
    for (int i = 0; i < n; i++) {
        if (in_kept[size_t(i)]) {
            remap[size_t(i)] = int(result.kept.size());
            result.kept.push_back(i);
        }
    }
    result.h = tape.gather_rows(h, result.kept);
    const int kn = int(result.kept.size());
    result.adjacency = DenseMatrix(kn, kn);
    for (int i = 0; i < kn; i++)
        for (int j = 0; j < kn; j++)
            result.adjacency.at(i, j) = adjacency.at(result.kept[size_t(i)],
                                                     result.kept[size_t(j)]);
    auto remap_all = [&](const std::vector<int>& src) {
        std::vector<int> out;
        for (int i : src) out.push_back(remap[size_t(i)]);
        return out;
    };
    result.lw_idx = remap_all(lw_idx);
    result.cw_idx = remap_all(cw_idx);
    return result;
}

Tensor location_module(Tape& tape, const WordArticleGraph& graph, ModelParams& params) {
    Tensor h = project_nodes(tape, tape.constant(graph.word_features),
                             tape.constant(graph.article_features), params);
    DenseMatrix adjacency = graph.adjacency;
    std::vector<int> lw = graph.lw_idx;
    std::vector<int> cw = graph.cw_idx;
    for (int b = 0; b < params.config.blocks; b++) {
        h = gat_layer(tape, h, adjacency, params.wag_gat[size_t(b)],
                      params.config.leaky_slope);
        if (params.config.use_oriented_pooling) {
            PoolResult pooled =
                oriented_pooling(tape, h, adjacency, lw, cw, params.config.epsilon,
                                 *params.pool_score[size_t(b)], *params.pool_alpha);
            h = pooled.h;
            adjacency = std::move(pooled.adjacency);
            lw = std::move(pooled.lw_idx);
            cw = std::move(pooled.cw_idx);
        }
    }
    return linear(tape, tape.max_rows(h), *params.loc_out_w, *params.loc_out_b);
}

Tensor compgcn_layer(Tape& tape, const EntitySubgraph& subgraph, ModelParams& params) {
    const int dim = params.config.kb_dim;
    if (subgraph.edges.empty()) return tape.tanh(tape.zeros(1, dim));
    if (subgraph.node_init.cols != dim || subgraph.relation_init.cols != dim)
        throw ModelError("compgcn_layer: subgraph embeddings do not match kb_dim");

    Tensor rel = tape.matmul(tape.constant(subgraph.relation_init),
                             tape.leaf(*params.compgcn_w_edge));  // [E, kb]
    std::vector<int> neighbor_rows;
    neighbor_rows.reserve(subgraph.edges.size());
    for (const auto& e : subgraph.edges) neighbor_rows.push_back(e.neighbor);
    Tensor hu = tape.gather_rows(tape.constant(subgraph.node_init), neighbor_rows);
    Tensor composed = tape.mul(hu, rel);  // [E, kb]
    Tensor ones = tape.constant(1, int(subgraph.edges.size()),
                                std::vector<double>(subgraph.edges.size(), 1.0));
    Tensor summed = tape.matmul(ones, composed);  // [1, kb]
    return tape.tanh(tape.matmul(summed, tape.leaf(*params.compgcn_w_es)));
}

Tensor entity_module(Tape& tape, const EntityInput& input, ModelParams& params) {
    if (input.init.rows != 1 || input.init.cols != params.config.wv_dim)
        throw ModelError("entity_module: init embedding must be [1, wv_dim]");
    Tensor h_init = tape.constant(input.init);
    Tensor h_sub = (params.config.use_entity_module && input.linked)
                       ? compgcn_layer(tape, input.subgraph, params)
                       : tape.zeros(1, params.config.kb_dim);
    Tensor fused = tape.tanh(tape.concat_cols({h_init, h_sub}));
    return linear(tape, fused, *params.ent_out_w, *params.ent_out_b);
}

Tensor event_module(Tape& tape, const EventInput& input, ModelParams& params,
                    Tensor* lambda_out) {
    const int wv = params.config.wv_dim;
    const int zdim = 2 * params.config.date_offset + 1;

    if (!params.config.use_event_module) {
        // Ablation: the surface initialization embedding projected through
        // the fusion layer, with the count channel silenced.
        Tensor fused = tape.concat_cols({tape.zeros(1, params.config.feature_dim),
                                         tape.constant(input.init)});
        return tape.tanh(linear(tape, fused, *params.psi2_w, *params.psi2_b));
    }

    if (input.daily_counts.rows != 1 || input.daily_counts.cols != zdim)
        throw ModelError("event_module: daily counts must be [1, 2Q+1]");

    Tensor h_tilde;
    if (input.sentence_vectors.rows > 0) {
        if (input.sentence_vectors.cols != wv)
            throw ModelError("event_module: sentence vectors must have wv_dim columns");
        Tensor v = tape.constant(input.sentence_vectors);
        Tensor mu = tape.sigmoid(linear(tape, v, *params.eve_attn_w, *params.eve_attn_b));
        Tensor score = tape.matmul(mu, tape.leaf(*params.eve_zeta));       // [s, 1]
        Tensor lambda = tape.softmax_rows(tape.transpose(score));          // [1, s]
        if (lambda_out) *lambda_out = lambda;
        h_tilde = tape.matmul(lambda, v);  // [1, wv]
    } else {
        h_tilde = tape.zeros(1, wv);
        if (lambda_out) *lambda_out = Tensor();
    }

    Tensor h_z = linear(tape, tape.constant(input.daily_counts), *params.psi1_w,
                        *params.psi1_b);  // [1, F]
    Tensor fused = tape.tanh(
        linear(tape, tape.concat_cols({h_z, h_tilde}), *params.psi2_w, *params.psi2_b));
    return tape.add(fused, h_z);
}

Tensor trip_forward(Tape& tape, const TripGraphStructure& graph, Tensor h_loc,
                    Tensor h_ent, Tensor h_eve, ModelParams& params) {
    const int k = graph.location_count();
    if (h_loc.rows() != k)
        throw ModelError("trip_forward: location embedding count mismatch");
    if (h_ent.valid() && h_ent.rows() != graph.entity_count())
        throw ModelError("trip_forward: entity embedding count mismatch");
    if (h_eve.valid() && h_eve.rows() != graph.event_count())
        throw ModelError("trip_forward: event embedding count mismatch");

    std::vector<Tensor> parts{h_loc};
    if (h_ent.valid() && h_ent.rows() > 0) parts.push_back(h_ent);
    if (h_eve.valid() && h_eve.rows() > 0) parts.push_back(h_eve);
    Tensor h = tape.concat_rows(parts);
    if (h.rows() != graph.node_count())
        throw ModelError("trip_forward: stacked embeddings do not match the trip graph");

    for (const auto& layer : params.trip_gat)
        h = gat_layer(tape, h, graph.adjacency, layer, params.config.leaky_slope);

    std::vector<int> loc_rows(static_cast<size_t>(k), 0);
    std::iota(loc_rows.begin(), loc_rows.end(), 0);
    Tensor logits = linear(tape, tape.gather_rows(h, loc_rows), *params.head_w,
                           *params.head_b);              // [k, 2]
    Tensor probs = tape.softmax_rows(logits);            // [k, 2]
    Tensor pick_positive = tape.constant(2, 1, {0.0, 1.0});
    return tape.matmul(probs, pick_positive);  // [k, 1]
}

Tensor trip_loss(Tape& tape, Tensor probs, const std::vector<int>& labels,
                 double pos_weight) {
    return tape.bce_loss(probs, labels, pos_weight);
}

}  // namespace celetrip
