#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "celetrip/linalg.hpp"

namespace celetrip {

class TensorError : public std::runtime_error {
public:
    explicit TensorError(const std::string& msg) : std::runtime_error(msg) {}
};

// Persistent trainable parameter. Lives outside any tape; each forward
// pass leases it as a leaf node and backward() accumulates into `grad`.
struct Param {
    std::string name;
    int rows = 0;
    int cols = 0;
    std::vector<double> value;
    std::vector<double> grad;

    Param() = default;
    Param(std::string n, int r, int c)
        : name(std::move(n)), rows(r), cols(c), value(size_t(r) * c, 0.0),
          grad(size_t(r) * c, 0.0) {}

    void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

class Tape;

struct TensorNode {
    int rows = 0;
    int cols = 0;
    std::vector<double> value;
    std::vector<double> grad;
    std::function<void()> backward;  // pulls this->grad into parents
    Param* leased = nullptr;         // leaf nodes bound to a parameter

    size_t size() const { return size_t(rows) * size_t(cols); }
};

// Lightweight handle; all state lives on the owning tape.
class Tensor {
public:
    Tensor() = default;

    int rows() const { return node_->rows; }
    int cols() const { return node_->cols; }
    double at(int r, int c) const { return node_->value[size_t(r) * node_->cols + c]; }
    double scalar() const;
    const std::vector<double>& values() const { return node_->value; }
    const std::vector<double>& grads() const { return node_->grad; }
    DenseMatrix to_matrix() const;
    bool valid() const { return node_ != nullptr; }

private:
    explicit Tensor(TensorNode* n) : node_(n) {}
    TensorNode* node_ = nullptr;
    friend class Tape;
};

// Reverse-mode tape: nodes are created in forward order, which is a valid
// topological order for the backward sweep. Single-threaded by design;
// run one tape per training instance.
class Tape {
public:
    Tensor leaf(Param& p);
    Tensor constant(const DenseMatrix& m);
    Tensor constant(int rows, int cols, const std::vector<double>& values);
    Tensor scalar_constant(double v);
    Tensor zeros(int rows, int cols);

    Tensor matmul(Tensor a, Tensor b);
    // Same shape, or b a row vector broadcast over a's rows.
    Tensor add(Tensor a, Tensor b);
    Tensor sub(Tensor a, Tensor b);
    Tensor mul(Tensor a, Tensor b);  // elementwise, same shape
    Tensor scale(Tensor a, double c);
    Tensor transpose(Tensor a);
    Tensor concat_rows(const std::vector<Tensor>& parts);
    Tensor concat_cols(const std::vector<Tensor>& parts);
    Tensor gather_rows(Tensor a, const std::vector<int>& idx);
    Tensor softmax_rows(Tensor a);
    // Row-wise softmax over positions where mask != 0; masked-out
    // positions yield exactly zero. Every row needs >= 1 unmasked entry.
    Tensor masked_softmax_rows(Tensor a, const DenseMatrix& mask);
    Tensor sigmoid(Tensor a);
    Tensor tanh(Tensor a);
    Tensor leaky_relu(Tensor a, double slope);
    Tensor elu(Tensor a);
    // Columnwise max over rows -> [1, cols]; ties route the gradient to
    // the lowest row index.
    Tensor max_rows(Tensor a);
    Tensor mean_rows(Tensor a);  // [1, cols]
    // Per-row cosine similarity against a [1, cols] vector -> [rows, 1].
    // Rows (or a target) with norm below 1e-8 yield similarity 0 with a
    // zero gradient.
    Tensor cosine_similarity(Tensor a, Tensor b);
    Tensor sum(Tensor a);
    Tensor mean(Tensor a);

    // Mean binary cross-entropy; probabilities are clipped to
    // [1e-7, 1 - 1e-7] before the logs. `pos_weight` scales the positive
    // term (1 = plain BCE).
    Tensor bce_loss(Tensor probs, const std::vector<int>& labels, double pos_weight = 1.0);

    // Seeds d loss = 1 and sweeps the tape in reverse creation order.
    void backward(Tensor loss);

    size_t node_count() const { return nodes_.size(); }

private:
    TensorNode* alloc(int rows, int cols);
    Tensor wrap(TensorNode* n) { return Tensor(n); }
    void check_finite(const TensorNode* n, const char* op) const;

    std::vector<std::unique_ptr<TensorNode>> nodes_;
};

struct AdamOptions {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Per-parameter first/second moment estimates keyed by parameter name.
struct AdamState {
    AdamOptions options;
    long step = 0;
    std::unordered_map<std::string, std::vector<double>> m;
    std::unordered_map<std::string, std::vector<double>> v;
};

// Bias-corrected Adam update from the accumulated gradients; clears the
// gradients afterwards.
void adam_step(const std::vector<Param*>& params, AdamState& state);

// Versioned little-endian checkpoint container: parameter name -> shape +
// float64 payload, with optional optimizer state. Byte layout is
// documented in the README.
void save_checkpoint(const std::string& path, const std::vector<const Param*>& params,
                     const AdamState* state = nullptr);

struct Checkpoint {
    struct Entry {
        int rows = 0;
        int cols = 0;
        std::vector<double> value;
    };
    std::unordered_map<std::string, Entry> params;
    std::vector<std::string> order;  // file order
    std::optional<AdamState> adam;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace celetrip
