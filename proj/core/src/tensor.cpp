#include "celetrip/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>

namespace celetrip {

namespace {

std::string shape_str(int r, int c) {
    return "(" + std::to_string(r) + "x" + std::to_string(c) + ")";
}

[[noreturn]] void shape_error(const char* op, int ar, int ac, int br, int bc) {
    throw TensorError(std::string(op) + ": incompatible shapes " + shape_str(ar, ac) +
                      " and " + shape_str(br, bc));
}

constexpr double kNormFloor = 1e-8;  // cosine treats smaller norms as zero
constexpr double kBceClip = 1e-7;

}  // namespace

double Tensor::scalar() const {
    if (node_->size() != 1)
        throw TensorError("scalar() on tensor of shape " +
                          shape_str(node_->rows, node_->cols));
    return node_->value[0];
}

DenseMatrix Tensor::to_matrix() const {
    DenseMatrix m(node_->rows, node_->cols);
    m.data = node_->value;
    return m;
}

TensorNode* Tape::alloc(int rows, int cols) {
    auto node = std::make_unique<TensorNode>();
    node->rows = rows;
    node->cols = cols;
    node->value.assign(size_t(rows) * size_t(cols), 0.0);
    node->grad.assign(size_t(rows) * size_t(cols), 0.0);
    nodes_.push_back(std::move(node));
    return nodes_.back().get();
}

void Tape::check_finite(const TensorNode* n, const char* op) const {
    for (double v : n->value) {
        if (!std::isfinite(v))
            throw TensorError(std::string(op) + ": non-finite value in output " +
                              shape_str(n->rows, n->cols));
    }
}

Tensor Tape::leaf(Param& p) {
    TensorNode* n = alloc(p.rows, p.cols);
    n->value = p.value;
    n->leased = &p;
    Param* param = &p;
    n->backward = [n, param]() {
        for (size_t i = 0; i < n->grad.size(); i++) param->grad[i] += n->grad[i];
    };
    check_finite(n, "leaf");
    return wrap(n);
}

Tensor Tape::constant(const DenseMatrix& m) {
    TensorNode* n = alloc(m.rows, m.cols);
    n->value = m.data;
    check_finite(n, "constant");
    return wrap(n);
}

Tensor Tape::constant(int rows, int cols, const std::vector<double>& values) {
    if (size_t(rows) * size_t(cols) != values.size())
        throw TensorError("constant: value count does not match " + shape_str(rows, cols));
    TensorNode* n = alloc(rows, cols);
    n->value = values;
    check_finite(n, "constant");
    return wrap(n);
}

Tensor Tape::scalar_constant(double v) { return constant(1, 1, {v}); }

Tensor Tape::zeros(int rows, int cols) { return wrap(alloc(rows, cols)); }

Tensor Tape::matmul(Tensor a, Tensor b) {
    TensorNode* an = a.node_;
    TensorNode* bn = b.node_;
    if (an->cols != bn->rows) shape_error("matmul", an->rows, an->cols, bn->rows, bn->cols);
    const int m = an->rows, k = an->cols, n = bn->cols;
    TensorNode* out = alloc(m, n);
    for (int i = 0; i < m; i++) {
        const double* arow = &an->value[size_t(i) * k];
        double* crow = &out->value[size_t(i) * n];
        for (int p = 0; p < k; p++) {
            const double av = arow[p];
            if (av == 0.0) continue;
            const double* brow = &bn->value[size_t(p) * n];
            for (int j = 0; j < n; j++) crow[j] += av * brow[j];
        }
    }
    check_finite(out, "matmul");
    out->backward = [out, an, bn, m, k, n]() {
        // dA += dC * B^T
        for (int i = 0; i < m; i++) {
            const double* grow = &out->grad[size_t(i) * n];
            double* darow = &an->grad[size_t(i) * k];
            for (int p = 0; p < k; p++) {
                const double* brow = &bn->value[size_t(p) * n];
                double acc = 0.0;
                for (int j = 0; j < n; j++) acc += grow[j] * brow[j];
                darow[p] += acc;
            }
        }
        // dB += A^T * dC
        for (int p = 0; p < k; p++) {
            double* dbrow = &bn->grad[size_t(p) * n];
            for (int i = 0; i < m; i++) {
                const double av = an->value[size_t(i) * k + p];
                if (av == 0.0) continue;
                const double* grow = &out->grad[size_t(i) * n];
                for (int j = 0; j < n; j++) dbrow[j] += av * grow[j];
            }
        }
    };
    return wrap(out);
}

Tensor Tape::add(Tensor a, Tensor b) {
    TensorNode* an = a.node_;
    TensorNode* bn = b.node_;
    const bool broadcast = bn->rows == 1 && an->cols == bn->cols && an->rows != 1;
    if (!broadcast && (an->rows != bn->rows || an->cols != bn->cols))
        shape_error("add", an->rows, an->cols, bn->rows, bn->cols);
    TensorNode* out = alloc(an->rows, an->cols);
    for (int i = 0; i < an->rows; i++)
        for (int j = 0; j < an->cols; j++)
            out->value[size_t(i) * an->cols + j] =
                an->value[size_t(i) * an->cols + j] +
                bn->value[size_t(broadcast ? 0 : i) * an->cols + j];
    check_finite(out, "add");
    out->backward = [out, an, bn, broadcast]() {
        for (size_t i = 0; i < out->grad.size(); i++) an->grad[i] += out->grad[i];
        if (broadcast) {
            for (int i = 0; i < out->rows; i++)
                for (int j = 0; j < out->cols; j++)
                    bn->grad[size_t(j)] += out->grad[size_t(i) * out->cols + j];
        } else {
            for (size_t i = 0; i < out->grad.size(); i++) bn->grad[i] += out->grad[i];
        }
    };
    return wrap(out);
}

Tensor Tape::sub(Tensor a, Tensor b) { return add(a, scale(b, -1.0)); }

Tensor Tape::mul(Tensor a, Tensor b) {
    TensorNode* an = a.node_;
    TensorNode* bn = b.node_;
    if (an->rows != bn->rows || an->cols != bn->cols)
        shape_error("mul", an->rows, an->cols, bn->rows, bn->cols);
    TensorNode* out = alloc(an->rows, an->cols);
    for (size_t i = 0; i < out->value.size(); i++)
        out->value[i] = an->value[i] * bn->value[i];
    check_finite(out, "mul");
    out->backward = [out, an, bn]() {
        for (size_t i = 0; i < out->grad.size(); i++) {
            an->grad[i] += out->grad[i] * bn->value[i];
            bn->grad[i] += out->grad[i] * an->value[i];
        }
    };
    return wrap(out);
}

Tensor Tape::scale(Tensor a, double c) {
    TensorNode* an = a.node_;
    TensorNode* out = alloc(an->rows, an->cols);
    for (size_t i = 0; i < out->value.size(); i++) out->value[i] = an->value[i] * c;
    check_finite(out, "scale");
    out->backward = [out, an, c]() {
        for (size_t i = 0; i < out->grad.size(); i++) an->grad[i] += out->grad[i] * c;
    };
    return wrap(out);
}

Tensor Tape::transpose(Tensor a) {
    TensorNode* an = a.node_;
    TensorNode* out = alloc(an->cols, an->rows);
    for (int i = 0; i < an->rows; i++)
        for (int j = 0; j < an->cols; j++)
            out->value[size_t(j) * an->rows + i] = an->value[size_t(i) * an->cols + j];
    out->backward = [out, an]() {
        for (int i = 0; i < an->rows; i++)
            for (int j = 0; j < an->cols; j++)
                an->grad[size_t(i) * an->cols + j] += out->grad[size_t(j) * an->rows + i];
    };
    return wrap(out);
}

Tensor Tape::concat_rows(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw TensorError("concat_rows: no inputs");
    int cols = parts[0].cols();
    int rows = 0;
    for (const auto& p : parts) {
        if (p.cols() != cols)
            shape_error("concat_rows", parts[0].rows(), cols, p.rows(), p.cols());
        rows += p.rows();
    }
    TensorNode* out = alloc(rows, cols);
    std::vector<TensorNode*> srcs;
    for (const auto& p : parts) srcs.push_back(p.node_);
    int r = 0;
    for (TensorNode* s : srcs) {
        std::copy(s->value.begin(), s->value.end(),
                  out->value.begin() + size_t(r) * cols);
        r += s->rows;
    }
    out->backward = [out, srcs]() {
        int r = 0;
        for (TensorNode* s : srcs) {
            const size_t off = size_t(r) * out->cols;
            for (size_t i = 0; i < s->grad.size(); i++) s->grad[i] += out->grad[off + i];
            r += s->rows;
        }
    };
    return wrap(out);
}

Tensor Tape::concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw TensorError("concat_cols: no inputs");
    int rows = parts[0].rows();
    int cols = 0;
    for (const auto& p : parts) {
        if (p.rows() != rows)
            shape_error("concat_cols", rows, parts[0].cols(), p.rows(), p.cols());
        cols += p.cols();
    }
    TensorNode* out = alloc(rows, cols);
    std::vector<TensorNode*> srcs;
    for (const auto& p : parts) srcs.push_back(p.node_);
    int c0 = 0;
    for (TensorNode* s : srcs) {
        for (int i = 0; i < rows; i++)
            std::copy(&s->value[size_t(i) * s->cols], &s->value[size_t(i) * s->cols] + s->cols,
                      &out->value[size_t(i) * cols + c0]);
        c0 += s->cols;
    }
    out->backward = [out, srcs, rows, cols]() {
        int c0 = 0;
        for (TensorNode* s : srcs) {
            for (int i = 0; i < rows; i++)
                for (int j = 0; j < s->cols; j++)
                    s->grad[size_t(i) * s->cols + j] +=
                        out->grad[size_t(i) * cols + c0 + j];
            c0 += s->cols;
        }
    };
    return wrap(out);
}

Tensor Tape::gather_rows(Tensor a, const std::vector<int>& idx) {
    TensorNode* an = a.node_;
    for (int i : idx)
        if (i < 0 || i >= an->rows)
            throw TensorError("gather_rows: index " + std::to_string(i) +
                              " out of range for " + shape_str(an->rows, an->cols));
    TensorNode* out = alloc(int(idx.size()), an->cols);
    for (size_t r = 0; r < idx.size(); r++)
        std::copy(&an->value[size_t(idx[r]) * an->cols],
                  &an->value[size_t(idx[r]) * an->cols] + an->cols,
                  &out->value[r * size_t(an->cols)]);
    std::vector<int> indices = idx;
    out->backward = [out, an, indices]() {
        for (size_t r = 0; r < indices.size(); r++)
            for (int j = 0; j < an->cols; j++)
                an->grad[size_t(indices[r]) * an->cols + j] +=
                    out->grad[r * size_t(an->cols) + j];
    };
    return wrap(out);
}

Tensor Tape::softmax_rows(Tensor a) {
    TensorNode* an = a.node_;
    TensorNode* out = alloc(an->rows, an->cols);
    for (int i = 0; i < an->rows; i++) {
        const double* x = &an->value[size_t(i) * an->cols];
        double* y = &out->value[size_t(i) * an->cols];
        double mx = x[0];
        for (int j = 1; j < an->cols; j++) mx = std::max(mx, x[j]);
        double z = 0.0;
        for (int j = 0; j < an->cols; j++) {
            y[j] = std::exp(x[j] - mx);
            z += y[j];
        }
        for (int j = 0; j < an->cols; j++) y[j] /= z;
    }
    check_finite(out, "softmax");
    out->backward = [out, an]() {
        for (int i = 0; i < an->rows; i++) {
            const double* y = &out->value[size_t(i) * an->cols];
            const double* g = &out->grad[size_t(i) * an->cols];
            double dot = 0.0;
            for (int j = 0; j < an->cols; j++) dot += g[j] * y[j];
            for (int j = 0; j < an->cols; j++)
                an->grad[size_t(i) * an->cols + j] += y[j] * (g[j] - dot);
        }
    };
    return wrap(out);
}

Tensor Tape::masked_softmax_rows(Tensor a, const DenseMatrix& mask) {
    TensorNode* an = a.node_;
    if (mask.rows != an->rows || mask.cols != an->cols)
        shape_error("masked_softmax", an->rows, an->cols, mask.rows, mask.cols);
    TensorNode* out = alloc(an->rows, an->cols);
    for (int i = 0; i < an->rows; i++) {
        const double* x = &an->value[size_t(i) * an->cols];
        double* y = &out->value[size_t(i) * an->cols];
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < an->cols; j++)
            if (mask.at(i, j) != 0.0) mx = std::max(mx, x[j]);
        if (!std::isfinite(mx))
            throw TensorError("masked_softmax: row " + std::to_string(i) +
                              " has no unmasked entries");
        double z = 0.0;
        for (int j = 0; j < an->cols; j++) {
            if (mask.at(i, j) != 0.0) {
                y[j] = std::exp(x[j] - mx);
                z += y[j];
            } else {
                y[j] = 0.0;
            }
        }
        for (int j = 0; j < an->cols; j++)
            if (mask.at(i, j) != 0.0) y[j] /= z;
    }
    check_finite(out, "masked_softmax");
    DenseMatrix mask_copy = mask;
    out->backward = [out, an, mask_copy]() {
        for (int i = 0; i < an->rows; i++) {
            const double* y = &out->value[size_t(i) * an->cols];
            const double* g = &out->grad[size_t(i) * an->cols];
            double dot = 0.0;
            for (int j = 0; j < an->cols; j++)
                if (mask_copy.at(i, j) != 0.0) dot += g[j] * y[j];
            for (int j = 0; j < an->cols; j++)
                if (mask_copy.at(i, j) != 0.0)
                    an->grad[size_t(i) * an->cols + j] += y[j] * (g[j] - dot);
        }
    };
    return wrap(out);
}

Tensor Tape::sigmoid(Tensor a) {
    TensorNode* an = a.node_;
    TensorNode* out = alloc(an->rows, an->cols);
    for (size_t i = 0; i < out->value.size(); i++)
        out->value[i] = 1.0 / (1.0 + std::exp(-an->value[i]));
    check_finite(out, "sigmoid");
    out->backward = [out, an]() {
        for (size_t i = 0; i < out->grad.size(); i++) {
            double y = out->value[i];
            an->grad[i] += out->grad[i] * y * (1.0 - y);
        }
    };
    return wrap(out);
}

Tensor Tape::tanh(Tensor a) {
    TensorNode* an = a.node_;
    TensorNode* out = alloc(an->rows, an->cols);
    for (size_t i = 0; i < out->value.size(); i++) out->value[i] = std::tanh(an->value[i]);
    check_finite(out, "tanh");
    out->backward = [out, an]() {
        for (size_t i = 0; i < out->grad.size(); i++) {
            double y = out->value[i];
            an->grad[i] += out->grad[i] * (1.0 - y * y);
        }
    };
    return wrap(out);
}

Tensor Tape::leaky_relu(Tensor a, double slope) {
    TensorNode* an = a.node_;
    TensorNode* out = alloc(an->rows, an->cols);
    for (size_t i = 0; i < out->value.size(); i++) {
        double x = an->value[i];
        out->value[i] = x > 0.0 ? x : slope * x;
    }
    check_finite(out, "leaky_relu");
    out->backward = [out, an, slope]() {
        for (size_t i = 0; i < out->grad.size(); i++)
            an->grad[i] += out->grad[i] * (an->value[i] > 0.0 ? 1.0 : slope);
    };
    return wrap(out);
}

Tensor Tape::elu(Tensor a) {
    TensorNode* an = a.node_;
    TensorNode* out = alloc(an->rows, an->cols);
    for (size_t i = 0; i < out->value.size(); i++) {
        double x = an->value[i];
        out->value[i] = x > 0.0 ? x : std::expm1(x);
    }
    check_finite(out, "elu");
    out->backward = [out, an]() {
        for (size_t i = 0; i < out->grad.size(); i++) {
            double x = an->value[i];
            an->grad[i] += out->grad[i] * (x > 0.0 ? 1.0 : out->value[i] + 1.0);
        }
    };
    return wrap(out);
}

Tensor Tape::max_rows(Tensor a) {
    TensorNode* an = a.node_;
    if (an->rows < 1) throw TensorError("max_rows: empty input");
    TensorNode* out = alloc(1, an->cols);
    std::vector<int> argmax(size_t(an->cols), 0);
    for (int j = 0; j < an->cols; j++) {
        double best = an->value[size_t(j)];
        int arg = 0;
        for (int i = 1; i < an->rows; i++) {
            double v = an->value[size_t(i) * an->cols + j];
            if (v > best) {
                best = v;
                arg = i;
            }
        }
        out->value[size_t(j)] = best;
        argmax[size_t(j)] = arg;
    }
    out->backward = [out, an, argmax]() {
        for (int j = 0; j < an->cols; j++)
            an->grad[size_t(argmax[size_t(j)]) * an->cols + j] += out->grad[size_t(j)];
    };
    return wrap(out);
}

Tensor Tape::mean_rows(Tensor a) {
    TensorNode* an = a.node_;
    if (an->rows < 1) throw TensorError("mean_rows: empty input");
    TensorNode* out = alloc(1, an->cols);
    for (int i = 0; i < an->rows; i++)
        for (int j = 0; j < an->cols; j++)
            out->value[size_t(j)] += an->value[size_t(i) * an->cols + j];
    for (int j = 0; j < an->cols; j++) out->value[size_t(j)] /= double(an->rows);
    check_finite(out, "mean_rows");
    out->backward = [out, an]() {
        const double inv = 1.0 / double(an->rows);
        for (int i = 0; i < an->rows; i++)
            for (int j = 0; j < an->cols; j++)
                an->grad[size_t(i) * an->cols + j] += out->grad[size_t(j)] * inv;
    };
    return wrap(out);
}

Tensor Tape::cosine_similarity(Tensor a, Tensor b) {
    TensorNode* an = a.node_;
    TensorNode* bn = b.node_;
    if (bn->rows != 1 || bn->cols != an->cols)
        shape_error("cosine_similarity", an->rows, an->cols, bn->rows, bn->cols);
    TensorNode* out = alloc(an->rows, 1);
    double bt = 0.0;
    for (int j = 0; j < an->cols; j++) bt += bn->value[size_t(j)] * bn->value[size_t(j)];
    const double nb = std::sqrt(bt);
    std::vector<double> na(size_t(an->rows), 0.0);
    for (int i = 0; i < an->rows; i++) {
        double aa = 0.0, dot = 0.0;
        const double* row = &an->value[size_t(i) * an->cols];
        for (int j = 0; j < an->cols; j++) {
            aa += row[j] * row[j];
            dot += row[j] * bn->value[size_t(j)];
        }
        na[size_t(i)] = std::sqrt(aa);
        out->value[size_t(i)] =
            (na[size_t(i)] < kNormFloor || nb < kNormFloor)
                ? 0.0
                : dot / (na[size_t(i)] * nb);
    }
    check_finite(out, "cosine_similarity");
    out->backward = [out, an, bn, na, nb]() {
        if (nb < kNormFloor) return;
        for (int i = 0; i < an->rows; i++) {
            if (na[size_t(i)] < kNormFloor) continue;
            const double g = out->grad[size_t(i)];
            if (g == 0.0) continue;
            const double c = out->value[size_t(i)];
            const double* x = &an->value[size_t(i) * an->cols];
            double* dx = &an->grad[size_t(i) * an->cols];
            const double inv = 1.0 / (na[size_t(i)] * nb);
            const double inv_a2 = 1.0 / (na[size_t(i)] * na[size_t(i)]);
            const double inv_b2 = 1.0 / (nb * nb);
            for (int j = 0; j < an->cols; j++) {
                dx[j] += g * (bn->value[size_t(j)] * inv - c * x[j] * inv_a2);
                bn->grad[size_t(j)] += g * (x[j] * inv - c * bn->value[size_t(j)] * inv_b2);
            }
        }
    };
    return wrap(out);
}

Tensor Tape::sum(Tensor a) {
    TensorNode* an = a.node_;
    TensorNode* out = alloc(1, 1);
    double acc = 0.0;
    for (double v : an->value) acc += v;
    out->value[0] = acc;
    check_finite(out, "sum");
    out->backward = [out, an]() {
        for (size_t i = 0; i < an->grad.size(); i++) an->grad[i] += out->grad[0];
    };
    return wrap(out);
}

Tensor Tape::mean(Tensor a) {
    TensorNode* an = a.node_;
    if (an->size() == 0) throw TensorError("mean: empty input");
    TensorNode* out = alloc(1, 1);
    double acc = 0.0;
    for (double v : an->value) acc += v;
    out->value[0] = acc / double(an->size());
    check_finite(out, "mean");
    out->backward = [out, an]() {
        const double inv = 1.0 / double(an->size());
        for (size_t i = 0; i < an->grad.size(); i++) an->grad[i] += out->grad[0] * inv;
    };
    return wrap(out);
}

Tensor Tape::bce_loss(Tensor probs, const std::vector<int>& labels, double pos_weight) {
    TensorNode* pn = probs.node_;
    if (pn->size() == 0) throw TensorError("bce_loss: empty probability vector");
    if (pn->size() != labels.size())
        throw TensorError("bce_loss: " + std::to_string(pn->size()) +
                          " probabilities vs " + std::to_string(labels.size()) +
                          " labels");
    TensorNode* out = alloc(1, 1);
    const double k = double(pn->size());
    double acc = 0.0;
    for (size_t i = 0; i < pn->size(); i++) {
        const double p = std::clamp(pn->value[i], kBceClip, 1.0 - kBceClip);
        const double w = labels[i] ? pos_weight : 1.0;
        acc -= labels[i] ? w * std::log(p) : std::log(1.0 - p);
    }
    out->value[0] = acc / k;
    check_finite(out, "bce_loss");
    std::vector<int> y = labels;
    out->backward = [out, pn, y, pos_weight, k]() {
        const double g = out->grad[0];
        for (size_t i = 0; i < pn->size(); i++) {
            const double raw = pn->value[i];
            if (raw <= kBceClip || raw >= 1.0 - kBceClip) continue;  // clipped: flat
            const double w = y[i] ? pos_weight : 1.0;
            const double d = y[i] ? -w / raw : 1.0 / (1.0 - raw);
            pn->grad[i] += g * d / k;
        }
    };
    return wrap(out);
}

void Tape::backward(Tensor loss) {
    TensorNode* ln = loss.node_;
    if (ln->size() != 1)
        throw TensorError("backward: loss must be a scalar, got " +
                          shape_str(ln->rows, ln->cols));
    ln->grad[0] = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        if ((*it)->backward) (*it)->backward();
    }
}

void adam_step(const std::vector<Param*>& params, AdamState& state) {
    state.step++;
    const auto& o = state.options;
    const double bc1 = 1.0 - std::pow(o.beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(o.beta2, double(state.step));
    for (Param* p : params) {
        auto& m = state.m[p->name];
        auto& v = state.v[p->name];
        if (m.size() != p->value.size()) m.assign(p->value.size(), 0.0);
        if (v.size() != p->value.size()) v.assign(p->value.size(), 0.0);
        for (size_t i = 0; i < p->value.size(); i++) {
            const double g = p->grad[i];
            m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g;
            v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p->value[i] -= o.learning_rate * mhat / (std::sqrt(vhat) + o.epsilon);
        }
        p->zero_grad();
    }
}

namespace {

constexpr char kMagic[8] = {'C', 'E', 'L', 'E', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; i++) out.push_back(char((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; i++) out.push_back(char((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double d) { put_u64(out, std::bit_cast<uint64_t>(d)); }
void put_str(std::string& out, const std::string& s) {
    put_u32(out, uint32_t(s.size()));
    out += s;
}

struct Reader {
    const std::string& buf;
    size_t pos = 0;
    explicit Reader(const std::string& b) : buf(b) {}
    void need(size_t n) const {
        if (pos + n > buf.size()) throw TensorError("checkpoint: truncated file");
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; i++) v |= uint32_t(uint8_t(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; i++) v |= uint64_t(uint8_t(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        uint32_t n = u32();
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
    std::vector<double> f64s(size_t n) {
        std::vector<double> v(n);
        for (size_t i = 0; i < n; i++) v[i] = f64();
        return v;
    }
};

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<const Param*>& params,
                     const AdamState* state) {
    std::string out;
    out.append(kMagic, sizeof(kMagic));
    put_u32(out, kVersion);
    put_u32(out, uint32_t(params.size()));
    for (const Param* p : params) {
        put_str(out, p->name);
        put_u32(out, uint32_t(p->rows));
        put_u32(out, uint32_t(p->cols));
        for (double v : p->value) put_f64(out, v);
    }
    out.push_back(state ? 1 : 0);
    if (state) {
        put_f64(out, state->options.learning_rate);
        put_f64(out, state->options.beta1);
        put_f64(out, state->options.beta2);
        put_f64(out, state->options.epsilon);
        put_u64(out, uint64_t(state->step));
        put_u32(out, uint32_t(params.size()));
        for (const Param* p : params) {
            put_str(out, p->name);
            auto mit = state->m.find(p->name);
            auto vit = state->v.find(p->name);
            size_t n = p->value.size();
            put_u32(out, uint32_t(n));
            for (size_t i = 0; i < n; i++)
                put_f64(out, mit != state->m.end() && i < mit->second.size()
                                  ? mit->second[i]
                                  : 0.0);
            for (size_t i = 0; i < n; i++)
                put_f64(out, vit != state->v.end() && i < vit->second.size()
                                  ? vit->second[i]
                                  : 0.0);
        }
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw TensorError("cannot write checkpoint: " + path);
    f.write(out.data(), std::streamsize(out.size()));
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw TensorError("cannot open checkpoint: " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (buf.size() < sizeof(kMagic) || buf.compare(0, sizeof(kMagic), kMagic, sizeof(kMagic)) != 0)
        throw TensorError("checkpoint: bad magic in " + path);
    Reader r(buf);
    r.pos = sizeof(kMagic);
    uint32_t version = r.u32();
    if (version != kVersion)
        throw TensorError("checkpoint: unsupported version " + std::to_string(version));
    Checkpoint ck;
    uint32_t count = r.u32();
    for (uint32_t i = 0; i < count; i++) {
        std::string name = r.str();
        Checkpoint::Entry e;
        e.rows = int(r.u32());
        e.cols = int(r.u32());
        e.value = r.f64s(size_t(e.rows) * size_t(e.cols));
        ck.order.push_back(name);
        ck.params[name] = std::move(e);
    }
    r.need(1);
    bool has_adam = buf[r.pos++] != 0;
    if (has_adam) {
        AdamState st;
        st.options.learning_rate = r.f64();
        st.options.beta1 = r.f64();
        st.options.beta2 = r.f64();
        st.options.epsilon = r.f64();
        st.step = long(r.u64());
        uint32_t n = r.u32();
        for (uint32_t i = 0; i < n; i++) {
            std::string name = r.str();
            uint32_t len = r.u32();
            st.m[name] = r.f64s(len);
            st.v[name] = r.f64s(len);
        }
        ck.adam = std::move(st);
    }
    return ck;
}

}  // namespace celetrip
