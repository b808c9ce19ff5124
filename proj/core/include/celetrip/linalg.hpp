#pragma once

#include <cassert>
#include <vector>

namespace celetrip {

// Plain row-major dense matrix used for graph features, adjacency and
// pretrained embeddings. Autodiff lives in tensor.hpp; this type carries
// no tape state.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(size_t(r) * size_t(c), fill) {}

    double& at(int r, int c) {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return data[size_t(r) * cols + c];
    }
    double at(int r, int c) const {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return data[size_t(r) * cols + c];
    }

    bool same_shape(const DenseMatrix& o) const {
        return rows == o.rows && cols == o.cols;
    }
};

}  // namespace celetrip
