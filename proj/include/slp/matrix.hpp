#pragma once

#include <cstddef>
#include <vector>

#include "slp/common.hpp"
#include "slp/graph.hpp"

namespace slp {

// Dense row-major matrix of doubles. Just enough linear algebra for the
// models and tests here; nothing is lazy or views-based.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) {
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        return data_[i * cols_ + j];
    }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// out = a * b
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ConfigError("matmul: shape mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double* oi = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) oi[j] += aik * bk[j];
        }
    }
    return out;
}

// out = a^T * b
inline Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw ConfigError("matmul_at_b: shape mismatch");
    Matrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* ak = a.row(k);
        const double* bk = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            double aki = ak[i];
            if (aki == 0.0) continue;
            double* oi = out.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) oi[j] += aki * bk[j];
        }
    }
    return out;
}

// out = a * b^T
inline Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw ConfigError("matmul_a_bt: shape mismatch");
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double* oi = out.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* bj = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += ai[k] * bj[k];
            oi[j] = acc;
        }
    }
    return out;
}

// Sparse symmetric matrix in the same compressed layout as Graph, used for
// the propagation step S * H. Symmetry means no transposed variant is needed
// in the backward pass.
class CsrMatrix {
public:
    CsrMatrix() = default;

    // Identity of size n (used by models without message passing).
    static CsrMatrix identity(NodeId n) {
        CsrMatrix m;
        m.n_ = n;
        // offsets_ starts as {0} from the member initializer.
        m.offsets_.reserve(static_cast<std::size_t>(n) + 1);
        for (NodeId v = 0; v < n; ++v) {
            m.cols_.push_back(v);
            m.values_.push_back(1.0);
            m.offsets_.push_back(static_cast<std::int64_t>(m.cols_.size()));
        }
        return m;
    }

    // Adjacency of g with entry (v, u) mapped through weight(v, u).
    template <class WeightFn>
    static CsrMatrix from_graph(const Graph& g, WeightFn weight) {
        CsrMatrix m;
        m.n_ = g.num_nodes();
        m.offsets_.reserve(static_cast<std::size_t>(m.n_) + 1);
        for (NodeId v = 0; v < m.n_; ++v) {
            for (NodeId u : g.neighbors(v)) {
                m.cols_.push_back(u);
                m.values_.push_back(weight(v, u));
            }
            m.offsets_.push_back(static_cast<std::int64_t>(m.cols_.size()));
        }
        return m;
    }

    NodeId num_rows() const { return n_; }

    // out = S * h, h and out dense (n x f).
    Matrix apply(const Matrix& h) const {
        if (h.rows() != static_cast<std::size_t>(n_))
            throw ConfigError("CsrMatrix::apply: shape mismatch");
        Matrix out(h.rows(), h.cols());
        for (NodeId v = 0; v < n_; ++v) {
            double* ov = out.row(static_cast<std::size_t>(v));
            for (std::int64_t e = offsets_[static_cast<std::size_t>(v)];
                 e < offsets_[static_cast<std::size_t>(v) + 1]; ++e) {
                double w = values_[static_cast<std::size_t>(e)];
                const double* hu = h.row(
                    static_cast<std::size_t>(cols_[static_cast<std::size_t>(e)]));
                for (std::size_t j = 0; j < h.cols(); ++j) ov[j] += w * hu[j];
            }
        }
        return out;
    }

    bool operator==(const CsrMatrix& other) const = default;

private:
    NodeId n_ = 0;
    std::vector<std::int64_t> offsets_{0};
    std::vector<NodeId> cols_;
    std::vector<double> values_;
};

}  // namespace slp
