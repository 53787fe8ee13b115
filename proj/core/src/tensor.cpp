#include "tdn/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tdn {

namespace {

std::int64_t shape_product(const std::vector<std::int64_t>& shape) {
    std::int64_t m = 1;
    for (auto s : shape) m *= s;
    return m;
}

void validate_shape(const std::vector<std::int64_t>& shape) {
    if (shape.empty()) throw std::invalid_argument("tensor shape must have d >= 1");
    for (auto s : shape) {
        if (s < 1) throw std::invalid_argument("tensor dimensions must be >= 1");
    }
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::int64_t> shape_in, std::vector<double> data_in)
    : shape(std::move(shape_in)), data(std::move(data_in)) {
    validate_shape(shape);
    if (static_cast<std::int64_t>(data.size()) != shape_product(shape)) {
        throw std::invalid_argument("tensor data length does not match shape");
    }
}

DenseTensor DenseTensor::zeros(std::vector<std::int64_t> shape_in) {
    validate_shape(shape_in);
    const auto m = shape_product(shape_in);
    return DenseTensor(std::move(shape_in), std::vector<double>(static_cast<std::size_t>(m), 0.0));
}

std::int64_t DenseTensor::size() const { return shape_product(shape); }

std::int64_t DenseTensor::linear_index(std::span<const std::int64_t> idx) const {
    if (idx.size() != shape.size()) throw std::invalid_argument("index arity mismatch");
    std::int64_t lin = 0;
    for (std::size_t s = 0; s < shape.size(); ++s) {
        if (idx[s] < 0 || idx[s] >= shape[s]) throw std::out_of_range("tensor index out of range");
        lin = lin * shape[s] + idx[s];
    }
    return lin;
}

double& DenseTensor::at(std::span<const std::int64_t> idx) {
    return data[static_cast<std::size_t>(linear_index(idx))];
}

double DenseTensor::at(std::span<const std::int64_t> idx) const {
    return data[static_cast<std::size_t>(linear_index(idx))];
}

std::vector<double> vectorize(const DenseTensor& t) { return t.data; }

DenseTensor devectorize(const std::vector<double>& v, std::vector<std::int64_t> shape) {
    return DenseTensor(std::move(shape), v);
}

Matrix unfold(const DenseTensor& t, int mode) {
    const int d = t.ndim();
    if (mode < 1 || mode > d) throw std::invalid_argument("unfold: mode out of range");
    const int k = mode - 1;
    const std::int64_t rows = t.shape[k];
    const std::int64_t cols = t.size() / rows;
    Matrix out(rows, cols);

    std::vector<std::int64_t> idx(d, 0);
    const std::int64_t total = t.size();
    for (std::int64_t lin = 0; lin < total; ++lin) {
        std::int64_t rem = lin;
        for (int s = d - 1; s >= 0; --s) {
            idx[s] = rem % t.shape[s];
            rem /= t.shape[s];
        }
        std::int64_t col = 0;
        for (int s = 0; s < d; ++s) {
            if (s == k) continue;
            col = col * t.shape[s] + idx[s];
        }
        out(idx[k], col) = t.data[static_cast<std::size_t>(lin)];
    }
    return out;
}

DenseTensor fold(const Matrix& a, int mode, std::vector<std::int64_t> shape) {
    validate_shape(shape);
    const int d = static_cast<int>(shape.size());
    if (mode < 1 || mode > d) throw std::invalid_argument("fold: mode out of range");
    const int k = mode - 1;
    const std::int64_t total = shape_product(shape);
    if (a.rows() != shape[k] || a.cols() != total / shape[k]) {
        throw std::invalid_argument("fold: matrix size does not match shape/mode");
    }
    DenseTensor t = DenseTensor::zeros(shape);
    std::vector<std::int64_t> idx(d, 0);
    for (std::int64_t lin = 0; lin < total; ++lin) {
        std::int64_t rem = lin;
        for (int s = d - 1; s >= 0; --s) {
            idx[s] = rem % shape[s];
            rem /= shape[s];
        }
        std::int64_t col = 0;
        for (int s = 0; s < d; ++s) {
            if (s == k) continue;
            col = col * shape[s] + idx[s];
        }
        t.data[static_cast<std::size_t>(lin)] = a(idx[k], col);
    }
    return t;
}

std::vector<double> kron(const std::vector<std::vector<double>>& vectors) {
    if (vectors.empty()) throw std::invalid_argument("kron: empty vector list");
    for (const auto& v : vectors) {
        if (v.empty()) throw std::invalid_argument("kron: empty vector");
    }
    std::vector<double> out = vectors.front();
    for (std::size_t k = 1; k < vectors.size(); ++k) {
        const auto& v = vectors[k];
        std::vector<double> next(out.size() * v.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            for (std::size_t j = 0; j < v.size(); ++j) {
                next[i * v.size() + j] = out[i] * v[j];
            }
        }
        out = std::move(next);
    }
    return out;
}

double inner(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape != b.shape) throw std::invalid_argument("inner: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
    return acc;
}

double fro_norm(const DenseTensor& t) {
    double acc = 0.0;
    for (double x : t.data) acc += x * x;
    return std::sqrt(acc);
}

SVDResult truncated_svd(const Matrix& a, int rank) {
    if (!a.allFinite()) throw std::invalid_argument("truncated_svd: non-finite entries");
    const int maxr = static_cast<int>(std::min(a.rows(), a.cols()));
    if (rank < 1 || rank > maxr) throw std::invalid_argument("truncated_svd: rank out of range");
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SVDResult r;
    r.u = svd.matrixU().leftCols(rank);
    r.sigma = svd.singularValues().head(rank);
    r.v = svd.matrixV().leftCols(rank);
    return r;
}

std::string shape_to_string(const std::vector<std::int64_t>& shape) {
    std::ostringstream os;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    return os.str();
}

}  // namespace tdn
