#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tdn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense d-dimensional tensor. Entries are linearized with the LAST index
/// fastest: entry (i_1, ..., i_d) lives at ((i_1*m_2 + i_2)*m_3 + ...)*m_d + i_d.
/// All structured formats and kron() share this order.
struct DenseTensor {
    std::vector<std::int64_t> shape;
    std::vector<double> data;

    DenseTensor() = default;
    DenseTensor(std::vector<std::int64_t> shape_in, std::vector<double> data_in);

    static DenseTensor zeros(std::vector<std::int64_t> shape_in);

    std::int64_t size() const;
    int ndim() const { return static_cast<int>(shape.size()); }

    double& at(std::span<const std::int64_t> idx);
    double at(std::span<const std::int64_t> idx) const;

    std::int64_t linear_index(std::span<const std::int64_t> idx) const;
};

struct SVDResult {
    Matrix u;       // orthonormal columns
    Vector sigma;   // non-increasing, non-negative
    Matrix v;       // orthonormal columns
};

std::vector<double> vectorize(const DenseTensor& t);
DenseTensor devectorize(const std::vector<double>& v, std::vector<std::int64_t> shape);

/// Mode-k unfolding (1-based mode), size m_k x (M/m_k). Column order is the
/// linearization of the remaining indices in their original order.
Matrix unfold(const DenseTensor& t, int mode);
DenseTensor fold(const Matrix& a, int mode, std::vector<std::int64_t> shape);

/// Kronecker product of the given vectors, left to right. Consistent with
/// the tensor linearization: a rank-one tensor with factors w^(1)..w^(d)
/// vectorizes to kron(w^(1), ..., w^(d)).
std::vector<double> kron(const std::vector<std::vector<double>>& vectors);

double inner(const DenseTensor& a, const DenseTensor& b);
double fro_norm(const DenseTensor& t);

/// Best rank-r approximation factors of a dense matrix (Eckart-Young).
/// Deterministic for a given input. 1 <= rank <= min(rows, cols).
SVDResult truncated_svd(const Matrix& a, int rank);

std::string shape_to_string(const std::vector<std::int64_t>& shape);

}  // namespace tdn
