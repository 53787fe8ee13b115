#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdn/tensor.hpp"

namespace tdn {

enum class FormatKind { Canonical, Tucker, TensorTrain };

std::string to_string(FormatKind kind);
FormatKind format_from_string(const std::string& name);

/// Canonical (CP) tensor in normalized form: every factor column has unit
/// 2-norm, the scale is carried by the weights.
struct CPTensor {
    std::vector<Matrix> factors;  // factor s: m_s x R
    Vector weights;               // length R

    int rank() const { return static_cast<int>(weights.size()); }
    std::vector<std::int64_t> shape() const;
    void validate() const;
    /// Moves column scales into the weights so factor columns are unit-norm.
    void normalize_columns();
};

struct TuckerTensor {
    DenseTensor core;             // R x R x ... x R (d times)
    std::vector<Matrix> factors;  // m_s x R, orthonormal columns

    std::vector<std::int64_t> shape() const;
    void validate() const;
};

struct TTTensor {
    std::vector<DenseTensor> cores;  // core s: r_{s-1} x m_s x r_s, r_0 = r_d = 1

    std::vector<std::int64_t> shape() const;
    std::vector<std::int64_t> ranks() const;  // r_1 .. r_{d-1}
    void validate() const;
};

DenseTensor cp_to_dense(const CPTensor& c);
DenseTensor tucker_to_dense(const TuckerTensor& t);
DenseTensor tt_to_dense(const TTTensor& t);

/// Multilinear product along one mode: result_(mode) = a * t_(mode).
DenseTensor mode_multiply(const DenseTensor& t, const Matrix& a, int mode);

std::int64_t parameter_count(FormatKind kind, const std::vector<std::int64_t>& shape, int rank);

/// Random instances matching the experiment generation recipes. All results
/// are scaled to unit Frobenius norm and are deterministic per seed.
CPTensor random_cp(const std::vector<std::int64_t>& shape, int rank, std::uint64_t seed);
TuckerTensor random_tucker(const std::vector<std::int64_t>& shape, int rank, std::uint64_t seed);
TTTensor random_tt_via_ttsvd(const std::vector<std::int64_t>& shape, int rank, std::uint64_t seed);

double cp_norm(const CPTensor& c);

}  // namespace tdn
