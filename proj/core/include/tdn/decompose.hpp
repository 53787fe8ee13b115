#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tdn/formats.hpp"
#include "tdn/tensor.hpp"

namespace tdn {

struct AlsOptions {
    int max_sweeps = 200;
    double rel_tol = 1e-8;   // stop when the relative residual change drops below this
    int restarts = 1;
    std::uint64_t seed = 0;
    enum class Init { RandomGaussian, Provided } init = Init::RandomGaussian;
    std::optional<CPTensor> initial;  // used when init == Provided

    void validate() const;
};

struct ApproxReport {
    std::vector<std::int64_t> ranks;
    double residual = 0.0;  // || P_K(input) - input ||_F
    int sweeps_used = 0;
    bool converged = false;
};

/// Alternating least squares for the canonical format. Best-of-restarts,
/// deterministic per opts.seed; the residual is non-increasing across sweeps.
std::pair<CPTensor, ApproxReport> als_cp(const DenseTensor& t, int rank, const AlsOptions& opts);

/// Classical HOSVD: independent mode SVDs of the input, every Tucker rank
/// capped at the same value.
std::pair<TuckerTensor, ApproxReport> hosvd(const DenseTensor& t, int rank);

/// TT-SVD with every chain rank capped at the same value.
std::pair<TTTensor, ApproxReport> tt_svd(const DenseTensor& t, int rank);

/// Multi-grid rank-one bootstrap: a coarse low-d ALS fit is recursively
/// split (rank-one SVD of reshaped factors) to initialize finer ALS runs.
/// The schedule lists dimension counts, strictly increasing, each dividing
/// the next, the last equal to the dimensionality of `t`.
std::pair<CPTensor, ApproxReport> multigrid_als_rank1(const DenseTensor& t,
                                                      const std::vector<int>& schedule,
                                                      const AlsOptions& opts);

/// Splits a rank-one factor of length p*q into two factors via the rank-one
/// SVD of its p x q reshape (sign fixed so the leading entry of the left
/// factor is non-negative).
std::pair<Vector, Vector> split_rank1_factor(const Vector& v, std::int64_t p, std::int64_t q);

}  // namespace tdn
