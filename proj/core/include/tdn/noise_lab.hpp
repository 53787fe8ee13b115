#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tdn/decompose.hpp"
#include "tdn/formats.hpp"
#include "tdn/tensor.hpp"

namespace tdn {

struct NoiseSpec {
    enum class Mode { UnitVariance, TargetRatio } mode = Mode::TargetRatio;
    double ratio = 0.1;  // ||N||_F / ||T||_F when TargetRatio
    std::uint64_t seed = 0;
};

/// One denoising trial.
struct ExperimentRecord {
    FormatKind format = FormatKind::Canonical;
    std::vector<std::int64_t> shape;
    int rank = 1;
    std::uint64_t seed = 0;
    std::int64_t trial_index = 0;
    double noise_ratio = 0.0;
    double epsilon = 0.0;     // || P_K(T+N) - T ||_F
    double noise_norm = 0.0;  // || N ||_F
    double residual = 0.0;    // || P_K(T+N) - (T+N) ||_F
    bool hypothesis_holds = false;
    double wall_time_ms = 0.0;   // excluded from determinism comparisons
    double knorm_estimate = -1.0;  // restricted-norm lower bound; < 0 when not measured
};

struct PowerLawFit {
    double c = 0.0;
    double alpha = 0.0;
    double r_squared = 0.0;
};

std::pair<DenseTensor, DenseTensor> add_noise(const DenseTensor& t, const NoiseSpec& spec);

double filtration_error(const DenseTensor& approx, const DenseTensor& truth);

/// True iff residual <= noise_norm + 1e-12 slack.
bool check_hypothesis(double residual, double noise_norm);

/// Checks the derivation-chain inequality eps^2 <= 2*(approx - truth, noise)_F
/// on a trial. Vacuously true when the hypothesis fails on the trial.
bool guarantee_bound(double residual, double noise_norm, const DenseTensor& approx,
                     const DenseTensor& truth, const DenseTensor& noise);

/// Lower bound on the restricted norm via multi-start rank-2 ALS:
/// sqrt(||N||_F^2 - best_rank2_residual^2).
double knorm_lower_bound(const DenseTensor& noise, const AlsOptions& rank2_opts);

/// Log-log least squares of eps ~ C * r^alpha. Needs >= 3 positive points.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

struct DimensionSweepConfig {
    int m_exponent = 12;          // M = 2^m_exponent
    std::vector<int> d_list;      // empty: every divisor d >= 2 of m_exponent
    std::vector<double> ratios = {0.1};
    std::uint64_t master_seed = 1;
    int seeds = 20;
    bool use_multigrid = false;
    int knorm_restarts = 0;  // 0: skip the restricted-norm estimate
    AlsOptions als;
    int threads = 0;  // 0: TENSOR_DENOISE_THREADS or hardware default
};

/// Divisors d >= 2 of the exponent (each gives an integer m = 2^(exp/d) >= 2).
std::vector<int> divisor_d_list(int m_exponent);

/// Rank-one denoising trials across dimensionalities at fixed element count.
/// Records are ordered by trial index; content is deterministic per config
/// (wall time aside).
std::vector<ExperimentRecord> dimension_sweep(const DimensionSweepConfig& cfg);

struct RankSweepConfig {
    FormatKind format = FormatKind::Canonical;
    std::vector<std::int64_t> shape;
    std::vector<int> ranks;
    double ratio = 0.1;
    std::uint64_t master_seed = 1;
    int seeds = 20;
    AlsOptions als;
    int threads = 0;
};

std::pair<std::vector<ExperimentRecord>, PowerLawFit> rank_sweep(const RankSweepConfig& cfg);

/// Tensorized real and imaginary parts of the geometric-progression vector
/// h(phi) = [1, e^{i phi}, e^{i 2 phi}, ...] of length M.
std::pair<DenseTensor, DenseTensor> steering_tensor(double phi, std::int64_t m_total,
                                                    const std::vector<std::int64_t>& shape);

struct SteeringTrial {
    double second_singular_max = 0.0;  // complex sigma_2 over all sequential unfoldings
    double epsilon = 0.0;              // combined Frobenius distance to the clean pair
    double noise_norm = 0.0;
    double residual = 0.0;
};

/// Denoising demo: complex rank-one recovery of a noisy steering tensor,
/// handled as a pair of real tensors at the interface.
SteeringTrial steering_demo(double phi, const std::vector<std::int64_t>& shape, double ratio,
                            std::uint64_t seed);

}  // namespace tdn
