#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdn/formats.hpp"
#include "tdn/noise_lab.hpp"

namespace tdn {

enum class BoundKind {
    Theorem1,
    EmpiricalRank1,
    RankCanonical,
    RankTensorTrain,
    RankTucker,
    NetLogCardinality,
};

struct BoundValue {
    double value = 0.0;
    BoundKind kind = BoundKind::Theorem1;
    bool overflowed = false;  // +infinity sentinel was returned
    std::string inputs;       // echo of the evaluated parameters
};

/// mu * sqrt(m d^2 ln m) + t.
double theorem1_bound(std::int64_t m, int d, double mu, double t);

/// e^{-t^2/4} + 2 e^{-m^{d/2}/8}, clamped to [0, 1].
double theorem1_tail_probability(double t, std::int64_t m, int d);

/// sqrt(d M^{1/d} / M) * noise_norm; requires M = m^d with integer m.
double empirical_rank1_bound(int d, std::int64_t m_total, double noise_norm);

/// Rank-dependent bound family:
///   canonical    sqrt(d R   M^{1/d} log d / M) * noise_norm
///   tensor-train sqrt(d R^2 M^{1/d} log d / M) * noise_norm
///   Tucker       sqrt(d R^d M^{1/d} log d / M) * noise_norm
/// Evaluated in log space; returns +infinity (flagged in BoundValue form)
/// when the Tucker R^d overflows.
double rank_bound(FormatKind kind, int d, std::int64_t m_total, int rank, double noise_norm);
BoundValue rank_bound_value(FormatKind kind, int d, std::int64_t m_total, int rank,
                            double noise_norm);

/// ln of the constructive net cardinality (6 Omega^2 / zeta)^{2 m d}.
double net_log_cardinality(std::int64_t m, int d, double omega, double zeta);

struct MuCalibration {
    double mu = 0.0;
    double t = 0.0;         // tail shift chosen for the target coverage
    double coverage = 0.0;  // fraction of records below the fitted bound
    int n_records = 0;
    // The supremum proxies are lower bounds, so the fitted mu is itself a
    // lower estimate of the true constant.
    bool lower_estimate = true;
};

/// Fits the smallest mu such that every observed restricted-norm estimate
/// (in standard-normal units) falls below theorem1_bound at the t giving
/// 95% tail coverage. Needs >= 10 records with knorm estimates spanning
/// >= 3 distinct d values.
MuCalibration calibrate_mu(const std::vector<ExperimentRecord>& records);

}  // namespace tdn
