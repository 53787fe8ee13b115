#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tdn/tensor.hpp"

namespace tdn {

/// Rank-two Kronecker factor pair in the (a, b, alpha) parametrization:
/// per dimension, unit vectors a_s ⟂ b_s and a mixing coefficient
/// alpha_s in (0, 1]; the derived columns are
///   w1 = (a + alpha b)/sqrt(1+alpha^2), w2 = (a - alpha b)/sqrt(1+alpha^2),
/// with per-factor cond_2 = 1/alpha.
struct Rank2FactorPair {
    std::vector<Vector> a;
    std::vector<Vector> b;
    std::vector<double> alpha;
    std::vector<Vector> w1;  // derived
    std::vector<Vector> w2;  // derived

    int dims() const { return static_cast<int>(alpha.size()); }
};

/// Two orthonormal 2-column bases over the full Kronecker space and the
/// spectral-norm distance of their projectors.
struct SubspacePair {
    Matrix q;
    Matrix q_tilde;
    double distance = 0.0;    // || Q Q* - Q~ Q~* ||_2
    double cond_tilde = 1.0;  // cond_2 of the modified Kronecker base
};

/// |cos(x,y) - cos(x^,y^)| and the bound 2 eta_x + 2 eta_y, where
/// eta are the relative perturbation sizes.
std::pair<double, double> approximate_cosine_gap(const Vector& x, const Vector& y,
                                                 const Vector& x_hat, const Vector& y_hat);

struct KronConditionReport {
    double cond_full = 1.0;            // via the cosine-product formula
    std::vector<double> cond_per_dim;  // per-dimension cond_2
};

/// Condition numbers of a Kronecker-product two-column base with unit-norm
/// columns; checks cond_full <= min per-dimension cond.
KronConditionReport kron_condition_check(const std::vector<Matrix>& factors);

/// Closed-form SVD of [c1 c2] with unit-norm columns. The sign of c2 is
/// flipped internally when ||c1+c2|| < ||c1-c2||. A (anti)parallel pair
/// yields a rank-one result with zero second singular value.
SVDResult two_column_svd(const Vector& c1, const Vector& c2);

Rank2FactorPair build_rank2_pair(const std::vector<Vector>& a, const std::vector<Vector>& b,
                                 const std::vector<double>& alpha);

/// Bounded-condition approximation: when every alpha_s < 1/Omega, builds the
/// beta-modified pair with beta = alpha / (Omega * max|alpha|) and returns
/// both subspaces with their projector distance. Well-conditioned inputs
/// return the trivial pair with zero distance.
SubspacePair conditioned_approximation(const Rank2FactorPair& pair, double omega);

/// The 8x2 orthonormal matrix whose subspace is reachable only through
/// increasingly ill-conditioned rank-two Kronecker factorizations
/// (d = 3, m = 2 border-rank example).
Matrix unbounded_example();

/// Tail of the expansion of (w1 - w2): norm of the terms beyond first order
/// in alpha, together with ||alpha||_2. Computed by full expansion.
std::pair<double, double> rank2_difference_tail(const Rank2FactorPair& pair);

/// Best projector-distance fit of a target orthonormal 2-column base by a
/// Kronecker rank-two pair with all per-dimension conditions capped at
/// Omega (alpha_s >= 1/Omega). Randomized multi-start with local descent;
/// deterministic per seed. Factor dimensions are taken uniform of size m.
double kron_rank2_fit_residual(const Matrix& target, int d, std::int64_t m, double omega,
                               int restarts, std::uint64_t seed);

}  // namespace tdn
