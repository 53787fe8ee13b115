#include "tdn/theory.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tdn/rng.hpp"

namespace tdn {

namespace {

Vector kron_vec(const std::vector<Vector>& vs) {
    Vector out = vs.front();
    for (std::size_t k = 1; k < vs.size(); ++k) {
        const Vector& v = vs[k];
        Vector next(out.size() * v.size());
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            for (Eigen::Index j = 0; j < v.size(); ++j) {
                next[i * v.size() + j] = out[i] * v[j];
            }
        }
        out = std::move(next);
    }
    return out;
}

double cond_from_cosine(double gamma) {
    const double g = std::abs(gamma);
    if (g >= 1.0) return std::numeric_limits<double>::infinity();
    return std::sqrt((1.0 + g) / (1.0 - g));
}

// Orthonormal 2-column base of the span of the pair's Kronecker columns,
// via the two-column closed form.
Matrix subspace_basis(const std::vector<Vector>& w1s, const std::vector<Vector>& w2s) {
    const Vector w1 = kron_vec(w1s);
    const Vector w2 = kron_vec(w2s);
    Vector plus = w1 + w2;
    Vector minus = w1 - w2;
    Matrix q(w1.size(), 2);
    q.col(0) = plus / plus.norm();
    q.col(1) = minus / minus.norm();
    return q;
}

double projector_distance(const Matrix& q, const Matrix& qt) {
    // sin of the largest principal angle between equal-dimension subspaces.
    Eigen::JacobiSVD<Matrix> svd(q.transpose() * qt);
    const double smin = svd.singularValues().minCoeff();
    return std::sqrt(std::max(0.0, 1.0 - smin * smin));
}

}  // namespace

std::pair<double, double> approximate_cosine_gap(const Vector& x, const Vector& y,
                                                 const Vector& x_hat, const Vector& y_hat) {
    const double nx = x.norm();
    const double ny = y.norm();
    const double nxh = x_hat.norm();
    const double nyh = y_hat.norm();
    if (nx == 0.0 || ny == 0.0 || nxh == 0.0 || nyh == 0.0) {
        throw std::invalid_argument("approximate_cosine_gap: zero vector");
    }
    const double eta_x = (x - x_hat).norm() / nx;
    const double eta_y = (y - y_hat).norm() / ny;
    const double gap = std::abs(x.dot(y) / (nx * ny) - x_hat.dot(y_hat) / (nxh * nyh));
    return {gap, 2.0 * eta_x + 2.0 * eta_y};
}

KronConditionReport kron_condition_check(const std::vector<Matrix>& factors) {
    if (factors.empty()) throw std::invalid_argument("kron_condition_check: no factors");
    KronConditionReport report;
    double gamma = 1.0;
    for (const auto& f : factors) {
        if (f.cols() != 2) throw std::invalid_argument("kron_condition_check: need two columns");
        if (std::abs(f.col(0).norm() - 1.0) > 1e-8 || std::abs(f.col(1).norm() - 1.0) > 1e-8) {
            throw std::invalid_argument("kron_condition_check: columns must be unit norm");
        }
        const double gs = f.col(0).dot(f.col(1));
        report.cond_per_dim.push_back(cond_from_cosine(gs));
        gamma *= gs;
    }
    report.cond_full = cond_from_cosine(gamma);
    return report;
}

SVDResult two_column_svd(const Vector& c1, const Vector& c2) {
    if (std::abs(c1.norm() - 1.0) > 1e-10 || std::abs(c2.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("two_column_svd: columns must be unit norm");
    }
    Vector c2_eff = c2;
    bool flipped = false;
    if ((c1 + c2).norm() < (c1 - c2).norm()) {
        c2_eff = -c2;
        flipped = true;
    }
    const Vector plus = c1 + c2_eff;
    const Vector minus = c1 - c2_eff;
    const double np = plus.norm();
    const double nm = minus.norm();

    SVDResult r;
    r.u = Matrix::Zero(c1.size(), 2);
    r.sigma = Vector(2);
    r.sigma[0] = np / std::numbers::sqrt2;
    r.sigma[1] = nm / std::numbers::sqrt2;
    r.u.col(0) = plus / np;
    if (nm > 1e-14) {
        r.u.col(1) = minus / nm;
    } else {
        r.sigma[1] = 0.0;  // rank-deficient pair
    }
    const double h = 1.0 / std::numbers::sqrt2;
    Matrix v(2, 2);
    v << h, h, h, -h;
    if (flipped) v.row(1) = -v.row(1);
    r.v = v;
    return r;
}

Rank2FactorPair build_rank2_pair(const std::vector<Vector>& a, const std::vector<Vector>& b,
                                 const std::vector<double>& alpha) {
    if (a.size() != b.size() || a.size() != alpha.size() || a.empty()) {
        throw std::invalid_argument("build_rank2_pair: inconsistent inputs");
    }
    Rank2FactorPair pair;
    pair.a = a;
    pair.b = b;
    pair.alpha = alpha;
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (std::abs(a[s].norm() - 1.0) > 1e-10 || std::abs(b[s].norm() - 1.0) > 1e-10) {
            throw std::invalid_argument("build_rank2_pair: a_s, b_s must be unit vectors");
        }
        if (std::abs(a[s].dot(b[s])) > 1e-10) {
            throw std::invalid_argument("build_rank2_pair: a_s must be orthogonal to b_s");
        }
        if (!(alpha[s] > 0.0 && alpha[s] <= 1.0)) {
            throw std::invalid_argument("build_rank2_pair: alpha_s must be in (0, 1]");
        }
        const double denom = std::sqrt(1.0 + alpha[s] * alpha[s]);
        pair.w1.push_back((a[s] + alpha[s] * b[s]) / denom);
        pair.w2.push_back((a[s] - alpha[s] * b[s]) / denom);
    }
    return pair;
}

SubspacePair conditioned_approximation(const Rank2FactorPair& pair, double omega) {
    const int d = pair.dims();
    if (d < 2) throw std::invalid_argument("conditioned_approximation: d must be >= 2");
    if (!(omega >= d)) throw std::invalid_argument("conditioned_approximation: Omega must be >= d");

    SubspacePair out;
    out.q = subspace_basis(pair.w1, pair.w2);

    bool all_ill = true;
    for (double alpha : pair.alpha) {
        if (alpha >= 1.0 / omega) {
            all_ill = false;
            break;
        }
    }
    if (!all_ill) {
        // Some factor already satisfies the cap, so the base itself does.
        out.q_tilde = out.q;
        out.distance = 0.0;
        const Vector w1 = kron_vec(pair.w1);
        const Vector w2 = kron_vec(pair.w2);
        out.cond_tilde = cond_from_cosine(w1.dot(w2));
        return out;
    }

    double alpha_max = 0.0;
    for (double alpha : pair.alpha) alpha_max = std::max(alpha_max, alpha);
    std::vector<Vector> w1t, w2t;
    for (int s = 0; s < d; ++s) {
        const double beta = pair.alpha[s] / (omega * alpha_max);
        const double denom = std::sqrt(1.0 + beta * beta);
        w1t.push_back((pair.a[s] + beta * pair.b[s]) / denom);
        w2t.push_back((pair.a[s] - beta * pair.b[s]) / denom);
    }
    out.q_tilde = subspace_basis(w1t, w2t);
    out.distance = projector_distance(out.q, out.q_tilde);
    const Vector w1 = kron_vec(w1t);
    const Vector w2 = kron_vec(w2t);
    out.cond_tilde = cond_from_cosine(w1.dot(w2));
    return out;
}

Matrix unbounded_example() {
    const double s = 1.0 / std::sqrt(3.0);
    Matrix q = Matrix::Zero(8, 2);
    q(0, 0) = 1.0;
    q(1, 1) = s;
    q(3, 1) = s;
    q(7, 1) = s;
    return q;
}

std::pair<double, double> rank2_difference_tail(const Rank2FactorPair& pair) {
    const int d = pair.dims();
    const Vector w1 = kron_vec(pair.w1);
    const Vector w2 = kron_vec(pair.w2);
    double scale = 1.0;
    for (double alpha : pair.alpha) scale *= std::sqrt(1.0 + alpha * alpha);
    Vector main = (w1 - w2) * (scale / 2.0);
    double alpha_sq = 0.0;
    for (int s = 0; s < d; ++s) {
        std::vector<Vector> term;
        for (int q = 0; q < d; ++q) term.push_back(q == s ? pair.b[q] : pair.a[q]);
        main -= pair.alpha[s] * kron_vec(term);
        alpha_sq += pair.alpha[s] * pair.alpha[s];
    }
    return {main.norm(), std::sqrt(alpha_sq)};
}

double kron_rank2_fit_residual(const Matrix& target, int d, std::int64_t m, double omega,
                               int restarts, std::uint64_t seed) {
    std::int64_t total = 1;
    for (int s = 0; s < d; ++s) total *= m;
    if (target.rows() != total || target.cols() != 2) {
        throw std::invalid_argument("kron_rank2_fit_residual: target size mismatch");
    }
    if (restarts < 1) throw std::invalid_argument("kron_rank2_fit_residual: restarts must be >= 1");
    const Matrix target_proj = target * target.transpose();

    auto objective = [&](const std::vector<Vector>& a, const std::vector<Vector>& b,
                         const std::vector<double>& alpha) {
        const auto pair = build_rank2_pair(a, b, alpha);
        const Matrix q = subspace_basis(pair.w1, pair.w2);
        return (target_proj - q * q.transpose()).norm();
    };

    double best = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < restarts; ++restart) {
        GaussianStream g(split_seed(seed, restart));
        std::vector<Vector> a(d), b(d);
        std::vector<double> alpha(d, 1.0 / omega);
        for (int s = 0; s < d; ++s) {
            Vector av(m), bv(m);
            for (std::int64_t i = 0; i < m; ++i) {
                av[i] = g.normal();
                bv[i] = g.normal();
            }
            av.normalize();
            bv -= bv.dot(av) * av;
            bv.normalize();
            a[s] = av;
            b[s] = bv;
        }
        double current = objective(a, b, alpha);
        double step = 0.5;
        for (int iter = 0; iter < 400; ++iter) {
            std::vector<Vector> a2 = a, b2 = b;
            std::vector<double> alpha2 = alpha;
            for (int s = 0; s < d; ++s) {
                for (std::int64_t i = 0; i < m; ++i) {
                    a2[s][i] += step * g.normal();
                    b2[s][i] += step * g.normal();
                }
                a2[s].normalize();
                b2[s] -= b2[s].dot(a2[s]) * a2[s];
                b2[s].normalize();
                alpha2[s] = std::clamp(alpha2[s] + 0.25 * step * g.normal(), 1.0 / omega, 1.0);
            }
            const double trial = objective(a2, b2, alpha2);
            if (trial < current) {
                a = std::move(a2);
                b = std::move(b2);
                alpha = std::move(alpha2);
                current = trial;
            } else {
                step *= 0.97;
            }
        }
        best = std::min(best, current);
    }
    return best;
}

}  // namespace tdn
