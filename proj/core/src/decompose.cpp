#include "tdn/decompose.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tdn/rng.hpp"

namespace tdn {

namespace {

// Column-wise Khatri-Rao of all factors except `skip` (0-based), column order
// matching the mode-(skip+1) unfolding.
Matrix khatri_rao_skip(const std::vector<Matrix>& factors, int skip) {
    const int d = static_cast<int>(factors.size());
    const int r = static_cast<int>(factors[0].cols());
    std::int64_t rows = 1;
    for (int s = 0; s < d; ++s) {
        if (s != skip) rows *= factors[s].rows();
    }
    Matrix z(rows, r);
    for (int j = 0; j < r; ++j) {
        std::vector<std::vector<double>> cols;
        for (int s = 0; s < d; ++s) {
            if (s == skip) continue;
            const auto& col = factors[s].col(j);
            cols.emplace_back(col.data(), col.data() + col.size());
        }
        const auto k = kron(cols);
        for (std::int64_t i = 0; i < rows; ++i) z(i, j) = k[static_cast<std::size_t>(i)];
    }
    return z;
}

CPTensor random_unit_factors(const std::vector<std::int64_t>& shape, int rank, std::uint64_t seed) {
    GaussianStream g(seed);
    CPTensor c;
    c.weights = Vector::Ones(rank);
    for (auto m : shape) {
        Matrix f(m, rank);
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
            for (Eigen::Index i = 0; i < f.rows(); ++i) f(i, j) = g.normal();
        }
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
            const double nrm = f.col(j).norm();
            if (nrm > 0.0) f.col(j) /= nrm;
        }
        c.factors.push_back(std::move(f));
    }
    return c;
}

struct AlsRun {
    CPTensor cp;
    double residual = std::numeric_limits<double>::infinity();
    int sweeps = 0;
    bool converged = false;
};

AlsRun run_als_once(const DenseTensor& t, const std::vector<Matrix>& unfoldings, CPTensor cp,
                    const AlsOptions& opts) {
    const int d = t.ndim();
    const int r = cp.rank();
    const double norm_t = fro_norm(t);

    AlsRun run;
    double prev_res = std::numeric_limits<double>::infinity();
    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        for (int s = 0; s < d; ++s) {
            const Matrix z = khatri_rao_skip(cp.factors, s);
            Matrix gram = Matrix::Ones(r, r);
            for (int j = 0; j < d; ++j) {
                if (j == s) continue;
                gram = gram.cwiseProduct((cp.factors[j].transpose() * cp.factors[j]).eval());
            }
            const Matrix rhs = unfoldings[s] * z;  // m_s x R
            Eigen::LDLT<Matrix> ldlt(gram);
            if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
                gram += (1e-14 * gram.trace() / r) * Matrix::Identity(r, r);
                ldlt.compute(gram);
            }
            Matrix b = ldlt.solve(rhs.transpose()).transpose();  // m_s x R, carries weights
            for (int j = 0; j < r; ++j) {
                const double nrm = b.col(j).norm();
                if (nrm > 0.0) {
                    cp.factors[s].col(j) = b.col(j) / nrm;
                    cp.weights[j] = nrm;
                } else {
                    cp.weights[j] = 0.0;
                }
            }
        }
        const DenseTensor rec = cp_to_dense(cp);
        double sq = 0.0;
        for (std::size_t i = 0; i < rec.data.size(); ++i) {
            const double dlt = rec.data[i] - t.data[i];
            sq += dlt * dlt;
        }
        const double res = std::sqrt(sq);
        if (res > prev_res + 1e-8 * (norm_t + 1.0)) {
            throw std::runtime_error("ALS residual increased across a sweep");
        }
        run.sweeps = sweep;
        run.residual = res;
        if (prev_res - res <= opts.rel_tol * std::max(norm_t, 1e-300)) {
            run.converged = true;
            break;
        }
        prev_res = res;
    }
    run.cp = std::move(cp);
    return run;
}

}  // namespace

void AlsOptions::validate() const {
    if (max_sweeps < 1) throw std::invalid_argument("AlsOptions: max_sweeps must be >= 1");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("AlsOptions: rel_tol must be > 0");
    if (restarts < 1) throw std::invalid_argument("AlsOptions: restarts must be >= 1");
    if (init == Init::Provided && !initial.has_value()) {
        throw std::invalid_argument("AlsOptions: Provided init requires an initial guess");
    }
}

std::pair<CPTensor, ApproxReport> als_cp(const DenseTensor& t, int rank, const AlsOptions& opts) {
    opts.validate();
    if (rank < 1) throw std::invalid_argument("als_cp: rank must be >= 1");
    for (double x : t.data) {
        if (!std::isfinite(x)) throw std::invalid_argument("als_cp: non-finite input");
    }
    const int d = t.ndim();
    std::vector<Matrix> unfoldings;
    unfoldings.reserve(d);
    for (int s = 1; s <= d; ++s) unfoldings.push_back(unfold(t, s));

    AlsRun best;
    for (int restart = 0; restart < opts.restarts; ++restart) {
        CPTensor init;
        if (opts.init == AlsOptions::Init::Provided && restart == 0) {
            init = *opts.initial;
            init.normalize_columns();
        } else {
            init = random_unit_factors(t.shape, rank, split_seed(opts.seed, restart));
        }
        AlsRun run = run_als_once(t, unfoldings, std::move(init), opts);
        if (run.residual < best.residual) best = std::move(run);
    }

    ApproxReport report;
    report.ranks = {rank};
    report.residual = best.residual;
    report.sweeps_used = best.sweeps;
    report.converged = best.converged;
    return {std::move(best.cp), report};
}

std::pair<TuckerTensor, ApproxReport> hosvd(const DenseTensor& t, int rank) {
    const int d = t.ndim();
    for (auto m : t.shape) {
        if (rank > m) throw std::invalid_argument("hosvd: rank exceeds a mode size");
    }
    if (rank < 1) throw std::invalid_argument("hosvd: rank must be >= 1");

    TuckerTensor result;
    for (int s = 1; s <= d; ++s) {
        const SVDResult svd = truncated_svd(unfold(t, s), rank);
        result.factors.push_back(svd.u);
    }
    DenseTensor core = t;
    for (int s = 1; s <= d; ++s) {
        core = mode_multiply(core, result.factors[s - 1].transpose(), s);
    }
    result.core = std::move(core);

    const DenseTensor rec = tucker_to_dense(result);
    double sq = 0.0;
    for (std::size_t i = 0; i < rec.data.size(); ++i) {
        const double dlt = rec.data[i] - t.data[i];
        sq += dlt * dlt;
    }
    ApproxReport report;
    report.ranks.assign(d, rank);
    report.residual = std::sqrt(sq);
    report.sweeps_used = 1;
    report.converged = true;
    return {std::move(result), report};
}

std::pair<TTTensor, ApproxReport> tt_svd(const DenseTensor& t, int rank) {
    if (rank < 1) throw std::invalid_argument("tt_svd: rank must be >= 1");
    for (double x : t.data) {
        if (!std::isfinite(x)) throw std::invalid_argument("tt_svd: non-finite input");
    }
    const int d = t.ndim();
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    TTTensor tt;
    std::int64_t r_prev = 1;
    std::vector<double> buffer = t.data;
    std::int64_t remaining = t.size();  // product of the not-yet-consumed mode sizes
    for (int s = 0; s < d - 1; ++s) {
        const std::int64_t m = t.shape[s];
        const std::int64_t rows = r_prev * m;
        const std::int64_t cols = remaining / m;
        const Eigen::Map<const RowMat> mat(buffer.data(), rows, cols);
        const int r_next = static_cast<int>(std::min<std::int64_t>(rank, std::min(rows, cols)));
        const SVDResult svd = truncated_svd(Matrix(mat), r_next);

        DenseTensor core = DenseTensor::zeros({r_prev, m, r_next});
        const RowMat u_row = svd.u;  // rows x r_next
        for (std::int64_t i = 0; i < rows; ++i) {
            for (int j = 0; j < r_next; ++j) {
                core.data[static_cast<std::size_t>(i * r_next + j)] = u_row(i, j);
            }
        }
        tt.cores.push_back(std::move(core));

        const Matrix rest = svd.sigma.asDiagonal() * svd.v.transpose();  // r_next x cols
        const RowMat rest_row = rest;
        buffer.assign(rest_row.data(), rest_row.data() + r_next * cols);
        r_prev = r_next;
        remaining = cols;
    }
    {
        const std::int64_t m = t.shape[d - 1];
        DenseTensor core = DenseTensor::zeros({r_prev, m, 1});
        core.data = buffer;
        tt.cores.push_back(std::move(core));
    }

    const DenseTensor rec = tt_to_dense(tt);
    double sq = 0.0;
    for (std::size_t i = 0; i < rec.data.size(); ++i) {
        const double dlt = rec.data[i] - t.data[i];
        sq += dlt * dlt;
    }
    ApproxReport report;
    report.ranks = tt.ranks();
    report.residual = std::sqrt(sq);
    report.sweeps_used = 1;
    report.converged = true;
    return {std::move(tt), report};
}

std::pair<Vector, Vector> split_rank1_factor(const Vector& v, std::int64_t p, std::int64_t q) {
    if (v.size() != p * q) throw std::invalid_argument("split_rank1_factor: size mismatch");
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMat> mat(v.data(), p, q);
    const SVDResult svd = truncated_svd(Matrix(mat), 1);
    Vector a = svd.u.col(0);
    Vector b = svd.sigma[0] * svd.v.col(0);
    Eigen::Index lead = 0;
    a.cwiseAbs().maxCoeff(&lead);
    if (a[lead] < 0.0) {
        a = -a;
        b = -b;
    }
    return {std::move(a), std::move(b)};
}

namespace {

std::vector<std::int64_t> grouped_shape(const std::vector<std::int64_t>& shape, int levels) {
    const int d = static_cast<int>(shape.size());
    const int g = d / levels;
    std::vector<std::int64_t> out(levels, 1);
    for (int i = 0; i < d; ++i) out[i / g] *= shape[i];
    return out;
}

}  // namespace

std::pair<CPTensor, ApproxReport> multigrid_als_rank1(const DenseTensor& t,
                                                      const std::vector<int>& schedule,
                                                      const AlsOptions& opts) {
    opts.validate();
    const int d = t.ndim();
    if (schedule.empty() || schedule.back() != d) {
        throw std::invalid_argument("multigrid: schedule must end at the tensor dimensionality");
    }
    for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
        if (schedule[i + 1] <= schedule[i] || schedule[i + 1] % schedule[i] != 0) {
            throw std::invalid_argument("multigrid: schedule must be increasing with divisibility");
        }
    }
    for (int dl : schedule) {
        if (dl < 1 || d % dl != 0) {
            throw std::invalid_argument("multigrid: schedule entries must divide the dimensionality");
        }
    }

    CPTensor carried;
    ApproxReport report;
    for (std::size_t level = 0; level < schedule.size(); ++level) {
        const int dl = schedule[level];
        const auto level_shape = grouped_shape(t.shape, dl);
        const DenseTensor reshaped = devectorize(t.data, level_shape);

        AlsOptions level_opts = opts;
        if (level > 0) {
            // Split each coarse factor into the finer factors covering its block.
            const int f = schedule[level] / schedule[level - 1];
            CPTensor init;
            init.weights = carried.weights;
            for (std::size_t cf = 0; cf < carried.factors.size(); ++cf) {
                // Sizes of the finer factors inside this coarse block.
                std::vector<std::int64_t> parts;
                for (int i = 0; i < f; ++i) {
                    parts.push_back(level_shape[cf * f + i]);
                }
                Vector rest = carried.factors[cf].col(0) * carried.weights[0];
                for (int i = 0; i + 1 < f; ++i) {
                    std::int64_t tail = 1;
                    for (int j = i + 1; j < f; ++j) tail *= parts[j];
                    auto [a, b] = split_rank1_factor(rest, parts[i], tail);
                    Matrix fm(a.size(), 1);
                    fm.col(0) = a;
                    init.factors.push_back(std::move(fm));
                    rest = std::move(b);
                }
                Matrix fm(rest.size(), 1);
                fm.col(0) = rest;
                init.factors.push_back(std::move(fm));
            }
            init.weights = Vector::Ones(1);
            init.normalize_columns();
            level_opts.init = AlsOptions::Init::Provided;
            level_opts.initial = std::move(init);
            level_opts.seed = split_seed(opts.seed, 1000 + level);
        }
        auto [cp, rep] = als_cp(reshaped, 1, level_opts);
        carried = std::move(cp);
        report = rep;
    }
    return {std::move(carried), report};
}

}  // namespace tdn
