#include "tdn/formats.hpp"

#include <cmath>
#include <stdexcept>

#include "tdn/decompose.hpp"
#include "tdn/rng.hpp"

namespace tdn {

std::string to_string(FormatKind kind) {
    switch (kind) {
        case FormatKind::Canonical: return "canonical";
        case FormatKind::Tucker: return "tucker";
        case FormatKind::TensorTrain: return "tensor-train";
    }
    throw std::logic_error("unknown format kind");
}

FormatKind format_from_string(const std::string& name) {
    if (name == "canonical" || name == "cp") return FormatKind::Canonical;
    if (name == "tucker") return FormatKind::Tucker;
    if (name == "tensor-train" || name == "tt") return FormatKind::TensorTrain;
    throw std::invalid_argument("unknown format name: " + name);
}

std::vector<std::int64_t> CPTensor::shape() const {
    std::vector<std::int64_t> s;
    s.reserve(factors.size());
    for (const auto& f : factors) s.push_back(f.rows());
    return s;
}

void CPTensor::validate() const {
    if (factors.empty()) throw std::invalid_argument("CP tensor needs at least one factor");
    const auto r = weights.size();
    if (r < 1) throw std::invalid_argument("CP rank must be >= 1");
    for (const auto& f : factors) {
        if (f.cols() != r) throw std::invalid_argument("CP factors must share column count R");
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
            if (std::abs(f.col(j).norm() - 1.0) > 1e-8) {
                throw std::invalid_argument("CP factor columns must have unit norm");
            }
        }
    }
}

void CPTensor::normalize_columns() {
    if (factors.empty()) throw std::invalid_argument("CP tensor needs at least one factor");
    if (weights.size() < 1) throw std::invalid_argument("CP rank must be >= 1");
    for (const auto& f : factors) {
        if (f.cols() != weights.size()) {
            throw std::invalid_argument("CP factors must share column count R");
        }
    }
    for (Eigen::Index j = 0; j < weights.size(); ++j) {
        for (auto& f : factors) {
            const double nrm = f.col(j).norm();
            if (nrm > 0.0) {
                f.col(j) /= nrm;
                weights[j] *= nrm;
            }
        }
    }
}

std::vector<std::int64_t> TuckerTensor::shape() const {
    std::vector<std::int64_t> s;
    s.reserve(factors.size());
    for (const auto& f : factors) s.push_back(f.rows());
    return s;
}

void TuckerTensor::validate() const {
    if (core.ndim() != static_cast<int>(factors.size())) {
        throw std::invalid_argument("Tucker core dimension count must equal factor count");
    }
    for (std::size_t s = 0; s < factors.size(); ++s) {
        if (factors[s].cols() != core.shape[s]) {
            throw std::invalid_argument("Tucker factor columns must match core shape");
        }
        const Matrix gram = factors[s].transpose() * factors[s];
        if ((gram - Matrix::Identity(gram.rows(), gram.cols())).norm() > 1e-10 * gram.rows()) {
            throw std::invalid_argument("Tucker factors must have orthonormal columns");
        }
    }
}

std::vector<std::int64_t> TTTensor::shape() const {
    std::vector<std::int64_t> s;
    s.reserve(cores.size());
    for (const auto& c : cores) s.push_back(c.shape[1]);
    return s;
}

std::vector<std::int64_t> TTTensor::ranks() const {
    std::vector<std::int64_t> r;
    for (std::size_t s = 0; s + 1 < cores.size(); ++s) r.push_back(cores[s].shape[2]);
    return r;
}

void TTTensor::validate() const {
    if (cores.empty()) throw std::invalid_argument("TT tensor needs at least one core");
    if (cores.front().shape[0] != 1 || cores.back().shape[2] != 1) {
        throw std::invalid_argument("TT boundary ranks must equal 1");
    }
    for (const auto& c : cores) {
        if (c.ndim() != 3) throw std::invalid_argument("TT cores must be three-way");
    }
    for (std::size_t s = 0; s + 1 < cores.size(); ++s) {
        if (cores[s].shape[2] != cores[s + 1].shape[0]) {
            throw std::invalid_argument("TT chain ranks are incompatible");
        }
    }
}

DenseTensor cp_to_dense(const CPTensor& c) {
    c.validate();
    const auto shape = c.shape();
    DenseTensor out = DenseTensor::zeros(shape);
    const int d = static_cast<int>(shape.size());
    for (int j = 0; j < c.rank(); ++j) {
        std::vector<std::vector<double>> cols;
        cols.reserve(d);
        for (int s = 0; s < d; ++s) {
            const auto& col = c.factors[s].col(j);
            cols.emplace_back(col.data(), col.data() + col.size());
        }
        const auto term = kron(cols);
        const double w = c.weights[j];
        for (std::size_t i = 0; i < term.size(); ++i) out.data[i] += w * term[i];
    }
    return out;
}

DenseTensor mode_multiply(const DenseTensor& t, const Matrix& a, int mode) {
    if (mode < 1 || mode > t.ndim()) throw std::invalid_argument("mode_multiply: mode out of range");
    if (a.cols() != t.shape[mode - 1]) throw std::invalid_argument("mode_multiply: shape mismatch");
    const Matrix unfolded = a * unfold(t, mode);
    auto shape = t.shape;
    shape[mode - 1] = a.rows();
    return fold(unfolded, mode, shape);
}

DenseTensor tucker_to_dense(const TuckerTensor& t) {
    t.validate();
    DenseTensor out = t.core;
    for (std::size_t s = 0; s < t.factors.size(); ++s) {
        out = mode_multiply(out, t.factors[s], static_cast<int>(s) + 1);
    }
    return out;
}

DenseTensor tt_to_dense(const TTTensor& t) {
    t.validate();
    const int d = static_cast<int>(t.cores.size());
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    // Running matrix B: (m_1 * ... * m_s) x r_s, row index linearized last-fastest.
    RowMat b = Eigen::Map<const RowMat>(t.cores[0].data.data(), t.cores[0].shape[1],
                                        t.cores[0].shape[2]);
    std::int64_t rows = t.cores[0].shape[1];
    for (int s = 1; s < d; ++s) {
        const auto& core = t.cores[s];
        const std::int64_t r_prev = core.shape[0];
        const std::int64_t m = core.shape[1];
        const std::int64_t r_next = core.shape[2];
        const Eigen::Map<const RowMat> core_mat(core.data.data(), r_prev, m * r_next);
        RowMat c = b * core_mat;  // rows x (m * r_next), row-major flattening is the linearization
        rows *= m;
        b = Eigen::Map<const RowMat>(c.data(), rows, r_next);
    }
    std::vector<double> data(b.data(), b.data() + rows);
    return DenseTensor(t.shape(), std::move(data));
}

std::int64_t parameter_count(FormatKind kind, const std::vector<std::int64_t>& shape, int rank) {
    if (rank < 1) throw std::invalid_argument("parameter_count: rank must be >= 1");
    const int d = static_cast<int>(shape.size());
    std::int64_t sum_m = 0;
    for (auto m : shape) sum_m += m;
    switch (kind) {
        case FormatKind::Canonical:
            return static_cast<std::int64_t>(rank) * sum_m;
        case FormatKind::Tucker: {
            std::int64_t core = 1;
            for (int s = 0; s < d; ++s) core *= rank;
            return core + static_cast<std::int64_t>(rank) * sum_m;
        }
        case FormatKind::TensorTrain: {
            std::int64_t total = 0;
            for (int s = 0; s < d; ++s) {
                const std::int64_t r_prev = (s == 0) ? 1 : rank;
                const std::int64_t r_next = (s == d - 1) ? 1 : rank;
                total += r_prev * shape[s] * r_next;
            }
            return total;
        }
    }
    throw std::logic_error("unknown format kind");
}

double cp_norm(const CPTensor& c) {
    c.validate();
    const int r = c.rank();
    Matrix gram = Matrix::Ones(r, r);
    for (const auto& f : c.factors) gram = gram.cwiseProduct((f.transpose() * f).eval());
    const double sq = c.weights.transpose() * gram * c.weights;
    return std::sqrt(std::max(0.0, sq));
}

CPTensor random_cp(const std::vector<std::int64_t>& shape, int rank, std::uint64_t seed) {
    if (rank < 1) throw std::invalid_argument("random_cp: rank must be >= 1");
    GaussianStream g(seed);
    CPTensor c;
    c.weights = Vector::Ones(rank);
    for (auto m : shape) {
        Matrix f(m, rank);
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
            for (Eigen::Index i = 0; i < f.rows(); ++i) f(i, j) = g.normal();
        }
        c.factors.push_back(std::move(f));
    }
    c.normalize_columns();
    const double nrm = cp_norm(c);
    if (nrm > 0.0) c.weights /= nrm;
    return c;
}

TuckerTensor random_tucker(const std::vector<std::int64_t>& shape, int rank, std::uint64_t seed) {
    if (rank < 1) throw std::invalid_argument("random_tucker: rank must be >= 1");
    for (auto m : shape) {
        if (rank > m) throw std::invalid_argument("random_tucker: rank exceeds mode size");
    }
    GaussianStream g(seed);
    TuckerTensor t;
    std::vector<std::int64_t> core_shape(shape.size(), rank);
    t.core = DenseTensor::zeros(core_shape);
    for (auto& x : t.core.data) x = g.normal();
    for (auto m : shape) {
        Matrix a(m, rank);
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = g.normal();
        }
        // Orthonormal basis of the span of the Gaussian columns.
        Eigen::HouseholderQR<Matrix> qr(a);
        Matrix q = qr.householderQ() * Matrix::Identity(m, rank);
        t.factors.push_back(std::move(q));
    }
    // Orthonormal factors: the norm is carried by the core.
    double nrm = fro_norm(t.core);
    if (nrm > 0.0) {
        for (auto& x : t.core.data) x /= nrm;
    }
    return t;
}

TTTensor random_tt_via_ttsvd(const std::vector<std::int64_t>& shape, int rank, std::uint64_t seed) {
    if (rank < 1) throw std::invalid_argument("random_tt_via_ttsvd: rank must be >= 1");
    GaussianStream g(seed);
    DenseTensor t = DenseTensor::zeros(shape);
    for (auto& x : t.data) x = g.normal();
    auto [tt, report] = tt_svd(t, rank);
    const double nrm = fro_norm(tt_to_dense(tt));
    if (nrm > 0.0) {
        for (auto& x : tt.cores.front().data) x /= nrm;
    }
    return tt;
}

}  // namespace tdn
