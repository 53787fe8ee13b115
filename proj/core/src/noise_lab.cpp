#include "tdn/noise_lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tdn/rng.hpp"

namespace tdn {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TENSOR_DENOISE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

void run_indexed(std::int64_t count, int threads, const std::function<void(std::int64_t)>& fn) {
    threads = std::min<std::int64_t>(threads, count);
    if (threads <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::vector<int> multigrid_schedule(int d) {
    // Coarsest level: the smallest divisor of d that is >= 3, then doubling.
    int start = d;
    for (int c = 3; c < d; ++c) {
        if (d % c == 0) {
            start = c;
            break;
        }
    }
    std::vector<int> schedule{start};
    while (schedule.back() < d) {
        int nxt = schedule.back() * 2;
        while (d % nxt != 0) ++nxt;
        schedule.push_back(nxt);
    }
    return schedule;
}

}  // namespace

std::pair<DenseTensor, DenseTensor> add_noise(const DenseTensor& t, const NoiseSpec& spec) {
    if (spec.mode == NoiseSpec::Mode::TargetRatio && !(spec.ratio > 0.0)) {
        throw std::invalid_argument("add_noise: ratio must be > 0");
    }
    GaussianStream g(spec.seed);
    DenseTensor noise = DenseTensor::zeros(t.shape);
    for (auto& x : noise.data) x = g.normal();
    if (spec.mode == NoiseSpec::Mode::TargetRatio) {
        const double target = spec.ratio * fro_norm(t);
        const double current = fro_norm(noise);
        if (current > 0.0) {
            const double scale = target / current;
            for (auto& x : noise.data) x *= scale;
        }
    }
    DenseTensor noisy = t;
    for (std::size_t i = 0; i < noisy.data.size(); ++i) noisy.data[i] += noise.data[i];
    return {std::move(noisy), std::move(noise)};
}

double filtration_error(const DenseTensor& approx, const DenseTensor& truth) {
    if (approx.shape != truth.shape) throw std::invalid_argument("filtration_error: shape mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < approx.data.size(); ++i) {
        const double d = approx.data[i] - truth.data[i];
        sq += d * d;
    }
    return std::sqrt(sq);
}

bool check_hypothesis(double residual, double noise_norm) {
    if (residual < 0.0 || noise_norm < 0.0) {
        throw std::invalid_argument("check_hypothesis: norms must be non-negative");
    }
    return residual <= noise_norm + 1e-12;
}

bool guarantee_bound(double residual, double noise_norm, const DenseTensor& approx,
                     const DenseTensor& truth, const DenseTensor& noise) {
    if (!check_hypothesis(residual, noise_norm)) return true;  // derivation assumes the hypothesis
    const double eps = filtration_error(approx, truth);
    DenseTensor diff = approx;
    for (std::size_t i = 0; i < diff.data.size(); ++i) diff.data[i] -= truth.data[i];
    const double rhs = 2.0 * inner(diff, noise);
    return eps * eps <= rhs + 1e-9 * (eps * eps + std::abs(rhs) + 1e-300);
}

double knorm_lower_bound(const DenseTensor& noise, const AlsOptions& rank2_opts) {
    const double n2 = fro_norm(noise);
    const auto [cp, report] = als_cp(noise, 2, rank2_opts);
    const double res = report.residual;
    return std::sqrt(std::max(0.0, n2 * n2 - res * res));
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<std::pair<double, double>> logs;
    for (const auto& [r, eps] : points) {
        if (!(r > 0.0) || !(eps > 0.0)) {
            throw std::invalid_argument("fit_power_law: points must be positive");
        }
        const double x = std::log(r);
        const double y = std::log(eps);
        logs.emplace_back(x, y);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(points.size());
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) throw std::invalid_argument("fit_power_law: degenerate abscissae");
    PowerLawFit fit;
    fit.alpha = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.alpha * sx) / n;
    fit.c = std::exp(intercept);
    const double mean_y = sy / n;
    double ss_res = 0, ss_tot = 0;
    for (const auto& [x, y] : logs) {
        const double pred = intercept + fit.alpha * x;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

std::vector<int> divisor_d_list(int m_exponent) {
    std::vector<int> out;
    for (int d = 2; d <= m_exponent; ++d) {
        if (m_exponent % d == 0) out.push_back(d);
    }
    return out;
}

std::vector<ExperimentRecord> dimension_sweep(const DimensionSweepConfig& cfg) {
    cfg.als.validate();
    if (cfg.seeds < 1) throw std::invalid_argument("dimension_sweep: seeds must be >= 1");
    std::vector<int> d_list = cfg.d_list.empty() ? divisor_d_list(cfg.m_exponent) : cfg.d_list;
    for (int d : d_list) {
        if (d < 1 || cfg.m_exponent % d != 0) {
            throw std::invalid_argument("dimension_sweep: every d must divide the exponent");
        }
    }

    struct Trial {
        int d;
        double ratio;
        int seed_index;
    };
    std::vector<Trial> trials;
    for (int d : d_list) {
        for (double ratio : cfg.ratios) {
            for (int k = 0; k < cfg.seeds; ++k) trials.push_back({d, ratio, k});
        }
    }

    std::vector<ExperimentRecord> records(trials.size());
    run_indexed(static_cast<std::int64_t>(trials.size()), resolve_threads(cfg.threads),
                [&](std::int64_t i) {
        const auto start = Clock::now();
        const Trial& trial = trials[static_cast<std::size_t>(i)];
        const std::uint64_t trial_seed = split_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
        const int m = 1 << (cfg.m_exponent / trial.d);
        const std::vector<std::int64_t> shape(trial.d, m);

        const CPTensor truth_cp = random_cp(shape, 1, split_seed(trial_seed, 0));
        const DenseTensor truth = cp_to_dense(truth_cp);
        NoiseSpec noise_spec{NoiseSpec::Mode::TargetRatio, trial.ratio, split_seed(trial_seed, 1)};
        const auto [noisy, noise] = add_noise(truth, noise_spec);

        AlsOptions opts = cfg.als;
        opts.seed = split_seed(trial_seed, 2);
        CPTensor cp;
        ApproxReport report;
        if (cfg.use_multigrid && trial.d >= 6) {
            std::tie(cp, report) = multigrid_als_rank1(noisy, multigrid_schedule(trial.d), opts);
            // The multigrid result lives on the coarsest-grouped shape chain;
            // the finest level equals the target shape, so reconstruction matches.
        } else {
            std::tie(cp, report) = als_cp(noisy, 1, opts);
        }
        const DenseTensor approx = cp_to_dense(cp);

        ExperimentRecord rec;
        rec.format = FormatKind::Canonical;
        rec.shape = shape;
        rec.rank = 1;
        rec.seed = trial_seed;
        rec.trial_index = i;
        rec.noise_ratio = trial.ratio;
        rec.epsilon = filtration_error(approx, truth);
        rec.noise_norm = fro_norm(noise);
        rec.residual = report.residual;
        rec.hypothesis_holds = check_hypothesis(rec.residual, rec.noise_norm);
        if (cfg.knorm_restarts > 0) {
            AlsOptions kopts = cfg.als;
            kopts.restarts = cfg.knorm_restarts;
            kopts.seed = split_seed(trial_seed, 3);
            rec.knorm_estimate = knorm_lower_bound(noise, kopts);
        }
        rec.wall_time_ms = elapsed_ms(start);
        records[static_cast<std::size_t>(i)] = std::move(rec);
    });
    return records;
}

std::pair<std::vector<ExperimentRecord>, PowerLawFit> rank_sweep(const RankSweepConfig& cfg) {
    cfg.als.validate();
    if (cfg.ranks.size() < 3) throw std::invalid_argument("rank_sweep: need >= 3 ranks");
    if (!std::is_sorted(cfg.ranks.begin(), cfg.ranks.end())) {
        throw std::invalid_argument("rank_sweep: ranks must be ascending");
    }
    if (cfg.seeds < 1) throw std::invalid_argument("rank_sweep: seeds must be >= 1");

    struct Trial {
        int rank;
        int seed_index;
    };
    std::vector<Trial> trials;
    for (int r : cfg.ranks) {
        for (int k = 0; k < cfg.seeds; ++k) trials.push_back({r, k});
    }

    std::vector<ExperimentRecord> records(trials.size());
    run_indexed(static_cast<std::int64_t>(trials.size()), resolve_threads(cfg.threads),
                [&](std::int64_t i) {
        const auto start = Clock::now();
        const Trial& trial = trials[static_cast<std::size_t>(i)];
        const std::uint64_t trial_seed = split_seed(cfg.master_seed, static_cast<std::uint64_t>(i));

        DenseTensor truth;
        switch (cfg.format) {
            case FormatKind::Canonical:
                truth = cp_to_dense(random_cp(cfg.shape, trial.rank, split_seed(trial_seed, 0)));
                break;
            case FormatKind::Tucker:
                truth = tucker_to_dense(random_tucker(cfg.shape, trial.rank, split_seed(trial_seed, 0)));
                break;
            case FormatKind::TensorTrain:
                truth = tt_to_dense(random_tt_via_ttsvd(cfg.shape, trial.rank, split_seed(trial_seed, 0)));
                break;
        }
        NoiseSpec noise_spec{NoiseSpec::Mode::TargetRatio, cfg.ratio, split_seed(trial_seed, 1)};
        const auto [noisy, noise] = add_noise(truth, noise_spec);

        DenseTensor approx;
        ApproxReport report;
        switch (cfg.format) {
            case FormatKind::Canonical: {
                AlsOptions opts = cfg.als;
                opts.seed = split_seed(trial_seed, 2);
                auto [cp, rep] = als_cp(noisy, trial.rank, opts);
                approx = cp_to_dense(cp);
                report = rep;
                break;
            }
            case FormatKind::Tucker: {
                auto [tk, rep] = hosvd(noisy, trial.rank);
                approx = tucker_to_dense(tk);
                report = rep;
                break;
            }
            case FormatKind::TensorTrain: {
                auto [tt, rep] = tt_svd(noisy, trial.rank);
                approx = tt_to_dense(tt);
                report = rep;
                break;
            }
        }

        ExperimentRecord rec;
        rec.format = cfg.format;
        rec.shape = cfg.shape;
        rec.rank = trial.rank;
        rec.seed = trial_seed;
        rec.trial_index = i;
        rec.noise_ratio = cfg.ratio;
        rec.epsilon = filtration_error(approx, truth);
        rec.noise_norm = fro_norm(noise);
        rec.residual = report.residual;
        rec.hypothesis_holds = check_hypothesis(rec.residual, rec.noise_norm);
        rec.wall_time_ms = elapsed_ms(start);
        records[static_cast<std::size_t>(i)] = std::move(rec);
    });

    std::vector<std::pair<double, double>> points;
    for (int r : cfg.ranks) {
        double sum = 0.0;
        int count = 0;
        for (const auto& rec : records) {
            if (rec.rank == r) {
                sum += rec.epsilon;
                ++count;
            }
        }
        points.emplace_back(static_cast<double>(r), sum / count);
    }
    return {std::move(records), fit_power_law(points)};
}

std::pair<DenseTensor, DenseTensor> steering_tensor(double phi, std::int64_t m_total,
                                                    const std::vector<std::int64_t>& shape) {
    std::int64_t prod = 1;
    for (auto m : shape) prod *= m;
    if (prod != m_total) throw std::invalid_argument("steering_tensor: shape does not multiply to M");
    DenseTensor real = DenseTensor::zeros(shape);
    DenseTensor imag = DenseTensor::zeros(shape);
    for (std::int64_t k = 0; k < m_total; ++k) {
        real.data[static_cast<std::size_t>(k)] = std::cos(phi * static_cast<double>(k));
        imag.data[static_cast<std::size_t>(k)] = std::sin(phi * static_cast<double>(k));
    }
    return {std::move(real), std::move(imag)};
}

namespace {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// sigma_2 of the complex matrix, computed through its real 2x2 block
// embedding [[Re, -Im], [Im, Re]] whose spectrum duplicates the complex one.
double complex_second_singular(const ComplexMatrix& a) {
    Matrix e(2 * a.rows(), 2 * a.cols());
    e << a.real(), -a.imag(), a.imag(), a.real();
    Eigen::JacobiSVD<Matrix> svd(e);
    const auto& sigma = svd.singularValues();
    // Embedding singular values come in pairs; the complex sigma_2 is entry 2.
    return (sigma.size() > 2) ? sigma[2] : 0.0;
}

// Rank-one complex ALS (higher-order power iteration) on a complex tensor
// stored as a real pair.
void complex_rank1_fit(const DenseTensor& re, const DenseTensor& im,
                       std::vector<ComplexVector>& factors, std::complex<double>& scale,
                       std::uint64_t seed) {
    const int d = re.ndim();
    const std::int64_t total = re.size();
    ComplexVector vec(total);
    for (std::int64_t i = 0; i < total; ++i) {
        vec[i] = {re.data[static_cast<std::size_t>(i)], im.data[static_cast<std::size_t>(i)]};
    }

    GaussianStream g(seed);
    factors.assign(d, ComplexVector());
    for (int s = 0; s < d; ++s) {
        ComplexVector u(re.shape[s]);
        for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = {g.normal(), g.normal()};
        factors[s] = u / u.norm();
    }
    scale = {1.0, 0.0};

    std::vector<std::int64_t> strides(d, 1);
    for (int s = d - 2; s >= 0; --s) strides[s] = strides[s + 1] * re.shape[s + 1];

    double prev_res = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < 100; ++sweep) {
        for (int s = 0; s < d; ++s) {
            ComplexVector accum = ComplexVector::Zero(re.shape[s]);
            std::vector<std::int64_t> idx(d, 0);
            for (std::int64_t lin = 0; lin < total; ++lin) {
                std::int64_t remlin = lin;
                for (int q = d - 1; q >= 0; --q) {
                    idx[q] = remlin % re.shape[q];
                    remlin /= re.shape[q];
                }
                std::complex<double> coeff(1.0, 0.0);
                for (int q = 0; q < d; ++q) {
                    if (q == s) continue;
                    coeff *= std::conj(factors[q][idx[q]]);
                }
                accum[idx[s]] += vec[lin] * coeff;
            }
            const double nrm = accum.norm();
            if (nrm > 0.0) {
                factors[s] = accum / nrm;
                scale = nrm;
            }
        }
        // Residual of the current rank-one model.
        double sq = 0.0;
        std::vector<std::int64_t> idx(d, 0);
        for (std::int64_t lin = 0; lin < total; ++lin) {
            std::int64_t remlin = lin;
            for (int q = d - 1; q >= 0; --q) {
                idx[q] = remlin % re.shape[q];
                remlin /= re.shape[q];
            }
            std::complex<double> value = scale;
            for (int q = 0; q < d; ++q) value *= factors[q][idx[q]];
            sq += std::norm(vec[lin] - value);
        }
        const double res = std::sqrt(sq);
        if (prev_res - res <= 1e-12 * (1.0 + std::abs(scale))) break;
        prev_res = res;
    }
}

}  // namespace

SteeringTrial steering_demo(double phi, const std::vector<std::int64_t>& shape, double ratio,
                            std::uint64_t seed) {
    std::int64_t total = 1;
    for (auto m : shape) total *= m;
    auto [re, im] = steering_tensor(phi, total, shape);

    SteeringTrial trial;

    // Rank-one certificate over every sequential unfolding split.
    const int d = static_cast<int>(shape.size());
    for (int s = 1; s < d; ++s) {
        std::int64_t rows = 1;
        for (int q = 0; q < s; ++q) rows *= shape[q];
        const std::int64_t cols = total / rows;
        ComplexMatrix a(rows, cols);
        for (std::int64_t i = 0; i < rows; ++i) {
            for (std::int64_t j = 0; j < cols; ++j) {
                const std::int64_t lin = i * cols + j;
                a(i, j) = {re.data[static_cast<std::size_t>(lin)],
                           im.data[static_cast<std::size_t>(lin)]};
            }
        }
        trial.second_singular_max = std::max(trial.second_singular_max, complex_second_singular(a));
    }

    // Combined-norm noise on the real pair.
    GaussianStream g(split_seed(seed, 1));
    DenseTensor noise_re = DenseTensor::zeros(shape);
    DenseTensor noise_im = DenseTensor::zeros(shape);
    for (auto& x : noise_re.data) x = g.normal();
    for (auto& x : noise_im.data) x = g.normal();
    const double clean_norm = std::sqrt(fro_norm(re) * fro_norm(re) + fro_norm(im) * fro_norm(im));
    const double raw = std::sqrt(fro_norm(noise_re) * fro_norm(noise_re) +
                                 fro_norm(noise_im) * fro_norm(noise_im));
    const double scale_to = ratio * clean_norm / raw;
    for (auto& x : noise_re.data) x *= scale_to;
    for (auto& x : noise_im.data) x *= scale_to;
    trial.noise_norm = ratio * clean_norm;

    DenseTensor noisy_re = re;
    DenseTensor noisy_im = im;
    for (std::size_t i = 0; i < noisy_re.data.size(); ++i) {
        noisy_re.data[i] += noise_re.data[i];
        noisy_im.data[i] += noise_im.data[i];
    }

    std::vector<ComplexVector> factors;
    std::complex<double> model_scale;
    complex_rank1_fit(noisy_re, noisy_im, factors, model_scale, split_seed(seed, 2));

    // Evaluate the recovered rank-one model against clean and noisy data.
    double sq_truth = 0.0;
    double sq_noisy = 0.0;
    std::vector<std::int64_t> idx(d, 0);
    for (std::int64_t lin = 0; lin < total; ++lin) {
        std::int64_t remlin = lin;
        for (int q = d - 1; q >= 0; --q) {
            idx[q] = remlin % shape[q];
            remlin /= shape[q];
        }
        std::complex<double> value = model_scale;
        for (int q = 0; q < d; ++q) value *= factors[q][idx[q]];
        const std::complex<double> clean(re.data[static_cast<std::size_t>(lin)],
                                         im.data[static_cast<std::size_t>(lin)]);
        const std::complex<double> noisy(noisy_re.data[static_cast<std::size_t>(lin)],
                                         noisy_im.data[static_cast<std::size_t>(lin)]);
        sq_truth += std::norm(value - clean);
        sq_noisy += std::norm(value - noisy);
    }
    trial.epsilon = std::sqrt(sq_truth);
    trial.residual = std::sqrt(sq_noisy);
    return trial;
}

}  // namespace tdn
