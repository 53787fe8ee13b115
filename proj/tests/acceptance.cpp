// End-to-end acceptance suite. Each numbered check prints exactly one
// pass/fail line; the process exit code is the number of failed checks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tdn/bounds.hpp"
#include "tdn/decompose.hpp"
#include "tdn/formats.hpp"
#include "tdn/noise_lab.hpp"
#include "tdn/records.hpp"
#include "tdn/rng.hpp"
#include "tdn/tensor.hpp"
#include "tdn/theory.hpp"

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("[%s] %2d. %s%s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " — ", detail.c_str());
    if (!pass) ++failures;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

tdn::Vector random_unit(int n, tdn::GaussianStream& g) {
    tdn::Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = g.normal();
    v.normalize();
    return v;
}

std::pair<tdn::Vector, tdn::Vector> random_ab(int n, tdn::GaussianStream& g) {
    tdn::Vector a = random_unit(n, g);
    tdn::Vector b(n);
    for (int i = 0; i < n; ++i) b[i] = g.normal();
    b -= b.dot(a) * a;
    b.normalize();
    return {a, b};
}

// Independent rank-1 fitter: higher-order power iteration by direct index
// summation, sharing no solver code with the library ALS.
double hopm_rank1_residual(const tdn::DenseTensor& t, int starts, std::uint64_t seed) {
    const int d = t.ndim();
    double best = tdn::fro_norm(t);
    for (int s = 0; s < starts; ++s) {
        tdn::GaussianStream g(tdn::split_seed(seed, static_cast<std::uint64_t>(s)));
        std::vector<tdn::Vector> w(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) {
            w[static_cast<std::size_t>(k)] =
                random_unit(static_cast<int>(t.shape[static_cast<std::size_t>(k)]), g);
        }
        double lambda = 0.0;
        for (int iter = 0; iter < 60; ++iter) {
            for (int k = 0; k < d; ++k) {
                tdn::Vector acc = tdn::Vector::Zero(t.shape[static_cast<std::size_t>(k)]);
                std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
                for (std::int64_t lin = 0; lin < t.size(); ++lin) {
                    std::int64_t rem = lin;
                    for (int q = d - 1; q >= 0; --q) {
                        idx[static_cast<std::size_t>(q)] =
                            rem % t.shape[static_cast<std::size_t>(q)];
                        rem /= t.shape[static_cast<std::size_t>(q)];
                    }
                    double prod = t.data[static_cast<std::size_t>(lin)];
                    for (int q = 0; q < d; ++q) {
                        if (q != k) {
                            prod *= w[static_cast<std::size_t>(q)][idx[static_cast<std::size_t>(q)]];
                        }
                    }
                    acc[idx[static_cast<std::size_t>(k)]] += prod;
                }
                lambda = acc.norm();
                if (lambda > 0) w[static_cast<std::size_t>(k)] = acc / lambda;
            }
        }
        best = std::min(best, std::sqrt(std::max(0.0, tdn::inner(t, t) - lambda * lambda)));
    }
    return best;
}

void criteria_1_and_2() {
    tdn::DimensionSweepConfig cfg;
    cfg.m_exponent = 12;
    cfg.ratios = {0.1};
    cfg.seeds = 20;
    cfg.master_seed = 1;
    // A few restarts keep deep reshapes (d = 12, all modes of size 2) from
    // occasionally stalling on a spurious stationary point.
    cfg.als.restarts = 3;
    const auto records = tdn::dimension_sweep(cfg);

    bool within_factor2 = true;
    std::ostringstream detail;
    for (int d : tdn::divisor_d_list(12)) {
        std::vector<double> eps, noise;
        for (const auto& rec : records) {
            if (static_cast<int>(rec.shape.size()) == d) {
                eps.push_back(rec.epsilon);
                noise.push_back(rec.noise_norm);
            }
        }
        const double bound = tdn::empirical_rank1_bound(d, 1LL << 12, mean_of(noise));
        const double ratio = mean_of(eps) / bound;
        detail << "d=" << d << " ratio=" << ratio << " ";
        if (ratio > 2.0 || ratio < 0.5) within_factor2 = false;
    }
    report(1, "dimension-sweep mean error within factor 2 of the asymptotic", within_factor2,
           detail.str());

    std::map<std::uint64_t, double> eps2, eps12;
    for (const auto& rec : records) {
        if (rec.shape.size() == 2) eps2[rec.seed] = rec.epsilon;
        // keyed by seed is unsuitable across d (different seeds); pair by
        // position within the d-group instead.
    }
    std::vector<double> d2, d12;
    for (const auto& rec : records) {
        if (rec.shape.size() == 2) d2.push_back(rec.epsilon);
        if (rec.shape.size() == 12) d12.push_back(rec.epsilon);
    }
    int wins = 0;
    for (std::size_t i = 0; i < d2.size(); ++i) {
        if (d12[i] < d2[i]) ++wins;
    }
    std::ostringstream d2detail;
    d2detail << wins << "/" << d2.size() << " paired seeds improved";
    report(2, "filtration error at d=12 beats d=2 on paired seeds",
           wins * 10 >= static_cast<int>(d2.size()) * 9, d2detail.str());
}

void criterion_3() {
    tdn::DimensionSweepConfig low;
    low.m_exponent = 12;
    low.d_list = {3};  // m = 16
    low.ratios = {0.1};
    low.seeds = 100;
    low.master_seed = 7;
    int holds = 0;
    for (const auto& rec : tdn::dimension_sweep(low)) holds += rec.hypothesis_holds ? 1 : 0;

    tdn::DimensionSweepConfig high;
    high.m_exponent = 12;
    high.d_list = {12};
    high.ratios = {10.0};
    high.seeds = 100;
    high.master_seed = 7;
    int high_failures = 0;
    int eps_below_noise = 0;
    for (const auto& rec : tdn::dimension_sweep(high)) {
        if (!rec.hypothesis_holds) ++high_failures;
        if (rec.epsilon < rec.noise_norm) ++eps_below_noise;
    }
    std::ostringstream detail;
    detail << "low-noise holds " << holds << "/100; high-noise failures " << high_failures
           << "/100, error below noise " << eps_below_noise << "/100";
    report(3, "hypothesis regime split (low-noise side asserted)", holds >= 95, detail.str());
}

void criterion_4() {
    // Desk-scale protocol: noise level per format chosen so the sweep sits in
    // the regime where the rank scaling law is visible at M = 2^12.
    auto run = [](tdn::FormatKind kind, std::vector<std::int64_t> shape, std::vector<int> ranks,
                  double ratio, int restarts) {
        tdn::RankSweepConfig cfg;
        cfg.format = kind;
        cfg.shape = std::move(shape);
        cfg.ranks = std::move(ranks);
        cfg.ratio = ratio;
        cfg.seeds = 20;
        cfg.master_seed = 1;
        cfg.als.restarts = restarts;
        return tdn::rank_sweep(cfg).second;
    };
    const auto cp = run(tdn::FormatKind::Canonical, {16, 16, 16}, {1, 2, 3, 4, 5, 6, 7, 8},
                        64.0, 5);
    const auto tt = run(tdn::FormatKind::TensorTrain, {4, 4, 4, 4, 4, 4},
                        {1, 2, 3, 4, 5, 6, 7, 8}, 2.0, 1);
    const auto tk = run(tdn::FormatKind::Tucker, {8, 8, 8, 8}, {1, 2, 3, 4}, 256.0, 1);
    std::ostringstream detail;
    detail << "CP alpha=" << cp.alpha << " TT alpha=" << tt.alpha << " Tucker alpha=" << tk.alpha;
    const bool pass = cp.alpha >= 0.35 && cp.alpha <= 0.65 && tt.alpha >= 0.85 &&
                      tt.alpha <= 1.15 && tk.alpha >= 1.7 && tk.alpha <= 2.3;
    report(4, "rank-sweep exponents per format", pass, detail.str());
}

void criterion_5() {
    int violations = 0;
    int checked = 0;
    for (int d : {3, 4}) {
        const std::int64_t m = (d == 3) ? 16 : 8;
        for (double ratio : {0.1, 1.0}) {
            for (int k = 0; k < 25; ++k) {
                const std::uint64_t seed =
                    tdn::split_seed(500 + static_cast<std::uint64_t>(d),
                                    static_cast<std::uint64_t>(k) * 4 + (ratio > 0.5 ? 1 : 0));
                const std::vector<std::int64_t> shape(static_cast<std::size_t>(d), m);
                const auto truth = tdn::cp_to_dense(tdn::random_cp(shape, 1, tdn::split_seed(seed, 0)));
                tdn::NoiseSpec spec;
                spec.ratio = ratio;
                spec.seed = tdn::split_seed(seed, 1);
                const auto [noisy, noise] = tdn::add_noise(truth, spec);
                tdn::AlsOptions opts;
                opts.seed = tdn::split_seed(seed, 2);
                const auto [fit, rep] = tdn::als_cp(noisy, 1, opts);
                const auto approx = tdn::cp_to_dense(fit);
                if (!tdn::guarantee_bound(rep.residual, tdn::fro_norm(noise), approx, truth,
                                          noise)) {
                    ++violations;
                }
                ++checked;
            }
        }
    }
    std::ostringstream detail;
    detail << checked << " trials, " << violations << " violations";
    report(5, "derivation-chain inequality on every hypothesis-holding trial", violations == 0,
           detail.str());
}

void criterion_6() {
    tdn::GaussianStream g(99);
    int violations = 0;
    // Approximate-cosine inequality.
    for (int trial = 0; trial < 1200; ++trial) {
        tdn::Vector x(8), y(8), xh(8), yh(8);
        for (int i = 0; i < 8; ++i) {
            x[i] = g.normal();
            y[i] = g.normal();
            xh[i] = x[i] + 0.25 * g.normal();
            yh[i] = y[i] + 0.25 * g.normal();
        }
        const auto [gap, bound] = tdn::approximate_cosine_gap(x, y, xh, yh);
        if (gap > bound + 1e-12) ++violations;
    }
    // Kronecker conditioning with dual computation.
    for (int trial = 0; trial < 1200; ++trial) {
        std::vector<tdn::Matrix> factors;
        double gamma = 1.0;
        for (int s = 0; s < 3; ++s) {
            tdn::Matrix f(4, 2);
            f.col(0) = random_unit(4, g);
            f.col(1) = random_unit(4, g);
            factors.push_back(f);
            gamma *= f.col(0).dot(f.col(1));
        }
        const auto rep = tdn::kron_condition_check(factors);
        const double explicit_cond = std::sqrt((1.0 + std::abs(gamma)) / (1.0 - std::abs(gamma)));
        if (std::abs(rep.cond_full - explicit_cond) > 1e-10) ++violations;
        for (double c : rep.cond_per_dim) {
            if (rep.cond_full > c + 1e-10) ++violations;
        }
    }
    // Closed-form two-column SVD vs numerical SVD.
    for (int trial = 0; trial < 1200; ++trial) {
        const tdn::Vector c1 = random_unit(6, g);
        const tdn::Vector c2 = random_unit(6, g);
        const auto closed = tdn::two_column_svd(c1, c2);
        tdn::Matrix c(6, 2);
        c.col(0) = c1;
        c.col(1) = c2;
        const auto numeric = tdn::truncated_svd(c, 2);
        if ((closed.sigma - numeric.sigma).cwiseAbs().maxCoeff() > 1e-10) ++violations;
    }
    // Difference-expansion tail bound.
    int tail_trials = 0;
    while (tail_trials < 1200) {
        std::vector<tdn::Vector> as, bs;
        std::vector<double> alpha;
        double norm2 = 0;
        for (int s = 0; s < 3; ++s) {
            const auto [a, b] = random_ab(3, g);
            as.push_back(a);
            bs.push_back(b);
            alpha.push_back(0.01 + 0.5 * g.uniform());
            norm2 += alpha.back() * alpha.back();
        }
        if (std::sqrt(norm2) >= 0.9) continue;
        const auto pair = tdn::build_rank2_pair(as, bs, alpha);
        const auto [tail, alpha_norm] = tdn::rank2_difference_tail(pair);
        if (tail / alpha_norm > 2.0 * alpha_norm + 1e-12) ++violations;
        ++tail_trials;
    }
    std::ostringstream detail;
    detail << violations << " violations over 4x1200 trials";
    report(6, "constructive lemma witnesses", violations == 0, detail.str());
}

void criterion_7() {
    tdn::GaussianStream g(123);
    const std::vector<double> omegas = {4, 16, 64, 256};
    bool monotone = true;
    std::vector<double> mean_log(omegas.size(), 0.0);
    const int pairs = 6;
    for (int trial = 0; trial < pairs; ++trial) {
        std::vector<tdn::Vector> as, bs;
        std::vector<double> alpha;
        for (int s = 0; s < 3; ++s) {
            const auto [a, b] = random_ab(4, g);
            as.push_back(a);
            bs.push_back(b);
            alpha.push_back(1e-4 + 5e-4 * g.uniform());
        }
        const auto pair = tdn::build_rank2_pair(as, bs, alpha);
        double prev = 1e300;
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            const auto sp = tdn::conditioned_approximation(pair, omegas[i]);
            if (sp.distance > prev + 1e-12) monotone = false;
            mean_log[i] += std::log(std::max(sp.distance, 1e-300)) / pairs;
            prev = sp.distance;
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double x = std::log(omegas[i]);
        sx += x;
        sy += mean_log[i];
        sxx += x * x;
        sxy += x * mean_log[i];
    }
    const double n = static_cast<double>(omegas.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::ostringstream detail;
    detail << "slope=" << slope << (monotone ? ", monotone" : ", NOT monotone");
    report(7, "bounded-condition approximation decay", monotone && slope <= -0.2, detail.str());
}

void criterion_8() {
    double worst_als = 0.0;
    for (int k = 0; k < 20; ++k) {
        tdn::DenseTensor t = tdn::DenseTensor::zeros({2, 2, 2});
        tdn::GaussianStream g(tdn::split_seed(808, static_cast<std::uint64_t>(k)));
        for (auto& x : t.data) x = g.normal();
        tdn::AlsOptions opts;
        opts.restarts = 1000;
        opts.seed = static_cast<std::uint64_t>(k);
        const auto [fit, rep] = tdn::als_cp(t, 1, opts);
        const double oracle = hopm_rank1_residual(t, 10000, 909 + static_cast<std::uint64_t>(k));
        worst_als = std::max(worst_als, std::abs(rep.residual - oracle));
    }

    double worst_knorm = 0.0;
    for (int k = 0; k < 5; ++k) {
        tdn::DenseTensor n = tdn::DenseTensor::zeros({2, 2, 2});
        tdn::GaussianStream g(tdn::split_seed(818, static_cast<std::uint64_t>(k)));
        for (auto& x : n.data) x = g.normal();
        tdn::AlsOptions base;
        base.restarts = 100;
        base.seed = 1;
        base.rel_tol = 1e-13;
        base.max_sweeps = 2000;
        const double est = tdn::knorm_lower_bound(n, base);
        tdn::AlsOptions exhaustive;
        exhaustive.restarts = 10000;
        exhaustive.seed = 2;
        exhaustive.rel_tol = 1e-13;
        exhaustive.max_sweeps = 2000;
        const double oracle = tdn::knorm_lower_bound(n, exhaustive);
        worst_knorm = std::max(worst_knorm, std::abs(est - oracle));
    }
    std::ostringstream detail;
    detail << "ALS gap " << worst_als << ", restricted-norm gap " << worst_knorm;
    report(8, "tiny-scale oracle equivalence", worst_als <= 1e-6 && worst_knorm <= 1e-4,
           detail.str());
}

void criterion_9() {
    tdn::GaussianStream g(314);
    int wins = 0;
    double worst_sigma = 0.0;
    const int trials = 20;
    for (int k = 0; k < trials; ++k) {
        const double phi = 2.0 * 3.14159265358979323846 * g.uniform();
        const auto trial = tdn::steering_demo(phi, {4, 4, 4, 4}, 0.1,
                                              tdn::split_seed(999, static_cast<std::uint64_t>(k)));
        worst_sigma = std::max(worst_sigma, trial.second_singular_max);
        if (trial.epsilon < trial.noise_norm) ++wins;
    }
    std::ostringstream detail;
    detail << "max second singular " << worst_sigma << ", wins " << wins << "/" << trials;
    report(9, "steering-vector rank-1 check and denoising", worst_sigma <= 1e-10 && wins >= 19,
           detail.str());
}

void criterion_10() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "tdn_acceptance_records";
    fs::remove_all(dir);
    fs::create_directories(dir);

    tdn::DimensionSweepConfig cfg;
    cfg.m_exponent = 8;
    cfg.ratios = {0.1, 10.0};
    cfg.seeds = 5;
    cfg.master_seed = 21;

    tdn::RecordFile file1;
    file1.config = {{"m_exponent", "8"}, {"seed", "21"}};
    file1.records = tdn::dimension_sweep(cfg);
    tdn::RecordFile file2;
    file2.config = file1.config;
    file2.records = tdn::dimension_sweep(cfg);

    const auto p1 = (dir / "a.jsonl").string();
    const auto p2 = (dir / "b.jsonl").string();
    tdn::write_record_file(p1, file1);
    tdn::write_record_file(p2, file2);

    const bool identical = tdn::canonical_content(p1) == tdn::canonical_content(p2);

    const auto back = tdn::read_record_file(p1);
    bool round_trip = back.records.size() == file1.records.size() && back.config == file1.config;
    for (std::size_t i = 0; round_trip && i < back.records.size(); ++i) {
        round_trip = back.records[i].epsilon == file1.records[i].epsilon &&
                     back.records[i].seed == file1.records[i].seed &&
                     back.records[i].shape == file1.records[i].shape &&
                     back.records[i].hypothesis_holds == file1.records[i].hypothesis_holds;
    }
    report(10, "determinism and record persistence",
           identical && round_trip,
           identical ? (round_trip ? "byte-identical and round-trips" : "round-trip failed")
                     : "canonical content differs");
}

}  // namespace

int main() {
    criteria_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures == 0) {
        std::printf("all acceptance checks passed\n");
    } else {
        std::printf("%d acceptance check(s) failed\n", failures);
    }
    return failures;
}
