#include "tdn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tdn {

namespace {

// Integer m with m^d = m_total, or -1.
std::int64_t integer_mode_size(std::int64_t m_total, int d) {
    const double guess = std::pow(static_cast<double>(m_total), 1.0 / d);
    for (std::int64_t m = std::max<std::int64_t>(1, llround(guess) - 1); m <= llround(guess) + 1;
         ++m) {
        std::int64_t p = 1;
        bool overflow = false;
        for (int i = 0; i < d; ++i) {
            if (p > m_total / std::max<std::int64_t>(m, 1)) {
                overflow = true;
                break;
            }
            p *= m;
        }
        if (!overflow && p == m_total) return m;
    }
    return -1;
}

}  // namespace

double theorem1_bound(std::int64_t m, int d, double mu, double t) {
    if (m < 2) throw std::invalid_argument("theorem1_bound: m must be >= 2");
    if (d < 2) throw std::invalid_argument("theorem1_bound: d must be >= 2");
    if (!(mu > 0.0)) throw std::invalid_argument("theorem1_bound: mu must be > 0");
    if (t < 0.0) throw std::invalid_argument("theorem1_bound: t must be >= 0");
    return mu * std::sqrt(static_cast<double>(m) * d * d * std::log(static_cast<double>(m))) + t;
}

double theorem1_tail_probability(double t, std::int64_t m, int d) {
    if (t < 0.0) throw std::invalid_argument("theorem1_tail_probability: t must be >= 0");
    const double half_power = 0.5 * d * std::log(static_cast<double>(m));  // ln m^{d/2}
    // exp(-m^{d/2}/8) underflows quickly; evaluate guardedly.
    double concentration = 0.0;
    if (half_power < std::log(8.0 * 700.0)) {
        concentration = 2.0 * std::exp(-std::exp(half_power) / 8.0);
    }
    const double raw = std::exp(-t * t / 4.0) + concentration;
    return std::clamp(raw, 0.0, 1.0);
}

double empirical_rank1_bound(int d, std::int64_t m_total, double noise_norm) {
    if (d < 1) throw std::invalid_argument("empirical_rank1_bound: d must be >= 1");
    if (integer_mode_size(m_total, d) < 0) {
        throw std::invalid_argument("empirical_rank1_bound: M must be m^d with integer m");
    }
    const double m_double = static_cast<double>(m_total);
    return std::sqrt(d * std::pow(m_double, 1.0 / d) / m_double) * noise_norm;
}

double rank_bound(FormatKind kind, int d, std::int64_t m_total, int rank, double noise_norm) {
    return rank_bound_value(kind, d, m_total, rank, noise_norm).value;
}

BoundValue rank_bound_value(FormatKind kind, int d, std::int64_t m_total, int rank,
                            double noise_norm) {
    if (d < 2) throw std::invalid_argument("rank_bound: d must be >= 2");
    if (rank < 1) throw std::invalid_argument("rank_bound: rank must be >= 1");
    double rank_exponent = 1.0;
    BoundValue out;
    switch (kind) {
        case FormatKind::Canonical:
            rank_exponent = 1.0;
            out.kind = BoundKind::RankCanonical;
            break;
        case FormatKind::TensorTrain:
            rank_exponent = 2.0;
            out.kind = BoundKind::RankTensorTrain;
            break;
        case FormatKind::Tucker:
            rank_exponent = static_cast<double>(d);
            out.kind = BoundKind::RankTucker;
            break;
    }
    const double m_double = static_cast<double>(m_total);
    // log space: R^d overflows 64-bit floats at modest Tucker parameters.
    const double log_value = 0.5 * (std::log(static_cast<double>(d)) +
                                    rank_exponent * std::log(static_cast<double>(rank)) +
                                    std::log(m_double) / d + std::log(std::log(static_cast<double>(d))) -
                                    std::log(m_double)) +
                             std::log(noise_norm);
    const double value = std::exp(log_value);
    out.value = value;
    if (!std::isfinite(value)) {
        out.value = std::numeric_limits<double>::infinity();
        out.overflowed = true;
    }
    std::ostringstream os;
    os << "d=" << d << " M=" << m_total << " R=" << rank << " noise=" << noise_norm;
    out.inputs = os.str();
    return out;
}

double net_log_cardinality(std::int64_t m, int d, double omega, double zeta) {
    if (d < 2) throw std::invalid_argument("net_log_cardinality: d must be >= 2");
    if (!(omega >= d)) throw std::invalid_argument("net_log_cardinality: Omega must be >= d");
    if (!(zeta > 0.0 && zeta <= 1.0)) {
        throw std::invalid_argument("net_log_cardinality: zeta must be in (0, 1]");
    }
    if (m < 1) throw std::invalid_argument("net_log_cardinality: m must be >= 1");
    return 2.0 * static_cast<double>(m) * d * std::log(6.0 * omega * omega / zeta);
}

MuCalibration calibrate_mu(const std::vector<ExperimentRecord>& records) {
    std::vector<const ExperimentRecord*> usable;
    std::set<int> d_values;
    for (const auto& rec : records) {
        if (rec.knorm_estimate >= 0.0) {
            usable.push_back(&rec);
            d_values.insert(static_cast<int>(rec.shape.size()));
        }
    }
    if (usable.size() < 10 || d_values.size() < 3) {
        throw std::invalid_argument("calibrate_mu: need >= 10 records spanning >= 3 d values");
    }

    MuCalibration cal;
    cal.t = 2.0 * std::sqrt(std::log(1.0 / 0.05));  // e^{-t^2/4} = 0.05
    double mu = 0.0;
    for (const auto* rec : usable) {
        const int d = static_cast<int>(rec->shape.size());
        const std::int64_t m = rec->shape.front();
        double m_total = 1.0;
        for (auto s : rec->shape) m_total *= static_cast<double>(s);
        // Per-element noise std; the concentration E||N||_F ~ sqrt(M) * std.
        const double sigma = rec->noise_norm / std::sqrt(m_total);
        const double sup_std = rec->knorm_estimate / sigma;
        const double scale = std::sqrt(static_cast<double>(m) * d * d *
                                       std::log(static_cast<double>(m)));
        mu = std::max(mu, (sup_std - cal.t) / scale);
    }
    cal.mu = std::max(mu, 1e-12);
    int covered = 0;
    for (const auto* rec : usable) {
        const int d = static_cast<int>(rec->shape.size());
        const std::int64_t m = rec->shape.front();
        double m_total = 1.0;
        for (auto s : rec->shape) m_total *= static_cast<double>(s);
        const double sigma = rec->noise_norm / std::sqrt(m_total);
        if (rec->knorm_estimate / sigma <= theorem1_bound(m, d, cal.mu, cal.t) + 1e-9) ++covered;
    }
    cal.coverage = static_cast<double>(covered) / usable.size();
    cal.n_records = static_cast<int>(usable.size());
    return cal;
}

}  // namespace tdn
