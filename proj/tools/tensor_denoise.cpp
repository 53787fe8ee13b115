// Command-line front end: experiment orchestration, record persistence,
// bound-vs-experiment reports and SVG plot emission.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdn/bounds.hpp"
#include "tdn/noise_lab.hpp"
#include "tdn/plot.hpp"
#include "tdn/records.hpp"
#include "tdn/rng.hpp"
#include "tdn/theory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key-value configuration; precedence CLI > file > defaults.
class Config {
public:
    void set_default(const std::string& key, const std::string& value) {
        values_.emplace(key, value);  // does not overwrite
    }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                const auto e = s.find_last_not_of(" \t\r");
                return (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
            };
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (!key.empty()) file_values_[key] = value;
        }
    }

    void finalize() {
        // file < CLI: CLI entries already in values_ win.
        for (const auto& [k, v] : file_values_) values_.emplace(k, v);
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string str(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing config key: " + key);
        return it->second;
    }
    std::string str_or(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }
    long long integer(const std::string& key) const {
        try {
            return std::stoll(str(key));
        } catch (const std::exception&) {
            throw ConfigError("config key is not an integer: " + key);
        }
    }
    double real(const std::string& key) const {
        try {
            return std::stod(str(key));
        } catch (const std::exception&) {
            throw ConfigError("config key is not a number: " + key);
        }
    }
    bool flag(const std::string& key) const {
        const std::string v = str(key);
        return v == "1" || v == "true" || v == "yes" || v == "on";
    }
    std::vector<int> int_list(const std::string& key) const {
        std::vector<int> out;
        std::stringstream ss(str(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) out.push_back(std::stoi(item));
        }
        if (out.empty()) throw ConfigError("empty list for config key: " + key);
        return out;
    }
    std::vector<double> real_list(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(str(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) out.push_back(std::stod(item));
        }
        if (out.empty()) throw ConfigError("empty list for config key: " + key);
        return out;
    }

    // Snapshot for record headers. Environment-specific keys (output paths,
    // thread caps, plot toggles) do not affect results and are excluded so
    // that equal experiments yield identical files.
    std::map<std::string, std::string> echo() const {
        auto snapshot = values_;
        snapshot.erase("out");
        snapshot.erase("plots");
        snapshot.erase("threads");
        return snapshot;
    }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> file_values_;
};

tdn::AlsOptions als_from_config(const Config& cfg) {
    tdn::AlsOptions opts;
    opts.max_sweeps = static_cast<int>(cfg.integer("als_max_sweeps"));
    opts.rel_tol = cfg.real("als_rel_tol");
    opts.restarts = static_cast<int>(cfg.integer("als_restarts"));
    return opts;
}

std::filesystem::path ensure_out_dir(const Config& cfg) {
    const std::filesystem::path dir = cfg.str("out");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::ios_base::failure("cannot create output directory: " + dir.string());
    return dir;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    out << content;
    if (!out) throw std::ios_base::failure("write failure on " + path.string());
}

std::vector<std::int64_t> shape_from_config(const Config& cfg) {
    if (cfg.has("shape")) {
        std::vector<std::int64_t> shape;
        for (int v : cfg.int_list("shape")) shape.push_back(v);
        return shape;
    }
    const int d = static_cast<int>(cfg.integer("d"));
    const std::int64_t m = cfg.integer("m");
    if (d < 1 || m < 1) throw ConfigError("need d >= 1 and m >= 1 (or an explicit shape)");
    return std::vector<std::int64_t>(static_cast<std::size_t>(d), m);
}

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

int run_sweep_dim(const Config& cfg, bool with_calibration) {
    tdn::DimensionSweepConfig sweep;
    sweep.m_exponent = static_cast<int>(cfg.integer("m_exponent"));
    if (cfg.has("d_list")) sweep.d_list = cfg.int_list("d_list");
    sweep.ratios = cfg.real_list("ratios");
    sweep.master_seed = static_cast<std::uint64_t>(cfg.integer("seed"));
    sweep.seeds = static_cast<int>(cfg.integer("seeds"));
    sweep.use_multigrid = cfg.flag("multigrid");
    sweep.knorm_restarts = static_cast<int>(cfg.integer("knorm_restarts"));
    if (with_calibration && sweep.knorm_restarts < 1) sweep.knorm_restarts = 10;
    sweep.als = als_from_config(cfg);
    sweep.threads = static_cast<int>(cfg.integer("threads"));

    const auto records = tdn::dimension_sweep(sweep);

    const auto dir = ensure_out_dir(cfg);
    tdn::RecordFile file;
    file.config = cfg.echo();
    file.records = records;
    tdn::write_record_file((dir / "records.jsonl").string(), file);

    // Per-(d, ratio) aggregation against the empirical bound.
    std::ostringstream summary;
    summary << "dimension sweep  M=2^" << sweep.m_exponent << "\n";
    summary << "d ratio mean_epsilon mean_residual mean_noise_norm empirical_bound hypothesis_rate\n";
    const std::int64_t m_total = 1LL << sweep.m_exponent;
    std::vector<int> d_list = sweep.d_list.empty() ? tdn::divisor_d_list(sweep.m_exponent)
                                                   : sweep.d_list;
    std::map<double, std::vector<tdn::PlotSeries>> plots;  // per noise ratio
    for (double ratio : sweep.ratios) {
        tdn::PlotSeries eps_series{"Projection error", {}, true, true, "#1f77b4"};
        tdn::PlotSeries res_series{"ALS residual", {}, true, true, "#2ca02c"};
        tdn::PlotSeries noise_series{"Noise norm", {}, true, true, "#d62728"};
        tdn::PlotSeries bound_series{"Empirical bound", {}, true, false, "#ffbf00"};
        for (int d : d_list) {
            std::vector<double> eps, res, noise;
            int hyp = 0, count = 0;
            for (const auto& rec : records) {
                if (static_cast<int>(rec.shape.size()) != d || rec.noise_ratio != ratio) continue;
                eps.push_back(rec.epsilon);
                res.push_back(rec.residual);
                noise.push_back(rec.noise_norm);
                hyp += rec.hypothesis_holds ? 1 : 0;
                ++count;
            }
            if (count == 0) continue;
            const double bound = tdn::empirical_rank1_bound(d, m_total, mean_of(noise));
            summary << d << " " << ratio << " " << mean_of(eps) << " " << mean_of(res) << " "
                    << mean_of(noise) << " " << bound << " "
                    << static_cast<double>(hyp) / count << "\n";
            eps_series.points.emplace_back(d, mean_of(eps));
            res_series.points.emplace_back(d, mean_of(res));
            noise_series.points.emplace_back(d, mean_of(noise));
            bound_series.points.emplace_back(d, bound);
        }
        plots[ratio] = {eps_series, res_series, noise_series, bound_series};
    }

    if (with_calibration) {
        const auto cal = tdn::calibrate_mu(records);
        summary << "calibrated_mu " << cal.mu << " (lower estimate; supremum proxy is a lower bound)\n";
        summary << "calibration_t " << cal.t << " coverage " << cal.coverage << " records "
                << cal.n_records << "\n";
        std::cout << "mu = " << cal.mu << " (coverage " << cal.coverage << " at t = " << cal.t
                  << ")\n";
    }

    write_text(dir / "summary.txt", summary.str());
    if (cfg.flag("plots")) {
        for (const auto& [ratio, series] : plots) {
            tdn::PlotSpec spec;
            std::ostringstream title;
            title << "Rank-one filtration error vs dimensionality (noise ratio " << ratio << ")";
            spec.title = title.str();
            spec.x_label = "dimensionality d";
            spec.y_label = "Frobenius norm";
            spec.log_y = true;
            spec.series = series;
            std::ostringstream name;
            name << "sweep_dim_ratio_" << ratio << ".svg";
            tdn::write_svg_plot((dir / name.str()).string(), spec);
        }
    }
    std::cout << "wrote " << records.size() << " records to " << (dir / "records.jsonl").string()
              << "\n";
    return kExitOk;
}

int run_sweep_rank(const Config& cfg) {
    tdn::RankSweepConfig sweep;
    sweep.format = tdn::format_from_string(cfg.str("format"));
    sweep.shape = shape_from_config(cfg);
    sweep.ranks = cfg.int_list("ranks");
    sweep.ratio = cfg.real("ratio");
    sweep.master_seed = static_cast<std::uint64_t>(cfg.integer("seed"));
    sweep.seeds = static_cast<int>(cfg.integer("seeds"));
    sweep.als = als_from_config(cfg);
    sweep.threads = static_cast<int>(cfg.integer("threads"));

    const auto [records, fit] = tdn::rank_sweep(sweep);

    const auto dir = ensure_out_dir(cfg);
    tdn::RecordFile file;
    file.config = cfg.echo();
    file.records = records;
    tdn::write_record_file((dir / "records.jsonl").string(), file);

    std::int64_t m_total = 1;
    for (auto m : sweep.shape) m_total *= m;
    std::ostringstream summary;
    summary << "rank sweep  format=" << tdn::to_string(sweep.format)
            << " shape=" << tdn::shape_to_string(sweep.shape) << " ratio=" << sweep.ratio << "\n";
    summary << "fit: C=" << fit.c << " alpha=" << fit.alpha << " r2=" << fit.r_squared << "\n";
    summary << "R mean_epsilon rank_bound\n";
    for (int r : sweep.ranks) {
        std::vector<double> eps, noise;
        for (const auto& rec : records) {
            if (rec.rank == r) {
                eps.push_back(rec.epsilon);
                noise.push_back(rec.noise_norm);
            }
        }
        const double bound = tdn::rank_bound(sweep.format, static_cast<int>(sweep.shape.size()),
                                             m_total, r, mean_of(noise));
        summary << r << " " << mean_of(eps) << " " << bound << "\n";
    }
    write_text(dir / "summary.txt", summary.str());
    std::cout << "alpha = " << fit.alpha << "\nC = " << fit.c << "\nr2 = " << fit.r_squared << "\n";

    if (cfg.flag("plots")) {
        tdn::PlotSpec spec;
        spec.title = "Filtration error vs rank (" + tdn::to_string(sweep.format) + ")";
        spec.x_label = "rank R";
        spec.y_label = "Projection error";
        spec.log_x = true;
        spec.log_y = true;
        tdn::PlotSeries scatter{"Projection error", {}, false, true, "#1f77b4"};
        for (int r : sweep.ranks) {
            std::vector<double> eps;
            for (const auto& rec : records) {
                if (rec.rank == r) eps.push_back(rec.epsilon);
            }
            scatter.points.emplace_back(r, mean_of(eps));
        }
        spec.series.push_back(scatter);
        if (scatter.points.size() > 1) {
            tdn::PlotSeries fit_line{"C*r^alpha fit", {}, true, false, "#ff7f0e"};
            for (const auto& [r, unused] : scatter.points) {
                fit_line.points.emplace_back(r, fit.c * std::pow(r, fit.alpha));
            }
            spec.series.push_back(fit_line);
        }
        tdn::write_svg_plot((dir / "sweep_rank.svg").string(), spec);
    }
    return kExitOk;
}

int run_fit(const Config& cfg) {
    std::vector<std::pair<double, double>> points;
    if (cfg.has("points")) {
        std::stringstream ss(cfg.str("points"));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) throw ConfigError("points must be r:eps pairs");
            points.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        }
    } else if (cfg.has("input")) {
        const auto file = tdn::read_record_file(cfg.str("input"));
        std::map<int, std::vector<double>> by_rank;
        for (const auto& rec : file.records) by_rank[rec.rank].push_back(rec.epsilon);
        for (const auto& [r, eps] : by_rank) points.emplace_back(r, mean_of(eps));
    } else {
        throw ConfigError("fit needs points=r:eps,... or input=records.jsonl");
    }
    const auto fit = tdn::fit_power_law(points);
    std::cout << "alpha = " << fit.alpha << "\nC = " << fit.c << "\nr2 = " << fit.r_squared << "\n";
    return kExitOk;
}

int run_steering(const Config& cfg) {
    const auto shape = shape_from_config(cfg);
    const double ratio = cfg.real("ratio");
    const int trials = static_cast<int>(cfg.integer("seeds"));
    const std::uint64_t master = static_cast<std::uint64_t>(cfg.integer("seed"));
    if (trials < 1) throw ConfigError("seeds must be >= 1");

    const auto dir = ensure_out_dir(cfg);
    tdn::RecordFile file;
    file.config = cfg.echo();

    int passes = 0;
    double worst_sigma = 0.0;
    tdn::GaussianStream phi_stream(tdn::split_seed(master, 0));
    for (int k = 0; k < trials; ++k) {
        const double phi = 2.0 * 3.14159265358979323846 * phi_stream.uniform();
        const auto trial = tdn::steering_demo(phi, shape, ratio, tdn::split_seed(master, 100 + k));
        worst_sigma = std::max(worst_sigma, trial.second_singular_max);
        if (trial.epsilon < trial.noise_norm) ++passes;

        tdn::ExperimentRecord rec;
        rec.format = tdn::FormatKind::Canonical;
        rec.shape = shape;
        rec.rank = 1;
        rec.seed = tdn::split_seed(master, 100 + k);
        rec.trial_index = k;
        rec.noise_ratio = ratio;
        rec.epsilon = trial.epsilon;
        rec.noise_norm = trial.noise_norm;
        rec.residual = trial.residual;
        rec.hypothesis_holds = tdn::check_hypothesis(trial.residual, trial.noise_norm);
        file.records.push_back(rec);
    }
    tdn::write_record_file((dir / "records.jsonl").string(), file);

    std::ostringstream summary;
    summary << "steering demo  shape=" << tdn::shape_to_string(shape) << " ratio=" << ratio << "\n";
    summary << "trials " << trials << " denoising_wins " << passes << " max_second_singular "
            << worst_sigma << "\n";
    write_text(dir / "summary.txt", summary.str());
    std::cout << summary.str();
    return kExitOk;
}

int run_verify_theory(const Config& cfg) {
    const std::uint64_t master = static_cast<std::uint64_t>(cfg.integer("seed"));
    const int trials = static_cast<int>(cfg.integer("seeds"));
    tdn::GaussianStream g(master);
    bool ok = true;

    auto report = [&](const char* name, bool pass) {
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << "\n";
        ok = ok && pass;
    };

    // Approximate-cosine inequality.
    {
        bool pass = true;
        for (int k = 0; k < trials; ++k) {
            tdn::Vector x(8), y(8), xh(8), yh(8);
            for (int i = 0; i < 8; ++i) {
                x[i] = g.normal();
                y[i] = g.normal();
                xh[i] = x[i] + 0.1 * g.normal();
                yh[i] = y[i] + 0.1 * g.normal();
            }
            const auto [gap, bound] = tdn::approximate_cosine_gap(x, y, xh, yh);
            if (gap > bound + 1e-12) pass = false;
        }
        report("approximate cosine inequality", pass);
    }

    // Kronecker conditioning inequality.
    {
        bool pass = true;
        for (int k = 0; k < trials; ++k) {
            std::vector<tdn::Matrix> factors;
            for (int s = 0; s < 3; ++s) {
                tdn::Matrix f(4, 2);
                for (int i = 0; i < 4; ++i) {
                    f(i, 0) = g.normal();
                    f(i, 1) = g.normal();
                }
                f.col(0).normalize();
                f.col(1).normalize();
                factors.push_back(f);
            }
            const auto rep = tdn::kron_condition_check(factors);
            for (double c : rep.cond_per_dim) {
                if (rep.cond_full > c + 1e-10) pass = false;
            }
        }
        report("Kronecker conditioning inequality", pass);
    }

    // Two-column closed-form SVD vs numerical SVD.
    {
        bool pass = true;
        for (int k = 0; k < trials; ++k) {
            tdn::Vector c1(6), c2(6);
            for (int i = 0; i < 6; ++i) {
                c1[i] = g.normal();
                c2[i] = g.normal();
            }
            c1.normalize();
            c2.normalize();
            const auto closed = tdn::two_column_svd(c1, c2);
            tdn::Matrix c(6, 2);
            c.col(0) = c1;
            c.col(1) = c2;
            const auto numeric = tdn::truncated_svd(c, 2);
            if ((closed.sigma - numeric.sigma).cwiseAbs().maxCoeff() > 1e-10) pass = false;
        }
        report("two-column SVD closed form", pass);
    }

    // Bounded-condition approximation decay.
    {
        bool pass = true;
        const std::vector<double> omegas{4, 16, 64, 256};
        for (int k = 0; k < 5; ++k) {
            std::vector<tdn::Vector> a, b;
            std::vector<double> alpha;
            for (int s = 0; s < 3; ++s) {
                tdn::Vector av(4), bv(4);
                for (int i = 0; i < 4; ++i) {
                    av[i] = g.normal();
                    bv[i] = g.normal();
                }
                av.normalize();
                bv -= bv.dot(av) * av;
                bv.normalize();
                a.push_back(av);
                b.push_back(bv);
                alpha.push_back(1e-4 + 5e-4 * g.uniform());
            }
            const auto pair = tdn::build_rank2_pair(a, b, alpha);
            double prev = std::numeric_limits<double>::infinity();
            for (double omega : omegas) {
                const auto sp = tdn::conditioned_approximation(pair, omega);
                if (sp.distance > prev + 1e-12) pass = false;
                prev = sp.distance;
            }
        }
        report("bounded-condition approximation decay", pass);
    }

    if (!ok) return kExitNumerical;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank tensor noise-filtration experiment harness"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    bool plots = false;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--plots", plots, "emit SVG plots");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("overrides", overrides, "key=value overrides");
    };
    CLI::App* sweep_dim = app.add_subcommand("sweep-dim", "rank-one dimension sweep");
    CLI::App* sweep_rank = app.add_subcommand("sweep-rank", "rank sweep with power-law fit");
    CLI::App* verify = app.add_subcommand("verify-theory", "lemma and theorem witnesses");
    CLI::App* steering = app.add_subcommand("steering", "steering-vector quantization demo");
    CLI::App* calibrate = app.add_subcommand("calibrate-mu", "calibrate the tail-bound constant");
    CLI::App* fit = app.add_subcommand("fit", "power-law fit of (rank, epsilon) points");
    for (CLI::App* sub : {sweep_dim, sweep_rank, verify, steering, calibrate, fit}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    Config cfg;
    try {
        // CLI flags first (highest precedence), then overrides, then file,
        // then defaults.
        if (app.count("--seed")) cfg.set("seed", std::to_string(seed));
        if (app.count("--out")) cfg.set("out", out_dir);
        if (app.count("--plots")) cfg.set("plots", "1");
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("override must be key=value: " + kv);
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!config_path.empty()) cfg.load_file(config_path);
        cfg.finalize();
        cfg.set_default("m_exponent", "12");
        cfg.set_default("ratios", "0.1");
        cfg.set_default("ratio", "0.1");
        cfg.set_default("seeds", "20");
        cfg.set_default("multigrid", "0");
        cfg.set_default("knorm_restarts", "0");
        cfg.set_default("threads", "0");
        cfg.set_default("als_max_sweeps", "200");
        cfg.set_default("als_rel_tol", "1e-8");
        cfg.set_default("als_restarts", "1");
        cfg.set_default("format", "canonical");
        cfg.set_default("seed", std::to_string(seed));
        cfg.set_default("out", out_dir);
        cfg.set_default("plots", plots ? "1" : "0");

        if (app.got_subcommand(sweep_dim)) return run_sweep_dim(cfg, false);
        if (app.got_subcommand(calibrate)) return run_sweep_dim(cfg, true);
        if (app.got_subcommand(sweep_rank)) return run_sweep_rank(cfg);
        if (app.got_subcommand(verify)) return run_verify_theory(cfg);
        if (app.got_subcommand(steering)) return run_steering(cfg);
        if (app.got_subcommand(fit)) return run_fit(cfg);
        std::cerr << "no subcommand selected\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
