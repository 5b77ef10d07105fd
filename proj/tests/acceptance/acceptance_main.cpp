// Acceptance suite. Usage: hellbayes_acceptance [--smoke] [criterion ...]
// With no criterion numbers every criterion runs. Exit status is nonzero
// when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hellbayes/dp_mixture.hpp"
#include "hellbayes/estimators.hpp"
#include "hellbayes/experiments.hpp"
#include "hellbayes/hellinger.hpp"
#include "hellbayes/hierarchical.hpp"
#include "hellbayes/io.hpp"
#include "hellbayes/random.hpp"
#include "hellbayes/stats.hpp"
#include "hellbayes_cli/cli.hpp"

using namespace hellbayes;

namespace {

bool g_smoke = false;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (ok ? "" : "!") << what << "; ";
    }
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

std::string fmt(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

double closed_form_hellinger(double m1, double s1, double m2, double s2) {
    const double v = s1 * s1 + s2 * s2;
    return 2.0 * (1.0 - std::sqrt(2.0 * s1 * s2 / v) * std::exp(-(m1 - m2) * (m1 - m2) / (4.0 * v)));
}

double sample_var(const std::vector<double>& xs) {
    const double s = sample_sd(xs);
    return s * s;
}

// 1 ---------------------------------------------------------------------------
Outcome closed_form_oracle() {
    Outcome o;
    Rng rng(derive_seed(0, 1));
    double worst_generic = 0.0;
    double worst_fast = 0.0;
    const auto std_normal = GaussianMixtureDensity::normal(0.0, 1.0);
    const auto family = ParametricFamily::normal_location_scale();
    for (int i = 0; i < 50; ++i) {
        const double mu = -5.0 + 10.0 * sample_uniform(rng);
        const double sigma = 0.2 + 4.8 * sample_uniform(rng);
        const double exact = closed_form_hellinger(0.0, 1.0, mu, sigma);
        const double lo = std::min(-12.0, mu - 12.0 * sigma);
        const double hi = std::max(12.0, mu + 12.0 * sigma);
        const QuadratureGrid grid(lo, hi, 20001);
        const auto f = GaussianMixtureDensity::normal(mu, sigma);
        worst_generic = std::max(worst_generic, std::abs(hellinger_sq(std_normal, f, grid) - exact));
        const auto root = RootDensity::from(std_normal, std::make_shared<const QuadratureGrid>(grid));
        worst_fast = std::max(worst_fast, std::abs(root.hellinger_sq(family, {mu, sigma}) - exact));
    }
    o.check(worst_generic <= 1e-6, "max |err| generic " + sci(worst_generic));
    o.check(worst_fast <= 1e-6, "max |err| cached-root " + sci(worst_fast));
    return o;
}

// 2 ---------------------------------------------------------------------------
Outcome conjugate_exactness() {
    Outcome o;
    std::vector<double> data(20);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = 5.0 + (i % 2 == 0 ? 0.5 : -0.5);
    const auto post = conjugate_normal_posterior(data, 0.0, 25.0, 1.0);
    o.check(within(post.mean(), 4.990, 1e-3), "mean " + fmt(post.mean(), 5));
    o.check(within(post.sd(), 0.2234, 1e-4), "sd " + fmt(post.sd(), 5));
    return o;
}

SimulationConfig table_config() {
    SimulationConfig c;
    c.n = 20;
    c.theta0 = 5.0;
    c.sigma0 = 1.0;
    c.replications = 200;
    c.methods = {SimMethod::Conjugate, SimMethod::Hellinger};
    c.master_seed = 0;
    return c;
}

// 3 ---------------------------------------------------------------------------
Outcome table1() {
    Outcome o;
    const SimulationConfig cfg = table_config();
    const auto records = run_simulation(cfg);
    const auto table = summarize(records, cfg.theta0);
    const SummaryRow* post = table.find(SimMethod::Conjugate, 0, 0.0);
    const SummaryRow* hell = table.find(SimMethod::Hellinger, 0, 0.0);
    o.check(within(post->bias, -0.015, 0.05), "conj bias " + fmt(post->bias));
    o.check(within(post->sd, 0.222, 0.04), "conj sd " + fmt(post->sd));
    o.check(within(post->coverage, 0.956, 0.04), "conj cov " + fmt(post->coverage, 3));
    o.check(within(post->mean_ci_length, 0.873, 0.02), "conj len " + fmt(post->mean_ci_length));
    o.check(within(hell->bias, -0.015, 0.07), "hell bias " + fmt(hell->bias));
    o.check(within(hell->coverage, 0.955, 0.05), "hell cov " + fmt(hell->coverage, 3));
    o.check(within(hell->mean_ci_length, 0.937, 0.10), "hell len " + fmt(hell->mean_ci_length));
    return o;
}

// 4 ---------------------------------------------------------------------------
Outcome table2() {
    Outcome o;
    SimulationConfig cfg = table_config();
    const std::vector<int> ks = g_smoke ? std::vector<int>{1} : std::vector<int>{1, 2, 5};
    if (g_smoke) cfg.replications = 50;
    for (int k : ks) {
        for (double shift : {3.0, 5.0, 10.0}) cfg.contamination.push_back({k, shift, Direction::Down});
    }
    const auto table = summarize(run_simulation(cfg), cfg.theta0);
    const std::map<double, double> published_bias{{3.0, -0.147}, {5.0, -0.248}, {10.0, -0.519}};
    for (const auto& [shift, target] : published_bias) {
        const double b = table.find(SimMethod::Conjugate, 1, -shift)->bias;
        o.check(within(b, target, 0.05), "conj k1 s" + fmt(shift, 0) + " bias " + fmt(b));
    }
    for (int k : ks) {
        const double b3 = table.find(SimMethod::Hellinger, k, -3.0)->bias;
        const double b10 = table.find(SimMethod::Hellinger, k, -10.0)->bias;
        o.check(std::abs(b10) < std::abs(b3), "hell k" + std::to_string(k) + " |bias| s10 " + fmt(b10) +
                                                  " < s3 " + fmt(b3));
    }
    const double hc = table.find(SimMethod::Hellinger, 1, -10.0)->coverage;
    const double cc = table.find(SimMethod::Conjugate, 1, -10.0)->coverage;
    o.check(hc >= 0.90, "hell cov k1 s10 " + fmt(hc, 3));
    o.check(cc <= 0.45, "conj cov k1 s10 " + fmt(cc, 3));
    return o;
}

// 5 ---------------------------------------------------------------------------
Outcome efficiency() {
    Outcome o;
    SimulationConfig cfg = table_config();
    cfg.n = 200;
    cfg.methods = {SimMethod::Theta1, SimMethod::Hellinger};
    const auto records = run_simulation(cfg);
    std::vector<double> t1;
    std::vector<double> eap;
    for (const auto& r : records) {
        t1.push_back(r.methods.at(SimMethod::Theta1).estimate);
        eap.push_back(r.methods.at(SimMethod::Hellinger).estimate);
    }
    const double v1 = sample_var(t1) * cfg.n;
    const double v4 = sample_var(eap) * cfg.n;
    o.check(v1 >= 0.8 && v1 <= 1.3, "n*var(t1) " + fmt(v1, 3));
    o.check(v4 >= 0.8 && v4 <= 1.3, "n*var(eap) " + fmt(v4, 3));
    return o;
}

// 6 ---------------------------------------------------------------------------
Outcome consistency() {
    Outcome o;
    constexpr int reps = 50;
    const auto family = ParametricFamily::normal_location(1.0);
    const SimulationConfig base = table_config();
    std::map<std::string, int> closer;
    std::vector<double> gap20;
    std::vector<double> gap200;
    for (int r = 0; r < reps; ++r) {
        // The small sample is the first 20 points of the large one.
        const auto seed = derive_seed(6, static_cast<std::uint64_t>(r));
        const auto big = simulate_dataset(200, 5.0, 1.0, seed);
        const std::vector<double> small(big.begin(), big.begin() + 20);
        std::map<std::string, double> err[2];
        double gap[2] = {0.0, 0.0};
        for (int s = 0; s < 2; ++s) {
            const std::vector<double>& data = s == 0 ? small : big;
            McmcConfig mcmc = base.dp_mcmc;
            mcmc.seed = derive_seed(seed, 10 + s);
            const auto ens = run_blocked_gibbs_ensemble(data, base.dp, mcmc);
            const auto grid = build_grid(data, base.grid.nodes_per_unit, base.grid.margin);
            const auto box = default_search_box(family, data);
            const double a = theta_hat_1(ens, family, grid, box).theta[0];
            const double b = theta_hat_2(ens, family, grid, box).theta[0];
            const double c = theta_hat_3(ens, family, grid, box, default_epsilon(data.size())).theta[0];
            HierarchicalOptions opts;
            opts.chain = base.chain;
            opts.chain.seed = derive_seed(seed, 20 + s);
            opts.threads = 0;
            const auto pool =
                hierarchical_posterior(ens, static_cast<double>(data.size()), base.prior, family, grid, opts);
            const double d = eap_and_ci(pool).eap[0];
            err[s] = {{"t1", std::abs(a - 5.0)}, {"t2", std::abs(b - 5.0)}, {"t3", std::abs(c - 5.0)},
                      {"eap", std::abs(d - 5.0)}};
            gap[s] = std::abs(b - a);
        }
        for (const auto& [name, e] : err[1]) closer[name] += e < err[0].at(name) ? 1 : 0;
        gap20.push_back(gap[0]);
        gap200.push_back(gap[1]);
    }
    for (const auto& [name, count] : closer) {
        o.check(count >= 40, name + " closer " + std::to_string(count) + "/50");
    }
    const double m20 = median(gap20);
    const double m200 = median(gap200);
    o.check(m200 < m20, "median|t2-t1| n200 " + fmt(m200, 5) + " < n20 " + fmt(m20, 5));
    return o;
}

// 7 ---------------------------------------------------------------------------
Outcome outlier_limit() {
    Outcome o;
    const auto family = ParametricFamily::normal_location(1.0);
    const SimulationConfig base = table_config();
    Rng rng(derive_seed(7, 0));
    std::vector<double> clean(15);
    for (double& x : clean) x = sample_normal(rng, 5.0, 1.0);
    std::vector<double> z(5);
    for (double& x : z) x = sample_normal(rng, 0.0, 1.0);

    auto run = [&](double location) {
        std::vector<double> data = clean;
        for (double d : z) data.push_back(location + d);
        McmcConfig mcmc = base.dp_mcmc;
        mcmc.seed = derive_seed(7, 1);
        const auto ens = run_blocked_gibbs_ensemble(data, base.dp, mcmc);
        const auto grid = build_grid(data, base.grid.nodes_per_unit, base.grid.margin);
        HierarchicalOptions opts;
        opts.chain = base.chain;
        opts.chain.seed = derive_seed(7, 2);
        opts.threads = 0;
        return eap_and_ci(hierarchical_posterior(ens, 20.0, base.prior, family, grid, opts)).eap[0];
    };
    const double e10 = run(-10.0);
    const double e100 = run(-100.0);

    McmcConfig mcmc = base.dp_mcmc;
    mcmc.seed = derive_seed(7, 3);
    HierarchicalOptions opts;
    opts.chain = base.chain;
    opts.chain.seed = derive_seed(7, 4);
    opts.threads = 0;
    constexpr int beta_draws = 50;
    const auto grid = build_grid(clean, base.grid.nodes_per_unit, base.grid.margin);
    const auto ref = clean_subset_reference_posterior(clean, 20, base.prior, family, base.dp, mcmc, grid, opts,
                                                      beta_draws);
    const double eref = eap_and_ci(ref.pool).eap[0];

    o.check(std::abs(e10 - e100) <= 0.1, "eap(-10) " + fmt(e10) + " vs eap(-100) " + fmt(e100));
    o.check(std::abs(e10 - eref) <= 0.2, "eap(-10) vs ref " + fmt(eref));
    o.check(std::abs(e100 - eref) <= 0.2, "eap(-100) vs ref " + fmt(eref));
    const double expected = 16.0 / 21.0;
    const double sd_b = std::sqrt(16.0 * 5.0 / (21.0 * 21.0 * 22.0));
    const double bm = mean(ref.b_draws);
    o.check(std::abs(bm - expected) <= 3.0 * sd_b / std::sqrt(beta_draws), "mean b " + fmt(bm));
    return o;
}

// 8 ---------------------------------------------------------------------------
Outcome real_data() {
    Outcome o;
    const auto pc = parasite_table();
    const auto all = logodds_ingest(pc);
    const std::vector<std::string> drop{"5"};
    const auto kept = logodds_ingest(without_subjects(pc, drop));
    o.check(within(mean(all), -1.85, 0.005), "mean " + fmt(mean(all)));
    o.check(within(sample_sd(all), 1.07, 0.005), "sd " + fmt(sample_sd(all)));
    o.check(within(mean(kept), -1.49, 0.005), "mean w/o 5 " + fmt(mean(kept)));
    o.check(within(sample_sd(kept), 0.56, 0.005), "sd w/o 5 " + fmt(sample_sd(kept)));
    return o;
}

// 9 ---------------------------------------------------------------------------
// Batch-means standard error of the mean of a correlated series.
double batch_se(const std::vector<double>& xs, std::size_t batches = 50) {
    const std::size_t size = xs.size() / batches;
    std::vector<double> means;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * size; i < (b + 1) * size; ++i) s += xs[i];
        means.push_back(s / static_cast<double>(size));
    }
    return sample_sd(means) / std::sqrt(static_cast<double>(batches));
}

Outcome gibbs_oracle() {
    Outcome o;
    Rng rng(derive_seed(9, 0));
    std::vector<double> data(30);
    for (double& x : data) x = sample_normal(rng, 2.0, 1.5);

    DpPriorConfig prior;
    prior.truncation = 1;
    prior.fixed_kappa0 = 0.5;
    prior.m1 = 0.0;
    const McmcConfig mcmc{5500, 500, 1, derive_seed(9, 1)};
    const auto ens = run_blocked_gibbs_ensemble(data, prior, mcmc);

    // Normal-inverse-gamma posterior: mu | s2 ~ N(mn, s2 / kn), s2 ~ IG(an, bn).
    const double n = static_cast<double>(data.size());
    const double xbar = mean(data);
    double ss = 0.0;
    for (double x : data) ss += (x - xbar) * (x - xbar);
    const double k0 = *prior.fixed_kappa0;
    const double kn = k0 + n;
    const double mn = (k0 * prior.m1 + n * xbar) / kn;
    const double an = prior.nu1 / 2.0 + n / 2.0;
    const double bn = prior.psi1 / 2.0 + ss / 2.0 + k0 * n * (xbar - prior.m1) * (xbar - prior.m1) / (2.0 * kn);
    const double mean_s2 = bn / (an - 1.0);
    const double var_mu = bn / ((an - 1.0) * kn);

    std::vector<double> mu;
    std::vector<double> s2;
    std::vector<double> dev2;
    for (const auto& d : ens.draws) {
        mu.push_back(d.means()[0]);
        s2.push_back(d.variances()[0]);
        dev2.push_back((d.means()[0] - mn) * (d.means()[0] - mn));
    }
    o.check(ens.size() == 5000, "draws " + std::to_string(ens.size()));
    o.check(std::abs(mean(mu) - mn) <= 3.0 * batch_se(mu), "E[mu] " + fmt(mean(mu)) + " vs " + fmt(mn));
    o.check(std::abs(mean(s2) - mean_s2) <= 3.0 * batch_se(s2), "E[s2] " + fmt(mean(s2)) + " vs " + fmt(mean_s2));
    o.check(std::abs(mean(dev2) - var_mu) <= 3.0 * batch_se(dev2),
            "Var[mu] " + fmt(mean(dev2), 5) + " vs " + fmt(var_mu, 5));
    return o;
}

// 10 --------------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hellbayes_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto data = simulate_dataset(25, 5.0, 1.0, 42);
    std::string csv = "x\n";
    for (double x : data) csv += format_real(x) + "\n";
    write_file_atomic(dir / "data.csv", csv);
    write_file_atomic(dir / "horses.csv",
                      "id,before,after\n1,2440,580\n2,1000,320\n3,1900,400\n4,1820,160\n5,3260,60\n6,300,40\n"
                      "7,660,120\n");
    write_file_atomic(dir / "sim.json",
                      R"({"replications": 3, "methods": ["conjugate", "hellinger", "t1", "t3"],
                          "contamination": [{"k": 1, "shift": 10}], "include_clean": true,
                          "dp_mcmc": {"iterations": 400, "burn_in": 100, "thin": 10},
                          "chain": {"steps": 2000}})");
    const std::string d = dir.string() + "/";
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"hellinger.json", {"hellinger", "--g", "normal:0,1", "--f", "normal-loc:1", "--out"}},
        {"ensemble.json", {"dpmix", "--data", d + "data.csv", "--iters", "600", "--burn", "100", "--thin", "10",
                           "--seed", "5", "--out"}},
        {"estimate.json", {"estimate", "--method", "t2", "--data", d + "data.csv", "--iters", "600", "--burn",
                           "100", "--thin", "10", "--seed", "5", "--out"}},
        {"fit.json", {"fit", "--data", d + "data.csv", "--family", "normal-loc-scale", "--iters", "600", "--burn",
                      "100", "--thin", "10", "--steps", "2000", "--seed", "5", "--out"}},
        {"table.tsv", {"simulate", "--config", d + "sim.json", "--out"}},
        {"posterior.json", {"realdata", "--csv", d + "horses.csv", "--iters", "600", "--burn", "100", "--thin",
                            "10", "--steps", "2000", "--out"}},
    };
    for (const auto& [file, base_args] : commands) {
        std::string outputs[2];
        bool ok = true;
        for (int run = 0; run < 2; ++run) {
            auto args = base_args;
            args.push_back(d + std::to_string(run) + "_" + file);
            std::ostringstream out;
            std::ostringstream err;
            ok = ok && cli::run_command(args, out, err) == 0;
            outputs[run] = slurp(d + std::to_string(run) + "_" + file);
            if (file == "posterior.json") {
                outputs[run] += slurp(d + std::to_string(run) + "_posterior_mu.csv");
                outputs[run] += slurp(d + std::to_string(run) + "_posterior_sigma.csv");
            }
        }
        o.check(ok && !outputs[0].empty() && outputs[0] == outputs[1], base_args.front() + " identical");
    }
    fs::remove_all(dir);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"closed-form Hellinger oracle", closed_form_oracle},
        {"conjugate baseline exactness", conjugate_exactness},
        {"clean-data simulation table", table1},
        {"contamination robustness pattern", table2},
        {"efficiency at n=200", efficiency},
        {"consistency n=20 vs n=200", consistency},
        {"outlier-rejection limit", outlier_limit},
        {"real-data ingestion", real_data},
        {"K=1 Gibbs vs normal-inverse-gamma", gibbs_oracle},
        {"CLI determinism", determinism},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--smoke") {
            g_smoke = true;
        } else {
            const int k = std::atoi(arg.c_str());
            if (k < 1 || k > static_cast<int>(criteria.size())) {
                std::fprintf(stderr, "unknown criterion '%s'\n", arg.c_str());
                return 2;
            }
            selected.push_back(k);
        }
    }
    if (selected.empty()) {
        for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);
    }

    int failures = 0;
    for (int k : selected) {
        const auto& [name, fn] = criteria[static_cast<std::size_t>(k - 1)];
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d %s: %s (%.1fs) %s\n", k, o.pass ? "PASS" : "FAIL", name.c_str(), secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
