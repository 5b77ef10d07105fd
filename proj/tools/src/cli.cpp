#include "hellbayes_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hellbayes/density.hpp"
#include "hellbayes/dp_mixture.hpp"
#include "hellbayes/error.hpp"
#include "hellbayes/estimators.hpp"
#include "hellbayes/hellinger.hpp"
#include "hellbayes/hierarchical.hpp"
#include "hellbayes/io.hpp"
#include "hellbayes/stats.hpp"

namespace hellbayes::cli {

namespace {

using nlohmann::json;

struct Spec {
    std::string kind;
    std::string body;
};

Spec split_spec(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("expected kind:arguments, got '" + text + "'");
    return {text.substr(0, colon), text.substr(colon + 1)};
}

std::vector<double> parse_reals(const std::string& body, std::size_t expected, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double x = std::strtod(item.c_str(), &end);
        if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(x)) {
            throw ConfigError(what + ": '" + item + "' is not a real number");
        }
        out.push_back(x);
    }
    if (out.size() != expected) {
        throw ConfigError(what + " expects " + std::to_string(expected) + " comma-separated values");
    }
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        write_file_atomic(path, text);
    }
}

int thread_count(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("HELLBAYES_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw ConfigError("HELLBAYES_THREADS must be a positive integer");
        return static_cast<int>(v);
    }
    return 0;
}

ParametricFamily make_family(const std::string& name, double sigma) {
    switch (parse_family_id(name)) {
        case FamilyId::NormalLocation:
            if (!(sigma > 0.0)) throw ConfigError("--sigma must be positive");
            return ParametricFamily::normal_location(sigma);
        case FamilyId::NormalLocationScale:
            return ParametricFamily::normal_location_scale();
    }
    throw ConfigError("unknown family");
}

/// Scale of the data used to size grid margins.
double data_scale(const ParametricFamily& family, std::span<const double> data) {
    if (!family.has_scale()) return family.known_sigma();
    const double s = sample_sd(data);
    return s > 0.0 ? s : 1.0;
}

// hellinger ------------------------------------------------------------------

struct TargetDensity {
    DensityFn fn;
    double lo = 0.0;
    double hi = 0.0;
};

TargetDensity parse_g(const std::string& text) {
    const Spec spec = split_spec(text);
    if (spec.kind == "normal") {
        const auto v = parse_reals(spec.body, 2, "normal:mean,sd");
        const auto m = GaussianMixtureDensity::normal(v[0], v[1]);
        return {m, v[0] - 12.0 * v[1], v[0] + 12.0 * v[1]};
    }
    if (spec.kind == "uniform") {
        const auto v = parse_reals(spec.body, 2, "uniform:a,b");
        if (!(v[1] > v[0])) throw ConfigError("uniform:a,b needs a < b");
        const double a = v[0];
        const double b = v[1];
        const double height = 1.0 / (b - a);
        return {[a, b, height](double x) { return (x >= a && x <= b) ? height : 0.0; }, a, b};
    }
    if (spec.kind == "mixture") {
        const auto m = mixture_from_json(read_json_file(spec.body));
        const auto [lo, hi] = m.support_range(12.0);
        return {m, lo, hi};
    }
    if (spec.kind == "ensemble") {
        const auto e = ensemble_from_json(read_json_file(spec.body));
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& d : e.draws) {
            const auto [a, b] = d.support_range(12.0);
            lo = std::min(lo, a);
            hi = std::max(hi, b);
        }
        auto draws = e.draws;
        return {[draws](double x) {
                    double s = 0.0;
                    for (const auto& d : draws) s += d(x);
                    return s / static_cast<double>(draws.size());
                },
                lo, hi};
    }
    throw ConfigError("unknown density spec '" + spec.kind + "' (normal, uniform, mixture, ensemble)");
}

int cmd_hellinger(const std::string& g_spec, const std::string& f_spec, double sigma, int nodes,
                  const std::string& out_path, std::ostream& out) {
    const TargetDensity g = parse_g(g_spec);
    const Spec f = split_spec(f_spec);
    const FamilyId id = parse_family_id(f.kind);
    const ParametricFamily family = id == FamilyId::NormalLocation ? make_family(f.kind, sigma)
                                                                  : ParametricFamily::normal_location_scale();
    const auto values = parse_reals(f.body, family.dimension(), f.kind);
    ParamVector theta(family.dimension());
    for (std::size_t i = 0; i < values.size(); ++i) theta[i] = values[i];
    family.require_in_bounds(theta);
    const QuadratureGrid grid(g.lo, g.hi, static_cast<std::size_t>(nodes));
    const double d = hellinger_sq(g.fn, [&](double x) { return family.density(theta, x); }, grid);
    emit(out_path, dump_json(json{{"d_h_sq", d}}), out);
    return kOk;
}

// shared options -------------------------------------------------------------

struct DpFlags {
    int iterations = McmcConfig{}.iterations;
    int burn_in = McmcConfig{}.burn_in;
    int thin = McmcConfig{}.thin;
    double mass = DpPriorConfig{}.mass;
    int truncation = DpPriorConfig{}.truncation;

    void add(CLI::App* app) {
        app->add_option("--iters", iterations, "Gibbs iterations");
        app->add_option("--burn", burn_in, "Gibbs burn-in");
        app->add_option("--thin", thin, "Gibbs thinning");
        app->add_option("--mass", mass, "DP concentration");
        app->add_option("--truncation", truncation, "stick-breaking truncation");
    }

    DpPriorConfig prior() const {
        DpPriorConfig p;
        p.mass = mass;
        p.truncation = truncation;
        return p;
    }

    McmcConfig mcmc(std::uint64_t seed) const { return {iterations, burn_in, thin, seed}; }
};

DensityEnsemble ensemble_for(std::span<const double> data, const std::string& ensemble_path, const DpFlags& dp,
                             std::uint64_t seed) {
    if (!ensemble_path.empty()) return ensemble_from_json(read_json_file(ensemble_path));
    return run_blocked_gibbs_ensemble(data, dp.prior(), dp.mcmc(seed));
}

json summary_json(const PosteriorSummary& s, const ThetaSamplePool& pool, std::size_t ensemble_size) {
    json ci = json::array();
    for (std::size_t c = 0; c < s.ci_low.size(); ++c) ci.push_back({s.ci_low[c], s.ci_high[c]});
    return {{"eap", s.eap.to_vector()},
            {"ci", ci},
            {"sd", s.sd},
            {"acceptance_rate", pool.mean_acceptance()},
            {"ensemble_size", ensemble_size},
            {"pool_size", pool.size()}};
}

std::vector<double> proposal_for(const ParametricFamily& family, std::vector<double> flag) {
    if (flag.empty()) flag = {0.5};
    if (flag.size() == 1 && family.dimension() == 2) flag.push_back(flag[0]);
    return flag;
}

std::string density_csv(std::span<const double> draws, const std::string& column) {
    const KdeDensity k = kde(draws, BandwidthRule::silverman());
    const auto [mn, mx] = std::minmax_element(draws.begin(), draws.end());
    const double lo = *mn - 3.0 * k.bandwidth;
    const double hi = *mx + 3.0 * k.bandwidth;
    constexpr int points = 201;
    std::string text = column + ",density\n";
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        text += format_real(x) + "," + format_real(k(x)) + "\n";
    }
    return text;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hellinger-distance robust Bayesian estimation", "hellbayes"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker cap (default: HELLBAYES_THREADS or all cores)");

    std::string out_path;
    std::string data_path;
    std::string ensemble_path;
    std::uint64_t seed = 0;
    std::string family_name = "normal-loc";
    double sigma = 1.0;
    DpFlags dp;

    auto* hell = app.add_subcommand("hellinger", "squared Hellinger distance between g and f_theta");
    std::string g_spec;
    std::string f_spec;
    int nodes = 8001;
    hell->add_option("--g", g_spec, "normal:m,s | uniform:a,b | mixture:file.json | ensemble:file.json")->required();
    hell->add_option("--f", f_spec, "normal-loc:theta | normal-loc-scale:mu,sigma")->required();
    hell->add_option("--sigma", sigma, "known sd for normal-loc");
    hell->add_option("--nodes", nodes, "quadrature nodes")->check(CLI::Range(101, 20'000'001));
    hell->add_option("--out", out_path, "output JSON (default: stdout)");

    auto* dpmix = app.add_subcommand("dpmix", "sample a Dirichlet-process mixture posterior");
    dpmix->add_option("--data", data_path, "CSV, one value per line")->required();
    dpmix->add_option("--seed", seed);
    dpmix->add_option("--out", out_path, "ensemble JSON (default: stdout)");
    dp.add(dpmix);

    auto* estimate = app.add_subcommand("estimate", "one-step Hellinger estimators");
    std::string method = "t1";
    std::optional<double> epsilon;
    estimate->add_option("--method", method, "t1, t2, t3 or mhde");
    estimate->add_option("--data", data_path)->required();
    estimate->add_option("--ensemble", ensemble_path, "reuse a dpmix ensemble");
    estimate->add_option("--family", family_name);
    estimate->add_option("--sigma", sigma);
    estimate->add_option("--epsilon", epsilon, "t3 tolerance (default log n / sqrt n)");
    estimate->add_option("--seed", seed);
    estimate->add_option("--out", out_path);
    dp.add(estimate);

    auto* fit = app.add_subcommand("fit", "hierarchical Hellinger posterior");
    PriorSpec prior;
    MetropolisConfig chain;
    std::vector<double> proposal;
    fit->add_option("--data", data_path)->required();
    fit->add_option("--ensemble", ensemble_path);
    fit->add_option("--family", family_name);
    fit->add_option("--sigma", sigma);
    fit->add_option("--prior-mean", prior.location_mean);
    fit->add_option("--prior-var", prior.location_variance);
    fit->add_option("--scale-shape", prior.scale_shape);
    fit->add_option("--scale-rate", prior.scale_rate);
    fit->add_option("--steps", chain.steps, "Metropolis steps per draw of g");
    fit->add_option("--chain-thin", chain.thin);
    fit->add_option("--proposal-sd", proposal, "per coordinate; scale moves on sigma^2");
    fit->add_option("--seed", seed);
    fit->add_option("--out", out_path);
    dp.add(fit);

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo bias/sd/coverage table");
    std::string config_path;
    bool paper_scale = false;
    simulate->add_option("--config", config_path, "simulation JSON");
    simulate->add_flag("--paper-scale", paper_scale, "1000 replications and long chains");
    simulate->add_option("--out", out_path, "TSV (default: stdout)");

    auto* realdata = app.add_subcommand("realdata", "location-scale fit to paired-count log odds");
    std::string csv_path;
    std::vector<std::string> exclude;
    std::string plot_prefix;
    realdata->add_option("--csv", csv_path, "columns id,before,after")->required();
    realdata->add_option("--exclude", exclude, "subject ids left out of the classical comparison");
    realdata->add_option("--plot-prefix", plot_prefix, "prefix for <prefix>_mu.csv and <prefix>_sigma.csv");
    realdata->add_option("--steps", chain.steps);
    realdata->add_option("--seed", seed);
    realdata->add_option("--out", out_path)->required();
    dp.add(realdata);

    std::vector<const char*> argv{"hellbayes"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        err << app.help();
        return kConfigFailure;
    }

    try {
        const int workers = thread_count(threads);
        if (*hell) return cmd_hellinger(g_spec, f_spec, sigma, nodes, out_path, out);

        if (*dpmix) {
            const auto data = load_dataset_csv(data_path);
            const auto e = run_blocked_gibbs_ensemble(data, dp.prior(), dp.mcmc(seed));
            emit(out_path, dump_json(to_json(e)), out);
            return kOk;
        }

        if (*estimate) {
            const auto data = load_dataset_csv(data_path);
            const auto family = make_family(family_name, sigma);
            const auto m = parse_estimator_method(method);
            const GridPtr grid = build_grid(data, GridOptions{}.nodes_per_unit,
                                            GridOptions{}.margin * data_scale(family, data));
            const SearchBox box = default_search_box(family, data);
            EstimatorResult r;
            if (m == EstimatorMethod::ClassicalMhde) {
                r = classical_mhde(data, family, BandwidthRule::silverman(), grid, box);
            } else {
                const auto e = ensemble_for(data, ensemble_path, dp, seed);
                if (m == EstimatorMethod::Theta1) r = theta_hat_1(e, family, grid, box);
                if (m == EstimatorMethod::Theta2) r = theta_hat_2(e, family, grid, box);
                if (m == EstimatorMethod::Theta3) {
                    r = theta_hat_3(e, family, grid, box, epsilon.value_or(default_epsilon(data.size())));
                }
            }
            emit(out_path, dump_json(to_json(r)), out);
            return kOk;
        }

        if (*fit) {
            const auto data = load_dataset_csv(data_path);
            const auto family = make_family(family_name, sigma);
            prior.validate(family);
            const GridPtr grid = build_grid(data, GridOptions{}.nodes_per_unit,
                                            GridOptions{}.margin * data_scale(family, data));
            const auto e = ensemble_for(data, ensemble_path, dp, derive_seed(seed, 1));
            HierarchicalOptions opts;
            opts.chain = chain;
            opts.chain.proposal_sd = proposal_for(family, proposal);
            opts.chain.seed = derive_seed(seed, 2);
            opts.threads = workers;
            const auto pool = hierarchical_posterior(e, static_cast<double>(data.size()), prior, family, grid, opts);
            json j = summary_json(eap_and_ci(pool), pool, e.size());
            j["family"] = std::string(to_string(family.id()));
            emit(out_path, dump_json(j), out);
            return kOk;
        }

        if (*simulate) {
            SimulationConfig cfg;
            if (!config_path.empty()) cfg = simulation_config_from_json(read_json_file(config_path));
            if (paper_scale) cfg.apply_paper_scale();
            if (threads > 0 || std::getenv("HELLBAYES_THREADS")) cfg.threads = workers;
            const auto records = run_simulation(cfg);
            emit(out_path, summarize(records, cfg.theta0).to_tsv(), out);
            return kOk;
        }

        if (*realdata) {
            const PairedCountData pc = load_paired_counts_csv(csv_path);
            const auto logodds = logodds_ingest(pc);
            if (logodds.size() < 3) throw ConfigError("realdata needs at least 3 subjects");

            if (exclude.empty()) {
                // Default comparison drops the subject farthest from the median.
                const double med = median(logodds);
                std::size_t worst = 0;
                for (std::size_t i = 1; i < logodds.size(); ++i) {
                    if (std::abs(logodds[i] - med) > std::abs(logodds[worst] - med)) worst = i;
                }
                exclude.push_back(pc.ids[worst]);
            }
            const auto kept = logodds_ingest(without_subjects(pc, exclude));

            const auto family = ParametricFamily::normal_location_scale();
            const PriorSpec real_prior{0.0, 5.0, 3.0, 0.5};
            const GridPtr grid =
                build_grid(logodds, GridOptions{}.nodes_per_unit, GridOptions{}.margin * data_scale(family, logodds));
            const auto e = run_blocked_gibbs_ensemble(logodds, dp.prior(), dp.mcmc(derive_seed(seed, 1)));
            HierarchicalOptions opts;
            opts.chain = chain;
            opts.chain.proposal_sd = proposal_for(family, {});
            opts.chain.seed = derive_seed(seed, 2);
            opts.threads = workers;
            const auto pool =
                hierarchical_posterior(e, static_cast<double>(logodds.size()), real_prior, family, grid, opts);

            json j;
            j["subjects"] = pc.ids;
            j["logodds"] = logodds;
            j["classical"] = {{"all", {{"mean", mean(logodds)}, {"sd", sample_sd(logodds)}}},
                              {"excluded", exclude},
                              {"without_excluded", {{"mean", mean(kept)}, {"sd", sample_sd(kept)}}}};
            j["hellinger"] = summary_json(eap_and_ci(pool), pool, e.size());
            j["prior"] = {{"mu_mean", real_prior.location_mean},
                          {"mu_variance", real_prior.location_variance},
                          {"sigma2_shape", real_prior.scale_shape},
                          {"sigma2_rate", real_prior.scale_rate}};
            write_file_atomic(out_path, dump_json(j));

            std::string prefix = plot_prefix;
            if (prefix.empty()) prefix = std::filesystem::path(out_path).replace_extension().string();
            write_file_atomic(prefix + "_mu.csv", density_csv(pool.coordinate(0), "mu"));
            write_file_atomic(prefix + "_sigma.csv", density_csv(pool.coordinate(1), "sigma"));
            return kOk;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigFailure;
    } catch (const ParameterDomainError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigFailure;
    } catch (const RangeError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const EvaluatorContractError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigFailure;
    }
    return kConfigFailure;
}

}  // namespace hellbayes::cli
