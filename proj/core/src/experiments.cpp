#include "hellbayes/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hellbayes/error.hpp"
#include "hellbayes/estimators.hpp"
#include "hellbayes/io.hpp"
#include "hellbayes/parallel.hpp"
#include "hellbayes/stats.hpp"

namespace hellbayes {

std::string_view to_string(SimMethod m) noexcept {
    switch (m) {
        case SimMethod::Conjugate: return "conjugate";
        case SimMethod::Hellinger: return "hellinger";
        case SimMethod::Theta1: return "t1";
        case SimMethod::Theta2: return "t2";
        case SimMethod::Theta3: return "t3";
        case SimMethod::Mhde: return "mhde";
    }
    return "unknown";
}

SimMethod parse_sim_method(std::string_view tag) {
    if (tag == "conjugate" || tag == "posterior") return SimMethod::Conjugate;
    if (tag == "hellinger" || tag == "hierarchical") return SimMethod::Hellinger;
    if (tag == "t1") return SimMethod::Theta1;
    if (tag == "t2") return SimMethod::Theta2;
    if (tag == "t3") return SimMethod::Theta3;
    if (tag == "mhde") return SimMethod::Mhde;
    throw ConfigError("unknown simulation method '" + std::string(tag) + "'");
}

void SimulationConfig::validate() const {
    if (n < 2) throw ConfigError("simulation sample size must be at least 2");
    if (replications < 1) throw ConfigError("replications must be at least 1");
    if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be positive");
    if (methods.empty()) throw ConfigError("no simulation methods selected");
    for (const auto& c : contamination) {
        if (c.k < 1 || c.k >= n) throw ConfigError("contamination k must satisfy 1 <= k < n");
        if (!(c.shift >= 0.0)) throw ConfigError("contamination shift must be nonnegative");
    }
    dp.validate();
    dp_mcmc.validate();
    prior.validate(ParametricFamily::normal_location(sigma0));
    chain.validate(ParametricFamily::normal_location(sigma0));
}

void SimulationConfig::apply_paper_scale() {
    replications = 1000;
    chain.steps = 2'000'000;
    chain.burn_in = -1;
    chain.thin = 1000;
}

std::vector<double> simulate_dataset(int n, double theta0, double sigma0, std::uint64_t seed) {
    if (n < 1) throw ConfigError("dataset size must be positive");
    Rng rng(seed);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (double& x : out) x = sample_normal(rng, theta0, sigma0);
    return out;
}

std::vector<double> contaminate(std::span<const double> data, const ContaminationSpec& spec) {
    if (spec.k < 1 || static_cast<std::size_t>(spec.k) >= data.size()) {
        throw ConfigError("contamination k must satisfy 1 <= k < n");
    }
    std::vector<double> out(data.begin(), data.end());
    const double delta = spec.direction == Direction::Down ? -spec.shift : spec.shift;
    for (std::size_t i = out.size() - static_cast<std::size_t>(spec.k); i < out.size(); ++i) out[i] += delta;
    return out;
}

namespace {

bool needs_ensemble(const std::vector<SimMethod>& methods) {
    return std::any_of(methods.begin(), methods.end(), [](SimMethod m) {
        return m == SimMethod::Hellinger || m == SimMethod::Theta1 || m == SimMethod::Theta2 ||
               m == SimMethod::Theta3;
    });
}

}  // namespace

ReplicationRecord run_replication(const SimulationConfig& config, int replication_index,
                                  const std::optional<ContaminationSpec>& contamination) {
    const std::uint64_t data_seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(replication_index));
    std::vector<double> data = simulate_dataset(config.n, config.theta0, config.sigma0, data_seed);
    if (contamination) data = contaminate(data, *contamination);

    const auto family = ParametricFamily::normal_location(config.sigma0);
    const GridPtr grid = build_grid(data, config.grid.nodes_per_unit, config.grid.margin * config.sigma0);

    ReplicationRecord record;
    record.index = replication_index;
    record.contamination = contamination;

    DensityEnsemble ensemble;
    if (needs_ensemble(config.methods)) {
        McmcConfig mcmc = config.dp_mcmc;
        mcmc.seed = derive_seed(data_seed, 1);
        ensemble = run_blocked_gibbs_ensemble(data, config.dp, mcmc);
    }
    const SearchBox box = default_search_box(family, data);

    for (SimMethod method : config.methods) {
        MethodRecord r;
        switch (method) {
            case SimMethod::Conjugate: {
                const auto post = conjugate_normal_posterior(data, config.prior.location_mean,
                                                             config.prior.location_variance, config.sigma0);
                const auto [lo, hi] = post.credible_interval(0.95);
                r = {post.mean(), lo, hi};
                break;
            }
            case SimMethod::Hellinger: {
                HierarchicalOptions opts;
                opts.chain = config.chain;
                opts.chain.seed = derive_seed(data_seed, 2);
                const auto pool = hierarchical_posterior(ensemble, static_cast<double>(data.size()), config.prior,
                                                         family, grid, opts);
                const auto s = eap_and_ci(pool);
                r = {s.eap[0], s.ci_low[0], s.ci_high[0]};
                break;
            }
            case SimMethod::Theta1:
                r.estimate = theta_hat_1(ensemble, family, grid, box).theta[0];
                break;
            case SimMethod::Theta2:
                r.estimate = theta_hat_2(ensemble, family, grid, box).theta[0];
                break;
            case SimMethod::Theta3:
                r.estimate = theta_hat_3(ensemble, family, grid, box, default_epsilon(data.size())).theta[0];
                break;
            case SimMethod::Mhde:
                r.estimate = classical_mhde(data, family, BandwidthRule::silverman(), grid, box).theta[0];
                break;
        }
        record.methods[method] = r;
    }
    return record;
}

std::vector<ReplicationRecord> run_simulation(const SimulationConfig& config) {
    config.validate();
    std::vector<std::optional<ContaminationSpec>> cells;
    if (config.contamination.empty() || config.include_clean) cells.emplace_back(std::nullopt);
    for (const auto& c : config.contamination) cells.emplace_back(c);

    const auto reps = static_cast<std::size_t>(config.replications);
    std::vector<ReplicationRecord> records(cells.size() * reps);
    parallel_for(records.size(), config.threads, [&](std::size_t task) {
        const std::size_t cell = task / reps;
        const int index = static_cast<int>(task % reps);
        records[task] = run_replication(config, index, cells[cell]);
    });
    return records;
}

namespace {

struct CellKey {
    SimMethod method;
    int k;
    double shift;

    bool operator==(const CellKey&) const = default;
};

CellKey key_of(SimMethod method, const std::optional<ContaminationSpec>& c) {
    if (!c) return {method, 0, 0.0};
    return {method, c->k, c->direction == Direction::Down ? -c->shift : c->shift};
}

}  // namespace

const SummaryRow* SummaryTable::find(SimMethod method, int k, double shift) const {
    for (const auto& row : rows) {
        if (row.method == method && row.k == k && row.shift == shift) return &row;
    }
    return nullptr;
}

std::string SummaryTable::to_tsv() const {
    std::ostringstream out;
    out << "method\tk\tshift\tbias\tsd\tcoverage\tlength\treps\n";
    auto real = [](double x) { return std::isnan(x) ? std::string("NA") : format_real(x); };
    for (const auto& r : rows) {
        out << to_string(r.method) << '\t' << r.k << '\t' << format_real(r.shift) << '\t' << real(r.bias) << '\t'
            << real(r.sd) << '\t' << real(r.coverage) << '\t' << real(r.mean_ci_length) << '\t' << r.replications
            << '\n';
    }
    return out.str();
}

SummaryTable summarize(std::span<const ReplicationRecord> records, double theta0) {
    if (records.empty()) throw ConfigError("nothing to summarize");
    std::vector<CellKey> keys;
    for (const auto& rec : records) {
        for (const auto& [method, _] : rec.methods) {
            const CellKey key = key_of(method, rec.contamination);
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        }
    }
    std::stable_sort(keys.begin(), keys.end(), [](const CellKey& a, const CellKey& b) {
        return static_cast<int>(a.method) < static_cast<int>(b.method);
    });

    SummaryTable table;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (const CellKey& key : keys) {
        std::vector<double> estimates;
        int with_ci = 0;
        int covered = 0;
        double length = 0.0;
        for (const auto& rec : records) {
            if (!(key_of(key.method, rec.contamination) == key)) continue;
            const auto it = rec.methods.find(key.method);
            if (it == rec.methods.end()) continue;
            const MethodRecord& m = it->second;
            estimates.push_back(m.estimate);
            if (m.ci_low && m.ci_high) {
                ++with_ci;
                if (*m.ci_low <= theta0 && theta0 <= *m.ci_high) ++covered;
                length += *m.ci_high - *m.ci_low;
            }
        }
        if (estimates.empty()) throw ConfigError("empty summary cell");
        SummaryRow row;
        row.method = key.method;
        row.k = key.k;
        row.shift = key.shift;
        row.bias = mean(estimates) - theta0;
        row.sd = sample_sd(estimates);
        row.single_record = estimates.size() == 1;
        row.coverage = with_ci > 0 ? static_cast<double>(covered) / with_ci : nan;
        row.mean_ci_length = with_ci > 0 ? length / with_ci : nan;
        row.replications = static_cast<int>(estimates.size());
        table.rows.push_back(row);
    }
    return table;
}

void PairedCountData::validate() const {
    if (ids.size() != before.size() || ids.size() != after.size()) {
        throw ConfigError("paired count columns must have equal lengths");
    }
    if (ids.empty()) throw ConfigError("paired count data are empty");
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (before[i] <= 0) throw ConfigError("subject " + ids[i] + ": before count must be positive");
        if (after[i] < 0) throw ConfigError("subject " + ids[i] + ": after count must be nonnegative");
        if (after[i] >= before[i]) throw ConfigError("subject " + ids[i] + ": after count must be below before count");
    }
}

PairedCountData parasite_table() {
    return {{"1", "2", "3", "4", "5", "6", "7"},
            {2440, 1000, 1900, 1820, 3260, 300, 660},
            {580, 320, 400, 160, 60, 40, 120}};
}

std::vector<double> logodds_ingest(const PairedCountData& pc) {
    pc.validate();
    std::vector<double> out(pc.ids.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        // log(p / (1 - p)) with p = after / before
        out[i] = std::log(static_cast<double>(pc.after[i]) / static_cast<double>(pc.before[i] - pc.after[i]));
    }
    return out;
}

PairedCountData without_subjects(const PairedCountData& pc, std::span<const std::string> ids) {
    PairedCountData out;
    for (std::size_t i = 0; i < pc.ids.size(); ++i) {
        if (std::find(ids.begin(), ids.end(), pc.ids[i]) != ids.end()) continue;
        out.ids.push_back(pc.ids[i]);
        out.before.push_back(pc.before[i]);
        out.after.push_back(pc.after[i]);
    }
    return out;
}

}  // namespace hellbayes
