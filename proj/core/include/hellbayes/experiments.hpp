#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hellbayes/dp_mixture.hpp"
#include "hellbayes/hierarchical.hpp"

namespace hellbayes {

enum class Direction { Down, Up };

/// Shifts the last k observations by `shift` (downwards by default).
struct ContaminationSpec {
    int k = 1;
    double shift = 10.0;
    Direction direction = Direction::Down;
};

/// Method tags: conjugate, hellinger, t1, t2, t3, mhde.
enum class SimMethod { Conjugate, Hellinger, Theta1, Theta2, Theta3, Mhde };

std::string_view to_string(SimMethod m) noexcept;
SimMethod parse_sim_method(std::string_view tag);

struct SimulationConfig {
    int n = 20;
    double theta0 = 5.0;
    double sigma0 = 1.0;
    int replications = 200;
    std::vector<SimMethod> methods{SimMethod::Conjugate, SimMethod::Hellinger};
    /// Contamination cells to run; an empty list runs clean data only.
    std::vector<ContaminationSpec> contamination;
    /// Also run the uncontaminated cell when contamination cells are present.
    bool include_clean = false;
    std::uint64_t master_seed = 0;

    PriorSpec prior{};  // N(0, 25)
    DpPriorConfig dp{};
    McmcConfig dp_mcmc{};
    MetropolisConfig chain{};
    GridOptions grid{};
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
    /// 1000 replications and 2,000,000-step chains.
    void apply_paper_scale();
};

struct MethodRecord {
    double estimate = 0.0;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
};

struct ReplicationRecord {
    int index = 0;
    std::optional<ContaminationSpec> contamination;
    std::map<SimMethod, MethodRecord> methods;
};

struct SummaryRow {
    SimMethod method = SimMethod::Conjugate;
    int k = 0;
    double shift = 0.0;
    double bias = 0.0;
    double sd = 0.0;
    /// NaN when the method reports no interval.
    double coverage = 0.0;
    double mean_ci_length = 0.0;
    int replications = 0;
    /// Set when sd was reported as 0 for a single record.
    bool single_record = false;
};

struct SummaryTable {
    std::vector<SummaryRow> rows;

    const SummaryRow* find(SimMethod method, int k, double shift) const;
    /// Columns: method, k, shift, bias, sd, coverage, length, reps.
    std::string to_tsv() const;
};

/// n i.i.d. N(theta0, sigma0^2) draws, deterministic per seed.
std::vector<double> simulate_dataset(int n, double theta0, double sigma0, std::uint64_t seed);

/// Throws ConfigError unless 1 <= k < data.size().
std::vector<double> contaminate(std::span<const double> data, const ContaminationSpec& spec);

/// Runs every configured method on dataset `replication_index` with the
/// given contamination cell. The dataset seed depends only on the master seed
/// and the index, so every cell contaminates the same clean data.
ReplicationRecord run_replication(const SimulationConfig& config, int replication_index,
                                  const std::optional<ContaminationSpec>& contamination = std::nullopt);

/// All cells and replications, parallel over replications, gathered by index.
std::vector<ReplicationRecord> run_simulation(const SimulationConfig& config);

/// Rows ordered by method, then cell order of first appearance.
SummaryTable summarize(std::span<const ReplicationRecord> records, double theta0);

struct PairedCountData {
    std::vector<std::string> ids;
    std::vector<long> before;
    std::vector<long> after;

    void validate() const;
};

/// Horse fecal egg counts before and after treatment (seven horses, one farm).
PairedCountData parasite_table();

/// Per subject log(p / (1 - p)) with p = after / before.
std::vector<double> logodds_ingest(const PairedCountData& pc);

/// Subject ids whose records are dropped from a copy of the data.
PairedCountData without_subjects(const PairedCountData& pc, std::span<const std::string> ids);

}  // namespace hellbayes
