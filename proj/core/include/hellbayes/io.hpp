#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hellbayes/density.hpp"
#include "hellbayes/estimators.hpp"
#include "hellbayes/experiments.hpp"
#include "hellbayes/hierarchical.hpp"

namespace hellbayes {

/// One real per nonempty line, optional header "x". Throws ConfigError naming
/// the offending line.
std::vector<double> load_dataset_csv(const std::filesystem::path& path);
std::vector<double> parse_dataset_csv(std::string_view text);

/// Columns id, before, after (header required).
PairedCountData load_paired_counts_csv(const std::filesystem::path& path);
PairedCountData parse_paired_counts_csv(std::string_view text);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// 17 significant digits, shortest exponent form as printf %.17g.
std::string format_real(double x);

/// Serializes reals with format_real so dumps are byte-stable.
std::string dump_json(const nlohmann::json& j);

nlohmann::json to_json(const GaussianMixtureDensity& m);
GaussianMixtureDensity mixture_from_json(const nlohmann::json& j);

/// {"meta": {...}, "draws": [{weights, means, variances}, ...]}
nlohmann::json to_json(const DensityEnsemble& e);
DensityEnsemble ensemble_from_json(const nlohmann::json& j);

/// Two columns node,value with a header.
std::string grid_density_csv(const GridDensity& g);

nlohmann::json to_json(const EstimatorResult& r);
nlohmann::json to_json(const PosteriorSummary& s);

}  // namespace hellbayes
