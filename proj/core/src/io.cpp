#include "hellbayes/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "hellbayes/error.hpp"

namespace hellbayes {

namespace {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto end = nl == std::string_view::npos ? text.size() : nl;
        lines.push_back(text.substr(pos, end - pos));
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        fields.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return fields;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

void write_json(std::ostringstream& out, const nlohmann::json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out << ",\n";
                first = false;
                out << inner << nlohmann::json(key).dump() << ": ";
                write_json(out, value, indent + 1);
            }
            out << '\n' << pad << '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            out << "[\n";
            bool first = true;
            for (const auto& value : j) {
                if (!first) out << ",\n";
                first = false;
                out << inner;
                write_json(out, value, indent + 1);
            }
            out << '\n' << pad << ']';
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double x = j.get<double>();
            out << (std::isfinite(x) ? format_real(x) : std::string("null"));
            return;
        }
        default:
            out << j.dump();
    }
}

std::vector<double> real_array(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw ConfigError(std::string("mixture JSON lacks array '") + key + "'");
    }
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw ConfigError(std::string("non-numeric entry in '") + key + "'");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

std::vector<double> parse_dataset_csv(std::string_view text) {
    std::vector<double> out;
    const auto lines = split_lines(text);
    bool seen_content = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty()) continue;
        if (!seen_content) {
            seen_content = true;
            if (line == "x") continue;
        }
        double x = 0.0;
        if (!parse_number(line, x) || !std::isfinite(x)) {
            throw ConfigError("line " + std::to_string(i + 1) + ": not a finite real: '" + std::string(line) + "'");
        }
        out.push_back(x);
    }
    if (out.empty()) throw ConfigError("dataset is empty");
    return out;
}

std::vector<double> load_dataset_csv(const std::filesystem::path& path) {
    return parse_dataset_csv(read_text(path));
}

PairedCountData parse_paired_counts_csv(std::string_view text) {
    PairedCountData out;
    const auto lines = split_lines(text);
    bool header_seen = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        const std::string where = "line " + std::to_string(i + 1);
        if (!header_seen) {
            if (fields.size() != 3 || fields[0] != "id" || fields[1] != "before" || fields[2] != "after") {
                throw ConfigError(where + ": expected header 'id,before,after'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 3) throw ConfigError(where + ": expected 3 fields");
        long before = 0;
        long after = 0;
        if (!parse_number(fields[1], before) || !parse_number(fields[2], after)) {
            throw ConfigError(where + ": counts must be integers");
        }
        out.ids.emplace_back(fields[0]);
        out.before.push_back(before);
        out.after.push_back(after);
    }
    if (!header_seen) throw ConfigError("paired count file is empty");
    out.validate();
    return out;
}

PairedCountData load_paired_counts_csv(const std::filesystem::path& path) {
    return parse_paired_counts_csv(read_text(path));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw ConfigError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw ConfigError("cannot rename onto " + path.string());
    }
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string dump_json(const nlohmann::json& j) {
    std::ostringstream out;
    write_json(out, j, 0);
    out << '\n';
    return out.str();
}

nlohmann::json to_json(const GaussianMixtureDensity& m) {
    return {{"weights", m.weights()}, {"means", m.means()}, {"variances", m.variances()}};
}

GaussianMixtureDensity mixture_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("mixture JSON must be an object");
    return {real_array(j, "weights"), real_array(j, "means"), real_array(j, "variances")};
}

nlohmann::json to_json(const DensityEnsemble& e) {
    nlohmann::json draws = nlohmann::json::array();
    for (const auto& d : e.draws) draws.push_back(to_json(d));
    return {{"meta",
             {{"seed", e.meta.seed},
              {"iterations", e.meta.iterations},
              {"burn_in", e.meta.burn_in},
              {"thin", e.meta.thin},
              {"source_iterations", e.meta.source_iterations}}},
            {"draws", std::move(draws)}};
}

DensityEnsemble ensemble_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("draws") || !j.at("draws").is_array()) {
        throw ConfigError("ensemble JSON needs a 'draws' array");
    }
    DensityEnsemble e;
    for (const auto& d : j.at("draws")) e.draws.push_back(mixture_from_json(d));
    if (e.draws.empty()) throw ConfigError("ensemble has no draws");
    if (j.contains("meta")) {
        const auto& m = j.at("meta");
        e.meta.seed = m.value("seed", std::uint64_t{0});
        e.meta.iterations = m.value("iterations", 0);
        e.meta.burn_in = m.value("burn_in", 0);
        e.meta.thin = m.value("thin", 1);
        e.meta.source_iterations = m.value("source_iterations", std::vector<int>{});
    }
    return e;
}

std::string grid_density_csv(const GridDensity& g) {
    std::string out = "node,value\n";
    const auto nodes = g.grid().nodes();
    const auto values = g.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += format_real(nodes[i]);
        out += ',';
        out += format_real(values[i]);
        out += '\n';
    }
    return out;
}

nlohmann::json to_json(const EstimatorResult& r) {
    nlohmann::json j{{"method", std::string(to_string(r.method))},
                     {"theta", r.theta.to_vector()},
                     {"objective", r.objective_value},
                     {"ensemble_size", r.ensemble_size}};
    if (r.epsilon) j["epsilon"] = *r.epsilon;
    return j;
}

nlohmann::json to_json(const PosteriorSummary& s) {
    return {{"eap", s.eap.to_vector()},
            {"ci_low", s.ci_low},
            {"ci_high", s.ci_high},
            {"sd", s.sd},
            {"eap_inside_ci", s.eap_inside_ci}};
}

}  // namespace hellbayes
