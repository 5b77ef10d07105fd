#include <initializer_list>
#include <string>

#include "hellbayes/error.hpp"
#include "hellbayes_cli/cli.hpp"

namespace hellbayes::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for '") + key + "'");
    }
}

ContaminationSpec contamination_from_json(const json& j) {
    check_keys(j, "contamination entry", {"k", "shift", "direction"});
    ContaminationSpec c;
    read(j, "k", c.k);
    read(j, "shift", c.shift);
    std::string direction = "down";
    read(j, "direction", direction);
    if (direction == "down") {
        c.direction = Direction::Down;
    } else if (direction == "up") {
        c.direction = Direction::Up;
    } else {
        throw ConfigError("direction must be 'down' or 'up'");
    }
    return c;
}

}  // namespace

SimulationConfig simulation_config_from_json(const json& j) {
    check_keys(j, "simulation config",
               {"n", "theta0", "sigma0", "replications", "methods", "contamination", "include_clean", "seed",
                "threads", "prior", "dp", "dp_mcmc", "chain", "grid"});
    SimulationConfig c;
    read(j, "n", c.n);
    read(j, "theta0", c.theta0);
    read(j, "sigma0", c.sigma0);
    read(j, "replications", c.replications);
    read(j, "include_clean", c.include_clean);
    read(j, "seed", c.master_seed);
    read(j, "threads", c.threads);
    if (j.contains("methods")) {
        c.methods.clear();
        for (const auto& m : j.at("methods")) {
            if (!m.is_string()) throw ConfigError("methods must be strings");
            c.methods.push_back(parse_sim_method(m.get<std::string>()));
        }
    }
    if (j.contains("contamination")) {
        if (!j.at("contamination").is_array()) throw ConfigError("contamination must be an array");
        for (const auto& e : j.at("contamination")) c.contamination.push_back(contamination_from_json(e));
    }
    if (j.contains("prior")) {
        const auto& p = j.at("prior");
        check_keys(p, "prior", {"mean", "variance"});
        read(p, "mean", c.prior.location_mean);
        read(p, "variance", c.prior.location_variance);
    }
    if (j.contains("dp")) {
        const auto& d = j.at("dp");
        check_keys(d, "dp", {"mass", "m1", "kappa0_shape", "kappa0_rate", "nu1", "psi1", "truncation"});
        read(d, "mass", c.dp.mass);
        read(d, "m1", c.dp.m1);
        read(d, "kappa0_shape", c.dp.kappa0_shape);
        read(d, "kappa0_rate", c.dp.kappa0_rate);
        read(d, "nu1", c.dp.nu1);
        read(d, "psi1", c.dp.psi1);
        read(d, "truncation", c.dp.truncation);
    }
    if (j.contains("dp_mcmc")) {
        const auto& d = j.at("dp_mcmc");
        check_keys(d, "dp_mcmc", {"iterations", "burn_in", "thin"});
        read(d, "iterations", c.dp_mcmc.iterations);
        read(d, "burn_in", c.dp_mcmc.burn_in);
        read(d, "thin", c.dp_mcmc.thin);
    }
    if (j.contains("chain")) {
        const auto& d = j.at("chain");
        check_keys(d, "chain", {"steps", "burn_in", "thin", "proposal_sd"});
        read(d, "steps", c.chain.steps);
        read(d, "burn_in", c.chain.burn_in);
        read(d, "thin", c.chain.thin);
        if (d.contains("proposal_sd")) {
            double sd = 0.0;
            read(d, "proposal_sd", sd);
            c.chain.proposal_sd = {sd};
        }
    }
    if (j.contains("grid")) {
        const auto& d = j.at("grid");
        check_keys(d, "grid", {"nodes_per_unit", "margin"});
        read(d, "nodes_per_unit", c.grid.nodes_per_unit);
        read(d, "margin", c.grid.margin);
    }
    return c;
}

}  // namespace hellbayes::cli
