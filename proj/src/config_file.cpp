#include "mdlnn/config_file.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace mdlnn {

namespace {

EncodingConfig parse_activations(const std::string& list, bool extension) {
    EncodingConfig cfg;
    cfg.extension = extension;
    std::istringstream is(list);
    std::string name;
    while (std::getline(is, name, ',')) {
        auto a = activation_from_name(name);
        if (!a) throw ConfigError("config: unknown activation \"" + name + "\"");
        cfg.enabled.push_back(*a);
    }
    std::sort(cfg.enabled.begin(), cfg.enabled.end());
    cfg.enabled.erase(std::unique(cfg.enabled.begin(), cfg.enabled.end()), cfg.enabled.end());
    if (extension && !cfg.allows(Activation::Modulo3)) cfg.enabled.push_back(Activation::Modulo3);
    cfg.check();
    return cfg;
}

}  // namespace

IslandConfig load_island_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key or value");
        if (kv.count(key)) throw ConfigError(path + ": duplicate key \"" + key + "\"");
        kv[key] = value;
    }

    IslandConfig cfg;
    cfg.ga = GAConfig{};
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto require_u64 = [&](const std::string& key) {
        auto v = take(key);
        if (!v) throw ConfigError(path + ": missing required key \"" + key + "\"");
        try {
            return std::stoull(*v);
        } catch (const std::exception&) {
            throw ConfigError(path + ": key \"" + key + "\" is not an integer: " + *v);
        }
    };
    auto optional_u64 = [&](const std::string& key, uint64_t fallback) -> uint64_t {
        auto v = take(key);
        if (!v) return fallback;
        try {
            return std::stoull(*v);
        } catch (const std::exception&) {
            throw ConfigError(path + ": key \"" + key + "\" is not an integer: " + *v);
        }
    };
    auto optional_double = [&](const std::string& key, double fallback) {
        auto v = take(key);
        if (!v) return fallback;
        try {
            return std::stod(*v);
        } catch (const std::exception&) {
            throw ConfigError(path + ": key \"" + key + "\" is not a number: " + *v);
        }
    };

    cfg.islands = static_cast<uint32_t>(require_u64("islands"));
    cfg.ga.population_size = static_cast<uint32_t>(require_u64("population"));
    cfg.ga.generations = static_cast<uint32_t>(require_u64("generations"));
    cfg.ga.tournament_size = static_cast<uint32_t>(require_u64("tournament"));
    cfg.migration_size = static_cast<uint32_t>(require_u64("migration_size"));
    cfg.migration_generations = static_cast<uint32_t>(require_u64("migration_generations"));
    cfg.base_seed = require_u64("seed");

    cfg.migration_minutes = optional_double("migration_minutes", 0.0);
    const bool extension = optional_u64("extension", 0) != 0;
    if (auto acts = take("activations")) {
        cfg.ga.enc = parse_activations(*acts, extension);
    } else {
        cfg.ga.enc = extension ? EncodingConfig::extended() : EncodingConfig::base_six();
    }
    cfg.ga.numerator_max = static_cast<uint32_t>(optional_u64("numerator_max", cfg.ga.numerator_max));
    cfg.ga.denominator_max =
        static_cast<uint32_t>(optional_u64("denominator_max", cfg.ga.denominator_max));
    cfg.ga.init_numerator_max =
        static_cast<uint32_t>(optional_u64("init_numerator_max", cfg.ga.init_numerator_max));
    cfg.ga.init_denominator_max =
        static_cast<uint32_t>(optional_u64("init_denominator_max", cfg.ga.init_denominator_max));
    cfg.ga.init_connect_prob = optional_double("init_connect_prob", cfg.ga.init_connect_prob);
    for (int op = 0; op < kMutationOpCount; ++op) {
        const std::string key = std::string("weight_") + mutation_op_name(static_cast<MutationOp>(op));
        cfg.ga.mutation_weights[op] =
            static_cast<uint32_t>(optional_u64(key, cfg.ga.mutation_weights[op]));
    }
    cfg.workers = static_cast<int>(optional_u64("workers", 0));

    if (!kv.empty()) {
        std::ostringstream os;
        os << path << ": unknown config key";
        if (kv.size() > 1) os << "s";
        for (const auto& [k, v] : kv) os << " \"" << k << "\"";
        throw ConfigError(os.str());
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return cfg;
}

std::string island_config_to_text(const IslandConfig& cfg) {
    std::ostringstream os;
    os << "islands = " << cfg.islands << "\n";
    os << "population = " << cfg.ga.population_size << "\n";
    os << "generations = " << cfg.ga.generations << "\n";
    os << "tournament = " << cfg.ga.tournament_size << "\n";
    os << "migration_size = " << cfg.migration_size << "\n";
    os << "migration_generations = " << cfg.migration_generations << "\n";
    os << "seed = " << cfg.base_seed << "\n";
    if (cfg.migration_minutes > 0.0) os << "migration_minutes = " << cfg.migration_minutes << "\n";
    if (cfg.ga.enc.extension) os << "extension = 1\n";
    return os.str();
}

}  // namespace mdlnn
