#pragma once

#include "polariton/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace polariton::cli {

inline constexpr int kSchemaVersion = 1;

struct Config {
    std::filesystem::path source;  // the config file itself
    nlohmann::json doc;

    // Paths inside the config resolve relative to its directory.
    std::filesystem::path resolve(const std::string& relative) const;
    const nlohmann::json& section(const std::string& name) const;
    bool has_section(const std::string& name) const;
};

Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text, const std::filesystem::path& source = {});

// cavity {omega_c_thz} | {slot_length_um, eps_sub[, eps_air]}; phonons
// [{label, omega_thz, nu_thz}]; temperature_K (default 300).
HybridSystem system_from_json(const nlohmann::json& doc);

// Either an explicit list or {start, stop, count[, spacing: "linear"|"log"]}.
std::vector<double> grid_from_json(const nlohmann::json& node, const std::string& what);

double number_or(const nlohmann::json& node, const std::string& key, double fallback);

}  // namespace polariton::cli
