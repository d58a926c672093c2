#include "polariton/cli/config.hpp"

#include "polariton/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace polariton::cli {

namespace {

double require_number(const nlohmann::json& node, const std::string& key, const std::string& where) {
    if (!node.contains(key)) throw StructureError(where + ": missing '" + key + "'");
    if (!node.at(key).is_number()) throw StructureError(where + ": '" + key + "' must be a number");
    return node.at(key).get<double>();
}

}  // namespace

std::filesystem::path Config::resolve(const std::string& relative) const {
    const std::filesystem::path p(relative);
    if (p.is_absolute() || source.empty()) return p;
    return source.parent_path() / p;
}

bool Config::has_section(const std::string& name) const {
    return doc.contains(name) && doc.at(name).is_object();
}

const nlohmann::json& Config::section(const std::string& name) const {
    if (!has_section(name)) throw StructureError("config has no '" + name + "' section");
    return doc.at(name);
}

Config parse_config(const std::string& text, const std::filesystem::path& source) {
    Config cfg;
    cfg.source = source;
    try {
        cfg.doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw StructureError("config " + source.string() + ": " + e.what());
    }
    if (!cfg.doc.is_object()) throw StructureError("config root must be an object");
    if (!cfg.doc.contains("schema_version") || !cfg.doc.at("schema_version").is_number_integer()) {
        throw StructureError("config needs an integer 'schema_version'");
    }
    const int version = cfg.doc.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
        throw StructureError("unsupported schema_version " + std::to_string(version) + " (expected " +
                             std::to_string(kSchemaVersion) + ")");
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StructureError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

HybridSystem system_from_json(const nlohmann::json& doc) {
    if (!doc.contains("cavity") || !doc.at("cavity").is_object()) throw StructureError("config: missing 'cavity' object");
    const auto& cav = doc.at("cavity");
    CavityMode cavity;
    if (cav.contains("omega_c_thz")) {
        cavity.omega_c = require_number(cav, "omega_c_thz", "cavity");
    } else if (cav.contains("slot_length_um")) {
        SlotGeometry geo{require_number(cav, "slot_length_um", "cavity"), require_number(cav, "eps_sub", "cavity"),
                         number_or(cav, "eps_air", 1.0)};
        cavity.omega_c = cavity_frequency_from_length(geo.slot_length_um, geo.eps_sub, geo.eps_air);
        cavity.geometry = geo;
    } else {
        throw StructureError("cavity needs 'omega_c_thz' or 'slot_length_um' + 'eps_sub'");
    }

    if (!doc.contains("phonons") || !doc.at("phonons").is_array()) throw StructureError("config: missing 'phonons' array");
    std::vector<PhononMode> phonons;
    for (const auto& p : doc.at("phonons")) {
        PhononMode mode;
        mode.label = p.value("label", "TO" + std::to_string(phonons.size() + 1));
        mode.omega = require_number(p, "omega_thz", "phonon '" + mode.label + "'");
        mode.nu = require_number(p, "nu_thz", "phonon '" + mode.label + "'");
        phonons.push_back(std::move(mode));
    }
    return HybridSystem(cavity, std::move(phonons), number_or(doc, "temperature_K", 300.0));
}

std::vector<double> grid_from_json(const nlohmann::json& node, const std::string& what) {
    std::vector<double> out;
    if (node.is_number()) {
        out.push_back(node.get<double>());
    } else if (node.is_array()) {
        for (const auto& v : node) {
            if (!v.is_number()) throw StructureError(what + ": grid entries must be numbers");
            out.push_back(v.get<double>());
        }
    } else if (node.is_object()) {
        const double start = require_number(node, "start", what);
        const double stop = require_number(node, "stop", what);
        if (!node.contains("count") || !node.at("count").is_number_integer()) {
            throw StructureError(what + ": range needs an integer 'count'");
        }
        const int count = node.at("count").get<int>();
        if (count < 1) throw StructureError(what + ": count must be positive");
        const std::string spacing = node.value("spacing", "linear");
        if (spacing != "linear" && spacing != "log") throw StructureError(what + ": spacing must be linear or log");
        if (spacing == "log" && !(start > 0.0 && stop > 0.0)) throw DomainError(what + ": log grid needs positive bounds");
        for (int i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
            out.push_back(spacing == "linear" ? start + t * (stop - start)
                                              : std::exp(std::log(start) + t * (std::log(stop) - std::log(start))));
        }
    } else {
        throw StructureError(what + ": expected a number, a list, or {start, stop, count}");
    }
    if (out.empty()) throw StructureError(what + ": grid is empty");
    return out;
}

double number_or(const nlohmann::json& node, const std::string& key, double fallback) {
    if (!node.contains(key)) return fallback;
    if (!node.at(key).is_number()) throw StructureError("'" + key + "' must be a number");
    return node.at(key).get<double>();
}

}  // namespace polariton::cli
