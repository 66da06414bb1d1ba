#pragma once

// JSON model-spec files. Colors are 1-indexed on disk and in reports,
// 0-indexed inside the library.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "model.hpp"

namespace gwgames {

inline ModelSpec parse_spec_json(const nlohmann::json& doc) {
    try {
        if (!doc.is_object()) throw spec_error("spec document must be a JSON object");
        if (!doc.contains("m")) throw spec_error("spec needs field 'm'");
        int m = doc.at("m").get<int>();
        if (!doc.contains("root_law") || !doc.at("root_law").is_array())
            throw spec_error("spec needs array field 'root_law'");
        std::vector<double> root = doc.at("root_law").get<std::vector<double>>();
        if (!doc.contains("permissible") || !doc.at("permissible").is_array())
            throw spec_error("spec needs array field 'permissible'");
        PermissibleSets perm;
        for (const auto& arr : doc.at("permissible")) {
            if (!arr.is_array()) throw spec_error("permissible entries must be arrays of colors");
            ColorSet s = 0;
            for (const auto& c : arr) {
                int color = c.get<int>();
                if (color < 1 || color > m)
                    throw spec_error("permissible color " + std::to_string(color) +
                                     " out of range 1.." + std::to_string(m));
                s |= ColorSet(1) << (color - 1);
            }
            perm.sets.push_back(s);
        }
        if (!doc.contains("offspring") || !doc.at("offspring").is_array())
            throw spec_error("spec needs array field 'offspring'");
        std::vector<OffspringLaw> laws;
        for (const auto& entry : doc.at("offspring")) {
            if (entry.contains("table")) {
                std::vector<TableEntry> rows;
                for (const auto& row : entry.at("table")) {
                    TableEntry e;
                    e.counts = row.at("counts").get<std::vector<int>>();
                    e.prob = row.at("prob").get<double>();
                    rows.push_back(std::move(e));
                }
                laws.push_back(OffspringLaw::table(m, std::move(rows)));
            } else if (entry.contains("poisson")) {
                laws.push_back(OffspringLaw::poisson(
                    entry.at("poisson").at("means").get<std::vector<double>>()));
            } else {
                throw spec_error("offspring entry needs 'table' or 'poisson'");
            }
        }
        return ModelSpec::create(m, std::move(root), std::move(laws), std::move(perm));
    } catch (const nlohmann::json::exception& e) {
        throw spec_error(std::string("malformed spec: ") + e.what());
    }
}

inline ModelSpec parse_spec(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw spec_error(std::string("spec is not valid JSON: ") + e.what());
    }
    return parse_spec_json(doc);
}

inline ModelSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spec_error("cannot read spec file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

// canonical form: re-parsing the output reproduces the ModelSpec exactly
inline std::string dump_spec(const ModelSpec& spec) {
    nlohmann::ordered_json doc;
    doc["m"] = spec.m;
    doc["root_law"] = spec.root_law;
    auto perm = nlohmann::ordered_json::array();
    for (int j = 0; j < spec.m; ++j) {
        auto arr = nlohmann::ordered_json::array();
        for (int k = 0; k < spec.m; ++k)
            if (set_contains(spec.permissible.sets[j], k)) arr.push_back(k + 1);
        perm.push_back(arr);
    }
    doc["permissible"] = perm;
    auto laws = nlohmann::ordered_json::array();
    for (const auto& law : spec.offspring) {
        nlohmann::ordered_json entry;
        if (law.kind == OffspringLaw::Kind::Table) {
            auto rows = nlohmann::ordered_json::array();
            for (const auto& e : law.entries) {
                nlohmann::ordered_json row;
                row["counts"] = e.counts;
                row["prob"] = e.prob;
                rows.push_back(row);
            }
            entry["table"] = rows;
        } else {
            entry["poisson"] = {{"means", law.means}};
        }
        laws.push_back(entry);
    }
    doc["offspring"] = laws;
    return doc.dump(2) + "\n";
}

}  // namespace gwgames
