#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "driftmon/errors.hpp"
#include "driftmon/rbm.hpp"

namespace driftmon {

// Binary snapshot: magic, version, layer sizes, then row-major w, u, a, b, c
// as little-endian doubles. Round-trips bit-exactly.
inline void save_parameters_binary(std::ostream& os, const RbmParameters& p) {
    const char magic[4] = {'R', 'B', 'M', '1'};
    os.write(magic, 4);
    const std::int32_t dims[3] = {p.visible, p.hidden, p.classes};
    os.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    auto write_block = [&os](const std::vector<double>& xs) {
        os.write(reinterpret_cast<const char*>(xs.data()),
                 static_cast<std::streamsize>(xs.size() * sizeof(double)));
    };
    write_block(p.w);
    write_block(p.u);
    write_block(p.a);
    write_block(p.b);
    write_block(p.c);
}

inline RbmParameters load_parameters_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RBM1", 4) != 0) {
        throw ConfigError("not a parameter snapshot (bad magic)");
    }
    std::int32_t dims[3];
    is.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!is || dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
        throw ConfigError("parameter snapshot has invalid dimensions");
    }
    RbmParameters p = RbmParameters::zeros(dims[0], dims[1], dims[2]);
    auto read_block = [&is](std::vector<double>& xs) {
        is.read(reinterpret_cast<char*>(xs.data()),
                static_cast<std::streamsize>(xs.size() * sizeof(double)));
    };
    read_block(p.w);
    read_block(p.u);
    read_block(p.a);
    read_block(p.b);
    read_block(p.c);
    if (!is) throw ConfigError("parameter snapshot truncated");
    return p;
}

inline nlohmann::json parameters_to_json(const RbmParameters& p) {
    return nlohmann::json{{"visible", p.visible}, {"hidden", p.hidden}, {"classes", p.classes},
                          {"w", p.w},             {"u", p.u},           {"a", p.a},
                          {"b", p.b},             {"c", p.c}};
}

inline RbmParameters parameters_from_json(const nlohmann::json& j) {
    RbmParameters p = RbmParameters::zeros(j.at("visible").get<int>(), j.at("hidden").get<int>(),
                                           j.at("classes").get<int>());
    p.w = j.at("w").get<std::vector<double>>();
    p.u = j.at("u").get<std::vector<double>>();
    p.a = j.at("a").get<std::vector<double>>();
    p.b = j.at("b").get<std::vector<double>>();
    p.c = j.at("c").get<std::vector<double>>();
    const bool sized = p.w.size() == static_cast<std::size_t>(p.visible) * p.hidden &&
                       p.u.size() == static_cast<std::size_t>(p.hidden) * p.classes &&
                       p.a.size() == static_cast<std::size_t>(p.visible) &&
                       p.b.size() == static_cast<std::size_t>(p.hidden) &&
                       p.c.size() == static_cast<std::size_t>(p.classes);
    if (!sized) throw ConfigError("parameter JSON blocks do not match dimensions");
    return p;
}

}  // namespace driftmon
