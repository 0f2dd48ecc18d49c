#include "pollsys/io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"

#include "pollsys/errors.hpp"

namespace pollsys {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw validation_error(where.empty() ? what : where + ": " + what);
}

// Rejects unknown keys and reports missing required keys, both with the
// document location in the message.
void check_fields(const json& obj, const std::string& where,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) {
    if (!obj.is_object())
        fail(where, "expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* f : required) known = known || item.key() == f;
        for (const char* f : optional) known = known || item.key() == f;
        if (!known)
            fail(where, "unknown field \"" + item.key() + "\"");
    }
    for (const char* f : required)
        if (!obj.contains(f))
            fail(where, std::string("missing field \"") + f + "\"");
}

double number_field(const json& obj, const std::string& where,
                    const char* name) {
    const json& value = obj.at(name);
    if (!value.is_number())
        fail(where + "." + name, "expected a number");
    return value.get<double>();
}

DistributionSpec parse_distribution(const json& obj,
                                    const std::string& where) {
    if (!obj.is_object() || !obj.contains("kind") ||
        !obj.at("kind").is_string())
        fail(where, "expected an object with a \"kind\" string");
    const std::string kind = obj.at("kind").get<std::string>();
    try {
        if (kind == "deterministic") {
            check_fields(obj, where, {"kind", "value"}, {});
            return DistributionSpec::deterministic(
                number_field(obj, where, "value"));
        }
        if (kind == "exponential") {
            check_fields(obj, where, {"kind", "mean"}, {});
            return DistributionSpec::exponential(
                number_field(obj, where, "mean"));
        }
        if (kind == "gamma") {
            check_fields(obj, where, {"kind", "shape", "scale"}, {});
            return DistributionSpec::gamma(number_field(obj, where, "shape"),
                                           number_field(obj, where, "scale"));
        }
    } catch (const validation_error& e) {
        // Prefix factory-level messages (nonpositive mean and the like)
        // that do not already carry the location.
        std::string msg = e.what();
        if (msg.rfind(where, 0) == 0)
            throw;
        fail(where, msg);
    }
    fail(where + ".kind", "unknown distribution kind \"" + kind + "\"");
}

StationParams parse_station(const json& obj, int index) {
    const std::string where = "stations[" + std::to_string(index) + "]";
    check_fields(obj, where, {"lambda", "nu", "service", "switchover", "glue"},
                 {"weight"});
    StationParams st;
    st.lambda = number_field(obj, where, "lambda");
    st.nu = number_field(obj, where, "nu");
    st.service = parse_distribution(obj.at("service"), where + ".service");
    st.switchover =
        parse_distribution(obj.at("switchover"), where + ".switchover");
    st.glue = parse_distribution(obj.at("glue"), where + ".glue");
    if (obj.contains("weight"))
        st.weight = number_field(obj, where, "weight");
    return st;
}

json distribution_json(const DistributionSpec& d) {
    switch (d.kind()) {
    case DistKind::deterministic:
        return {{"kind", "deterministic"}, {"value", d.det_value()}};
    case DistKind::exponential:
        return {{"kind", "exponential"}, {"mean", d.exp_mean()}};
    case DistKind::gamma:
        return {{"kind", "gamma"},
                {"shape", d.gamma_shape()},
                {"scale", d.gamma_scale()}};
    }
    throw numerical_error("unhandled distribution kind");
}

} // namespace

SystemConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is the 1-based offset of the failure; convert to a line
        // and column so the message points at the document.
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw validation_error("parse error at line " + std::to_string(line) +
                               ", column " + std::to_string(column) + ": " +
                               e.what());
    }
    check_fields(doc, "config", {"stations"}, {});
    const json& stations = doc.at("stations");
    if (!stations.is_array())
        fail("stations", "expected an array");
    SystemConfig cfg;
    for (std::size_t i = 0; i < stations.size(); ++i)
        cfg.stations.push_back(
            parse_station(stations[i], static_cast<int>(i)));
    validate(cfg);
    return cfg;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw validation_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config(buffer.str());
    } catch (const validation_error& e) {
        throw validation_error(path + ": " + e.what());
    }
}

std::string format_config(const SystemConfig& cfg) {
    json stations = json::array();
    for (const StationParams& st : cfg.stations) {
        stations.push_back({{"lambda", st.lambda},
                            {"nu", st.nu},
                            {"service", distribution_json(st.service)},
                            {"switchover", distribution_json(st.switchover)},
                            {"glue", distribution_json(st.glue)},
                            {"weight", st.weight}});
    }
    json doc = {{"stations", stations}};
    return doc.dump(2) + "\n";
}

void save_config(const SystemConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw validation_error("cannot open output file: " + path);
    out << format_config(cfg);
    out.flush();
    if (!out)
        throw validation_error("failed while writing " + path);
}

} // namespace pollsys
