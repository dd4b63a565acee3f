#include "spme/report.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace spme {

void RunReport::validate() const {
    for (const auto& st : stages) {
        if (!std::isfinite(st.seconds)) {
            throw std::runtime_error("report: non-finite timing for stage '" + st.name + "'");
        }
    }
    for (const auto& [key, value] : metrics) {
        if (!std::isfinite(value)) {
            throw std::runtime_error("report: non-finite metric '" + key + "'");
        }
    }
}

std::string RunReport::to_json(int indent) const {
    validate();
    nlohmann::json j;
    j["command"] = command;
    j["config"] = nlohmann::json::array();
    for (const auto& [key, value] : config) {
        j["config"].push_back({{"key", key}, {"value", value}});
    }
    j["stages"] = nlohmann::json::array();
    for (const auto& st : stages) {
        j["stages"].push_back({{"name", st.name}, {"seconds", st.seconds}});
    }
    j["metrics"] = metrics;
    j["lines"] = lines;
    return j.dump(indent);
}

RunReport report_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    RunReport r;
    r.command = j.at("command").get<std::string>();
    for (const auto& item : j.at("config")) {
        r.config.emplace_back(item.at("key").get<std::string>(),
                              item.at("value").get<std::string>());
    }
    for (const auto& item : j.at("stages")) {
        r.stages.push_back({item.at("name").get<std::string>(),
                            item.at("seconds").get<double>()});
    }
    r.metrics = j.at("metrics").get<std::map<std::string, double>>();
    r.lines = j.at("lines").get<std::vector<std::string>>();
    r.validate();
    return r;
}

} // namespace spme
