// Structured run report: config echo, wall-clock stage timings, numeric
// summaries, and output rows, serializable to JSON and back.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace spme {

struct StageTiming {
    std::string name;
    double seconds = 0.0;
    bool operator==(const StageTiming&) const = default;
};

struct RunReport {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<StageTiming> stages;
    std::map<std::string, double> metrics;
    std::vector<std::string> lines; // table/check rows as printed

    bool operator==(const RunReport&) const = default;
    void validate() const; // throws if any numeric field is non-finite
    std::string to_json(int indent = 2) const;
};

RunReport report_from_json(const std::string& text);

} // namespace spme
