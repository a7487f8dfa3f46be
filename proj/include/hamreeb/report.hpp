#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace hamreeb {

using Json = nlohmann::ordered_json;

/// One verification entry: residual against tolerance.
struct CheckResult {
    std::string name;
    int samples = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;

    static CheckResult of(std::string name, double residual, double tol, int samples = 0) {
        CheckResult c;
        c.name = std::move(name);
        c.max_residual = residual;
        c.tolerance = tol;
        c.samples = samples;
        c.passed = residual <= tol;
        return c;
    }

    static CheckResult flag(std::string name, bool ok, int samples = 0) {
        CheckResult c;
        c.name = std::move(name);
        c.samples = samples;
        c.max_residual = ok ? 0.0 : 1.0;
        c.tolerance = 0.5;
        c.passed = ok;
        return c;
    }
};

inline Json to_json(const CheckResult& c) {
    return Json{{"check", c.name},
                {"samples", c.samples},
                {"max_residual", c.max_residual},
                {"tolerance", c.tolerance},
                {"passed", c.passed}};
}

inline bool all_passed(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

inline Json checks_to_json(const std::vector<CheckResult>& checks) {
    Json arr = Json::array();
    for (const auto& c : checks) arr.push_back(to_json(c));
    return arr;
}

}  // namespace hamreeb
