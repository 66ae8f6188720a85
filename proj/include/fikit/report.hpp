#pragma once

#include <map>
#include <string>
#include <vector>

#include "fikit/common.hpp"

namespace fikit {

enum class CheckStatus { Pass, Fail, Inconclusive };

std::string to_string(CheckStatus s);

/// Outcome of one named inequality or theorem-shadow check.
/// pass ⟺ margin ≥ −tolerance; recomputable from the stored fields.
struct CheckReport {
    std::string name;
    std::map<std::string, double> constants;
    double lhs = 0.0;
    double rhs = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    CheckStatus status = CheckStatus::Fail;
    std::string inputs_digest;
    std::string note;  // optional human-readable context
    std::vector<std::pair<std::string, std::vector<double>>> samples;  // e.g. sampled F(t)

    double margin() const { return rhs - lhs; }

    /// Fills pass/status from lhs, rhs, tolerance.
    void settle() {
        pass = (rhs - lhs) >= -tolerance;
        status = pass ? CheckStatus::Pass : CheckStatus::Fail;
    }

    std::string to_json() const;
    std::string to_markdown_row() const;
    static std::string markdown_header();
    static CheckReport from_json(const std::string& text);
};

}  // namespace fikit
