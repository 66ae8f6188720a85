#include "fikit/report.hpp"

#include <sstream>

#include "fikit/io.hpp"
#include "json.hpp"

namespace fikit {

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Inconclusive: return "inconclusive";
    }
    return "fail";
}

namespace {

CheckStatus status_from_string(const std::string& s) {
    if (s == "pass") return CheckStatus::Pass;
    if (s == "fail") return CheckStatus::Fail;
    if (s == "inconclusive") return CheckStatus::Inconclusive;
    throw std::invalid_argument("unknown check status: " + s);
}

// Doubles are serialized as shortest round-trip strings so reports are
// byte-stable across platforms with the same binary values.
nlohmann::ordered_json num(double v) { return nlohmann::ordered_json::parse(format_double(v)); }

}  // namespace

std::string CheckReport::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    nlohmann::ordered_json consts = nlohmann::ordered_json::object();
    for (const auto& [k, v] : constants) consts[k] = num(v);
    j["constants"] = consts;
    j["lhs"] = num(lhs);
    j["rhs"] = num(rhs);
    j["margin"] = num(margin());
    j["tolerance"] = num(tolerance);
    j["pass"] = pass;
    j["status"] = to_string(status);
    j["inputs_digest"] = inputs_digest;
    if (!note.empty()) j["note"] = note;
    if (!samples.empty()) {
        nlohmann::ordered_json s = nlohmann::ordered_json::object();
        for (const auto& [k, vals] : samples) {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (double v : vals) arr.push_back(num(v));
            s[k] = arr;
        }
        j["samples"] = s;
    }
    return j.dump(2);
}

CheckReport CheckReport::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    CheckReport r;
    r.name = j.at("name").get<std::string>();
    if (j.contains("constants"))
        for (auto it = j["constants"].begin(); it != j["constants"].end(); ++it)
            r.constants[it.key()] = it.value().get<double>();
    r.lhs = j.at("lhs").get<double>();
    r.rhs = j.at("rhs").get<double>();
    r.tolerance = j.at("tolerance").get<double>();
    r.pass = j.at("pass").get<bool>();
    r.status = status_from_string(j.at("status").get<std::string>());
    r.inputs_digest = j.value("inputs_digest", "");
    r.note = j.value("note", "");
    if (j.contains("samples"))
        for (auto it = j["samples"].begin(); it != j["samples"].end(); ++it)
            r.samples.emplace_back(it.key(), it.value().get<std::vector<double>>());
    return r;
}

std::string CheckReport::markdown_header() {
    return "| check | lhs | rhs | margin | tolerance | status |\n"
           "|---|---|---|---|---|---|";
}

std::string CheckReport::to_markdown_row() const {
    std::ostringstream os;
    os << "| " << name << " | " << format_double(lhs) << " | " << format_double(rhs) << " | "
       << format_double(margin()) << " | " << format_double(tolerance) << " | "
       << to_string(status) << " |";
    return os.str();
}

}  // namespace fikit
