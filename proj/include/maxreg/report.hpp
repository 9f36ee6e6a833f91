#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxreg/config.hpp"

namespace maxreg {

inline constexpr const char* kReportSchema = "maxreg/1";

/// Numbers for the report: infinities become the strings "inf" / "-inf", NaN stays a number
/// so that first_nan() can find it before serialization.
nlohmann::json jnum(double v);

/// report.json body: schema tag, subcommand, resolved config and one object per stage.
class Report {
public:
    Report(const std::string& subcommand, const RunConfig& cfg);

    nlohmann::json& stage(const std::string& name) { return body_["stages"][name]; }
    nlohmann::json& body() { return body_; }
    const nlohmann::json& body() const { return body_; }

    /// JSON pointer of the first NaN, if any.
    std::optional<std::string> first_nan() const;
    void write(const std::string& dir) const;

private:
    nlohmann::json body_;
};

/// CSV with a header row and %.17g numbers; identical inputs give identical bytes.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace maxreg
