#include "maxreg/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "maxreg/error.hpp"

namespace maxreg {

nlohmann::json jnum(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

Report::Report(const std::string& subcommand, const RunConfig& cfg) {
    body_["schema"] = kReportSchema;
    body_["subcommand"] = subcommand;
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [sec, kv] : cfg.sections())
        for (const auto& [k, v] : kv) c[sec][k] = v;
    body_["config"] = c;
    body_["stages"] = nlohmann::json::object();
}

namespace {

std::optional<std::string> find_nan(const nlohmann::json& j, const std::string& path) {
    if (j.is_number_float() && std::isnan(j.get<double>())) return path.empty() ? "/" : path;
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            if (auto p = find_nan(it.value(), path + "/" + it.key())) return p;
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            if (auto p = find_nan(j[i], path + "/" + std::to_string(i))) return p;
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> Report::first_nan() const { return find_nan(body_, ""); }

void Report::write(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / "report.json").string();
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write '" + path + "'");
    f << body_.dump(2) << "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ValidationError("cannot write '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i) std::fprintf(f, i ? ",%s" : "%s", header[i].c_str());
    std::fputc('\n', f);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) std::fprintf(f, i ? ",%.17g" : "%.17g", row[i]);
        std::fputc('\n', f);
    }
    std::fclose(f);
}

}  // namespace maxreg
