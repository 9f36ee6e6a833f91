#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "maxreg/exponent_planner.hpp"

namespace maxreg {

/// Sectioned key = value file:
///
///     # comment
///     [solve]
///     generator = lipschitz
///     alphas = [1.0, 0.3]
///
/// Every section and key must appear in the schema; defaults fill the rest.
class RunConfig {
public:
    using Section = std::map<std::string, std::string>;

    /// Schema with defaults for all sections.
    static RunConfig defaults();
    static RunConfig parse(const std::string& text, const std::string& origin = "<config>");
    static RunConfig load(const std::string& path);

    /// Overrides on top of the defaults; unknown sections or keys throw ValidationError.
    void merge(const RunConfig& other);
    void set(const std::string& section, const std::string& key, const std::string& value);

    const std::map<std::string, Section>& sections() const { return data_; }
    bool has(const std::string& section, const std::string& key) const;

    std::string str(const std::string& section, const std::string& key) const;
    double num(const std::string& section, const std::string& key) const;
    long integer(const std::string& section, const std::string& key) const;
    std::size_t count(const std::string& section, const std::string& key) const;  // nonnegative integer
    bool flag(const std::string& section, const std::string& key) const;
    Rational rational(const std::string& section, const std::string& key) const;
    std::vector<double> list(const std::string& section, const std::string& key) const;

    /// Text form that parses back to the same config.
    std::string to_text() const;

    bool operator==(const RunConfig& o) const { return data_ == o.data_; }

private:
    const std::string& raw(const std::string& section, const std::string& key) const;
    std::map<std::string, Section> data_;
};

}  // namespace maxreg
