#include "maxreg/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "maxreg/error.hpp"

namespace maxreg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_num(const std::string& v, const std::string& where) {
    double d = 0.0;
    const char* b = v.data();
    const char* e = b + v.size();
    auto [p, ec] = std::from_chars(b, e, d);
    if (ec != std::errc() || p != e) throw ValidationError(where + ": '" + v + "' is not a number");
    return d;
}

}  // namespace

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.data_ = {
        {"run", {{"seed", "1"}, {"threads", "0"}}},
        {"grid", {{"T", "1"}, {"m", "200"}, {"n", "49"}}},
        {"solve",
         {{"space", "interval"},       // interval | scalar
          {"generator", "lipschitz"},  // constant | lipschitz | autonomous | weierstrass | expression
          {"alpha", "0.7"},
          {"K", "8"},
          {"c", "1"},
          {"expression", "2 + t*sin(pi*x)"},
          {"delta", "1"},
          {"coefficient_csv", ""},
          {"route", "midpoint"},  // integral | midpoint | backward_euler
          {"rule", "exponential_linear"},
          {"theta", "0.5"},
          {"p", "2"},
          {"u0", "0"},             // expression in x (interval) or a number (scalar)
          {"forcing", "sin(pi*x)"}}},  // expression in t, x
        {"diagnose",
         {{"alpha", "0.7"}, {"p", "2"}, {"theta", "0.5"}, {"sector_angle", "0.7853981633974483"},
          {"kato_samples", "32"}, {"vmo_radii", "[0.05, 0.1, 0.2, 0.4]"}}},
        {"sweep",
         {{"alphas", "[1.0, 0.3]"}, {"generator", "auto"}, {"levels", "3"}, {"K0", "4"}, {"m0", "256"},
          {"n0", "32"}, {"p", "2"}, {"theta", "0.5"}}},
        {"plan", {{"theta", "1/2"}, {"p", "2"}, {"alpha", "3/5"}, {"q", ""}}},
        {"qlp",
         {{"u_star", "t*x*(1-x)"}, {"a", "1 + u^2/(1+u^2)"}, {"a_lo", "1"}, {"a_hi", "2"}, {"beta", "1"},
          {"q", "2"}, {"m", "100"}, {"n", "31"}, {"tol", "1e-10"}, {"max_iter", "50"}, {"damping", "1"},
          {"threshold_scales", "[]"}}},
        {"counterexample",
         {{"d", "2"}, {"eps", "1e-10"}, {"ratio", "0.9"}, {"nodes", "400"}, {"sub", "4"},
          {"qs", "[3, 2.5, 2.2, 2.05]"}, {"cutoffs", "[1e-4, 1e-6, 1e-8, 1e-10, 1e-12]"},
          {"eps_list", "[1e-4, 1e-6, 1e-8]"}, {"sin_samples", "10000"}}},
    };
    return c;
}

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
    RunConfig c;
    std::istringstream in(text);
    std::string line, section;
    for (int ln = 1; std::getline(in, line); ++ln) {
        const std::string where = origin + ":" + std::to_string(ln);
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ValidationError(where + ": empty section name");
            c.data_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
        if (section.empty()) throw ValidationError(where + ": key outside of a section");
        const std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
        if (key.empty()) throw ValidationError(where + ": empty key");
        if (c.data_[section].count(key)) throw ValidationError(where + ": duplicate key '" + key + "'");
        c.data_[section][key] = val;
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

void RunConfig::merge(const RunConfig& other) {
    for (const auto& [sec, kv] : other.data_)
        for (const auto& [k, v] : kv) set(sec, k, v);
    for (const auto& [sec, kv] : other.data_)
        if (kv.empty() && !data_.count(sec)) throw ValidationError("unknown config section [" + sec + "]");
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    auto s = data_.find(section);
    if (s == data_.end()) throw ValidationError("unknown config section [" + section + "]");
    auto k = s->second.find(key);
    if (k == s->second.end()) throw ValidationError("unknown key '" + key + "' in section [" + section + "]");
    k->second = value;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    return s != data_.end() && s->second.count(key);
}

const std::string& RunConfig::raw(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    if (s == data_.end()) throw ValidationError("missing config section [" + section + "]");
    auto k = s->second.find(key);
    if (k == s->second.end()) throw ValidationError("missing key '" + key + "' in [" + section + "]");
    return k->second;
}

std::string RunConfig::str(const std::string& section, const std::string& key) const { return raw(section, key); }

double RunConfig::num(const std::string& section, const std::string& key) const {
    return to_num(raw(section, key), "[" + section + "] " + key);
}

long RunConfig::integer(const std::string& section, const std::string& key) const {
    const std::string& v = raw(section, key);
    long x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ValidationError("[" + section + "] " + key + ": '" + v + "' is not an integer");
    return x;
}

std::size_t RunConfig::count(const std::string& section, const std::string& key) const {
    const long x = integer(section, key);
    if (x < 0) throw ValidationError("[" + section + "] " + key + " must be nonnegative");
    return std::size_t(x);
}

bool RunConfig::flag(const std::string& section, const std::string& key) const {
    const std::string& v = raw(section, key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError("[" + section + "] " + key + ": expected true or false");
}

Rational RunConfig::rational(const std::string& section, const std::string& key) const {
    return parse_rational(raw(section, key));
}

std::vector<double> RunConfig::list(const std::string& section, const std::string& key) const {
    std::string v = trim(raw(section, key));
    const std::string where = "[" + section + "] " + key;
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') throw ValidationError(where + ": expected [a, b, ...]");
    v = v.substr(1, v.size() - 2);
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_num(trim(item), where));
    return out;
}

std::string RunConfig::to_text() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [sec, kv] : data_) {
        if (!first) os << "\n";
        first = false;
        os << "[" << sec << "]\n";
        for (const auto& [k, v] : kv) os << k << " = \"" << v << "\"\n";
    }
    return os.str();
}

}  // namespace maxreg
