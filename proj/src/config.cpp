#include "upcl/config.hpp"

#include <cctype>
#include <cerrno>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "upcl/errors.hpp"

namespace upcl {

namespace {

std::string trim(const std::string& text) {
    std::size_t begin = 0, end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

std::vector<std::string> split_ws(const std::string& text) {
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string word;
    while (in >> word) parts.push_back(word);
    return parts;
}

double parse_double(const std::string& text, const std::string& context) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw ConfigError(context + ": not a number: '" + text + "'");
    return value;
}

long long parse_ll(const std::string& text, const std::string& context) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    long long value = std::strtoll(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw ConfigError(context + ": not an integer: '" + text + "'");
    return value;
}

} // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& name) {
    ConfigFile cfg;
    cfg.name_ = name;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string stripped = trim(raw);
        if (stripped.empty() || stripped.front() == '#' || stripped.front() == ';') continue;
        std::string where = name + ":" + std::to_string(line_no);
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError(where + ": malformed section header: " + stripped);
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            if (cfg.sections_.count(section))
                throw ConfigError(where + ": duplicate section [" + section + "]");
            cfg.sections_[section];
            continue;
        }
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key = value, got: " + stripped);
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        for (const Entry& existing : cfg.sections_[section])
            if (existing.key == key)
                throw ConfigError(where + ": duplicate key '" + key + "' in [" + section + "]");
        cfg.sections_[section].push_back(Entry{key, value, line_no});
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
}

bool ConfigFile::has_section(const std::string& section) const {
    return sections_.count(section) > 0;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

const std::vector<ConfigFile::Entry>& ConfigFile::entries(const std::string& section) const {
    static const std::vector<Entry> empty;
    auto it = sections_.find(section);
    return it == sections_.end() ? empty : it->second;
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section,
                                          const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return nullptr;
    for (const Entry& entry : it->second)
        if (entry.key == key) return &entry;
    return nullptr;
}

const ConfigFile::Entry& ConfigFile::require(const std::string& section,
                                             const std::string& key) const {
    const Entry* entry = find(section, key);
    if (!entry)
        throw ConfigError(name_ + ": missing key '" + key + "' in section [" + section + "]");
    return *entry;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
    return require(section, key).value;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    const Entry* entry = find(section, key);
    return entry ? entry->value : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    const Entry& entry = require(section, key);
    return parse_double(entry.value, name_ + ":" + std::to_string(entry.line));
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const Entry& entry = require(section, key);
    long long value = parse_ll(entry.value, name_ + ":" + std::to_string(entry.line));
    if (value < INT_MIN || value > INT_MAX)
        throw ConfigError(name_ + ":" + std::to_string(entry.line) + ": integer out of range");
    return static_cast<int>(value);
}

int ConfigFile::get_int(const std::string& section, const std::string& key,
                        int fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
    const Entry* entry = find(section, key);
    if (!entry) return fallback;
    const std::string& text = entry->value;
    std::string where = name_ + ":" + std::to_string(entry->line);
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    unsigned long long value = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE || text.find('-') != std::string::npos)
        throw ConfigError(where + ": not an unsigned integer: '" + text + "'");
    return static_cast<std::uint64_t>(value);
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
    const Entry* entry = find(section, key);
    if (!entry) return fallback;
    if (entry->value == "true" || entry->value == "1") return true;
    if (entry->value == "false" || entry->value == "0") return false;
    throw ConfigError(name_ + ":" + std::to_string(entry->line) +
                      ": expected true/false, got '" + entry->value + "'");
}

std::vector<double> ConfigFile::get_double_list(const std::string& section,
                                                const std::string& key) const {
    const Entry& entry = require(section, key);
    std::string where = name_ + ":" + std::to_string(entry.line);
    std::vector<std::string> parts = split_ws(entry.value);
    if (parts.empty()) throw ConfigError(where + ": empty list for key '" + key + "'");
    std::vector<double> values;
    values.reserve(parts.size());
    for (const std::string& part : parts) values.push_back(parse_double(part, where));
    return values;
}

std::vector<double> ConfigFile::get_double_list(const std::string& section,
                                                const std::string& key,
                                                const std::vector<double>& fallback) const {
    return has(section, key) ? get_double_list(section, key) : fallback;
}

std::vector<int> ConfigFile::get_int_list(const std::string& section, const std::string& key,
                                          const std::vector<int>& fallback) const {
    const Entry* entry = find(section, key);
    if (!entry) return fallback;
    std::string where = name_ + ":" + std::to_string(entry->line);
    std::vector<std::string> parts = split_ws(entry->value);
    if (parts.empty()) throw ConfigError(where + ": empty list for key '" + key + "'");
    std::vector<int> values;
    values.reserve(parts.size());
    for (const std::string& part : parts) {
        long long v = parse_ll(part, where);
        if (v < INT_MIN || v > INT_MAX) throw ConfigError(where + ": integer out of range");
        values.push_back(static_cast<int>(v));
    }
    return values;
}

void ConfigFile::require_known_keys(const std::string& section,
                                    const std::vector<std::string>& allowed) const {
    for (const Entry& entry : entries(section)) {
        bool known = false;
        for (const std::string& key : allowed)
            if (entry.key == key) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError(name_ + ":" + std::to_string(entry.line) + ": unknown key '" +
                              entry.key + "' in section [" + section + "]");
    }
}

Domain load_domain(const ConfigFile& cfg) {
    std::vector<double> lower = cfg.get_double_list("domain", "lower");
    std::vector<double> upper = cfg.get_double_list("domain", "upper");
    cfg.require_known_keys("domain", {"lower", "upper"});
    if (lower.size() != upper.size())
        throw ConfigError(cfg.name() + ": [domain] lower and upper lengths differ");
    Eigen::VectorXd lo(static_cast<Eigen::Index>(lower.size()));
    Eigen::VectorXd hi(static_cast<Eigen::Index>(upper.size()));
    for (std::size_t i = 0; i < lower.size(); ++i) {
        lo[static_cast<Eigen::Index>(i)] = lower[i];
        hi[static_cast<Eigen::Index>(i)] = upper[i];
    }
    return Domain(lo, hi);
}

ProductKernel load_kernel(const ConfigFile& cfg, const Domain& domain) {
    cfg.require_known_keys("kernel", {"family", "nu", "theta", "a0_d_omega", "variance"});
    Family family = family_from_name(cfg.get_string("kernel", "family"));
    double variance = cfg.get_double("kernel", "variance", 1.0);
    if (!(variance > 0.0)) throw ConfigError(cfg.name() + ": [kernel] variance must be > 0");
    int p = domain.dim();

    std::vector<double> nus = cfg.get_double_list("kernel", "nu", {1.5});
    if (nus.size() == 1) nus.assign(static_cast<std::size_t>(p), nus[0]);
    if (nus.size() != static_cast<std::size_t>(p))
        throw ConfigError(cfg.name() + ": [kernel] nu list length must be 1 or the dimension");

    bool has_theta = cfg.has("kernel", "theta");
    bool has_moment = cfg.has("kernel", "a0_d_omega");
    if (has_theta == has_moment)
        throw ConfigError(cfg.name() +
                          ": [kernel] requires exactly one of theta or a0_d_omega");

    std::vector<double> thetas;
    if (has_theta) {
        thetas = cfg.get_double_list("kernel", "theta");
        if (thetas.size() == 1) thetas.assign(static_cast<std::size_t>(p), thetas[0]);
        if (thetas.size() != static_cast<std::size_t>(p))
            throw ConfigError(cfg.name() +
                              ": [kernel] theta list length must be 1 or the dimension");
    } else {
        for (std::size_t i = 1; i < nus.size(); ++i)
            if (nus[i] != nus[0])
                throw ConfigError(cfg.name() +
                                  ": [kernel] a0_d_omega requires a single nu value");
        double target = cfg.get_double("kernel", "a0_d_omega");
        double theta = theta_for_target(family, nus[0], target, domain);
        thetas.assign(static_cast<std::size_t>(p), theta);
    }

    ProductKernel kernel;
    kernel.variance = variance;
    for (int d = 0; d < p; ++d)
        kernel.components.push_back(
            Kernel1d{family, thetas[static_cast<std::size_t>(d)],
                     nus[static_cast<std::size_t>(d)]});
    kernel.validate();
    return kernel;
}

} // namespace upcl
