#ifndef UPCL_CONFIG_HPP
#define UPCL_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "upcl/kernels.hpp"

namespace upcl {

// Flat INI-style configuration: [section] headers, key = value lines,
// '#'/';' comments.  All lookups report missing or malformed values as
// ConfigError with file and line context.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text,
                                   const std::string& name = "<config>");

    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;
    const std::vector<Entry>& entries(const std::string& section) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    int get_int(const std::string& section, const std::string& key) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const;
    std::vector<double> get_double_list(const std::string& section,
                                        const std::string& key) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                  const std::vector<int>& fallback) const;

    // Rejects keys outside `allowed` so config typos fail loudly.
    void require_known_keys(const std::string& section,
                            const std::vector<std::string>& allowed) const;

    const std::string& name() const { return name_; }

private:
    std::string name_;
    std::map<std::string, std::vector<Entry>> sections_;

    const Entry* find(const std::string& section, const std::string& key) const;
    const Entry& require(const std::string& section, const std::string& key) const;
};

// [domain]: `lower` and `upper` lists of equal length (the dimension).
Domain load_domain(const ConfigFile& cfg);

// [kernel]: family, nu (scalar or per-dimension list), variance, and either
// theta (scalar or list) or a0_d_omega (scalar nu only; theta is derived on
// the given domain).  Exactly one of theta / a0_d_omega must be present.
ProductKernel load_kernel(const ConfigFile& cfg, const Domain& domain);

} // namespace upcl

#endif
