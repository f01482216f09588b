#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "malign/common.hpp"

namespace malign {

// Config subset of TOML: [table] and [[array-of-table]] headers (dotted
// names allowed), key = value pairs with string, integer, float and boolean
// values, '#' comments. No inline tables, arrays or multi-line strings.

struct TomlValue {
    enum class Kind { string, integer, real, boolean };
    Kind kind = Kind::string;
    std::string s;
    int64_t i = 0;
    double d = 0.0;
    bool b = false;
};

struct TomlTable {
    std::map<std::string, TomlValue> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }

    // Typed getters; the no-default forms throw when the key is missing.
    // Integers promote to double where a float is requested.
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    int64_t get_int(const std::string& key) const;
    int64_t get_int(const std::string& key, int64_t def) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double def) const;
    bool get_bool(const std::string& key, bool def) const;
};

struct TomlDoc {
    std::map<std::string, TomlTable> tables;  // root table under ""
    std::map<std::string, std::vector<TomlTable>> table_arrays;

    const TomlTable& table(const std::string& name) const;  // empty table if absent
    // Direct child names under a dotted prefix, sorted: prefix "family"
    // lists "family.x" as "x" but skips "family.x.y".
    std::vector<std::string> children(const std::string& prefix) const;
};

TomlDoc parse_toml(const std::string& text, const std::string& filename = "<toml>");
TomlDoc read_toml_file(const std::string& path);

}  // namespace malign
