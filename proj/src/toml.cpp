#include "malign/toml.hpp"

#include <cctype>
#include <cstdlib>

namespace malign {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(uint8_t(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(uint8_t(s.back()))) s.remove_suffix(1);
    return s;
}

bool bare_key_char(char c) {
    return std::isalnum(uint8_t(c)) || c == '_' || c == '-';
}

bool valid_table_name(std::string_view name) {
    if (name.empty() || name.front() == '.' || name.back() == '.') return false;
    bool prev_dot = false;
    for (char c : name) {
        if (c == '.') {
            if (prev_dot) return false;
            prev_dot = true;
        } else if (!bare_key_char(c)) {
            return false;
        } else {
            prev_dot = false;
        }
    }
    return true;
}

// Everything after the key's '='. Strings keep '#'; bare values lose their
// trailing comment.
TomlValue parse_value(std::string_view raw, const std::string& file, size_t line) {
    raw = trim(raw);
    if (raw.empty()) throw parse_error("missing value", file, line);

    TomlValue v;
    if (raw.front() == '"') {
        v.kind = TomlValue::Kind::string;
        size_t i = 1;
        for (; i < raw.size() && raw[i] != '"'; ++i) {
            char c = raw[i];
            if (c == '\\') {
                if (++i == raw.size()) break;
                switch (raw[i]) {
                    case '"': c = '"'; break;
                    case '\\': c = '\\'; break;
                    case 'n': c = '\n'; break;
                    case 't': c = '\t'; break;
                    case 'r': c = '\r'; break;
                    default: throw parse_error("unsupported escape in string", file, line);
                }
            }
            v.s += c;
        }
        if (i >= raw.size()) throw parse_error("unterminated string", file, line);
        const auto rest = trim(raw.substr(i + 1));
        if (!rest.empty() && rest.front() != '#') {
            throw parse_error("trailing characters after string value", file, line);
        }
        return v;
    }

    const size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = trim(raw.substr(0, hash));
    if (raw.empty()) throw parse_error("missing value", file, line);

    if (raw == "true" || raw == "false") {
        v.kind = TomlValue::Kind::boolean;
        v.b = (raw == "true");
        return v;
    }

    const std::string text(raw);
    char* end = nullptr;
    if (raw.find_first_of(".eE") != std::string_view::npos &&
        !(raw.size() > 1 && raw[0] == '0' && (raw[1] == 'x' || raw[1] == 'X'))) {
        v.kind = TomlValue::Kind::real;
        v.d = std::strtod(text.c_str(), &end);
    } else {
        v.kind = TomlValue::Kind::integer;
        v.i = std::strtoll(text.c_str(), &end, 10);
    }
    if (end == nullptr || *end != '\0' || end == text.c_str()) {
        throw parse_error("cannot parse value '" + text + "'", file, line);
    }
    return v;
}

const TomlValue& require(const std::map<std::string, TomlValue>& values, const std::string& key) {
    auto it = values.find(key);
    if (it == values.end()) throw error("toml: missing key '" + key + "'");
    return it->second;
}

[[noreturn]] void type_error(const std::string& key, const char* want) {
    throw error("toml: key '" + key + "' is not a " + want);
}

}  // namespace

std::string TomlTable::get_string(const std::string& key) const {
    const auto& v = require(values, key);
    if (v.kind != TomlValue::Kind::string) type_error(key, "string");
    return v.s;
}

std::string TomlTable::get_string(const std::string& key, const std::string& def) const {
    return has(key) ? get_string(key) : def;
}

int64_t TomlTable::get_int(const std::string& key) const {
    const auto& v = require(values, key);
    if (v.kind != TomlValue::Kind::integer) type_error(key, "integer");
    return v.i;
}

int64_t TomlTable::get_int(const std::string& key, int64_t def) const {
    return has(key) ? get_int(key) : def;
}

double TomlTable::get_double(const std::string& key) const {
    const auto& v = require(values, key);
    if (v.kind == TomlValue::Kind::real) return v.d;
    if (v.kind == TomlValue::Kind::integer) return double(v.i);
    type_error(key, "number");
}

double TomlTable::get_double(const std::string& key, double def) const {
    return has(key) ? get_double(key) : def;
}

bool TomlTable::get_bool(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const auto& v = require(values, key);
    if (v.kind != TomlValue::Kind::boolean) type_error(key, "boolean");
    return v.b;
}

const TomlTable& TomlDoc::table(const std::string& name) const {
    static const TomlTable kEmpty;
    auto it = tables.find(name);
    return it == tables.end() ? kEmpty : it->second;
}

std::vector<std::string> TomlDoc::children(const std::string& prefix) const {
    std::vector<std::string> out;
    const std::string want = prefix + ".";
    for (const auto& [name, _] : tables) {
        if (name.rfind(want, 0) != 0) continue;
        const std::string rest = name.substr(want.size());
        if (rest.find('.') == std::string::npos) out.push_back(rest);
    }
    return out;
}

TomlDoc parse_toml(const std::string& text, const std::string& filename) {
    TomlDoc doc;
    TomlTable* current = &doc.tables[""];

    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t eol = text.find('\n', pos);
        const std::string_view line =
            trim(std::string_view(text).substr(pos, (eol == std::string::npos ? text.size() : eol) - pos));
        pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
        ++line_no;

        if (line.empty() || line.front() == '#') continue;

        if (line.front() == '[') {
            const bool array = line.size() > 1 && line[1] == '[';
            const std::string_view closer = array ? "]]" : "]";
            const size_t close = line.find(closer);
            if (close == std::string_view::npos || !trim(line.substr(close + closer.size())).empty()) {
                throw parse_error("malformed table header", filename, line_no);
            }
            const std::string name(trim(line.substr(array ? 2 : 1, close - (array ? 2 : 1))));
            if (!valid_table_name(name)) throw parse_error("bad table name '" + name + "'", filename, line_no);
            if (array) {
                if (doc.tables.count(name)) {
                    throw parse_error("'" + name + "' is already a plain table", filename, line_no);
                }
                doc.table_arrays[name].emplace_back();
                current = &doc.table_arrays[name].back();
            } else {
                if (doc.table_arrays.count(name)) {
                    throw parse_error("'" + name + "' is already a table array", filename, line_no);
                }
                if (doc.tables.count(name)) {
                    throw parse_error("duplicate table '" + name + "'", filename, line_no);
                }
                current = &doc.tables[name];
            }
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw parse_error("expected 'key = value'", filename, line_no);
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw parse_error("empty key", filename, line_no);
        for (char c : key) {
            if (!bare_key_char(c)) throw parse_error("bad key '" + key + "'", filename, line_no);
        }
        if (current->values.count(key)) {
            throw parse_error("duplicate key '" + key + "'", filename, line_no);
        }
        current->values[key] = parse_value(line.substr(eq + 1), filename, line_no);
    }
    return doc;
}

TomlDoc read_toml_file(const std::string& path) {
    return parse_toml(read_text_file(path), path);
}

}  // namespace malign
