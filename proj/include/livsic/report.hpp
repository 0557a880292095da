#ifndef LIVSIC_REPORT_HPP
#define LIVSIC_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "livsic/errors.hpp"

namespace livsic {

/// Pinned float formatting: 17 significant digits, locale-independent, so
/// identical values always serialize to identical bytes.
inline std::string fmt_real(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_int(long long v) { return std::to_string(v); }

inline std::string json_escape(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(ch);
        }
    }
    out.push_back('"');
    return out;
}

/// Minimal insertion-ordered JSON value for byte-stable report emission.
/// Parsing is delegated to the vendored reader; this type only writes.
class JValue {
public:
    static JValue null() { return JValue(); }
    static JValue boolean(bool b) { JValue v; v.raw_ = b ? "true" : "false"; return v; }
    static JValue integer(long long i) { JValue v; v.raw_ = fmt_int(i); return v; }
    static JValue real(double d) { JValue v; v.raw_ = fmt_real(d); return v; }
    static JValue str(const std::string& s) { JValue v; v.raw_ = json_escape(s); return v; }
    static JValue verbatim(std::string json) { JValue v; v.raw_ = std::move(json); return v; }

    static JValue array() { JValue v; v.kind_ = Kind::Arr; return v; }
    static JValue object() { JValue v; v.kind_ = Kind::Obj; return v; }

    JValue& push(JValue item) {
        items_.push_back({"", std::move(item)});
        return *this;
    }
    JValue& set(const std::string& key, JValue item) {
        items_.push_back({key, std::move(item)});
        return *this;
    }

    std::string dump() const {
        switch (kind_) {
            case Kind::Scalar: return raw_.empty() ? "null" : raw_;
            case Kind::Arr: {
                std::string s = "[";
                for (std::size_t i = 0; i < items_.size(); ++i) {
                    if (i) s += ",";
                    s += items_[i].second.dump();
                }
                return s + "]";
            }
            case Kind::Obj: {
                std::string s = "{";
                for (std::size_t i = 0; i < items_.size(); ++i) {
                    if (i) s += ",";
                    s += json_escape(items_[i].first) + ":" + items_[i].second.dump();
                }
                return s + "}";
            }
        }
        return "null";
    }

private:
    enum class Kind { Scalar, Arr, Obj };
    Kind kind_ = Kind::Scalar;
    std::string raw_;
    std::vector<std::pair<std::string, JValue>> items_;
};

/// One CSV table with a fixed header; cells are pre-formatted strings so
/// the byte-stability policy of fmt_real applies uniformly.
struct CsvTable {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string dump() const {
        std::string s;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) s += ",";
            s += header[i];
        }
        s += "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) s += ",";
                s += csv_escape(row[i]);
            }
            s += "\n";
        }
        return s;
    }

    static std::string csv_escape(const std::string& cell) {
        if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
        std::string out = "\"";
        for (char ch : cell) {
            if (ch == '"') out += "\"\"";
            else out.push_back(ch);
        }
        return out + "\"";
    }
};

inline std::string fmt_real_csv(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace livsic

#endif
