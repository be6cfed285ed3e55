#include "tlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tlab {

std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    // keep integral-valued doubles recognizable as floating point
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

namespace {

void write(const json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += inner + json(it.key()).dump() + ": ";
                write(it.value(), out, indent + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += inner;
                write(j[i], out, indent + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::number_float: out += format_double(j.get<double>()); return;
        default: out += j.dump(); return;
    }
}

}  // namespace

std::string dump_json(const json& j) {
    std::string out;
    write(j, out, 0);
    out += "\n";
    return out;
}

void CsvTable::add(std::vector<double> row) {
    if (row.size() != header.size()) throw std::invalid_argument("csv row width does not match header");
    rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ",";
            out += std::isfinite(r[i]) ? format_double(r[i]) : std::string("nan");
        }
        out += "\n";
    }
    return out;
}

}  // namespace tlab
