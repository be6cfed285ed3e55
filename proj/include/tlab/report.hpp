#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace tlab {

using json = nlohmann::json;

// Serializes with sorted keys, two-space indent and every double printed
// with 17 significant digits. Non-finite doubles become null.
std::string dump_json(const json& j);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row);
    std::string to_string() const;
};

std::string format_double(double x);

}  // namespace tlab
