#include "tailgap/table.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tailgap::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void OutputTable::append_row(std::vector<double> row) {
    if (row.size() != column_names.size())
        throw std::invalid_argument("OutputTable: row arity does not match header");
    rows.push_back(std::move(row));
}

std::string OutputTable::to_csv() const {
    std::ostringstream os;
    for (const auto& [k, v] : metadata) os << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < column_names.size(); ++i) {
        if (i) os << ",";
        os << column_names[i];
    }
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            os << format_double(row[i]);
        }
        os << "\n";
    }
    return os.str();
}

std::string OutputTable::to_json() const {
    nlohmann::ordered_json j;
    j["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : metadata) j["metadata"][k] = v;
    j["columns"] = column_names;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) j["rows"].push_back(row);
    return j.dump(2) + "\n";
}

OutputTable OutputTable::from_csv(const std::string& text) {
    OutputTable t;
    std::istringstream is(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body[0] == ' ') body.erase(0, 1);
            const auto eq = body.find('=');
            if (eq != std::string::npos)
                t.metadata[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!header_seen) {
            t.column_names = cells;
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const std::string& c : cells) {
            std::size_t used = 0;
            double v = std::stod(c, &used);
            if (used != c.size())
                throw std::invalid_argument("OutputTable: non-numeric cell '" + c + "'");
            row.push_back(v);
        }
        t.append_row(std::move(row));
    }
    if (!header_seen)
        throw std::invalid_argument("OutputTable: no header row found");
    return t;
}

}  // namespace tailgap::io
