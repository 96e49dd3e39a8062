#ifndef TAILGAP_TABLE_HPP
#define TAILGAP_TABLE_HPP

#include <map>
#include <string>
#include <vector>

namespace tailgap::io {

// Numeric table with string metadata, the CLI's only output shape.
// CSV: "# key=value" comment lines, a header row, then rows with floats
// printed to 17 significant digits so values round-trip exactly.
struct OutputTable {
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> rows;
    std::map<std::string, std::string> metadata;

    void append_row(std::vector<double> row);  // validates arity

    std::string to_csv() const;
    std::string to_json() const;  // {"metadata": {...}, "columns": [...], "rows": [[...]]}

    static OutputTable from_csv(const std::string& text);
};

std::string format_double(double v);  // %.17g

}  // namespace tailgap::io

#endif
