#pragma once

#include <string>

#include "cwpaint/exact.hpp"

namespace cwpaint {

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// CSV rows "y_index,f_value,g_value" plus a JSON header with the scalar
// fields. Both files round-trip exactly through read_hitting_table.
void write_hitting_table(const HittingTable& table, const std::string& csv_path,
                         const std::string& json_path);
HittingTable read_hitting_table(const std::string& csv_path, const std::string& json_path);

std::string hitting_table_header_json(const HittingTable& table);

}  // namespace cwpaint
