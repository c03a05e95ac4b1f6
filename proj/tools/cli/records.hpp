#pragma once

#include <string>
#include <vector>

#include "gwht/serialize.hpp"

namespace gwht::cli {

// A result file is a list of flat records (scalar values only).
// ".csv" gives delimited rows, anything else a JSON document.
void write_records(const std::string& path, const std::string& command, const std::vector<json>& records);
std::vector<json> read_records(const std::string& path);

std::string records_to_csv(const std::vector<json>& records);
std::vector<json> records_from_csv(const std::string& text);

// Fixed-width summary for standard output.
std::string summary_table(const std::vector<json>& records, std::size_t max_rows = 40);

}  // namespace gwht::cli
