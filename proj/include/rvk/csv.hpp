#pragma once

// Minimal CSV reading/writing. Quoted fields may contain commas, quotes
// and newlines. Bytes are treated as opaque UTF-8.

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace rvk::csv {

// Reads one record; a quoted field may span physical lines. Returns false
// at end of stream with no data consumed.
bool read_record(std::istream& in, std::vector<std::string>& fields);

std::string escape(const std::string& field);

void write_record(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace rvk::csv
