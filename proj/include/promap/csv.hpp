// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace promap::csv {

/// Quotes a field when it contains a comma, quote, CR or LF; inner quotes are doubled.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Reads one record, including quoted fields spanning lines. Returns false at
/// end of input. Throws std::runtime_error on an unterminated quote.
bool read_row(std::istream& in, std::vector<std::string>& fields);

}  // namespace promap::csv
