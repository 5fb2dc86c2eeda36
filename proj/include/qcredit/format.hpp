#pragma once

#include <string>

namespace qcredit {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

} // namespace qcredit
