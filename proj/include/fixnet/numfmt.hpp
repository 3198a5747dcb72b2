#pragma once

// Text formatting of numbers for the artifact's file formats. Doubles are
// written in shortest round-trip form so every file re-parses exactly.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fixnet {

std::string format_double(double v);
double parse_double(std::string_view s);
std::size_t parse_size(std::string_view s);
std::vector<std::string_view> split_fields(std::string_view line, char sep);

}  // namespace fixnet
