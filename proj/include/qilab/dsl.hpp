#pragma once

// Textual form of Map: a JSON tree discriminated by "op", wrapped in a
// document that carries the ambient dimension,
//
//   {"dimension": 3, "map": {"op": "compose",
//                            "outer": {"op": "dilation", "lambda": 2},
//                            "inner": {"op": "logdrift", "A": 1, "v": [1,0,0]}}}
//
// Axis indices ("plane", "axis") are one-based in the text and zero-based in
// memory. parse_map_document(print_map_document(m)) == m for every m.

#include "qilab/map.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace qilab {

using Json = nlohmann::json;

Json map_to_json(const Map& map);
Map map_from_json(const Json& node, int dim, const std::string& path = "/map");

Json map_document(const Map& map);
Map map_from_document(const Json& doc);

std::string print_map_document(const Map& map);
/// Raises ParseError; the message names the byte offset for syntax errors and
/// the JSON pointer of the offending node for structural ones.
Map parse_map_document(std::string_view text);

Json point_to_json(const Point& p);
Point point_from_json(const Json& j, int dim, const std::string& path);

/// FNV-1a 64-bit over the bytes, as 16 lowercase hex digits.
std::string digest_hex(std::string_view bytes);
std::string map_digest(const Map& map);

}  // namespace qilab
