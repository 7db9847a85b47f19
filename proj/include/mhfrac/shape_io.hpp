#pragma once

#include "mhfrac/geometry.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace mhfrac {

/// `key = value` lines; blank lines and text after '#' are ignored. Keys are lower-cased.
std::map<std::string, std::string> read_key_values(std::istream& in);
std::map<std::string, std::string> read_key_values_file(const std::string& path);

/// Build a shape from key/value pairs. The `shape` key selects the tag; the remaining
/// keys (radius, inner_radius, side, width, height, k, pitch, wall, turns, vertices)
/// override defaults. `vertices` is a list "x0 y0; x1 y1; ...".
ShapeSpec shape_from_key_values(const std::map<std::string, std::string>& kv);

/// Inline form "tag" or "tag:key=value,key=value", or "@path" for a config file.
ShapeSpec parse_shape(const std::string& text);

/// Portable text mask format:
///
///     mhfrac-mask 1
///     h <spacing>
///     origin <x> <y>
///     size <nx> <ny>
///     segments <count>
///     <ax> <ay> <bx> <by>        (one line per segment)
///     cells
///     <ny rows of nx characters '0'/'1', top row (j = ny-1) first>
void write_mask(std::ostream& out, const DomainMask& mask);
DomainMask read_mask(std::istream& in);
void save_mask(const std::string& path, const DomainMask& mask);
DomainMask load_mask(const std::string& path);

}  // namespace mhfrac
