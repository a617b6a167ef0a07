#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dirmax/certifier.hpp"
#include "dirmax/cone_counts.hpp"
#include "dirmax/direction.hpp"
#include "dirmax/field_ops.hpp"
#include "dirmax/fit.hpp"
#include "dirmax/grid_field.hpp"
#include "dirmax/maximal_ops.hpp"

namespace dirmax {

using Json = nlohmann::ordered_json;

// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

// Direction files: "# dim=<n> delta=<d> eta=<e|inf>" then one tab-separated point per line.
void write_directions(const std::string& path, const DirectionSet& set);
DirectionSet read_directions(const std::string& path);

// Field files: an 8-line ASCII header followed by little-endian f64 (re, im) pairs.
void write_field(const std::string& path, const GridField& f);
GridField read_field(const std::string& path);
// FNV-1a 64 of a byte range.
std::uint64_t fnv1a64(const void* data, std::size_t size);

// Writes text atomically enough for our purposes: to path.tmp, then renames.
void write_text(const std::string& path, const std::string& text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const;
};

Json to_json(const Direction& v);
Json to_json(const ElBracket& b);
Json to_json(const FitReport& f);
Json to_json(const BoundTrace& t);
Json to_json(const SharpnessReport& r);
Json to_json(const KernelReport& r);
// Summary of a maximal report: ids, l2 ratio, output extrema (not the field itself).
Json to_json(const MaximalReport& r);

}  // namespace dirmax
