#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "irm/geometry.hpp"

namespace irm {

/// A normalized dataset. points[i].id == i. Original attribute values are
/// recovered as offsets[k] + scales[k] * coords[k].
struct Dataset {
  std::string name;
  std::size_t dim = 0;
  std::vector<Point> points;
  std::vector<std::string> columns;
  std::vector<double> offsets;
  std::vector<double> scales;
  std::size_t dropped_rows = 0;

  std::size_t size() const noexcept { return points.size(); }
  std::vector<double> original(const Point& p) const;
};

enum class DatasetKind { AntiCorrelated, Correlated, Independent, File };

const char* to_string(DatasetKind kind) noexcept;
DatasetKind dataset_kind_from_string(const std::string& s);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::AntiCorrelated;
  std::size_t n = 1000;
  std::size_t d = 4;
  std::uint64_t seed = 1;

  // File kind only.
  std::string path;
  std::vector<std::string> columns;        // names (needs a header) or 0-based indices
  std::vector<std::string> label_columns;  // joined with a space into Point::label
  std::vector<std::string> invert;         // cost-like columns, mapped x -> 1 - x after scaling
};

/// Synthetic points in [0,1]^d. Throws InvalidArgument for bad specs.
std::vector<Point> generate(const DatasetSpec& spec);

struct LoadedTable {
  std::vector<Point> points;  // raw selected values
  std::vector<std::string> columns;
  std::size_t dropped_rows = 0;
};

/// Delimited text (comma or tab, detected from the first line) with an optional header row.
LoadedTable parse_delimited(const std::string& text, const DatasetSpec& spec);
LoadedTable load_file(const DatasetSpec& spec);

/// Per-dimension min-max scaling to [0,1]; constant dimensions become 1.
std::vector<Point> normalize(std::span<const Point> points);

/// Normalizes raw points, applies column inversion and records the scaling.
Dataset make_dataset(std::string name, std::span<const Point> raw, std::vector<std::string> columns = {},
                     const std::vector<std::size_t>& inverted = {});

/// make_dataset() on a parsed table, resolving spec.invert against its columns.
Dataset dataset_from_table(LoadedTable table, const DatasetSpec& spec, const std::string& name = "");

/// generate() or load_file() followed by make_dataset().
Dataset build_dataset(const DatasetSpec& spec, const std::string& name = "");

/// Canonical document {name, d, n, labels, rows, columns, offsets, scales}.
nlohmann::json to_json(const Dataset& ds);
Dataset dataset_from_json(const nlohmann::json& doc);

void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);

}  // namespace irm
