#include "irm/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "irm/error.hpp"

namespace irm {
namespace {

// Portable uniform double in [0,1) from a 64-bit engine.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

// Mean of `k` uniforms on [lo, hi): a bounded bell shape.
double peak(std::mt19937_64& rng, double lo, double hi, int k) {
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += unit(rng);
  return lo + (hi - lo) * s / k;
}

double bell(std::mt19937_64& rng, double mid, double spread) { return peak(rng, mid - spread, mid + spread, 12); }

bool in_unit_cube(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

std::vector<double> anti_correlated(std::mt19937_64& rng, std::size_t d) {
  std::vector<double> x(d);
  do {
    const double v = bell(rng, 0.5, 0.25);
    const double l = v <= 0.5 ? v : 1.0 - v;
    std::fill(x.begin(), x.end(), v);
    for (std::size_t i = 0; i < d; ++i) {
      const double h = uniform(rng, -l, l);
      x[i] += h;
      x[(i + 1) % d] -= h;
    }
  } while (!in_unit_cube(x));
  return x;
}

std::vector<double> correlated(std::mt19937_64& rng, std::size_t d) {
  std::vector<double> x(d);
  do {
    const double v = peak(rng, 0.0, 1.0, static_cast<int>(d));
    const double l = v <= 0.5 ? v : 1.0 - v;
    std::fill(x.begin(), x.end(), v);
    for (std::size_t i = 0; i < d; ++i) {
      const double h = bell(rng, 0.0, l);
      x[i] += h;
      x[(i + 1) % d] -= h;
    }
  } while (!in_unit_cube(x));
  return x;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(const std::string& s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::size_t resolve_column(const std::string& sel, const std::vector<std::string>& header, std::size_t width) {
  if (!header.empty()) {
    auto it = std::find(header.begin(), header.end(), sel);
    if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
  }
  if (auto idx = parse_index(sel); idx && *idx < width) return *idx;
  throw Error(ErrorCode::InvalidArgument, "unknown column '" + sel + "'");
}

}  // namespace

std::vector<double> Dataset::original(const Point& p) const {
  if (offsets.size() != p.dim() || scales.size() != p.dim()) return p.coords;
  std::vector<double> out(p.dim());
  for (std::size_t k = 0; k < p.dim(); ++k) out[k] = offsets[k] + scales[k] * p.coords[k];
  return out;
}

const char* to_string(DatasetKind kind) noexcept {
  switch (kind) {
    case DatasetKind::AntiCorrelated: return "anti";
    case DatasetKind::Correlated: return "corr";
    case DatasetKind::Independent: return "indep";
    case DatasetKind::File: return "file";
  }
  return "?";
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "anti" || s == "anti-correlated" || s == "anticorrelated") return DatasetKind::AntiCorrelated;
  if (s == "corr" || s == "correlated") return DatasetKind::Correlated;
  if (s == "indep" || s == "independent") return DatasetKind::Independent;
  if (s == "file") return DatasetKind::File;
  throw Error(ErrorCode::InvalidArgument, "unknown dataset kind '" + s + "'");
}

std::vector<Point> generate(const DatasetSpec& spec) {
  if (spec.kind == DatasetKind::File) throw Error(ErrorCode::InvalidArgument, "generate() needs a synthetic dataset kind");
  if (spec.n < 2) throw Error(ErrorCode::InvalidArgument, "a dataset needs at least 2 points");
  if (spec.d < 2 || spec.d > 10) throw Error(ErrorCode::InvalidArgument, "dimension must lie in [2, 10]");
  std::mt19937_64 rng(spec.seed);
  std::vector<Point> out(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    out[i].id = i;
    switch (spec.kind) {
      case DatasetKind::AntiCorrelated: out[i].coords = anti_correlated(rng, spec.d); break;
      case DatasetKind::Correlated: out[i].coords = correlated(rng, spec.d); break;
      default:
        out[i].coords.resize(spec.d);
        for (double& x : out[i].coords) x = unit(rng);
        break;
    }
  }
  return out;
}

LoadedTable parse_delimited(const std::string& text, const DatasetSpec& spec) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() >= 3 && lines.empty() && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw Error(ErrorCode::Parse, "no data rows");
  const char delim = lines.front().find('\t') != std::string::npos ? '\t' : ',';

  auto first = split_fields(lines.front(), delim);
  const std::size_t width = first.size();
  std::vector<std::size_t> cols;
  std::vector<std::string> header;
  // The first line is a header when some column is non-numeric there but numeric below,
  // or when columns are selected by a name that is not an index.
  bool has_header = std::any_of(spec.columns.begin(), spec.columns.end(),
                                [](const std::string& c) { return !parse_index(c); });
  if (!has_header && lines.size() > 1) {
    const auto second = split_fields(lines[1], delim);
    for (std::size_t k = 0; k < std::min(width, second.size()); ++k)
      if (!parse_number(first[k]) && parse_number(second[k])) has_header = true;
  }
  if (has_header) header = first;

  if (spec.columns.empty()) {
    // Default: every column that parses as a number in the first data row.
    const auto probe = split_fields(lines[has_header ? std::min<std::size_t>(1, lines.size() - 1) : 0], delim);
    for (std::size_t k = 0; k < probe.size(); ++k)
      if (parse_number(probe[k])) cols.push_back(k);
  } else {
    for (const auto& sel : spec.columns) cols.push_back(resolve_column(sel, header, width));
  }
  std::vector<std::size_t> label_cols;
  for (const auto& sel : spec.label_columns) label_cols.push_back(resolve_column(sel, header, width));
  if (cols.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 numeric columns");

  LoadedTable table;
  for (std::size_t k : cols) table.columns.push_back(has_header && k < header.size() ? header[k] : "c" + std::to_string(k));
  for (std::size_t r = has_header ? 1 : 0; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r], delim);
    Point p;
    p.coords.reserve(cols.size());
    bool ok = true;
    for (std::size_t k : cols) {
      std::optional<double> v = k < fields.size() ? parse_number(fields[k]) : std::nullopt;
      if (!v) {
        ok = false;
        break;
      }
      p.coords.push_back(*v);
    }
    if (!ok) {
      ++table.dropped_rows;
      continue;
    }
    for (std::size_t k : label_cols) {
      if (k >= fields.size()) continue;
      if (!p.label.empty()) p.label += ' ';
      p.label += fields[k];
    }
    p.id = table.points.size();
    table.points.push_back(std::move(p));
  }
  if (table.points.empty()) throw Error(ErrorCode::Parse, "no numeric rows in the selected columns");
  return table;
}

LoadedTable load_file(const DatasetSpec& spec) {
  std::ifstream in(spec.path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open dataset file '" + spec.path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_delimited(buf.str(), spec);
}

std::vector<Point> normalize(std::span<const Point> points) {
  return make_dataset("", points).points;
}

Dataset make_dataset(std::string name, std::span<const Point> raw, std::vector<std::string> columns,
                     const std::vector<std::size_t>& inverted) {
  if (raw.empty()) throw Error(ErrorCode::EmptyInput, "cannot normalize an empty point set");
  const std::size_t d = raw.front().dim();
  std::vector<double> lo(d, INFINITY), hi(d, -INFINITY);
  for (const auto& p : raw) {
    if (p.dim() != d) throw Error(ErrorCode::DimensionMismatch, "points differ in dimension");
    for (std::size_t k = 0; k < d; ++k) {
      if (!std::isfinite(p.coords[k])) throw Error(ErrorCode::InvalidArgument, "non-finite attribute value");
      lo[k] = std::min(lo[k], p.coords[k]);
      hi[k] = std::max(hi[k], p.coords[k]);
    }
  }
  Dataset ds;
  ds.name = std::move(name);
  ds.dim = d;
  ds.columns = std::move(columns);
  ds.offsets.resize(d);
  ds.scales.resize(d);
  std::vector<bool> flip(d, false);
  for (std::size_t k : inverted) {
    if (k >= d) throw Error(ErrorCode::InvalidArgument, "inverted column index out of range");
    flip[k] = true;
  }
  for (std::size_t k = 0; k < d; ++k) {
    const double range = hi[k] - lo[k];
    if (range <= 0.0) {
      ds.offsets[k] = lo[k];
      ds.scales[k] = 0.0;
    } else if (flip[k]) {
      ds.offsets[k] = hi[k];
      ds.scales[k] = -range;
    } else {
      ds.offsets[k] = lo[k];
      ds.scales[k] = range;
    }
  }
  ds.points.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto& p = ds.points[i];
    p.id = i;
    p.label = raw[i].label;
    p.coords.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      if (ds.scales[k] == 0.0) {
        p.coords[k] = 1.0;
      } else {
        const double x = (raw[i].coords[k] - lo[k]) / (hi[k] - lo[k]);
        p.coords[k] = std::clamp(flip[k] ? 1.0 - x : x, 0.0, 1.0);
      }
    }
  }
  return ds;
}

Dataset build_dataset(const DatasetSpec& spec, const std::string& name) {
  if (spec.kind != DatasetKind::File) {
    auto pts = generate(spec);
    std::string nm = name;
    if (nm.empty()) {
      std::ostringstream os;
      os << to_string(spec.kind) << '-' << spec.d << "d-n" << spec.n << "-s" << spec.seed;
      nm = os.str();
    }
    Dataset ds = make_dataset(nm, pts);
    // Generated data is already in [0,1]; keep it untouched rather than rescaled.
    ds.points = std::move(pts);
    std::fill(ds.offsets.begin(), ds.offsets.end(), 0.0);
    std::fill(ds.scales.begin(), ds.scales.end(), 1.0);
    return ds;
  }
  return dataset_from_table(load_file(spec), spec, name);
}

Dataset dataset_from_table(LoadedTable table, const DatasetSpec& spec, const std::string& name) {
  std::vector<std::size_t> inverted;
  for (const auto& sel : spec.invert) {
    auto it = std::find(table.columns.begin(), table.columns.end(), sel);
    if (it != table.columns.end()) {
      inverted.push_back(static_cast<std::size_t>(it - table.columns.begin()));
    } else if (auto idx = parse_index(sel); idx && *idx < table.columns.size()) {
      inverted.push_back(*idx);
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown column to invert '" + sel + "'");
    }
  }
  std::string nm = name;
  if (nm.empty()) {
    nm = spec.path.empty() ? "upload" : spec.path;
    if (auto slash = nm.find_last_of("/\\"); slash != std::string::npos) nm = nm.substr(slash + 1);
  }
  Dataset ds = make_dataset(nm, table.points, table.columns, inverted);
  ds.dropped_rows = table.dropped_rows;
  return ds;
}

nlohmann::json to_json(const Dataset& ds) {
  nlohmann::json labels = nlohmann::json::array(), rows = nlohmann::json::array();
  for (const auto& p : ds.points) {
    labels.push_back(p.label);
    rows.push_back(p.coords);
  }
  return nlohmann::json{{"name", ds.name},       {"d", ds.dim},           {"n", ds.points.size()},
                        {"labels", labels},      {"rows", rows},          {"columns", ds.columns},
                        {"offsets", ds.offsets}, {"scales", ds.scales}};
}

Dataset dataset_from_json(const nlohmann::json& doc) {
  try {
    Dataset ds;
    ds.name = doc.at("name").get<std::string>();
    ds.dim = doc.at("d").get<std::size_t>();
    const auto& rows = doc.at("rows");
    const std::size_t n = doc.at("n").get<std::size_t>();
    if (rows.size() != n) throw Error(ErrorCode::Parse, "dataset row count does not match n");
    const auto labels = doc.value("labels", std::vector<std::string>{});
    for (std::size_t i = 0; i < n; ++i) {
      Point p;
      p.id = i;
      p.coords = rows[i].get<std::vector<double>>();
      if (p.dim() != ds.dim) throw Error(ErrorCode::DimensionMismatch, "dataset row " + std::to_string(i) + " has wrong width");
      if (i < labels.size()) p.label = labels[i];
      validate_point(p);
      ds.points.push_back(std::move(p));
    }
    ds.columns = doc.value("columns", std::vector<std::string>{});
    ds.offsets = doc.value("offsets", std::vector<double>{});
    ds.scales = doc.value("scales", std::vector<double>{});
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed dataset document: ") + e.what());
  }
}

void write_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << to_json(ds).dump() << '\n';
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  try {
    return dataset_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("dataset file is not valid JSON: ") + e.what());
  }
}

}  // namespace irm
