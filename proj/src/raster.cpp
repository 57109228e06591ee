#include "settlemorph/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "settlemorph/error.hpp"
#include "settlemorph/text.hpp"

namespace settlemorph {

namespace fs = std::filesystem;

SettlementRaster::SettlementRaster(std::size_t width, std::size_t height, double cell_size,
                                   std::vector<std::uint8_t> cells, std::string origin_id,
                                   double xll_corner, double yll_corner)
    : width_(width),
      height_(height),
      cell_size_(cell_size),
      cells_(std::move(cells)),
      origin_id_(std::move(origin_id)),
      xll_(xll_corner),
      yll_(yll_corner) {
  if (width_ == 0 || height_ == 0) throw InvalidArgument("raster dimensions must be positive");
  if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_))
    throw InvalidArgument("raster cell_size must be positive and finite");
  if (cells_.size() != width_ * height_) {
    throw InvalidArgument("raster holds " + std::to_string(cells_.size()) + " cells, expected " +
                          std::to_string(width_ * height_));
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] > 1) {
      throw InvalidArgument("raster cell (row " + std::to_string(i / width_) + ", col " +
                            std::to_string(i % width_) + ") is not binary");
    }
  }
}

SettlementRaster SettlementRaster::zeros(std::size_t width, std::size_t height, double cell_size,
                                         std::string origin_id) {
  return {width, height, cell_size, std::vector<std::uint8_t>(width * height, 0),
          std::move(origin_id)};
}

std::size_t SettlementRaster::occupied_count() const noexcept {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

double SettlementRaster::area_km2() const noexcept {
  return static_cast<double>(width_) * static_cast<double>(height_) * cell_size_ * cell_size_ /
         1.0e6;
}

SettlementRaster SettlementRaster::with_origin_id(std::string id) const {
  SettlementRaster copy = *this;
  copy.origin_id_ = std::move(id);
  return copy;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

SettlementRaster parse_raster(const std::string& content, const std::string& origin_id,
                              const std::string& source_name) {
  std::istringstream in(content);
  std::map<std::string, std::string> header;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> pending;  // first data line, once the header ends

  static const std::set<std::string> kKeys = {"ncols",     "nrows",     "xllcorner",
                                              "yllcorner", "xllcenter", "yllcenter",
                                              "cellsize",  "nodata_value"};
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = text::tokens(line);
    if (toks.empty()) continue;
    const std::string key = text::to_lower(toks[0]);
    if (kKeys.count(key) == 0) {
      pending = toks;
      break;
    }
    if (toks.size() != 2)
      throw ParseError(source_name + ":" + std::to_string(line_no) + ": malformed header line");
    if (header.count(key) != 0)
      throw ParseError(source_name + ":" + std::to_string(line_no) + ": duplicate header " + key);
    header[key] = toks[1];
  }

  const auto require_int = [&](const std::string& key) -> std::size_t {
    const auto it = header.find(key);
    if (it == header.end()) throw ParseError(source_name + ": missing header " + key);
    const auto v = text::parse_int(it->second);
    if (!v || *v <= 0) throw ParseError(source_name + ": header " + key + " must be a positive integer");
    return static_cast<std::size_t>(*v);
  };
  const auto optional_double = [&](const std::string& key) -> std::optional<double> {
    const auto it = header.find(key);
    if (it == header.end()) return std::nullopt;
    const auto v = text::parse_double(it->second);
    if (!v) throw ParseError(source_name + ": header " + key + " is not a number");
    return v;
  };

  const std::size_t ncols = require_int("ncols");
  const std::size_t nrows = require_int("nrows");
  const auto cellsize = optional_double("cellsize");
  if (!cellsize) throw ParseError(source_name + ": missing header cellsize");
  if (!(*cellsize > 0.0)) throw ParseError(source_name + ": cellsize must be positive");
  const auto nodata = optional_double("nodata_value");
  double xll = optional_double("xllcorner").value_or(0.0);
  double yll = optional_double("yllcorner").value_or(0.0);
  if (const auto c = optional_double("xllcenter")) xll = *c - *cellsize / 2.0;
  if (const auto c = optional_double("yllcenter")) yll = *c - *cellsize / 2.0;

  std::vector<std::uint8_t> cells;
  cells.reserve(ncols * nrows);
  std::size_t data_line_no = line_no;
  const auto consume = [&](const std::vector<std::string>& toks, std::size_t at_line) {
    for (const auto& tok : toks) {
      const std::size_t idx = cells.size();
      if (idx >= ncols * nrows) {
        throw ParseError(source_name + ":" + std::to_string(at_line) + ": more than " +
                         std::to_string(ncols * nrows) + " cell values (dimension mismatch)");
      }
      const std::size_t row = idx / ncols;
      const std::size_t col = idx % ncols;
      const auto v = text::parse_double(tok);
      const std::string where = source_name + ":" + std::to_string(at_line) + ": cell (row " +
                                std::to_string(row) + ", col " + std::to_string(col) + ")";
      if (!v) throw ParseError(where + " is not a number: '" + tok + "'");
      if (nodata && *v == *nodata) {
        cells.push_back(0);
      } else if (*v == 0.0) {
        cells.push_back(0);
      } else if (*v == 1.0) {
        cells.push_back(1);
      } else {
        throw ParseError(where + " has non-binary value " + tok);
      }
    }
  };
  if (!pending.empty()) consume(pending, data_line_no);
  while (std::getline(in, line)) {
    ++data_line_no;
    consume(text::tokens(line), data_line_no);
  }
  if (cells.size() != ncols * nrows) {
    throw ParseError(source_name + ": found " + std::to_string(cells.size()) +
                     " cell values, header declares " + std::to_string(ncols) + "x" +
                     std::to_string(nrows) + " (dimension mismatch)");
  }
  return {ncols, nrows, *cellsize, std::move(cells), origin_id, xll, yll};
}

SettlementRaster load_raster(const fs::path& path) {
  return parse_raster(read_file(path), path.stem().string(), path.string());
}

std::string format_raster(const SettlementRaster& raster) {
  std::string out;
  out.reserve(raster.size() * 2 + 128);
  out += "ncols " + std::to_string(raster.width()) + "\n";
  out += "nrows " + std::to_string(raster.height()) + "\n";
  out += "xllcorner " + text::format_double(raster.xll_corner()) + "\n";
  out += "yllcorner " + text::format_double(raster.yll_corner()) + "\n";
  out += "cellsize " + text::format_double(raster.cell_size()) + "\n";
  out += "NODATA_value -9999\n";
  for (std::size_t r = 0; r < raster.height(); ++r) {
    for (std::size_t c = 0; c < raster.width(); ++c) {
      if (c != 0) out += ' ';
      out += raster.at(c, r) != 0 ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

void save_raster(const SettlementRaster& raster, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_raster(raster);
  if (!out) throw IoError("write failed for " + path.string());
}

CityManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const fs::path base = path.parent_path();
  const auto resolve = [&](const std::string& p) {
    fs::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };

  CityManifest manifest;
  std::set<std::string> seen;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    auto fields = text::split(trimmed, ',');
    for (auto& f : fields) f = std::string(text::trim(f));
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 2 || fields[0] != "city_id" || fields[1] != "raster_path")
        throw ParseError(path.string() + ": row 1: expected header city_id,raster_path,...");
      continue;
    }
    const std::string where = path.string() + ": row " + std::to_string(row);
    if (fields.size() < 2 || fields.size() > 5) throw ParseError(where + ": expected 2 to 5 fields");
    fields.resize(5);
    if (fields[0].empty()) throw ParseError(where + ": empty city_id");
    if (fields[1].empty()) throw ParseError(where + ": empty raster_path");
    if (!seen.insert(fields[0]).second) throw ParseError(where + ": duplicate city_id " + fields[0]);

    ManifestEntry entry;
    entry.city_id = fields[0];
    entry.raster_path = resolve(fields[1]);
    if (!fs::exists(entry.raster_path))
      throw IoError(where + ": raster file not found: " + entry.raster_path.string());
    if (!fields[2].empty()) entry.road_path = resolve(fields[2]);
    if (!fields[3].empty()) {
      entry.population = text::parse_double(fields[3]);
      if (!entry.population) throw ParseError(where + ": unparseable population '" + fields[3] + "'");
    }
    if (!fields[4].empty()) {
      entry.area_override_km2 = text::parse_double(fields[4]);
      if (!entry.area_override_km2)
        throw ParseError(where + ": unparseable area_km2 '" + fields[4] + "'");
    }
    manifest.entries.push_back(std::move(entry));
  }
  if (!header_seen) throw ParseError(path.string() + ": empty manifest file");
  return manifest;
}

std::vector<fs::path> list_raster_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".asc") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace settlemorph
