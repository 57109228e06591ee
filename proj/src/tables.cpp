#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "settlemorph/error.hpp"
#include "settlemorph/pipeline.hpp"
#include "settlemorph/text.hpp"

namespace settlemorph {

namespace fs = std::filesystem;

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    auto fields = text::split(trimmed, ',');
    for (auto& f : fields) f = std::string(text::trim(f));
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ParseError(path.string() + ": row " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty()) throw ParseError(path.string() + ": empty file");
  return table;
}

std::size_t column(const CsvTable& table, const fs::path& path,
                   std::initializer_list<const char*> names) {
  for (const char* name : names) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (table.header[i] == name) return i;
    }
  }
  throw ParseError(path.string() + ": missing column " + std::string(*names.begin()));
}

double number(const CsvTable& table, const fs::path& path, std::size_t row, std::size_t col) {
  const auto v = text::parse_double(table.rows[row][col]);
  if (!v) {
    throw ParseError(path.string() + ": row " + std::to_string(table.line_numbers[row]) +
                     ": column " + table.header[col] + " is not a number");
  }
  return *v;
}

HsiVector read_hsi_columns(const CsvTable& t, const fs::path& path, std::size_t row) {
  HsiVector h;
  h.ca = number(t, path, row, column(t, path, {"CA"}));
  h.np = number(t, path, row, column(t, path, {"NP"}));
  h.lpi = number(t, path, row, column(t, path, {"LPI"}));
  h.clumpy = number(t, path, row, column(t, path, {"CLUMPY"}));
  h.ai = number(t, path, row, column(t, path, {"AI"}));
  h.nlsi = number(t, path, row, column(t, path, {"NLSI"}));
  return h;
}

std::string hsi_fields(const HsiVector& h) {
  std::string out;
  for (const double v : h.as_vector()) {
    out += ',';
    out += text::format_double(v);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

void check_unique(const std::vector<std::string>& ids, const fs::path& path) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw ParseError(path.string() + ": duplicate city_id " + id);
  }
}

}  // namespace

void write_hsi_table(const fs::path& path, const std::vector<HsiRow>& rows) {
  std::string out = "city_id,CA,NP,LPI,CLUMPY,AI,NLSI\n";
  for (const auto& r : rows) out += r.city_id + hsi_fields(r.hsi) + "\n";
  write_text(path, out);
}

std::vector<HsiRow> read_hsi_table(const fs::path& path) {
  const auto t = read_csv(path);
  const auto id = column(t, path, {"city_id", "scene_id"});
  std::vector<HsiRow> rows;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    rows.push_back({t.rows[i][id], read_hsi_columns(t, path, i)});
    ids.push_back(t.rows[i][id]);
  }
  check_unique(ids, path);
  return rows;
}

void write_transport_table(const fs::path& path, const std::vector<TransportRow>& rows) {
  std::string out = "city_id,L_km,A_km2,ND\n";
  for (const auto& r : rows) {
    out += r.city_id + "," + text::format_double(r.index.road_length_km) + "," +
           text::format_double(r.index.area_km2) + "," + text::format_double(r.index.density) + "\n";
  }
  write_text(path, out);
}

std::vector<TransportRow> read_transport_table(const fs::path& path) {
  const auto t = read_csv(path);
  const auto id = column(t, path, {"city_id"});
  const auto l = column(t, path, {"L_km"});
  const auto a = column(t, path, {"A_km2"});
  const auto nd = column(t, path, {"ND"});
  std::vector<TransportRow> rows;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    rows.push_back({t.rows[i][id], {number(t, path, i, l), number(t, path, i, a), number(t, path, i, nd)}});
    ids.push_back(t.rows[i][id]);
  }
  check_unique(ids, path);
  return rows;
}

std::vector<CorpusRow> read_corpus_table(const fs::path& path) {
  const auto t = read_csv(path);
  const auto id = column(t, path, {"city_id"});
  const auto rl = column(t, path, {"RL", "L_km"});
  const auto nd = column(t, path, {"ND"});
  std::vector<CorpusRow> rows;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    rows.push_back({t.rows[i][id], read_hsi_columns(t, path, i), number(t, path, i, rl),
                    number(t, path, i, nd)});
    ids.push_back(t.rows[i][id]);
  }
  check_unique(ids, path);
  return rows;
}

void write_corpus_table(const fs::path& path, const std::vector<CorpusRow>& rows) {
  std::string out = "city_id,CA,NP,LPI,CLUMPY,AI,NLSI,RL,ND\n";
  for (const auto& r : rows) {
    out += r.city_id + hsi_fields(r.hsi) + "," + text::format_double(r.road_length_km) + "," +
           text::format_double(r.density) + "\n";
  }
  write_text(path, out);
}

std::vector<CorpusRow> join_tables(const std::vector<HsiRow>& hsi,
                                   const std::vector<TransportRow>& transport,
                                   std::size_t* dropped) {
  std::map<std::string, const TransportRow*> by_id;
  for (const auto& t : transport) by_id[t.city_id] = &t;
  std::vector<CorpusRow> out;
  for (const auto& h : hsi) {
    const auto it = by_id.find(h.city_id);
    if (it == by_id.end()) continue;
    out.push_back({h.city_id, h.hsi, it->second->index.road_length_km, it->second->index.density});
  }
  if (dropped != nullptr) *dropped = (hsi.size() - out.size()) + (transport.size() - out.size());
  return out;
}

double hsi_feature(const HsiVector& hsi, const std::string& name) {
  if (name == "CA") return hsi.ca;
  if (name == "NP") return hsi.np;
  if (name == "LPI") return hsi.lpi;
  if (name == "CLUMPY") return hsi.clumpy;
  if (name == "AI") return hsi.ai;
  if (name == "NLSI") return hsi.nlsi;
  throw InvalidArgument("unknown HSI feature " + name);
}

RegressionDataset make_dataset(const std::vector<CorpusRow>& rows,
                               const std::vector<std::string>& features) {
  RegressionDataset data;
  data.feature_names = features;
  data.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(features.size()));
  data.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < features.size(); ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          hsi_feature(rows[i].hsi, features[j]);
    }
    data.targets(static_cast<Eigen::Index>(i)) = rows[i].density;
    data.city_ids.push_back(rows[i].city_id);
  }
  data.validate();
  return data;
}

}  // namespace settlemorph
