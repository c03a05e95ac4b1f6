#include "records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gwht::cli {

namespace {

bool is_csv(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  return std::string(buf, end);
}

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>());
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::vector<std::string> header_of(const std::vector<json>& records) {
  std::vector<std::string> keys;
  for (const auto& r : records)
    for (auto it = r.begin(); it != r.end(); ++it)
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) keys.push_back(it.key());
  return keys;
}

json parse_cell(const std::string& s, bool quoted) {
  if (quoted) return s;
  if (s.empty()) return nullptr;
  if (s == "true") return true;
  if (s == "false") return false;
  if (s == "inf" || s == "-inf" || s == "nan") return s;
  std::int64_t i = 0;
  auto [p1, e1] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (e1 == std::errc() && p1 == s.data() + s.size()) return i;
  double d = 0.0;
  auto [p2, e2] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (e2 == std::errc() && p2 == s.data() + s.size()) return d;
  return s;
}

std::vector<std::pair<std::string, bool>> split_row(const std::string& line) {
  std::vector<std::pair<std::string, bool>> out;
  std::string cur;
  bool quoted = false, in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (in_quotes) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        in_quotes = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      in_quotes = quoted = true;
    } else if (ch == ',') {
      out.emplace_back(cur, quoted);
      cur.clear();
      quoted = false;
    } else {
      cur += ch;
    }
  }
  out.emplace_back(cur, quoted);
  return out;
}

}  // namespace

std::string records_to_csv(const std::vector<json>& records) {
  auto keys = header_of(records);
  std::string out;
  for (std::size_t k = 0; k < keys.size(); ++k) out += (k ? "," : "") + keys[k];
  out += "\n";
  for (const auto& r : records) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (k) out += ",";
      auto it = r.find(keys[k]);
      if (it != r.end()) out += cell(*it);
    }
    out += "\n";
  }
  return out;
}

std::vector<json> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return {};
  std::vector<std::string> keys;
  for (auto& [k, q] : split_row(line)) keys.push_back(k);
  std::vector<json> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != keys.size()) throw std::runtime_error("malformed CSV row: " + line);
    json r = json::object();
    for (std::size_t k = 0; k < keys.size(); ++k) {
      json v = parse_cell(cells[k].first, cells[k].second);
      if (!v.is_null()) r[keys[k]] = v;
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_records(const std::string& path, const std::string& command, const std::vector<json>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  if (is_csv(path)) {
    out << records_to_csv(records);
  } else {
    json doc{{"command", command}, {"records", records}};
    out << doc.dump(2) << "\n";
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<json> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  if (is_csv(path)) return records_from_csv(ss.str());
  json doc = json::parse(ss.str());
  return doc.at("records").get<std::vector<json>>();
}

std::string summary_table(const std::vector<json>& records, std::size_t max_rows) {
  if (records.empty()) return "(no records)\n";
  auto keys = header_of(records);
  std::vector<std::vector<std::string>> rows;
  const std::size_t shown = std::min(records.size(), max_rows);
  for (std::size_t i = 0; i < shown; ++i) {
    std::vector<std::string> row;
    for (const auto& k : keys) {
      auto it = records[i].find(k);
      std::string s;
      if (it != records[i].end()) {
        if (it->is_number_float()) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.6g", it->get<double>());
          s = buf;
        } else {
          s = cell(*it);
        }
      }
      row.push_back(s);
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width;
  for (const auto& k : keys) width.push_back(k.size());
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], std::min<std::size_t>(r[c].size(), 48));
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      std::string s = r[c].size() > 48 ? r[c].substr(0, 45) + "..." : r[c];
      os << (c ? "  " : "") << s << std::string(width[c] - s.size(), ' ');
    }
    os << "\n";
  };
  emit(keys);
  for (const auto& r : rows) emit(r);
  if (records.size() > shown) os << "... " << records.size() - shown << " more rows\n";
  return os.str();
}

}  // namespace gwht::cli
