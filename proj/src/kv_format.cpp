#include "ph3/kv_format.hpp"

#include "ph3/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ph3::kv {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const Entry& e, const std::string& what) {
  throw FormatError("line " + std::to_string(e.line) + ": key '" + e.key + "': " + what);
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) {
    if (!t.empty() && t.back() == ',') t.pop_back();
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

template <class T>
T parse_number(const Entry& e, const std::string& text) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) bad(e, "cannot parse '" + text + "'");
  return v;
}

}  // namespace

const Entry* Section::find(const std::string& key) const {
  const Entry* hit = nullptr;
  for (const auto& e : entries)
    if (e.key == key) hit = &e;
  return hit;
}

const std::string& Section::require(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) {
    const std::string where = name.empty() ? "" : " in section [" + name + "]";
    throw FormatError("missing required key '" + key + "'" + where);
  }
  return e->value;
}

void Section::reject_unknown(const std::vector<std::string>& allowed) const {
  for (const auto& e : entries) {
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
      const std::string where = name.empty() ? "" : " in section [" + name + "]";
      throw FormatError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "'" + where);
    }
  }
}

std::vector<const Section*> Document::all(const std::string& name) const {
  std::vector<const Section*> out;
  for (const auto& s : sections)
    if (s.name == name) out.push_back(&s);
  return out;
}

Document parse(const std::string& text, const std::string& origin) {
  Document doc;
  doc.origin = origin;
  doc.sections.push_back(Section{"", 0, {}});
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw FormatError(origin + ":" + std::to_string(line) + ": unterminated section header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name.empty()) throw FormatError(origin + ":" + std::to_string(line) + ": empty section name");
      doc.sections.push_back(Section{name, line, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw FormatError(origin + ":" + std::to_string(line) + ": expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw FormatError(origin + ":" + std::to_string(line) + ": empty key");
    auto& section = doc.sections.back();
    for (const auto& e : section.entries)
      if (e.key == key) throw FormatError(origin + ":" + std::to_string(line) + ": duplicate key '" + key + "'");
    section.entries.push_back(Entry{key, trim(s.substr(eq + 1)), line});
  }
  return doc;
}

Document read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str(), path);
}

std::string write(const Document& doc) {
  std::ostringstream os;
  bool first = true;
  for (const auto& section : doc.sections) {
    if (section.name.empty() && section.entries.empty()) continue;
    if (!section.name.empty()) {
      if (!first) os << '\n';
      os << '[' << section.name << "]\n";
    }
    for (const auto& e : section.entries) os << e.key << " = " << e.value << '\n';
    first = false;
  }
  return os.str();
}

double to_double(const Entry& e) {
  const double v = parse_number<double>(e, e.value);
  if (!std::isfinite(v)) bad(e, "value must be finite");
  return v;
}

std::int64_t to_int(const Entry& e) { return parse_number<std::int64_t>(e, e.value); }

std::uint64_t to_uint(const Entry& e) { return parse_number<std::uint64_t>(e, e.value); }

std::vector<double> to_doubles(const Entry& e) {
  std::vector<double> out;
  for (const auto& t : tokens(e.value)) {
    const double v = parse_number<double>(e, t);
    if (!std::isfinite(v)) bad(e, "value must be finite");
    out.push_back(v);
  }
  return out;
}

std::vector<std::int64_t> to_ints(const Entry& e) {
  std::vector<std::int64_t> out;
  for (const auto& t : tokens(e.value)) out.push_back(parse_number<std::int64_t>(e, t));
  return out;
}

bool to_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  bad(e, "expected true or false");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace ph3::kv
