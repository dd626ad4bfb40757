#include "ph3/map_io.hpp"

#include "ph3/catalog.hpp"

namespace ph3 {
namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + kv::format_double(v[i]);
  return s;
}

kv::Section shear_section(const std::string& name, const ShearStep& s) {
  kv::Section sec{name, 0, {}};
  sec.entries.push_back({"j", std::to_string(s.source + 1), 0});
  sec.entries.push_back({"k", std::to_string(s.target + 1), 0});
  sec.entries.push_back({"epsilon", kv::format_double(s.epsilon), 0});
  sec.entries.push_back({"cos", join(s.profile.cos_coeffs), 0});
  sec.entries.push_back({"sin", join(s.profile.sin_coeffs), 0});
  return sec;
}

ShearStep read_shear(const kv::Section& sec) {
  sec.reject_unknown({"j", "k", "epsilon", "cos", "sin"});
  sec.require("j");
  sec.require("k");
  sec.require("epsilon");
  ShearStep s;
  s.source = static_cast<int>(kv::to_int(*sec.find("j"))) - 1;
  s.target = static_cast<int>(kv::to_int(*sec.find("k"))) - 1;
  s.epsilon = kv::to_double(*sec.find("epsilon"));
  if (const auto* e = sec.find("cos")) s.profile.cos_coeffs = kv::to_doubles(*e);
  if (const auto* e = sec.find("sin")) s.profile.sin_coeffs = kv::to_doubles(*e);
  s.validate();
  return s;
}

}  // namespace

kv::Document map_to_document(const TorusMapSpec& spec) {
  kv::Document doc;
  doc.sections.push_back(kv::Section{"", 0, {}});
  if (!spec.name.empty()) doc.sections[0].entries.push_back({"name", spec.name, 0});
  kv::Section lin{"linear", 0, {}};
  std::string entries;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) entries += (r + c ? " " : "") + std::to_string(spec.linear_part(r, c));
  lin.entries.push_back({"entries", entries, 0});
  doc.sections.push_back(lin);
  for (const auto& s : spec.pre_shears) doc.sections.push_back(shear_section("shear", s));
  for (const auto& s : spec.conjugator) doc.sections.push_back(shear_section("conjugator", s));
  return doc;
}

TorusMapSpec map_from_document(const kv::Document& doc) {
  TorusMapSpec spec;
  doc.root().reject_unknown({"name"});
  if (const auto* e = doc.root().find("name")) spec.name = e->value;
  const auto linear = doc.all("linear");
  if (linear.size() != 1) throw FormatError(doc.origin + ": expected exactly one [linear] section");
  linear[0]->reject_unknown({"entries"});
  linear[0]->require("entries");
  const auto values = kv::to_ints(*linear[0]->find("entries"));
  if (values.size() != 9) throw FormatError(doc.origin + ": [linear] entries needs 9 integers");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) spec.linear_part(r, c) = values[3 * r + c];
  if (!spec.linear_part.unimodular()) throw FormatError(doc.origin + ": linear part must have det +-1");
  for (const auto& sec : doc.sections) {
    if (sec.name.empty() || sec.name == "linear") continue;
    if (sec.name == "shear") spec.pre_shears.push_back(read_shear(sec));
    else if (sec.name == "conjugator") spec.conjugator.push_back(read_shear(sec));
    else throw FormatError(doc.origin + ":" + std::to_string(sec.line) + ": unknown section [" + sec.name + "]");
  }
  return spec;
}

std::string write_map_spec(const TorusMapSpec& spec) { return kv::write(map_to_document(spec)); }

TorusMapSpec parse_map_spec(const std::string& text, const std::string& origin) {
  return map_from_document(kv::parse(text, origin));
}

TorusMapSpec read_map_spec(const std::string& path) { return map_from_document(kv::read_file(path)); }

TorusMapSpec resolve_map(const std::string& reference) {
  constexpr std::string_view prefix = "builtin:";
  if (reference.rfind(prefix, 0) == 0) return builtin_map(reference.substr(prefix.size()));
  return read_map_spec(reference);
}

}  // namespace ph3
