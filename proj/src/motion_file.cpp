#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hmotion/error.hpp"
#include "hmotion/motion.hpp"

namespace hmotion {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
  std::size_t value_column = 0;  // 1-based column of the first value char
  std::size_t key_column = 0;
};

struct Section {
  std::string name;
  std::size_t line = 0;
  std::map<std::string, Entry> entries;
};

std::string_view trim(std::string_view s, std::size_t* lead = nullptr) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  if (lead) *lead = a;
  return s.substr(a, b - a);
}

std::vector<Section> split_sections(std::string_view text) {
  std::vector<Section> sections;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const std::size_t hash = raw.find_first_of("#;");
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::size_t lead = 0;
    const std::string_view line = trim(raw, &lead);
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, lead + line.size(), "expected ']'");
      Section s;
      s.name = std::string(trim(line.substr(1, line.size() - 2)));
      s.line = line_no;
      for (const auto& prev : sections) {
        if (prev.name == s.name) throw ParseError(line_no, lead + 1, "duplicate section [" + s.name + "]");
      }
      sections.push_back(std::move(s));
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, lead + 1, "expected 'key = value'");
      if (sections.empty()) throw ParseError(line_no, lead + 1, "entry outside of any section");
      const std::string key(trim(line.substr(0, eq)));
      std::size_t vlead = 0;
      const std::string_view value = trim(line.substr(eq + 1), &vlead);
      if (key.empty()) throw ParseError(line_no, lead + 1, "empty key");
      if (value.empty()) throw ParseError(line_no, lead + eq + 2, "empty value for '" + key + "'");
      auto& entries = sections.back().entries;
      if (entries.count(key)) throw ParseError(line_no, lead + 1, "duplicate key '" + key + "'");
      entries[key] = Entry{std::string(value), line_no, lead + eq + 2 + vlead, lead + 1};
    }
    if (eol == text.size()) break;
  }
  return sections;
}

void reject_unknown(const Section& s, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, entry] : s.entries) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw ParseError(entry.line, entry.key_column, "unknown key '" + key + "' in [" + s.name + "]");
  }
}

const Entry& require(const Section& s, const std::string& key) {
  const auto it = s.entries.find(key);
  if (it == s.entries.end()) throw ParseError(s.line, 1, "[" + s.name + "] is missing '" + key + "'");
  return it->second;
}

cplx constant_of(const Entry& e) { return parse_constant(e.value, e.line, e.value_column - 1); }

double real_of(const Entry& e) {
  const cplx c = constant_of(e);
  if (c.imag() != 0.0) throw ParseError(e.line, e.value_column, "expected a real number");
  return c.real();
}

// Top-level comma split with column bookkeeping.
std::vector<std::pair<std::string, std::size_t>> split_list(const Entry& e) {
  std::vector<std::pair<std::string, std::size_t>> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= e.value.size(); ++k) {
    const char c = k < e.value.size() ? e.value[k] : ',';
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      std::size_t lead = 0;
      const std::string_view item = trim(std::string_view(e.value).substr(start, k - start), &lead);
      if (item.empty()) throw ParseError(e.line, e.value_column + start, "empty list item");
      out.emplace_back(std::string(item), e.value_column + start + lead);
      start = k + 1;
    }
  }
  return out;
}

std::vector<cplx> constants_of(const Entry& e) {
  std::vector<cplx> out;
  for (const auto& [item, column] : split_list(e)) out.push_back(parse_constant(item, e.line, column - 1));
  return out;
}

ParameterDomain parse_domain(const Section& s, const Tolerances& tol) {
  reject_unknown(s, {"kind", "center", "radius", "inner", "puncture", "punctures", "basepoint"});
  const Entry& kind_entry = require(s, "kind");
  DomainKind kind;
  try {
    kind = domain_kind_from_string(kind_entry.value);
  } catch (const Error& e) {
    throw ParseError(kind_entry.line, kind_entry.value_column, e.what());
  }
  const cplx center = s.entries.count("center") ? constant_of(s.entries.at("center")) : cplx(0.0);
  const double radius = s.entries.count("radius") ? real_of(s.entries.at("radius")) : 1.0;
  const cplx x0 = constant_of(require(s, "basepoint"));
  try {
    switch (kind) {
      case DomainKind::Disk:
        return ParameterDomain::disk(center, radius, x0, tol);
      case DomainKind::PuncturedDisk: {
        const cplx p = s.entries.count("puncture") ? constant_of(s.entries.at("puncture")) : center;
        return ParameterDomain::punctured_disk(center, radius, p, x0, tol);
      }
      case DomainKind::Annulus:
        return ParameterDomain::annulus(center, real_of(require(s, "inner")), radius, x0, tol);
      case DomainKind::FinitelyPuncturedDisk:
        return ParameterDomain::finitely_punctured_disk(center, radius,
                                                        constants_of(require(s, "punctures")), x0, tol);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(s.line, 1, std::string("invalid domain: ") + e.what());
  }
  throw ParseError(s.line, 1, "invalid domain");
}

}  // namespace

MotionFile parse_motion_file(std::string_view text, const Tolerances& tol) {
  const auto sections = split_sections(text);
  const Section* domain_section = nullptr;
  const Section* base_section = nullptr;
  const Section* motion_section = nullptr;
  const Section* extend_section = nullptr;
  std::map<std::size_t, const Section*> strand_sections;
  for (const auto& s : sections) {
    if (s.name == "domain") {
      domain_section = &s;
    } else if (s.name == "base") {
      base_section = &s;
    } else if (s.name == "motion") {
      motion_section = &s;
    } else if (s.name == "extend") {
      extend_section = &s;
    } else if (s.name.rfind("strand.", 0) == 0) {
      const std::string idx = s.name.substr(7);
      if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError(s.line, 1, "malformed strand section [" + s.name + "]");
      }
      strand_sections[std::stoul(idx)] = &s;
    } else {
      throw ParseError(s.line, 1, "unknown section [" + s.name + "]");
    }
  }
  if (!domain_section) throw ParseError(1, 1, "missing [domain] section");
  if (!base_section) throw ParseError(1, 1, "missing [base] section");

  std::string name;
  if (motion_section) {
    reject_unknown(*motion_section, {"name"});
    if (motion_section->entries.count("name")) name = motion_section->entries.at("name").value;
  }

  ParameterDomain domain = parse_domain(*domain_section, tol);

  reject_unknown(*base_section, {"points"});
  const Entry& points_entry = require(*base_section, "points");
  const auto points = constants_of(points_entry);
  Configuration base = [&] {
    try {
      return make_configuration(std::span<const cplx>(points), tol);
    } catch (const Error& e) {
      throw ParseError(points_entry.line, points_entry.value_column, std::string("invalid base: ") + e.what());
    }
  }();

  std::vector<StrandSpec> strands;
  for (std::size_t index = 2; index < base.size(); ++index) {
    const auto it = strand_sections.find(index);
    if (it == strand_sections.end()) {
      throw ParseError(base_section->line, 1, "missing [strand." + std::to_string(index) + "]");
    }
    const Section& s = *it->second;
    reject_unknown(s, {"expr", "poly", "root"});
    if (s.entries.count("expr")) {
      if (s.entries.count("poly") || s.entries.count("root")) {
        throw ParseError(s.line, 1, "strand has both 'expr' and 'poly'");
      }
      const Entry& e = s.entries.at("expr");
      strands.push_back(StrandSpec::closed_form(parse_expression(e.value, false, e.line, e.value_column - 1)));
    } else {
      const Entry& e = require(s, "poly");
      Expr poly = parse_expression(e.value, true, e.line, e.value_column - 1);
      if (poly.variable_degree() < 1) {
        throw ParseError(e.line, e.value_column, "'poly' must be a polynomial of degree >= 1 in z");
      }
      const cplx root = s.entries.count("root") ? constant_of(s.entries.at("root")) : base[index];
      strands.push_back(StrandSpec::algebraic_root(std::move(poly), root));
    }
    strand_sections.erase(it);
  }
  if (!strand_sections.empty()) {
    const Section& extra = *strand_sections.begin()->second;
    throw ParseError(extra.line, 1, "[" + extra.name + "] does not match a moving puncture");
  }

  MotionFile file{name, MotionFamily(std::move(domain), std::move(base), std::move(strands), tol), {}, {}};
  if (extend_section) {
    reject_unknown(*extend_section, {"points", "degrees"});
    if (extend_section->entries.count("points")) {
      file.extend_points = constants_of(extend_section->entries.at("points"));
    }
    if (extend_section->entries.count("degrees")) {
      const Entry& e = extend_section->entries.at("degrees");
      for (const auto& [item, column] : split_list(e)) {
        if (item.find_first_not_of("0123456789") != std::string::npos || item.size() > 3) {
          throw ParseError(e.line, column, "degree must be a small positive integer");
        }
        const int d = std::stoi(item);
        if (d < 1) throw ParseError(e.line, column, "degree must be positive");
        file.degree_schedule.push_back(d);
      }
    }
  }
  return file;
}

MotionFile load_motion_file(const std::string& path, const Tolerances& tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open motion file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_motion_file(buf.str(), tol);
}

std::string format_motion_file(const MotionFile& file) {
  const MotionFamily& f = file.family;
  const ParameterDomain& d = f.domain();
  std::ostringstream os;
  if (!file.name.empty()) os << "[motion]\nname = " << file.name << "\n\n";
  os << "[domain]\nkind = " << to_string(d.kind()) << "\n";
  os << "center = " << format_constant(d.center()) << "\n";
  os << "radius = " << format_constant(d.outer_radius()) << "\n";
  if (d.kind() == DomainKind::Annulus) os << "inner = " << format_constant(d.inner_radius()) << "\n";
  if (d.kind() == DomainKind::PuncturedDisk) os << "puncture = " << format_constant(d.punctures().front()) << "\n";
  if (d.kind() == DomainKind::FinitelyPuncturedDisk) {
    os << "punctures = ";
    for (std::size_t k = 0; k < d.punctures().size(); ++k) {
      os << (k ? ", " : "") << format_constant(d.punctures()[k]);
    }
    os << "\n";
  }
  os << "basepoint = " << format_constant(d.basepoint()) << "\n\n[base]\npoints = ";
  for (std::size_t k = 0; k < f.base().size(); ++k) os << (k ? ", " : "") << format_constant(f.base()[k]);
  os << "\n";
  for (std::size_t k = 0; k < f.strands().size(); ++k) {
    const StrandSpec& s = f.strands()[k];
    os << "\n[strand." << k + 2 << "]\n";
    if (s.is_closed_form()) {
      os << "expr = " << s.expr().to_string() << "\n";
    } else {
      os << "poly = " << s.polynomial().to_string() << "\nroot = " << format_constant(s.anchor()) << "\n";
    }
  }
  if (!file.extend_points.empty() || !file.degree_schedule.empty()) {
    os << "\n[extend]\n";
    if (!file.extend_points.empty()) {
      os << "points = ";
      for (std::size_t k = 0; k < file.extend_points.size(); ++k) {
        os << (k ? ", " : "") << format_constant(file.extend_points[k]);
      }
      os << "\n";
    }
    if (!file.degree_schedule.empty()) {
      os << "degrees = ";
      for (std::size_t k = 0; k < file.degree_schedule.size(); ++k) {
        os << (k ? ", " : "") << file.degree_schedule[k];
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace hmotion
