#include "oswr/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "oswr/error.hpp"

namespace oswr {

bool Box::contains(double x, double y, double tol) const {
  const bool in_x = x >= x0 - tol && x <= x1 + tol;
  if (dim == 1) return in_x;
  return in_x && y >= y0 - tol && y <= y1 + tol;
}

const SubdomainSpec &ExperimentConfig::subdomain(int id) const {
  for (const auto &s : subdomains) {
    if (s.id == id) return s;
  }
  throw ValidationError("no subdomain with id " + std::to_string(id));
}

const TransmissionSpec *ExperimentConfig::transmission(int from, int to) const {
  for (const auto &t : transmissions) {
    if (t.from == from && t.to == to) return &t;
  }
  return nullptr;
}

TransmissionSpec *ExperimentConfig::transmission(int from, int to) {
  for (auto &t : transmissions) {
    if (t.from == from && t.to == to) return &t;
  }
  return nullptr;
}

namespace {

enum class Section { none, domain, subdomain, transmission };

struct Value {
  std::string text;
  int line = 0;
  int column = 0;  // column of the first character of `text`
  bool quoted = false;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const Value &v, std::string_view token, int offset) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError("expected a number, got '" + std::string(token) + "'",
                     v.line, v.column + offset);
  }
  return out;
}

std::vector<double> numbers(const Value &v) {
  std::vector<double> out;
  std::string_view s = v.text;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    if (pos >= s.size()) break;
    std::size_t end = pos;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
    out.push_back(to_double(v, s.substr(pos, end - pos), static_cast<int>(pos)));
    pos = end;
  }
  return out;
}

double number(const Value &v) {
  auto list = numbers(v);
  if (list.size() != 1) {
    throw ParseError("expected a single number", v.line, v.column);
  }
  return list.front();
}

int integer(const Value &v) {
  const double d = number(v);
  if (d != static_cast<double>(static_cast<int>(d))) {
    throw ParseError("expected an integer", v.line, v.column);
  }
  return static_cast<int>(d);
}

Expression expression(const Value &v) {
  try {
    return Expression::parse(v.text);
  } catch (const ParseError &e) {
    // Re-anchor the expression-relative column onto the config line.
    std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ParseError("in expression: " + msg, v.line,
                     v.column + std::max(e.column(), 1) - 1);
  }
}

Box box(const Value &v, int expected_dim) {
  auto c = numbers(v);
  Box b;
  if (c.size() == 2) {
    b.dim = 1;
    b.x0 = c[0];
    b.x1 = c[1];
  } else if (c.size() == 4) {
    b.dim = 2;
    b.x0 = c[0];
    b.x1 = c[1];
    b.y0 = c[2];
    b.y1 = c[3];
  } else {
    throw ParseError("box needs 2 (1D) or 4 (2D) numbers", v.line, v.column);
  }
  if (expected_dim != 0 && b.dim != expected_dim) {
    throw ParseError("dimension mismatch: box is " + std::to_string(b.dim) +
                         "D but the domain is " + std::to_string(expected_dim) + "D",
                     v.line, v.column);
  }
  if (b.x1 <= b.x0 || (b.dim == 2 && b.y1 <= b.y0)) {
    throw ParseError("degenerate box", v.line, v.column);
  }
  return b;
}

using Entries = std::map<std::string, Value>;

struct RawSection {
  Section kind = Section::none;
  int line = 0;
  Entries entries;
};

const std::set<std::string> &allowed_keys(Section s) {
  static const std::set<std::string> domain = {
      "box", "T", "windows", "tolerance", "max_iterations", "initial_guess",
      "u0", "f", "exterior_p", "snapshots"};
  static const std::set<std::string> subdomain = {
      "id", "box", "nu", "bx", "by", "c", "omega", "nx", "ny", "nt", "degree"};
  static const std::set<std::string> transmission = {"from", "to", "p",
                                                     "q",    "r",  "s"};
  static const std::set<std::string> none;
  switch (s) {
    case Section::domain: return domain;
    case Section::subdomain: return subdomain;
    case Section::transmission: return transmission;
    default: return none;
  }
}

const Value *find(const Entries &e, const std::string &key) {
  auto it = e.find(key);
  return it == e.end() ? nullptr : &it->second;
}

std::vector<RawSection> tokenize(std::string_view text) {
  std::vector<RawSection> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    // Strip a comment that is not inside quotes.
    bool in_quote = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') in_quote = !in_quote;
      if (raw[i] == '#' && !in_quote) {
        raw = raw.substr(0, i);
        break;
      }
    }
    const std::string_view line = trim(raw);
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    const int line_offset = static_cast<int>(line.data() - raw.data());

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError("unterminated section header", line_no, line_offset + 1);
      }
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      RawSection s;
      s.line = line_no;
      if (name == "domain") {
        s.kind = Section::domain;
      } else if (name == "subdomain") {
        s.kind = Section::subdomain;
      } else if (name == "transmission") {
        s.kind = Section::transmission;
      } else {
        throw ParseError("unknown section '" + std::string(name) + "'", line_no,
                         line_offset + 2);
      }
      sections.push_back(std::move(s));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_no, line_offset + 1);
    }
    if (sections.empty()) {
      throw ParseError("key outside of any section", line_no, line_offset + 1);
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError("missing key", line_no, line_offset + 1);
    RawSection &cur = sections.back();
    if (!allowed_keys(cur.kind).count(key)) {
      throw ParseError("unknown key '" + key + "'", line_no, line_offset + 1);
    }
    if (cur.entries.count(key)) {
      throw ParseError("duplicate key '" + key + "'", line_no, line_offset + 1);
    }

    std::string_view rest = line.substr(eq + 1);
    const std::size_t lead = rest.find_first_not_of(" \t");
    Value v;
    v.line = line_no;
    if (lead == std::string_view::npos) {
      throw ParseError("missing value for '" + key + "'", line_no,
                       line_offset + static_cast<int>(eq) + 2);
    }
    v.column = line_offset + static_cast<int>(eq) + 1 + static_cast<int>(lead) + 1;
    std::string_view value = trim(rest);
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        throw ParseError("unterminated string", line_no, v.column);
      }
      value = value.substr(1, value.size() - 2);
      v.quoted = true;
      v.column += 1;
    }
    v.text = std::string(value);
    cur.entries.emplace(key, std::move(v));
    if (eol == text.size()) break;
  }
  return sections;
}

void require(const Entries &e, const std::string &key, const RawSection &s,
             const char *section) {
  if (!find(e, key)) {
    throw ParseError("missing mandatory key '" + key + "' in [" + section + "]",
                     s.line, 0);
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string format_box(const Box &b) {
  std::string s = format_number(b.x0) + " " + format_number(b.x1);
  if (b.dim == 2) s += " " + format_number(b.y0) + " " + format_number(b.y1);
  return s;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  const auto sections = tokenize(text);
  ExperimentConfig cfg;

  const RawSection *domain = nullptr;
  for (const auto &s : sections) {
    if (s.kind != Section::domain) continue;
    if (domain) throw ParseError("duplicate [domain] section", s.line, 0);
    domain = &s;
  }
  if (!domain) throw ParseError("missing mandatory [domain] section", 0, 0);

  const Entries &d = domain->entries;
  require(d, "box", *domain, "domain");
  require(d, "T", *domain, "domain");
  cfg.domain = box(*find(d, "box"), 0);
  const int dim = cfg.domain.dim;
  cfg.T = number(*find(d, "T"));
  if (auto v = find(d, "windows")) cfg.windows = integer(*v);
  if (auto v = find(d, "tolerance")) cfg.tolerance = number(*v);
  if (auto v = find(d, "max_iterations")) cfg.max_iterations = integer(*v);
  if (auto v = find(d, "initial_guess")) {
    if (v->text == "zero") {
      cfg.initial_guess = InitialGuess::zero;
    } else if (v->text == "from_u0") {
      cfg.initial_guess = InitialGuess::from_u0;
    } else {
      throw ParseError("initial_guess must be 'zero' or 'from_u0'", v->line,
                       v->column);
    }
  }
  if (auto v = find(d, "u0")) cfg.u0 = expression(*v);
  if (auto v = find(d, "f")) cfg.f = expression(*v);
  if (auto v = find(d, "exterior_p")) cfg.exterior_p = number(*v);
  if (auto v = find(d, "snapshots")) cfg.snapshots = numbers(*v);

  for (const auto &s : sections) {
    const Entries &e = s.entries;
    if (s.kind == Section::subdomain) {
      SubdomainSpec sub;
      require(e, "id", s, "subdomain");
      require(e, "box", s, "subdomain");
      sub.id = integer(*find(e, "id"));
      sub.box = box(*find(e, "box"), dim);
      if (auto v = find(e, "nu")) sub.nu = expression(*v);
      if (auto v = find(e, "bx")) sub.bx = expression(*v);
      if (auto v = find(e, "by")) {
        if (dim == 1) {
          throw ParseError("dimension mismatch: 'by' given for a 1D domain",
                           v->line, v->column);
        }
        sub.by = expression(*v);
      }
      if (auto v = find(e, "c")) sub.c = expression(*v);
      if (auto v = find(e, "omega")) sub.omega = expression(*v);
      if (auto v = find(e, "nx")) sub.nx = integer(*v);
      if (auto v = find(e, "ny")) {
        if (dim == 1) {
          throw ParseError("dimension mismatch: 'ny' given for a 1D domain",
                           v->line, v->column);
        }
        sub.ny = integer(*v);
      }
      if (dim == 1) sub.ny = 1;
      if (auto v = find(e, "nt")) sub.nt = integer(*v);
      if (auto v = find(e, "degree")) sub.degree = integer(*v);
      for (const auto &other : cfg.subdomains) {
        if (other.id == sub.id) {
          throw ParseError("duplicate subdomain id " + std::to_string(sub.id),
                           s.line, 0);
        }
      }
      cfg.subdomains.push_back(std::move(sub));
    } else if (s.kind == Section::transmission) {
      TransmissionSpec t;
      require(e, "from", s, "transmission");
      require(e, "to", s, "transmission");
      t.from = integer(*find(e, "from"));
      t.to = integer(*find(e, "to"));
      if (auto v = find(e, "p")) t.p = number(*v);
      if (auto v = find(e, "q")) t.q = number(*v);
      if (auto v = find(e, "r")) t.r = expression(*v);
      if (auto v = find(e, "s")) t.s = number(*v);
      if (cfg.transmission(t.from, t.to)) {
        throw ParseError("duplicate transmission section " +
                             std::to_string(t.from) + " -> " + std::to_string(t.to),
                         s.line, 0);
      }
      cfg.transmissions.push_back(std::move(t));
    }
  }

  if (cfg.subdomains.empty()) {
    throw ParseError("missing mandatory [subdomain] sections", 0, 0);
  }
  if (cfg.subdomains.size() > 1 && cfg.transmissions.empty()) {
    throw ParseError("missing mandatory [transmission] sections", 0, 0);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig &cfg) {
  std::ostringstream os;
  os << "[domain]\n";
  os << "box = " << format_box(cfg.domain) << "\n";
  os << "T = " << format_number(cfg.T) << "\n";
  os << "windows = " << cfg.windows << "\n";
  os << "tolerance = " << format_number(cfg.tolerance) << "\n";
  os << "max_iterations = " << cfg.max_iterations << "\n";
  os << "initial_guess = "
     << (cfg.initial_guess == InitialGuess::zero ? "zero" : "from_u0") << "\n";
  os << "u0 = \"" << cfg.u0.to_string() << "\"\n";
  os << "f = \"" << cfg.f.to_string() << "\"\n";
  os << "exterior_p = " << format_number(cfg.exterior_p) << "\n";
  if (!cfg.snapshots.empty()) {
    os << "snapshots =";
    for (double t : cfg.snapshots) os << " " << format_number(t);
    os << "\n";
  }
  for (const auto &s : cfg.subdomains) {
    os << "\n[subdomain]\n";
    os << "id = " << s.id << "\n";
    os << "box = " << format_box(s.box) << "\n";
    os << "nu = \"" << s.nu.to_string() << "\"\n";
    os << "bx = \"" << s.bx.to_string() << "\"\n";
    if (cfg.domain.dim == 2) os << "by = \"" << s.by.to_string() << "\"\n";
    os << "c = \"" << s.c.to_string() << "\"\n";
    os << "omega = \"" << s.omega.to_string() << "\"\n";
    os << "nx = " << s.nx << "\n";
    if (cfg.domain.dim == 2) os << "ny = " << s.ny << "\n";
    os << "nt = " << s.nt << "\n";
    os << "degree = " << s.degree << "\n";
  }
  for (const auto &t : cfg.transmissions) {
    os << "\n[transmission]\n";
    os << "from = " << t.from << "\n";
    os << "to = " << t.to << "\n";
    os << "p = " << format_number(t.p) << "\n";
    os << "q = " << format_number(t.q) << "\n";
    os << "r = \"" << t.r.to_string() << "\"\n";
    os << "s = " << format_number(t.s) << "\n";
  }
  return os.str();
}

}  // namespace oswr
