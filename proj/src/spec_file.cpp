#include "degell/spec_file.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "degell/error.hpp"

namespace degell {

namespace {

struct Value {
  std::string text;  // leaf text, empty for lists
  bool is_list = false;
  std::vector<Value> items;
  int line = 0;
  int column = 0;  // 1-based column of the first character
};

struct Entry {
  Value value;
  int line = 0;
  int key_column = 0;
};

using Section = std::map<std::string, Entry>;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Trims [begin, end) in place, adjusting the start offset.
void trim(std::string_view text, std::size_t& begin, std::size_t& end) {
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
}

Value parse_value(std::string_view line_text, std::size_t begin, std::size_t end, int line) {
  trim(line_text, begin, end);
  Value value;
  value.line = line;
  value.column = static_cast<int>(begin) + 1;
  if (begin == end) throw ParseError("missing value", line, value.column);
  if (line_text[begin] != '[') {
    if (line_text[begin] == '"') {
      if (end - begin < 2 || line_text[end - 1] != '"') {
        throw ParseError("unterminated string", line, value.column);
      }
      ++begin;
      --end;
      value.column += 1;
    }
    value.text = std::string(line_text.substr(begin, end - begin));
    return value;
  }
  if (line_text[end - 1] != ']') throw ParseError("unterminated list", line, value.column);
  value.is_list = true;
  const std::size_t inner_begin = begin + 1;
  const std::size_t inner_end = end - 1;
  std::size_t b = inner_begin;
  std::size_t e = inner_end;
  trim(line_text, b, e);
  if (b == e) return value;
  int depth = 0;
  std::size_t start = inner_begin;
  for (std::size_t i = inner_begin; i <= inner_end; ++i) {
    const char c = i < inner_end ? line_text[i] : ',';
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') {
      if (--depth < 0) throw ParseError("unbalanced bracket", line, static_cast<int>(i) + 1);
    }
    if (c == ',' && depth == 0) {
      value.items.push_back(parse_value(line_text, start, i, line));
      start = i + 1;
    }
  }
  if (depth != 0) throw ParseError("unbalanced bracket", line, value.column);
  return value;
}

ScalarExpr expression(const Value& v) {
  if (v.is_list) throw ParseError("expected an expression, found a list", v.line, v.column);
  try {
    return ScalarExpr::parse(v.text);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), v.line, v.column + e.column() - 1);
  }
}

double number(const Value& v) {
  const auto value = expression(v).constant_value();
  if (!value) throw ParseError("expected a constant", v.line, v.column);
  if (!std::isfinite(*value)) throw ParseError("constant is not finite", v.line, v.column);
  return *value;
}

int integer(const Value& v) {
  const double d = number(v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ParseError("expected an integer", v.line, v.column);
  return static_cast<int>(d);
}

std::uint64_t unsigned_integer(const Value& v) {
  if (v.is_list) throw ParseError("expected an integer", v.line, v.column);
  std::uint64_t out = 0;
  const auto* first = v.text.data();
  const auto* last = first + v.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) throw ParseError("expected a nonnegative integer", v.line, v.column);
  return out;
}

std::string word(const Value& v) {
  if (v.is_list) throw ParseError("expected a word, found a list", v.line, v.column);
  return v.text;
}

const Value& as_list(const Value& v) {
  if (!v.is_list) throw ParseError("expected a bracketed list", v.line, v.column);
  return v;
}

std::vector<ScalarExpr> expression_list(const Value& v) {
  std::vector<ScalarExpr> out;
  for (const auto& item : as_list(v).items) out.push_back(expression(item));
  return out;
}

SubunitTuple field_list(const Value& v) {
  SubunitTuple out;
  for (const auto& item : as_list(v).items) out.emplace_back(expression_list(item));
  return out;
}

MatrixField matrix(const Value& v) {
  if (!v.is_list) return MatrixField::from_upper(1, {expression(v)});
  const auto& rows = v.items;
  const auto n = rows.size();
  if (n != 1 && n != 2) throw ParseError("matrix must be 1x1 or 2x2", v.line, v.column);
  for (const auto& row : rows) {
    if (!row.is_list || row.items.size() != n) {
      throw ParseError("matrix rows must be lists of equal length", row.line, row.column);
    }
  }
  if (n == 1) return MatrixField::from_upper(1, {expression(rows[0].items[0])});
  const ScalarExpr a12 = expression(rows[0].items[1]);
  const ScalarExpr a21 = expression(rows[1].items[0]);
  if (a12.source() != a21.source()) {
    throw ParseError("matrix must be symmetric: '" + a12.source() + "' differs from '" + a21.source() + "'",
                     rows[1].items[0].line, rows[1].items[0].column);
  }
  return MatrixField::from_upper(2, {expression(rows[0].items[0]), a12, expression(rows[1].items[1])});
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"domain", {"kind", "a", "b", "n", "x_range", "y_range", "nx", "ny", "bc"}},
      {"operator", {"P", "Q", "H", "G", "R", "S", "F"}},
      {"data", {"f", "g", "T", "u"}},
      {"exponents", {"t", "q", "omega", "sigma"}},
      {"numerics",
       {"seed", "trials", "negativity_trials", "tol_rank", "directions", "sample_points", "k", "C4"}},
  };
  return keys;
}

std::array<double, 2> range(const Value& v) {
  const auto& list = as_list(v);
  if (list.items.size() != 2) throw ParseError("range needs exactly two entries", v.line, v.column);
  return {number(list.items[0]), number(list.items[1])};
}

}  // namespace

ProblemSpec parse_problem(std::string_view text) {
  std::map<std::string, Section> sections;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    pos = eol + 1;

    std::size_t end = line.find('#');
    if (end == std::string_view::npos) end = line.size();
    std::size_t begin = 0;
    trim(line, begin, end);
    if (begin == end) continue;

    if (line[begin] == '[') {
      if (line[end - 1] != ']') throw ParseError("unterminated section header", line_no, static_cast<int>(begin) + 1);
      std::size_t nb = begin + 1;
      std::size_t ne = end - 1;
      trim(line, nb, ne);
      current = std::string(line.substr(nb, ne - nb));
      if (!known_keys().contains(current)) {
        throw ParseError("unknown section '" + current + "'", line_no, static_cast<int>(nb) + 1);
      }
      if (sections.contains(current)) {
        throw ParseError("duplicate section '" + current + "'", line_no, static_cast<int>(nb) + 1);
      }
      sections[current];
      continue;
    }

    const std::size_t eq = line.find('=', begin);
    if (eq == std::string_view::npos || eq >= end) {
      throw ParseError("expected 'key = value'", line_no, static_cast<int>(begin) + 1);
    }
    if (current.empty()) throw ParseError("key outside of any section", line_no, static_cast<int>(begin) + 1);
    std::size_t kb = begin;
    std::size_t ke = eq;
    trim(line, kb, ke);
    const std::string key(line.substr(kb, ke - kb));
    if (!known_keys().at(current).contains(key)) {
      throw ParseError("unknown key '" + key + "' in [" + current + "]", line_no, static_cast<int>(kb) + 1);
    }
    auto& section = sections[current];
    if (section.contains(key)) {
      throw ParseError("duplicate key '" + key + "'", line_no, static_cast<int>(kb) + 1);
    }
    section[key] = Entry{parse_value(line, eq + 1, end, line_no), line_no, static_cast<int>(kb) + 1};
  }

  auto find = [&](const std::string& s, const std::string& key) -> const Value* {
    const auto it = sections.find(s);
    if (it == sections.end()) return nullptr;
    const auto kt = it->second.find(key);
    return kt == it->second.end() ? nullptr : &kt->second.value;
  };

  ProblemSpec p;
  if (!sections.contains("domain")) throw ParseError("missing [domain] section", line_no, 1);

  std::string kind = "interval";
  if (const auto* v = find("domain", "kind")) kind = word(*v);
  if (kind == "interval") {
    p.domain.kind = DomainSpec::Kind::Interval;
    const Value* a = find("domain", "a");
    const Value* b = find("domain", "b");
    if (const auto* r = find("domain", "x_range")) {
      p.domain.x_range = range(*r);
    } else {
      if (!a || !b) throw ParseError("interval domain needs a and b (or x_range)", line_no, 1);
      p.domain.x_range = {number(*a), number(*b)};
    }
    if (const auto* n = find("domain", "n")) p.domain.nx = integer(*n);
    else if (const auto* nx = find("domain", "nx")) p.domain.nx = integer(*nx);
    p.domain.ny = 1;
  } else if (kind == "rect") {
    p.domain.kind = DomainSpec::Kind::Rect;
    const Value* xr = find("domain", "x_range");
    const Value* yr = find("domain", "y_range");
    if (!xr || !yr) throw ParseError("rect domain needs x_range and y_range", line_no, 1);
    p.domain.x_range = range(*xr);
    p.domain.y_range = range(*yr);
    if (const auto* n = find("domain", "n")) p.domain.nx = p.domain.ny = integer(*n);
    if (const auto* nx = find("domain", "nx")) p.domain.nx = integer(*nx);
    if (const auto* ny = find("domain", "ny")) p.domain.ny = integer(*ny);
  } else {
    const auto* v = find("domain", "kind");
    throw ParseError("domain kind must be 'interval' or 'rect'", v->line, v->column);
  }
  if (const auto* v = find("domain", "bc")) {
    const std::string bc = word(*v);
    if (bc == "neumann") p.bc = BoundaryKind::Neumann;
    else if (bc == "dirichlet") p.bc = BoundaryKind::Dirichlet;
    else throw ParseError("bc must be 'neumann' or 'dirichlet'", v->line, v->column);
  }

  const int dim = p.domain.dimension();
  p.P = MatrixField::identity(dim);
  if (const auto* v = find("operator", "P")) p.P = matrix(*v);
  p.Q = p.P;
  if (const auto* v = find("operator", "Q")) p.Q = matrix(*v);
  if (const auto* v = find("operator", "H")) p.H = expression_list(*v);
  if (const auto* v = find("operator", "G")) p.G = expression_list(*v);
  if (const auto* v = find("operator", "R")) p.R = field_list(*v);
  if (const auto* v = find("operator", "S")) p.S = field_list(*v);
  if (const auto* v = find("operator", "F")) p.F = expression(*v);

  if (const auto* v = find("data", "f")) p.f = expression(*v);
  if (const auto* v = find("data", "g")) p.g = expression_list(*v);
  if (const auto* v = find("data", "T")) p.T = field_list(*v);
  if (const auto* v = find("data", "u")) p.candidate = expression(*v);

  if (const auto* v = find("exponents", "t")) p.exponents.t = number(*v);
  if (const auto* v = find("exponents", "q")) p.exponents.q = number(*v);
  if (const auto* v = find("exponents", "omega")) p.exponents.omega = number(*v);
  if (const auto* v = find("exponents", "sigma")) p.exponents.sigma = number(*v);

  auto positive = [](const Value& v, int value) {
    if (value < 1) throw ParseError("expected a positive integer", v.line, v.column);
    return value;
  };
  auto& num = p.numerics;
  if (const auto* v = find("numerics", "seed")) num.seed = unsigned_integer(*v);
  if (const auto* v = find("numerics", "trials")) num.trials = positive(*v, integer(*v));
  if (const auto* v = find("numerics", "negativity_trials")) num.negativity_trials = positive(*v, integer(*v));
  if (const auto* v = find("numerics", "tol_rank")) num.tol_rank = number(*v);
  if (const auto* v = find("numerics", "directions")) num.directions = positive(*v, integer(*v));
  if (const auto* v = find("numerics", "sample_points")) num.sample_points = positive(*v, integer(*v));
  if (const auto* v = find("numerics", "k")) num.eigen_count = positive(*v, integer(*v));
  if (const auto* v = find("numerics", "C4")) num.poincare_constant = number(*v);

  p.validate();
  return p;
}

ProblemSpec load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem(buffer.str());
}

}  // namespace degell
