#include "summands/taskfile.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "summands/expr.hpp"

namespace summands {

TaskFileError::TaskFileError(ErrorCode code, size_t line, size_t column, std::string message, std::string source_line)
    : Error(code, std::move(message)), line_(line), column_(column), source_line_(std::move(source_line)) {}

std::string TaskFileError::render(const std::string& filename) const {
  std::ostringstream os;
  os << filename << ":" << line_ << ":" << column_ << ": "
     << (code() == ErrorCode::SyntaxError ? "syntax error" : "error") << ": " << what() << "\n";
  os << "  " << source_line_ << "\n";
  os << "  " << std::string(column_ > 0 ? column_ - 1 : 0, ' ') << "^\n";
  return os.str();
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

const std::set<std::string> kVerbs = {"decompose", "end0", "frobenius", "syzygy", "certify", "hilbert"};

const std::map<std::string, std::set<std::string>> kOptions = {
    {"decompose", {"certify", "group", "ignore-shifts", "exponent-mode"}},
    {"end0", {}},
    {"frobenius", {"e", "convention", "minimal"}},
    {"syzygy", {"i"}},
    {"certify", {"level"}},
    {"hilbert", {"window", "from", "to"}},
};
const std::set<std::string> kCommonOptions = {"seed", "attempts", "autoextend", "output"};

bool is_integer(const std::string& v, bool allow_sign) {
  size_t i = 0;
  if (allow_sign && !v.empty() && v[0] == '-') i = 1;
  if (i == v.size()) return false;
  for (; i < v.size(); ++i)
    if (!is_digit(v[i])) return false;
  return true;
}

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& opt) : text_(text), opt_(opt) {}

  TaskFile run() {
    ws();
    while (pos_ < text_.size()) {
      size_t start = pos_;
      std::string kw = ident("a block keyword (field, ring, module or task)");
      if (kw == "field") field_block(start);
      else if (kw == "ring") ring_block(start);
      else if (kw == "module") module_block(start);
      else if (kw == "task") task_block(start);
      else error(ErrorCode::SyntaxError, start, "unknown block '" + kw + "'");
      ws();
    }
    if (!tf_.ring) error(ErrorCode::SemanticError, pos_, "missing ring block");
    return std::move(tf_);
  }

 private:
  [[noreturn]] void error(ErrorCode code, size_t offset, const std::string& msg) const {
    offset = std::min(offset, text_.size());
    size_t line = 1, line_start = 0;
    for (size_t i = 0; i < offset; ++i)
      if (text_[i] == '\n') ++line, line_start = i + 1;
    size_t line_end = text_.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text_.size();
    throw TaskFileError(code, line, offset - line_start + 1, msg,
                        std::string(text_.substr(line_start, line_end - line_start)));
  }

  size_t line_of(size_t offset) const {
    size_t line = 1;
    for (size_t i = 0; i < offset && i < text_.size(); ++i)
      if (text_[i] == '\n') ++line;
    return line;
  }

  void ws() { skip_space(text_, pos_); }
  char peek() {
    ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c, const std::string& context) {
    if (!accept(c)) {
      char got = peek();
      error(ErrorCode::SyntaxError, pos_,
            std::string("expected '") + c + "' " + context + (got ? std::string(", found '") + got + "'" : ", found end of input"));
    }
  }

  std::string ident(const std::string& what) {
    ws();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) error(ErrorCode::SyntaxError, pos_, "expected " + what);
    size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  // Next identifier if it is one of the clause keywords; otherwise nothing.
  bool keyword(std::string_view kw) {
    ws();
    size_t save = pos_;
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) return false;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    if (text_.substr(save, pos_ - save) == kw) return true;
    pos_ = save;
    return false;
  }

  int64_t integer() {
    ws();
    size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    if (pos_ >= text_.size() || !is_digit(text_[pos_])) error(ErrorCode::SyntaxError, start, "expected an integer");
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    std::string s(text_.substr(start, pos_ - start));
    if (s.size() > 18) error(ErrorCode::SemanticError, start, "integer out of range");
    return std::stoll(s);
  }

  // [a, b, c] is one row; [[...], [...]] lists rows.
  std::vector<std::vector<int64_t>> int_matrix(std::vector<size_t>* row_offsets = nullptr) {
    expect('[', "to open an integer matrix");
    std::vector<std::vector<int64_t>> rows;
    if (accept(']')) return rows;
    if (peek() == '[') {
      do {
        if (row_offsets) row_offsets->push_back(pos_);
        expect('[', "to open a matrix row");
        std::vector<int64_t> row;
        if (!accept(']')) {
          do row.push_back(integer());
          while (accept(','));
          expect(']', "to close a matrix row");
        }
        rows.push_back(std::move(row));
      } while (accept(','));
    } else {
      if (row_offsets) row_offsets->push_back(pos_);
      std::vector<int64_t> row;
      do row.push_back(integer());
      while (accept(','));
      rows.push_back(std::move(row));
    }
    expect(']', "to close the matrix");
    return rows;
  }

  Poly poly(const Ring& R) {
    ws();
    size_t start = pos_;
    try {
      return parse_expression(R, text_, pos_, opt_.implicit_mult);
    } catch (const ParseError& e) {
      error(e.code() == ErrorCode::SyntaxError ? ErrorCode::SyntaxError : ErrorCode::SemanticError, e.offset(),
            e.what());
    } catch (const TaskFileError&) {
      throw;
    } catch (const Error& e) {
      error(ErrorCode::SemanticError, start, e.what());
    }
  }

  void end_block(const std::string& what) { expect(';', "to end the " + what + " block"); }

  void field_block(size_t start) {
    if (tf_.field) error(ErrorCode::SemanticError, start, "field is already defined");
    ws();
    size_t begin = pos_;
    size_t end = text_.find(';', begin);
    if (end == std::string_view::npos) error(ErrorCode::SyntaxError, text_.size(), "expected ';' to end the field block");
    std::string desc = trim(text_.substr(begin, end - begin));
    try {
      tf_.field = parse_field(desc);
    } catch (const Error& e) {
      error(e.code() == ErrorCode::SyntaxError ? ErrorCode::SyntaxError : ErrorCode::SemanticError, begin, e.what());
    }
    tf_.field_text = desc;
    pos_ = end + 1;
  }

  void ring_block(size_t start) {
    if (!tf_.field) error(ErrorCode::SemanticError, start, "the field block must come before the ring block");
    if (tf_.ring) error(ErrorCode::SemanticError, start, "ring is already defined");
    std::vector<std::string> vars;
    bool bracket = accept('[');
    do {
      size_t at = pos_;
      auto v = ident("a variable name");
      for (auto& w : vars)
        if (w == v) error(ErrorCode::SemanticError, at, "variable '" + v + "' appears twice");
      if (v == tf_.field->generator_name() && tf_.field->degree() > 1)
        error(ErrorCode::SemanticError, at, "variable '" + v + "' clashes with the field generator");
      vars.push_back(v);
    } while (accept(','));
    if (bracket) expect(']', "to close the variable list");

    std::vector<std::vector<int64_t>> degrees{std::vector<int64_t>(vars.size(), 1)};
    size_t deg_at = pos_;
    std::vector<size_t> row_at;
    if (keyword("degrees")) {
      ws();
      deg_at = pos_;
      degrees = int_matrix(&row_at);
      if (degrees.empty()) error(ErrorCode::SemanticError, deg_at, "degree matrix is empty");
      for (size_t k = 0; k < degrees.size(); ++k)
        if (degrees[k].size() != vars.size())
          error(ErrorCode::SemanticError, row_at[k],
                "ring degree row " + std::to_string(k + 1) + " has " + std::to_string(degrees[k].size()) +
                    " entries, expected one per variable (" + std::to_string(vars.size()) + ")");
    }
    // Ideal generators are read in a scratch ring and moved over once the
    // mode is known.
    size_t ideal_at = pos_;
    std::vector<Poly> ideal;
    RingPtr scratch = Ring::polynomial(tf_.field, vars, {std::vector<int64_t>(vars.size(), 1)}, RingMode::Local);
    if (keyword("ideal")) {
      ws();
      ideal_at = pos_;
      bool br = accept('[');
      if (!(br && accept(']'))) {
        do ideal.push_back(poly(*scratch));
        while (accept(','));
        if (br) expect(']', "to close the ideal");
      }
    }
    RingMode mode = RingMode::Graded;
    if (keyword("mode")) {
      size_t at = pos_;
      auto m = ident("graded or local");
      if (m == "graded") mode = RingMode::Graded;
      else if (m == "local") mode = RingMode::Local;
      else error(ErrorCode::SyntaxError, at + 1, "mode must be graded or local");
    }
    end_block("ring");

    RingPtr S;
    try {
      S = Ring::polynomial(tf_.field, vars, degrees, mode);
    } catch (const Error& e) {
      error(ErrorCode::SemanticError, deg_at, e.what());
    }
    if (!ideal.empty()) {
      std::vector<Poly> gens;
      for (auto& f : ideal) {
        std::vector<Term> terms;
        for (auto& t : f.t) {
          std::vector<unsigned> ex(vars.size());
          for (size_t j = 0; j < vars.size(); ++j) ex[j] = unsigned(t.m.e[j]);
          terms.push_back({S->make_monomial(ex), t.c});
        }
        gens.push_back(S->normalize(std::move(terms)));
      }
      try {
        S = S->quotient(gens);
      } catch (const Error& e) {
        error(ErrorCode::SemanticError, ideal_at, e.what());
      }
    }
    tf_.ring = S;
    tf_.modules.push_back({"R", make_module(Presentation::free(S, {S->zero_degree()})), line_of(start)});
    names_.insert("R");
  }

  void module_block(size_t start) {
    if (!tf_.ring) error(ErrorCode::SemanticError, start, "the ring block must come before modules");
    const Ring& R = *tf_.ring;
    size_t name_at = (ws(), pos_);
    std::string name = ident("a module name");
    if (names_.count(name)) error(ErrorCode::SemanticError, name_at, "module '" + name + "' is already defined");
    ws();
    if (!keyword("gens")) error(ErrorCode::SyntaxError, pos_, "expected 'gens' after the module name");
    ws();
    size_t gens_at = pos_;
    std::vector<Degree> degrees;
    size_t r = R.grading_rank();
    if (is_digit(peek())) {
      int64_t n = integer();
      if (n < 0 || n > 100000) error(ErrorCode::SemanticError, gens_at, "bad generator count");
      degrees.assign(size_t(n), R.zero_degree());
    } else {
      std::vector<size_t> row_at;
      auto D = int_matrix(&row_at);
      if (D.size() != r)
        error(ErrorCode::SemanticError, gens_at,
              "module " + name + ": degree matrix has " + std::to_string(D.size()) + " rows, expected " +
                  std::to_string(r) + " (one per grading coordinate)");
      size_t g = D.empty() ? 0 : D[0].size();
      for (size_t k = 1; k < D.size(); ++k)
        if (D[k].size() != g)
          error(ErrorCode::SemanticError, row_at[k],
                "module " + name + ": degree row " + std::to_string(k + 1) + " has " + std::to_string(D[k].size()) +
                    " entries, expected " + std::to_string(g));
      for (size_t j = 0; j < g; ++j) {
        Degree d(r);
        for (size_t k = 0; k < r; ++k) d[k] = D[k][j];
        degrees.push_back(std::move(d));
      }
    }
    ws();
    if (!keyword("relations")) error(ErrorCode::SyntaxError, pos_, "expected 'relations' after the degrees");
    ws();
    size_t rel_at = pos_;
    expect('[', "to open the relation matrix");
    std::vector<std::vector<Poly>> rows;
    std::vector<size_t> row_at;
    if (!accept(']')) {
      do {
        row_at.push_back((ws(), pos_));
        expect('[', "to open a relation row");
        std::vector<Poly> row;
        if (!accept(']')) {
          do row.push_back(poly(R));
          while (accept(','));
          expect(']', "to close a relation row");
        }
        rows.push_back(std::move(row));
      } while (accept(','));
      expect(']', "to close the relation matrix");
    }
    end_block("module");
    size_t g = degrees.size();
    if (!rows.empty() && rows.size() != g)
      error(ErrorCode::SemanticError, rel_at,
            "module " + name + ": relation matrix has " + std::to_string(rows.size()) + " rows, expected " +
                std::to_string(g) + " (one per generator)");
    size_t t = rows.empty() ? 0 : rows[0].size();
    for (size_t i = 1; i < rows.size(); ++i)
      if (rows[i].size() != t)
        error(ErrorCode::SemanticError, row_at[i],
              "module " + name + ": relation row " + std::to_string(i + 1) + " has " +
                  std::to_string(rows[i].size()) + " entries, expected " + std::to_string(t));
    std::vector<Column> cols(t, Column(g));
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = 0; j < t; ++j) cols[j][i] = rows[i][j];
    ModulePtr M;
    try {
      M = make_module(Presentation(tf_.ring, std::move(degrees), std::move(cols)));
    } catch (const Error& e) {
      error(ErrorCode::SemanticError, rel_at, "module " + name + ": " + e.what());
    }
    tf_.modules.push_back({name, M, line_of(start)});
    names_.insert(name);
  }

  bool defined(const std::string& name) const {
    if (names_.count(name)) return true;
    // Summands of a decomposition are named <output>_<k>.
    auto u = name.rfind('_');
    if (u == std::string::npos || u + 1 == name.size()) return false;
    if (!is_integer(name.substr(u + 1), false)) return false;
    return split_prefixes_.count(name.substr(0, u)) > 0;
  }

  void task_block(size_t start) {
    if (!tf_.ring) error(ErrorCode::SemanticError, start, "the ring block must come before tasks");
    TaskSpec t;
    t.line = line_of(start);
    size_t verb_at = (ws(), pos_);
    t.verb = ident("a task verb");
    if (!kVerbs.count(t.verb))
      error(ErrorCode::SemanticError, verb_at,
            "unknown task '" + t.verb + "' (expected decompose, end0, frobenius, syzygy, certify or hilbert)");
    size_t target_at = (ws(), pos_);
    t.target = ident("the name of a module");
    if (!defined(t.target)) error(ErrorCode::SemanticError, target_at, "undefined module '" + t.target + "'");
    while (peek() != ';' && peek() != '\0') {
      size_t key_at = pos_;
      std::string key;
      while (pos_ < text_.size() && (ident_char(text_[pos_]) || text_[pos_] == '-')) key += text_[pos_++];
      if (key.empty()) error(ErrorCode::SyntaxError, key_at, "expected an option key=value");
      if (pos_ >= text_.size() || text_[pos_] != '=') error(ErrorCode::SyntaxError, pos_, "expected '=' after '" + key + "'");
      ++pos_;
      size_t val_at = pos_;
      std::string val;
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != ';' &&
             text_[pos_] != '#')
        val += text_[pos_++];
      if (val.empty()) error(ErrorCode::SyntaxError, val_at, "missing value for '" + key + "'");
      if (!kCommonOptions.count(key) && !kOptions.at(t.verb).count(key))
        error(ErrorCode::SemanticError, key_at, "task " + t.verb + " has no option '" + key + "'");
      if (t.options.count(key)) error(ErrorCode::SemanticError, key_at, "option '" + key + "' given twice");
      check_value(t.verb, key, val, val_at);
      t.options[key] = val;
    }
    end_block("task");
    if (t.verb == "frobenius" && !t.options.count("e")) error(ErrorCode::SemanticError, target_at, "frobenius needs e=<n>");
    if (t.verb == "syzygy" && !t.options.count("i")) error(ErrorCode::SemanticError, target_at, "syzygy needs i=<n>");
    t.output = t.options.count("output") ? t.options["output"] : t.verb + "_" + t.target;
    if (t.verb == "frobenius" || t.verb == "syzygy") {
      if (names_.count(t.output)) error(ErrorCode::SemanticError, target_at, "output '" + t.output + "' is already defined");
      names_.insert(t.output);
    } else if (t.verb == "decompose") {
      split_prefixes_.insert(t.output);
    }
    tf_.tasks.push_back(std::move(t));
  }

  void check_value(const std::string& verb, const std::string& key, const std::string& v, size_t at) {
    auto bad = [&](const std::string& expect) {
      error(ErrorCode::SemanticError, at, "option " + key + " of " + verb + " expects " + expect);
    };
    if (key == "seed" || key == "attempts" || key == "e" || key == "i" || key == "window") {
      if (!is_integer(v, false) || v.size() > 18) bad("a nonnegative integer");
    } else if (key == "from" || key == "to") {
      if (!is_integer(v, true) || v.size() > 18) bad("an integer");
    } else if (key == "autoextend" || key == "group" || key == "ignore-shifts" || key == "minimal") {
      if (v != "true" && v != "false" && v != "1" && v != "0") bad("true or false");
    } else if (key == "convention") {
      if (v != "sheaf" && v != "full") bad("sheaf or full");
    } else if (key == "certify" || key == "level") {
      if (v != "quick" && v != "minpoly" && v != "charpoly") bad("quick, minpoly or charpoly");
    } else if (key == "exponent-mode") {
      if (v != "geometric" && v != "mu") bad("geometric or mu");
    } else if (key == "output") {
      if (!ident_start(v[0]) || v.find_first_of("-") != std::string::npos) bad("a name");
      for (char c : v)
        if (!ident_char(c)) bad("a name");
    }
  }

  std::string_view text_;
  ParseOptions opt_;
  size_t pos_ = 0;
  TaskFile tf_;
  std::set<std::string> names_;
  std::set<std::string> split_prefixes_;
};

uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s.size() > 18 || !is_integer(s, false)) fail(ErrorCode::SyntaxError, "expected a positive integer in '" + s + "'");
  return std::stoull(s);
}

}  // namespace

FieldPtr parse_field(std::string_view text) {
  std::string d;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) d += c;
  if (d == "QQ") return Field::rationals();
  if (d == "QQ[i]") return Field::gaussian();
  if (d.rfind("QQ[", 0) == 0) {
    auto close = d.find(']');
    if (close == std::string::npos || d.substr(close, 3) != "]/(" || d.back() != ')')
      fail(ErrorCode::SyntaxError, "expected QQ[t]/(g)");
    std::string var = d.substr(3, close - 3);
    if (var.empty() || !ident_start(var[0])) fail(ErrorCode::SyntaxError, "bad generator name in " + d);
    std::string g = d.substr(close + 3, d.size() - close - 4);
    auto U = Ring::polynomial(Field::rationals(), {var}, {{1}});
    Poly f = parse_poly(*U, g);
    std::vector<mpq_class> coeffs;
    for (auto& t : f.t) {
      size_t k = size_t(t.m.e[0]);
      if (coeffs.size() <= k) coeffs.resize(k + 1, mpq_class(0));
      coeffs[k] = U->field()->rational_coordinates(t.c)[0];
    }
    if (coeffs.size() < 2) fail(ErrorCode::SemanticError, "number field modulus must have positive degree");
    mpq_class lead = coeffs.back();
    for (auto& c : coeffs) c /= lead;
    return Field::number_field(coeffs, var);
  }
  if (d.rfind("GF(", 0) == 0 && d.back() == ')') {
    std::string in = d.substr(3, d.size() - 4);
    uint64_t p = 0;
    unsigned e = 1;
    if (auto c = in.find(','); c != std::string::npos) {
      p = parse_u64(in.substr(0, c));
      e = unsigned(parse_u64(in.substr(c + 1)));
    } else if (auto h = in.find('^'); h != std::string::npos) {
      p = parse_u64(in.substr(0, h));
      e = unsigned(parse_u64(in.substr(h + 1)));
    } else {
      uint64_t q = parse_u64(in);
      if (q < 2) fail(ErrorCode::SemanticError, "GF(" + in + ") is not a field");
      p = 2;
      while (q % p != 0) ++p;
      e = 0;
      while (q % p == 0) q /= p, ++e;
      if (q != 1) fail(ErrorCode::SemanticError, "GF(" + in + "): order is not a prime power");
    }
    if (!is_prime(p)) fail(ErrorCode::SemanticError, "GF: " + std::to_string(p) + " is not prime");
    if (e == 0) fail(ErrorCode::SemanticError, "GF: exponent must be positive");
    return e == 1 ? Field::prime(p) : Field::finite(p, e);
  }
  fail(ErrorCode::SyntaxError, "unknown field '" + d + "' (expected QQ, QQ[i], QQ[t]/(g), GF(p), GF(p,e) or GF(p^e))");
}

TaskFile parse_taskfile(std::string_view text, const ParseOptions& options) { return Parser(text, options).run(); }

namespace {

std::string int_matrix_text(const std::vector<std::vector<int64_t>>& rows) {
  std::string s = "[";
  for (size_t k = 0; k < rows.size(); ++k) {
    if (k) s += ", ";
    if (rows.size() > 1) s += "[";
    for (size_t j = 0; j < rows[k].size(); ++j) {
      if (j) s += ", ";
      s += std::to_string(rows[k][j]);
    }
    if (rows.size() > 1) s += "]";
  }
  return s + "]";
}

}  // namespace

std::string format_ring_block(const Ring& R) {
  std::string s = "ring ";
  for (size_t i = 0; i < R.nvars(); ++i) s += (i ? "," : "") + R.variables()[i];
  std::vector<std::vector<int64_t>> rows(R.grading_rank());
  for (size_t k = 0; k < rows.size(); ++k)
    for (size_t i = 0; i < R.nvars(); ++i) rows[k].push_back(R.variable_degree(i)[k]);
  s += " degrees " + int_matrix_text(rows);
  if (R.is_quotient()) {
    s += " ideal [";
    for (size_t k = 0; k < R.ideal_generators().size(); ++k) s += (k ? ", " : "") + R.format(R.ideal_generators()[k]);
    s += "]";
  }
  s += R.is_local() ? " mode local;" : " mode graded;";
  return s;
}

std::string format_module_block(const std::string& name, const Presentation& M) {
  const Ring& R = *M.ring();
  std::string s = "module " + name + " gens ";
  if (M.ngens() == 0 || R.grading_rank() == 0) {
    s += std::to_string(M.ngens());
  } else {
    std::vector<std::vector<int64_t>> rows(R.grading_rank());
    for (size_t k = 0; k < rows.size(); ++k)
      for (auto& d : M.degrees()) rows[k].push_back(d[k]);
    s += int_matrix_text(rows);
  }
  s += " relations [";
  if (M.nrels() > 0) {
    for (size_t i = 0; i < M.ngens(); ++i) {
      s += i ? ", [" : "[";
      for (size_t j = 0; j < M.nrels(); ++j) s += (j ? ", " : "") + R.format(M.relations()[j][i]);
      s += "]";
    }
  }
  return s + "];";
}

}  // namespace summands
