#include "nfr/lp_format.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "nfr/error.hpp"

namespace nfr {
namespace {

constexpr int kTermsPerLine = 6;

void write_terms(std::ostream& out, const std::vector<std::pair<double, std::string>>& terms) {
  if (terms.empty()) {
    out << " 0";
    return;
  }
  int on_line = 0;
  for (const auto& [coef, name] : terms) {
    if (on_line == kTermsPerLine) {
      out << "\n   ";
      on_line = 0;
    }
    out << (coef < 0 ? " - " : " + ") << std::abs(coef) << ' ' << name;
    ++on_line;
  }
}

std::vector<std::pair<double, std::string>> named(const LpProblem& lp, const std::vector<Term>& terms) {
  std::vector<std::pair<double, std::string>> out;
  out.reserve(terms.size());
  for (const auto& t : terms)
    if (t.coef != 0.0) out.emplace_back(t.coef, lp.names()[static_cast<std::size_t>(t.var)]);
  return out;
}

void write_bound(std::ostream& out, double v) {
  if (v == kInf)
    out << "+inf";
  else if (v == -kInf)
    out << "-inf";
  else
    out << v;
}

bool is_section(const std::string& lower_tok, std::string& section) {
  static const char* kSections[] = {"minimize", "minimise", "min",   "subject", "st", "s.t.",
                                    "bounds",   "bound",    "end",   "such",    "generals"};
  for (const char* s : kSections)
    if (lower_tok == s) {
      section = s;
      return true;
    }
  return false;
}

std::string lowercase(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

bool parse_number(const std::string& tok, double& v) {
  const std::string low = lowercase(tok);
  if (low == "inf" || low == "+inf" || low == "infinity" || low == "+infinity") {
    v = kInf;
    return true;
  }
  if (low == "-inf" || low == "-infinity") {
    v = -kInf;
    return true;
  }
  char* end = nullptr;
  v = std::strtod(tok.c_str(), &end);
  return end != tok.c_str() && *end == '\0';
}

struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> toks;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('\\'); c != std::string::npos) line.erase(c);
    std::size_t i = 0;
    while (i < line.size()) {
      const char ch = line[i];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
        continue;
      }
      if (ch == '<' || ch == '>' || ch == '=') {
        std::string op(1, ch);
        if (i + 1 < line.size() && line[i + 1] == '=') {
          op += '=';
          ++i;
        }
        if (op == "<") op = "<=";
        if (op == ">") op = ">=";
        if (op == "==") op = "=";
        toks.push_back({op, lineno});
        ++i;
        continue;
      }
      if (ch == ':' || ch == '+' || ch == '-') {
        // A sign glued to a number or "inf" stays part of that token when it
        // follows a relational operator (bounds like "-inf <= x").
        toks.push_back({std::string(1, ch), lineno});
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != ':' &&
             line[j] != '<' && line[j] != '>' && line[j] != '=' &&
             !((line[j] == '+' || line[j] == '-') && j > i &&
               !(line[j - 1] == 'e' || line[j - 1] == 'E')))
        ++j;
      toks.push_back({line.substr(i, j - i), lineno});
      i = j;
    }
  }
  return toks;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw IoError("LP parse error at line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_lp(std::ostream& out, const LpProblem& lp) {
  const auto old_flags = out.flags();
  const auto old_prec = out.precision();
  out << std::setprecision(17);
  out << "\\ nfr LP dump: " << lp.num_variables() << " variables, " << lp.num_rows() << " rows\n";
  out << "Minimize\n obj:";
  // Zero costs are written too so that the reader sees variables in order.
  std::vector<std::pair<double, std::string>> obj;
  for (int j = 0; j < lp.num_variables(); ++j)
    obj.emplace_back(lp.objective()[static_cast<std::size_t>(j)], lp.names()[static_cast<std::size_t>(j)]);
  write_terms(out, obj);
  out << "\nSubject To\n";
  for (const auto& c : lp.equalities()) {
    out << ' ' << c.name << ':';
    write_terms(out, named(lp, c.terms));
    out << " = " << c.rhs << '\n';
  }
  for (const auto& c : lp.inequalities()) {
    out << ' ' << c.name << ':';
    write_terms(out, named(lp, c.terms));
    out << " <= " << c.rhs << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < lp.num_variables(); ++j) {
    const double lo = lp.lower()[static_cast<std::size_t>(j)];
    const double hi = lp.upper()[static_cast<std::size_t>(j)];
    const auto& name = lp.names()[static_cast<std::size_t>(j)];
    if (lo == -kInf && hi == kInf) {
      out << ' ' << name << " free\n";
    } else if (lo == hi) {
      out << ' ' << name << " = " << lo << '\n';
    } else {
      out << ' ';
      write_bound(out, lo);
      out << " <= " << name << " <= ";
      write_bound(out, hi);
      out << '\n';
    }
  }
  out << "End\n";
  out.flags(old_flags);
  out.precision(old_prec);
}

void write_lp_file(const std::filesystem::path& path, const LpProblem& lp) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_lp(out, lp);
  if (!out) throw IoError("write failed for " + path.string());
}

LpProblem read_lp(std::istream& in) {
  const auto toks = tokenize(in);
  std::size_t p = 0;
  auto peek = [&]() -> const Token* { return p < toks.size() ? &toks[p] : nullptr; };

  std::string section;
  std::vector<std::pair<std::string, double>> objective;
  struct RawRow {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    std::string sense;
    double rhs;
  };
  std::vector<RawRow> rows;
  struct RawBound {
    double lo = 0.0, hi = kInf;
  };
  std::map<std::string, RawBound> bounds;
  std::vector<std::string> order;  // variable names in first-seen order
  std::map<std::string, bool> seen;
  auto see = [&](const std::string& v) {
    if (!seen[v]) {
      seen[v] = true;
      order.push_back(v);
    }
  };

  // Parses "[name:] [+-] [coef] var ..." up to a relational operator or the
  // next section keyword.
  auto parse_linear = [&](std::vector<std::pair<std::string, double>>& terms) {
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    for (;;) {
      const Token* t = peek();
      if (!t) return;
      std::string sec;
      if (t->text == "<=" || t->text == ">=" || t->text == "=") return;
      if (is_section(lowercase(t->text), sec)) return;
      // A "name:" label starts the next row.
      if (p + 1 < toks.size() && toks[p + 1].text == ":") return;
      ++p;
      if (t->text == "+") continue;
      if (t->text == "-") {
        sign = -sign;
        continue;
      }
      double v;
      if (parse_number(t->text, v)) {
        coef *= v;
        have_coef = true;
        continue;
      }
      terms.emplace_back(t->text, sign * coef);
      see(t->text);
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
    (void)have_coef;
  };

  auto signed_number = [&](double& v) -> bool {
    double sign = 1.0;
    while (peek() && (peek()->text == "+" || peek()->text == "-")) {
      if (peek()->text == "-") sign = -sign;
      ++p;
    }
    if (!peek() || !parse_number(peek()->text, v)) return false;
    ++p;
    v *= sign;
    return true;
  };

  while (const Token* t = peek()) {
    std::string sec;
    if (is_section(lowercase(t->text), sec)) {
      ++p;
      if (sec == "subject" || sec == "such") {
        if (peek() && (lowercase(peek()->text) == "to" || lowercase(peek()->text) == "that")) ++p;
        section = "st";
      } else if (sec == "s.t.") {
        section = "st";
      } else if (sec == "minimise" || sec == "min") {
        section = "minimize";
      } else if (sec == "bound") {
        section = "bounds";
      } else {
        section = sec;
      }
      if (section == "end") break;
      continue;
    }
    if (section == "minimize") {
      if (p + 1 < toks.size() && toks[p + 1].text == ":") p += 2;
      parse_linear(objective);
      continue;
    }
    if (section == "st") {
      RawRow row;
      if (p + 1 < toks.size() && toks[p + 1].text == ":") {
        row.name = t->text;
        p += 2;
      } else {
        row.name = "r" + std::to_string(rows.size());
      }
      parse_linear(row.terms);
      const Token* op = peek();
      if (!op || (op->text != "<=" && op->text != ">=" && op->text != "="))
        fail(op ? op->line : t->line, "expected a relational operator in row " + row.name);
      row.sense = op->text;
      ++p;
      if (!signed_number(row.rhs)) fail(op->line, "expected a right-hand side in row " + row.name);
      rows.push_back(std::move(row));
      continue;
    }
    if (section == "bounds") {
      const int line = t->line;
      double lo_v;
      std::size_t save = p;
      if (signed_number(lo_v)) {
        // "lo <= x [<= hi]"
        if (!peek() || peek()->text != "<=") fail(line, "expected <= in bound");
        ++p;
        if (!peek()) fail(line, "truncated bound");
        const std::string var = peek()->text;
        ++p;
        see(var);
        bounds[var].lo = lo_v;
        if (peek() && peek()->text == "<=") {
          ++p;
          double hi_v;
          if (!signed_number(hi_v)) fail(line, "expected an upper bound");
          bounds[var].hi = hi_v;
        }
        continue;
      }
      p = save;
      const std::string var = t->text;
      ++p;
      see(var);
      const Token* op = peek();
      if (op && lowercase(op->text) == "free") {
        ++p;
        bounds[var] = RawBound{-kInf, kInf};
        continue;
      }
      if (!op) fail(line, "truncated bound");
      const std::string sense = op->text;
      ++p;
      double v;
      if (!signed_number(v)) fail(line, "expected a bound value");
      if (sense == "<=")
        bounds[var].hi = v;
      else if (sense == ">=")
        bounds[var].lo = v;
      else if (sense == "=")
        bounds[var] = RawBound{v, v};
      else
        fail(line, "unexpected token " + sense);
      continue;
    }
    fail(t->line, "unexpected token " + t->text);
  }

  LpProblem lp;
  std::map<std::string, double> cost;
  for (const auto& [v, c] : objective) cost[v] += c;
  for (const auto& v : order) {
    const auto b = bounds.count(v) ? bounds[v] : RawBound{};
    lp.add_variable(v, cost.count(v) ? cost[v] : 0.0, b.lo, b.hi);
  }
  auto to_terms = [&](const RawRow& r) {
    std::vector<Term> terms;
    for (const auto& [v, c] : r.terms) terms.push_back(Term{*lp.find(v), c});
    return terms;
  };
  for (const auto& r : rows)
    if (r.sense == "=") lp.add_equality(r.name, to_terms(r), r.rhs);
  for (const auto& r : rows) {
    if (r.sense == "<=") lp.add_less_equal(r.name, to_terms(r), r.rhs);
    if (r.sense == ">=") lp.add_greater_equal(r.name, to_terms(r), r.rhs);
  }
  return lp;
}

LpProblem read_lp_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_lp(in);
}

SolutionFile read_solution(std::istream& in) {
  SolutionFile out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    std::string key, val;
    if (auto eq = line.find('='); eq != std::string::npos) {
      key = line.substr(0, eq);
      val = line.substr(eq + 1);
    } else {
      std::istringstream ss(line);
      ss >> key >> val;
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    key = trim(key);
    val = trim(val);
    if (key == "status") {
      out.status = lowercase(val);
      continue;
    }
    if (key == "objective") continue;
    double v;
    if (key.empty() || !parse_number(val, v))
      throw IoError("solution parse error at line " + std::to_string(lineno));
    out.values[key] = v;
  }
  return out;
}

void write_solution(std::ostream& out, const LpProblem& lp, const LpSolution& sol) {
  const auto old_prec = out.precision();
  out << std::setprecision(17);
  out << "status=" << to_string(sol.status) << '\n';
  if (sol.status == LpStatus::Optimal) {
    out << "objective=" << sol.objective << '\n';
    for (int j = 0; j < lp.num_variables(); ++j)
      out << lp.names()[static_cast<std::size_t>(j)] << '=' << sol.x[static_cast<std::size_t>(j)] << '\n';
  }
  out.precision(old_prec);
}

}  // namespace nfr
