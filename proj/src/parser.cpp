#include "ijets/parser.hpp"

#include <cctype>

namespace ijets {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\''; }

std::optional<MultiIndex> split_index(const std::string& s, const std::vector<std::string>& letters) {
  std::vector<int> entries;
  std::size_t pos = 0;
  while (pos < s.size()) {
    int best = -1;
    std::size_t best_len = 0;
    for (std::size_t k = 0; k < letters.size(); ++k) {
      const auto& l = letters[k];
      if (l.size() > best_len && s.compare(pos, l.size(), l) == 0) {
        best = static_cast<int>(k);
        best_len = l.size();
      }
    }
    if (best < 0) return std::nullopt;
    entries.push_back(best + 1);
    pos += best_len;
  }
  return MultiIndex(std::move(entries));
}

int find_name(const std::vector<std::string>& list, const std::string& name) {
  for (std::size_t k = 0; k < list.size(); ++k)
    if (list[k] == name) return static_cast<int>(k) + 1;
  return 0;
}

std::optional<Var> resolve(const std::string& head, const std::optional<std::string>& index, const Names& names) {
  if (!index) {
    if (int k = find_name(names.base, head)) return base_var(k);
    if (int k = find_name(names.par, head)) return par_var(k);
  }
  struct Family {
    const std::vector<std::string>* list;
    VarKind kind;
  };
  const Family families[] = {{&names.jet, VarKind::Jet},
                             {&names.sec, VarKind::Sec},
                             {&names.tgt, VarKind::Tgt},
                             {&names.fn, VarKind::Fn}};
  for (const auto& f : families) {
    int k = find_name(*f.list, head);
    if (!k) continue;
    Var v{f.kind, k, {}};
    if (index) {
      auto j = split_index(*index, names.index_letters(v));
      if (!j) continue;
      v.idx = *j;
    }
    return v;
  }
  return std::nullopt;
}

class Parser {
 public:
  Parser(const std::string& s, const Names& names) : s_(s), names_(names) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  Var single_var() {
    skip();
    auto v = ident();
    skip();
    if (pos_ != s_.size()) fail("trailing input after variable");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("parse error at " + std::to_string(pos_) + " in \"" + s_ + "\": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (eat('+'))
        terms.push_back(term());
      else if (eat('-'))
        terms.push_back(-term());
      else
        break;
    }
    return add(std::move(terms));
  }

  Expr term() {
    Expr acc = unary();
    for (;;) {
      if (eat('*'))
        acc = acc * unary();
      else if (eat('/'))
        acc = acc / unary();
      else
        break;
    }
    return acc;
  }

  Expr unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Expr power() {
    Expr b = primary();
    if (eat('^')) {
      bool paren = eat('(');
      bool neg = eat('-');
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("integer exponent expected");
      int n = std::stoi(s_.substr(start, pos_ - start));
      if (paren && !eat(')')) fail("')' expected");
      return pow(b, neg ? -n : n);
    }
    return b;
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!eat(')')) fail("')' expected");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      return cst(parse_q(s_.substr(start, pos_ - start)));
    }
    if (ident_start(c)) {
      std::size_t save = pos_;
      std::string head = word();
      if (head == "sqrt" && eat('(')) {
        Expr e = expr();
        if (!eat(')')) fail("')' expected");
        return sqrt(e);
      }
      pos_ = save;
      return sym(ident());
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string word() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  Var ident() {
    std::string head = word();
    std::optional<std::string> index;
    if (pos_ < s_.size() && s_[pos_] == '_') {
      ++pos_;
      index = word();
      if (index->empty()) fail("empty index after '_'");
    }
    auto v = resolve(head, index, names_);
    if (!v) fail("unknown identifier " + head + (index ? "_" + *index : ""));
    return *v;
  }

  const std::string& s_;
  const Names& names_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text, const Names& names) { return Parser(text, names).parse(); }

Var parse_var(const std::string& text, const Names& names) { return Parser(text, names).single_var(); }

}  // namespace ijets
