#include "dotvm/parser.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace dotvm {

ParseError::ParseError(Kind kind, int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " +
                         std::string(to_string(kind)) + " error: " + message),
      kind_(kind),
      line_(line),
      column_(column),
      message_(message) {}

std::string_view to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::Lex: return "lex";
    case ParseError::Kind::Syntax: return "syntax";
    case ParseError::Kind::Framing: return "framing";
  }
  return "";
}

namespace {

struct Token {
  std::string_view text;
  int column = 1;
};

struct Line {
  int number = 0;
  std::vector<Token> tokens;
};

using Kind = ParseError::Kind;

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++number;
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;

    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      const char c = raw[i];
      if (c == ' ' || c == '\t') {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t') {
        const auto u = static_cast<unsigned char>(raw[j]);
        if (u < 0x20 || u >= 0x7f)
          throw ParseError(Kind::Lex, number, static_cast<int>(j) + 1,
                           "non-printable or non-ASCII character");
        ++j;
      }
      line.tokens.push_back({raw.substr(i, j - i), static_cast<int>(i) + 1});
      i = j;
    }
    if (line.tokens.empty()) throw ParseError(Kind::Syntax, number, 1, "empty line");
    lines.push_back(std::move(line));
  }
  return lines;
}

class Parser {
 public:
  explicit Parser(std::vector<Line> lines) : lines_(std::move(lines)) {}

  Program run() {
    Program p;
    p.instrs = parse_block(0);
    if (pos_ < lines_.size()) {
      const Line& l = lines_[pos_];
      throw ParseError(Kind::Framing, l.number, l.tokens[0].column, "`endloop` without `forloop`");
    }
    for_each_instr(p.instrs, [&](const Instr& in) {
      if (const auto* def = std::get_if<DefMatrix>(&in.node))
        if (const auto* ds = std::get_if<DatasetSource>(&def->source))
          p.declared_datasets.emplace(ds->name, def->dims);
    });
    return p;
  }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
  const Line* cur_ = nullptr;

  [[noreturn]] void fail(Kind kind, const Token& tok, const std::string& msg) const {
    throw ParseError(kind, cur_ ? cur_->number : 0, tok.column, msg);
  }
  [[noreturn]] void fail_line(Kind kind, const std::string& msg) const {
    const int col = cur_ && !cur_->tokens.empty() ? cur_->tokens.back().column : 1;
    throw ParseError(kind, cur_ ? cur_->number : 0, col, msg);
  }

  void expect_count(const Line& l, std::size_t n, std::string_view what) const {
    if (l.tokens.size() < n) fail_line(Kind::Syntax, "too few fields for " + std::string(what));
    if (l.tokens.size() > n)
      fail(Kind::Syntax, l.tokens[n], "unexpected token after " + std::string(what));
  }

  // -- token-level productions --------------------------------------------

  std::int64_t natural(std::string_view s, const Token& tok) const {
    if (s.empty() || !is_digit(s[0]) || s[0] == '0')
      fail(Kind::Lex, tok, "expected natural number, got `" + std::string(tok.text) + "`");
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      fail(Kind::Lex, tok, "malformed natural number `" + std::string(tok.text) + "`");
    return v;
  }

  int id(std::string_view s, const Token& tok) const {
    const std::int64_t v = natural(s, tok);
    if (v > std::numeric_limits<int>::max()) fail(Kind::Lex, tok, "identifier out of range");
    return static_cast<int>(v);
  }

  std::int64_t integer(std::string_view s, const Token& tok) const {
    if (s == "0") return 0;
    if (!s.empty() && s[0] == '-') return -natural(s.substr(1), tok);
    return natural(s, tok);
  }

  IndexExpr index_expr(std::string_view s, const Token& tok) const {
    if (!s.empty() && s[0] == '\\') return LoopIndex{id(s.substr(1), tok)};
    return integer(s, tok);
  }

  Literal literal(std::string_view s, const Token& tok) const {
    if (s == "NaN") return Literal{std::numeric_limits<double>::quiet_NaN()};
    std::string_view body = s;
    if (!body.empty() && body[0] == '-') body.remove_prefix(1);
    const auto dot = body.find('.');
    auto all_digits = [](std::string_view d) {
      if (d.empty()) return false;
      for (char c : d)
        if (!is_digit(c)) return false;
      return true;
    };
    if (dot == std::string_view::npos || !all_digits(body.substr(0, dot)) ||
        !all_digits(body.substr(dot + 1)))
      fail(Kind::Lex, tok, "malformed literal `" + std::string(tok.text) + "`");
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      fail(Kind::Lex, tok, "literal out of range `" + std::string(tok.text) + "`");
    return Literal{v};
  }

  Operand operand(const Token& tok) const {
    const std::string_view s = tok.text;
    if (s.empty()) fail(Kind::Lex, tok, "empty operand");
    switch (s[0]) {
      case '$': {
        const auto at = s.find('@');
        if (at == std::string_view::npos) return MatrixRef{id(s.substr(1), tok)};
        const int m = id(s.substr(1, at - 1), tok);
        std::string_view rest = s.substr(at + 1);
        if (rest.size() < 5 || rest.front() != '(' || rest.back() != ')')
          fail(Kind::Lex, tok, "malformed cell reference `" + std::string(s) + "`");
        rest = rest.substr(1, rest.size() - 2);
        const auto comma = rest.find(',');
        if (comma == std::string_view::npos)
          fail(Kind::Lex, tok, "malformed cell reference `" + std::string(s) + "`");
        return CellRef{m, index_expr(rest.substr(0, comma), tok),
                       index_expr(rest.substr(comma + 1), tok)};
      }
      case '%': return RegisterRef{id(s.substr(1), tok)};
      case '\\': return LoopIndex{id(s.substr(1), tok)};
      case '#': return literal(s.substr(1), tok);
      default: fail(Kind::Lex, tok, "unknown operand sigil in `" + std::string(s) + "`");
    }
  }

  // Loop bounds: bare integers are shorthand for integer literals.
  Operand bound(const Token& tok) const {
    const std::string_view s = tok.text;
    if (!s.empty() && (is_digit(s[0]) || s[0] == '-'))
      return Literal{static_cast<double>(integer(s, tok))};
    return operand(tok);
  }

  std::int64_t length(const Token& tok) const {
    const std::string_view s = tok.text;
    if (s.size() < 5 || s.substr(0, 3) != "[1:" || s.back() != ']')
      fail(Kind::Lex, tok, "expected `[1:n]`, got `" + std::string(s) + "`");
    return natural(s.substr(3, s.size() - 4), tok);
  }

  Seq seq(const Token& tok) const {
    std::string_view s = tok.text;
    if (s.size() < 3 || s.front() != '[' || s.back() != ']')
      fail(Kind::Lex, tok, "expected sequence, got `" + std::string(s) + "`");
    s = s.substr(1, s.size() - 2);
    if (s.find(':') != std::string_view::npos) {
      const auto c1 = s.find(':');
      const auto c2 = s.find(':', c1 + 1);
      if (c2 == std::string_view::npos || s.find(':', c2 + 1) != std::string_view::npos)
        fail(Kind::Lex, tok, "ordered sequence needs `[from:to:step]`");
      return OrderedSeq{integer(s.substr(0, c1), tok), integer(s.substr(c1 + 1, c2 - c1 - 1), tok),
                        integer(s.substr(c2 + 1), tok)};
    }
    UnorderedSeq u;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      u.items.push_back(index_expr(s.substr(start, comma - start), tok));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return u;
  }

  std::string dataset_name(const Token& tok) const {
    for (char c : tok.text)
      if (!is_digit(c) && !is_alpha(c))
        fail(Kind::Lex, tok, "dataset names are alphanumeric, got `" + std::string(tok.text) + "`");
    return std::string(tok.text);
  }

  // -- line-level productions ---------------------------------------------

  const Line& next_line(std::string_view expecting) {
    if (pos_ >= lines_.size()) {
      const int n = lines_.empty() ? 1 : lines_.back().number;
      throw ParseError(Kind::Framing, n, 1, "unexpected end of input, expected " +
                                                std::string(expecting));
    }
    cur_ = &lines_[pos_++];
    return *cur_;
  }

  std::vector<Instr> parse_block(int depth) {
    std::vector<Instr> out;
    while (pos_ < lines_.size()) {
      const Line& l = lines_[pos_];
      if (l.tokens[0].text == "endloop") {
        if (depth == 0) {
          cur_ = &l;
          fail(Kind::Framing, l.tokens[0], "`endloop` without `forloop`");
        }
        return out;
      }
      out.push_back(parse_instr());
    }
    return out;
  }

  Instr parse_instr() {
    const Line& l = next_line("instruction");
    const Token& head = l.tokens[0];
    Instr in;
    in.line = l.number;
    const std::string_view h = head.text;
    if (h == "def") {
      in.node = parse_def(l);
    } else if (h == "forloop") {
      in.node = parse_loop(l);
    } else if (h == "update" || h == "slice" || h == "dim") {
      in.node = parse_edit(l);
    } else if (h == "select") {
      expect_count(l, 5, "select");
      const Operand dest = operand(l.tokens[1]);
      if (!std::holds_alternative<MatrixRef>(dest) && !std::holds_alternative<RegisterRef>(dest))
        fail(Kind::Syntax, l.tokens[1], "select destination must be `$n` or `%n`");
      in.node = SelectInstr{dest, operand(l.tokens[2]), operand(l.tokens[3]), operand(l.tokens[4])};
    } else if (h == "end") {
      fail(Kind::Framing, head, "`end` without `def`");
    } else if (auto op = op_from_mnemonic(h)) {
      if (!allowed_in_scalar_instr(*op))
        fail(Kind::Syntax, head, "`" + std::string(h) + "` is only valid inside a matrix definition");
      if (l.tokens.size() < 2) fail_line(Kind::Syntax, "scalar instruction needs a destination");
      const Operand dest = operand(l.tokens[1]);
      const auto* reg = std::get_if<RegisterRef>(&dest);
      if (!reg) fail(Kind::Syntax, l.tokens[1], "scalar instruction destination must be `%n`");
      ScalarInstr si{*op, reg->id, {}};
      for (std::size_t i = 2; i < l.tokens.size(); ++i) si.args.push_back(operand(l.tokens[i]));
      check_arity(*op, si.args.size(), l);
      in.node = std::move(si);
    } else if (h == "row" || h == "dataset" || h == "cbind" || h == "rbind" || h == "endloop") {
      fail(Kind::Syntax, head, "`" + std::string(h) + "` outside of its enclosing construct");
    } else {
      fail(Kind::Lex, head, "unknown instruction `" + std::string(h) + "`");
    }
    return in;
  }

  void check_arity(Op op, std::size_t n, const Line& l) const {
    const auto [lo, hi] = arity(op);
    if (static_cast<int>(n) < lo || static_cast<int>(n) > hi)
      fail(Kind::Syntax, l.tokens[0],
           "`" + std::string(mnemonic(op)) + "` takes " + std::to_string(lo) +
               (lo == hi ? "" : "-" + std::to_string(hi)) + " operand(s), got " +
               std::to_string(n));
  }

  DefMatrix parse_def(const Line& l) {
    DefMatrix d;
    std::size_t i = 1;
    if (l.tokens.size() > 1 && l.tokens[1].text == "const") {
      d.is_const = true;
      ++i;
    }
    expect_count(l, i + 3, "def");
    const Operand m = operand(l.tokens[i]);
    const auto* mref = std::get_if<MatrixRef>(&m);
    if (!mref) fail(Kind::Syntax, l.tokens[i], "def needs a matrix `$n`");
    d.id = mref->id;
    d.dims.rows = length(l.tokens[i + 1]);
    d.dims.cols = length(l.tokens[i + 2]);

    const Line& first = next_line("matrix definition body");
    const Token& h = first.tokens[0];
    if (h.text == "row") {
      RowsSource rows;
      --pos_;
      while (pos_ < lines_.size() && lines_[pos_].tokens[0].text == "row") {
        const Line& rl = next_line("row");
        if (rl.tokens.size() < 3) fail_line(Kind::Syntax, "row needs an index and values");
        const std::int64_t idx = natural(rl.tokens[1].text, rl.tokens[1]);
        if (idx != static_cast<std::int64_t>(rows.rows.size()) + 1)
          fail(Kind::Framing, rl.tokens[1], "row " + std::to_string(idx) + " out of order");
        std::vector<Operand> vals;
        for (std::size_t k = 2; k < rl.tokens.size(); ++k) {
          Operand o = operand(rl.tokens[k]);
          if (is_matrix(o)) fail(Kind::Syntax, rl.tokens[k], "row entries must be scalars");
          vals.push_back(std::move(o));
        }
        rows.rows.push_back(std::move(vals));
      }
      d.source = std::move(rows);
    } else if (h.text == "dataset") {
      expect_count(first, 2, "dataset");
      d.source = DatasetSource{dataset_name(first.tokens[1])};
    } else if (h.text == "cbind" || h.text == "rbind") {
      BindSource b{h.text == "cbind", {}};
      for (std::size_t k = 1; k < first.tokens.size(); ++k) b.args.push_back(operand(first.tokens[k]));
      if (b.args.empty()) fail_line(Kind::Syntax, "bind needs at least one operand");
      d.source = std::move(b);
    } else if (auto op = op_from_mnemonic(h.text)) {
      if (!allowed_in_matrix_instr(*op))
        fail(Kind::Syntax, h, "`" + std::string(h.text) + "` is not a matrix instruction");
      OpSource src{*op, {}};
      for (std::size_t k = 1; k < first.tokens.size(); ++k)
        src.args.push_back(operand(first.tokens[k]));
      check_arity(*op, src.args.size(), first);
      d.source = std::move(src);
    } else {
      fail(Kind::Lex, h, "unknown matrix definition `" + std::string(h.text) + "`");
    }

    const Line& e = next_line("`end`");
    if (e.tokens[0].text != "end") fail(Kind::Framing, e.tokens[0], "expected `end " + std::to_string(d.id) + "`");
    expect_count(e, 2, "end");
    const int echoed = id(e.tokens[1].text, e.tokens[1]);
    if (echoed != d.id)
      fail(Kind::Framing, e.tokens[1],
           "`end " + std::to_string(echoed) + "` does not close `def $" + std::to_string(d.id) + "`");
    return d;
  }

  ForLoop parse_loop(const Line& l) {
    expect_count(l, 5, "forloop");
    ForLoop loop;
    loop.index = id(l.tokens[1].text, l.tokens[1]);
    loop.from = bound(l.tokens[2]);
    loop.to = bound(l.tokens[3]);
    loop.step = bound(l.tokens[4]);
    const int open_line = l.number;
    loop.body = parse_block(1);
    if (pos_ >= lines_.size())
      throw ParseError(Kind::Framing, open_line, 1,
                       "`forloop " + std::to_string(loop.index) + "` is never closed");
    const Line& e = next_line("`endloop`");
    expect_count(e, 2, "endloop");
    const int closed = id(e.tokens[1].text, e.tokens[1]);
    if (closed != loop.index)
      fail(Kind::Framing, e.tokens[1],
           "`endloop " + std::to_string(closed) + "` does not match `forloop " +
               std::to_string(loop.index) + "`");
    return loop;
  }

  EditInstr parse_edit(const Line& l) {
    EditInstr e;
    std::size_t i = 1;
    const std::string_view h = l.tokens[0].text;
    if (h == "update") {
      e.op = EditOp::Update;
    } else if (h == "dim") {
      e.op = EditOp::Dim;
    } else if (l.tokens.size() > 1 && l.tokens[1].text == "const") {
      e.op = EditOp::SliceConst;
      ++i;
    } else {
      e.op = EditOp::Slice;
    }
    expect_count(l, i + 4, mnemonic(e.op));
    const Operand dest = operand(l.tokens[i]);
    const auto* m = std::get_if<MatrixRef>(&dest);
    if (!m) fail(Kind::Syntax, l.tokens[i], "edit destination must be `$n`");
    e.dest = m->id;
    e.rows = seq(l.tokens[i + 1]);
    e.cols = seq(l.tokens[i + 2]);
    e.src = operand(l.tokens[i + 3]);
    if (e.op != EditOp::Update && !is_matrix(e.src))
      fail(Kind::Syntax, l.tokens[i + 3], "source must be a matrix `$n`");
    return e;
  }
};

// -- printing -----------------------------------------------------------------

std::string print_index(const IndexExpr& e) {
  if (const auto* li = std::get_if<LoopIndex>(&e)) return "\\" + std::to_string(li->depth);
  return std::to_string(std::get<std::int64_t>(e));
}

std::string print_double(double v) {
  char buf[400];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  std::string s(buf, ptr);
  if (s.find('.') == std::string::npos) s += ".0";
  return s;
}

std::string print_bound(const Operand& o) {
  if (const auto* lit = std::get_if<Literal>(&o)) {
    if (!lit->is_nan() && lit->value == std::trunc(lit->value) && std::abs(lit->value) < 9e15)
      return std::to_string(static_cast<std::int64_t>(lit->value));
  }
  return print_operand(o);
}

void print_args(std::string& out, const std::vector<Operand>& args) {
  for (const auto& a : args) {
    out += ' ';
    out += print_operand(a);
  }
}

void print_block(std::string& out, const std::vector<Instr>& instrs) {
  for (const Instr& in : instrs) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, DefMatrix>) {
            out += "def ";
            if (n.is_const) out += "const ";
            out += "$" + std::to_string(n.id) + " [1:" + std::to_string(n.dims.rows) + "] [1:" +
                   std::to_string(n.dims.cols) + "]\n";
            std::visit(
                [&](const auto& s) {
                  using S = std::decay_t<decltype(s)>;
                  if constexpr (std::is_same_v<S, RowsSource>) {
                    for (std::size_t r = 0; r < s.rows.size(); ++r) {
                      out += "\trow " + std::to_string(r + 1);
                      print_args(out, s.rows[r]);
                      out += '\n';
                    }
                  } else if constexpr (std::is_same_v<S, DatasetSource>) {
                    out += "\tdataset " + s.name + "\n";
                  } else if constexpr (std::is_same_v<S, OpSource>) {
                    out += "\t";
                    out += mnemonic(s.op);
                    print_args(out, s.args);
                    out += '\n';
                  } else {
                    out += s.by_columns ? "\tcbind" : "\trbind";
                    print_args(out, s.args);
                    out += '\n';
                  }
                },
                n.source);
            out += "end " + std::to_string(n.id) + "\n";
          } else if constexpr (std::is_same_v<T, ScalarInstr>) {
            out += mnemonic(n.op);
            out += " %" + std::to_string(n.dest);
            print_args(out, n.args);
            out += '\n';
          } else if constexpr (std::is_same_v<T, EditInstr>) {
            out += mnemonic(n.op);
            out += " $" + std::to_string(n.dest) + " " + print_seq(n.rows) + " " +
                   print_seq(n.cols) + " " + print_operand(n.src) + "\n";
          } else if constexpr (std::is_same_v<T, SelectInstr>) {
            out += "select " + print_operand(n.dest) + " " + print_operand(n.cond) + " " +
                   print_operand(n.on_true) + " " + print_operand(n.on_false) + "\n";
          } else {
            out += "forloop " + std::to_string(n.index) + " " + print_bound(n.from) + " " +
                   print_bound(n.to) + " " + print_bound(n.step) + "\n";
            print_block(out, n.body);
            out += "endloop " + std::to_string(n.index) + "\n";
          }
        },
        in.node);
  }
}

}  // namespace

std::string print_operand(const Operand& o) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, MatrixRef>) {
          return "$" + std::to_string(v.id);
        } else if constexpr (std::is_same_v<T, RegisterRef>) {
          return "%" + std::to_string(v.id);
        } else if constexpr (std::is_same_v<T, CellRef>) {
          return "$" + std::to_string(v.matrix) + "@(" + print_index(v.row) + "," +
                 print_index(v.col) + ")";
        } else if constexpr (std::is_same_v<T, LoopIndex>) {
          return "\\" + std::to_string(v.depth);
        } else {
          return v.is_nan() ? std::string("#NaN") : "#" + print_double(v.value);
        }
      },
      o);
}

std::string print_seq(const Seq& s) {
  if (const auto* o = std::get_if<OrderedSeq>(&s))
    return "[" + std::to_string(o->from) + ":" + std::to_string(o->to) + ":" +
           std::to_string(o->step) + "]";
  std::string out = "[";
  const auto& items = std::get<UnorderedSeq>(s).items;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += print_index(items[i]);
  }
  return out + "]";
}

Program parse(std::string_view text) { return Parser(split_lines(text)).run(); }

std::string print(const Program& program) {
  std::string out;
  print_block(out, program.instrs);
  return out;
}

}  // namespace dotvm
