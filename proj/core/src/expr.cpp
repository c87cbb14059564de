#include "cartan/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <random>

namespace cartan {
namespace {

struct FuncSpec {
  const char* name;
  Func func;
  int arity;
};

constexpr FuncSpec kFuncs[] = {
    {"sqrt", Func::Sqrt, 1}, {"exp", Func::Exp, 1}, {"log", Func::Log, 1},
    {"sin", Func::Sin, 1},   {"cos", Func::Cos, 1}, {"pow", Func::Pow, 2},
};

NodePtr make_binary(NodeKind kind, NodePtr a, NodePtr b, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->offset = offset;
  n->args = {std::move(a), std::move(b)};
  return n;
}

class Parser {
 public:
  Parser(std::string_view src, int n) : src_(src), n_(n) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, "empty expression");
    auto e = expr();
    skip_ws();
    if (pos_ < src_.size()) throw SyntaxError(pos_, std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) throw SyntaxError(pos_, std::string("expected '") + c + "' before end of input");
      throw SyntaxError(pos_, std::string("expected '") + c + "'");
    }
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make_binary(NodeKind::Add, lhs, term(), at);
      } else if (accept('-')) {
        lhs = make_binary(NodeKind::Sub, lhs, term(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = factor();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make_binary(NodeKind::Mul, lhs, factor(), at);
      } else if (accept('/')) {
        lhs = make_binary(NodeKind::Div, lhs, factor(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Neg;
      n->offset = at;
      n->args = {factor()};
      return n;
    }
    if (accept('+')) return factor();
    auto base = atom();
    skip_ws();
    const std::size_t caret = pos_;
    if (accept('^')) return make_binary(NodeKind::Pow, base, factor(), caret);
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, "unexpected end of input");
    const std::size_t at = pos_;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (accept('(')) {
      auto e = expr();
      expect(')');
      return e;
    }
    throw SyntaxError(at, std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t count = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++count;
      }
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw SyntaxError(start, "malformed number");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw SyntaxError(pos_, "malformed exponent");
    }
    const std::string text(src_.substr(start, pos_ - start));
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Literal;
    n->value = std::strtod(text.c_str(), nullptr);
    n->offset = start;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string name(src_.substr(start, pos_ - start));

    for (const auto& f : kFuncs) {
      if (name != f.name) continue;
      skip_ws();
      if (!accept('(')) throw SyntaxError(pos_, "expected '(' after " + name);
      auto call = std::make_shared<Node>();
      call->kind = NodeKind::Call;
      call->func = f.func;
      call->offset = start;
      call->args.push_back(expr());
      while (accept(',')) call->args.push_back(expr());
      expect(')');
      if (static_cast<int>(call->args.size()) != f.arity) {
        throw ArityError(name, f.arity, static_cast<int>(call->args.size()), start);
      }
      return call;
    }

    if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'p')) {
      bool all_digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) {
        all_digits = all_digits && std::isdigit(static_cast<unsigned char>(name[i]));
      }
      if (all_digits) {
        int k = 0;
        const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
        if (ec != std::errc() || k < 1 || k > n_) throw IndexOutOfRange(name, n_, start);
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Coord;
        n->family = name[0] == 'x' ? CoordFamily::X : CoordFamily::P;
        n->index = k - 1;
        n->offset = start;
        return n;
      }
    }
    throw UnknownIdentifier(name, start);
  }

  std::string_view src_;
  int n_;
  std::size_t pos_ = 0;
};

const char* func_name(Func f) {
  for (const auto& s : kFuncs) {
    if (s.func == f) return s.name;
  }
  return "?";
}

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Literal: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case NodeKind::Coord:
      out += n.family == CoordFamily::X ? 'x' : 'p';
      out += std::to_string(n.index + 1);
      return;
    case NodeKind::Neg:
      out += "-(";
      print(*n.args[0], out);
      out += ')';
      return;
    case NodeKind::Call:
      out += func_name(n.func);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ',';
        print(*n.args[i], out);
      }
      out += ')';
      return;
    default: {
      const char op = n.kind == NodeKind::Add   ? '+'
                      : n.kind == NodeKind::Sub ? '-'
                      : n.kind == NodeKind::Mul ? '*'
                      : n.kind == NodeKind::Div ? '/'
                                                : '^';
      out += '(';
      print(*n.args[0], out);
      out += op;
      print(*n.args[1], out);
      out += ')';
    }
  }
}

}  // namespace

Expr parse(std::string_view source, int n) {
  if (n < 1) throw ConfigError("dimension must be positive");
  return Expr(Parser(source, n).parse_all(), n);
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e.root(), out);
  return out;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case NodeKind::Literal:
      if (a.value != b.value) return false;
      break;
    case NodeKind::Coord:
      if (a.family != b.family || a.index != b.index) return false;
      break;
    case NodeKind::Call:
      if (a.func != b.func) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

Expr square(const Expr& k) {
  const Node& root = k.root();
  if (root.kind == NodeKind::Call && root.func == Func::Sqrt) return Expr(root.args[0], k.dim());
  return Expr(make_binary(NodeKind::Mul, k.root_ptr(), k.root_ptr(), root.offset), k.dim());
}

double eval(const Expr& e, std::span<const double> x, std::span<const double> p) {
  EvalEnv<double> env{{x.begin(), x.end()}, {p.begin(), p.end()}};
  return eval(e, env);
}

HomogeneityReport check_homogeneity(const Expr& k, int degree,
                                    std::span<const CotangentPoint> samples, double tol,
                                    std::uint64_t seed) {
  HomogeneityReport r;
  r.degree = degree;
  r.tolerance = tol;
  r.samples = samples.size();
  std::mt19937_64 rng(seed);
  for (const auto& pt : samples) {
    const double lambda = 0.5 + 1.5 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    std::vector<double> scaled(pt.p);
    for (auto& v : scaled) v *= lambda;
    const double base = eval(k, pt.x, pt.p);
    const double lifted = eval(k, pt.x, scaled);
    r.max_residual = std::max(r.max_residual, std::abs(lifted - std::pow(lambda, degree) * base));
  }
  r.pass = r.max_residual <= tol;
  return r;
}

}  // namespace cartan
