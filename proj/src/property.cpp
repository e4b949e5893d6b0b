#include "rashomon/property.hpp"

#include <cctype>
#include <charconv>
#include <optional>

#include "rashomon/error.hpp"

namespace rashomon {

std::string_view to_string(Comparison c) {
  switch (c) {
    case Comparison::eq: return "=";
    case Comparison::ne: return "!=";
    case Comparison::lt: return "<";
    case Comparison::le: return "<=";
    case Comparison::gt: return ">";
    case Comparison::ge: return ">=";
  }
  return "?";
}

template <typename T>
static bool compare_impl(Comparison c, T lhs, T rhs) {
  switch (c) {
    case Comparison::eq: return lhs == rhs;
    case Comparison::ne: return lhs != rhs;
    case Comparison::lt: return lhs < rhs;
    case Comparison::le: return lhs <= rhs;
    case Comparison::gt: return lhs > rhs;
    case Comparison::ge: return lhs >= rhs;
  }
  return false;
}

bool compare(Comparison c, long long lhs, long long rhs) { return compare_impl(c, lhs, rhs); }
bool compare(Comparison c, double lhs, double rhs) { return compare_impl(c, lhs, rhs); }

Predicate Predicate::atom(std::string feature, Comparison c, long long value) {
  Predicate p;
  p.kind = Kind::atom;
  p.feature = std::move(feature);
  p.comparison = c;
  p.value = value;
  return p;
}

Predicate Predicate::conjunction(Predicate lhs, Predicate rhs) {
  Predicate p;
  p.kind = Kind::conjunction;
  p.children.push_back(std::move(lhs));
  p.children.push_back(std::move(rhs));
  return p;
}

Predicate Predicate::disjunction(Predicate lhs, Predicate rhs) {
  Predicate p;
  p.kind = Kind::disjunction;
  p.children.push_back(std::move(lhs));
  p.children.push_back(std::move(rhs));
  return p;
}

Predicate Predicate::negation(Predicate operand) {
  Predicate p;
  p.kind = Kind::negation;
  p.children.push_back(std::move(operand));
  return p;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PropertyQuery property() {
    PropertyQuery q;
    skip_ws();
    expect('P', "expected 'P'");
    skip_ws();
    if (consume("=?")) {
      q.mode = PropertyQuery::Mode::query;
    } else {
      q.mode = PropertyQuery::Mode::threshold;
      const std::size_t op_pos = pos_;
      auto op = bound_operator();
      if (!op) throw ParseError(op_pos, "unknown comparison operator");
      q.bound = *op;
      skip_ws();
      const std::size_t num_pos = pos_;
      q.probability = real();
      if (!(q.probability >= 0.0 && q.probability <= 1.0)) {
        throw ParseError(num_pos, "probability bound must lie in [0, 1]");
      }
    }
    skip_ws();
    expect('[', "expected '['");
    skip_ws();
    expect('F', "expected 'F'");
    q.target = predicate();
    skip_ws();
    expect(']', "expected ']'");
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(pos_, "unexpected trailing input");
    return q;
  }

  Predicate whole_predicate() {
    Predicate p = predicate();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(pos_, "unexpected trailing input");
    return p;
  }

 private:
  Predicate predicate() {
    Predicate lhs = conj();
    for (;;) {
      skip_ws();
      if (!consume("|")) return lhs;
      lhs = Predicate::disjunction(std::move(lhs), conj());
    }
  }

  Predicate conj() {
    Predicate lhs = unary();
    for (;;) {
      skip_ws();
      if (!consume("&")) return lhs;
      lhs = Predicate::conjunction(std::move(lhs), unary());
    }
  }

  Predicate unary() {
    skip_ws();
    if (consume("!")) return Predicate::negation(unary());
    if (consume("(")) {
      Predicate inner = predicate();
      skip_ws();
      expect(')', "expected ')'");
      return inner;
    }
    if (pos_ >= text_.size() || !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      throw ParseError(pos_, "expected predicate");
    }
    std::string name = identifier();
    skip_ws();
    const std::size_t op_pos = pos_;
    auto op = atom_operator();
    if (!op) throw ParseError(op_pos, "unknown comparison operator");
    skip_ws();
    return Predicate::atom(std::move(name), *op, integer());
  }

  std::optional<Comparison> atom_operator() {
    if (consume("!=")) return Comparison::ne;
    if (consume("<=")) return Comparison::le;
    if (consume(">=")) return Comparison::ge;
    if (consume("<")) return Comparison::lt;
    if (consume(">")) return Comparison::gt;
    if (consume("=")) return Comparison::eq;
    return std::nullopt;
  }

  std::optional<Comparison> bound_operator() {
    if (consume("<=")) return Comparison::le;
    if (consume(">=")) return Comparison::ge;
    if (consume("<")) return Comparison::lt;
    if (consume(">")) return Comparison::gt;
    if (consume("=")) return Comparison::eq;
    return std::nullopt;
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  long long integer() {
    long long value = 0;
    const char* begin = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
    if (ec != std::errc() || ptr == begin) throw ParseError(pos_, "expected integer");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  double real() {
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
    if (ec != std::errc() || ptr == begin) throw ParseError(pos_, "expected probability");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  void expect(char c, const char* message) {
    if (pos_ >= text_.size() || text_[pos_] != c) throw ParseError(pos_, message);
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string shortest_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

PropertyQuery parse_property(std::string_view text) { return Parser(text).property(); }
Predicate parse_predicate(std::string_view text) { return Parser(text).whole_predicate(); }

std::string to_string(const Predicate& p) {
  switch (p.kind) {
    case Predicate::Kind::atom:
      return p.feature + std::string(to_string(p.comparison)) + std::to_string(p.value);
    case Predicate::Kind::negation:
      return "!" + to_string(p.children[0]);
    case Predicate::Kind::conjunction:
      return "(" + to_string(p.children[0]) + " & " + to_string(p.children[1]) + ")";
    case Predicate::Kind::disjunction:
      return "(" + to_string(p.children[0]) + " | " + to_string(p.children[1]) + ")";
  }
  return {};
}

std::string to_string(const PropertyQuery& q) {
  std::string head = q.mode == PropertyQuery::Mode::query
                         ? std::string("P=?")
                         : "P" + std::string(to_string(q.bound)) + shortest_real(q.probability);
  return head + " [ F " + to_string(q.target) + " ]";
}

BoundPredicate::BoundPredicate(const Predicate& predicate, const FeatureSchema& schema) {
  root_ = compile(predicate, schema);
}

std::size_t BoundPredicate::compile(const Predicate& p, const FeatureSchema& schema) {
  Node node{p.kind, 0, p.comparison, p.value, 0, 0};
  switch (p.kind) {
    case Predicate::Kind::atom: {
      auto index = schema.index_of(p.feature);
      if (!index) throw SemanticError("unknown feature '" + p.feature + "' in predicate");
      node.feature = *index;
      break;
    }
    case Predicate::Kind::negation:
      node.lhs = compile(p.children.at(0), schema);
      break;
    case Predicate::Kind::conjunction:
    case Predicate::Kind::disjunction:
      node.lhs = compile(p.children.at(0), schema);
      node.rhs = compile(p.children.at(1), schema);
      break;
  }
  nodes_.push_back(node);
  return nodes_.size() - 1;
}

bool BoundPredicate::eval(std::size_t index, std::span<const int> state) const {
  const Node& n = nodes_[index];
  switch (n.kind) {
    case Predicate::Kind::atom: return compare(n.comparison, static_cast<long long>(state[n.feature]), n.value);
    case Predicate::Kind::negation: return !eval(n.lhs, state);
    case Predicate::Kind::conjunction: return eval(n.lhs, state) && eval(n.rhs, state);
    case Predicate::Kind::disjunction: return eval(n.lhs, state) || eval(n.rhs, state);
  }
  return false;
}

bool bind_and_eval(const Predicate& predicate, std::span<const int> state, const FeatureSchema& schema) {
  return BoundPredicate(predicate, schema)(state);
}

}  // namespace rashomon
