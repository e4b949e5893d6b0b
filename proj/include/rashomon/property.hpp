#pragma once

// Probability properties over the eventually operator:
//
//   property   := 'P' ( '=?' | bound_op number ) '[' 'F' predicate ']'
//   bound_op   := '<' | '<=' | '>' | '>=' | '='
//   predicate  := conj ( '|' conj )*
//   conj       := unary ( '&' unary )*
//   unary      := '!' unary | '(' predicate ')' | feature cmp integer
//   cmp        := '=' | '!=' | '<' | '<=' | '>' | '>='
//
// Whitespace is insignificant. Binary operators associate to the left.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rashomon/model.hpp"

namespace rashomon {

enum class Comparison { eq, ne, lt, le, gt, ge };

std::string_view to_string(Comparison c);
bool compare(Comparison c, long long lhs, long long rhs);
bool compare(Comparison c, double lhs, double rhs);

struct Predicate {
  enum class Kind { atom, conjunction, disjunction, negation };

  Kind kind = Kind::atom;
  std::string feature;
  Comparison comparison = Comparison::eq;
  long long value = 0;
  std::vector<Predicate> children;

  static Predicate atom(std::string feature, Comparison c, long long value);
  static Predicate conjunction(Predicate lhs, Predicate rhs);
  static Predicate disjunction(Predicate lhs, Predicate rhs);
  static Predicate negation(Predicate operand);

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct PropertyQuery {
  enum class Mode { query, threshold };

  Mode mode = Mode::query;
  Comparison bound = Comparison::ge;  // threshold mode only
  double probability = 0.0;           // threshold mode only, in [0, 1]
  Predicate target;                   // the path formula is F target

  friend bool operator==(const PropertyQuery&, const PropertyQuery&) = default;
};

// Throws ParseError carrying the 0-based character offset of the problem.
PropertyQuery parse_property(std::string_view text);
Predicate parse_predicate(std::string_view text);

std::string to_string(const Predicate& p);
std::string to_string(const PropertyQuery& q);

// A predicate resolved against a schema, ready for evaluation.
class BoundPredicate {
 public:
  // Throws SemanticError naming the first feature missing from the schema.
  BoundPredicate(const Predicate& predicate, const FeatureSchema& schema);

  bool operator()(std::span<const int> state) const { return eval(root_, state); }

 private:
  struct Node {
    Predicate::Kind kind;
    std::size_t feature;
    Comparison comparison;
    long long value;
    std::size_t lhs;
    std::size_t rhs;
  };

  std::size_t compile(const Predicate& p, const FeatureSchema& schema);
  bool eval(std::size_t node, std::span<const int> state) const;

  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

bool bind_and_eval(const Predicate& predicate, std::span<const int> state, const FeatureSchema& schema);

}  // namespace rashomon
