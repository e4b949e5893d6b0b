#include "rashomon/property.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "rashomon/checker.hpp"
#include "rashomon/error.hpp"
#include "rashomon/random.hpp"
#include "rashomon/taxi.hpp"

namespace rashomon {
namespace {

using Kind = Predicate::Kind;

const FeatureSchema& taxi_schema() {
  static const FeatureSchema schema = taxi::schema(taxi::TaxiParams{});
  return schema;
}

Predicate random_predicate(Xoshiro256& rng, int depth) {
  static const Comparison ops[] = {Comparison::eq, Comparison::ne, Comparison::lt,
                                   Comparison::le, Comparison::gt, Comparison::ge};
  const auto& names = taxi_schema().names();
  if (depth == 0 || rng.below(3) == 0) {
    return Predicate::atom(names[rng.below(names.size())], ops[rng.below(6)],
                           static_cast<long long>(rng.below(17)) - 2);
  }
  switch (rng.below(3)) {
    case 0:
      return Predicate::negation(random_predicate(rng, depth - 1));
    case 1:
      return Predicate::conjunction(random_predicate(rng, depth - 1), random_predicate(rng, depth - 1));
    default:
      return Predicate::disjunction(random_predicate(rng, depth - 1), random_predicate(rng, depth - 1));
  }
}

std::vector<int> random_state(Xoshiro256& rng) {
  std::vector<int> s;
  for (const auto& b : taxi_schema().bounds()) s.push_back(b.min + static_cast<int>(rng.below(b.max - b.min + 1)));
  return s;
}

TEST(ParseProperty, QueryWithConjunction) {
  const auto q = parse_property("P=? [ F jobs_done=5 & done=1 ]");
  EXPECT_EQ(q.mode, PropertyQuery::Mode::query);
  ASSERT_EQ(q.target.kind, Kind::conjunction);
  EXPECT_EQ(q.target.children[0], Predicate::atom("jobs_done", Comparison::eq, 5));
  EXPECT_EQ(q.target.children[1], Predicate::atom("done", Comparison::eq, 1));
}

TEST(ParseProperty, ThresholdGreaterOrEqualOne) {
  const auto q = parse_property("P>=1 [ F done=1 ]");
  EXPECT_EQ(q.mode, PropertyQuery::Mode::threshold);
  EXPECT_EQ(q.bound, Comparison::ge);
  EXPECT_EQ(q.probability, 1.0);
  EXPECT_EQ(q.target, Predicate::atom("done", Comparison::eq, 1));
}

TEST(ParseProperty, AllBoundOperators) {
  EXPECT_EQ(parse_property("P<0.25 [ F x=0 ]").bound, Comparison::lt);
  EXPECT_EQ(parse_property("P<=0.25 [ F x=0 ]").bound, Comparison::le);
  EXPECT_EQ(parse_property("P>0.25 [ F x=0 ]").bound, Comparison::gt);
  EXPECT_EQ(parse_property("P=0.25 [ F x=0 ]").bound, Comparison::eq);
  EXPECT_EQ(parse_property("P<0.25 [ F x=0 ]").probability, 0.25);
}

TEST(ParseProperty, MissingPredicateIsSyntaxError) {
  try {
    parse_property("P=? [ F ]");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("expected predicate"), std::string::npos) << e.what();
    EXPECT_EQ(e.position(), 8u);
  }
}

TEST(ParseProperty, UnknownComparisonOperator) {
  for (const char* text : {"P=? [ F x ~ 3 ]", "P!=0.5 [ F x=1 ]", "P=? [ F x 3 ]"}) {
    try {
      parse_property(text);
      FAIL() << "expected a parse error for " << text;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find("unknown comparison operator"), std::string::npos) << text;
    }
  }
}

TEST(ParseProperty, OtherSyntaxErrors) {
  EXPECT_THROW(parse_property(""), ParseError);
  EXPECT_THROW(parse_property("Q=? [ F x=1 ]"), ParseError);
  EXPECT_THROW(parse_property("P=? F x=1"), ParseError);
  EXPECT_THROW(parse_property("P=? [ G x=1 ]"), ParseError);
  EXPECT_THROW(parse_property("P=? [ F x=1"), ParseError);
  EXPECT_THROW(parse_property("P=? [ F x=1 ] extra"), ParseError);
  EXPECT_THROW(parse_property("P=? [ F (x=1 ]"), ParseError);
  EXPECT_THROW(parse_property("P=? [ F x=one ]"), ParseError);
  EXPECT_THROW(parse_property("P>=1.5 [ F x=1 ]"), ParseError);
  EXPECT_THROW(parse_property("P>=-0.1 [ F x=1 ]"), ParseError);
}

TEST(ParseProperty, WhitespaceInsensitive) {
  EXPECT_EQ(parse_property("P=?[F jobs_done=5&done=1]"), parse_property("  P =?  [  F  jobs_done = 5 & done = 1 ]  "));
}

TEST(ParsePredicate, PrecedenceNotOverAndOverOr) {
  const auto p = parse_predicate("!x=1 & y=2 | fuel>3");
  ASSERT_EQ(p.kind, Kind::disjunction);
  ASSERT_EQ(p.children[0].kind, Kind::conjunction);
  EXPECT_EQ(p.children[0].children[0].kind, Kind::negation);
  EXPECT_EQ(p.children[1], Predicate::atom("fuel", Comparison::gt, 3));
  const auto q = parse_predicate("!(x=1 | y=2)");
  ASSERT_EQ(q.kind, Kind::negation);
  EXPECT_EQ(q.children[0].kind, Kind::disjunction);
}

TEST(ParsePredicate, NegativeLiteralsAndAllAtomOperators) {
  EXPECT_EQ(parse_predicate("x>=-3"), Predicate::atom("x", Comparison::ge, -3));
  EXPECT_EQ(parse_predicate("x!=2").comparison, Comparison::ne);
  EXPECT_EQ(parse_predicate("x<2").comparison, Comparison::lt);
  EXPECT_EQ(parse_predicate("x<=2").comparison, Comparison::le);
  EXPECT_EQ(parse_predicate("x>2").comparison, Comparison::gt);
}

TEST(PrettyPrint, ParsePrintParseIsAFixedPoint) {
  Xoshiro256 rng(20240611);
  for (int i = 0; i < 500; ++i) {
    const Predicate p = random_predicate(rng, 4);
    const std::string text = to_string(p);
    const Predicate back = parse_predicate(text);
    EXPECT_EQ(back, p) << text;
    EXPECT_EQ(to_string(back), text);
  }
  for (const char* text : {"P=? [ F jobs_done=5 & done=1 ]", "P>=1 [ F done=1 ]", "P<0.125 [ F !(x=0 | y>2) ]"}) {
    const auto q = parse_property(text);
    EXPECT_EQ(parse_property(to_string(q)), q) << text;
  }
}

TEST(BindAndEval, SpecExamples) {
  auto s = taxi::initial_state(taxi::TaxiParams{});
  s[taxi::done] = 1;
  EXPECT_TRUE(bind_and_eval(parse_predicate("done=1"), s, taxi_schema()));
  s[taxi::fuel] = 0;
  EXPECT_FALSE(bind_and_eval(parse_predicate("fuel>0 & !(jobs_done=5)"), s, taxi_schema()));
}

TEST(BindAndEval, UnknownFeatureFailsAtBindTime) {
  try {
    BoundPredicate(parse_predicate("x=1 & altitude>3"), taxi_schema());
    FAIL() << "expected a semantic error";
  } catch (const SemanticError& e) {
    EXPECT_NE(std::string(e.what()).find("altitude"), std::string::npos);
  }
}

// Reference semantics written directly over the AST.
bool direct_eval(const Predicate& p, const std::vector<int>& s) {
  switch (p.kind) {
    case Kind::atom: {
      const long long v = s[*taxi_schema().index_of(p.feature)];
      switch (p.comparison) {
        case Comparison::eq: return v == p.value;
        case Comparison::ne: return v != p.value;
        case Comparison::lt: return v < p.value;
        case Comparison::le: return v <= p.value;
        case Comparison::gt: return v > p.value;
        case Comparison::ge: return v >= p.value;
      }
      return false;
    }
    case Kind::negation: return !direct_eval(p.children[0], s);
    case Kind::conjunction: return direct_eval(p.children[0], s) && direct_eval(p.children[1], s);
    case Kind::disjunction: return direct_eval(p.children[0], s) || direct_eval(p.children[1], s);
  }
  return false;
}

TEST(BindAndEval, DeMorganOnRandomStates) {
  Xoshiro256 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Predicate a = random_predicate(rng, 2);
    const Predicate b = random_predicate(rng, 2);
    const auto s = random_state(rng);
    const bool lhs = bind_and_eval(Predicate::negation(Predicate::disjunction(a, b)), s, taxi_schema());
    const bool rhs = bind_and_eval(Predicate::conjunction(Predicate::negation(a), Predicate::negation(b)), s,
                                   taxi_schema());
    EXPECT_EQ(lhs, rhs);
    EXPECT_EQ(lhs, !(direct_eval(a, s) || direct_eval(b, s)));
  }
}

TEST(BindAndEval, AgreesWithDirectSemantics) {
  Xoshiro256 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const Predicate p = random_predicate(rng, 4);
    const auto s = random_state(rng);
    const BoundPredicate bound(p, taxi_schema());
    EXPECT_EQ(bound(s), direct_eval(p, s)) << to_string(p);
    EXPECT_EQ(bound(s), bound(s));
  }
}

TEST(CheckThreshold, Examples) {
  EXPECT_EQ(check_threshold(parse_property("P>=1 [ F done=1 ]"), 1.0), Verdict::satisfied);
  EXPECT_EQ(check_threshold(parse_property("P<0.1 [ F done=1 ]"), 0.1), Verdict::violated);
  EXPECT_EQ(check_threshold(parse_property("P>=1 [ F done=1 ]"), 0.9999999999999), Verdict::satisfied);
  EXPECT_EQ(check_threshold(parse_property("P>=1 [ F done=1 ]"), 0.99999999), Verdict::violated);
  EXPECT_EQ(check_threshold(parse_property("P=0.5 [ F done=1 ]"), 0.5), Verdict::satisfied);
  EXPECT_THROW(check_threshold(parse_property("P=? [ F done=1 ]"), 0.5), SemanticError);
}

}  // namespace
}  // namespace rashomon
