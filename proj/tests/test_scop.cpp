#include <gtest/gtest.h>

#include "scopt/scop/dependence.hpp"
#include "scopt/scop/emit.hpp"
#include "scopt/scop/parser.hpp"
#include "scopt/scop/program.hpp"
#include "scopt/scop/region.hpp"
#include "support/dep_oracle.hpp"
#include "support/fixtures.hpp"

using namespace scopt;

namespace {

std::map<std::string, std::int64_t> syrk_params() { return {{"N", 12}, {"M", 10}}; }

Scop parse_syrk() {
  ParseOptions opt;
  opt.arrays["C"] = {"double", {AffineExpr::var("N"), AffineExpr::var("N")}, 2, true};
  opt.arrays["A"] = {"double", {AffineExpr::var("N"), AffineExpr::var("M")}, 2, true};
  return parse_scop(test::kSyrkScop, syrk_params(), opt);
}

}  // namespace

TEST(Region, ExtractsSyrkRegionAndRoundTrips) {
  ScopRegion r = extract_scop_region(test::kSyrkProgram);
  EXPECT_EQ(r.prefix + r.scop + r.suffix, test::kSyrkProgram);
  EXPECT_NE(r.prefix.find("#pragma scop\n"), std::string::npos);
  EXPECT_EQ(r.suffix.rfind("#pragma endscop", 0), 0u);
  EXPECT_NE(r.scop.find("C[i][j] *= beta;"), std::string::npos);
  EXPECT_NE(r.scop.find("C[i][j] += alpha * A[i][k] * A[j][k];"), std::string::npos);
  EXPECT_EQ(r.scop.find("pragma"), std::string::npos);
}

TEST(Region, MissingMarkers) {
  try {
    extract_scop_region("int main() { return 0; }\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingMarkers);
  }
  try {
    extract_scop_region("#pragma scop\nA[0] = 1;\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingMarkers);
  }
  try {
    extract_scop_region("#pragma endscop\n#pragma scop\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingMarkers);
  }
}

TEST(Region, MultipleRegions) {
  try {
    extract_scop_region("#pragma scop\nA[0]=1;\n#pragma endscop\n#pragma scop\nB[0]=1;\n#pragma endscop\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MultipleRegions);
  }
}

TEST(Region, ToleratesSpacingAndNoTrailingNewline) {
  std::string src = "x\n  #  pragma   scop\nA[0] = 1;\n# pragma endscop";
  ScopRegion r = extract_scop_region(src);
  EXPECT_EQ(r.scop, "A[0] = 1;\n");
  EXPECT_EQ(r.prefix + r.scop + r.suffix, src);
}

TEST(Parser, SyrkSchedules) {
  Scop s = parse_syrk();
  ASSERT_EQ(s.statements.size(), 2u);
  EXPECT_EQ(s.statements[0].schedule.to_string(3), "[0,i,0,j,0,0,0]");
  EXPECT_EQ(s.statements[1].schedule.to_string(), "[0,i,1,k,0,j,0]");
  EXPECT_EQ(s.statements[0].schedule.to_string(), "[0,i,0,j,0]");
  EXPECT_EQ(s.statements[0].op, AssignOp::Mul);
  EXPECT_EQ(s.statements[1].op, AssignOp::Add);
  // Compound assignment contributes an implicit read of the left-hand side.
  ASSERT_EQ(s.statements[1].reads.size(), 4u);
  EXPECT_EQ(render_access(s.statements[1].reads[0]), "C[i][j]");
  EXPECT_EQ(render_access(s.statements[1].reads[1]), "alpha");
  EXPECT_EQ(render_access(s.statements[1].reads[2]), "A[i][k]");
  EXPECT_EQ(render_access(s.statements[1].reads[3]), "A[j][k]");
}

TEST(Parser, SyrkBounds) {
  Scop s = parse_syrk();
  const Loop& j = s.loops[static_cast<std::size_t>(s.statements[0].loops[1])];
  EXPECT_EQ(j.iterator, "j");
  EXPECT_EQ(j.lower[0].to_c(), "0");
  EXPECT_EQ(j.upper[0].to_c(), "i + 1");
  const Loop& k = s.loops[static_cast<std::size_t>(s.statements[1].loops[1])];
  EXPECT_EQ(k.upper[0].to_c(), "M");
  EXPECT_NO_THROW(validate_scop(s));
}

TEST(Parser, SingleLoopSchedule) {
  Scop s = parse_scop("for (i = 0; i < N; i++)\n  A[i] = 0;\n", {{"N", 8}});
  ASSERT_EQ(s.statements.size(), 1u);
  EXPECT_EQ(s.statements[0].schedule.to_string(), "[0,i,0]");
  EXPECT_TRUE(s.statements[0].reads.empty());
}

TEST(Parser, RejectsNonAffineBound) {
  try {
    parse_scop("for (i = 0; i < N*N; i++) A[i] = 0;", {{"N", 8}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonAffineBound);
  }
}

TEST(Parser, RejectsUnsupportedConstructs) {
  auto kind_of = [](const std::string& text) {
    try {
      parse_scop(text, {{"N", 8}});
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  EXPECT_EQ(kind_of("while (1) A[0] = 1;"), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(kind_of("for (i = 0; i < N; i++) *p = 1;"), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(kind_of("for (i = 0; i < N; i++) A[i] = foo(i);"), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(kind_of("for (i = 0; i < N; i++) bar(i);"), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(kind_of("for (i = 0; i < N; i += 2) A[i] = 1;"), ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(kind_of("for (i = 0; i < Q; i++) A[i] = 1;"), ErrorKind::UnknownParameter);
  EXPECT_EQ(kind_of("for (i = 0; i < N; i++) A[B[i]] = 1;"), ErrorKind::UnsupportedConstruct);
}

TEST(Parser, InclusiveBoundNormalizedToExclusive) {
  Scop s = parse_scop("for (i = 1; i <= N - 1; i++) A[i] = A[i - 1];", {{"N", 8}});
  EXPECT_EQ(s.loops[0].upper[0].to_c(), "N");
}

TEST(Parser, OpaqueCallAndIf) {
  Scop s = parse_scop(
      "for (t = 0; t < T; t++) {\n"
      "  for (i = 0; i < N; i++)\n"
      "    if (i < M) a[i] = a[i] + b[i];\n"
      "  dummy(a, b);\n"
      "}\n",
      {{"N", 8}, {"M", 5}, {"T", 3}});
  ASSERT_EQ(s.statements.size(), 2u);
  EXPECT_TRUE(s.statements[1].opaque);
  EXPECT_EQ(s.statements[1].opaque_text, "dummy(a, b)");
  EXPECT_TRUE(s.statements[1].reads.empty());
  EXPECT_FALSE(s.statements[1].write.has_value());
  ASSERT_EQ(s.statements[0].guards.size(), 1u);
  EXPECT_EQ(s.statements[0].schedule.to_string(), "[0,t,0,i,0]");
  EXPECT_EQ(s.statements[1].schedule.to_string(), "[0,t,1]");
}

TEST(Parser, ProgramScanFindsMacrosAndArrays) {
  ProgramInfo info = scan_program(test::kSyrkProgram);
  EXPECT_EQ(info.params.at("N"), 12);
  EXPECT_EQ(info.params.at("M"), 10);
  ASSERT_TRUE(info.arrays.count("C"));
  EXPECT_EQ(info.arrays.at("C").dims.size(), 2u);
  EXPECT_EQ(info.arrays.at("A").dims[1].to_c(), "M");
  EXPECT_TRUE(info.declared.count("alpha"));
  ParsedProgram p = parse_program(test::kSyrkProgram);
  EXPECT_EQ(p.scop.statements.size(), 2u);
  EXPECT_TRUE(p.scop.arrays.at("A").declared);
}

TEST(Emit, RoundTripIsIdentity) {
  Scop s = parse_syrk();
  std::string text = emit_scop(s);
  ParseOptions opt;
  opt.arrays = s.arrays;
  Scop again = parse_scop(text, syrk_params(), opt);
  EXPECT_EQ(emit_scop(again), text);
  ASSERT_EQ(again.statements.size(), s.statements.size());
  for (std::size_t i = 0; i < s.statements.size(); ++i) {
    EXPECT_EQ(again.statements[i].schedule, s.statements[i].schedule);
    EXPECT_EQ(again.statements[i].reads, s.statements[i].reads);
    EXPECT_EQ(again.statements[i].write, s.statements[i].write);
    EXPECT_EQ(again.statements[i].rhs, s.statements[i].rhs);
  }
}

TEST(Emit, ExpressionParenthesesPreserveTree) {
  Scop s = parse_scop("for (i = 1; i < N; i++) A[i] = B[i] - (B[i - 1] - 2) * -(C[i] + 1) / 3;", {{"N", 8}});
  std::string text = emit_scop(s);
  Scop again = parse_scop(text, {{"N", 8}});
  EXPECT_EQ(again.statements[0].rhs, s.statements[0].rhs);
}

TEST(Dependence, SyrkHasAllThreeTypesOnC) {
  Scop s = parse_syrk();
  auto r = compute_dependences(s);
  EXPECT_FALSE(r.best_effort);
  std::set<DepType> on_c;
  for (const auto& d : r.deps)
    if (d.array == "C") on_c.insert(d.type);
  EXPECT_EQ(on_c, (std::set<DepType>{DepType::RAW, DepType::WAW, DepType::WAR}));
  for (const auto& d : r.deps) EXPECT_EQ(d.array, "C");  // A is only read
}

TEST(Dependence, SameIndexSelfUpdateIsLoopIndependentWar) {
  Scop s = parse_scop("for (i = 0; i < N; i++) A[i] = A[i] + 1;", {{"N", 10}});
  auto r = compute_dependences(s);
  ASSERT_EQ(r.deps.size(), 1u);
  EXPECT_EQ(r.deps[0].type, DepType::WAR);
  EXPECT_EQ(r.deps[0].level, 0);
  EXPECT_EQ(r.deps[0].distance, (std::vector<std::int64_t>{0}));
}

TEST(Dependence, ListingTwoCarriesOnOuterLoopWithDistanceOne) {
  // Two-statement example with a 10x10 domain for S1. Frozen from the
  // exhaustive scan: S1 alone only carries a WAW on j (distance (0,1));
  // the dependence carried by i with distance 1 is S2's read of A[i][k]
  // followed by S1's write of A[i-1][i] one i-iteration later.
  ParseOptions opt;
  opt.arrays["A"] = {"double", {AffineExpr(12), AffineExpr(12)}, 2, true};
  opt.arrays["C"] = {"double", {AffineExpr(12), AffineExpr(12)}, 2, true};
  Scop s = parse_scop(
      "for (i = 2; i < 12; i++) {\n"
      "  for (j = 0; j < 10; j++)\n"
      "    A[i - 1][i] = A[i - 2][i] + C[i][j] * 6;\n"
      "  for (k = 0; k < 10; k++)\n"
      "    A[k + 1][k] = A[i][k] - C[k + 1][i] * 4;\n"
      "}\n",
      {}, opt);
  auto r = compute_dependences(s);
  EXPECT_FALSE(r.best_effort);
  EXPECT_EQ(r.deps, test::brute_force_dependences(s));

  bool s1_self_on_j = false, carried_on_i = false;
  for (const auto& d : r.deps) {
    if (d.source_stmt == 0 && d.target_stmt == 0) {
      EXPECT_EQ(d.type, DepType::WAW);
      EXPECT_EQ(d.level, 2);
      EXPECT_EQ(d.distance, (std::vector<std::int64_t>{0, 1}));
      s1_self_on_j = true;
    }
    if (d.source_stmt == 1 && d.target_stmt == 0 && d.level == 1 && d.type == DepType::WAR) {
      EXPECT_EQ(d.distance, (std::vector<std::int64_t>{1}));
      carried_on_i = true;
    }
  }
  EXPECT_TRUE(s1_self_on_j);
  EXPECT_TRUE(carried_on_i);
}

TEST(Dependence, AnalyticMatchesBruteForceOnSyrk) {
  Scop s = parse_syrk();
  EXPECT_EQ(compute_dependences(s).deps, test::brute_force_dependences(s));
}

TEST(Dependence, NonUnitCoefficientsFallBackToScan) {
  Scop s = parse_scop("for (i = 0; i < N; i++) A[2 * i] = A[i] + 1;", {{"N", 10}});
  auto r = compute_dependences(s);
  EXPECT_TRUE(r.best_effort);
  EXPECT_EQ(r.deps, test::brute_force_dependences(s));
  EXPECT_EQ(analytic_dependences(s), test::brute_force_dependences(s));
}

TEST(Solver, LexminAndInfeasibility) {
  IntSystem sys({"x", "y"});
  sys.add_ge(AffineExpr::var("x") - 2);                        // x >= 2
  sys.add_ge(AffineExpr(10) - AffineExpr::var("x"));           // x <= 10
  sys.add_eq(AffineExpr::var("y") * 2 - AffineExpr::var("x") - 1);  // 2y = x + 1
  auto p = sys.lexmin({sys.var("x")});
  ASSERT_TRUE(p);
  EXPECT_EQ((*p)[0], 3);
  EXPECT_EQ((*p)[1], 2);
  IntSystem none({"x"});
  none.add_eq(AffineExpr::var("x") * 2 - 1);
  EXPECT_FALSE(none.feasible());
}
