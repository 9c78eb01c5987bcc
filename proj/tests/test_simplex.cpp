#include "monoqkd/simplex.hpp"

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

using namespace monoqkd::lp;
using Rational = boost::multiprecision::cpp_rational;

TEST(Simplex, textbook_maximum) {
  LinearProgram<double> lp(2);
  lp.objective = {3, 5};
  lp.add({1, 0}, Sense::LessEqual, 4);
  lp.add({0, 2}, Sense::LessEqual, 12);
  lp.add({3, 2}, Sense::LessEqual, 18);
  const auto s = solve(lp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.optimum, 36.0, 1e-12);
  EXPECT_NEAR(s.x[0], 2.0, 1e-12);
  EXPECT_NEAR(s.x[1], 6.0, 1e-12);
}

TEST(Simplex, greater_equal_and_negative_rhs) {
  // minimize x + y  s.t. x + 2y >= 4, -x + y <= -1  (i.e. x - y >= 1)
  LinearProgram<double> lp(2);
  lp.objective = {-1, -1};
  lp.add({1, 2}, Sense::GreaterEqual, 4);
  lp.add({-1, 1}, Sense::LessEqual, -1);
  const auto s = solve(lp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(-s.optimum, 3.0, 1e-12);
  EXPECT_NEAR(s.x[0], 2.0, 1e-12);
  EXPECT_NEAR(s.x[1], 1.0, 1e-12);
}

TEST(Simplex, infeasible_and_unbounded) {
  LinearProgram<double> bad(1);
  bad.objective = {1};
  bad.add({1}, Sense::GreaterEqual, 2);
  bad.add({1}, Sense::LessEqual, 1);
  EXPECT_EQ(solve(bad).status, Status::Infeasible);

  LinearProgram<double> open(2);
  open.objective = {1, 0};
  open.add({1, -1}, Sense::LessEqual, 1);
  EXPECT_EQ(solve(open).status, Status::Unbounded);
}

TEST(Simplex, redundant_equalities) {
  LinearProgram<double> lp(3);
  lp.objective = {1, 0, 0};
  lp.add({1, 1, 1}, Sense::Equal, 1);
  lp.add({2, 2, 2}, Sense::Equal, 2);
  lp.add({1, 1, 1}, Sense::Equal, 1);
  lp.add({0, 1, -1}, Sense::Equal, 0);
  const auto s = solve(lp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.optimum, 1.0, 1e-12);
}

TEST(Simplex, degenerate_cycling_example) {
  // Beale's example: cycles under the textbook largest-coefficient rule.
  LinearProgram<double> lp(4);
  lp.objective = {0.75, -150, 0.02, -6};
  lp.add({0.25, -60, -0.04, 9}, Sense::LessEqual, 0);
  lp.add({0.5, -90, -0.02, 3}, Sense::LessEqual, 0);
  lp.add({0, 0, 1, 0}, Sense::LessEqual, 1);
  const auto s = solve(lp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.optimum, 0.05, 1e-12);
}

TEST(Simplex, exact_rational) {
  LinearProgram<Rational> lp(2);
  lp.objective = {Rational(1), Rational(1)};
  lp.add({Rational(3), Rational(1)}, Sense::LessEqual, Rational(1));
  lp.add({Rational(1), Rational(3)}, Sense::LessEqual, Rational(1));
  const auto s = solve(lp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_EQ(s.optimum, Rational(1, 2));
  EXPECT_EQ(s.x[0], Rational(1, 4));
}
