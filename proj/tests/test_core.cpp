#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "zenosense/common.hpp"
#include "zenosense/core.hpp"

using namespace zeno;

namespace {

ProtocolParams baseline() {
  ProtocolParams p;
  p.gamma = 1.0;
  p.omega = 0.0;
  p.p = 0.0;
  p.big_gamma = 0.0;
  p.L = 4;
  p.M = 2;
  p.n = 2;
  p.t = 1.0;
  p.T = 10.0;
  return p;
}

TEST(Validate, AcceptsWellFormedParams) {
  EXPECT_NO_THROW(validate(baseline()));
}

TEST(Validate, RejectsNonDividingBlockSize) {
  ProtocolParams p = baseline();
  p.M = 3;
  try {
    validate(p);
    FAIL() << "expected a validation error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("M must divide L"), std::string::npos);
  }
}

TEST(Validate, RejectsUnitTeleportErrorProbability) {
  ProtocolParams p = baseline();
  p.p = 1.0;
  try {
    validate(p);
    FAIL() << "expected a validation error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("p must be < 1"), std::string::npos);
  }
}

TEST(Validate, RejectsBadTimes) {
  ProtocolParams p = baseline();
  p.t = 0.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = baseline();
  p.T = 0.5;  // T < t
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = baseline();
  p.n = 0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = baseline();
  p.gamma = -0.1;
  EXPECT_THROW(validate(p), std::invalid_argument);
}

TEST(Validate, Idempotent) {
  const ProtocolParams once = validate(baseline());
  const ProtocolParams twice = validate(once);
  EXPECT_EQ(once.gamma, twice.gamma);
  EXPECT_EQ(once.omega, twice.omega);
  EXPECT_EQ(once.p, twice.p);
  EXPECT_EQ(once.big_gamma, twice.big_gamma);
  EXPECT_EQ(once.L, twice.L);
  EXPECT_EQ(once.M, twice.M);
  EXPECT_EQ(once.n, twice.n);
  EXPECT_EQ(once.t, twice.t);
  EXPECT_EQ(once.T, twice.T);
}

// round-trip exactness of the serialization the CLI uses
TEST(Serialization, G17RoundTripIsExact) {
  testutil::Draw draw(41);
  for (int i = 0; i < 2000; ++i) {
    const double mantissa = draw.uniform(-1.0, 1.0);
    const double expo = draw.uniform(-300.0, 300.0);
    const double x = mantissa * std::pow(10.0, expo);
    EXPECT_EQ(parse_double(format_g17(x)), x);
  }
  EXPECT_EQ(parse_double(format_g17(0.1)), 0.1);
  EXPECT_EQ(parse_double(format_g17(std::exp(1.0))), std::exp(1.0));
  EXPECT_EQ(parse_double(format_g17(0.0)), 0.0);
}

TEST(SensitivityResult, InvariantByConstruction) {
  const SensitivityResult r = make_sensitivity(0.37, 0.21, 1234.5);
  EXPECT_DOUBLE_EQ(r.delta_omega, std::sqrt(r.variance) / (r.slope * std::sqrt(r.repetitions)));
}

}  // namespace
