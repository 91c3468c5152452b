#include <gtest/gtest.h>

#include "localmq/suites.hpp"

using namespace localmq;

class EverySuite : public ::testing::TestWithParam<std::string> {};

TEST_P(EverySuite, PassesOnSmallInstances) {
  SuiteParams p;
  p.n = 8;
  p.instances = 25;
  p.seed = 3;
  const auto r = run_lemma_suite(GetParam(), p);
  EXPECT_TRUE(r.pass()) << r.to_json().dump();
  EXPECT_GT(r.checks, 0u);
  EXPECT_GE(r.worst_margin, -r.tolerance);
}

TEST_P(EverySuite, ReportIsDeterministic) {
  SuiteParams p;
  p.n = 7;
  p.instances = 5;
  p.seed = 9;
  EXPECT_EQ(run_lemma_suite(GetParam(), p).to_json().dump(), run_lemma_suite(GetParam(), p).to_json().dump());
}

INSTANTIATE_TEST_SUITE_P(Suites, EverySuite, ::testing::ValuesIn(suite_names()), [](const auto& info) {
  std::string s = info.param;
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return s;
});

TEST(Suites, FactSmoothAtRequestedAlpha) {
  SuiteParams p;
  p.n = 10;
  p.alpha = 1.5;
  const auto r = run_lemma_suite("fact-smooth", p);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.params["alpha"], 1.5);
}

TEST(Suites, RejectsBadRequests) {
  SuiteParams p;
  EXPECT_THROW(run_lemma_suite("lemma-z9", p), ContractViolation);
  p.instances = 0;
  EXPECT_THROW(run_lemma_suite("parseval", p), ContractViolation);
  p.instances = 1;
  p.alpha = 0.5;
  EXPECT_THROW(run_lemma_suite("parseval", p), ContractViolation);
}

TEST(Suites, RecordSemantics) {
  SuiteReport r;
  r.tolerance = 1e-9;
  r.record(-1e-10, [] { return nlohmann::json::object(); });
  EXPECT_TRUE(r.pass());
  r.record(0.0, [] { return nlohmann::json::object(); }, true);
  EXPECT_FALSE(r.pass());
  r.record(-1, [] { return nlohmann::json{{"second", true}}; });
  EXPECT_EQ(r.violations, 2u);
  EXPECT_FALSE(r.counterexample.contains("second"));
  EXPECT_EQ(r.worst_margin, -1);
}
