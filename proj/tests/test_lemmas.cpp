#include "fixnet/lemmas.hpp"

#include <gtest/gtest.h>

namespace fixnet {
namespace {

void expect_pass(const PropertyResult& r) {
  EXPECT_GT(r.samples, 0u) << r.name;
  EXPECT_EQ(r.violations, 0u) << r.name << ": " << r.detail;
  EXPECT_TRUE(r.pass()) << r.name;
}

TEST(Properties, KroneckerNormBound) { expect_pass(check_kronecker_bound(1000, 1)); }
TEST(Properties, FixedPointInnerProduct) { expect_pass(check_fixed_point_inner_product(1000, 2)); }
TEST(Properties, ResidualRecursion) { expect_pass(check_residual_recursion(3)); }
TEST(Properties, ConvexIdentity) { expect_pass(check_convex_identity(10000, 4)); }
TEST(Properties, BlockResidualBound) { expect_pass(check_block_residual_bound(10000, 5)); }
TEST(Properties, FejerSurrogate) { expect_pass(check_fejer_surrogate(6)); }
TEST(Properties, SolutionStationarity) { expect_pass(check_solution_stationarity(7)); }

TEST(Properties, EmptyResultDoesNotPass) {
  PropertyResult r;
  EXPECT_FALSE(r.pass());
}

}  // namespace
}  // namespace fixnet
