// Randomized property suites: 1000 seeded trials total across eight
// properties (125 each). Bodies live in support/properties.hpp so the
// acceptance harness runs the identical checks.

#include <doctest.h>

#include "support/properties.hpp"

namespace {
constexpr int kTrials = 125;
}

TEST_CASE("property: oblique projector idempotence") {
  CHECK(props::projector_idempotence(kTrials) == 0);
}

TEST_CASE("property: Galerkin orthogonality Q'A(I - P_A) = 0") {
  CHECK(props::galerkin_orthogonality(kTrials) == 0);
}

TEST_CASE("property: P_A is non-expansive in the A norm") {
  CHECK(props::non_expansiveness(kTrials) == 0);
}

TEST_CASE("property: P~_M maps to the best approximation in the M norm") {
  CHECK(props::best_approximation(kTrials) == 0);
}

TEST_CASE("property: min-max sampling never beats lambda_k") {
  CHECK(props::minmax_sampling(kTrials) == 0);
}

TEST_CASE("property: shift covariance of the generalized eigensolve") {
  CHECK(props::shift_covariance(kTrials) == 0);
}

TEST_CASE("property: basis rotation invariance of the reduced spectrum") {
  CHECK(props::basis_rotation_invariance(kTrials) == 0);
}

TEST_CASE("property: kappa dominates sampled norm ratios") {
  CHECK(props::kappa_monte_carlo(kTrials) == 0);
}
