#include <cmath>

#include "doctest.h"
#include "gsbm/dma_prior.hpp"

using namespace gsbm;
using doctest::Approx;

namespace {

// Calls fn on every label vector in {0..k-1}^n.
template <class Fn>
void each_labelling(std::size_t n, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> labels(n, 0);
  while (true) {
    fn(BlockAssignment(labels, k));
    std::size_t pos = 0;
    while (pos < n && ++labels[pos] == k) labels[pos++] = 0;
    if (pos == n) return;
  }
}

}  // namespace

TEST_CASE("K prior") {
  CHECK(DmaPrior(1, 10).log_prior_k(1) == Approx(-10));
  CHECK(DmaPrior(1, 1).log_prior_k(2) == Approx(-1));
  CHECK(DmaPrior(1, 2).log_prior_k(3) == Approx(std::log(2.0) - 2));
  CHECK_THROWS_AS(DmaPrior(1, 1).log_prior_k(0), std::domain_error);
  for (double delta : {0.1, 1.0, 7.5, 20.0}) {
    double sum = 0;
    for (std::size_t k = 1; k <= 200; ++k) sum += std::exp(DmaPrior(1, delta).log_prior_k(k));
    CHECK(sum == Approx(1).epsilon(1e-12));
  }
}

TEST_CASE("Z prior") {
  CHECK(DmaPrior(0.3, 1).log_prior_z(BlockAssignment({0}, 1)) == Approx(0).epsilon(1e-14));
  CHECK(DmaPrior(1, 1).log_prior_z(BlockAssignment({0, 0}, 2)) == Approx(std::log(1.0 / 3)));
  CHECK(DmaPrior(1, 1).log_joint_prior(BlockAssignment({0, 1}, 2)) ==
        Approx(-1 + std::log(1.0 / 6)));
  CHECK(DmaPrior(1, 10).log_joint_prior(BlockAssignment({0}, 1)) == Approx(-10));
}

TEST_CASE("Z prior sums to one over all label vectors") {
  for (double gamma : {0.2, 1.0, 3.5})
    for (std::size_t n = 1; n <= 6; ++n)
      for (std::size_t k = 1; k <= 4; ++k) {
        double sum = 0;
        each_labelling(n, k, [&](const BlockAssignment& z) {
          sum += std::exp(DmaPrior(gamma, 1).log_prior_z(z));
        });
        CHECK(sum == Approx(1).epsilon(1e-10));
      }
  double sum = 0;
  each_labelling(8, 3, [&](const BlockAssignment& z) {
    sum += std::exp(DmaPrior(0.7, 1).log_prior_z(z));
  });
  CHECK(sum == Approx(1).epsilon(1e-10));
}

TEST_CASE("conditional examples") {
  const DmaPrior prior(1, 1);
  const BlockAssignment split({0, 0, 1}, 2);
  CHECK(std::exp(prior.conditional_log_prob(split, 0, 0)) == Approx(0.5));
  CHECK(std::exp(prior.conditional_log_prob(split, 0, 1)) == Approx(0.5));
  const BlockAssignment both({1, 0, 0}, 2);
  CHECK(std::exp(prior.conditional_log_prob(both, 0, 0)) == Approx(0.75));
  CHECK(std::exp(prior.conditional_log_prob(both, 0, 1)) == Approx(0.25));
}

TEST_CASE("conditional equals the direct ratio of Z priors") {
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rep % 6, k = 1 + rep % 4;
    const DmaPrior prior(0.2 + 0.1 * (rep % 17), 1);
    std::uniform_int_distribution<std::size_t> lab(0, k - 1);
    std::vector<std::size_t> labels(n);
    for (auto& l : labels) l = lab(rng);
    const std::size_t i = rep % n;
    double total = 0;
    std::vector<double> joint(k);
    for (std::size_t c = 0; c < k; ++c) {
      auto moved = labels;
      moved[i] = c;
      joint[c] = prior.log_prior_z(BlockAssignment(moved, k));
      total += std::exp(joint[c]);
    }
    for (std::size_t c = 0; c < k; ++c)
      CHECK(prior.conditional_log_prob(BlockAssignment(labels, k), i, c) ==
            Approx(joint[c] - std::log(total)).epsilon(1e-10));
  }
}

TEST_CASE("prior draws follow the K prior") {
  Rng rng(4);
  const DmaPrior prior(1, 2);
  const int n = 50000;
  double mean_k = 0;
  for (int i = 0; i < n; ++i) {
    const BlockAssignment z = prior.sample(5, rng);
    REQUIRE(z.size() == 5);
    mean_k += z.k();
  }
  // K - 1 ~ Poisson(2): mean 3, sd sqrt(2)
  CHECK(std::abs(mean_k / n - 3.0) < 5 * std::sqrt(2.0 / n));
}
