#include <cmath>

#include "doctest.h"
#include "gsbm/exact_oracle.hpp"
#include "support.hpp"

using namespace gsbm;
using doctest::Approx;

TEST_CASE("single node") {
  const auto post = enumerate_posterior(Network::zeros(1, false, false), {}, DmaPrior(1, 1));
  REQUIRE(post.entries.size() == 1);
  CHECK(post.entries[0].probability == Approx(1));
}

TEST_CASE("one edge: posterior equals the normalised prior") {
  // Every partition has edge marginal 1/2 (Beta-Bernoulli) or 1/2 (Poisson-Gamma
  // with a single observation), so the data cancel.
  const DmaPrior prior(0.7, 1.5);
  double together = 0, apart = 0, k1 = 0, k2 = 0;
  for (std::size_t k = 1; k <= 2; ++k)
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        const double m = std::exp(prior.log_joint_prior(BlockAssignment({a, b}, k)));
        (a == b ? together : apart) += m;
        (k == 1 ? k1 : k2) += m;
      }
  const double total = together + apart;
  Network w3 = Network::zeros(2, false, false);
  w3.set_weight(0, 1, 3);
  for (const auto& [net, model] :
       {std::pair{testing::from_edges(2, {{0, 1}}), ConjugateModel{}},
        std::pair{w3, ConjugateModel{ConjugateFamily::poisson_gamma, 2, 0.5}}}) {
    const auto post = enumerate_posterior(net, model, prior);
    const auto km = post.k_marginal();
    CHECK(km[0] == Approx(k1 / total).epsilon(1e-12));
    CHECK(km[1] == Approx(k2 / total).epsilon(1e-12));
    CHECK(exact_pair_matrix(post)(0, 1) == Approx(together / total).epsilon(1e-12));
  }
}

TEST_CASE("three nodes, all edges present") {
  // Beta(1,1): a group of m edges, all ones, has marginal 1/(m+1).
  const DmaPrior prior(1, 0.2);
  const Network net = testing::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
  const std::pair<std::size_t, std::size_t> edges[] = {{0, 1}, {0, 2}, {1, 2}};
  std::vector<double> mass(3, 0);
  for (std::size_t k = 1; k <= 3; ++k)
    for (std::size_t code = 0; code < k * k * k; ++code) {
      const std::vector<std::size_t> z{code % k, (code / k) % k, code / (k * k)};
      std::vector<int> within(k, 0);
      int between = 0;
      for (auto [i, j] : edges) (z[i] == z[j] ? within[z[i]] : between) += 1;
      double lik = 1.0 / (between + 1);
      for (int m : within) lik /= (m + 1);
      mass[k - 1] += lik * std::exp(prior.log_joint_prior(BlockAssignment(z, k)));
    }
  const double total = mass[0] + mass[1] + mass[2];
  const auto km = enumerate_posterior(net, {}, prior).k_marginal();
  for (int k = 0; k < 3; ++k) CHECK(km[k] == Approx(mass[k] / total).epsilon(1e-12));
}

TEST_CASE("probabilities sum to one over the canonical partitions") {
  const Network net = testing::from_edges(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {4, 5}, {2, 3}});
  const auto post = enumerate_posterior(net, {}, DmaPrior(1, 1));
  double sum = 0;
  std::size_t k6_partitions = 0;
  for (const auto& e : post.entries) {
    sum += e.probability;
    CHECK(e.partition[0] == 0);
  }
  for (const auto& e : post.entries) k6_partitions += e.k == 6;
  CHECK(sum == Approx(1).epsilon(1e-12));
  CHECK(k6_partitions == 203);  // Bell(6)
  const PairMatrix p = exact_pair_matrix(post);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(p(i, i) == Approx(1));
    for (std::size_t j = 0; j < 6; ++j) CHECK(p(i, j) == p(j, i));
  }
  CHECK(p(0, 1) > p(0, 5));
}

TEST_CASE("pair matrix from hand-made posteriors") {
  ExactPosterior one{3, 3, {{2, {0, 0, 1}, 1.0}}};
  const PairMatrix p = exact_pair_matrix(one);
  CHECK(p(0, 1) == 1.0);
  CHECK(p(0, 2) == 0.0);
  CHECK(p(2, 2) == 1.0);
  ExactPosterior two{2, 2, {{1, {0, 0}, 0.5}, {2, {0, 1}, 0.5}}};
  CHECK(exact_pair_matrix(two)(0, 1) == Approx(0.5));
}

TEST_CASE("oracle limits") {
  CHECK_THROWS_AS(enumerate_posterior(Network::zeros(9, false, false), {}, DmaPrior(1, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(enumerate_posterior(Network::zeros(3, false, false), {}, DmaPrior(1, 1), 4),
                  std::invalid_argument);
  Network bad = Network::zeros(2, false, false);
  bad.set_weight(0, 1, 2);
  CHECK_THROWS(enumerate_posterior(bad, {}, DmaPrior(1, 1)));
}
