#include "gsbm/generate.hpp"

namespace gsbm {

GeneratedNetwork generate(const GenerateSpec& spec) {
  const auto model = make_edge_model(spec.model, spec.hyper);
  if (spec.theta.size() != spec.sizes.size() + 1)
    throw ConfigError("theta needs one row for theta0 plus one per block");
  for (std::size_t r = 0; r < spec.theta.size(); ++r)
    if (spec.theta[r].size() != model->dim() || !model->in_space(spec.theta[r]))
      throw ConfigError("theta row " + std::to_string(r) + " is outside the " +
                        std::string(model->name()) + " parameter space");

  std::vector<std::size_t> labels;
  for (std::size_t k = 0; k < spec.sizes.size(); ++k)
    labels.insert(labels.end(), spec.sizes[k], k);
  const std::size_t n = labels.size();
  if (n == 0) throw ConfigError("the network needs at least one node");

  const BlockAssignment z(labels, spec.sizes.size());
  BlockParams params{spec.theta[0], {spec.theta.begin() + 1, spec.theta.end()}};

  Rng rng(spec.seed);
  Network net = Network::zeros(n, spec.directed, spec.self_loops);
  for_each_edge(net, [&](std::size_t i, std::size_t j, double) {
    net.set_weight(i, j, model->sample(theta_for_edge(z, params, i, j), rng));
  });
  return {std::move(net), std::move(labels)};
}

}  // namespace gsbm
