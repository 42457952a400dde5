#include "gsbm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gsbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double uniform_open(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = 0.0;
  while (x == 0.0) x = u(rng);
  return x;
}

bool accept(double log_ratio, Rng& rng) {
  if (log_ratio >= 0.0) return true;
  return std::log(uniform_open(rng)) < log_ratio;
}

double capped(double log_ratio) { return std::min(0.0, log_ratio); }

double log_normal_pdf(double x, double sd) {
  const double z = x / sd;
  return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sd) - 0.5 * z * z;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Shared core of allocate_sequential / score_sequential. When `fixed` is
// non-null the sides are read from it instead of drawn.
Allocation sequential_core(const Network& net, const EdgeModel& model,
                           std::span<const std::size_t> order,
                           std::span<const double> theta_k,
                           std::span<const double> theta_l,
                           std::span<const double> theta0, Rng* rng,
                           const std::vector<char>* fixed) {
  Allocation out;
  out.to_k.resize(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t i = order[pos];
    double lk = 0.0, ll = 0.0;
    if (net.self_loops()) {
      lk += model.log_density(net.weight(i, i), theta_k);
      ll += model.log_density(net.weight(i, i), theta_l);
    }
    for (std::size_t prev = 0; prev < pos; ++prev) {
      const std::size_t j = order[prev];
      const bool j_k = out.to_k[prev] != 0;
      // i in k: edge under theta_k if j in k, theta0 otherwise; mirror for l.
      auto add = [&](double w) {
        lk += model.log_density(w, j_k ? theta_k : theta0);
        ll += model.log_density(w, j_k ? theta0 : theta_l);
      };
      add(net.weight(i, j));
      if (net.directed()) add(net.weight(j, i));
    }
    const double m = std::max(lk, ll);
    double log_pk, log_pl;
    if (m == kNegInf) {
      log_pk = log_pl = std::log(0.5);
    } else {
      const double lse = m + std::log(std::exp(lk - m) + std::exp(ll - m));
      log_pk = lk - lse;
      log_pl = ll - lse;
    }
    bool to_k;
    if (fixed) {
      to_k = (*fixed)[pos] != 0;
    } else {
      to_k = std::log(uniform_open(*rng)) < log_pk;
    }
    out.to_k[pos] = to_k ? 1 : 0;
    out.log_q += to_k ? log_pk : log_pl;
  }
  return out;
}

}  // namespace

void SamplerConfig::validate() const {
  if (!(sigma_u > 0.0) || !std::isfinite(sigma_u))
    throw std::invalid_argument("sigma_u must be positive");
  if (!(rw_sd > 0.0) || !std::isfinite(rw_sd))
    throw std::invalid_argument("rw_sd must be positive");
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("nu must be positive");
  if (iterations == 0) throw std::invalid_argument("iterations must be positive");
  if (burn_in >= iterations)
    throw std::invalid_argument("burn_in must be smaller than iterations");
}

std::string_view to_string(InitMode mode) {
  switch (mode) {
    case InitMode::prior: return "prior";
    case InitMode::one_block: return "one-block";
    case InitMode::singletons: return "singletons";
  }
  return "prior";
}

InitMode init_mode_from_string(std::string_view s) {
  if (s == "prior") return InitMode::prior;
  if (s == "one-block") return InitMode::one_block;
  if (s == "singletons") return InitMode::singletons;
  throw std::invalid_argument("unknown init mode '" + std::string(s) + "'");
}

namespace acceptance {

double log_split_choice(std::size_t k) { return k == 1 ? std::log(0.5) : 0.0; }

double log_pair_choice(std::size_t k) {
  return std::log(2.0 / static_cast<double>(k + 1));
}

double log_split_relabel(std::size_t k) {
  return std::log(static_cast<double>(k + 1) / 2.0);
}

double log_add_proposal(std::size_t n_empty, double nu) {
  const double n = static_cast<double>(n_empty);
  return std::log((nu + n) / (nu * (nu + n + 1.0)));
}

double log_delete_proposal(std::size_t n_empty, double nu) {
  if (n_empty == 0) throw std::logic_error("delete proposed with no empty block");
  const double n = static_cast<double>(n_empty);
  return std::log(nu * (nu + n) / (nu + n - 1.0));
}

double log_add_relabel(std::size_t k) { return std::log(static_cast<double>(k + 1)); }

}  // namespace acceptance

// Parameter matching -------------------------------------------------------

ParamVec merge_params(std::span<const double> theta_k,
                      std::span<const double> theta_l, double lambda,
                      const MatchingFunction& mf) {
  const ParamVec yk = mf.match(theta_k);
  const ParamVec yl = mf.match(theta_l);
  ParamVec y(mf.dim());
  for (std::size_t c = 0; c < y.size(); ++c)
    y[c] = lambda * yk[c] + (1.0 - lambda) * yl[c];
  return mf.unmatch(y);
}

std::pair<ParamVec, ParamVec> split_params(std::span<const double> merged,
                                           double lambda,
                                           std::span<const double> u,
                                           const MatchingFunction& mf) {
  if (u.size() != mf.dim()) throw std::invalid_argument("split: u has wrong dimension");
  const ParamVec y = mf.match(merged);
  ParamVec yk(y.size()), yl(y.size());
  for (std::size_t c = 0; c < y.size(); ++c) {
    yk[c] = (y[c] + u[c]) / (2.0 * lambda);
    yl[c] = (y[c] - u[c]) / (2.0 * (1.0 - lambda));
  }
  return {mf.unmatch(yk), mf.unmatch(yl)};
}

ParamVec implied_u(std::span<const double> theta_k, std::span<const double> theta_l,
                   double lambda, const MatchingFunction& mf) {
  const ParamVec yk = mf.match(theta_k);
  const ParamVec yl = mf.match(theta_l);
  ParamVec u(yk.size());
  for (std::size_t c = 0; c < u.size(); ++c)
    u[c] = lambda * yk[c] - (1.0 - lambda) * yl[c];
  return u;
}

double log_jacobian_split(std::span<const double> theta_k,
                          std::span<const double> theta_l,
                          std::span<const double> merged, double lambda,
                          const MatchingFunction& mf) {
  const double p = static_cast<double>(mf.dim());
  return mf.log_derivative(merged) - mf.log_derivative(theta_k) -
         mf.log_derivative(theta_l) - p * std::log(2.0 * lambda * (1.0 - lambda));
}

double rw_log_target(const EdgeModel& model, std::span<const double> theta,
                     double loglik) {
  return loglik + model.prior_log_density(theta) -
         model.matching().log_derivative(theta);
}

// Sequential allocation ----------------------------------------------------

Allocation allocate_sequential(const Network& net, const EdgeModel& model,
                               std::span<const std::size_t> order,
                               std::span<const double> theta_k,
                               std::span<const double> theta_l,
                               std::span<const double> theta0, Rng& rng) {
  return sequential_core(net, model, order, theta_k, theta_l, theta0, &rng, nullptr);
}

double score_sequential(const Network& net, const EdgeModel& model,
                        std::span<const std::size_t> order,
                        const std::vector<char>& to_k,
                        std::span<const double> theta_k,
                        std::span<const double> theta_l,
                        std::span<const double> theta0) {
  if (to_k.size() != order.size())
    throw std::invalid_argument("score_sequential: side flags do not match order");
  return sequential_core(net, model, order, theta_k, theta_l, theta0, nullptr, &to_k)
      .log_q;
}

// Sampler ------------------------------------------------------------------

Sampler::Sampler(const Network& net, const EdgeModel& model, const DmaPrior& prior,
                 SamplerConfig config)
    : net_(net), model_(model), prior_(prior), config_(config) {
  config_.validate();
}

SamplerState Sampler::initial_state(InitMode mode, Rng& rng) const {
  SamplerState s;
  switch (mode) {
    case InitMode::prior: s.assignment = prior_.sample(net_.size(), rng); break;
    case InitMode::one_block: s.assignment = BlockAssignment::one_block(net_.size()); break;
    case InitMode::singletons: s.assignment = BlockAssignment::singletons(net_.size()); break;
  }
  s.params.theta0 = model_.prior_sample(rng);
  s.params.theta.resize(s.assignment.k());
  for (auto& t : s.params.theta) t = model_.prior_sample(rng);
  return s;
}

double Sampler::log_posterior(const SamplerState& s) const {
  double lp = log_likelihood(net_, s.assignment, s.params, model_) +
              prior_.log_joint_prior(s.assignment) +
              model_.prior_log_density(s.params.theta0);
  for (const auto& t : s.params.theta) lp += model_.prior_log_density(t);
  return lp;
}

double Sampler::touching(const SamplerState& s, const std::vector<char>& mask) const {
  return touching_log_likelihood(net_, s.assignment, s.params, model_, mask);
}

void Sampler::update_params(SamplerState& s, Rng& rng,
                            std::vector<MoveOutcome>* log) const {
  const MatchingFunction& mf = model_.matching();
  std::normal_distribution<double> step(0.0, config_.rw_sd);
  std::vector<std::vector<std::size_t>> members(s.k());
  for (std::size_t i = 0; i < s.assignment.size(); ++i)
    members[s.assignment.label(i)].push_back(i);

  auto update = [&](ParamVec& theta, auto&& loglik) {
    MoveOutcome out{MoveKind::rw, false, kNegInf};
    if (mf.interior(theta)) {
      ParamVec y = mf.match(theta);
      for (auto& v : y) v += step(rng);
      ParamVec prop = mf.unmatch(y);
      if (mf.interior(prop) && model_.in_space(prop)) {
        const double lr = rw_log_target(model_, prop, loglik(prop)) -
                          rw_log_target(model_, theta, loglik(theta));
        out.log_accept_prob = capped(lr);
        if (accept(lr, rng)) {
          theta = std::move(prop);
          out.accepted = true;
        }
      }
    }
    if (log) log->push_back(out);
  };

  update(s.params.theta0, [&](std::span<const double> t) {
    return between_block_log_likelihood(net_, s.assignment, t, model_);
  });
  for (std::size_t k = 0; k < s.k(); ++k) {
    update(s.params.theta[k], [&](std::span<const double> t) {
      return within_block_log_likelihood(net_, members[k], t, model_);
    });
  }
}

Proposal Sampler::evaluate_split(const SamplerState& s, const SplitDraw& d,
                                 Rng& rng) const {
  const MatchingFunction& mf = model_.matching();
  const std::size_t k = s.k();
  Proposal out{s, kNegInf};
  const ParamVec& merged = s.params.theta.at(d.block);
  if (!mf.interior(merged)) return out;
  auto [theta_k, theta_l] = split_params(merged, d.lambda, d.u, mf);
  if (!mf.interior(theta_k) || !mf.interior(theta_l)) return out;

  const Allocation alloc = allocate_sequential(net_, model_, d.order, theta_k,
                                               theta_l, s.params.theta0, rng);

  SamplerState next = s;
  const std::size_t new_block = next.assignment.add_block();
  next.params.theta[d.block] = theta_k;
  next.params.theta.push_back(theta_l);
  std::vector<char> mask(net_.size(), 0);
  for (std::size_t pos = 0; pos < d.order.size(); ++pos) {
    mask[d.order[pos]] = 1;
    if (!alloc.to_k[pos]) next.assignment.assign(d.order[pos], new_block);
  }

  const double d_post = touching(next, mask) - touching(s, mask) +
                        prior_.log_joint_prior(next.assignment) -
                        prior_.log_joint_prior(s.assignment) +
                        model_.prior_log_density(theta_k) +
                        model_.prior_log_density(theta_l) -
                        model_.prior_log_density(merged);
  // lambda ~ Unif(0, 1) in both directions: its unit density cancels.
  const double d_move = acceptance::log_split_choice(k) + acceptance::log_pair_choice(k) +
                        acceptance::log_split_relabel(k);
  double log_aux = 0.0;
  for (double uc : d.u) log_aux += log_normal_pdf(uc, config_.sigma_u);

  out.log_ratio = d_post + d_move - log_aux - alloc.log_q +
                  log_jacobian_split(theta_k, theta_l, merged, d.lambda, mf);
  if (std::isnan(out.log_ratio)) out.log_ratio = kNegInf;
  out.state = std::move(next);
  return out;
}

Proposal Sampler::evaluate_merge(const SamplerState& s, const MergeDraw& d) const {
  const MatchingFunction& mf = model_.matching();
  const std::size_t k = s.k();
  if (k < 2 || d.block_a == d.block_b || d.block_a >= k || d.block_b >= k)
    throw std::invalid_argument("merge needs two distinct existing blocks");
  Proposal out{s, kNegInf};
  const ParamVec& ta = s.params.theta[d.block_a];
  const ParamVec& tb = s.params.theta[d.block_b];
  if (!mf.interior(ta) || !mf.interior(tb)) return out;
  ParamVec merged = merge_params(ta, tb, d.lambda, mf);
  if (!mf.interior(merged)) return out;
  const ParamVec u = implied_u(ta, tb, d.lambda, mf);

  std::vector<char> to_k(d.order.size());
  std::vector<char> mask(net_.size(), 0);
  for (std::size_t pos = 0; pos < d.order.size(); ++pos) {
    to_k[pos] = s.assignment.label(d.order[pos]) == d.block_a ? 1 : 0;
    mask[d.order[pos]] = 1;
  }
  const double log_q =
      score_sequential(net_, model_, d.order, to_k, ta, tb, s.params.theta0);

  SamplerState next = s;
  for (std::size_t i : d.order)
    if (next.assignment.label(i) == d.block_b) next.assignment.assign(i, d.block_a);
  next.params.theta[d.block_a] = merged;
  next = relabel_contiguous(std::move(next), d.block_b);

  const double d_post = touching(next, mask) - touching(s, mask) +
                        prior_.log_joint_prior(next.assignment) -
                        prior_.log_joint_prior(s.assignment) +
                        model_.prior_log_density(merged) -
                        model_.prior_log_density(ta) - model_.prior_log_density(tb);
  const double d_move = -(acceptance::log_split_choice(k - 1) +
                          acceptance::log_pair_choice(k - 1) +
                          acceptance::log_split_relabel(k - 1));
  double log_aux = 0.0;
  for (double uc : u) log_aux += log_normal_pdf(uc, config_.sigma_u);

  out.log_ratio = d_post + d_move + log_aux + log_q -
                  log_jacobian_split(ta, tb, merged, d.lambda, mf);
  if (std::isnan(out.log_ratio)) out.log_ratio = kNegInf;
  out.state = std::move(next);
  return out;
}

MoveOutcome Sampler::propose_split(SamplerState& s, Rng& rng) const {
  SplitDraw d;
  d.block = std::uniform_int_distribution<std::size_t>(0, s.k() - 1)(rng);
  d.lambda = uniform_open(rng);
  std::normal_distribution<double> aux(0.0, config_.sigma_u);
  d.u.resize(model_.dim());
  for (auto& v : d.u) v = aux(rng);
  d.order = s.assignment.members(d.block);
  std::shuffle(d.order.begin(), d.order.end(), rng);

  Proposal p = evaluate_split(s, d, rng);
  MoveOutcome out{MoveKind::split, false, capped(p.log_ratio)};
  if (accept(p.log_ratio, rng)) {
    p.state.iteration = s.iteration;
    s = std::move(p.state);
    out.accepted = true;
  }
  return out;
}

MoveOutcome Sampler::propose_merge(SamplerState& s, Rng& rng) const {
  const std::size_t k = s.k();
  if (k < 2) throw std::logic_error("merge proposed with a single block");
  MergeDraw d;
  std::uniform_int_distribution<std::size_t> first(0, k - 1), second(0, k - 2);
  std::size_t a = first(rng);
  std::size_t b = second(rng);
  if (b >= a) ++b;
  d.block_a = std::min(a, b);
  d.block_b = std::max(a, b);
  d.lambda = uniform_open(rng);
  d.order = s.assignment.members(d.block_a);
  const auto mb = s.assignment.members(d.block_b);
  d.order.insert(d.order.end(), mb.begin(), mb.end());
  std::shuffle(d.order.begin(), d.order.end(), rng);

  Proposal p = evaluate_merge(s, d);
  MoveOutcome out{MoveKind::merge, false, capped(p.log_ratio)};
  if (accept(p.log_ratio, rng)) {
    p.state.iteration = s.iteration;
    s = std::move(p.state);
    out.accepted = true;
  }
  return out;
}

MoveOutcome Sampler::split_or_merge(SamplerState& s, Rng& rng) const {
  if (s.k() == 1 || std::bernoulli_distribution(0.5)(rng)) return propose_split(s, rng);
  return propose_merge(s, rng);
}

double Sampler::log_add_ratio(const BlockAssignment& z) const {
  const double nu = config_.nu;
  std::vector<std::size_t> sizes = z.sizes();
  const double before = prior_.log_joint_prior(sizes);
  sizes.push_back(0);
  const double after = prior_.log_joint_prior(sizes);
  return after - before + acceptance::log_add_proposal(z.empty_count(), nu) +
         acceptance::log_add_relabel(z.k());
}

double Sampler::log_delete_ratio(const BlockAssignment& z, std::size_t empty_block) const {
  if (z.block_size(empty_block) != 0)
    throw std::logic_error("delete proposed for a non-empty block");
  const double nu = config_.nu;
  std::vector<std::size_t> sizes = z.sizes();
  const double before = prior_.log_joint_prior(sizes);
  sizes.erase(sizes.begin() + static_cast<std::ptrdiff_t>(empty_block));
  const double after = prior_.log_joint_prior(sizes);
  return after - before + acceptance::log_delete_proposal(z.empty_count(), nu) -
         acceptance::log_add_relabel(z.k() - 1);
}

MoveOutcome Sampler::empty_block_move(SamplerState& s, Rng& rng) const {
  const std::size_t n_empty = s.assignment.empty_count();
  const double nu = config_.nu;
  const bool add =
      n_empty == 0 ||
      uniform_open(rng) < nu / (static_cast<double>(n_empty) + nu);
  if (add) {
    const double lr = log_add_ratio(s.assignment);
    // theta* ~ G0 is drawn regardless so the RNG stream does not depend on
    // the accept decision; its prior density cancels from the ratio.
    ParamVec fresh = model_.prior_sample(rng);
    MoveOutcome out{MoveKind::add_empty, false, capped(lr)};
    if (accept(lr, rng)) {
      s.assignment.add_block();
      s.params.theta.push_back(std::move(fresh));
      out.accepted = true;
    }
    return out;
  }
  std::vector<std::size_t> empties;
  for (std::size_t b = 0; b < s.k(); ++b)
    if (s.assignment.block_size(b) == 0) empties.push_back(b);
  const std::size_t victim =
      empties[std::uniform_int_distribution<std::size_t>(0, empties.size() - 1)(rng)];
  const double lr = log_delete_ratio(s.assignment, victim);
  MoveOutcome out{MoveKind::delete_empty, false, capped(lr)};
  if (accept(lr, rng)) {
    s = relabel_contiguous(std::move(s), victim);
    out.accepted = true;
  }
  return out;
}

std::vector<double> Sampler::gibbs_log_probs(const SamplerState& s,
                                             std::size_t i) const {
  const std::size_t k = s.k();
  const std::size_t n = net_.size();
  const auto& z = s.assignment;
  std::span<const double> t0 = s.params.theta0;
  std::vector<double> lw(k, 0.0);
  // Edges to nodes outside the candidate block are under theta0 for every
  // candidate; only the difference to theta0 within each block matters.
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const std::size_t c = z.label(j);
    std::span<const double> tc = s.params.theta[c];
    double w = net_.weight(i, j);
    lw[c] += model_.log_density(w, tc) - model_.log_density(w, t0);
    if (net_.directed()) {
      w = net_.weight(j, i);
      lw[c] += model_.log_density(w, tc) - model_.log_density(w, t0);
    }
  }
  if (net_.self_loops())
    for (std::size_t b = 0; b < k; ++b)
      lw[b] += model_.log_density(net_.weight(i, i), s.params.theta[b]);
  for (std::size_t b = 0; b < k; ++b) lw[b] += prior_.conditional_log_prob(z, i, b);

  const double m = *std::max_element(lw.begin(), lw.end());
  if (m == kNegInf) throw std::runtime_error("node has zero probability under every block");
  double sum = 0.0;
  for (double v : lw) sum += std::exp(v - m);
  const double lse = m + std::log(sum);
  for (auto& v : lw) v -= lse;
  return lw;
}

void Sampler::gibbs_sweep(SamplerState& s, Rng& rng) const {
  for (std::size_t i = 0; i < net_.size(); ++i) {
    const std::vector<double> lp = gibbs_log_probs(s, i);
    double u = uniform_open(rng);
    std::size_t chosen = lp.size() - 1;
    for (std::size_t b = 0; b < lp.size(); ++b) {
      u -= std::exp(lp[b]);
      if (u <= 0.0) {
        chosen = b;
        break;
      }
    }
    if (chosen != s.assignment.label(i)) s.assignment.assign(i, chosen);
  }
}

void Sampler::step(SamplerState& s, Rng& rng, std::vector<MoveOutcome>* log) const {
  update_params(s, rng, log);
  MoveOutcome sm = split_or_merge(s, rng);
  MoveOutcome eb = empty_block_move(s, rng);
  gibbs_sweep(s, rng);
  if (log) {
    log->push_back(sm);
    log->push_back(eb);
    log->push_back({MoveKind::gibbs, true, 0.0});
  }
  ++s.iteration;
}

TraceStore run_chain(const Network& net, const EdgeModel& model,
                     const DmaPrior& prior, const SamplerConfig& config,
                     InitMode init) {
  Sampler sampler(net, model, prior, config);
  Rng rng(config.seed);
  SamplerState state = sampler.initial_state(init, rng);
  TraceStore trace;
  trace.n_nodes = net.size();
  trace.dim = model.dim();
  trace.k.reserve(config.iterations);
  trace.z.reserve(config.iterations);
  trace.theta.reserve(config.iterations);
  std::vector<MoveOutcome> log;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    log.clear();
    sampler.step(state, rng, &log);
    trace.record(state);
    for (const auto& m : log) trace.moves.push_back({it + 1, m});
  }
  return trace;
}

std::uint64_t chain_seed(std::uint64_t base_seed, std::size_t chain) {
  if (chain == 0) return base_seed;
  return splitmix64(base_seed + 0x632BE59BD9B4E019ULL * chain);
}

std::vector<TraceStore> run_chains(const Network& net, const EdgeModel& model,
                                   const DmaPrior& prior, const SamplerConfig& config,
                                   std::size_t n_chains,
                                   const std::vector<InitMode>& inits) {
  if (n_chains == 0) throw std::invalid_argument("need at least one chain");
  if (inits.empty()) throw std::invalid_argument("need at least one init mode");
  std::vector<std::future<TraceStore>> jobs;
  jobs.reserve(n_chains);
  for (std::size_t c = 0; c < n_chains; ++c) {
    SamplerConfig cfg = config;
    cfg.seed = chain_seed(config.seed, c);
    const InitMode init = inits[c % inits.size()];
    jobs.push_back(std::async(std::launch::async, [&net, &model, &prior, cfg, init] {
      return run_chain(net, model, prior, cfg, init);
    }));
  }
  std::vector<TraceStore> out;
  out.reserve(n_chains);
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace gsbm
