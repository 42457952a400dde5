#include "gsbm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

namespace gsbm {

namespace {

std::size_t first_retained(const TraceStore& trace, std::size_t burn_in) {
  if (burn_in >= trace.iterations())
    throw std::invalid_argument("no samples remain after burn-in");
  return burn_in;
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Sample variance, n - 1 denominator.
double var_of(std::span<const double> x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double cov_of(std::span<const double> x, std::span<const double> y) {
  const double mx = mean_of(x), my = mean_of(y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / static_cast<double>(x.size() - 1);
}

}  // namespace

PairMatrix posterior_pairs(const TraceStore& trace, std::size_t burn_in) {
  return posterior_pairs(retained(trace, burn_in));
}

PairMatrix posterior_pairs(const MatchedTrace& trace) {
  if (trace.samples() == 0)
    throw std::invalid_argument("no samples remain after burn-in");
  const std::size_t n = trace.n_nodes;
  PairMatrix p(n);
  std::vector<std::size_t> counts(n * n, 0);
  for (const auto& z : trace.z)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (z[i] == z[j]) ++counts[i * n + j];
  const double s = static_cast<double>(trace.samples());
  for (std::size_t i = 0; i < n; ++i) {
    p(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      p(i, j) = p(j, i) = static_cast<double>(counts[i * n + j]) / s;
    }
  }
  return p;
}

std::vector<std::size_t> modal_assignment(const TraceStore& trace,
                                          std::size_t burn_in) {
  const std::size_t s0 = first_retained(trace, burn_in);
  const std::size_t k_max = *std::max_element(trace.k.begin() + s0, trace.k.end());
  std::vector<std::size_t> mode(trace.n_nodes);
  std::vector<std::size_t> counts(k_max);
  for (std::size_t i = 0; i < trace.n_nodes; ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t s = s0; s < trace.iterations(); ++s) ++counts[trace.z[s][i]];
    mode[i] = static_cast<std::size_t>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
  return mode;
}

std::vector<std::size_t> label_permutation(std::span<const std::size_t> modal,
                                           std::span<const std::size_t> truth,
                                           std::size_t n_labels) {
  if (modal.size() != truth.size())
    throw std::invalid_argument("truth length differs from the number of nodes");
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> table;
  for (std::size_t i = 0; i < modal.size(); ++i) ++table[{modal[i], truth[i]}];

  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> cells;
  for (const auto& [ck, count] : table) cells.emplace_back(count, ck.first, ck.second);
  std::stable_sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) > std::get<0>(b);
  });

  const std::size_t n_truth =
      truth.empty() ? 0 : *std::max_element(truth.begin(), truth.end()) + 1;
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> perm(n_labels, unset);
  std::vector<char> used(n_truth, 0);
  for (const auto& [count, c, k] : cells) {
    if (c >= n_labels || perm[c] != unset || used[k]) continue;
    perm[c] = k;
    used[k] = 1;
  }
  std::size_t fresh = n_truth;
  for (auto& p : perm)
    if (p == unset) p = fresh++;
  return perm;
}

namespace {

// perm_for(s) gives the label map of sample s.
template <class PermFor>
MatchedTrace relabel(const TraceStore& trace, std::size_t s0, PermFor perm_for) {
  MatchedTrace out;
  out.n_nodes = trace.n_nodes;
  out.dim = trace.dim;
  const std::size_t s_count = trace.iterations() - s0;
  out.z.reserve(s_count);
  out.theta0.reserve(s_count);
  out.theta.reserve(s_count);
  for (std::size_t s = s0; s < trace.iterations(); ++s) {
    const std::vector<std::size_t> perm = perm_for(s);
    const auto& z = trace.z[s];
    std::vector<std::size_t> zs(z.size());
    std::vector<char> occupied(trace.k[s], 0);
    for (std::size_t i = 0; i < z.size(); ++i) {
      zs[i] = perm[z[i]];
      occupied[z[i]] = 1;
    }
    const std::size_t width = *std::max_element(perm.begin(), perm.end()) + 1;
    out.n_labels = std::max(out.n_labels, width);
    std::vector<std::optional<ParamVec>> th(width);
    for (std::size_t c = 0; c < trace.k[s]; ++c)
      if (occupied[c]) th[perm[c]] = trace.theta[s].theta[c];
    out.z.push_back(std::move(zs));
    out.theta0.push_back(trace.theta[s].theta0);
    out.theta.push_back(std::move(th));
  }
  for (auto& row : out.theta) row.resize(out.n_labels);
  return out;
}

}  // namespace

MatchedTrace retained(const TraceStore& trace, std::size_t burn_in) {
  const std::size_t s0 = first_retained(trace, burn_in);
  return relabel(trace, s0, [&](std::size_t s) {
    std::vector<std::size_t> perm(trace.k[s]);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    return perm;
  });
}

MatchedTrace match_labels(const TraceStore& trace,
                          std::span<const std::size_t> truth,
                          std::size_t burn_in) {
  const std::size_t s0 = first_retained(trace, burn_in);
  if (truth.size() != trace.n_nodes)
    throw std::invalid_argument("truth length differs from the number of nodes");
  return relabel(trace, s0, [&](std::size_t s) {
    return label_permutation(trace.z[s], truth, trace.k[s]);
  });
}

GelmanRubin gelman_rubin(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw std::invalid_argument("Gelman-Rubin needs at least two chains");
  const std::size_t n = chains.front().size();
  for (const auto& c : chains)
    if (c.size() != n) throw std::invalid_argument("chains differ in length");
  if (n < 2) throw std::invalid_argument("chains must have at least two samples");

  std::vector<double> xbar(m), s2(m), xbar2(m);
  for (std::size_t j = 0; j < m; ++j) {
    xbar[j] = mean_of(chains[j]);
    s2[j] = var_of(chains[j]);
    xbar2[j] = xbar[j] * xbar[j];
  }
  const double dm = static_cast<double>(m), dn = static_cast<double>(n);
  const double w = mean_of(s2);
  GelmanRubin out;
  if (!(w > 0.0)) {
    out.r_hat = out.upper_ci = std::numeric_limits<double>::quiet_NaN();
    out.degenerate = true;
    return out;
  }
  const double b = dn * var_of(xbar);
  const double muhat = mean_of(xbar);
  const double var_w = var_of(s2) / dm;
  const double var_b = 2.0 * b * b / (dm - 1.0);
  const double cov_wb = (dn / dm) * (cov_of(s2, xbar2) - 2.0 * muhat * cov_of(s2, xbar));
  const double v = (dn - 1.0) * w / dn + (1.0 + 1.0 / dm) * b / dn;
  const double var_v = ((dn - 1.0) * (dn - 1.0) * var_w +
                        (1.0 + 1.0 / dm) * (1.0 + 1.0 / dm) * var_b +
                        2.0 * (dn - 1.0) * (1.0 + 1.0 / dm) * cov_wb) /
                       (dn * dn);
  const double df_v = 2.0 * v * v / var_v;
  const double df_adj = std::isfinite(df_v) ? (df_v + 3.0) / (df_v + 1.0) : 1.0;
  const double b_df = dm - 1.0;

  const double r2_fixed = (dn - 1.0) / dn;
  const double r2_random = (1.0 + 1.0 / dm) * (1.0 / dn) * (b / w);
  double q;
  if (var_w > 0.0) {
    const double w_df = 2.0 * w * w / var_w;
    q = boost::math::quantile(boost::math::fisher_f(b_df, w_df), 0.975);
  } else {
    // F(b_df, inf) is chi-squared(b_df) / b_df.
    q = boost::math::quantile(boost::math::chi_squared(b_df), 0.975) / b_df;
  }
  out.r_hat = std::sqrt(df_adj * (r2_fixed + r2_random));
  out.upper_ci = std::sqrt(df_adj * (r2_fixed + q * r2_random));
  return out;
}

Ess effective_sample_size(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 10) throw std::invalid_argument("ESS needs at least 10 samples");
  Ess out;
  const double dn = static_cast<double>(n);
  const double m = mean_of(series);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = series[i] - m;

  auto acov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += x[i] * x[i + lag];
    return s / dn;
  };
  const double c0 = acov(0);
  if (!(c0 > 0.0)) {
    out.ess = dn;
    out.degenerate = true;
    return out;
  }

  // Sum Gamma_k = rho_2k + rho_2k+1 while positive, forced non-increasing.
  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double g = (acov(2 * k) + acov(2 * k + 1)) / c0;
    if (g <= 0.0 && k > 0) break;
    g = std::min(g, prev);
    sum += g;
    prev = g;
  }
  const double tau = -1.0 + 2.0 * sum;
  if (tau < 1.0) {
    out.ess = dn;
    out.clamped = true;
  } else {
    out.ess = dn / tau;
  }
  return out;
}

double histogram_mode(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mode of an empty sample");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) return lo;
  constexpr std::size_t bins = 100;
  const double width = (hi - lo) / bins;
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++counts[std::min(b, bins - 1)];
  }
  const auto best = static_cast<std::size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  return lo + (static_cast<double>(best) + 0.5) * width;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

ParamSummary summarize(std::string name, const std::vector<double>& values,
                       std::size_t total) {
  ParamSummary row;
  row.name = std::move(name);
  row.present = values.size();
  row.mode = histogram_mode(values);
  row.q05 = quantile(values, 0.05);
  row.q95 = quantile(values, 0.95);
  if (10 * values.size() < total || values.size() < 10) {
    row.ess.available = false;
  } else {
    row.ess = effective_sample_size(values);
  }
  return row;
}

}  // namespace

std::vector<ParamSummary> summarize_params(
    const MatchedTrace& trace, const std::vector<std::string>& component_names) {
  if (component_names.size() != trace.dim)
    throw std::invalid_argument("component names do not match the parameter dimension");
  const std::size_t total = trace.samples();
  if (total == 0) throw std::invalid_argument("no samples remain after burn-in");
  std::vector<ParamSummary> rows;
  auto suffix = [&](std::size_t c) {
    return trace.dim == 1 ? std::string() : "_" + component_names[c];
  };
  for (std::size_t c = 0; c < trace.dim; ++c) {
    std::vector<double> v(total);
    for (std::size_t s = 0; s < total; ++s) v[s] = trace.theta0[s][c];
    rows.push_back(summarize("theta0" + suffix(c), v, total));
  }
  for (std::size_t k = 0; k < trace.n_labels; ++k) {
    for (std::size_t c = 0; c < trace.dim; ++c) {
      std::vector<double> v;
      for (std::size_t s = 0; s < total; ++s)
        if (trace.theta[s][k]) v.push_back((*trace.theta[s][k])[c]);
      if (v.empty()) continue;
      rows.push_back(summarize("theta" + std::to_string(k + 1) + suffix(c), v, total));
    }
  }
  return rows;
}

ThetaSummary theta_summary(const MatchedTrace& trace) {
  ThetaSummary out;
  out.mean.reserve(trace.samples());
  out.variance.reserve(trace.samples());
  std::vector<double> pool;
  for (std::size_t s = 0; s < trace.samples(); ++s) {
    pool.assign(trace.theta0[s].begin(), trace.theta0[s].end());
    for (const auto& th : trace.theta[s])
      if (th) pool.insert(pool.end(), th->begin(), th->end());
    const double m = mean_of(pool);
    double v = 0.0;
    for (double x : pool) v += (x - m) * (x - m);
    out.mean.push_back(m);
    out.variance.push_back(v / static_cast<double>(pool.size()));
  }
  return out;
}

std::vector<std::size_t> occupied_k(const TraceStore& trace, std::size_t burn_in) {
  const std::size_t s0 = first_retained(trace, burn_in);
  std::vector<std::size_t> out;
  out.reserve(trace.iterations() - s0);
  for (std::size_t s = s0; s < trace.iterations(); ++s) {
    std::vector<char> seen(trace.k[s], 0);
    for (std::size_t l : trace.z[s]) seen[l] = 1;
    out.push_back(static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1)));
  }
  return out;
}

std::size_t modal_value(std::span<const std::size_t> values) {
  if (values.empty()) throw std::invalid_argument("mode of an empty sample");
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t v : values) ++counts[v];
  std::size_t best = counts.begin()->first, best_count = 0;
  for (const auto& [v, c] : counts)
    if (c > best_count) {
      best = v;
      best_count = c;
    }
  return best;
}

}  // namespace gsbm
