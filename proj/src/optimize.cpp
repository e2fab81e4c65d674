#include "qtcap/optimize.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <thread>

#include "qtcap/designs.hpp"

namespace qtcap {

int worker_count() {
  if (const char* env = std::getenv("QCAP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024)
      return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

using ParamBuilder = std::function<TransducerParams(const std::vector<double>&)>;

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  const size_t workers =
      std::min<size_t>(static_cast<size_t>(worker_count()), std::max<size_t>(n, 1));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

struct Grid {
  std::vector<double> lo, hi;
  std::vector<int> n;

  size_t total() const {
    size_t t = 1;
    for (int k : n) t *= static_cast<size_t>(k);
    return t;
  }
  // row-major with the first axis most significant, so index order is
  // lexicographic point order
  std::vector<double> point(size_t idx) const {
    std::vector<double> x(n.size());
    for (int a = static_cast<int>(n.size()) - 1; a >= 0; --a) {
      const int pos = static_cast<int>(idx % n[a]);
      idx /= n[a];
      x[a] = n[a] == 1 ? lo[a] : lo[a] + (hi[a] - lo[a]) * pos / (n[a] - 1);
    }
    return x;
  }
  double max_spacing() const {
    double s = 0.0;
    for (size_t a = 0; a < n.size(); ++a)
      if (n[a] > 1) s = std::max(s, (hi[a] - lo[a]) / (n[a] - 1));
    return s;
  }
};

Grid grid_from(const SearchSpace& space) {
  if (space.axes.empty()) throw std::invalid_argument("search space has no axes");
  Grid g;
  size_t total = 1;
  for (const SearchAxis& ax : space.axes) {
    if (!(ax.lo <= ax.hi) || !std::isfinite(ax.lo) || !std::isfinite(ax.hi))
      throw std::invalid_argument("axis '" + ax.name + "' has an invalid range");
    if (ax.n_points < 1 || ax.n_points > 100000)
      throw std::invalid_argument("axis '" + ax.name + "' has an invalid point count");
    g.lo.push_back(ax.lo);
    g.hi.push_back(ax.hi);
    g.n.push_back(ax.n_points);
    total *= static_cast<size_t>(ax.n_points);
    if (total > 4000000)
      throw std::invalid_argument("search grid exceeds 4e6 points");
  }
  return g;
}

void require_axes(const SearchSpace& space, const std::vector<std::string>& names) {
  if (space.axes.size() != names.size())
    throw std::invalid_argument("search space needs exactly " +
                                std::to_string(names.size()) + " axes");
  for (size_t i = 0; i < names.size(); ++i)
    if (space.axes[i].name != names[i])
      throw std::invalid_argument("axis " + std::to_string(i + 1) +
                                  " must be named '" + names[i] + "'");
}

SearchResult grid_engine(Objective obj, const SearchSpace& space,
                         const ParamBuilder& build, const QuadratureConfig& cfg,
                         int refine_rounds) {
  if (refine_rounds < 0 || refine_rounds > 8)
    throw std::invalid_argument("refine_rounds must lie in [0,8]");
  const Protocol proto =
      obj == Objective::q1 ? Protocol::one_way : Protocol::two_way;

  QuadratureConfig sweep_cfg = cfg;
  sweep_cfg.rel_tol = std::max(cfg.rel_tol, 1e-5);
  sweep_cfg.abs_tol = std::max(cfg.abs_tol, 1e-8);

  SearchResult res;
  for (const SearchAxis& ax : space.axes) res.axis_names.push_back(ax.name);

  const Grid orig = grid_from(space);
  Grid grid = orig;
  double best = -HUGE_VAL;
  std::vector<double> best_pt;

  for (int round = 0; round <= refine_rounds; ++round) {
    const size_t total = grid.total();
    std::vector<SearchSample> samples(total);
    std::atomic<int> failures{0};
    std::exception_ptr fatal;
    std::atomic<bool> has_fatal{false};

    parallel_for(total, [&](size_t i) {
      SearchSample& s = samples[i];
      s.point = grid.point(i);
      try {
        s.value = integrate_capacity(build(s.point), proto, Bound::pure, 0.0,
                                     sweep_cfg).value;
        s.ok = true;
      } catch (const convergence_error&) {
        s.value = std::numeric_limits<double>::quiet_NaN();
        failures.fetch_add(1);
      } catch (const std::invalid_argument&) {
        s.value = std::numeric_limits<double>::quiet_NaN();
        failures.fetch_add(1);
      } catch (...) {
        if (!has_fatal.exchange(true)) fatal = std::current_exception();
      }
    });
    if (has_fatal.load()) std::rethrow_exception(fatal);

    res.failed_points += failures.load();
    for (const SearchSample& s : samples)
      if (s.ok && s.value > best) { best = s.value; best_pt = s.point; }
    res.grid_samples.insert(res.grid_samples.end(), samples.begin(), samples.end());

    if (best_pt.empty())
      throw convergence_error("every grid point failed to integrate");
    res.refinement_history.push_back({grid.max_spacing(), best});

    if (round == refine_rounds) break;
    // shrink five-fold around the incumbent, clamped into the original box
    Grid next = grid;
    for (size_t a = 0; a < grid.n.size(); ++a) {
      const double w = (orig.hi[a] - orig.lo[a]) /
                       std::pow(5.0, static_cast<double>(round + 1));
      double lo = best_pt[a] - 0.5 * w;
      lo = std::min(std::max(lo, orig.lo[a]), orig.hi[a] - w);
      next.lo[a] = lo;
      next.hi[a] = lo + w;
    }
    grid = next;
  }

  res.best_point = best_pt;
  const CapacityEstimate tight =
      integrate_capacity(build(best_pt), proto, Bound::pure, 0.0, cfg);
  res.best_value = tight.value;
  res.best_abs_error = tight.abs_error;
  if (!res.refinement_history.empty())
    res.refinement_history.back().best_value = res.best_value;
  return res;
}

}  // namespace

SearchResult grid_search_0stage(Objective obj, const SearchSpace& space,
                                const QuadratureConfig& cfg, int refine_rounds) {
  require_axes(space, {"kappa_a", "kappa_b", "delta"});
  auto build = [](const std::vector<double>& v) {
    TransducerParams p;
    p.n_stages = 0;
    p.kappa_a = v[0];
    p.kappa_b = v[1];
    p.detunings = {v[2], 0.0};
    p.couplings = {1.0};
    return p;
  };
  return grid_engine(obj, space, build, cfg, refine_rounds);
}

SearchResult grid_search_1stage(Objective obj, const SearchSpace& space,
                                const QuadratureConfig& cfg, int refine_rounds) {
  require_axes(space, {"kappa_a", "kappa_b", "g_b"});
  auto build = [](const std::vector<double>& v) {
    TransducerParams p;
    p.n_stages = 1;
    p.kappa_a = v[0];
    p.kappa_b = v[1];
    p.detunings = {0.0, 0.0, 0.0};
    p.couplings = {1.0, v[2]};
    return p;
  };
  return grid_engine(obj, space, build, cfg, refine_rounds);
}

SearchResult symmetric_resonant_search(int n_stages, Objective obj,
                                       const SearchSpace& space,
                                       const QuadratureConfig& cfg,
                                       int refine_rounds) {
  if (n_stages < 0) throw std::invalid_argument("stage count must be >= 0");
  const int half = (n_stages + 2) / 2;  // ceil((N+1)/2)
  std::vector<std::string> names{"kappa"};
  for (int j = 1; j <= half; ++j) names.push_back("g_" + std::to_string(j));
  require_axes(space, names);

  auto build = [n_stages](const std::vector<double>& v) {
    TransducerParams p;
    p.n_stages = n_stages;
    p.kappa_a = p.kappa_b = v[0];
    p.detunings.assign(n_stages + 2, 0.0);
    p.couplings.resize(n_stages + 1);
    for (int j = 1; j <= n_stages + 1; ++j)
      p.couplings[j - 1] = v[std::min(j, n_stages + 2 - j)];
    return p;
  };
  return grid_engine(obj, space, build, cfg, refine_rounds);
}

std::vector<FamilyComparison> uniform_capacity_sweep(int n_max, Objective obj,
                                                     const QuadratureConfig& cfg) {
  if (n_max < 0 || n_max > 20)
    throw std::invalid_argument("n_max must lie in [0,20]");
  const Protocol proto =
      obj == Objective::q1 ? Protocol::one_way : Protocol::two_way;
  std::vector<FamilyComparison> rows(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    rows[n].n_stages = n;
    rows[n].q_flat = integrate_capacity(maximally_flat_params(n, 1.0, 0.0).params,
                                        proto, Bound::pure, 0.0, cfg).value;
    rows[n].q_uniform = integrate_capacity(uniform_params(n, 1.0, 0.0), proto,
                                           Bound::pure, 0.0, cfg).value;
  }
  return rows;
}

}  // namespace qtcap
