#include "rcq/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rcq/cell_sampling.hpp"
#include "rcq/emd.hpp"
#include "rcq/mst.hpp"
#include "rcq/oracle.hpp"

namespace rcq {

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  // splitmix64 over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PointSet random_instance(int dim, Coord delta, std::int64_t n_red, std::int64_t n_blue,
                         std::int64_t n_plain, Rng& rng) {
  PointSet ps;
  ps.domain = DomainSpec::make(dim, delta);
  std::uniform_int_distribution<Coord> pick(0, delta - 1);
  auto add = [&](std::int64_t count, Color c) {
    for (std::int64_t i = 0; i < count; ++i) {
      Point p;
      p.color = c;
      for (int k = 0; k < dim; ++k) p.x[k] = pick(rng);
      ps.points.push_back(p);
    }
  };
  add(n_red, Color::red);
  add(n_blue, Color::blue);
  add(n_plain, Color::plain);
  return ps;
}

namespace {

int family_dim(const std::string& f) {
  if (f == "emd1d") return 1;
  if (f == "emd3d") return 3;
  if (f == "emd2d" || f == "mst" || f == "cells") return 2;
  throw std::invalid_argument("unknown family: " + f);
}

bool is_emd(const std::string& f) { return f.rfind("emd", 0) == 0; }

Coord default_delta(const std::string& f, std::int64_t n, double param) {
  if (f == "emd1d") return Coord{1} << 16;
  if (f == "emd2d") return Coord{1} << 10;
  if (f == "emd3d") return Coord{1} << 8;
  if (f == "mst") return next_pow2(static_cast<Coord>(std::ceil(2.0 * n / param)));
  return Coord{1} << 10;
}

std::vector<double> default_params(const std::string& f) {
  if (f == "emd1d") return {8, 16, 32, 64};
  if (f == "emd2d" || f == "emd3d") return {16};
  if (f == "mst") return {0.25};
  return {16};
}

double exact_value(const std::string& f, const PointSet& ps, double param) {
  if (f == "emd1d") return static_cast<double>(exact_emd_1d(ps));
  if (is_emd(f)) return exact_emd(ps);
  if (f == "mst") return exact_mst(ps);
  // cells: distinct cells of side `param`
  const int level = floor_log2(static_cast<Coord>(param));
  std::vector<QuadCell> cells;
  for (const auto& p : ps.points) cells.push_back(cell_of(ps.domain, p.x, level, ShiftVector::zero()));
  std::sort(cells.begin(), cells.end());
  return static_cast<double>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

Estimate run_estimator(const std::string& f, const PointSet& ps, double param, Rng& rng,
                       QueryLedger& ledger) {
  if (is_emd(f)) {
    const auto co = build_colored(ps);
    const auto s = static_cast<std::int64_t>(param);
    return ps.domain.dim == 1 ? estimate_emd_1d(co, s, rng, ledger) : estimate_emd(co, s, rng, ledger);
  }
  const auto o = build_exact(ps);
  if (f == "mst") return estimate_mst(*o, param, rng, ledger);
  return estimate_nonempty_count(*o, static_cast<Coord>(param), rng, ledger);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

bool within_bound(const std::string& family, double estimate, double exact, std::int64_t n,
                  Coord delta, int dim, double param, double C, double kappa) {
  if (is_emd(family)) {
    const double slack = C * static_cast<double>(n) * static_cast<double>(delta) /
                         std::pow(param, 1.0 + 1.0 / dim);
    const double mult = dim == 1 ? 4.0 : kappa * std::log2(static_cast<double>(delta));
    return estimate >= exact / 4.0 - slack && estimate <= mult * exact + slack;
  }
  if (family == "mst") return std::abs(estimate / exact - 1.0) <= 3.0 * param;
  return std::abs(estimate - exact) <= 0.1 * exact;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  const auto params = cfg.params.empty() ? default_params(cfg.family) : cfg.params;
  std::optional<PointSet> fixed;
  if (!cfg.instance_path.empty()) fixed = load_point_set(cfg.instance_path);
  const int dim = fixed ? fixed->domain.dim : family_dim(cfg.family);

  SweepResult out;
  std::map<double, double> fixed_exact;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    const double param = params[pi];
    for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
      Rng rng(trial_seed(trial_seed(cfg.seed, pi), static_cast<std::uint64_t>(trial)));
      PointSet ps;
      if (fixed) {
        ps = *fixed;
      } else {
        const Coord delta = cfg.delta > 0 ? cfg.delta : default_delta(cfg.family, cfg.n, param);
        ps = is_emd(cfg.family) ? random_instance(dim, delta, cfg.n, cfg.n, 0, rng)
                                : random_instance(dim, delta, 0, 0, cfg.n, rng);
      }
      TrialRecord rec;
      rec.family = cfg.family;
      rec.n = is_emd(cfg.family) ? ps.count(Color::red) : static_cast<std::int64_t>(ps.points.size());
      rec.delta = ps.domain.delta;
      rec.param = param;
      rec.trial = trial;

      QueryLedger ledger;
      const auto t0 = std::chrono::steady_clock::now();
      const Estimate e = run_estimator(cfg.family, ps, param, rng, ledger);
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      rec.estimate = e.value;
      rec.queries = e.queries_used;
      if (cfg.exact) {
        double ex;
        if (fixed) {
          auto it = fixed_exact.find(param);
          if (it == fixed_exact.end()) it = fixed_exact.emplace(param, exact_value(cfg.family, ps, param)).first;
          ex = it->second;
        } else {
          ex = exact_value(cfg.family, ps, param);
        }
        rec.exact = ex;
        rec.abs_err = std::abs(rec.estimate - ex);
        rec.rel_err = ex != 0.0 ? rec.abs_err / std::abs(ex) : (rec.abs_err == 0.0 ? 0.0 : INFINITY);
        rec.success = within_bound(cfg.family, rec.estimate, ex, rec.n, rec.delta, ps.domain.dim, param,
                                   cfg.C, cfg.kappa);
      }
      out.records.push_back(rec);
    }
  }
  out.summary = summarize(out.records);
  return out;
}

namespace {
double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}
}  // namespace

SweepSummary summarize(const std::vector<TrialRecord>& records) {
  SweepSummary s;
  s.trials = static_cast<std::int64_t>(records.size());
  std::vector<double> errs;
  std::map<double, std::vector<double>> by_param;
  for (const auto& r : records) {
    s.successes += r.success;
    s.max_queries = std::max(s.max_queries, r.queries);
    if (r.exact) {
      errs.push_back(r.abs_err);
      by_param[r.param].push_back(r.abs_err);
    }
  }
  s.success_rate = s.trials ? static_cast<double>(s.successes) / static_cast<double>(s.trials) : 0.0;
  s.median_abs_err = median_of(errs);
  if (by_param.size() >= 2) {
    std::vector<double> xs, ys;
    for (const auto& [p, v] : by_param) {
      xs.push_back(p);
      ys.push_back(median_of(v));
    }
    s.slope = loglog_slope(xs, ys);
  }
  return s;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream os;
  os << "family,n,delta,param,trial,estimate,exact,abs_err,rel_err,queries,success\n";
  for (const auto& r : records) {
    os << r.family << ',' << r.n << ',' << r.delta << ',' << fmt(r.param) << ',' << r.trial << ','
       << fmt(r.estimate) << ',' << (r.exact ? fmt(*r.exact) : "") << ',' << fmt(r.abs_err) << ','
       << fmt(r.rel_err) << ',' << r.queries << ',' << (r.success ? 1 : 0) << '\n';
  }
  return os.str();
}

nlohmann::ordered_json to_json(const SweepResult& r) {
  nlohmann::ordered_json j;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& t : r.records) {
    nlohmann::ordered_json o;
    o["family"] = t.family;
    o["n"] = t.n;
    o["delta"] = t.delta;
    o["param"] = t.param;
    o["trial"] = t.trial;
    o["estimate"] = t.estimate;
    o["exact"] = t.exact ? nlohmann::ordered_json(*t.exact) : nlohmann::ordered_json();
    o["abs_err"] = t.abs_err;
    o["rel_err"] = std::isfinite(t.rel_err) ? nlohmann::ordered_json(t.rel_err) : nlohmann::ordered_json();
    o["queries"] = t.queries;
    o["success"] = t.success;
    j["records"].push_back(o);
  }
  const auto& s = r.summary;
  j["summary"] = {{"trials", s.trials},
                  {"successes", s.successes},
                  {"success_rate", s.success_rate},
                  {"median_abs_err", s.median_abs_err},
                  {"slope", s.slope ? nlohmann::ordered_json(*s.slope) : nlohmann::ordered_json()},
                  {"max_queries", s.max_queries}};
  return j;
}

void write_sweep(const SweepResult& r, const std::string& path, OutputFormat fmt) {
  write_file_atomic(path, fmt == OutputFormat::csv ? to_csv(r.records) : to_json(r).dump(2) + "\n");
}

std::string resolve_output(const std::string& path) {
  if (path.empty() || path == "-") return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  if (const char* dir = std::getenv("RCQ_OUTPUT_DIR"); dir && *dir)
    return (std::filesystem::path(dir) / p).string();
  return path;
}

}  // namespace rcq
