#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <json.hpp>

#include "rcq/cell_sampling.hpp"
#include "rcq/emd.hpp"
#include "rcq/gadgets.hpp"
#include "rcq/harness.hpp"
#include "rcq/mst.hpp"
#include "rcq/oracle.hpp"
#include "rcq/point_set.hpp"

using namespace rcq;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void print_ledger(const QueryLedger& ledger) {
  std::cout << "queries " << ledger.total();
  for (const auto& [phase, k] : ledger.per_phase()) std::cout << ' ' << phase << '=' << k;
  std::cout << '\n';
}

void emit_value(double value, const std::string& out, ordered_json extra = ordered_json::object()) {
  std::cout << num(value) << '\n';
  if (!out.empty()) {
    extra["value"] = value;
    write_file_atomic(resolve_output(out), extra.dump(2) + "\n");
  }
}

void emit_estimate(const Estimate& e, const QueryLedger& ledger, const std::string& out) {
  std::cout << num(e.value) << '\n';
  print_ledger(ledger);
  if (!out.empty()) write_file_atomic(resolve_output(out), to_json(e).dump(2) + "\n");
}

std::optional<std::int64_t> opt_witness(std::int64_t w) {
  return w >= 0 ? std::optional<std::int64_t>(w) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Range-counting estimators for EMD, non-empty cells and MST weight"};
  app.require_subcommand(1);

  std::string in, out, family = "emd1d", format = "csv";
  std::int64_t n = 1024, s = 16, c = 1, witness = -1, trials = 10, draws = 1;
  std::uint64_t seed = 1;
  Coord delta = 0, r = 1;
  int dim = 2;
  double eps = 0.25;
  std::vector<double> params;
  bool no_exact = false, lengths_center = false;

  auto* gen = app.add_subcommand("gen", "Write a lower-bound or random instance");
  gen->add_option("--family", family,
                  "emd1d | emd2d | emd3d | cellsampling | mst | random-colored | random-plain")
      ->required();
  gen->add_option("--n", n, "Points (per color for colored families)");
  gen->add_option("--s", s, "Query budget parameter of the EMD gadgets");
  gen->add_option("--c", c, "Approximation parameter of the cell-sampling gadgets");
  gen->add_option("--witness", witness, "Index of the planted gadget; negative for none");
  gen->add_option("--delta", delta, "Domain side; 0 picks a default");
  gen->add_option("--dim", dim, "Dimension of random instances");
  gen->add_option("--seed", seed);
  gen->add_option("--out", out, "Point-set file")->required();

  auto* est_emd = app.add_subcommand("estimate-emd", "Estimate EMD through range counts");
  est_emd->add_option("--in", in)->required()->check(CLI::ExistingFile);
  est_emd->add_option("--s", s)->required();
  est_emd->add_option("--seed", seed);
  est_emd->add_option("--out", out, "JSON estimate file");

  auto* est_mst = app.add_subcommand("estimate-mst", "Estimate Euclidean MST weight");
  est_mst->add_option("--in", in)->required()->check(CLI::ExistingFile);
  est_mst->add_option("--eps", eps);
  est_mst->add_option("--seed", seed);
  est_mst->add_option("--out", out, "JSON estimate file");
  est_mst->add_flag("--center-lengths", lengths_center, "Spanner edges measured between cell centers");

  auto* sample = app.add_subcommand("sample-cell", "Draw non-empty cells almost uniformly");
  sample->add_option("--in", in)->required()->check(CLI::ExistingFile);
  sample->add_option("--r", r, "Cell side (power of two)")->required();
  sample->add_option("--draws", draws);
  sample->add_option("--seed", seed);
  sample->add_option("--out", out, "JSON file of drawn cells");

  auto* count = app.add_subcommand("count-cells", "Estimate the number of non-empty cells");
  count->add_option("--in", in)->required()->check(CLI::ExistingFile);
  count->add_option("--r", r, "Cell side (power of two)")->required();
  count->add_option("--seed", seed);
  count->add_option("--out", out, "JSON estimate file");

  auto* ex_emd = app.add_subcommand("exact-emd", "Exact EMD baseline");
  ex_emd->add_option("--in", in)->required()->check(CLI::ExistingFile);
  ex_emd->add_option("--out", out);

  auto* ex_mst = app.add_subcommand("exact-mst", "Exact Euclidean MST weight");
  ex_mst->add_option("--in", in)->required()->check(CLI::ExistingFile);
  ex_mst->add_option("--out", out);

  auto* sp_mst = app.add_subcommand("spanner-mst", "MST weight of the quadtree spanner");
  sp_mst->add_option("--in", in)->required()->check(CLI::ExistingFile);
  sp_mst->add_option("--eps", eps);
  sp_mst->add_option("--out", out);
  sp_mst->add_flag("--center-lengths", lengths_center, "Spanner edges measured between cell centers");

  auto* bench = app.add_subcommand("bench", "Seeded parameter sweep");
  bench->add_option("--family", family, "emd1d | emd2d | emd3d | mst | cells");
  bench->add_option("--instance", in, "Fixed instance for all trials")->check(CLI::ExistingFile);
  bench->add_option("--n", n);
  bench->add_option("--delta", delta);
  bench->add_option("--params", params, "s values, eps values or cell sides");
  bench->add_option("--trials", trials);
  bench->add_option("--seed", seed);
  bench->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--out", out, "Output file");
  bench->add_flag("--no-exact", no_exact, "Skip the exact baselines");

  CLI11_PARSE(app, argc, argv);

  try {
    Rng rng(seed);
    QueryLedger ledger;
    const EdgeLength len = lengths_center ? EdgeLength::center : EdgeLength::representative;

    if (gen->parsed()) {
      PointSet ps;
      ordered_json meta;
      if (family == "random-colored" || family == "random-plain") {
        const Coord d = delta > 0 ? delta : 1024;
        ps = family == "random-colored" ? random_instance(dim, d, n, n, 0, rng)
                                        : random_instance(dim, d, 0, 0, n, rng);
      } else {
        GadgetInstance gi;
        const auto f = parse_family(family);
        if (f == GadgetFamily::cellsampling) gi = gen_cellsampling_lb(n, c, opt_witness(witness));
        else if (f == GadgetFamily::mst) gi = gen_mst_lb(n, opt_witness(witness));
        else gi = gen_emd_lb(f == GadgetFamily::emd1d ? 1 : f == GadgetFamily::emd2d ? 2 : 3, n, s,
                             opt_witness(witness), delta);
        ps = std::move(gi.points);
        for (const auto& [k, v] : gi.params) meta[k] = v;
        if (gi.declared_cost) meta["declared"] = *gi.declared_cost;
      }
      save_point_set(resolve_output(out), ps);
      meta["points"] = ps.points.size();
      std::cout << meta.dump() << '\n';
    } else if (est_emd->parsed()) {
      const auto ps = load_point_set(in);
      const auto co = build_colored(ps);
      const auto e = ps.domain.dim == 1 ? estimate_emd_1d(co, s, rng, ledger) : estimate_emd(co, s, rng, ledger);
      emit_estimate(e, ledger, out);
    } else if (est_mst->parsed()) {
      const auto o = build_exact(load_point_set(in));
      MstConfig mc;
      mc.length = len;
      emit_estimate(estimate_mst(*o, eps, rng, ledger, mc), ledger, out);
    } else if (sample->parsed()) {
      const auto o = build_exact(load_point_set(in));
      QuerySession qs(*o, ledger);
      ordered_json cells = ordered_json::array();
      CellSample last;
      for (std::int64_t i = 0; i < draws; ++i) {
        last = cell_sampling(qs, r, rng);
        ordered_json idx = ordered_json::array();
        for (int k = 0; k < o->domain().dim; ++k) idx.push_back(last.cell.index[k]);
        std::cout << idx.dump() << '\n';
        cells.push_back(idx);
      }
      print_ledger(ledger);
      if (!out.empty()) {
        ordered_json j;
        j["level"] = floor_log2(r);
        j["branch"] = last.branch == CellBranch::enumerated ? "enumerated" : "weighted";
        j["cells"] = cells;
        j["queries_used"] = ledger.total();
        write_file_atomic(resolve_output(out), j.dump(2) + "\n");
      }
    } else if (count->parsed()) {
      const auto o = build_exact(load_point_set(in));
      emit_estimate(estimate_nonempty_count(*o, r, rng, ledger), ledger, out);
    } else if (ex_emd->parsed()) {
      const auto ps = load_point_set(in);
      emit_value(ps.domain.dim == 1 ? static_cast<double>(exact_emd_1d(ps)) : exact_emd(ps), out);
    } else if (ex_mst->parsed()) {
      emit_value(exact_mst(load_point_set(in)), out);
    } else if (sp_mst->parsed()) {
      emit_value(spanner_mst_exact(load_point_set(in), eps, len), out, {{"eps", eps}});
    } else if (bench->parsed()) {
      ExperimentConfig cfg;
      cfg.family = family;
      cfg.instance_path = in;
      cfg.n = n;
      cfg.delta = delta;
      cfg.params = params;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.exact = !no_exact;
      cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
      const auto res = run_sweep(cfg);
      if (out.empty() || out == "-") {
        std::cout << (cfg.format == OutputFormat::csv ? to_csv(res.records) : to_json(res).dump(2) + "\n");
      } else {
        write_sweep(res, resolve_output(out), cfg.format);
      }
      const auto& sm = res.summary;
      std::cerr << "trials " << sm.trials << " success_rate " << num(sm.success_rate) << " median_abs_err "
                << num(sm.median_abs_err) << " slope " << (sm.slope ? num(*sm.slope) : "n/a")
                << " max_queries " << sm.max_queries << '\n';
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
