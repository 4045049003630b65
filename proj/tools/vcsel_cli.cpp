// Command-line front end: data generation, sampling, statistics, bounds and
// experiments. Exit code 0 on success, 2 on validation errors, 1 otherwise.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vcsel/vcsel.hpp"

namespace fs = std::filesystem;
using namespace vcsel;

namespace {

struct DomainFlags {
  Value lo = 0;
  Value hi = 200000;
  Domain domain() const { return {lo, hi}; }
};

void add_domain_flags(CLI::App* cmd, DomainFlags& d) {
  cmd->add_option("--domain-lo", d.lo, "Lowest column value")
      ->capture_default_str();
  cmd->add_option("--domain-hi", d.hi, "Highest column value")
      ->capture_default_str();
}

// Loads CSV tables whose columns all share the given domain.
Catalog load_tables(const std::vector<std::string>& paths, Domain domain) {
  Catalog catalog;
  for (const auto& p : paths) {
    std::vector<ColumnMeta> schema;
    for (auto& name : read_csv_header(p)) schema.push_back({name, domain});
    catalog.add(load_csv(p, schema));
  }
  return catalog;
}

std::vector<std::string> table_names(const std::vector<std::string>& paths) {
  std::vector<std::string> names;
  for (const auto& p : paths) names.push_back(fs::path(p).stem().string());
  return names;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

struct ClassFlags {
  std::size_t u = 1;
  std::size_t m = 1;
  std::size_t b = 1;
  double log_base = 2.0;
  double d_override = 0.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--u", u, "Number of select operations (tables)")
        ->capture_default_str();
    cmd->add_option("--m", m, "Columns per selection predicate")
        ->capture_default_str();
    cmd->add_option("--b", b, "Clauses per selection predicate")
        ->capture_default_str();
    cmd->add_option("--log-base", log_base, "Logarithm base of the bounds")
        ->capture_default_str();
    cmd->add_option("--d-override", d_override,
                    "Use this VC-dimension instead of the computed bound");
  }

  double dimension() const {
    if (d_override > 0.0) return d_override;
    return static_cast<double>(bound_general(u, m, b, log_base).dimension());
  }
};

struct SizeFlags {
  double epsilon = 0.05;
  double delta = 0.05;
  double c = 0.5;

  void add(CLI::App* cmd) {
    cmd->add_option("--epsilon", epsilon)->capture_default_str();
    cmd->add_option("--delta", delta)->capture_default_str();
    cmd->add_option("--c", c, "Constant of the epsilon-approximation size")
        ->capture_default_str();
  }
};

nlohmann::ordered_json report_json(const VcBoundReport& r) {
  nlohmann::ordered_json j;
  j["formula"] = r.formula_id;
  j["bound"] = r.bound;
  j["dimension"] = r.dimension();
  j["log_base"] = r.log_base;
  if (r.params) {
    j["u"] = r.params->u;
    j["m"] = r.params->m;
    j["b"] = r.params->b;
  }
  if (!r.dims.empty()) j["dims"] = r.dims;
  return j;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ValidationError("bad sample size '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selectivity estimation with VC-dimension sized samples"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic table");
  std::string gen_kind = "uniform", gen_out, gen_name;
  std::size_t gen_rows = 100000, gen_cols = 2;
  double gen_mu = 100000.0;
  std::vector<double> gen_cov = {625e6, 562.5e6, 562.5e6, 625e6};
  std::uint64_t gen_seed = 1;
  DomainFlags gen_domain;
  gen->add_option("--kind", gen_kind)
      ->check(CLI::IsMember({"uniform", "correlated"}))
      ->capture_default_str();
  gen->add_option("--rows", gen_rows)->capture_default_str();
  gen->add_option("--cols", gen_cols, "Column count (uniform only)")
      ->capture_default_str();
  add_domain_flags(gen, gen_domain);
  gen->add_option("--mu", gen_mu, "Mean of both correlated columns")
      ->capture_default_str();
  gen->add_option("--cov", gen_cov,
                  "Covariance entries s11,s12,s21,s22 (or s11,s12,s22)")
      ->delimiter(',')
      ->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--name", gen_name, "Table name (default: file stem)");
  gen->add_option("--out", gen_out, "Output CSV")->required();

  // build-sample
  auto* bs = app.add_subcommand("build-sample",
                                "Draw an index-aligned sample of tables");
  std::vector<std::string> bs_tables;
  std::size_t bs_size = 0;
  bool bs_auto = false;
  std::uint64_t bs_seed = 1;
  std::string bs_out;
  ClassFlags bs_class;
  SizeFlags bs_sizes;
  DomainFlags bs_domain;
  bs->add_option("--tables", bs_tables, "Base table CSV files")->required();
  auto* bs_size_opt = bs->add_option("--size", bs_size, "Sample size");
  auto* bs_auto_flag =
      bs->add_flag("--auto", bs_auto, "Derive the size from the bounds");
  bs_size_opt->excludes(bs_auto_flag);
  bs_class.add(bs);
  bs_sizes.add(bs);
  add_domain_flags(bs, bs_domain);
  bs->add_option("--seed", bs_seed)->capture_default_str();
  bs->add_option("--out", bs_out, "Output directory")->required();

  // build-stats
  auto* st = app.add_subcommand("build-stats",
                                "Build MCV lists and equi-depth histograms");
  std::vector<std::string> st_tables;
  std::size_t st_buckets = 100, st_mcv = 100;
  std::string st_out;
  DomainFlags st_domain;
  st->add_option("--tables", st_tables)->required();
  st->add_option("--buckets", st_buckets)->capture_default_str();
  st->add_option("--mcv", st_mcv)->capture_default_str();
  add_domain_flags(st, st_domain);
  st->add_option("--out", st_out)->required();

  // bounds
  auto* bd = app.add_subcommand("bounds", "VC-dimension upper bounds");
  ClassFlags bd_class;
  std::string bd_json;
  bd_class.add(bd);
  bd->add_option("--json", bd_json, "Also write a JSON record here");

  // sample-size
  auto* ss = app.add_subcommand("sample-size",
                                "Sample size for an (relative) approximation");
  ClassFlags ss_class;
  SizeFlags ss_sizes;
  double ss_p = 0.0, ss_c_prime = 0.5;
  std::uint64_t ss_population = 0;
  std::string ss_json;
  ss_class.add(ss);
  ss_sizes.add(ss);
  ss->add_option("--p", ss_p, "Relative mode threshold in (0,1)");
  ss->add_option("--c-prime", ss_c_prime)->capture_default_str();
  ss->add_option("--population", ss_population, "Cap at this many points");
  ss->add_option("--json", ss_json, "Also write a JSON record here");

  // estimate
  auto* es = app.add_subcommand("estimate", "Estimate a query on a sample");
  std::string es_query, es_sample, es_out;
  std::vector<std::string> es_exact;
  std::size_t es_query_id = 0;
  DomainFlags es_domain;
  es->add_option("--query", es_query, "SQL text")->required();
  es->add_option("--sample", es_sample, "Sample manifest")->required();
  es->add_option("--exact-against", es_exact,
                 "Base table CSVs for exact selectivities");
  es->add_option("--query-id", es_query_id)->capture_default_str();
  add_domain_flags(es, es_domain);
  es->add_option("--out", es_out, "Output CSV (default: stdout)");

  // experiment
  auto* ex = app.add_subcommand("experiment",
                                "Workload sweep over sample sizes");
  std::size_t ex_m = 2, ex_b = 2, ex_count = 100, ex_rows = 100000,
              ex_cols = 5, ex_buckets = 100, ex_mcv = 100;
  std::string ex_kind = "select", ex_data = "uniform", ex_sizes = "1000",
              ex_methods = "indexed,practitioner,histogram", ex_out,
              ex_join_column = "C1";
  std::vector<std::string> ex_tables;
  double ex_epsilon = 0.05, ex_delta = 0.05, ex_mu = 100000.0;
  std::vector<double> ex_cov = {625e6, 562.5e6, 562.5e6, 625e6};
  std::uint64_t ex_seed = 1;
  DomainFlags ex_domain;
  ex->add_option("--workload-m", ex_m)->capture_default_str();
  ex->add_option("--workload-b", ex_b)->capture_default_str();
  ex->add_option("--count", ex_count)->capture_default_str();
  ex->add_option("--kind", ex_kind)
      ->check(CLI::IsMember({"select", "join"}))
      ->capture_default_str();
  ex->add_option("--sizes", ex_sizes, "Comma-separated sample sizes")
      ->capture_default_str();
  ex->add_option("--epsilon", ex_epsilon)->capture_default_str();
  ex->add_option("--delta", ex_delta, "Recorded with the run")
      ->capture_default_str();
  ex->add_option("--methods", ex_methods)->capture_default_str();
  ex->add_option("--seed", ex_seed)->capture_default_str();
  ex->add_option("--out-dir", ex_out)->required();
  ex->add_option("--tables", ex_tables,
                 "Base table CSVs (default: generate synthetic tables)");
  ex->add_option("--data", ex_data, "Synthetic data kind")
      ->check(CLI::IsMember({"uniform", "correlated"}))
      ->capture_default_str();
  ex->add_option("--rows", ex_rows)->capture_default_str();
  ex->add_option("--cols", ex_cols)->capture_default_str();
  ex->add_option("--mu", ex_mu)->capture_default_str();
  ex->add_option("--cov", ex_cov)->delimiter(',')->capture_default_str();
  ex->add_option("--join-column", ex_join_column)->capture_default_str();
  ex->add_option("--buckets", ex_buckets)->capture_default_str();
  ex->add_option("--mcv", ex_mcv)->capture_default_str();
  add_domain_flags(ex, ex_domain);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto covariance = [](const std::vector<double>& v) {
    if (v.size() == 3) return Covariance2{{{v[0], v[1]}, {v[1], v[2]}}};
    if (v.size() == 4) return Covariance2{{{v[0], v[1]}, {v[2], v[3]}}};
    throw ValidationError("--cov needs 3 or 4 numbers");
  };

  try {
    if (*gen) {
      const std::string name =
          gen_name.empty() ? fs::path(gen_out).stem().string() : gen_name;
      const Table t =
          gen_kind == "uniform"
              ? generate_uniform_table(name, gen_rows, gen_cols,
                                       gen_domain.domain(), gen_seed)
              : generate_correlated_table(name, gen_rows, gen_mu,
                                          covariance(gen_cov),
                                          gen_domain.domain(), gen_seed);
      auto out = open_out(gen_out);
      write_csv(out, t);
    } else if (*bs) {
      const Catalog db = load_tables(bs_tables, bs_domain.domain());
      std::size_t size = bs_size;
      if (bs_auto) {
        SampleSizeSpec spec;
        spec.epsilon = bs_sizes.epsilon;
        spec.delta = bs_sizes.delta;
        spec.c = bs_sizes.c;
        spec.d = bs_class.dimension();
        double population = 1.0;
        for (const auto& n : db.names()) {
          population *= static_cast<double>(db.get(n).row_count());
        }
        if (population < 1e18) {
          spec.population = static_cast<std::uint64_t>(population);
        }
        size = sample_size_eps(spec);
      } else if (size == 0) {
        throw ValidationError("give --size or --auto");
      }
      const auto sample =
          create_sample(size, db, table_names(bs_tables), bs_seed);
      save_sample(bs_out, sample);
      std::cout << "size=" << size << "\nseed=" << bs_seed
                << "\nmanifest=" << (fs::path(bs_out) / "manifest.txt").string()
                << '\n';
    } else if (*st) {
      const Catalog db = load_tables(st_tables, st_domain.domain());
      StatsCatalog stats(st_buckets, st_mcv);
      for (const auto& n : table_names(st_tables)) build_stats(stats, db.get(n));
      auto out = open_out(st_out);
      dump_stats(out, stats);
    } else if (*bd) {
      const auto& f = bd_class;
      std::vector<std::pair<std::string, VcBoundReport>> reports;
      reports.emplace_back("select_single", bound_select_single(f.m, f.log_base));
      reports.emplace_back("select_boolean",
                           bound_select_boolean(f.m, f.b, f.log_base));
      if (f.u >= 2) {
        const double v = bound_select_boolean(f.m, f.b, f.log_base).bound;
        const double dim = std::max(v, 2.0);
        reports.emplace_back(
            "multi_join",
            bound_multi_join(f.u, std::vector<double>(f.u, dim), f.m,
                             f.log_base));
      }
      reports.emplace_back("general",
                           bound_general(f.u, f.m, f.b, f.log_base));
      std::cout << "u=" << f.u << "\nm=" << f.m << "\nb=" << f.b
                << "\nlog_base=" << format_real(f.log_base) << '\n';
      for (const auto& [key, r] : reports) {
        std::cout << key << '=' << format_real(r.bound) << '\n';
      }
      std::cout << "d=" << format_real(f.dimension()) << '\n';
      if (!bd_json.empty()) {
        nlohmann::ordered_json j;
        j["u"] = f.u;
        j["m"] = f.m;
        j["b"] = f.b;
        j["log_base"] = f.log_base;
        for (const auto& [key, r] : reports) j["bounds"][key] = report_json(r);
        j["d"] = f.dimension();
        auto out = open_out(bd_json);
        out << j.dump(2) << '\n';
      }
    } else if (*ss) {
      SampleSizeSpec spec;
      spec.epsilon = ss_sizes.epsilon;
      spec.delta = ss_sizes.delta;
      spec.c = ss_sizes.c;
      spec.c_prime = ss_c_prime;
      spec.d = ss_class.dimension();
      if (ss_p > 0.0) spec.p = ss_p;
      if (ss_population > 0) spec.population = ss_population;
      const auto size = spec.p ? sample_size_rel(spec) : sample_size_eps(spec);
      std::cout << "mode=" << (spec.p ? "relative" : "absolute")
                << "\nd=" << format_real(spec.d)
                << "\nepsilon=" << format_real(spec.epsilon)
                << "\ndelta=" << format_real(spec.delta) << '\n';
      if (spec.p) {
        std::cout << "p=" << format_real(*spec.p)
                  << "\nc_prime=" << format_real(spec.c_prime) << '\n';
      } else {
        std::cout << "c=" << format_real(spec.c) << '\n';
      }
      std::cout << "sample_size=" << size << '\n';
      if (!ss_json.empty()) {
        nlohmann::ordered_json j;
        j["mode"] = spec.p ? "relative" : "absolute";
        j["d"] = spec.d;
        j["epsilon"] = spec.epsilon;
        j["delta"] = spec.delta;
        if (spec.p) {
          j["p"] = *spec.p;
          j["c_prime"] = spec.c_prime;
        } else {
          j["c"] = spec.c;
        }
        if (spec.population) j["population"] = *spec.population;
        j["sample_size"] = size;
        auto out = open_out(ss_json);
        out << j.dump(2) << '\n';
      }
    } else if (*es) {
      const auto sample = load_sample(es_sample);
      std::optional<Catalog> db;
      if (!es_exact.empty()) db = load_tables(es_exact, es_domain.domain());
      std::vector<std::string> warnings;
      const auto plan = parse_query(es_query, db ? *db : sample.catalog(),
                                    &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      const auto records =
          estimate_all_nodes(sample, plan, db ? &*db : nullptr);
      std::ostringstream text;
      write_estimates_header(text);
      write_estimates(text, es_query_id, records, sample.seed());
      if (es_out.empty()) {
        std::cout << text.str();
      } else {
        auto out = open_out(es_out);
        out << text.str();
      }
    } else if (*ex) {
      Catalog db;
      std::vector<std::string> names;
      if (!ex_tables.empty()) {
        db = load_tables(ex_tables, ex_domain.domain());
        names = table_names(ex_tables);
      } else {
        const std::size_t n_tables = ex_kind == "join" ? 2 : 1;
        for (std::size_t i = 0; i < n_tables; ++i) {
          const std::string name(1, static_cast<char>('A' + i));
          const std::uint64_t seed = ex_seed * 1000003ULL + i;
          db.add(ex_data == "uniform"
                     ? generate_uniform_table(name, ex_rows, ex_cols,
                                              ex_domain.domain(), seed)
                     : generate_correlated_table(name, ex_rows, ex_mu,
                                                 covariance(ex_cov),
                                                 ex_domain.domain(), seed));
          names.push_back(name);
        }
      }
      WorkloadSpec wl;
      wl.m = ex_m;
      wl.b = ex_b;
      wl.count = ex_count;
      wl.kind = ex_kind == "join" ? WorkloadKind::kJoinPair
                                  : WorkloadKind::kSelect;
      wl.seed = ex_seed;
      wl.tables = names;
      wl.join_column = ex_join_column;
      const auto workload = generate_workload(wl, db);

      ExperimentConfig cfg;
      cfg.sample_sizes = parse_sizes(ex_sizes);
      cfg.epsilon = ex_epsilon;
      cfg.methods.clear();
      std::stringstream ms(ex_methods);
      std::string item;
      while (std::getline(ms, item, ',')) {
        if (!item.empty()) cfg.methods.push_back(parse_method(item));
      }
      cfg.seed = ex_seed;
      cfg.buckets = ex_buckets;
      cfg.mcv = ex_mcv;
      cfg.tables = names;
      const auto result = run_experiment(db, workload, cfg);

      const fs::path dir(ex_out);
      fs::create_directories(dir);
      {
        auto out = open_out(dir / "summary.csv");
        write_summary_csv(out, result.summaries);
      }
      {
        auto out = open_out(dir / "per_query.csv");
        write_per_query_csv(out, result);
      }
      if (!result.histogram.empty()) {
        auto out = open_out(dir / "histogram_per_query.csv");
        write_histogram_csv(out, result, workload);
      }
      {
        auto out = open_out(dir / "queries.sql");
        for (const auto& p : workload) out << to_sql(p) << '\n';
      }
      {
        auto out = open_out(dir / "run.txt");
        out << "seed=" << ex_seed << "\nepsilon=" << format_real(ex_epsilon)
            << "\ndelta=" << format_real(ex_delta) << "\nworkload_m=" << ex_m
            << "\nworkload_b=" << ex_b << "\ncount=" << ex_count
            << "\nkind=" << ex_kind << "\nsizes=" << ex_sizes << '\n';
      }
      std::ifstream summary(dir / "summary.csv");
      std::cout << summary.rdbuf();
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
