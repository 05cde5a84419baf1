// anonlab: command line front end.
//
//   anonlab simulate --catalog cat.json --truth f.json --grid -5:5:0.1 --mode t2 --warp 2,3
//   anonlab catalog gen --config cfg.json
//   anonlab catalog check --catalog cat.json --cuts 0,1/2,1
//   anonlab verify-smooth --w 0 --z 0 --depth 20 --kmax 4 --precision 256
//   anonlab witness --w 0 --z 0 --depth 20 --x -1/3
//   anonlab campaign run --config cfg.json
//
// Exit status is 0 iff every check passes, 1 on a failed check, 2 on bad input.

#include "anonlab/fpath.hpp"
#include "anonlab/harness.hpp"
#include "anonlab/predictor.hpp"
#include "anonlab/scenario_json.hpp"
#include "anonlab/smooth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace anonlab;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return json::parse(in);
}

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write " + path);
}

Catalog read_catalog(const std::string& path) {
  json j = read_json(path);
  const json& arr = j.is_object() ? j.at("entries") : j;
  std::vector<Scenario> entries;
  for (const auto& e : arr) entries.push_back(scenario_from_json(e));
  return Catalog(std::move(entries));
}

json catalog_to_json(const Catalog& cat) {
  json arr = json::array();
  for (std::size_t i = 0; i < cat.size(); ++i) {
    json e = to_json(cat.entry(i));
    e["tier"] = to_string(cat.tier(i));
    arr.push_back(std::move(e));
  }
  return json{{"entries", arr}};
}

std::vector<Rat> parse_rat_list(const std::string& text) {
  std::vector<Rat> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_rat(item));
  }
  return out;
}

AffineWarp parse_warp(const std::string& text) {
  auto v = parse_rat_list(text);
  if (v.size() != 2) throw ParseError("warp must be 'slope,offset', got '" + text + "'");
  return AffineWarp(v[0], v[1]);
}

json closure_to_json(const ClosureReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) {
    v.push_back(json{{"entry", x.entry}, {"cut", format_rat(x.cut)}, {"kind", x.kind}, {"detail", x.detail}});
  }
  return json{{"checks", r.checks}, {"violations", v}, {"passed", r.passed()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anonlab: least-consistent predictors and smooth warps"};
  app.require_subcommand(1);
  unsigned default_bits = kDefaultPrecisionBits;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a predictor over a grid of agents");
  std::string sim_catalog, sim_truth, sim_grid = "-5:5:1/10", sim_mode = "t2", sim_warp, sim_csv, sim_summary;
  sim->add_option("--catalog", sim_catalog, "Catalog JSON")->required();
  sim->add_option("--truth", sim_truth, "Truth scenario JSON")->required();
  sim->add_option("--grid", sim_grid, "start:stop:step, stop excluded");
  sim->add_option("--mode", sim_mode, "ht or t2");
  sim->add_option("--warp", sim_warp, "slope,offset; the truth becomes f(slope*x + offset)");
  sim->add_option("--csv", sim_csv, "Per-agent CSV (default stdout)");
  sim->add_option("--summary", sim_summary, "JSON summary (default stderr)");

  // catalog
  auto* cat_cmd = app.add_subcommand("catalog", "Generate or check catalogs");
  cat_cmd->require_subcommand(1);
  auto* gen = cat_cmd->add_subcommand("gen", "Generate a closed catalog");
  std::string gen_config, gen_out;
  std::uint64_t gen_seed = 1;
  unsigned gen_alpha = 3, gen_size = 24;
  gen->add_option("--config", gen_config, "Experiment config JSON");
  gen->add_option("--seed", gen_seed, "Seed when no config is given");
  gen->add_option("--alphabet", gen_alpha, "Alphabet size when no config is given");
  gen->add_option("--size", gen_size, "Catalog size when no config is given");
  gen->add_option("--out", gen_out, "Output path (default stdout)");
  auto* check = cat_cmd->add_subcommand("check", "Check catalog closure");
  std::string check_catalog, check_cuts;
  check->add_option("--catalog", check_catalog, "Catalog JSON")->required();
  check->add_option("--cuts", check_cuts, "Comma-separated extra cuts");

  // verify-smooth
  auto* vs = app.add_subcommand("verify-smooth", "Build the smooth warp and verify its flatness");
  std::string vs_w = "0", vs_z = "0", vs_csv, vs_trend, vs_out;
  unsigned vs_depth = 20, vs_kmax = 4, vs_bits = 0;
  vs->add_option("--w", vs_w, "Accumulation point");
  vs->add_option("--z", vs_z, "Its image");
  vs->add_option("--depth", vs_depth, "Truncation depth N");
  vs->add_option("--kmax", vs_kmax, "Highest derivative order checked");
  vs->add_option("--precision", vs_bits, "Bits (default ANONLAB_PRECISION or 256)");
  vs->add_option("--csv", vs_csv, "Write (x, t(x)) samples here");
  vs->add_option("--trend", vs_trend, "Write the left difference quotients here");
  vs->add_option("--out", vs_out, "Report path (default stdout)");

  // witness
  auto* wt = app.add_subcommand("witness", "Chain certifying t(x) ~ x for x < w");
  std::string wt_w = "0", wt_z = "0", wt_x;
  unsigned wt_depth = 20, wt_bits = 0;
  wt->add_option("--w", wt_w, "Accumulation point");
  wt->add_option("--z", wt_z, "Its image");
  wt->add_option("--depth", wt_depth, "Truncation depth N");
  wt->add_option("--x", wt_x, "Point below w")->required();
  wt->add_option("--precision", wt_bits, "Bits (default ANONLAB_PRECISION or 256)");

  // campaign
  auto* camp = app.add_subcommand("campaign", "Seeded property campaigns");
  camp->require_subcommand(1);
  auto* run = camp->add_subcommand("run", "Run every configured suite");
  std::string run_config, run_out;
  run->add_option("--config", run_config, "Experiment config JSON")->required();
  run->add_option("--out", run_out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    default_bits = default_precision_from_env();

    if (*sim) {
      Catalog cat = read_catalog(sim_catalog);
      Scenario f = scenario_from_json(read_json(sim_truth));
      if (!sim_warp.empty()) f = compose_warp(f, parse_warp(sim_warp));
      Mode mode = parse_mode(sim_mode);
      auto grid = GridSpec::parse(sim_grid).points();
      if (mode == Mode::t2) {
        ClosureReport cr = check_closure(cat, grid);
        if (!cr.passed()) {
          std::cerr << closure_to_json(cr).dump(2) << "\n";
          std::cerr << "catalog is not closed; t2 predictions would depend on the chosen warp\n";
          return 1;
        }
      }
      ErrorSetReport rep = error_set(cat, f, grid, mode);
      std::ofstream file;
      if (!sim_csv.empty()) {
        file.open(sim_csv);
        if (!file) throw std::runtime_error("cannot write " + sim_csv);
      }
      std::ostream& csv = sim_csv.empty() ? std::cout : file;
      csv << "agent,guess,truth,correct,witnessIndex\n";
      for (std::size_t i = 0; i < rep.agents.size(); ++i) {
        csv << format_rat(rep.agents[i]) << "," << rep.guesses[i].state.id << "," << rep.truths[i].id << ","
            << (rep.guesses[i].state == rep.truths[i] ? 1 : 0) << "," << rep.index_trace[i] << "\n";
      }
      auto problems = error_set_violations(rep, cat.size());
      json errs = json::array();
      for (auto i : rep.errors) errs.push_back(format_rat(rep.agents[i]));
      json summary{{"mode", to_string(mode)}, {"agents", rep.agents.size()}, {"catalogSize", cat.size()},
                   {"errors", errs}, {"problems", problems}, {"passed", problems.empty()}};
      if (sim_summary.empty()) {
        std::cerr << summary.dump(2) << "\n";
      } else {
        emit(summary, sim_summary);
      }
      return problems.empty() ? 0 : 1;
    }

    if (*gen) {
      ExperimentConfig cfg;
      if (!gen_config.empty()) {
        cfg = config_from_json(read_json(gen_config));
      } else {
        cfg.seed = gen_seed;
        cfg.alphabet_size = gen_alpha;
        cfg.catalog_size = gen_size;
      }
      Catalog cat = gen_catalog(cfg);
      emit(catalog_to_json(cat), gen_out);
      return 0;
    }

    if (*check) {
      Catalog cat = read_catalog(check_catalog);
      ClosureReport r = check_closure(cat, parse_rat_list(check_cuts));
      emit(closure_to_json(r), "");
      return r.passed() ? 0 : 1;
    }

    if (*vs) {
      PrecisionScope scope(vs_bits ? vs_bits : default_bits);
      SmoothWarpSpec spec = build_warp(parse_rat(vs_w), parse_rat(vs_z), vs_depth);
      FlatnessReport r = verify_flatness(spec, vs_kmax);
      BigFloat at_w = warp_eval(spec, to_big(spec.w));
      json j = to_json(r);
      j["w"] = format_rat(spec.w);
      j["z"] = format_rat(spec.z);
      j["depth"] = spec.depth;
      j["warpAtW"] = to_decimal(at_w);
      json ps = json::array(), qs = json::array();
      for (long i = spec.first_index; i <= spec.last_index(); ++i) {
        ps.push_back(format_rat(spec.p(i)));
        qs.push_back(format_rat(spec.q(i)));
      }
      j["firstIndex"] = spec.first_index;
      j["ps"] = ps;
      j["qs"] = qs;
      if (!vs_csv.empty()) write_warp_samples(vs_csv, spec, spec.p(spec.first_index), spec.w + 2, 400);
      if (!vs_trend.empty()) write_trend_table(vs_trend, r);
      emit(j, vs_out);
      return r.passed() ? 0 : 1;
    }

    if (*wt) {
      const unsigned bits = wt_bits ? wt_bits : default_bits;
      PrecisionScope scope(bits);
      SmoothWarpSpec spec = build_warp(parse_rat(wt_w), parse_rat(wt_z), wt_depth);
      FPathWitness wit = witness_for_warp(spec, to_big(parse_rat(wt_x)));
      BigFloat tol = pow2(-static_cast<long>(bits) + 56);
      bool ok = verify_witness(wit, tol);
      json j = to_json(wit);
      j["precisionBits"] = working_precision_bits();
      j["tolerance"] = tol.str(6, std::ios_base::scientific);
      j["verified"] = ok;
      emit(j, "");
      return ok ? 0 : 1;
    }

    if (*run) {
      ExperimentConfig cfg = config_from_json(read_json(run_config));
      CampaignReport rep = run_campaign(cfg);
      emit(rep.to_json(), run_out);
      return rep.passed() ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
