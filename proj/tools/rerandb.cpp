// Experiment runner: configures engines, adversaries, analysis sweeps, and
// one-time-pad demos from a JSON config and/or flags, and emits
// machine-readable reports.
//
//   rerandb <mode> [--n --k --r --t --m --s --strategy --trials --seed
//                   --config --out --format --jobs]
//   rerandb sweep --sweep-mode <mode> --axis <field> --values v1,v2,... [...]
//
// Exit codes: 0 pass, 1 usage error, 2 bound violation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rerandb/cli.hpp"

namespace {

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

void print_report(const rerandb::RunReport& rep, const std::string& format) {
  if (format == "csv")
    std::cout << rep.to_csv();
  else
    std::cout << rep.to_json().dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"re-randomizing database experiment runner"};
  app.require_subcommand(0, 0);

  std::string mode;
  std::string config_path;
  std::string axis;
  std::string values_csv;
  std::string sweep_mode;
  rerandb::ExperimentConfig flags;
  bool n_set = false, k_set = false, r_set = false, t_set = false;
  bool m_set = false, s_set = false, strat_set = false, trials_set = false;
  bool seed_set = false, jobs_set = false, out_set = false, fmt_set = false;

  app.add_option("mode", mode,
                 "bounds | exact-distance | bias-check | simulate-db | "
                 "everlasting | parity-stream | multiuser-check | otp-demo | "
                 "otp-eavesdrop | sweep")
      ->required();
  app.add_option("--config", config_path, "JSON config file (flags override)");
  app.add_option("--n", flags.n)->each([&](const std::string&) { n_set = true; });
  app.add_option("--k", flags.k)->each([&](const std::string&) { k_set = true; });
  app.add_option("--r", flags.r)->each([&](const std::string&) { r_set = true; });
  app.add_option("--t", flags.t)->each([&](const std::string&) { t_set = true; });
  app.add_option("--m", flags.m)->each([&](const std::string&) { m_set = true; });
  app.add_option("--s", flags.s)->each([&](const std::string&) { s_set = true; });
  app.add_option("--strategy", flags.strategy)
      ->each([&](const std::string&) { strat_set = true; });
  app.add_option("--trials", flags.trials)
      ->each([&](const std::string&) { trials_set = true; });
  app.add_option("--seed", flags.seed)
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--jobs", flags.jobs)
      ->each([&](const std::string&) { jobs_set = true; });
  app.add_option("--out", flags.output)
      ->each([&](const std::string&) { out_set = true; });
  app.add_option("--format", flags.format)
      ->each([&](const std::string&) { fmt_set = true; });
  app.add_option("--axis", axis, "sweep: numeric config field to vary");
  app.add_option("--values", values_csv, "sweep: comma-separated values");
  app.add_option("--sweep-mode", sweep_mode,
                 "sweep: underlying experiment mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    rerandb::ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot read config file " << config_path << "\n";
        return 1;
      }
      nlohmann::json j;
      in >> j;
      cfg = rerandb::ExperimentConfig::from_json(j);
    }
    if (n_set) cfg.n = flags.n;
    if (k_set) cfg.k = flags.k;
    if (r_set) cfg.r = flags.r;
    if (t_set) cfg.t = flags.t;
    if (m_set) cfg.m = flags.m;
    if (s_set) cfg.s = flags.s;
    if (strat_set) cfg.strategy = flags.strategy;
    if (trials_set) cfg.trials = flags.trials;
    if (seed_set) cfg.seed = flags.seed;
    if (jobs_set) cfg.jobs = flags.jobs;
    if (out_set) cfg.output = flags.output;
    if (fmt_set) cfg.format = flags.format;

    if (!cfg.output.empty() && cfg.output.find('/') == std::string::npos) {
      if (const char* dir = std::getenv("RERANDB_OUT_DIR"))
        cfg.output = std::string(dir) + "/" + cfg.output;
    }

    if (mode == "sweep") {
      if (axis.empty() || sweep_mode.empty()) {
        std::cerr << "error: sweep requires --sweep-mode and --axis\n";
        return 1;
      }
      cfg.mode = sweep_mode;
      const std::vector<double> values = parse_values(values_csv);
      const std::vector<rerandb::RunReport> reports =
          rerandb::sweep(cfg, axis, values);
      // merged CSV on stdout (and to --out if given)
      std::ostringstream merged;
      merged << rerandb::kCsvVersion << "\n" << rerandb::kCsvHeader << "\n";
      bool all_pass = true;
      for (const auto& rep : reports) {
        for (const auto& row : rep.rows) {
          merged << row.n << ',' << row.k << ',' << row.r << ',' << row.t
                 << ',' << row.strategy << ',' << row.estimate << ','
                 << row.ci_lo << ',' << row.ci_hi << ',' << row.bound_exact
                 << ',' << row.bound_closed << ',' << (row.pass ? 1 : 0)
                 << "\n";
        }
        all_pass = all_pass && rep.pass;
      }
      std::cout << merged.str();
      if (!cfg.output.empty()) {
        std::ofstream out(cfg.output);
        out << merged.str();
      }
      return all_pass ? 0 : 2;
    }

    cfg.mode = mode;
    const rerandb::RunReport rep = rerandb::run(cfg);
    print_report(rep, cfg.format);
    return rep.pass ? 0 : 2;
  } catch (const rerandb::contract_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
