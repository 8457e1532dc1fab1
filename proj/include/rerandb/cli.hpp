#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rerandb/adversary.hpp"
#include "rerandb/bounds.hpp"
#include "rerandb/distance.hpp"
#include "rerandb/engine.hpp"
#include "rerandb/ftable.hpp"
#include "rerandb/montecarlo.hpp"
#include "rerandb/otp.hpp"
#include "rerandb/strategy.hpp"

namespace rerandb {

// Declarative experiment description, fed either from a JSON file or from
// command-line flags (flags override the file, same field names).
struct ExperimentConfig {
  std::string mode;  // bounds | exact-distance | bias-check | simulate-db |
                     // everlasting | parity-stream | multiuser-check |
                     // otp-demo | otp-eavesdrop
  double n = 0;      // double: the bounds mode takes n up to 1e12
  double r = 0;
  std::uint64_t k = 0;
  std::uint64_t t = 1;
  std::uint32_t m = 2;
  std::uint64_t s = 1;
  std::string strategy = "window";
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::uint32_t jobs = 1;
  std::string output;            // path; empty = stdout only
  std::string format = "json";   // json | csv

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.mode = j.value("mode", c.mode);
    c.n = j.value("n", c.n);
    c.r = j.value("r", c.r);
    c.k = j.value("k", c.k);
    c.t = j.value("t", c.t);
    c.m = j.value("m", c.m);
    c.s = j.value("s", c.s);
    c.strategy = j.value("strategy", c.strategy);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.jobs = j.value("jobs", c.jobs);
    c.output = j.value("output", c.output);
    c.format = j.value("format", c.format);
    return c;
  }

  nlohmann::json to_json() const {
    return {{"mode", mode},     {"n", n},       {"r", r},
            {"k", k},           {"t", t},       {"m", m},
            {"s", s},           {"strategy", strategy},
            {"trials", trials}, {"seed", seed}, {"jobs", jobs},
            {"output", output}, {"format", format}};
  }

  std::size_t n_sz() const { return static_cast<std::size_t>(n); }
  std::uint32_t r_u32() const { return static_cast<std::uint32_t>(r); }
};

// One estimate-vs-bound row; the fixed CSV column set below is versioned in
// the header line so downstream plotting stays stable.
struct ResultRow {
  double n = 0, k = 0, r = 0, t = 0;
  std::string strategy;
  double estimate = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  double bound_exact = 0;
  double bound_closed = 0;
  bool pass = true;

  nlohmann::json to_json() const {
    return {{"n", n},           {"k", k},
            {"r", r},           {"t", t},
            {"strategy", strategy},
            {"estimate", estimate},
            {"ci_lo", ci_lo},   {"ci_hi", ci_hi},
            {"bound_exact", bound_exact},
            {"bound_closed", bound_closed},
            {"pass", pass}};
  }
};

inline constexpr const char* kCsvHeader =
    "n,k,r,t,strategy,estimate,ci_lo,ci_hi,bound_exact,bound_closed,pass";
inline constexpr const char* kCsvVersion = "# rerandb-csv-v1";

struct RunReport {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  nlohmann::json extra;  // mode-specific payload (e.g. the full BoundReport)
  double wall_seconds = 0;
  bool pass = true;

  nlohmann::json to_json() const {
    nlohmann::json rj = nlohmann::json::array();
    for (const auto& row : rows) rj.push_back(row.to_json());
    return {{"config", config.to_json()},
            {"results", rj},
            {"extra", extra},
            {"wall_seconds", wall_seconds},
            {"pass", pass}};
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << kCsvVersion << "\n" << kCsvHeader << "\n";
    for (const auto& row : rows) {
      os << row.n << ',' << row.k << ',' << row.r << ',' << row.t << ','
         << row.strategy << ',' << row.estimate << ',' << row.ci_lo << ','
         << row.ci_hi << ',' << row.bound_exact << ',' << row.bound_closed
         << ',' << (row.pass ? 1 : 0) << "\n";
    }
    return os.str();
  }
};

// Shard `trials` across `jobs` worker threads; each shard keeps its own
// (first_trial, count) window so per-trial streams are unaffected by the
// parallelism degree.
inline ExperimentTally run_sharded(
    std::uint64_t trials, std::uint32_t jobs,
    const std::function<ExperimentTally(std::uint64_t first,
                                        std::uint64_t count)>& fn) {
  if (jobs <= 1 || trials < 2 * jobs) return fn(0, trials);
  std::vector<ExperimentTally> parts(jobs);
  std::vector<std::thread> workers;
  const std::uint64_t per = trials / jobs;
  for (std::uint32_t j = 0; j < jobs; ++j) {
    const std::uint64_t first = j * per;
    const std::uint64_t count = j + 1 == jobs ? trials - first : per;
    workers.emplace_back(
        [&parts, &fn, j, first, count] { parts[j] = fn(first, count); });
  }
  for (auto& w : workers) w.join();
  ExperimentTally total;
  for (const auto& p : parts) {
    total.successes += p.successes;
    total.trials += p.trials;
  }
  return total;
}

namespace detail {

inline std::unique_ptr<ExtractionStrategy> config_strategy(
    const ExperimentConfig& cfg, std::vector<GroupElem> known_bits = {}) {
  StrategyParams p;
  p.n = cfg.n_sz();
  p.k = cfg.k;
  p.length = cfg.r_u32();
  p.seed = cfg.seed ^ 0x51a7e6f00dULL;
  p.known_bits = std::move(known_bits);
  return make_strategy(cfg.strategy, p);
}

}  // namespace detail

inline RunReport run(const ExperimentConfig& cfg);

// One run per value of `axis`; rows merged in order.
inline std::vector<RunReport> sweep(const ExperimentConfig& base,
                                    const std::string& axis,
                                    const std::vector<double>& values) {
  std::vector<RunReport> out;
  for (double v : values) {
    ExperimentConfig c = base;
    if (axis == "n")
      c.n = v;
    else if (axis == "r")
      c.r = v;
    else if (axis == "k")
      c.k = static_cast<std::uint64_t>(v);
    else if (axis == "t")
      c.t = static_cast<std::uint64_t>(v);
    else if (axis == "m")
      c.m = static_cast<std::uint32_t>(v);
    else if (axis == "s")
      c.s = static_cast<std::uint64_t>(v);
    else if (axis == "trials")
      c.trials = static_cast<std::uint64_t>(v);
    else if (axis == "seed")
      c.seed = static_cast<std::uint64_t>(v);
    else
      throw contract_error("sweep: unknown axis " + axis);
    out.push_back(run(c));
  }
  return out;
}

inline RunReport run(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  rep.config = cfg;

  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) throw contract_error("config: " + msg);
  };
  require(!cfg.mode.empty(), "mode is required");

  if (cfg.mode == "bounds") {
    require(cfg.n > 0 && cfg.k > 0, "bounds needs n, k");
    const BoundReport b = theorem_bounds(static_cast<double>(cfg.t), cfg.n,
                                         static_cast<double>(cfg.k), cfg.r);
    rep.extra = {{"epsilon_closed", b.epsilon_closed},
                 {"epsilon_exact", b.epsilon_exact},
                 {"observation_bound", b.observation_bound},
                 {"view_bound_closed", b.view_bound_closed},
                 {"view_bound_exact", b.view_bound_exact},
                 {"guess_bound_closed", b.guess_bound_closed},
                 {"guess_bound_exact", b.guess_bound_exact},
                 {"everlasting_bound_closed", b.everlasting_bound_closed},
                 {"everlasting_bound_exact", b.everlasting_bound_exact},
                 {"vacuous_closed", b.vacuous_closed},
                 {"vacuous_exact", b.vacuous_exact}};
    ResultRow row{b.n, b.k, b.r, b.t, "-", b.view_bound_closed, 0, 0,
                  b.view_bound_exact, b.view_bound_closed, true};
    rep.rows.push_back(row);
  } else if (cfg.mode == "exact-distance") {
    require(cfg.n >= 1 && cfg.k >= 1 && cfg.r >= 0, "needs n, k, r");
    const auto strat = detail::config_strategy(cfg);
    const double dist = exact_joint_distance(
        *strat, static_cast<std::uint32_t>(cfg.n),
        static_cast<std::uint32_t>(cfg.k), cfg.r_u32());
    const double be = epsilon_exact(cfg.n, static_cast<double>(cfg.k), cfg.r);
    const double bc = epsilon_closed(cfg.n, static_cast<double>(cfg.k), cfg.r);
    ResultRow row{cfg.n, double(cfg.k), cfg.r, 1, strat->name(),
                  dist,  dist,          dist,  be, bc, dist <= be + 1e-9};
    rep.rows.push_back(row);
  } else if (cfg.mode == "bias-check") {
    require(cfg.n >= 1 && cfg.k >= 1, "needs n, k");
    const auto nn = static_cast<std::uint32_t>(cfg.n);
    const auto kk = static_cast<std::uint32_t>(cfg.k);
    RngStream rng(cfg.seed);
    std::uint64_t violations = 0;
    double worst_ratio = 0;
    for (std::uint64_t i = 0; i < cfg.trials; ++i) {
      const FTable f = random_ftable(nn, rng, i % 4 == 0 ? 0.9 : 0.0);
      const double lhs = bias_sq_sum(f, kk);
      const double rhs = bias_bound(kk, f.mass());
      worst_ratio = std::max(worst_ratio, lhs / rhs);
      if (lhs > rhs * (1 + 1e-9)) ++violations;
    }
    rep.extra = {{"violations", violations}, {"worst_ratio", worst_ratio}};
    ResultRow row{cfg.n, double(cfg.k), 0, 0, "-", worst_ratio, 0, 0,
                  1.0,   1.0,           violations == 0};
    rep.rows.push_back(row);
  } else if (cfg.mode == "simulate-db") {
    require(cfg.n >= 1 && cfg.k >= 1 && cfg.r >= 1, "needs n, k, r");
    const auto strat = detail::config_strategy(cfg);
    std::vector<GroupElem> bits(cfg.t, 0);
    const double dist = simulator_view_distance(
        *strat, static_cast<std::uint32_t>(cfg.n),
        static_cast<std::uint32_t>(cfg.k), static_cast<std::uint32_t>(cfg.t),
        bits);
    const double be = 2 * cfg.t *
                      epsilon_exact(cfg.n, static_cast<double>(cfg.k), cfg.r);
    const double bc = 2 * cfg.t *
                      epsilon_closed(cfg.n, static_cast<double>(cfg.k), cfg.r);
    ResultRow row{cfg.n, double(cfg.k), cfg.r, double(cfg.t), strat->name(),
                  dist,  dist,          dist,  be, bc, dist <= be + 1e-9};
    rep.rows.push_back(row);
  } else if (cfg.mode == "everlasting") {
    require(cfg.n >= 1 && cfg.k >= 1 && cfg.r >= 1 && cfg.t >= 1,
            "needs n, k, r, t");
    const auto strat = detail::config_strategy(cfg);
    AdvantageEstimate est;
    const ExperimentTally tally = run_sharded(
        cfg.trials, cfg.jobs, [&](std::uint64_t first, std::uint64_t count) {
          return everlasting_experiment(cfg.n_sz(), cfg.k, cfg.r_u32(), cfg.t,
                                        *strat, count, cfg.seed, first)
              .tally;
        });
    est.tally = tally;
    est.advantage = tally.rate() - 0.5;
    est.sigma = binomial_sigma(0.5, tally.trials);
    const double be = 2 * cfg.t *
                          epsilon_exact(cfg.n, double(cfg.k), cfg.r) +
                      3 * est.sigma;
    const double bc = 2 * cfg.t *
                          epsilon_closed(cfg.n, double(cfg.k), cfg.r) +
                      3 * est.sigma;
    ResultRow row{cfg.n, double(cfg.k), cfg.r, double(cfg.t), strat->name(),
                  est.advantage, est.advantage - 3 * est.sigma,
                  est.advantage + 3 * est.sigma, be, bc,
                  est.advantage <= be};
    rep.rows.push_back(row);
  } else if (cfg.mode == "parity-stream") {
    require(cfg.n >= 1 && cfg.k >= 1 && cfg.t >= 1, "needs n, k, t");
    const ExperimentTally tally = run_sharded(
        cfg.trials, cfg.jobs, [&](std::uint64_t first, std::uint64_t count) {
          return stream_parity_experiment(cfg.n_sz(), cfg.k, cfg.t,
                                          cfg.r_u32(), cfg.strategy, count,
                                          cfg.seed, first);
        });
    const double inv_binom =
        std::exp(-log_binomial(cfg.n, static_cast<double>(cfg.k)));
    const double be =
        inv_binom + 2 * cfg.t * epsilon_closed(cfg.n, double(cfg.k), cfg.r);
    const McComparison mc = compare_to_bound(tally.successes, tally.trials, be);
    ResultRow row{cfg.n, double(cfg.k), cfg.r, double(cfg.t), cfg.strategy,
                  mc.estimate, mc.ci_lo, mc.ci_hi, be, be, mc.pass};
    rep.rows.push_back(row);
  } else if (cfg.mode == "multiuser-check") {
    require(cfg.n >= 1 && cfg.k >= 1 && cfg.s >= 1, "needs n (=N), k, s");
    RngStream rng(cfg.seed);
    const KeyRegistry registry =
        allocate_disjoint_keys(cfg.n_sz(), cfg.k, cfg.s, rng);
    std::vector<GroupElem> values(cfg.s);
    for (auto& v : values) v = static_cast<GroupElem>(rng.next_below(cfg.m));
    const Rational tv =
        multiuser_marginal_check(registry, values, GroupModulus(cfg.m));
    const double tvd = static_cast<double>(tv);
    ResultRow row{cfg.n, double(cfg.k), 0, 0, "-", tvd, tvd, tvd, 0, 0,
                  tv == 0};
    rep.rows.push_back(row);
  } else if (cfg.mode == "otp-demo") {
    require(cfg.n >= 1 && cfg.k >= 1, "needs n, k");
    RngStream rng(cfg.seed);
    std::uint64_t in_epoch_ok = 0, cross_epoch_ok = 0;
    std::ostringstream channel;
    for (std::uint64_t i = 0; i < cfg.trials; ++i) {
      OtpSession s = otp_setup(cfg.n_sz(), cfg.k, 1, 4 * cfg.k * 2,
                               rng.substream(i));
      const GroupElem b = rng.next_bit() ? 1 : 0;
      const PublicMessage msg = otp_encrypt(s, 0, b);
      if (i < 16) channel << msg.to_json_line() << "\n";
      if (otp_decrypt(s, msg) == b) ++in_epoch_ok;
      s.database.rerandomize();  // new epoch, slot usable again
      const PublicMessage msg2 = otp_encrypt(s, 0, b);
      s.database.rerandomize();  // pad refreshed before Bob reads
      if (otp_decrypt(s, msg2) == b) ++cross_epoch_ok;
    }
    const double in_rate = double(in_epoch_ok) / double(cfg.trials);
    const double cross_rate = double(cross_epoch_ok) / double(cfg.trials);
    rep.extra = {{"in_epoch_decode_rate", in_rate},
                 {"cross_epoch_decode_rate", cross_rate},
                 {"channel_sample", channel.str()}};
    ResultRow row{cfg.n, double(cfg.k), 0, 0, "otp", in_rate, cross_rate,
                  cross_rate, 1.0, 1.0, in_rate == 1.0};
    rep.rows.push_back(row);
  } else if (cfg.mode == "otp-eavesdrop") {
    require(cfg.n >= 1 && cfg.k >= 1, "needs n, k");
    const ExperimentTally tally = run_sharded(
        cfg.trials, cfg.jobs, [&](std::uint64_t first, std::uint64_t count) {
          return otp_eavesdropper_experiment(cfg.n_sz(), cfg.k, cfg.r_u32(),
                                             count, cfg.seed, first)
              .tally;
        });
    const double sigma = binomial_sigma(0.5, tally.trials);
    const double adv = tally.rate() - 0.5;
    const double be =
        2 * epsilon_exact(cfg.n, double(cfg.k), cfg.r) + 3 * sigma;
    ResultRow row{cfg.n, double(cfg.k), cfg.r, 1, "eavesdropper",
                  adv,   adv - 3 * sigma, adv + 3 * sigma, be, be, adv <= be};
    rep.rows.push_back(row);
  } else {
    throw contract_error("config: unknown mode " + cfg.mode);
  }

  for (const auto& row : rep.rows) rep.pass = rep.pass && row.pass;
  rep.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();

  if (!cfg.output.empty()) {
    std::ofstream out(cfg.output);
    if (!out) throw contract_error("cannot open output file " + cfg.output);
    if (cfg.format == "csv")
      out << rep.to_csv();
    else
      out << rep.to_json().dump(2) << "\n";
  }
  return rep;
}

}  // namespace rerandb
