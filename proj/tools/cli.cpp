#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "phasetype/distributions.hpp"
#include "phasetype/errors.hpp"
#include "phasetype/fit.hpp"
#include "phasetype/format.hpp"
#include "phasetype/gof.hpp"
#include "phasetype/identity_lab.hpp"
#include "phasetype/phase_sim.hpp"
#include "phasetype/sample_io.hpp"

namespace phasetype::cli {

namespace {

using Record = nlohmann::ordered_json;

// Usage problems found after CLI11 parsing (missing family parameters etc.).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { text, structured };

// One record per line: "key=value ..." in text mode, a JSON object in
// structured mode.
class Emitter {
 public:
  Emitter(std::ostream& out, Format format) : out_(out), format_(format) {}

  void emit(const Record& r) {
    if (format_ == Format::structured) {
      out_ << r.dump() << '\n';
      return;
    }
    bool first = true;
    for (const auto& [key, value] : r.items()) {
      if (key == "record") continue;
      out_ << (first ? "" : " ") << key << '=' << text(value);
      first = false;
    }
    out_ << '\n';
  }

 private:
  static std::string text(const nlohmann::ordered_json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }

  std::ostream& out_;
  Format format_;
};

struct DistOptions {
  std::string family;
  std::optional<double> lambda;
  std::optional<int> n;
  std::optional<double> w;
  std::vector<double> rates;
  std::string params_file;

  void attach(CLI::App* sub) {
    sub->add_option("--dist", family, "Family: exp, erlang, hypo, eme")
        ->check(CLI::IsMember({"exp", "erlang", "hypo", "eme"}));
    sub->add_option("--lambda", lambda, "Rate (exp, erlang, eme)");
    sub->add_option("--n", n, "Stage count (erlang, eme)");
    sub->add_option("--w", w, "Multiplier of the odd stage (eme)");
    sub->add_option("--rates", rates, "Comma-separated distinct rates (hypo)")->delimiter(',');
    sub->add_option("--params", params_file, "JSON parameter file instead of --dist flags");
  }

  Distribution build() const {
    if (!params_file.empty()) return io::read_params(params_file);
    if (family.empty()) throw UsageError("--dist or --params is required");
    auto need = [&](const auto& opt, const char* flag) {
      if (!opt) throw UsageError(std::string(flag) + " is required for --dist " + family);
      return *opt;
    };
    if (family == "exp") return ExpParams(need(lambda, "--lambda"));
    if (family == "erlang") {
      const int stages = need(n, "--n");
      return ErlangParams(stages, need(lambda, "--lambda"));
    }
    if (family == "eme") {
      const int stages = need(n, "--n");
      const double rate = need(lambda, "--lambda");
      return EMEParams(stages, rate, need(w, "--w"));
    }
    if (rates.empty()) throw UsageError("--rates is required for --dist hypo");
    return RateVector(rates);
  }
};

struct InputOptions {
  std::string path;
  std::string column;

  void attach(CLI::App* sub) {
    sub->add_option("--in", path, "Sample file (one value per line, or CSV with --column)")->required();
    sub->add_option("--column", column, "Column name when --in is a CSV file with a header row");
  }

  SampleBatch load() const { return column.empty() ? io::read_samples(path) : io::read_samples_csv(path, column); }
};

Record params_record(const char* record, const Distribution& d) {
  Record r;
  r["record"] = record;
  const nlohmann::json params = io::to_json(d);
  for (const auto& [k, v] : params.items()) r[k] = v;
  return r;
}

void write_batch(const std::string& path, const SampleBatch& batch, std::ostream& out) {
  if (path.empty() || path == "-") {
    io::write_samples(out, batch);
  } else {
    io::write_samples(path, batch);
  }
}

std::string describe_rates(std::span<const double> rates) {
  std::string s;
  for (std::size_t i = 0; i < rates.size(); ++i) s += (i ? "," : "") + format_double(rates[i]);
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase-type distribution toolkit: hypoexponential and EME laws, identity checks, exponentiality test"};
  app.set_config("--config", "", "Key-value config file; flags override it");
  app.require_subcommand(1);

  std::string format_name = "text";
  std::uint64_t seed = kDefaultSeed;
  app.add_option("--format", format_name, "Output format")->check(CLI::IsMember({"text", "structured"}));
  app.add_option("--seed", seed, "Root seed for every random stream")->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate pdf/cdf (and optionally the Laplace transform)");
  DistOptions eval_dist;
  eval_dist.attach(eval);
  std::vector<double> xs, ts;
  eval->add_option("--x", xs, "Comma-separated evaluation points")->delimiter(',')->required();
  eval->add_option("--t", ts, "Comma-separated Laplace arguments")->delimiter(',');

  // sample
  auto* samp = app.add_subcommand("sample", "Draw a sample");
  DistOptions samp_dist;
  samp_dist.attach(samp);
  std::size_t count = 1000;
  std::string out_path, params_out;
  samp->add_option("--count", count, "Number of draws")->check(CLI::PositiveNumber);
  samp->add_option("--out", out_path, "Output sample file (default stdout)");
  samp->add_option("--params-out", params_out, "Also write the parameter record here");

  // fit
  auto* fit = app.add_subcommand("fit", "Maximum-likelihood EME fit");
  InputOptions fit_in;
  fit_in.attach(fit);
  std::string fit_family = "eme";
  std::optional<int> fit_n, fit_search;
  std::string fit_params_out;
  fit->add_option("--family", fit_family, "Family to fit")->check(CLI::IsMember({"eme"}));
  auto* fit_n_opt = fit->add_option("--n", fit_n, "Fixed stage count");
  fit->add_option("--search", fit_search, "Try n = 1..N and keep the best")->excludes(fit_n_opt);
  fit->add_option("--params-out", fit_params_out, "Write the fitted parameter record here");

  // gof
  auto* gof_cmd = app.add_subcommand("gof", "Goodness-of-fit test for exponentiality");
  InputOptions gof_in;
  gof_in.attach(gof_cmd);
  gof::GofConfig gcfg;
  std::string residuals_path;
  bool omit_runtime = false;
  gof_cmd->add_option("--n", gcfg.n, "Stage count of the identity")->capture_default_str();
  gof_cmd->add_option("--w", gcfg.w, "Multiplier of the odd stage")->capture_default_str();
  gof_cmd->add_option("--B", gcfg.bootstrap_reps, "Bootstrap replicates (>= 99)")->capture_default_str();
  gof_cmd->add_option("--alpha", gcfg.level, "Test level")->capture_default_str();
  gof_cmd->add_option("--grid-points", gcfg.grid_points, "Grid nodes on (0, 10]")->capture_default_str();
  gof_cmd->add_option("--grid-decay", gcfg.grid_decay, "Weight exp(-c t)")->capture_default_str();
  gof_cmd->add_option("--residuals", residuals_path, "Write the (t, D(t)) table here");
  gof_cmd->add_flag("--omit-runtime", omit_runtime, "Leave the wall-clock field out of the report");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the identity suites");
  std::optional<int> verify_max_n;
  std::string sweep_name = "default";
  verify->add_option("--max-n", verify_max_n, "Upper n for the lemma and bracket sweeps");
  verify->add_option("--sweep", sweep_name, "Sweep size")->check(CLI::IsMember({"default", "quick"}));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate absorption times of a sequential stage chain");
  std::vector<double> stages;
  std::optional<int> sim_k;
  std::optional<double> sim_l1, sim_l2;
  std::size_t sim_count = 100000;
  std::string sim_out;
  bool sim_validate = false;
  simulate->add_option("--stages", stages, "Comma-separated stage rates")->delimiter(',');
  simulate->add_option("--k", sim_k, "EME chain: number of lambda1 stages");
  simulate->add_option("--lambda1", sim_l1, "EME chain: common rate");
  simulate->add_option("--lambda2", sim_l2, "EME chain: rate of the final stage");
  simulate->add_option("--count", sim_count, "Number of absorption times")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim_out, "Write the times to this sample file");
  simulate->add_flag("--validate", sim_validate, "KS comparison against the analytic law");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  Emitter emit(out, format_name == "structured" ? Format::structured : Format::text);

  try {
    if (*eval) {
      const Distribution d = eval_dist.build();
      for (double x : xs) {
        Record r;
        r["record"] = "eval";
        r["x"] = x;
        r["pdf"] = pdf(d, x);
        r["cdf"] = cdf(d, x);
        emit.emit(r);
      }
      for (double t : ts) {
        Record r;
        r["record"] = "laplace";
        r["t"] = t;
        r["laplace"] = laplace(d, t);
        emit.emit(r);
      }
      return kExitOk;
    }

    if (*samp) {
      const Distribution d = samp_dist.build();
      RandomStream rng(seed, {stream_key("sample")});
      const SampleBatch batch = sample(d, count, rng);
      write_batch(out_path, batch, out);
      if (!params_out.empty()) io::write_params(params_out, d);
      return kExitOk;
    }

    if (*fit) {
      if (!fit_n && !fit_search) throw UsageError("fit needs --n or --search");
      const SampleBatch data = fit_in.load();
      const EmeFit f = fit_n ? fit_eme_mle(data, *fit_n) : fit_eme_mle_search(data, *fit_search);
      Record r = params_record("fit", f.params);
      r["log_likelihood"] = f.log_likelihood;
      r["start_log_likelihood"] = f.start_log_likelihood;
      r["iterations"] = f.iterations;
      r["count"] = data.size();
      emit.emit(r);
      if (!fit_params_out.empty()) io::write_params(fit_params_out, f.params);
      return kExitOk;
    }

    if (*gof_cmd) {
      gcfg.seed = seed;
      gcfg.validate();
      const SampleBatch data = gof_in.load();
      const auto start = std::chrono::steady_clock::now();
      const gof::GofResult res = gof::gof_test(data, gcfg);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      Record r;
      r["record"] = "gof";
      r["statistic"] = res.statistic;
      r["p_value"] = res.p_value;
      r["lambda_hat"] = res.lambda_hat;
      r["n"] = gcfg.n;
      r["w"] = gcfg.w;
      r["B"] = gcfg.bootstrap_reps;
      r["alpha"] = gcfg.level;
      r["seed"] = seed;
      r["reject"] = res.reject;
      r["count"] = data.size();
      if (!omit_runtime) r["runtime_s"] = elapsed.count();
      r["method"] = "eme-identity-laplace-residual;weight=exp(-c*t);grid=(0,10];calibration=parametric-bootstrap";
      emit.emit(r);
      if (!residuals_path.empty()) {
        std::ofstream table(residuals_path);
        if (!table) throw InvalidParameter("cannot write " + residuals_path);
        table << "t,residual\n";
        for (const auto& [t, d] : gof::residual_table(data, gcfg)) table << format_double(t) << ',' << format_double(d) << '\n';
      }
      return kExitOk;
    }

    if (*verify) {
      identity::VerifySweep sweep = sweep_name == "quick" ? identity::VerifySweep::quick() : identity::VerifySweep{};
      if (verify_max_n) {
        if (*verify_max_n < 2) throw UsageError("--max-n must be >= 2");
        sweep.lemma2_max_n = *verify_max_n;
        sweep.bracket_max_n = *verify_max_n;
      }
      sweep.seed = seed;
      const identity::VerifyReport rep = identity::run_verification(sweep);
      for (const auto& f : rep.families) {
        Record r;
        r["record"] = "identity";
        r["family"] = f.name;
        r["arithmetic"] = f.exact ? "exact" : "floating";
        r["checks"] = f.checks;
        r["passed"] = f.checks - f.failures - f.refuted;
        r["failed"] = f.failures;
        r["boundary_cases"] = f.boundary_cases;
        r["refuted"] = f.refuted;
        if (!f.exact) {
          r["tolerance"] = f.tolerance;
          r["worst_residual"] = f.worst_residual;
          r["residual"] = f.relative_residual ? "relative" : "absolute";
        }
        r["sweep"] = f.sweep;
        emit.emit(r);
      }
      Record s;
      s["record"] = "summary";
      s["families"] = rep.families.size();
      s["checks"] = rep.total_checks();
      s["failures"] = rep.total_failures();
      s["refuted"] = rep.total_refuted();
      emit.emit(s);
      return rep.total_failures() == 0 ? kExitOk : kExitDomainError;
    }

    if (*simulate) {
      std::optional<sim::StageChain> chain;
      if (!stages.empty()) {
        if (sim_k || sim_l1 || sim_l2) throw UsageError("--stages excludes --k/--lambda1/--lambda2");
        chain = sim::StageChain(stages);
      } else if (sim_k && sim_l1 && sim_l2) {
        chain = sim::eme_chain(*sim_k, *sim_l1, *sim_l2);
      } else {
        throw UsageError("simulate needs --stages or all of --k, --lambda1, --lambda2");
      }
      SampleBatch times = sim::simulate_absorption(*chain, sim_count, seed);
      if (!sim_out.empty()) io::write_samples(sim_out, times);

      double mean = 0.0;
      for (double t : times.values) mean += t;
      mean /= static_cast<double>(times.size());
      double var = 0.0;
      for (double t : times.values) var += (t - mean) * (t - mean);
      var /= static_cast<double>(times.size() > 1 ? times.size() - 1 : 1);
      double exp_mean = 0.0, exp_var = 0.0;
      for (double rate : chain->rates()) {
        exp_mean += 1.0 / rate;
        exp_var += 1.0 / (rate * rate);
      }

      Record r;
      r["record"] = "simulate";
      r["stages"] = describe_rates(chain->rates());
      r["count"] = times.size();
      r["seed"] = seed;
      r["mean"] = mean;
      r["variance"] = var;
      r["expected_mean"] = exp_mean;
      r["expected_variance"] = exp_var;
      if (sim_validate) {
        const auto law = sim::absorption_law(*chain);
        if (!law) throw InvalidParameter("no implemented law covers this stage pattern");
        const sim::SimResult v = sim::validate_against(std::move(times), *law);
        r["reference"] = io::to_json(*law);
        r["ks_distance"] = v.ks_distance;
        r["ks_critical_1pct"] = v.critical_value;
        r["ks_pass"] = v.passed;
      }
      emit.emit(r);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
  return kExitUsage;
}

}  // namespace phasetype::cli
