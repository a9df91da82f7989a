#include "hurstlab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "hurstlab/error.hpp"
#include "hurstlab/estimators.hpp"
#include "hurstlab/mc.hpp"
#include "hurstlab/sessions.hpp"
#include "hurstlab/stable.hpp"

namespace hurstlab::cli {

namespace {

void add_estimator_options(CLI::App* app, EstimatorConfig& cfg) {
  app->add_option("--scale-base", cfg.scale_base,
                  "Base b of the R/S and MF-DFA window sizes b^p")
      ->capture_default_str();
  app->add_option("--min-scale", cfg.min_scale, "Smallest R/S and MF-DFA window")
      ->capture_default_str();
  app->add_option("--max-scale-fraction", cfg.max_scale_fraction,
                  "Largest R/S and MF-DFA window as a fraction of the series length (1/4)")
      ->capture_default_str();
  app->add_option("--dma-lambda-min", cfg.dma_lambda_min, "Smallest DMA moving-average window")
      ->capture_default_str();
  app->add_option("--dma-lambda-max", cfg.dma_lambda_max, "Largest DMA moving-average window")
      ->capture_default_str();
  app->add_option("--ghe-tau-min", cfg.ghe_tau_min, "Smallest GHE lag")->capture_default_str();
  app->add_option("--ghe-tau-max", cfg.ghe_tau_max, "Largest GHE lag")->capture_default_str();
  app->add_option("--detrend-order", cfg.detrend_order,
                  "MF-DFA detrending polynomial order (only 1 is supported)")
      ->capture_default_str();
}

// Writes to --out when given, else to the command's stdout stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw DomainError(fmt::format("cannot open output file '{}'", path));
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw DomainError("failed writing output");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

// Opens --input or falls back to stdin.
class Source {
 public:
  Source(const std::string& path, bool use_stdin, std::istream& in) : stream_(&in) {
    if (!path.empty() && use_stdin) {
      throw CLI::ValidationError("--input and --stdin are mutually exclusive");
    }
    if (!path.empty()) {
      file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*file_) throw DomainError(fmt::format("cannot open input file '{}'", path));
      stream_ = file_.get();
    } else if (!use_stdin) {
      throw CLI::ValidationError("one of --input or --stdin is required");
    }
    name_ = path.empty() ? "<stdin>" : path;
  }
  std::istream& get() { return *stream_; }
  const std::string& name() const { return name_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* stream_;
  std::string name_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_value(std::string_view text, const std::string& source, std::size_t line) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw DomainError(fmt::format("{}:{}: cannot parse '{}' as a number", source, line, text));
  }
  return v;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.emplace_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// One number per line, or one CSV column selected by header name.
Series read_series(std::istream& in, const std::string& source, const std::string& column) {
  Series values;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> col;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!column.empty() && !col) {
      const auto header = split_commas(line);
      const auto it = std::find(header.begin(), header.end(), column);
      if (it == header.end()) {
        throw FormatError(fmt::format("{}: header lacks column '{}'", source, column));
      }
      col = static_cast<std::size_t>(it - header.begin());
      continue;
    }
    if (col) {
      const auto fields = split_commas(line);
      if (*col >= fields.size()) {
        throw FormatError(fmt::format("{}:{}: missing column '{}'", source, line_no, column));
      }
      values.push_back(parse_value(fields[*col], source, line_no));
    } else {
      values.push_back(parse_value(line, source, line_no));
    }
  }
  if (values.empty()) throw EmptyInputError(fmt::format("{}: no observations", source));
  return values;
}

Seed resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return Seed{*flag};
  if (const char* env = std::getenv("HURSTLAB_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) {
      throw CLI::ValidationError(fmt::format("HURSTLAB_SEED='{}' is not an unsigned integer", s));
    }
    return Seed{v};
  }
  return Seed{0};
}

// Progress lines on stderr at every 5% step. Called from worker threads.
class Progress {
 public:
  Progress(std::ostream& err, std::string label, bool quiet)
      : err_(err), label_(std::move(label)), quiet_(quiet) {}

  void operator()(std::size_t done, std::size_t total) {
    if (quiet_ || total == 0) return;
    const std::size_t pct = done * 100 / total;
    std::lock_guard lock(mutex_);
    if (pct >= next_pct_ || done == total) {
      fmt::print(err_, "{}: {}/{} ({}%)\n", label_, done, total, pct);
      next_pct_ = (pct / 5 + 1) * 5;
    }
  }

 private:
  std::ostream& err_;
  std::string label_;
  bool quiet_;
  std::mutex mutex_;
  std::size_t next_pct_ = 5;
};

// Method names come from the command line, so a bad one is a usage error.
MethodSpec method_arg(const std::string& text) {
  try {
    return parse_method(text);
  } catch (const ParameterError& e) {
    throw CLI::ValidationError(e.what());
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Hurst exponent estimation under heavy tails: simulation, estimation, "
               "Monte Carlo tables and per-session analysis",
               "hurstlab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // simulate
  StableParams sim_params;
  std::size_t sim_length = 0;
  std::optional<std::uint64_t> sim_seed;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Draw i.i.d. stable variates, one per line");
  simulate->add_option("--alpha", sim_params.alpha, "Stability exponent in (0, 2]")->required();
  simulate->add_option("--beta", sim_params.beta, "Skewness in [-1, 1]")->capture_default_str();
  simulate->add_option("--gamma", sim_params.gamma, "Scale > 0")->capture_default_str();
  simulate->add_option("--delta", sim_params.delta, "Location")->capture_default_str();
  simulate->add_option("--length", sim_length, "Number of variates")->required();
  simulate->add_option("--seed", sim_seed, "Seed (fallback: $HURSTLAB_SEED, then 0)");
  simulate->add_option("--out", sim_out, "Output file (default stdout)");

  // estimate
  EstimatorConfig est_cfg;
  std::string est_method;
  std::optional<double> est_q;
  std::string est_input;
  std::string est_column;
  bool est_stdin = false;
  bool est_points = false;
  std::string est_out;
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate the Hurst exponent of a series of increments");
  estimate_cmd->add_option("--method", est_method, "rs | dma | dfa | mfdfa[:q] | ghe[:q]")->required();
  estimate_cmd->add_option("--q", est_q, "Moment order for mfdfa and ghe (default 2)");
  estimate_cmd->add_option("--input", est_input, "Input file: one value per line, or CSV with --column");
  estimate_cmd->add_flag("--stdin", est_stdin, "Read the series from stdin");
  estimate_cmd->add_option("--column", est_column, "CSV column holding the increments");
  estimate_cmd->add_flag("--points", est_points, "Emit the log-log regression points instead of the estimate");
  estimate_cmd->add_option("--out", est_out, "Output file (default stdout)");
  add_estimator_options(estimate_cmd, est_cfg);

  // mc-grid
  McConfig mc;
  std::vector<std::string> mc_methods{"rs", "dma", "mfdfa:1", "mfdfa:2", "ghe:1", "ghe:2"};
  std::optional<std::uint64_t> mc_seed;
  std::string mc_out;
  unsigned mc_threads = 0;
  bool mc_quiet = false;
  auto* grid = app.add_subcommand("mc-grid", "Monte Carlo tables of estimator mean and 2.5%/97.5% quantiles");
  grid->add_option("--alphas", mc.alphas, "Stability exponents in (1, 2]")
      ->delimiter(',')
      ->capture_default_str();
  grid->add_option("--log2-lengths", mc.log2_lengths, "Series lengths as powers of two")
      ->delimiter(',')
      ->capture_default_str();
  grid->add_option("--reps", mc.replications, "Replications per cell")->capture_default_str();
  grid->add_option("--methods", mc_methods, "Methods, name[:q]")->delimiter(',')->capture_default_str();
  grid->add_option("--seed", mc_seed, "Master seed (fallback: $HURSTLAB_SEED, then 0)");
  grid->add_option("--out", mc_out, "Output CSV (default stdout)");
  grid->add_option("--threads", mc_threads, "Worker threads, 0 = all cores")->capture_default_str();
  grid->add_flag("--quiet", mc_quiet, "No progress on stderr");
  add_estimator_options(grid, mc.estimator_config);

  // sessions
  SessionOptions ses;
  ColumnSpec columns;
  std::string ses_input;
  bool ses_stdin = false;
  std::string ses_granularity = "day";
  std::string ses_method = "ghe:2";
  std::string ses_returns = "log";
  std::optional<std::size_t> ses_min_obs;
  std::string ses_out;
  unsigned ses_threads = 0;
  bool ses_quiet = false;
  auto* sessions = app.add_subcommand("sessions", "Per-day or per-month Hurst exponents from tick data");
  sessions->add_option("--input", ses_input, "Tick CSV with a header row");
  sessions->add_flag("--stdin", ses_stdin, "Read ticks from stdin");
  sessions->add_option("--timestamp-column", columns.timestamp_column, "Timestamp column name")
      ->capture_default_str();
  sessions->add_option("--price-column", columns.price_column, "Price column name")->capture_default_str();
  sessions->add_option("--timestamp-format", columns.timestamp_format,
                       "strptime-style format; ISO-8601 when omitted");
  sessions->add_option("--granularity", ses_granularity, "day | month")
      ->check(CLI::IsMember({"day", "month"}))
      ->capture_default_str();
  sessions->add_option("--method", ses_method, "rs | dma | dfa | mfdfa[:q] | ghe[:q]")->capture_default_str();
  sessions->add_option("--returns", ses_returns, "log | simple")
      ->check(CLI::IsMember({"log", "simple"}))
      ->capture_default_str();
  sessions->add_option("--min-obs", ses_min_obs, "Minimum returns per session (default 128 day, 1024 month)");
  sessions->add_option("--out", ses_out, "Output CSV (default stdout)");
  sessions->add_option("--threads", ses_threads, "Worker threads, 0 = all cores")->capture_default_str();
  sessions->add_flag("--quiet", ses_quiet, "No diagnostics on stderr");
  add_estimator_options(sessions, ses.estimator_config);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    if (simulate->parsed()) {
      const Series xs = sample_stable(sim_params, sim_length, resolve_seed(sim_seed));
      Sink sink(sim_out, out);
      for (double x : xs) fmt::print(sink.get(), "{}\n", x);
      sink.finish();
    } else if (estimate_cmd->parsed()) {
      MethodSpec spec = method_arg(est_method);
      if (est_q) {
        if (spec.method == Method::RS || spec.method == Method::DMA) {
          throw CLI::ValidationError("--q applies only to mfdfa and ghe");
        }
        if (!(*est_q > 0.0)) throw CLI::ValidationError("--q must be positive");
        spec.q = *est_q;
      }
      Source src(est_input, est_stdin, in);
      const Series xs = read_series(src.get(), src.name(), est_column);
      const HurstEstimate e = estimate(xs, spec, est_cfg);
      Sink sink(est_out, out);
      if (est_points) {
        sink.get() << "log_scale,log_fluctuation\n";
        for (const auto& p : e.fit.points) {
          fmt::print(sink.get(), "{},{}\n", p.log_scale, p.log_fluctuation);
        }
      } else {
        sink.get() << "method,q,hurst,r_squared,intercept,n_points,n_obs\n";
        fmt::print(sink.get(), "{},{},{:.6f},{:.6f},{:.6f},{},{}\n", method_name(spec.method), spec.q,
                   e.hurst, e.fit.r_squared, e.fit.intercept, e.fit.points.size(), xs.size());
      }
      sink.finish();
    } else if (grid->parsed()) {
      mc.methods.clear();
      for (const auto& m : mc_methods) mc.methods.push_back(method_arg(m));
      mc.master_seed = resolve_seed(mc_seed);
      Progress progress(err, "mc-grid", mc_quiet);
      McRunOptions options;
      options.threads = mc_threads;
      options.progress = [&](std::size_t d, std::size_t t) { progress(d, t); };
      const McTable table = run_grid(mc, options);
      for (const McCell& c : table.cells) {
        if (c.n_failed > 0) {
          fmt::print(err, "mc-grid: alpha={} 2^{} {}: {} replication(s) failed\n", c.alpha,
                     c.log2_length, format_method(c.method), c.n_failed);
        }
      }
      Sink sink(mc_out, out);
      write_mc_csv(sink.get(), table);
      sink.finish();
    } else if (sessions->parsed()) {
      ses.granularity = ses_granularity == "month" ? Granularity::Month : Granularity::Day;
      ses.method = method_arg(ses_method);
      ses.return_mode = ses_returns == "simple" ? ReturnMode::Simple : ReturnMode::Log;
      ses.min_obs = ses_min_obs;
      ses.threads = ses_threads;
      Source src(ses_input, ses_stdin, in);
      const TickLoad load = load_ticks(src.get(), columns);
      for (const RowRejection& r : load.rejections) {
        fmt::print(err, "{}:{}: rejected: {}\n", src.name(), r.line, r.reason);
      }
      const auto rows = session_hurst_series(load.ticks, ses);
      if (!ses_quiet) {
        for (const SessionHurst& r : rows) {
          if (!r.ok()) fmt::print(err, "session {} skipped: {}\n", r.key.label, r.skip_reason);
        }
      }
      Sink sink(ses_out, out);
      write_sessions_csv(sink.get(), rows);
      sink.finish();
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitData;
  }
  return kExitOk;
}

}  // namespace hurstlab::cli
