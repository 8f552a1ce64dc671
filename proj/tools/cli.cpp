#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtlab/bounds.hpp"
#include "gtlab/decode.hpp"
#include "gtlab/errors.hpp"
#include "gtlab/io.hpp"
#include "gtlab/lp.hpp"
#include "gtlab/sim.hpp"

namespace gtlab::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw UsageError("invalid " + what + " '" + text + "'");
}

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw UsageError("invalid " + what + " '" + text + "'");
  }
  return value;
}

std::vector<double> parse_theta_range(const std::string& text) {
  const auto parts = split(text, ':');
  try {
    if (parts.size() == 1) return bounds::theta_grid(parse_double(parts[0], "theta"),
                                                     parse_double(parts[0], "theta"), 1.0);
    if (parts.size() == 3) {
      return bounds::theta_grid(parse_double(parts[0], "theta"), parse_double(parts[1], "theta"),
                                parse_double(parts[2], "theta step"));
    }
  } catch (const ParameterError& e) {
    throw UsageError(std::string("theta range: ") + e.what());
  }
  throw UsageError("theta range must be 'lo:hi:step' or a single value");
}

std::vector<std::size_t> parse_t_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {parse_count(parts[0], "t")};
  if (parts.size() != 3) throw UsageError("t range must be 'lo:hi:step' or a single value");
  const std::size_t lo = parse_count(parts[0], "t");
  const std::size_t hi = parse_count(parts[1], "t");
  const std::size_t step = parse_count(parts[2], "t step");
  if (step == 0 || lo == 0 || lo > hi) {
    throw UsageError("t range needs 0 < lo <= hi and step > 0");
  }
  std::vector<std::size_t> values;
  for (std::size_t t = lo; t <= hi; t += step) values.push_back(t);
  return values;
}

sim::PChoice parse_p(const std::string& text) {
  if (text == "auto") return sim::PChoice::reciprocal();
  if (text.rfind("nu:", 0) == 0) {
    const double nu = parse_double(text.substr(3), "nu");
    if (!(nu > 0.0)) throw UsageError("nu must be positive");
    return sim::PChoice::nu_over_k(nu);
  }
  const double p = parse_double(text, "p");
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("p must lie in [0, 1]");
  return sim::PChoice::explicit_p(p);
}

std::vector<sim::Decoder> parse_decoders(const std::string& text) {
  std::vector<sim::Decoder> decoders;
  for (const auto& name : split(text, ',')) {
    const auto decoder = sim::parse_decoder(name);
    if (!decoder) throw UsageError("unknown decoder '" + name + "'");
    if (std::find(decoders.begin(), decoders.end(), *decoder) != decoders.end()) {
      throw UsageError("decoder '" + name + "' listed twice");
    }
    decoders.push_back(*decoder);
  }
  return decoders;
}

TieRule::Kind parse_tie(const std::string& text) {
  if (text == "lowest") return TieRule::Kind::kLowestIndex;
  if (text == "random") return TieRule::Kind::kRandom;
  throw UsageError("tie rule must be 'lowest' or 'random'");
}

// Writes to --out when given, else to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InputError("cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct CommonOptions {
  std::string format = "csv";
  std::string out;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts, const std::vector<std::string>& formats) {
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember(formats))
      ->capture_default_str();
  cmd->add_option("--out", opts.out, "Output path (default stdout)");
  cmd->add_option("--seed", opts.seed, "Master seed")->capture_default_str();
}

int cmd_bounds(const std::string& theta_text, const std::string& curves_text,
               const CommonOptions& opts, std::ostream& out) {
  std::vector<std::string> requested = split(curves_text, ',');
  for (const auto& name : requested) {
    if (!bounds::is_curve_name(name)) throw UsageError("unknown curve '" + name + "'");
  }
  const auto thetas = parse_theta_range(theta_text);

  io::BoundsTable table;
  table.thetas = thetas;
  for (const auto& name : bounds::curve_names()) {
    if (std::find(requested.begin(), requested.end(), name) != requested.end()) {
      table.curves.push_back(bounds::sample_curve(name, thetas));
    }
  }
  table.crossovers = bounds::locate_crossovers();
  table.theta_star = bounds::theta_star();
  const auto plateau = bounds::dd_plateau();
  table.dd_plateau = plateau.value;
  table.dd_plateau_nu = plateau.nu;

  Sink sink(opts.out, out);
  if (opts.format == "json") {
    io::write_bounds_json(sink.stream(), table);
  } else {
    io::write_bounds_csv(sink.stream(), table);
  }
  return kOk;
}

struct SimulateOptions {
  std::size_t n = 0;
  std::size_t k = 0;
  std::string p = "auto";
  std::string t;
  long long trials = 1000;
  std::string decoders = "comp,dd,scomp,lp-malioutov";
  std::string tie = "lowest";
  unsigned threads = 1;
};

int cmd_simulate(const SimulateOptions& s, const CommonOptions& opts, std::ostream& out) {
  if (s.trials < 1) throw UsageError("--trials must be at least 1");
  sim::SweepConfig config;
  config.n = s.n;
  config.k = s.k;
  config.p_mode = parse_p(s.p);
  config.t_values = parse_t_range(s.t);
  config.trials = static_cast<std::size_t>(s.trials);
  config.decoders = parse_decoders(s.decoders);
  config.master_seed = opts.seed;
  config.threads = s.threads;
  config.tie = parse_tie(s.tie);
  try {
    config.validate();
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  const auto result = sim::run_sweep(config);
  Sink sink(opts.out, out);
  if (opts.format == "json") {
    io::write_sweep_json(sink.stream(), result);
  } else {
    io::write_sweep_csv(sink.stream(), result);
  }
  return kOk;
}

struct DecodeOptions {
  std::string design;
  std::string outcomes;
  std::string decoder = "dd";
  std::string tie = "lowest";
  std::string dump_lp;
};

std::string join(const ItemSet& set) {
  std::string text;
  for (const auto i : set) text += ' ' + std::to_string(i);
  return text;
}

int cmd_decode(const DecodeOptions& d, const CommonOptions& opts, std::ostream& out) {
  const auto decoder = sim::parse_decoder(d.decoder);
  if (!decoder) throw UsageError("unknown decoder '" + d.decoder + "'");
  const auto tie = parse_tie(d.tie);

  std::ifstream design_file(d.design);
  if (!design_file) throw InputError("cannot read design file '" + d.design + "'");
  const TestDesign design = io::read_design(design_file);
  std::ifstream outcome_file(d.outcomes);
  if (!outcome_file) throw InputError("cannot read outcomes file '" + d.outcomes + "'");
  const Outcomes outcomes = io::read_outcomes(outcome_file);
  check_dimensions(design, outcomes);
  if (*decoder == sim::Decoder::kOracle && design.items() > sim::kOracleMaxItems) {
    throw UsageError("the oracle decoder needs n <= " + std::to_string(sim::kOracleMaxItems));
  }

  if (!d.dump_lp.empty()) {
    std::ofstream dump(d.dump_lp);
    if (!dump) throw InputError("cannot open '" + d.dump_lp + "' for writing");
    write_lp_dump(dump, build_relaxation(design, outcomes));
  }

  sim::Instance instance{ItemSet{}, design, outcomes};
  const auto trial = sim::run_decoder(instance, *decoder, opts.seed, tie);
  const DecodeResult& r = trial.decode;
  const bool has_core = *decoder != sim::Decoder::kComp && *decoder != sim::Decoder::kOracle;

  Sink sink(opts.out, out);
  auto& os = sink.stream();
  if (opts.format == "json") {
    nlohmann::ordered_json doc;
    doc["decoder"] = d.decoder;
    doc["estimate"] = r.estimate.items();
    doc["satisfying"] = r.satisfying;
    if (has_core) doc["dd_core"] = r.dd_core.items();
    doc["possible_defectives"] = r.possible_defectives;
    doc["unexplained_tests"] = r.unexplained_tests;
    doc["failed"] = r.failed;
    if (r.failed) doc["failure"] = r.failure;
    os << doc.dump(2) << '\n';
  } else {
    os << "estimate:" << join(r.estimate) << '\n';
    os << "satisfying: " << (r.satisfying ? "true" : "false") << '\n';
    if (has_core) os << "dd_core:" << join(r.dd_core) << '\n';
    if (r.failed) os << "failure: " << r.failure << '\n';
  }
  return kOk;
}

struct AuditOptions {
  std::size_t n = 0;
  std::size_t k = 0;
  std::string p = "auto";
  std::size_t t = 0;
  long long trials = 1000;
  std::string oracle = "auto";
  unsigned threads = 1;
};

int cmd_audit(const AuditOptions& a, const CommonOptions& opts, std::ostream& out) {
  if (a.trials < 1) throw UsageError("--trials must be at least 1");
  if (a.n == 0 || a.t == 0 || a.k > a.n) throw UsageError("audit needs n >= 1, t >= 1, k <= n");
  sim::AuditOptions options;
  options.threads = a.threads;
  if (a.oracle == "on") {
    if (a.n > sim::kOracleMaxItems) {
      throw UsageError("the oracle needs n <= " + std::to_string(sim::kOracleMaxItems));
    }
    options.oracle = true;
  } else if (a.oracle == "off") {
    options.oracle = false;
  }
  const double p = parse_p(a.p).resolve(a.k);
  const auto report = sim::property_p_audit(a.n, a.k, p, a.t,
                                            static_cast<std::size_t>(a.trials), opts.seed, options);
  Sink sink(opts.out, out);
  if (opts.format == "json") {
    io::write_audit_json(sink.stream(), report);
  } else {
    io::write_audit_csv(sink.stream(), report);
  }
  return report.total_violations() == 0 ? kOk : kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group-testing decoders, rate bounds and Monte Carlo sweeps", "gtlab"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* bounds_cmd = app.add_subcommand("bounds", "Sample analytic rate curves");
  std::string theta_text = "0.01:0.99:0.01";
  std::string curves_text = "capacity,dd_lower,dd_upper,comp,lipo";
  bounds_cmd->add_option("--theta", theta_text, "Sparsity grid lo:hi:step")->capture_default_str();
  bounds_cmd->add_option("--curves", curves_text, "Comma-separated curve names")
      ->capture_default_str();
  add_common(bounds_cmd, common, {"csv", "json"});

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo success-probability sweep");
  SimulateOptions sim_opts;
  simulate_cmd->add_option("--n", sim_opts.n, "Number of items")->required();
  simulate_cmd->add_option("--k", sim_opts.k, "Number of defectives")->required();
  simulate_cmd->add_option("--p", sim_opts.p, "auto | nu:V | probability")->capture_default_str();
  simulate_cmd->add_option("--t", sim_opts.t, "Test counts lo:hi:step")->required();
  simulate_cmd->add_option("--trials", sim_opts.trials, "Trials per point")->capture_default_str();
  simulate_cmd->add_option("--decoders", sim_opts.decoders, "Comma-separated decoders")
      ->capture_default_str();
  simulate_cmd->add_option("--tie", sim_opts.tie, "SCOMP tie rule: lowest | random")
      ->capture_default_str();
  simulate_cmd->add_option("--threads", sim_opts.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  add_common(simulate_cmd, common, {"csv", "json"});

  auto* decode_cmd = app.add_subcommand("decode", "Decode one instance from files");
  DecodeOptions dec_opts;
  decode_cmd->add_option("--design", dec_opts.design, "Design file")->required();
  decode_cmd->add_option("--outcomes", dec_opts.outcomes, "Outcomes file")->required();
  decode_cmd->add_option("--decoder", dec_opts.decoder, "Decoder name")->capture_default_str();
  decode_cmd->add_option("--tie", dec_opts.tie, "SCOMP tie rule: lowest | random")
      ->capture_default_str();
  decode_cmd->add_option("--dump-lp", dec_opts.dump_lp, "Write the LP relaxation to PATH");
  common.format = "text";
  add_common(decode_cmd, common, {"text", "json"});

  auto* audit_cmd = app.add_subcommand("audit", "Property P audit on random instances");
  AuditOptions audit_opts;
  audit_cmd->add_option("--n", audit_opts.n, "Number of items")->required();
  audit_cmd->add_option("--k", audit_opts.k, "Number of defectives")->required();
  audit_cmd->add_option("--p", audit_opts.p, "auto | nu:V | probability")->capture_default_str();
  audit_cmd->add_option("--t", audit_opts.t, "Number of tests")->required();
  audit_cmd->add_option("--trials", audit_opts.trials, "Instances")->capture_default_str();
  audit_cmd->add_option("--oracle", audit_opts.oracle, "auto | on | off")
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();
  audit_cmd->add_option("--threads", audit_opts.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  add_common(audit_cmd, common, {"csv", "json"});

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "gtlab: " << e.what() << '\n';
    return kUsageError;
  }

  // decode defaults to text output; the other commands to CSV.
  if (!decode_cmd->parsed() && common.format == "text") common.format = "csv";

  try {
    if (bounds_cmd->parsed()) return cmd_bounds(theta_text, curves_text, common, out);
    if (simulate_cmd->parsed()) return cmd_simulate(sim_opts, common, out);
    if (decode_cmd->parsed()) return cmd_decode(dec_opts, common, out);
    if (audit_cmd->parsed()) return cmd_audit(audit_opts, common, out);
  } catch (const UsageError& e) {
    err << "gtlab: " << e.what() << '\n';
    return kUsageError;
  } catch (const InputError& e) {
    err << "gtlab: " << e.what() << '\n';
    return kInputError;
  } catch (const ParameterError& e) {
    err << "gtlab: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "gtlab: " << e.what() << '\n';
    return kFailure;
  }
  return kUsageError;
}

}  // namespace gtlab::cli
