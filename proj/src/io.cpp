#include "gtlab/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gtlab/errors.hpp"

namespace gtlab::io {
namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<bool> parse_bits(const std::string& line, const std::string& what) {
  std::vector<bool> bits;
  bits.reserve(line.size());
  for (const char c : line) {
    if (c != '0' && c != '1') throw InputError(what + ": expected only '0' and '1'");
    bits.push_back(c == '1');
  }
  return bits;
}

}  // namespace

TestDesign read_design(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("design file is empty");
  std::istringstream header(strip_cr(line));
  long long n = 0;
  long long t = 0;
  std::string extra;
  if (!(header >> n >> t) || (header >> extra) || n < 1 || t < 1) {
    throw InputError("design header must be 'n t' with positive integers");
  }
  TestDesign design(static_cast<std::size_t>(n), static_cast<std::size_t>(t));
  for (long long row = 0; row < t; ++row) {
    if (!std::getline(in, line)) {
      throw InputError("design file has fewer than " + std::to_string(t) + " rows");
    }
    const auto bits = parse_bits(strip_cr(line), "design row " + std::to_string(row + 1));
    if (bits.size() != static_cast<std::size_t>(n)) {
      throw InputError("design row " + std::to_string(row + 1) + " has " +
                       std::to_string(bits.size()) + " entries, expected " +
                       std::to_string(n));
    }
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i]) design.set(static_cast<std::size_t>(row), i);
    }
  }
  while (std::getline(in, line)) {
    if (!strip_cr(line).empty()) throw InputError("design file has extra rows");
  }
  return design;
}

void write_design(std::ostream& out, const TestDesign& design) {
  out << design.items() << ' ' << design.tests() << '\n';
  for (std::size_t t = 0; t < design.tests(); ++t) {
    for (std::size_t i = 0; i < design.items(); ++i) out << (design.contains(t, i) ? '1' : '0');
    out << '\n';
  }
}

Outcomes read_outcomes(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("outcomes file is empty");
  Outcomes outcomes(parse_bits(strip_cr(line), "outcomes"));
  while (std::getline(in, line)) {
    if (!strip_cr(line).empty()) throw InputError("outcomes file has extra lines");
  }
  return outcomes;
}

void write_outcomes(std::ostream& out, const Outcomes& outcomes) {
  for (const bool positive : outcomes.results()) out << (positive ? '1' : '0');
  out << '\n';
}

std::string format_fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
  return buffer;
}

void write_bounds_csv(std::ostream& out, const BoundsTable& table) {
  out << "theta";
  for (const auto& curve : table.curves) out << ',' << curve.name;
  out << '\n';
  for (std::size_t row = 0; row < table.thetas.size(); ++row) {
    out << format_fixed(table.thetas[row]);
    for (const auto& curve : table.curves) out << ',' << format_fixed(curve.samples[row].second);
    out << '\n';
  }
  const auto& x = table.crossovers;
  out << "# theta_star=" << format_fixed(table.theta_star) << '\n'
      << "# capacity_unit_end=" << format_fixed(x.capacity_unit_end) << '\n'
      << "# capacity_counting_start=" << format_fixed(x.capacity_counting_start) << '\n'
      << "# dd_plateau_end=" << format_fixed(x.dd_plateau_end) << '\n'
      << "# dd_meets_capacity=" << format_fixed(x.dd_meets_capacity) << '\n'
      << "# dd_plateau=" << format_fixed(table.dd_plateau) << '\n'
      << "# dd_plateau_nu=" << format_fixed(table.dd_plateau_nu) << '\n';
}

void write_bounds_json(std::ostream& out, const BoundsTable& table) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t row = 0; row < table.thetas.size(); ++row) {
    nlohmann::ordered_json entry;
    entry["theta"] = std::stod(format_fixed(table.thetas[row]));
    for (const auto& curve : table.curves) {
      entry[curve.name] = std::stod(format_fixed(curve.samples[row].second));
    }
    rows.push_back(std::move(entry));
  }
  const auto& x = table.crossovers;
  nlohmann::ordered_json doc;
  doc["rows"] = std::move(rows);
  doc["metadata"] = {
      {"theta_star", std::stod(format_fixed(table.theta_star))},
      {"capacity_unit_end", std::stod(format_fixed(x.capacity_unit_end))},
      {"capacity_counting_start", std::stod(format_fixed(x.capacity_counting_start))},
      {"dd_plateau_end", std::stod(format_fixed(x.dd_plateau_end))},
      {"dd_meets_capacity", std::stod(format_fixed(x.dd_meets_capacity))},
      {"dd_plateau", std::stod(format_fixed(table.dd_plateau))},
      {"dd_plateau_nu", std::stod(format_fixed(table.dd_plateau_nu))},
  };
  out << doc.dump(2) << '\n';
}

void write_sweep_csv(std::ostream& out, const sim::SweepResult& result) {
  out << "decoder,t,trials,successes,success_rate,ci_low,ci_high\n";
  for (const auto& row : result.rows) {
    out << sim::to_string(row.decoder) << ',' << row.t << ',' << row.trials << ','
        << row.successes << ',' << format_fixed(row.success_rate) << ','
        << format_fixed(row.ci_low) << ',' << format_fixed(row.ci_high) << '\n';
  }
}

void write_sweep_json(std::ostream& out, const sim::SweepResult& result) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : result.rows) {
    rows.push_back({{"decoder", sim::to_string(row.decoder)},
                    {"t", row.t},
                    {"trials", row.trials},
                    {"successes", row.successes},
                    {"success_rate", std::stod(format_fixed(row.success_rate))},
                    {"ci_low", std::stod(format_fixed(row.ci_low))},
                    {"ci_high", std::stod(format_fixed(row.ci_high))}});
  }
  out << rows.dump(2) << '\n';
}

void write_audit_csv(std::ostream& out, const sim::AuditReport& report) {
  out << "check,checked,violations\n";
  for (const auto& check : report.checks) {
    out << check.name << ',' << check.checked << ',' << check.violations << '\n';
  }
  out << "# instances=" << report.instances << '\n'
      << "# dd_satisfying=" << report.dd_satisfying << '\n'
      << "# dd_success=" << report.dd_success << '\n';
  for (const auto& example : report.counterexamples) out << "# counterexample " << example << '\n';
}

void write_audit_json(std::ostream& out, const sim::AuditReport& report) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& check : report.checks) {
    checks.push_back(
        {{"check", check.name}, {"checked", check.checked}, {"violations", check.violations}});
  }
  nlohmann::ordered_json doc;
  doc["instances"] = report.instances;
  doc["dd_satisfying"] = report.dd_satisfying;
  doc["dd_success"] = report.dd_success;
  doc["checks"] = std::move(checks);
  doc["counterexamples"] = report.counterexamples;
  out << doc.dump(2) << '\n';
}

}  // namespace gtlab::io
