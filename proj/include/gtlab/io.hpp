#pragma once

// Plain-text file formats and report writers.
//
// Design file: first line "n t", then t lines of n characters '0'/'1'.
// Outcomes file: one line of t characters '0'/'1'.

#include <iosfwd>
#include <string>
#include <vector>

#include "gtlab/bounds.hpp"
#include "gtlab/design.hpp"
#include "gtlab/sim.hpp"

namespace gtlab::io {

/// Throws InputError on malformed input.
TestDesign read_design(std::istream& in);
void write_design(std::ostream& out, const TestDesign& design);

/// Throws InputError on malformed input; dimension checks are left to the
/// caller.
Outcomes read_outcomes(std::istream& in);
void write_outcomes(std::ostream& out, const Outcomes& outcomes);

/// Values printed with six decimals.
std::string format_fixed(double value, int decimals = 6);

struct BoundsTable {
  std::vector<double> thetas;
  /// One curve per requested name, in canonical order.
  std::vector<bounds::RateCurve> curves;
  bounds::Crossovers crossovers;
  double theta_star = 0.0;
  double dd_plateau = 0.0;
  double dd_plateau_nu = 0.0;
};

/// Header "theta,<curve>,...", one row per grid point, then "# key=value"
/// metadata lines.
void write_bounds_csv(std::ostream& out, const BoundsTable& table);
void write_bounds_json(std::ostream& out, const BoundsTable& table);

/// Header "decoder,t,trials,successes,success_rate,ci_low,ci_high".
void write_sweep_csv(std::ostream& out, const sim::SweepResult& result);
void write_sweep_json(std::ostream& out, const sim::SweepResult& result);

/// Header "check,checked,violations" plus "# key=value" lines.
void write_audit_csv(std::ostream& out, const sim::AuditReport& report);
void write_audit_json(std::ostream& out, const sim::AuditReport& report);

}  // namespace gtlab::io
