#pragma once

#include <string>
#include <vector>

#include "sasnet/allocation.hpp"
#include "sasnet/channel.hpp"

namespace sasnet {

enum class Segment { Abs, Sat, Cbs };

const char* segment_name(Segment s);

/// One violated constraint: numbered id, offending node indices, slack =
/// amount by which the constraint is missed.
struct Violation {
  int constraint_id = 0;
  std::vector<int> indices;
  double slack = 0.0;
  std::string detail;
};

/// Segment problem: objective tag plus the machine-checkable constraint set,
/// with the interference environment frozen for the continuous solver.
struct ProblemSpec {
  Segment segment = Segment::Abs;
  const Scenario* scenario = nullptr;
  const ChannelModel* channel = nullptr;
  std::vector<int> constraint_ids;
  InterferenceTable frozen;      // objective interference (refrozen per outer iteration)
  InterferenceTable worst_case;  // demand floors

  std::vector<Violation> violations(const Association& as, const Allocation& al) const;
};

ProblemSpec build_abs_problem(const Scenario& s, const ChannelModel& ch, const InterferenceTable& frozen);
ProblemSpec build_sat_problem(const Scenario& s, const ChannelModel& ch, const InterferenceTable& frozen);
ProblemSpec build_cbs_problem(const Scenario& s, const ChannelModel& ch, const InterferenceTable& frozen);

/// Violations of the spec's constraint subset. Shape mismatches between the
/// scenario and the candidate throw std::invalid_argument.
std::vector<Violation> check_feasibility(const ProblemSpec& spec, const Association& as,
                                         const Allocation& al);

/// Violations of every numbered constraint (31)-(49).
std::vector<Violation> full_violations(const ChannelModel& ch, const Association& as,
                                       const Allocation& al);

/// CSV serialization: constraint_id,indices,slack
std::string violations_csv(const std::vector<Violation>& v);

}  // namespace sasnet
