#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "sasnet/benders.hpp"

namespace sasnet {

/// Per-(receiver, slot) rate floors the satellite/CBS backhaul links must
/// carry so the access traffic routed through them stays within capacity.
struct BackhaulFloors {
  std::vector<double> sat_abs;  // [U][N] bit/s, 0 when not satellite-backhauled
  std::vector<double> cbs_abs;  // [C][U][N]
};

/// UAV segment: LUE association + backhaul choice in the master, transmit
/// powers and 2D deployment in the subproblem (consensus ADMM nodes are the
/// ABSs, with power/x/y global copies at the controller).
class AbsSegmentOracle : public SegmentOracle {
 public:
  AbsSegmentOracle(const Scenario& s, const ChannelModel& ch, const SolverOptions& opts);

  Segment segment() const override { return Segment::Abs; }
  MasterProblem master_skeleton() const override;
  std::vector<std::uint8_t> initial_assignment() const override;
  SubproblemResult solve(const std::vector<std::uint8_t>& bits, bool reduced) override;
  bool refreeze(const Allocation& previous) override;
  std::vector<std::uint8_t> flip_assignment(const std::vector<std::uint8_t>& bits,
                                            int b) const override;

  Association bits_to_association(const std::vector<std::uint8_t>& bits) const;

 private:
  int find_bit(BitKind kind, int a, int b) const;
  int default_backhaul_bit(int u) const;

  const Scenario* scn_;
  const ChannelModel* ch_;
  SolverOptions opts_;
  Allocation base_;  // reference powers of the other segments
  InterferenceTable frozen_;
  InterferenceTable worst_;
  std::vector<Position3D> d_local_;  // expansion points [u][slot]
  std::vector<MasterBit> bits_;
  int refreeze_epochs_ = 0;
};

/// Power-only specialization shared by the satellite and CBS segments (the
/// deployment blocks are empty; nodes are the satellite or the CBSs).
class PowerSegmentOracle : public SegmentOracle {
 public:
  /// `required_abs`: ABSs whose backhaul this segment must serve (bit pinned),
  /// with the per-slot rate floors carried in `floors`.
  PowerSegmentOracle(Segment seg, const Scenario& s, const ChannelModel& ch,
                     const SolverOptions& opts, std::vector<int> required_abs,
                     const BackhaulFloors& floors, std::vector<int> hue_candidates,
                     const Allocation* interference_base = nullptr);

  Segment segment() const override { return seg_; }
  MasterProblem master_skeleton() const override;
  std::vector<std::uint8_t> initial_assignment() const override;
  SubproblemResult solve(const std::vector<std::uint8_t>& bits, bool reduced) override;
  bool refreeze(const Allocation& previous) override;

  Association bits_to_association(const std::vector<std::uint8_t>& bits) const;

  /// Required ABS list for this segment derived from an ABS-stage association.
  static std::vector<int> required_from(Segment seg, const Association& as, int cbs_index = -1);

 private:
  Segment seg_;
  const Scenario* scn_;
  const ChannelModel* ch_;
  SolverOptions opts_;
  Allocation base_;
  InterferenceTable frozen_;
  InterferenceTable worst_;
  std::vector<int> required_abs_;      // Abs indices (Sat) or flattened (c,u) pairs (Cbs)
  BackhaulFloors floors_;
  std::vector<int> hue_candidates_;    // HUEs this segment may serve
  std::vector<MasterBit> bits_;
  int refreeze_epochs_ = 0;
};

/// HUEs inside any CBS coverage disk at every slot associate with the CBS
/// side; the rest with the satellite.
std::vector<int> sat_hue_candidates(const Scenario& s);
std::vector<int> cbs_hue_candidates(const Scenario& s, int c);

/// CBSs eligible as backhaul for ABS u (initial position within coverage).
std::vector<int> cbs_backhaul_candidates(const Scenario& s, int u);

/// Zero-interference access traffic of each ABS per slot, used as the
/// backhaul rate floor for the downstream segments.
BackhaulFloors backhaul_floors(const ChannelModel& ch, const Association& as,
                               const Allocation& al);

/// Reference allocation whose transmitter totals equal p_max (cold-start
/// interference environment for the stages that have not solved yet).
Allocation reference_allocation(const Scenario& s);

struct ProposedResult {
  Association assoc;
  Allocation alloc;
  EEReport report;  // self-consistent achieved evaluation
  BendersResult abs;
  BendersResult sat;
  BendersResult cbs;
};

/// Full pipeline: ABS Benders first (it fixes the backhaul choices and the
/// access traffic), then the satellite and CBS Benders loops concurrently.
ProposedResult solve_proposed(const Scenario& s, const ChannelModel& ch, const SolverOptions& opts);

/// Exact continuous EE optimum of a power-only link family over the box
/// [floor, p_max] via Dinkelbach with the closed-form inner maximizer.
/// Rates normalized by opts.ee_unit. Returns {eta, rates, powers}.
struct PowerOptResult {
  double eta = 0.0;          // normalized EE
  double rate = 0.0;         // normalized sum rate
  double power = 0.0;        // total power incl. fixed
  std::vector<double> p;     // per (link, slot), link-major
  bool feasible = true;
};
struct PowerOptLink {
  double gain = 0.0;
  double bandwidth = 0.0;
  double noise_plus_interference = 0.0;
  double floor_w = 0.0;  // demand floor, 0 when none
};
PowerOptResult optimize_link_powers(const std::vector<PowerOptLink>& links, double fixed_power_w,
                                    double p_max_w, double ee_unit, double upsilon = 1e-9,
                                    int max_iters = 100);

}  // namespace sasnet
