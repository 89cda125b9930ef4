#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pipesched/instance.hpp"
#include "pipesched/milp.hpp"

namespace pipesched {

// Slot-granular operating decisions, the oracle-side mirror of a solved
// schedule. All volumes are per slot.
struct InjectionDecision {
    int input = 0;  // index into inst.inputs
    BatchId batch = 0;
    ProductId product = 0;
    double volume = 0.0;
};

struct DeliveryDecision {
    int output = 0;  // index into inst.outputs
    BatchId batch = 0;
    double volume = 0.0;
};

struct TransferDecision {
    LineId into_line = 0;  // batch moves from into_line-1 to into_line
    BatchId batch = 0;
    double volume = 0.0;
};

struct SlotDecision {
    std::vector<InjectionDecision> injections;
    std::vector<DeliveryDecision> deliveries;
    std::vector<TransferDecision> transfers;
};

struct OperatingPlan {
    std::vector<SlotDecision> slots;  // may be longer or shorter than inst.grid.slots
    // Product choice for batches the plan fills; old assigned batches keep
    // their linefill product. Missing entries stay unassigned.
    std::vector<std::optional<ProductId>> assignment;

    bool empty() const;
};

OperatingPlan plan_from_json(const PipelineInstance& inst, const std::string& text);
std::string plan_to_json(const PipelineInstance& inst, const OperatingPlan& plan);

// Forward mass-balance simulation (Eq. 28 recursion from the initial
// linefill). Never throws on bad plans: negative volumes surface in check().
struct Trajectory {
    // [state t][batch i][line l] -> volume / upper coordinate
    std::vector<std::vector<std::vector<double>>> volume;
    std::vector<std::vector<std::vector<double>>> coordinate;
    int states() const { return static_cast<int>(volume.size()); }
};

Trajectory simulate(const PipelineInstance& inst, const OperatingPlan& plan);

struct Violation {
    std::string rule;  // equation number ("eq10") or assumption id ("a1")
    std::string where;   // index tuple, human readable
    double measured = 0.0;
    double bound = 0.0;
    std::string message;
};

struct OracleReport {
    std::vector<Violation> violations;
    // Eq. (23) shortfalls are costs, not violations; reported separately.
    std::vector<Violation> shortfalls;
    bool feasible() const { return violations.empty(); }
};

OracleReport check(const PipelineInstance& inst, const OperatingPlan& plan);

// Cost of a plan under the instance's cost model (pumping + interfaces +
// backorder), independent of the MILP.
struct PlanCost {
    double pumping = 0.0;
    double interface = 0.0;
    double backorder = 0.0;
    double backorder_volume = 0.0;
    double total() const { return pumping + interface + backorder; }
};

PlanCost price_plan(const PipelineInstance& inst, const OperatingPlan& plan);

// Ground-truth oracle: exhaustive search over plans whose volumes are
// multiples of `quantum`, depth-first over slots with state-based pruning,
// feasibility via check(). Deterministic: among cost ties the
// lexicographically smallest encoded plan wins, with or without OpenMP.
struct BruteForceResult {
    bool feasible = false;
    double best_cost = 0.0;
    OperatingPlan best_plan;
    long long nodes_explored = 0;
};

struct BruteForceOptions {
    long long candidate_cap = 10'000'000;
    bool parallel = true;   // partition the first-slot choices across threads
    int max_slots = -1;     // -1: use inst.grid.slots
};

BruteForceResult brute_force_optimize(const PipelineInstance& inst, double quantum,
                                      BruteForceOptions opts = {});

// Full variable assignment reproducing `plan` in the MILP's variable space
// (binaries from events, F/W from the simulated trajectory, IC/Border from
// the cost model). Feeds the row-wise model checks in tests.
std::vector<double> assignment_from_plan(const PipelineInstance& inst,
                                         const MilpModel& model,
                                         const OperatingPlan& plan);

}  // namespace pipesched
