#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pipesched/instance.hpp"
#include "pipesched/oracle.hpp"
#include "pipesched/solver.hpp"

namespace pipesched {

// Event-level view of a solved model: per-slot operations, batch
// trajectories, product assignment and the recomputed cost breakdown.

struct InjectionRun {
    int slot = 0;  // 1-based operational slot
    int input = 0;
    BatchId batch = 0;
    ProductId product = 0;
    double volume = 0.0;
    double rate = 0.0;  // volume / dt
};

struct DeliveryEvent {
    int slot = 0;
    int output = 0;
    BatchId batch = 0;
    ProductId product = 0;
    double volume = 0.0;
};

struct TransferEvent {
    int slot = 0;
    LineId into_line = 0;
    BatchId batch = 0;
    double volume = 0.0;
};

struct SnapshotSegment {
    BatchId batch = 0;
    std::optional<ProductId> product;
    double lo = 0.0;  // lower coordinate within the line
    double hi = 0.0;
};

struct SlotSnapshot {
    // segments[l] lists occupied stretches of line l, front first
    std::vector<std::vector<SnapshotSegment>> segments;
};

struct CostBreakdown {
    double pumping = 0.0;
    double interface_cost = 0.0;
    double backorder = 0.0;
    double total = 0.0;
    double backorder_volume = 0.0;
    // (p, output) -> undelivered volume
    std::vector<std::tuple<ProductId, int, double>> backorder_by_demand;
    // (front batch, back batch, front product, back product, cost)
    std::vector<std::tuple<BatchId, BatchId, ProductId, ProductId, double>> interfaces;
};

struct Schedule {
    std::vector<InjectionRun> injections;
    std::vector<DeliveryEvent> deliveries;
    std::vector<TransferEvent> transfers;
    std::vector<std::optional<ProductId>> assignment;  // per batch
    std::vector<SlotSnapshot> snapshots;               // states 0..T
    CostBreakdown costs;
    double solver_objective = 0.0;
};

// Threshold separating numerical noise from real flows.
inline constexpr double kEventTol = 1e-6;

Schedule extract_schedule(const PipelineInstance& inst, const MilpModel& model,
                          const Solution& sol);

// Recompute costs from events only (no solver data).
CostBreakdown cost_breakdown(const PipelineInstance& inst, const Schedule& s);

enum class ReportFormat { Text, Json, GanttJson };

std::string render_report(const PipelineInstance& inst, const Schedule& s,
                          ReportFormat format);

// Project the schedule onto the oracle's plan shape for round-tripping
// through validate.
OperatingPlan schedule_to_plan(const PipelineInstance& inst, const Schedule& s);

}  // namespace pipesched
