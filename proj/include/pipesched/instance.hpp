#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pipesched/errors.hpp"

namespace pipesched {

// Index conventions, used consistently across the project:
//  - products p: 0..P-1
//  - lines l: 0..L-1, ordered from the pipeline origin; line l is fed by
//    input node l sitting at its upstream end
//  - batches i: 0..N-1, batch 0 at the delivery extreme; batch i+1 trails
//    batch i, so higher indices sit closer to the origin / are injected later
//  - time: states 0..T where state 0 is the initial linefill; operational
//    slot t (1..T) covers hours (t-1)*dt .. t*dt and transforms state t-1
//    into state t
using ProductId = int;
using LineId = int;
using BatchId = int;

inline constexpr double kVolumeTol = 1e-6;  // feasibility tolerance on volumes
inline constexpr double kCostTol = 1e-4;    // tolerance on recomputed costs

struct Product {
    std::string id;    // symbolic, unique
    std::string name;  // display string, defaults to id
};

struct Line {
    double volume = 0.0;  // vl_l, volumetric units
};

struct InputNode {
    LineId line = 0;            // line this node feeds
    double inject_min = 0.0;    // r_min, volume per slot when active
    double inject_max = 0.0;    // r_max
    double rate_min = 0.0;      // vr_min, volume per hour
    double rate_max = 0.0;      // vr_max
    std::vector<double> inventory;     // invp[p], volume available over horizon
    std::vector<double> pumping_cost;  // cp[p], per unit in instance cost units
};

struct OutputNode {
    LineId line = 0;
    int index_in_line = 0;   // d within D_l, 0-based
    std::string id;          // display id, e.g. "D2"
    double offset = 0.0;     // sigma_{d,l}, volumetric distance from line start
    double deliver_min = 0.0;  // d_min per batch per slot when active
    double deliver_max = 0.0;  // d_max
    std::vector<double> demand;  // demand[p] over the horizon
    bool dual_purpose = false;   // co-located with the next input node
};

// One entry of the initial linefill. EMPTY batches (product == nullopt) carry
// zero volume everywhere but keep a coordinate; they are reserved index slots
// that the model may later assign and fill (mid-line injection).
struct BatchState {
    std::optional<ProductId> product;
    std::vector<double> volume;      // W_initial[l]
    std::vector<double> coordinate;  // f_initial[l], upper coordinate per line
};

struct TimeGrid {
    double dt_hours = 0.0;  // slot length
    int slots = 0;          // operational slot count |T|
    double horizon_hours() const { return dt_hours * slots; }
};

// FP matrix, interface costs, transfer bounds and per-product caps.
struct Rules {
    // forbidden[a][b]: product b must never trail product a in the pipeline.
    std::vector<std::vector<bool>> forbidden;
    // interface_cost[a][b]: cost of batch of b trailing batch of a, in
    // instance cost units (scaled by cost_scale into the objective).
    std::vector<std::vector<double>> interface_cost;
    double transfer_min = 0.0;  // S_min
    double transfer_max = 0.0;  // S_max
    std::vector<double> product_cap;  // max_p, horizon-wide injection cap
};

struct Options {
    // Keep Eq. (8): at least one input node active in every operational slot.
    bool force_active_injection = true;
    // At most one input node active per slot (single-active-refinery runs).
    bool exclusive_injection = false;
    // Charge the physical interface between the nearest assigned batches when
    // every batch between them stays empty. Off by default: the plain model
    // only prices index-adjacent assigned pairs.
    bool interface_across_empty = false;
};

struct NewBatchSpec {
    int count = 0;
    // required batches must take a product and be injected; optional ones may
    // stay unused (like reserved EMPTY linefill slots).
    bool required = true;
};

struct PipelineInstance {
    std::string name;
    std::vector<Product> products;
    std::vector<Line> lines;
    std::vector<InputNode> inputs;    // one per line at most; inputs[k].line strictly increasing
    std::vector<OutputNode> outputs;  // ordered by (line, offset)
    std::vector<BatchState> initial;  // initial linefill, batch 0 first
    NewBatchSpec new_batches;
    TimeGrid grid;
    Rules rules;
    // Multiplier taking pumping/interface cost entries into objective money
    // units (the paper's tables quote "100 $" entries; objectives are in $).
    double cost_scale = 1.0;
    // Backorder cost in objective money units per undelivered unit; uniform
    // default plus optional per (product, depot) overrides.
    double backorder_cost = 0.0;
    std::map<std::pair<ProductId, int>, double> backorder_override;  // (p, output idx) -> cb
    Options options;

    // Batch eligibility. Filled with sound defaults at load time when the
    // document omits them (see eligibility notes in docs/formats.md).
    std::vector<std::vector<BatchId>> input_batches;   // I_l^input per input node
    std::vector<std::vector<BatchId>> line_batches;    // I_l per line
    std::vector<std::vector<BatchId>> depot_batches;   // I_{d,l} per output node

    int batch_count() const {
        return static_cast<int>(initial.size()) + new_batches.count;
    }
    int old_batch_count() const { return static_cast<int>(initial.size()); }
    bool is_new_batch(BatchId i) const { return i >= old_batch_count(); }
    // True for batches the model may leave unassigned: reserved EMPTY linefill
    // slots and non-required new batches.
    bool is_optional_batch(BatchId i) const {
        if (is_new_batch(i)) return !new_batches.required;
        return !initial[i].product.has_value();
    }
    double backorder_cost_for(ProductId p, int output_idx) const {
        auto it = backorder_override.find({p, output_idx});
        return it == backorder_override.end() ? backorder_cost : it->second;
    }
    const InputNode* input_at_line(LineId l) const {
        for (const auto& n : inputs)
            if (n.line == l) return &n;
        return nullptr;
    }
    int input_index_at_line(LineId l) const {
        for (size_t k = 0; k < inputs.size(); ++k)
            if (inputs[k].line == l) return static_cast<int>(k);
        return -1;
    }
    // Global volumetric coordinate of the start of line l.
    double line_origin(LineId l) const {
        double o = 0.0;
        for (LineId k = 0; k < l; ++k) o += lines[k].volume;
        return o;
    }
    double total_volume() const { return line_origin(static_cast<LineId>(lines.size())); }
    ProductId product_index(const std::string& id) const;
};

struct ValidationIssue {
    std::string rule;     // short machine tag, e.g. "linefill-sum"
    std::string path;     // field path
    std::string message;  // human readable
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

enum class BuiltinInstance { Motivating, Example1, Example2 };

// Serialization (documented in docs/formats.md; schema in docs/instance_schema.json).
PipelineInstance load_instance(const std::string& json_text);
PipelineInstance load_instance_file(const std::string& path);
std::string save_instance(const PipelineInstance& inst);

ValidationReport validate_instance(const PipelineInstance& inst);

PipelineInstance builtin_instance(BuiltinInstance which);
PipelineInstance builtin_instance(const std::string& name);  // "motivating"|"example1"|"example2"

// Stable 64-bit FNV-1a hash of the canonical serialized form; used in run
// manifests to identify inputs.
std::uint64_t instance_hash(const PipelineInstance& inst);

}  // namespace pipesched
