#include "pipesched/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace pipesched {

using nlohmann::json;

Schedule extract_schedule(const PipelineInstance& inst, const MilpModel& model,
                          const Solution& sol) {
    if (sol.status != SolStatus::Optimal && sol.status != SolStatus::FeasibleWithinGap)
        throw Error("cannot extract a schedule from a " + std::string(to_string(sol.status)) +
                    " solution");

    Schedule s;
    s.solver_objective = sol.objective;
    const int N = inst.batch_count();
    const int T = inst.grid.slots;
    const int L = static_cast<int>(inst.lines.size());
    const int P = static_cast<int>(inst.products.size());

    auto value = [&](VarKind k, std::array<int, 5> idx) {
        const auto ref = model.find(k, idx);
        return ref.valid() ? sol.values[ref.id] : 0.0;
    };

    s.assignment.assign(N, std::nullopt);
    for (int i = 0; i < N; ++i) {
        for (ProductId p = 0; p < P; ++p) {
            const auto ref = model.find(VarKind::Y, {i, p, -1, -1, -1});
            if (!ref.valid()) continue;
            const double y = sol.values[ref.id];
            if (std::abs(y - std::round(y)) > kEventTol)
                throw DegenerateSolution("assignment variable " + model.vars[ref.id].name +
                                         " is fractional: " + std::to_string(y));
            if (std::round(y) == 1.0) s.assignment[i] = p;
        }
    }

    for (size_t k = 0; k < inst.inputs.size(); ++k) {
        const LineId l = inst.inputs[k].line;
        for (int t = 1; t <= T; ++t) {
            for (BatchId i : inst.input_batches[k]) {
                const double r = value(VarKind::R, {i, l, t, -1, -1});
                if (r <= kEventTol) continue;
                ProductId prod = s.assignment[i].value_or(-1);
                if (prod < 0)
                    throw DegenerateSolution("injection into unassigned batch i" +
                                             std::to_string(i + 1));
                s.injections.push_back(
                    {t, static_cast<int>(k), i, prod, r, r / inst.grid.dt_hours});
            }
        }
    }
    for (size_t o = 0; o < inst.outputs.size(); ++o)
        for (int t = 1; t <= T; ++t)
            for (BatchId i : inst.depot_batches[o]) {
                const double d = value(VarKind::D, {i, static_cast<int>(o), t, -1, -1});
                if (d <= kEventTol) continue;
                s.deliveries.push_back({t, static_cast<int>(o), i,
                                        s.assignment[i].value_or(-1), d});
            }
    for (LineId l = 1; l < L; ++l)
        for (int t = 1; t <= T; ++t)
            for (BatchId i : inst.line_batches[l - 1]) {
                const double v = value(VarKind::S, {i, l, t, -1, -1});
                if (v <= kEventTol) continue;
                s.transfers.push_back({t, l, i, v});
            }

    s.snapshots.resize(T + 1);
    for (int t = 0; t <= T; ++t) {
        auto& snap = s.snapshots[t];
        snap.segments.resize(L);
        for (LineId l = 0; l < L; ++l) {
            for (BatchId i : inst.line_batches[l]) {
                const double w = value(VarKind::W_VOL, {i, l, t, -1, -1});
                if (w <= kEventTol) continue;
                const double hi = value(VarKind::F, {i, l, t, -1, -1});
                snap.segments[l].push_back({i, s.assignment[i], hi - w, hi});
            }
            std::sort(snap.segments[l].begin(), snap.segments[l].end(),
                      [](const SnapshotSegment& a, const SnapshotSegment& b) {
                          return a.lo > b.lo;  // front of the line first
                      });
        }
    }

    s.costs = cost_breakdown(inst, s);
    return s;
}

CostBreakdown cost_breakdown(const PipelineInstance& inst, const Schedule& s) {
    CostBreakdown cb;
    for (const auto& run : s.injections)
        cb.pumping += inst.cost_scale * inst.inputs[run.input].pumping_cost[run.product] *
                      run.volume;

    // Interface accounting: adjacent assigned pairs; with the
    // interface_across_empty option, the nearest assigned predecessor.
    const int N = static_cast<int>(s.assignment.size());
    for (BatchId i = 1; i < N; ++i) {
        if (!s.assignment[i]) continue;
        BatchId j = i - 1;
        if (inst.options.interface_across_empty)
            while (j >= 0 && !s.assignment[j]) --j;
        if (j < 0 || !s.assignment[j]) continue;
        const double c =
            inst.cost_scale * inst.rules.interface_cost[*s.assignment[j]][*s.assignment[i]];
        if (c <= 0.0) continue;
        cb.interface_cost += c;
        cb.interfaces.push_back({j, i, *s.assignment[j], *s.assignment[i], c});
    }

    std::vector<std::vector<double>> delivered(inst.products.size(),
                                               std::vector<double>(inst.outputs.size(), 0.0));
    for (const auto& d : s.deliveries)
        if (d.product >= 0) delivered[d.product][d.output] += d.volume;
    for (size_t p = 0; p < inst.products.size(); ++p)
        for (size_t o = 0; o < inst.outputs.size(); ++o) {
            const double short_v = std::max(0.0, inst.outputs[o].demand[p] - delivered[p][o]);
            if (short_v <= kEventTol) continue;
            cb.backorder_volume += short_v;
            cb.backorder +=
                short_v * inst.backorder_cost_for(static_cast<ProductId>(p), static_cast<int>(o));
            cb.backorder_by_demand.push_back({static_cast<ProductId>(p), static_cast<int>(o), short_v});
        }
    cb.total = cb.pumping + cb.interface_cost + cb.backorder;
    return cb;
}

OperatingPlan schedule_to_plan(const PipelineInstance& inst, const Schedule& s) {
    OperatingPlan plan;
    plan.slots.resize(inst.grid.slots);
    plan.assignment = s.assignment;
    for (const auto& run : s.injections)
        plan.slots[run.slot - 1].injections.push_back(
            {run.input, run.batch, run.product, run.volume});
    for (const auto& d : s.deliveries)
        plan.slots[d.slot - 1].deliveries.push_back({d.output, d.batch, d.volume});
    for (const auto& t : s.transfers)
        plan.slots[t.slot - 1].transfers.push_back({t.into_line, t.batch, t.volume});
    return plan;
}

namespace {

json costs_to_json(const PipelineInstance& inst, const CostBreakdown& cb) {
    json j;
    j["pumping"] = cb.pumping;
    j["interface"] = cb.interface_cost;
    j["backorder"] = cb.backorder;
    j["total"] = cb.total;
    j["backorder_volume"] = cb.backorder_volume;
    j["backorder_by_demand"] = json::array();
    for (const auto& [p, o, v] : cb.backorder_by_demand)
        j["backorder_by_demand"].push_back({{"product", inst.products[p].id},
                                            {"output", inst.outputs[o].id},
                                            {"line", inst.outputs[o].line + 1},
                                            {"volume", v}});
    j["interfaces"] = json::array();
    for (const auto& [bi, bj, pi, pj, c] : cb.interfaces)
        j["interfaces"].push_back({{"front_batch", bi + 1},
                                   {"back_batch", bj + 1},
                                   {"front_product", inst.products[pi].id},
                                   {"back_product", inst.products[pj].id},
                                   {"cost", c}});
    return j;
}

std::string render_text(const PipelineInstance& inst, const Schedule& s) {
    std::ostringstream os;
    os << "schedule for instance '" << inst.name << "'  (" << inst.grid.slots << " slots of "
       << inst.grid.dt_hours << " h)\n";
    os << "objective (solver): " << s.solver_objective << "\n\n";
    os << "slot  operation\n";
    for (int t = 1; t <= inst.grid.slots; ++t) {
        bool any = false;
        for (const auto& run : s.injections) {
            if (run.slot != t) continue;
            os << (any ? "     " : " ") << t << (t < 10 ? "   " : "  ");
            os << "L" << inst.inputs[run.input].line + 1 << " injects " << run.volume
               << " of " << inst.products[run.product].id << " into batch I" << run.batch + 1
               << " (rate " << run.rate << "/h)\n";
            any = true;
        }
        for (const auto& d : s.deliveries) {
            if (d.slot != t) continue;
            os << (any ? "     " : " ") << t << (t < 10 ? "   " : "  ");
            os << inst.outputs[d.output].id << "/L" << inst.outputs[d.output].line + 1
               << " receives " << d.volume << " of "
               << (d.product >= 0 ? inst.products[d.product].id : std::string("?"))
               << " from batch I" << d.batch + 1 << "\n";
            any = true;
        }
        for (const auto& tr : s.transfers) {
            if (tr.slot != t) continue;
            os << (any ? "     " : " ") << t << (t < 10 ? "   " : "  ");
            os << "batch I" << tr.batch + 1 << " moves " << tr.volume << " from L"
               << tr.into_line << " into L" << tr.into_line + 1 << "\n";
            any = true;
        }
        if (!any) os << " " << t << (t < 10 ? "   " : "  ") << "idle\n";
    }
    os << "\ncosts: pumping " << s.costs.pumping << " + interface " << s.costs.interface_cost
       << " + backorder " << s.costs.backorder << " = " << s.costs.total << "\n";
    if (s.costs.backorder_volume > 0)
        os << "backorder volume: " << s.costs.backorder_volume << "\n";
    return os.str();
}

json schedule_json(const PipelineInstance& inst, const Schedule& s) {
    json j;
    j["instance"] = inst.name;
    j["objective"] = s.solver_objective;
    j["assignment"] = json::object();
    for (size_t i = 0; i < s.assignment.size(); ++i)
        if (s.assignment[i])
            j["assignment"][std::to_string(i + 1)] = inst.products[*s.assignment[i]].id;
    j["injections"] = json::array();
    for (const auto& run : s.injections)
        j["injections"].push_back({{"slot", run.slot},
                                   {"line", inst.inputs[run.input].line + 1},
                                   {"batch", run.batch + 1},
                                   {"product", inst.products[run.product].id},
                                   {"volume", run.volume},
                                   {"rate", run.rate}});
    j["deliveries"] = json::array();
    for (const auto& d : s.deliveries)
        j["deliveries"].push_back(
            {{"slot", d.slot},
             {"line", inst.outputs[d.output].line + 1},
             {"depot", inst.outputs[d.output].index_in_line + 1},
             {"output", inst.outputs[d.output].id},
             {"batch", d.batch + 1},
             {"product", d.product >= 0 ? json(inst.products[d.product].id) : json()},
             {"volume", d.volume}});
    j["transfers"] = json::array();
    for (const auto& t : s.transfers)
        j["transfers"].push_back({{"slot", t.slot},
                                  {"into_line", t.into_line + 1},
                                  {"batch", t.batch + 1},
                                  {"volume", t.volume}});
    j["costs"] = costs_to_json(inst, s.costs);
    // plan view for the validator
    j["plan"] = json::parse(plan_to_json(inst, schedule_to_plan(inst, s)));
    return j;
}

json gantt_json(const PipelineInstance& inst, const Schedule& s) {
    // Per-slot pipeline occupancy segments plus the slot's events; start/end
    // coordinates are volumetric, per line.
    json j;
    j["instance"] = inst.name;
    j["dt_hours"] = inst.grid.dt_hours;
    j["lines"] = json::array();
    for (const auto& l : inst.lines) j["lines"].push_back(l.volume);
    j["slots"] = json::array();
    for (size_t t = 0; t < s.snapshots.size(); ++t) {
        json sj;
        sj["state"] = t;
        sj["hours"] = static_cast<double>(t) * inst.grid.dt_hours;
        sj["segments"] = json::array();
        for (size_t l = 0; l < s.snapshots[t].segments.size(); ++l)
            for (const auto& seg : s.snapshots[t].segments[l])
                sj["segments"].push_back(
                    {{"line", l + 1},
                     {"batch", seg.batch + 1},
                     {"product", seg.product ? json(inst.products[*seg.product].id) : json()},
                     {"lo", seg.lo},
                     {"hi", seg.hi}});
        sj["injections"] = json::array();
        sj["deliveries"] = json::array();
        sj["transfers"] = json::array();
        for (const auto& run : s.injections)
            if (run.slot == static_cast<int>(t))
                sj["injections"].push_back({{"line", inst.inputs[run.input].line + 1},
                                            {"batch", run.batch + 1},
                                            {"volume", run.volume}});
        for (const auto& d : s.deliveries)
            if (d.slot == static_cast<int>(t))
                sj["deliveries"].push_back({{"output", inst.outputs[d.output].id},
                                            {"line", inst.outputs[d.output].line + 1},
                                            {"batch", d.batch + 1},
                                            {"volume", d.volume}});
        for (const auto& tr : s.transfers)
            if (tr.slot == static_cast<int>(t))
                sj["transfers"].push_back({{"into_line", tr.into_line + 1},
                                           {"batch", tr.batch + 1},
                                           {"volume", tr.volume}});
        j["slots"].push_back(sj);
    }
    return j;
}

}  // namespace

std::string render_report(const PipelineInstance& inst, const Schedule& s,
                          ReportFormat format) {
    switch (format) {
        case ReportFormat::Text: return render_text(inst, s);
        case ReportFormat::Json: return schedule_json(inst, s).dump(2) + "\n";
        case ReportFormat::GanttJson: return gantt_json(inst, s).dump(2) + "\n";
    }
    throw Error("unknown report format");
}

}  // namespace pipesched
