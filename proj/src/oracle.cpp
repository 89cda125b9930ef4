#include "pipesched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

namespace pipesched {

using nlohmann::json;

bool OperatingPlan::empty() const {
    for (const auto& s : slots)
        if (!s.injections.empty() || !s.deliveries.empty() || !s.transfers.empty()) return false;
    return true;
}

namespace {

constexpr double kTol = kVolumeTol;

// Final batch -> product map: linefill assignments plus the plan's choices.
std::vector<std::optional<ProductId>> effective_assignment(const PipelineInstance& inst,
                                                           const OperatingPlan& plan) {
    std::vector<std::optional<ProductId>> a(inst.batch_count());
    for (int i = 0; i < inst.old_batch_count(); ++i) a[i] = inst.initial[i].product;
    for (size_t i = 0; i < plan.assignment.size() && i < a.size(); ++i)
        if (plan.assignment[i]) a[i] = plan.assignment[i];
    return a;
}

// Interface cost of the final assignment, in money units. With
// interface_across_empty the assigned subsequence is priced; otherwise only
// index-adjacent assigned pairs (empty batches shield their neighbours).
double interface_total(const PipelineInstance& inst,
                       const std::vector<std::optional<ProductId>>& assign,
                       std::vector<std::tuple<BatchId, BatchId, ProductId, ProductId, double>>*
                           pairs_out = nullptr) {
    double total = 0.0;
    const int n = static_cast<int>(assign.size());
    for (BatchId i = 1; i < n; ++i) {
        if (!assign[i]) continue;
        BatchId j = i - 1;
        if (inst.options.interface_across_empty) {
            while (j >= 0 && !assign[j]) --j;
        }
        if (j < 0 || !assign[j]) continue;
        const double c =
            inst.cost_scale * inst.rules.interface_cost[*assign[j]][*assign[i]];
        if (c <= 0.0) continue;
        total += c;
        if (pairs_out) pairs_out->push_back({j, i, *assign[j], *assign[i], c});
    }
    return total;
}

}  // namespace

Trajectory simulate(const PipelineInstance& inst, const OperatingPlan& plan) {
    const int S = static_cast<int>(plan.slots.size());
    const int N = inst.batch_count();
    const int L = static_cast<int>(inst.lines.size());

    Trajectory tr;
    tr.volume.assign(S + 1, std::vector<std::vector<double>>(N, std::vector<double>(L, 0.0)));
    tr.coordinate = tr.volume;

    for (int i = 0; i < inst.old_batch_count(); ++i)
        for (int l = 0; l < L; ++l) tr.volume[0][i][l] = inst.initial[i].volume[l];

    for (int t = 1; t <= S; ++t) {
        tr.volume[t] = tr.volume[t - 1];
        const auto& slot = plan.slots[t - 1];
        for (const auto& inj : slot.injections) {
            const LineId l = inst.inputs[inj.input].line;
            tr.volume[t][inj.batch][l] += inj.volume;
        }
        for (const auto& tf : slot.transfers) {
            tr.volume[t][tf.batch][tf.into_line - 1] -= tf.volume;
            tr.volume[t][tf.batch][tf.into_line] += tf.volume;
        }
        for (const auto& del : slot.deliveries) {
            const LineId l = inst.outputs[del.output].line;
            tr.volume[t][del.batch][l] -= del.volume;
        }
    }
    // Eq. (3) chain: the hindmost batch anchors at the line origin.
    for (int t = 0; t <= S; ++t) {
        for (int l = 0; l < L; ++l) {
            double ahead = 0.0;
            for (int i = N - 1; i >= 0; --i) {
                ahead += tr.volume[t][i][l];
                tr.coordinate[t][i][l] = ahead;
            }
        }
    }
    return tr;
}

OracleReport check(const PipelineInstance& inst, const OperatingPlan& plan) {
    OracleReport rep;
    const int S = static_cast<int>(plan.slots.size());
    const int N = inst.batch_count();
    const int L = static_cast<int>(inst.lines.size());
    const double dt = inst.grid.dt_hours;
    const auto assign = effective_assignment(inst, plan);
    const auto tr = simulate(inst, plan);

    auto flag = [&rep](std::string rule, std::string where, double measured, double bound,
                       std::string msg) {
        rep.violations.push_back({std::move(rule), std::move(where), measured, bound, std::move(msg)});
    };
    auto at = [](int i, int extra = -1, int t = -1) {
        std::string s = "i" + std::to_string(i + 1);
        if (extra >= 0) s += "/l" + std::to_string(extra + 1);
        if (t >= 0) s += "/t" + std::to_string(t);
        return s;
    };

    // Structural checks on indices.
    for (int t = 1; t <= S; ++t) {
        for (const auto& inj : plan.slots[t - 1].injections) {
            if (inj.input < 0 || inj.input >= static_cast<int>(inst.inputs.size()) ||
                inj.batch < 0 || inj.batch >= N || inj.product < 0 ||
                inj.product >= static_cast<int>(inst.products.size()))
                throw ValidationError("plan.slots[" + std::to_string(t - 1) + "].injections",
                                      "index out of range");
            if (inj.volume < -kTol)
                flag("eq12", at(inj.batch, inst.inputs[inj.input].line, t), inj.volume, 0,
                     "negative injection volume");
        }
        for (const auto& del : plan.slots[t - 1].deliveries)
            if (del.output < 0 || del.output >= static_cast<int>(inst.outputs.size()) ||
                del.batch < 0 || del.batch >= N)
                throw ValidationError("plan.slots[" + std::to_string(t - 1) + "].deliveries",
                                      "index out of range");
        for (const auto& tf : plan.slots[t - 1].transfers)
            if (tf.into_line < 1 || tf.into_line >= L || tf.batch < 0 || tf.batch >= N)
                throw ValidationError("plan.slots[" + std::to_string(t - 1) + "].transfers",
                                      "index out of range");
    }

    // Eq. (2): forbidden sequences among adjacent assigned batches.
    for (BatchId i = 1; i < N; ++i)
        if (assign[i - 1] && assign[i] && inst.rules.forbidden[*assign[i - 1]][*assign[i]])
            flag("eq2", at(i), 1, 0,
                 "forbidden adjacency " + inst.products[*assign[i - 1]].id + " -> " +
                     inst.products[*assign[i]].id);

    std::vector<std::vector<double>> pumped_by_node(inst.inputs.size(),
                                                    std::vector<double>(inst.products.size(), 0.0));
    std::vector<std::vector<double>> pumped_by_batch(N, std::vector<double>(inst.products.size(), 0.0));

    for (int t = 1; t <= S; ++t) {
        const auto& slot = plan.slots[t - 1];

        // --- Injections: Eqs. (7)-(16).
        std::vector<double> node_total(inst.inputs.size(), 0.0);
        std::vector<int> node_batches(inst.inputs.size(), 0);
        for (const auto& inj : slot.injections) {
            if (inj.volume <= kTol) continue;
            const auto& node = inst.inputs[inj.input];
            const LineId l = node.line;
            node_total[inj.input] += inj.volume;
            node_batches[inj.input] += 1;
            pumped_by_node[inj.input][inj.product] += inj.volume;
            pumped_by_batch[inj.batch][inj.product] += inj.volume;

            if (!assign[inj.batch] || *assign[inj.batch] != inj.product)
                flag("eq1", at(inj.batch, l, t), inj.product, -1,
                     "injected product does not match the batch assignment");
            const double tail = tr.coordinate[t][inj.batch][l] - tr.volume[t][inj.batch][l];
            if (tail > kTol)
                flag("eq10", at(inj.batch, l, t), tail, 0,
                     "injected batch tail is not at the line origin");
            if (l >= 1) {
                const double f_prev = tr.coordinate[t][inj.batch][l - 1];
                if (f_prev < inst.lines[l - 1].volume - kTol)
                    flag("eq11", at(inj.batch, l - 1, t), f_prev, inst.lines[l - 1].volume,
                         "batch has not cleared the previous line");
            }
            if (inj.volume < node.inject_min - kTol || inj.volume > node.inject_max + kTol)
                flag("eq12", at(inj.batch, l, t), inj.volume, node.inject_max,
                     "injection volume outside [r_min, r_max]");
        }
        for (size_t k = 0; k < inst.inputs.size(); ++k) {
            const auto& node = inst.inputs[k];
            if (node_batches[k] > 1)
                flag("eq7", "l" + std::to_string(node.line + 1) + "/t" + std::to_string(t),
                     node_batches[k], 1, "more than one batch injected by a node in one slot");
            if (node_total[k] > kTol) {
                if (node_total[k] < dt * node.rate_min - kTol ||
                    node_total[k] > dt * node.rate_max + kTol)
                    flag("eq13", "l" + std::to_string(node.line + 1) + "/t" + std::to_string(t),
                         node_total[k] / dt, node.rate_max,
                         "pump rate outside [vr_min, vr_max]");
            }
        }
        int active_nodes = 0;
        for (double v : node_total)
            if (v > kTol) ++active_nodes;
        if (inst.options.force_active_injection && active_nodes < 1)
            flag("eq8", "t" + std::to_string(t), 0, 1, "no active input node in slot");
        if (inst.options.exclusive_injection && active_nodes > 1)
            flag("excl", "t" + std::to_string(t), active_nodes, 1,
                 "more than one active input node in an exclusive-injection instance");

        // --- Deliveries: Eqs. (17)-(20), (22).
        std::vector<double> line_delivered(L, 0.0);
        for (const auto& del : slot.deliveries) {
            if (del.volume <= kTol) continue;
            const auto& out = inst.outputs[del.output];
            const LineId l = out.line;
            line_delivered[l] += del.volume;
            if (!assign[del.batch])
                flag("eq22", at(del.batch, l, t), 0, 0, "delivery from an unassigned batch");
            const double tail_prev =
                tr.coordinate[t - 1][del.batch][l] - tr.volume[t - 1][del.batch][l];
            if (tail_prev > out.offset + kTol)
                flag("eq17", at(del.batch, l, t), tail_prev, out.offset,
                     "batch tail already past the depot offset");
            if (tr.coordinate[t][del.batch][l] < out.offset - kTol)
                flag("eq18", at(del.batch, l, t), tr.coordinate[t][del.batch][l], out.offset,
                     "batch head short of the depot offset");
            if (del.volume < out.deliver_min - kTol || del.volume > out.deliver_max + kTol)
                flag("eq19", at(del.batch, l, t), del.volume, out.deliver_max,
                     "delivery volume outside [d_min, d_max]");
        }
        // Eq. (20): per (batch, depot) availability.
        for (const auto& del : slot.deliveries) {
            if (del.volume <= kTol) continue;
            const auto& out = inst.outputs[del.output];
            const LineId l = out.line;
            double same_batch_total = 0.0;
            for (const auto& d2 : slot.deliveries)
                if (d2.batch == del.batch && inst.outputs[d2.output].line == l)
                    same_batch_total += d2.volume;
            double inflow = 0.0;
            for (const auto& inj : slot.injections)
                if (inj.batch == del.batch && inst.inputs[inj.input].line == l)
                    inflow += inj.volume;
            for (const auto& tf : slot.transfers)
                if (tf.batch == del.batch && tf.into_line == l) inflow += tf.volume;
            const double tail = tr.coordinate[t][del.batch][l] - tr.volume[t][del.batch][l];
            const double avail = out.offset - tail + inflow;
            if (same_batch_total > avail + kTol)
                flag("eq20", at(del.batch, l, t), same_batch_total, avail,
                     "delivered volume exceeds the batch volume behind the offset");
        }

        // --- Transfers: Eqs. (24)-(27).
        std::vector<double> line_transfer_in(L, 0.0);
        for (const auto& tf : slot.transfers) {
            if (tf.volume <= kTol) continue;
            const LineId l = tf.into_line;
            line_transfer_in[l] += tf.volume;
            const double tail_dst = tr.coordinate[t][tf.batch][l] - tr.volume[t][tf.batch][l];
            if (tail_dst > kTol)
                flag("eq24", at(tf.batch, l, t), tail_dst, 0,
                     "transferred batch does not start at the new line origin");
            if (tr.coordinate[t][tf.batch][l - 1] < inst.lines[l - 1].volume - kTol)
                flag("eq25", at(tf.batch, l - 1, t), tr.coordinate[t][tf.batch][l - 1],
                     inst.lines[l - 1].volume, "transferred batch has not reached the line end");
            if (tf.volume < inst.rules.transfer_min - kTol ||
                tf.volume > inst.rules.transfer_max + kTol)
                flag("eq26", at(tf.batch, l, t), tf.volume, inst.rules.transfer_max,
                     "transfer volume outside [S_min, S_max]");
        }
        for (LineId l = 1; l < L; ++l) {
            if (line_transfer_in[l] > inst.rules.transfer_max + kTol)
                flag("eq27", "l" + std::to_string(l + 1) + "/t" + std::to_string(t),
                     line_transfer_in[l], inst.rules.transfer_max, "total transfer exceeds S_max");
            const int k = inst.input_index_at_line(l);
            if (k >= 0 && line_transfer_in[l] > kTol && node_total[k] > kTol)
                flag("eq27", "l" + std::to_string(l + 1) + "/t" + std::to_string(t),
                     line_transfer_in[l], 0,
                     "transfer into a line whose input node is injecting");
        }

        // --- Line balance: Eqs. (30)-(31); negative volumes (A1).
        for (LineId l = 0; l < L; ++l) {
            double inflow = line_transfer_in[l];
            const int k = inst.input_index_at_line(l);
            if (k >= 0) inflow += node_total[k];
            double outflow = line_delivered[l];
            if (l + 1 < L) {
                for (const auto& tf : slot.transfers)
                    if (tf.into_line == l + 1) outflow += tf.volume;
            }
            if (std::abs(inflow - outflow) > kTol)
                flag("eq31", "l" + std::to_string(l + 1) + "/t" + std::to_string(t), inflow,
                     outflow, "line inflow does not match outflow");
            double sum = 0.0;
            for (int i = 0; i < N; ++i) {
                sum += tr.volume[t][i][l];
                if (tr.volume[t][i][l] < -kTol)
                    flag("eq28", at(i, l, t), tr.volume[t][i][l], 0,
                         "negative batch volume (withdrawal exceeds availability)");
            }
            if (std::abs(sum - inst.lines[l].volume) > kTol)
                flag("eq30", "l" + std::to_string(l + 1) + "/t" + std::to_string(t), sum,
                     inst.lines[l].volume, "line is not full");
        }
        // Eq. (5): coordinates never move backwards.
        for (int i = 0; i < N; ++i)
            for (int l = 0; l < L; ++l)
                if (tr.coordinate[t][i][l] < tr.coordinate[t - 1][i][l] - kTol)
                    flag("eq5", at(i, l, t), tr.coordinate[t][i][l],
                         tr.coordinate[t - 1][i][l], "batch moved backwards");
    }

    // Eq. (16) and the per-product cap (15), horizon-wide.
    for (size_t k = 0; k < inst.inputs.size(); ++k)
        for (size_t p = 0; p < inst.products.size(); ++p)
            if (pumped_by_node[k][p] > inst.inputs[k].inventory[p] + kTol)
                flag("eq16", "l" + std::to_string(inst.inputs[k].line + 1) + "/p" + inst.products[p].id,
                     pumped_by_node[k][p], inst.inputs[k].inventory[p],
                     "injections exceed node inventory");
    for (int i = 0; i < N; ++i)
        for (size_t p = 0; p < inst.products.size(); ++p)
            if (pumped_by_batch[i][p] > inst.rules.product_cap[p] + kTol)
                flag("eq15", at(i) + "/p" + inst.products[p].id, pumped_by_batch[i][p],
                     inst.rules.product_cap[p], "injections exceed the product cap");

    // Eq. (23): unmet demand is a cost, not a violation.
    std::vector<std::vector<double>> delivered(inst.products.size(),
                                               std::vector<double>(inst.outputs.size(), 0.0));
    for (int t = 1; t <= S; ++t)
        for (const auto& del : plan.slots[t - 1].deliveries)
            if (assign[del.batch])
                delivered[*assign[del.batch]][del.output] += del.volume;
    for (size_t p = 0; p < inst.products.size(); ++p)
        for (size_t o = 0; o < inst.outputs.size(); ++o) {
            const double shortfall = inst.outputs[o].demand[p] - delivered[p][o];
            if (shortfall > kTol)
                rep.shortfalls.push_back({"eq23",
                                          "p" + inst.products[p].id + "/" + inst.outputs[o].id +
                                              "_l" + std::to_string(inst.outputs[o].line + 1),
                                          delivered[p][o], inst.outputs[o].demand[p],
                                          "demand shortfall (backorder)"});
        }
    return rep;
}

PlanCost price_plan(const PipelineInstance& inst, const OperatingPlan& plan) {
    PlanCost cost;
    const auto assign = effective_assignment(inst, plan);
    for (const auto& slot : plan.slots)
        for (const auto& inj : slot.injections)
            cost.pumping +=
                inst.cost_scale * inst.inputs[inj.input].pumping_cost[inj.product] * inj.volume;
    cost.interface = interface_total(inst, assign);

    std::vector<std::vector<double>> delivered(inst.products.size(),
                                               std::vector<double>(inst.outputs.size(), 0.0));
    for (const auto& slot : plan.slots)
        for (const auto& del : slot.deliveries)
            if (assign[del.batch]) delivered[*assign[del.batch]][del.output] += del.volume;
    for (size_t p = 0; p < inst.products.size(); ++p)
        for (size_t o = 0; o < inst.outputs.size(); ++o) {
            const double short_v = std::max(0.0, inst.outputs[o].demand[p] - delivered[p][o]);
            cost.backorder_volume += short_v;
            cost.backorder +=
                short_v * inst.backorder_cost_for(static_cast<ProductId>(p), static_cast<int>(o));
        }
    return cost;
}

// --------------------------------------------------------------------------
// Plan JSON round-trip.

OperatingPlan plan_from_json(const PipelineInstance& inst, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("plan JSON: ") + e.what());
    }
    if (j.contains("plan")) j = j["plan"];
    try {
        OperatingPlan plan;
        plan.assignment.assign(inst.batch_count(), std::nullopt);
        const json assign_j = j.value("assignment", json::object());
        for (const auto& [key, value] : assign_j.items()) {
            const int i = std::stoi(key) - 1;
            if (i < 0 || i >= inst.batch_count())
                throw ValidationError("plan.assignment", "batch index out of range");
            plan.assignment[i] = inst.product_index(value.get<std::string>());
        }
        for (const auto& sj : j.at("slots")) {
            SlotDecision slot;
            for (const auto& ij : sj.value("injections", json::array())) {
                InjectionDecision d;
                const int line = ij.at("line").get<int>() - 1;
                d.input = inst.input_index_at_line(line);
                if (d.input < 0) throw ValidationError("plan.injections", "no input node at line");
                d.batch = ij.at("batch").get<int>() - 1;
                d.product = inst.product_index(ij.at("product").get<std::string>());
                d.volume = ij.at("volume").get<double>();
                slot.injections.push_back(d);
            }
            for (const auto& dj : sj.value("deliveries", json::array())) {
                DeliveryDecision d;
                const int line = dj.at("line").get<int>() - 1;
                const int depot = dj.at("depot").get<int>() - 1;
                d.output = -1;
                for (size_t o = 0; o < inst.outputs.size(); ++o)
                    if (inst.outputs[o].line == line && inst.outputs[o].index_in_line == depot)
                        d.output = static_cast<int>(o);
                if (d.output < 0) throw ValidationError("plan.deliveries", "unknown depot");
                d.batch = dj.at("batch").get<int>() - 1;
                d.volume = dj.at("volume").get<double>();
                slot.deliveries.push_back(d);
            }
            for (const auto& tj : sj.value("transfers", json::array())) {
                TransferDecision d;
                d.into_line = tj.at("into_line").get<int>() - 1;
                d.batch = tj.at("batch").get<int>() - 1;
                d.volume = tj.at("volume").get<double>();
                slot.transfers.push_back(d);
            }
            plan.slots.push_back(std::move(slot));
        }
        return plan;
    } catch (const json::exception& e) {
        throw ParseError(std::string("plan JSON: ") + e.what());
    }
}

std::string plan_to_json(const PipelineInstance& inst, const OperatingPlan& plan) {
    json j;
    j["num_slots"] = plan.slots.size();
    json assign = json::object();
    for (size_t i = 0; i < plan.assignment.size(); ++i)
        if (plan.assignment[i] &&
            (static_cast<int>(i) >= inst.old_batch_count() || !inst.initial[i].product))
            assign[std::to_string(i + 1)] = inst.products[*plan.assignment[i]].id;
    j["assignment"] = assign;
    j["slots"] = json::array();
    for (const auto& slot : plan.slots) {
        json sj;
        sj["injections"] = json::array();
        for (const auto& d : slot.injections)
            sj["injections"].push_back({{"line", inst.inputs[d.input].line + 1},
                                        {"batch", d.batch + 1},
                                        {"product", inst.products[d.product].id},
                                        {"volume", d.volume}});
        sj["deliveries"] = json::array();
        for (const auto& d : slot.deliveries)
            sj["deliveries"].push_back({{"line", inst.outputs[d.output].line + 1},
                                        {"depot", inst.outputs[d.output].index_in_line + 1},
                                        {"batch", d.batch + 1},
                                        {"volume", d.volume}});
        sj["transfers"] = json::array();
        for (const auto& d : slot.transfers)
            sj["transfers"].push_back({{"into_line", d.into_line + 1},
                                       {"batch", d.batch + 1},
                                       {"volume", d.volume}});
        j["slots"].push_back(sj);
    }
    return j.dump(2) + "\n";
}

// --------------------------------------------------------------------------
// Brute-force oracle.

namespace {

struct SearchState {
    std::vector<std::vector<double>> volume;  // [batch][line]
    std::vector<std::optional<ProductId>> assign;
    std::vector<std::vector<double>> inventory_left;  // [input][product]
};

struct Enumerator {
    const PipelineInstance& inst;
    double q;
    long long cap;
    long long nodes = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    OperatingPlan best_plan;
    std::vector<double> best_key;
    bool found = false;

    std::vector<double> coordinate(const std::vector<std::vector<double>>& vol, int l) const {
        std::vector<double> f(vol.size());
        double ahead = 0.0;
        for (int i = static_cast<int>(vol.size()) - 1; i >= 0; --i) {
            ahead += vol[i][l];
            f[i] = ahead;
        }
        return f;
    }

    // Candidate injections for one node: idle plus (batch, product, volume)
    // combinations whose positional gating already holds at slot start.
    std::vector<std::optional<InjectionDecision>> injection_options(const SearchState& st,
                                                                    int k) const {
        std::vector<std::optional<InjectionDecision>> opts = {std::nullopt};
        const auto& node = inst.inputs[k];
        const LineId l = node.line;
        const double lo = std::max(node.inject_min, inst.grid.dt_hours * node.rate_min);
        const double hi = std::min(node.inject_max, inst.grid.dt_hours * node.rate_max);
        const auto f = coordinate(st.volume, l);
        std::vector<double> f_prev;
        if (l >= 1) f_prev = coordinate(st.volume, l - 1);

        for (BatchId i : inst.input_batches.at(k)) {
            const double tail = f[i] - st.volume[i][l];
            if (tail > kTol) continue;
            if (l >= 1 && f_prev[i] < inst.lines[l - 1].volume - kTol) continue;
            std::vector<ProductId> products;
            if (st.assign[i]) {
                products.push_back(*st.assign[i]);
            } else {
                for (size_t p = 0; p < inst.products.size(); ++p)
                    products.push_back(static_cast<ProductId>(p));
            }
            const double start = std::max(q, std::ceil((lo - kTol) / q) * q);
            for (ProductId p : products) {
                for (double v = start; v <= hi + kTol; v += q) {
                    if (v > st.inventory_left[k][p] + kTol) break;
                    opts.push_back(InjectionDecision{k, i, p, v});
                }
            }
        }
        return opts;
    }

    // FIFO transfer bundles across a boundary for a given total volume.
    std::optional<std::vector<TransferDecision>> fifo_transfers(
        const std::vector<std::vector<double>>& vol, LineId into, double total) const {
        std::vector<TransferDecision> out;
        if (total <= kTol) return out;
        const auto f = coordinate(vol, into - 1);
        const double end = inst.lines[into - 1].volume;
        double remaining = total;
        // Cross batches front to back; every crossing batch must sit at the
        // line end once the ones ahead of it have fully crossed.
        std::vector<std::pair<BatchId, double>> in_line;
        for (int i = 0; i < static_cast<int>(vol.size()); ++i)
            if (vol[i][into - 1] > kTol) in_line.push_back({i, vol[i][into - 1]});
        // in_line is ordered front (low index) first; front has head at f.
        for (auto& [i, w] : in_line) {
            if (remaining <= kTol) break;
            if (f[i] < end - kTol) return std::nullopt;  // not at the boundary yet
            const double take = std::min(w, remaining);
            if (take < inst.rules.transfer_min - kTol || take > inst.rules.transfer_max + kTol)
                return std::nullopt;
            out.push_back({into, i, take});
            remaining -= take;
        }
        if (remaining > kTol) return std::nullopt;  // nothing left to push through
        return out;
    }

    // Enumerate delivery splits on one line: distribute `amount` over
    // (depot, batch) pairs in grid steps within the per-event window. A batch
    // qualifies as a source when it holds volume in the line or receives
    // inflow this slot.
    void delivery_splits(const SearchState& st, LineId l, double amount,
                         const std::vector<double>& inflow_by_batch,
                         std::vector<DeliveryDecision>& acc,
                         std::vector<std::vector<DeliveryDecision>>& out, size_t from) const {
        if (amount <= kTol) {
            out.push_back(acc);
            return;
        }
        std::vector<std::pair<int, BatchId>> pairs;
        for (size_t o = from; o < inst.outputs.size(); ++o) {
            if (inst.outputs[o].line != l) continue;
            for (BatchId i : inst.depot_batches.at(o)) {
                if (st.volume[i][l] <= kTol && inflow_by_batch[i] <= kTol) continue;
                bool used = false;
                for (const auto& d : acc)
                    if (d.output == static_cast<int>(o) && d.batch == i) used = true;
                if (!used) pairs.push_back({static_cast<int>(o), i});
            }
        }
        for (const auto& [o, i] : pairs) {
            const auto& outn = inst.outputs[o];
            const double lo = std::max(q, std::ceil((outn.deliver_min - kTol) / q) * q);
            const double hi = std::min({outn.deliver_max, amount});
            for (double v = lo; v <= hi + kTol; v += q) {
                acc.push_back({o, i, v});
                delivery_splits(st, l, amount - v, inflow_by_batch, acc, out, o);
                acc.pop_back();
            }
        }
    }

    void encode(const OperatingPlan& plan, std::vector<double>& key) const {
        key.clear();
        for (const auto& slot : plan.slots) {
            for (const auto& d : slot.injections) {
                key.push_back(d.input);
                key.push_back(d.batch);
                key.push_back(d.product);
                key.push_back(d.volume);
            }
            key.push_back(-1);
            for (const auto& d : slot.deliveries) {
                key.push_back(d.output);
                key.push_back(d.batch);
                key.push_back(d.volume);
            }
            key.push_back(-2);
            for (const auto& d : slot.transfers) {
                key.push_back(d.into_line);
                key.push_back(d.batch);
                key.push_back(d.volume);
            }
            key.push_back(-3);
        }
    }

    void offer(const OperatingPlan& plan) {
        const auto rep = check(inst, plan);
        if (!rep.feasible()) return;
        const double cost = price_plan(inst, plan).total();
        std::vector<double> key;
        encode(plan, key);
        if (!found || cost < best_cost - 1e-9 ||
            (std::abs(cost - best_cost) <= 1e-9 && key < best_key)) {
            found = true;
            best_cost = cost;
            best_plan = plan;
            best_key = std::move(key);
        }
    }

    void merge(const Enumerator& other) {
        nodes += other.nodes;
        if (!other.found) return;
        if (!found || other.best_cost < best_cost - 1e-9 ||
            (std::abs(other.best_cost - best_cost) <= 1e-9 && other.best_key < best_key)) {
            found = true;
            best_cost = other.best_cost;
            best_plan = other.best_plan;
            best_key = other.best_key;
        }
    }

    // All slot decisions reachable from `st`, in deterministic order.
    std::vector<SlotDecision> slot_options(const SearchState& st) {
        std::vector<SlotDecision> result;
        const int L = static_cast<int>(inst.lines.size());

        std::vector<std::vector<std::optional<InjectionDecision>>> per_node;
        for (size_t k = 0; k < inst.inputs.size(); ++k)
            per_node.push_back(injection_options(st, static_cast<int>(k)));

        std::vector<std::optional<InjectionDecision>> chosen(inst.inputs.size());
        std::vector<int> pick(inst.inputs.size(), 0);
        // Cartesian product over nodes.
        while (true) {
            for (size_t k = 0; k < inst.inputs.size(); ++k) chosen[k] = per_node[k][pick[k]];
            int active = 0;
            for (const auto& c : chosen)
                if (c) ++active;
            const bool ok_active =
                (!inst.options.exclusive_injection || active <= 1) &&
                (!inst.options.force_active_injection || active >= 1);
            if (ok_active) {
                // Inflow per line, then enumerate transfer totals and
                // delivery splits line by line, left to right.
                std::vector<double> inject_in(L, 0.0);
                for (const auto& c : chosen)
                    if (c) inject_in[inst.inputs[c->input].line] += c->volume;

                struct Frame {
                    LineId l;
                    double inflow;
                };
                std::vector<SlotDecision> partial = {SlotDecision{}};
                for (const auto& c : chosen)
                    if (c) partial[0].injections.push_back(*c);

                std::vector<std::pair<SlotDecision, double>> level = {
                    {partial[0], inject_in[0]}};
                for (LineId l = 0; l < L; ++l) {
                    std::vector<std::pair<SlotDecision, double>> next_level;
                    for (auto& [dec, inflow] : level) {
                        // Transfers out of line l (into l+1): 0, q, 2q, ...
                        const double max_out =
                            (l + 1 < L) ? std::min(inflow, inst.rules.transfer_max) : 0.0;
                        for (double t_out = 0.0; t_out <= max_out + kTol; t_out += q) {
                            if (l + 1 < L) {
                                const int k2 = inst.input_index_at_line(l + 1);
                                bool inj_next = false;
                                if (k2 >= 0 && chosen[k2]) inj_next = true;
                                if (t_out > kTol && inj_next) continue;  // Eq. (27)
                            }
                            auto bundle = (t_out > kTol)
                                              ? fifo_transfers(st.volume, l + 1, t_out)
                                              : std::make_optional(std::vector<TransferDecision>{});
                            if (!bundle) continue;
                            const double deliver_total = inflow - t_out;
                            // Split deliveries over this line's depots.
                            std::vector<double> inflow_by_batch(st.volume.size(), 0.0);
                            for (const auto& c : chosen)
                                if (c && inst.inputs[c->input].line == l)
                                    inflow_by_batch[c->batch] += c->volume;
                            for (const auto& tf : dec.transfers)
                                if (tf.into_line == l) inflow_by_batch[tf.batch] += tf.volume;
                            std::vector<std::vector<DeliveryDecision>> splits;
                            std::vector<DeliveryDecision> acc;
                            delivery_splits(st, l, deliver_total, inflow_by_batch, acc, splits, 0);
                            for (const auto& split : splits) {
                                SlotDecision d2 = dec;
                                for (const auto& tf : *bundle) d2.transfers.push_back(tf);
                                for (const auto& dl : split) d2.deliveries.push_back(dl);
                                next_level.push_back(
                                    {std::move(d2), (l + 1 < L) ? inject_in[l + 1] + t_out : 0.0});
                            }
                        }
                    }
                    level = std::move(next_level);
                    if (level.empty()) break;
                }
                for (auto& [dec, unused] : level) result.push_back(std::move(dec));
            }
            // advance cartesian counter
            size_t k = 0;
            while (k < pick.size()) {
                if (++pick[k] < static_cast<int>(per_node[k].size())) break;
                pick[k] = 0;
                ++k;
            }
            if (k == pick.size()) break;
        }
        return result;
    }

    SearchState apply(const SearchState& st, const SlotDecision& dec) const {
        SearchState out = st;
        for (const auto& inj : dec.injections) {
            out.volume[inj.batch][inst.inputs[inj.input].line] += inj.volume;
            out.inventory_left[inj.input][inj.product] -= inj.volume;
            if (!out.assign[inj.batch]) out.assign[inj.batch] = inj.product;
        }
        for (const auto& tf : dec.transfers) {
            out.volume[tf.batch][tf.into_line - 1] -= tf.volume;
            out.volume[tf.batch][tf.into_line] += tf.volume;
        }
        for (const auto& del : dec.deliveries)
            out.volume[del.batch][inst.outputs[del.output].line] -= del.volume;
        return out;
    }

    void dfs(const SearchState& st, OperatingPlan& plan, int slots_left) {
        if (++nodes > cap)
            throw SearchSpaceTooLarge("brute force exceeded " + std::to_string(cap) +
                                      " candidates");
        if (slots_left == 0) {
            for (size_t i = 0; i < st.assign.size(); ++i) plan.assignment[i] = st.assign[i];
            offer(plan);
            return;
        }
        for (const auto& dec : slot_options(st)) {
            plan.slots.push_back(dec);
            dfs(apply(st, dec), plan, slots_left - 1);
            plan.slots.pop_back();
        }
    }
};

SearchState initial_state(const PipelineInstance& inst) {
    SearchState st;
    st.volume.assign(inst.batch_count(), std::vector<double>(inst.lines.size(), 0.0));
    for (int i = 0; i < inst.old_batch_count(); ++i)
        for (size_t l = 0; l < inst.lines.size(); ++l)
            st.volume[i][l] = inst.initial[i].volume[l];
    st.assign.assign(inst.batch_count(), std::nullopt);
    for (int i = 0; i < inst.old_batch_count(); ++i) st.assign[i] = inst.initial[i].product;
    for (const auto& n : inst.inputs) st.inventory_left.push_back(n.inventory);
    return st;
}

}  // namespace

BruteForceResult brute_force_optimize(const PipelineInstance& inst, double quantum,
                                      BruteForceOptions opts) {
    if (quantum <= 0) throw Error("brute force needs a positive volume quantum");
    const int slots = opts.max_slots > 0 ? opts.max_slots : inst.grid.slots;

    SearchState st0 = initial_state(inst);
    Enumerator root{inst, quantum, opts.candidate_cap};
    auto first = root.slot_options(st0);

    std::vector<Enumerator> workers;
    workers.reserve(first.size());
    for (size_t i = 0; i < first.size(); ++i)
        workers.push_back(Enumerator{inst, quantum, opts.candidate_cap});

    std::exception_ptr error;
#ifdef _OPENMP
    const bool parallel = opts.parallel;
#else
    const bool parallel = false;
#endif
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < static_cast<long>(first.size()); ++i) {
            try {
                OperatingPlan plan;
                plan.assignment.assign(inst.batch_count(), std::nullopt);
                plan.slots.push_back(first[i]);
                workers[i].dfs(workers[i].apply(st0, first[i]), plan, slots - 1);
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
#endif
    } else {
        for (size_t i = 0; i < first.size(); ++i) {
            OperatingPlan plan;
            plan.assignment.assign(inst.batch_count(), std::nullopt);
            plan.slots.push_back(first[i]);
            workers[i].dfs(workers[i].apply(st0, first[i]), plan, slots - 1);
        }
    }
    if (error) std::rethrow_exception(error);

    // Deterministic merge in first-decision order.
    for (auto& w : workers) root.merge(w);

    BruteForceResult res;
    res.nodes_explored = root.nodes;
    res.feasible = root.found;
    if (root.found) {
        res.best_cost = root.best_cost;
        res.best_plan = root.best_plan;
    }
    return res;
}

// --------------------------------------------------------------------------
// Plan -> MILP assignment bridge.

std::vector<double> assignment_from_plan(const PipelineInstance& inst, const MilpModel& model,
                                         const OperatingPlan& plan) {
    OperatingPlan padded = plan;
    while (static_cast<int>(padded.slots.size()) < inst.grid.slots)
        padded.slots.push_back(SlotDecision{});
    if (static_cast<int>(padded.slots.size()) > inst.grid.slots)
        throw Error("plan has more slots than the instance grid");

    const auto tr = simulate(inst, padded);
    const auto assign = effective_assignment(inst, padded);
    std::vector<double> x(model.vars.size(), 0.0);

    auto set = [&](VarKind k, std::array<int, 5> idx, double v) {
        const auto ref = model.find(k, idx);
        if (ref.valid()) x[ref.id] = v;
    };

    for (int i = 0; i < inst.batch_count(); ++i)
        if (assign[i]) set(VarKind::Y, {i, *assign[i], -1, -1, -1}, 1.0);

    for (int t = 0; t <= inst.grid.slots; ++t)
        for (int i = 0; i < inst.batch_count(); ++i)
            for (size_t l = 0; l < inst.lines.size(); ++l) {
                set(VarKind::F, {i, static_cast<int>(l), t, -1, -1}, tr.coordinate[t][i][l]);
                set(VarKind::W_VOL, {i, static_cast<int>(l), t, -1, -1}, tr.volume[t][i][l]);
            }

    for (int t = 1; t <= inst.grid.slots; ++t) {
        const auto& slot = padded.slots[t - 1];
        for (const auto& inj : slot.injections) {
            if (inj.volume <= kTol) continue;
            const LineId l = inst.inputs[inj.input].line;
            set(VarKind::W_ACT, {inj.batch, l, t, -1, -1}, 1.0);
            set(VarKind::R, {inj.batch, l, t, -1, -1}, inj.volume);
            set(VarKind::RP, {inj.batch, inj.product, l, t, -1}, inj.volume);
        }
        for (const auto& del : slot.deliveries) {
            if (del.volume <= kTol) continue;
            set(VarKind::X_ACT, {del.batch, del.output, t, -1, -1}, 1.0);
            // accumulate: several deliveries to one (batch, depot, slot) fold
            const auto d = model.find(VarKind::D, {del.batch, del.output, t, -1, -1});
            if (d.valid()) x[d.id] += del.volume;
            if (assign[del.batch]) {
                const auto dp =
                    model.find(VarKind::DP, {del.batch, *assign[del.batch], del.output, t, -1});
                if (dp.valid()) x[dp.id] += del.volume;
            }
        }
        for (const auto& tf : slot.transfers) {
            if (tf.volume <= kTol) continue;
            set(VarKind::U_ACT, {tf.batch, tf.into_line, t, -1, -1}, 1.0);
            set(VarKind::S, {tf.batch, tf.into_line, t, -1, -1}, tf.volume);
        }
    }

    // Backorder from shortfalls.
    std::vector<std::vector<double>> delivered(inst.products.size(),
                                               std::vector<double>(inst.outputs.size(), 0.0));
    for (const auto& slot : padded.slots)
        for (const auto& del : slot.deliveries)
            if (assign[del.batch]) delivered[*assign[del.batch]][del.output] += del.volume;
    for (size_t p = 0; p < inst.products.size(); ++p)
        for (size_t o = 0; o < inst.outputs.size(); ++o)
            set(VarKind::BORDER, {static_cast<int>(p), static_cast<int>(o), -1, -1, -1},
                std::max(0.0, inst.outputs[o].demand[p] - delivered[p][o]));

    // Interface costs at their optimum values for this assignment.
    std::vector<std::tuple<BatchId, BatchId, ProductId, ProductId, double>> pairs;
    interface_total(inst, assign, &pairs);
    for (const auto& [j, i, a, b, c] : pairs) set(VarKind::IC, {i, -1, -1, -1, -1}, c);

    // Grid multipliers, when the model carries them (rows: target - q*k = 0).
    for (const auto& row : model.rows) {
        if (row.name.rfind("grid_", 0) != 0 || row.terms.size() != 2) continue;
        const int target = row.terms[0].var.id;
        const int k = row.terms[1].var.id;
        const double quantum = -row.terms[1].coef;
        if (quantum > 0) x[k] = x[target] / quantum;
    }
    return x;
}

}  // namespace pipesched
