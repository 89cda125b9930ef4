#include "pipesched/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pipesched {

using nlohmann::json;

ProductId PipelineInstance::product_index(const std::string& id) const {
    for (size_t p = 0; p < products.size(); ++p)
        if (products[p].id == id) return static_cast<ProductId>(p);
    throw ValidationError("products", "unknown product id '" + id + "'");
}

namespace {

// Global coordinate of a batch's upper end: the furthest line in which it
// has a positive coordinate (a zero coordinate means "not yet entered").
double global_head(const PipelineInstance& inst, const BatchState& b) {
    for (int l = static_cast<int>(inst.lines.size()) - 1; l >= 0; --l)
        if (b.coordinate[l] > 0.0) return inst.line_origin(l) + b.coordinate[l];
    return 0.0;
}

double batch_volume(const BatchState& b) {
    double v = 0.0;
    for (double w : b.volume) v += w;
    return v;
}

double global_tail(const PipelineInstance& inst, const BatchState& b) {
    return global_head(inst, b) - batch_volume(b);
}

// Sound defaults for the eligibility sets, derived from the initial geometry:
// tails only move toward the delivery end, so a batch whose tail already
// passed a node or depot can never serve it.
void default_eligibility(PipelineInstance& inst) {
    const int n = inst.batch_count();
    const int n_old = inst.old_batch_count();
    const double eps = 1e-9;

    if (inst.line_batches.empty()) {
        inst.line_batches.assign(inst.lines.size(), {});
        for (size_t l = 0; l < inst.lines.size(); ++l)
            for (BatchId i = 0; i < n; ++i) inst.line_batches[l].push_back(i);
    }
    if (inst.input_batches.empty()) {
        inst.input_batches.assign(inst.inputs.size(), {});
        for (size_t k = 0; k < inst.inputs.size(); ++k) {
            const double origin = inst.line_origin(inst.inputs[k].line);
            for (BatchId i = 0; i < n; ++i) {
                const bool ok = i >= n_old ||
                                global_tail(inst, inst.initial[i]) <= origin + eps;
                if (ok) inst.input_batches[k].push_back(i);
            }
        }
    }
    if (inst.depot_batches.empty()) {
        inst.depot_batches.assign(inst.outputs.size(), {});
        for (size_t o = 0; o < inst.outputs.size(); ++o) {
            const auto& out = inst.outputs[o];
            const double origin = inst.line_origin(out.line);
            const double coord = origin + out.offset;
            const double line_end = origin + inst.lines[out.line].volume;
            for (BatchId i = 0; i < n; ++i) {
                if (i >= n_old) {
                    inst.depot_batches[o].push_back(i);
                    continue;
                }
                const double tail = global_tail(inst, inst.initial[i]);
                if (tail <= coord + eps && tail < line_end - eps)
                    inst.depot_batches[o].push_back(i);
            }
        }
    }
}

json product_map_to_json(const PipelineInstance& inst, const std::vector<double>& v) {
    json out = json::object();
    for (size_t p = 0; p < inst.products.size(); ++p) out[inst.products[p].id] = v[p];
    return out;
}

std::vector<double> product_map_from_json(const PipelineInstance& inst, const json& j,
                                          const std::string& path) {
    std::vector<double> v(inst.products.size(), 0.0);
    if (j.is_null()) return v;
    if (!j.is_object()) throw ValidationError(path, "expected an object keyed by product id");
    for (auto it = j.begin(); it != j.end(); ++it)
        v[inst.product_index(it.key())] = it.value().get<double>();
    return v;
}

}  // namespace

PipelineInstance load_instance(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("instance JSON: ") + e.what());
    }
    try {
        PipelineInstance inst;
        inst.name = j.value("name", "");
        inst.cost_scale = j.value("cost_scale", 1.0);

        for (const auto& pj : j.at("products")) {
            Product p;
            p.id = pj.at("id").get<std::string>();
            p.name = pj.value("name", p.id);
            inst.products.push_back(p);
        }
        for (const auto& lj : j.at("lines"))
            inst.lines.push_back({lj.at("volume").get<double>()});

        const size_t L = inst.lines.size();
        for (const auto& nj : j.at("input_nodes")) {
            InputNode n;
            n.line = nj.at("line").get<int>() - 1;
            n.inject_min = nj.at("inject_min").get<double>();
            n.inject_max = nj.at("inject_max").get<double>();
            n.rate_min = nj.at("rate_min").get<double>();
            n.rate_max = nj.at("rate_max").get<double>();
            n.inventory = product_map_from_json(inst, nj.value("inventory", json()), "input_nodes.inventory");
            n.pumping_cost = product_map_from_json(inst, nj.value("pumping_cost", json()), "input_nodes.pumping_cost");
            inst.inputs.push_back(std::move(n));
        }
        std::map<int, int> depot_counter;
        for (const auto& oj : j.at("output_nodes")) {
            OutputNode o;
            o.line = oj.at("line").get<int>() - 1;
            o.index_in_line = depot_counter[o.line]++;
            o.id = oj.value("id", "D" + std::to_string(o.index_in_line + 1));
            o.offset = oj.at("offset").get<double>();
            o.deliver_min = oj.at("deliver_min").get<double>();
            o.deliver_max = oj.at("deliver_max").get<double>();
            o.demand = product_map_from_json(inst, oj.value("demand", json()), "output_nodes.demand");
            o.dual_purpose = oj.value("dual_purpose", false);
            inst.outputs.push_back(std::move(o));
        }
        for (const auto& bj : j.at("initial_linefill")) {
            BatchState b;
            if (!bj.value("product", json()).is_null())
                b.product = inst.product_index(bj.at("product").get<std::string>());
            b.volume = bj.at("volume").get<std::vector<double>>();
            b.coordinate = bj.at("coordinate").get<std::vector<double>>();
            if (b.volume.size() != L || b.coordinate.size() != L)
                throw ValidationError("initial_linefill", "volume/coordinate arrays must have one entry per line");
            inst.initial.push_back(std::move(b));
        }
        const auto& nb = j.at("new_batches");
        inst.new_batches.count = nb.at("count").get<int>();
        inst.new_batches.required = nb.value("required", true);

        const auto& tg = j.at("time_grid");
        inst.grid.dt_hours = tg.at("dt_hours").get<double>();
        inst.grid.slots = tg.at("slots").get<int>();

        const size_t P = inst.products.size();
        inst.rules.forbidden.assign(P, std::vector<bool>(P, false));
        for (const auto& fp : j.value("forbidden_pairs", json::array())) {
            const auto a = inst.product_index(fp.at(0).get<std::string>());
            const auto b = inst.product_index(fp.at(1).get<std::string>());
            inst.rules.forbidden[a][b] = true;
        }
        inst.rules.interface_cost.assign(P, std::vector<double>(P, 0.0));
        const auto ic = j.value("interface_costs", json::object());
        for (auto it = ic.begin(); it != ic.end(); ++it) {
            const auto a = inst.product_index(it.key());
            for (auto jt = it.value().begin(); jt != it.value().end(); ++jt)
                inst.rules.interface_cost[a][inst.product_index(jt.key())] = jt.value().get<double>();
        }
        const auto& tb = j.at("transfer_bounds");
        inst.rules.transfer_min = tb.at("min").get<double>();
        inst.rules.transfer_max = tb.at("max").get<double>();
        inst.rules.product_cap = product_map_from_json(inst, j.value("product_caps", json()), "product_caps");

        const auto& bo = j.at("backorder_cost");
        if (bo.is_number()) {
            inst.backorder_cost = bo.get<double>();
        } else {
            inst.backorder_cost = bo.at("default").get<double>();
            for (const auto& ov : bo.value("overrides", json::array())) {
                const auto p = inst.product_index(ov.at("product").get<std::string>());
                const std::string out_id = ov.at("output").get<std::string>();
                bool found = false;
                for (size_t o = 0; o < inst.outputs.size(); ++o) {
                    if (inst.outputs[o].id == out_id) {
                        inst.backorder_override[{p, static_cast<int>(o)}] = ov.at("cost").get<double>();
                        found = true;
                    }
                }
                if (!found)
                    throw ValidationError("backorder_cost.overrides", "unknown output id '" + out_id + "'");
            }
        }

        const auto opt = j.value("options", json::object());
        inst.options.force_active_injection = opt.value("force_active_injection", true);
        inst.options.exclusive_injection = opt.value("exclusive_injection", false);
        inst.options.interface_across_empty = opt.value("interface_across_empty", false);

        if (j.contains("eligibility")) {
            const auto& el = j["eligibility"];
            auto read_sets = [](const json& arr) {
                std::vector<std::vector<BatchId>> sets;
                for (const auto& s : arr) {
                    std::vector<BatchId> ids;
                    for (const auto& v : s) ids.push_back(v.get<int>() - 1);
                    sets.push_back(std::move(ids));
                }
                return sets;
            };
            if (el.contains("input_batches")) inst.input_batches = read_sets(el["input_batches"]);
            if (el.contains("line_batches")) inst.line_batches = read_sets(el["line_batches"]);
            if (el.contains("depot_batches")) inst.depot_batches = read_sets(el["depot_batches"]);
        }
        default_eligibility(inst);

        auto report = validate_instance(inst);
        if (!report.ok()) {
            const auto& f = report.issues.front();
            throw ValidationError(f.path, f.message);
        }
        return inst;
    } catch (const json::exception& e) {
        throw ParseError(std::string("instance JSON: ") + e.what());
    }
}

PipelineInstance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_instance(ss.str());
}

std::string save_instance(const PipelineInstance& inst) {
    json j;
    j["name"] = inst.name;
    j["cost_scale"] = inst.cost_scale;
    j["products"] = json::array();
    for (const auto& p : inst.products) j["products"].push_back({{"id", p.id}, {"name", p.name}});
    j["lines"] = json::array();
    for (const auto& l : inst.lines) j["lines"].push_back({{"volume", l.volume}});
    j["input_nodes"] = json::array();
    for (const auto& n : inst.inputs) {
        j["input_nodes"].push_back({{"line", n.line + 1},
                                    {"inject_min", n.inject_min},
                                    {"inject_max", n.inject_max},
                                    {"rate_min", n.rate_min},
                                    {"rate_max", n.rate_max},
                                    {"inventory", product_map_to_json(inst, n.inventory)},
                                    {"pumping_cost", product_map_to_json(inst, n.pumping_cost)}});
    }
    j["output_nodes"] = json::array();
    for (const auto& o : inst.outputs) {
        j["output_nodes"].push_back({{"line", o.line + 1},
                                     {"id", o.id},
                                     {"offset", o.offset},
                                     {"deliver_min", o.deliver_min},
                                     {"deliver_max", o.deliver_max},
                                     {"demand", product_map_to_json(inst, o.demand)},
                                     {"dual_purpose", o.dual_purpose}});
    }
    j["initial_linefill"] = json::array();
    for (const auto& b : inst.initial) {
        json bj;
        bj["product"] = b.product ? json(inst.products[*b.product].id) : json();
        bj["volume"] = b.volume;
        bj["coordinate"] = b.coordinate;
        j["initial_linefill"].push_back(bj);
    }
    j["new_batches"] = {{"count", inst.new_batches.count}, {"required", inst.new_batches.required}};
    j["time_grid"] = {{"dt_hours", inst.grid.dt_hours}, {"slots", inst.grid.slots}};
    j["forbidden_pairs"] = json::array();
    for (size_t a = 0; a < inst.products.size(); ++a)
        for (size_t b = 0; b < inst.products.size(); ++b)
            if (inst.rules.forbidden[a][b])
                j["forbidden_pairs"].push_back({inst.products[a].id, inst.products[b].id});
    j["interface_costs"] = json::object();
    for (size_t a = 0; a < inst.products.size(); ++a) {
        json row = json::object();
        for (size_t b = 0; b < inst.products.size(); ++b)
            if (a != b) row[inst.products[b].id] = inst.rules.interface_cost[a][b];
        j["interface_costs"][inst.products[a].id] = row;
    }
    j["transfer_bounds"] = {{"min", inst.rules.transfer_min}, {"max", inst.rules.transfer_max}};
    j["product_caps"] = product_map_to_json(inst, inst.rules.product_cap);
    if (inst.backorder_override.empty()) {
        j["backorder_cost"] = inst.backorder_cost;
    } else {
        json ov = json::array();
        for (const auto& [key, cost] : inst.backorder_override)
            ov.push_back({{"product", inst.products[key.first].id},
                          {"output", inst.outputs[key.second].id},
                          {"cost", cost}});
        j["backorder_cost"] = {{"default", inst.backorder_cost}, {"overrides", ov}};
    }
    j["options"] = {{"force_active_injection", inst.options.force_active_injection},
                    {"exclusive_injection", inst.options.exclusive_injection},
                    {"interface_across_empty", inst.options.interface_across_empty}};
    auto write_sets = [](const std::vector<std::vector<BatchId>>& sets) {
        json arr = json::array();
        for (const auto& s : sets) {
            json ids = json::array();
            for (BatchId i : s) ids.push_back(i + 1);
            arr.push_back(ids);
        }
        return arr;
    };
    j["eligibility"] = {{"input_batches", write_sets(inst.input_batches)},
                        {"line_batches", write_sets(inst.line_batches)},
                        {"depot_batches", write_sets(inst.depot_batches)}};
    return j.dump(2) + "\n";
}

ValidationReport validate_instance(const PipelineInstance& inst) {
    ValidationReport rep;
    auto flag = [&rep](std::string rule, std::string path, std::string msg) {
        rep.issues.push_back({std::move(rule), std::move(path), std::move(msg)});
    };
    const size_t P = inst.products.size();
    const size_t L = inst.lines.size();
    const int n_old = inst.old_batch_count();

    for (size_t a = 0; a < P; ++a)
        for (size_t b = a + 1; b < P; ++b)
            if (inst.products[a].id == inst.products[b].id)
                flag("product-id-unique", "products[" + std::to_string(b) + "].id", "duplicate product id");
    if (L == 0) flag("lines-nonempty", "lines", "at least one line required");
    for (size_t l = 0; l < L; ++l)
        if (!(inst.lines[l].volume > 0))
            flag("line-volume", "lines[" + std::to_string(l) + "].volume", "line volume must be > 0");

    std::vector<int> inputs_per_line(L, 0);
    for (size_t k = 0; k < inst.inputs.size(); ++k) {
        const auto& n = inst.inputs[k];
        const std::string path = "input_nodes[" + std::to_string(k) + "]";
        if (n.line < 0 || n.line >= static_cast<int>(L))
            flag("input-line", path + ".line", "line index out of range");
        else
            inputs_per_line[n.line]++;
        if (!(0 <= n.inject_min && n.inject_min <= n.inject_max))
            flag("input-inject-bounds", path, "need 0 <= inject_min <= inject_max");
        if (!(0 <= n.rate_min && n.rate_min <= n.rate_max))
            flag("input-rate-bounds", path, "need 0 <= rate_min <= rate_max");
        for (size_t p = 0; p < n.inventory.size(); ++p)
            if (n.inventory[p] < 0) flag("input-inventory", path + ".inventory", "inventory must be >= 0");
    }
    for (size_t l = 0; l < L; ++l)
        if (inputs_per_line[l] > 1)
            flag("input-per-line", "input_nodes", "line " + std::to_string(l + 1) + " has multiple input nodes");

    std::map<int, double> last_offset;
    for (size_t o = 0; o < inst.outputs.size(); ++o) {
        const auto& out = inst.outputs[o];
        const std::string path = "output_nodes[" + std::to_string(o) + "]";
        if (out.line < 0 || out.line >= static_cast<int>(L)) {
            flag("output-line", path + ".line", "line index out of range");
            continue;
        }
        if (!(out.offset > 0) || out.offset > inst.lines[out.line].volume + kVolumeTol)
            flag("output-offset", path + ".offset", "need 0 < offset <= line volume");
        auto it = last_offset.find(out.line);
        if (it != last_offset.end() && out.offset <= it->second)
            flag("output-offset-order", path + ".offset", "offsets must strictly increase within a line");
        last_offset[out.line] = out.offset;
        if (!(0 <= out.deliver_min && out.deliver_min <= out.deliver_max))
            flag("output-deliver-bounds", path, "need 0 <= deliver_min <= deliver_max");
        for (size_t p = 0; p < out.demand.size(); ++p)
            if (out.demand[p] < 0) flag("output-demand", path + ".demand", "demand must be >= 0");
    }

    // Initial linefill: per-line fullness, coordinate consistency, EMPTY
    // batches carry no volume, coordinates within line volumes.
    for (size_t l = 0; l < L; ++l) {
        double sum = 0.0;
        for (const auto& b : inst.initial) sum += b.volume[l];
        if (std::abs(sum - inst.lines[l].volume) > 1e-9)
            flag("linefill-sum", "initial_linefill",
                 "line " + std::to_string(l + 1) + " initial volumes sum to " + std::to_string(sum) +
                     ", expected " + std::to_string(inst.lines[l].volume));
    }
    for (int i = 0; i < n_old; ++i) {
        const auto& b = inst.initial[i];
        const std::string path = "initial_linefill[" + std::to_string(i) + "]";
        if (!b.product && batch_volume(b) > kVolumeTol)
            flag("empty-batch-volume", path, "EMPTY batch carries volume");
        for (size_t l = 0; l < L; ++l) {
            if (b.coordinate[l] < -kVolumeTol)
                flag("coordinate-negative", path + ".coordinate", "coordinate below zero");
            if (b.coordinate[l] > inst.lines[l].volume + kVolumeTol)
                flag("coordinate-exceeds-line", path + ".coordinate",
                     "coordinate exceeds line volume in line " + std::to_string(l + 1));
            const double next = (i + 1 < n_old) ? inst.initial[i + 1].coordinate[l] : 0.0;
            if (std::abs(b.coordinate[l] - (b.volume[l] + next)) > 1e-9)
                flag("coordinate-consistency", path + ".coordinate",
                     "f[i,l] != W[i,l] + f[i+1,l] in line " + std::to_string(l + 1));
        }
    }
    // Forbidden adjacency in the initial fill (between consecutive assigned
    // batches; reserved EMPTY slots shield their neighbours as in the model).
    std::optional<ProductId> prev;
    std::optional<int> prev_idx;
    for (int i = 0; i < n_old; ++i) {
        const auto& b = inst.initial[i];
        if (!b.product) continue;
        if (prev && inst.rules.forbidden[*prev][*b.product] &&
            prev_idx.value() + 1 == i)
            flag("forbidden-initial-adjacency", "initial_linefill[" + std::to_string(i) + "]",
                 "forbidden initial adjacency " + inst.products[*prev].id + " -> " +
                     inst.products[*b.product].id);
        prev = b.product;
        prev_idx = i;
    }

    if (!(inst.grid.dt_hours > 0)) flag("grid-dt", "time_grid.dt_hours", "dt must be > 0");
    if (inst.grid.slots < 1) flag("grid-slots", "time_grid.slots", "need at least one operational slot");

    if (inst.rules.forbidden.size() != P)
        flag("fp-shape", "forbidden_pairs", "FP matrix must cover every ordered pair");
    for (size_t a = 0; a < P; ++a)
        for (size_t b = 0; b < P; ++b)
            if (inst.rules.interface_cost[a][b] < 0)
                flag("interface-cost", "interface_costs", "interface cost must be >= 0");
    if (inst.rules.transfer_min > inst.rules.transfer_max)
        flag("transfer-bounds", "transfer_bounds", "need S_min <= S_max");
    if (inst.backorder_cost < 0) flag("backorder-cost", "backorder_cost", "must be >= 0");
    if (inst.new_batches.count < 0) flag("new-batches", "new_batches.count", "must be >= 0");

    const int n = inst.batch_count();
    auto check_sets = [&](const std::vector<std::vector<BatchId>>& sets, size_t expect,
                          const std::string& what) {
        if (sets.size() != expect) {
            flag("eligibility-shape", "eligibility." + what, "wrong number of sets");
            return;
        }
        for (const auto& s : sets)
            for (BatchId i : s)
                if (i < 0 || i >= n)
                    flag("eligibility-range", "eligibility." + what, "batch index out of range");
    };
    check_sets(inst.line_batches, L, "line_batches");
    check_sets(inst.input_batches, inst.inputs.size(), "input_batches");
    check_sets(inst.depot_batches, inst.outputs.size(), "depot_batches");

    return rep;
}

// ---------------------------------------------------------------------------
// Built-in instances.

namespace {

// Shared pipeline of the two benchmark examples: lines of 30 and 50 units,
// refineries L1/L2 at the line origins, depot D1 at the junction
// (dual-purpose with L2), D2 mid second line, D3 at the terminal. Linefill
// I1(B,20) I2(A,30) I3(reserved empty) I4(B,10) I5(A,20) from the delivery
// end backwards.
PipelineInstance benchmark_pipeline() {
    PipelineInstance inst;
    inst.cost_scale = 100.0;  // cost tables quoted in 100 $
    inst.products = {{"A", "A"}, {"B", "B"}, {"C", "C"}};
    inst.lines = {{30.0}, {50.0}};

    OutputNode d1;
    d1.line = 0; d1.index_in_line = 0; d1.id = "D1"; d1.offset = 30.0;
    d1.deliver_min = 5.0; d1.deliver_max = 40.0; d1.dual_purpose = true;
    OutputNode d2;
    d2.line = 1; d2.index_in_line = 0; d2.id = "D2"; d2.offset = 10.0;
    d2.deliver_min = 5.0; d2.deliver_max = 40.0;
    OutputNode d3;
    d3.line = 1; d3.index_in_line = 1; d3.id = "D3"; d3.offset = 50.0;
    d3.deliver_min = 5.0; d3.deliver_max = 40.0;
    inst.outputs = {d1, d2, d3};

    auto batch = [](std::optional<ProductId> p, std::vector<double> vol,
                    std::vector<double> coord) {
        BatchState b;
        b.product = p;
        b.volume = std::move(vol);
        b.coordinate = std::move(coord);
        return b;
    };
    const ProductId A = 0, B = 1;
    inst.initial = {
        batch(B, {0, 20}, {30, 50}),   // I1
        batch(A, {0, 30}, {30, 30}),   // I2
        batch(std::nullopt, {0, 0}, {30, 0}),  // I3, reserved for the mid refinery
        batch(B, {10, 0}, {30, 0}),    // I4
        batch(A, {20, 0}, {20, 0}),    // I5
    };

    // Table 3, rows = predecessor (ahead in the pipe), columns = successor.
    inst.rules.interface_cost = {
        {0, 22, 35},   // A -> {A,B,C}
        {24, 0, 21},   // B ->
        {30, 32, 0},   // C ->
    };
    inst.rules.forbidden.assign(3, std::vector<bool>(3, false));
    inst.rules.transfer_min = 0.0;
    inst.rules.transfer_max = 40.0;
    return inst;
}

InputNode benchmark_input(LineId line, double rmin, std::vector<double> inv,
                          std::vector<double> cp) {
    InputNode n;
    n.line = line;
    n.inject_min = rmin;
    n.inject_max = 40.0;
    n.rate_min = 0.8;
    n.rate_max = 1.2;
    n.inventory = std::move(inv);
    n.pumping_cost = std::move(cp);
    return n;
}

PipelineInstance make_example1() {
    PipelineInstance inst = benchmark_pipeline();
    inst.name = "example1";
    // Table 2 supplies; Table 4 pumping costs (100 $ per unit).
    inst.inputs = {benchmark_input(0, 10.0, {50, 80, 30}, {29.0, 34.0, 49.0}),
                   benchmark_input(1, 10.0, {20, 60, 40}, {14.5, 17.0, 24.5})};
    inst.outputs[0].demand = {60, 0, 0};
    inst.outputs[1].demand = {60, 0, 60};
    inst.outputs[2].demand = {0, 100, 0};
    inst.rules.product_cap = {70, 140, 70};  // total supply per product
    inst.new_batches = {3, true};            // I6..I8
    inst.grid = {10.0, 24};                  // 10 h slots, 10-day horizon
    inst.backorder_cost = 10000.0;           // full demand satisfaction pays
    inst.options.force_active_injection = true;
    inst.options.exclusive_injection = false;
    default_eligibility(inst);
    return inst;
}

PipelineInstance make_example2() {
    PipelineInstance inst = benchmark_pipeline();
    inst.name = "example2";
    // Table 6 supplies; same cost tables as Example 1. Injection activity is
    // bounded by the pump-rate window alone (8.5 h slots).
    inst.inputs = {benchmark_input(0, 0.0, {20, 40, 20}, {29.0, 34.0, 49.0}),
                   benchmark_input(1, 0.0, {10, 30, 20}, {14.5, 17.0, 24.5})};
    inst.outputs[0].demand = {30, 0, 0};
    inst.outputs[1].demand = {30, 0, 30};
    inst.outputs[2].demand = {0, 50, 0};
    inst.rules.product_cap = {30, 70, 40};
    inst.new_batches = {2, true};  // I6, I7
    inst.grid = {8.5, 14};         // 5-day horizon
    inst.backorder_cost = 5000.0;
    inst.options.force_active_injection = false;
    inst.options.exclusive_injection = true;
    default_eligibility(inst);
    return inst;
}

PipelineInstance make_motivating() {
    PipelineInstance inst;
    inst.name = "motivating";
    inst.cost_scale = 1.0;
    inst.products = {{"P1", "P1"}, {"P2", "P2"}};
    inst.lines = {{40.0}, {40.0}};

    InputNode l1;
    l1.line = 0; l1.inject_min = 5.0; l1.inject_max = 40.0;
    l1.rate_min = 0.5; l1.rate_max = 4.0;
    l1.inventory = {0, 40};
    l1.pumping_cost = {1.0, 1.0};
    InputNode l2 = l1;
    l2.line = 1;
    l2.inventory = {40, 0};
    inst.inputs = {l1, l2};

    OutputNode d1;
    d1.line = 0; d1.index_in_line = 0; d1.id = "D1"; d1.offset = 40.0;
    d1.deliver_min = 2.0; d1.deliver_max = 40.0; d1.dual_purpose = true;
    d1.demand = {0, 22};
    OutputNode d1b;
    d1b.line = 1; d1b.index_in_line = 0; d1b.id = "D1"; d1b.offset = 20.0;
    d1b.deliver_min = 2.0; d1b.deliver_max = 40.0;
    d1b.demand = {5, 0};
    OutputNode d2b;
    d2b.line = 1; d2b.index_in_line = 1; d2b.id = "D2"; d2b.offset = 40.0;
    d2b.deliver_min = 2.0; d2b.deliver_max = 40.0;
    d2b.demand = {5, 0};
    inst.outputs = {d1, d1b, d2b};

    BatchState i1;  // P1, right half
    i1.product = 0;
    i1.volume = {0, 40};
    i1.coordinate = {40, 40};
    BatchState i2;  // P2, left half
    i2.product = 1;
    i2.volume = {40, 0};
    i2.coordinate = {40, 0};
    inst.initial = {i1, i2};
    inst.new_batches = {2, false};
    inst.grid = {10.0, 2};

    inst.rules.forbidden.assign(2, std::vector<bool>(2, false));
    inst.rules.interface_cost.assign(2, std::vector<double>(2, 0.0));
    inst.rules.transfer_min = 0.0;
    inst.rules.transfer_max = 40.0;
    inst.rules.product_cap = {40, 40};
    inst.backorder_cost = 1000.0;
    default_eligibility(inst);
    return inst;
}

}  // namespace

PipelineInstance builtin_instance(BuiltinInstance which) {
    switch (which) {
        case BuiltinInstance::Motivating: return make_motivating();
        case BuiltinInstance::Example1: return make_example1();
        case BuiltinInstance::Example2: return make_example2();
    }
    throw Error("unreachable");
}

PipelineInstance builtin_instance(const std::string& name) {
    if (name == "motivating") return builtin_instance(BuiltinInstance::Motivating);
    if (name == "example1") return builtin_instance(BuiltinInstance::Example1);
    if (name == "example2") return builtin_instance(BuiltinInstance::Example2);
    throw ParseError("unknown builtin instance '" + name + "' (motivating|example1|example2)");
}

std::uint64_t instance_hash(const PipelineInstance& inst) {
    const std::string text = save_instance(inst);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace pipesched
