#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pipesched/instance.hpp"

using namespace pipesched;

namespace {

// Embedded copies of the published data tables, asserted field-for-field
// against the built-in instances.
// Supplies/demands, Example 1.                A        B       C
const double kEx1Supply[3][2] = {{50, 20}, {80, 60}, {30, 40}};
const double kEx1Demand[3][3] = {{60, 60, 0}, {0, 0, 100}, {0, 60, 0}};
// Supplies/demands, Example 2.
const double kEx2Supply[3][2] = {{20, 10}, {40, 30}, {20, 20}};
const double kEx2Demand[3][3] = {{30, 30, 0}, {0, 0, 50}, {0, 30, 0}};
// Interface costs (predecessor row, successor column), in 100 $.
const double kInterface[3][3] = {{0, 22, 35}, {24, 0, 21}, {30, 32, 0}};
// Pumping costs per unit (100 $), per refinery.
const double kPumpCost[3][2] = {{29.0, 14.5}, {34.0, 17.0}, {49.0, 24.5}};

}  // namespace

TEST_CASE("example1 matches the published tables") {
    const auto inst = builtin_instance(BuiltinInstance::Example1);
    REQUIRE(inst.products.size() == 3);
    REQUIRE(inst.inputs.size() == 2);
    REQUIRE(inst.outputs.size() == 3);

    for (int p = 0; p < 3; ++p) {
        for (int k = 0; k < 2; ++k) {
            CHECK(inst.inputs[k].inventory[p] == kEx1Supply[p][k]);
            CHECK(inst.inputs[k].pumping_cost[p] == kPumpCost[p][k]);
        }
        for (int o = 0; o < 3; ++o) CHECK(inst.outputs[o].demand[p] == kEx1Demand[p][o]);
    }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK(inst.rules.interface_cost[a][b] == kInterface[a][b]);
    CHECK(inst.rules.interface_cost[1][2] == 21);  // B -> C

    CHECK(inst.grid.dt_hours == 10.0);
    CHECK(inst.grid.slots == 24);
    CHECK(inst.grid.horizon_hours() == 240.0);
    CHECK(inst.inputs[0].inject_min == 10.0);
    CHECK(inst.inputs[0].inject_max == 40.0);
    CHECK(inst.outputs[0].deliver_min == 5.0);
    CHECK(inst.cost_scale == 100.0);

    // Linefill I1(B,20) I2(A,30) I3(empty) I4(B,10) I5(A,20).
    REQUIRE(inst.initial.size() == 5);
    CHECK(inst.products[*inst.initial[0].product].id == "B");
    CHECK(inst.products[*inst.initial[1].product].id == "A");
    CHECK(!inst.initial[2].product.has_value());
    CHECK(inst.products[*inst.initial[3].product].id == "B");
    CHECK(inst.products[*inst.initial[4].product].id == "A");
    CHECK(inst.initial[0].volume[1] == 20);
    CHECK(inst.initial[1].volume[1] == 30);
    CHECK(inst.initial[3].volume[0] == 10);
    CHECK(inst.initial[4].volume[0] == 20);

    CHECK(validate_instance(inst).ok());
}

TEST_CASE("example2 matches the published tables") {
    const auto inst = builtin_instance(BuiltinInstance::Example2);
    for (int p = 0; p < 3; ++p) {
        for (int k = 0; k < 2; ++k) CHECK(inst.inputs[k].inventory[p] == kEx2Supply[p][k]);
        for (int o = 0; o < 3; ++o) CHECK(inst.outputs[o].demand[p] == kEx2Demand[p][o]);
    }
    CHECK(inst.inputs[1].inventory[2] == 20);  // supply of C at L2
    CHECK(inst.grid.dt_hours == 8.5);
    CHECK(inst.options.exclusive_injection);
    CHECK(validate_instance(inst).ok());
}

TEST_CASE("motivating matches the narrative data") {
    const auto inst = builtin_instance(BuiltinInstance::Motivating);
    REQUIRE(inst.lines.size() == 2);
    CHECK(inst.lines[0].volume == 40);
    CHECK(inst.lines[1].volume == 40);
    CHECK(inst.grid.horizon_hours() == 20.0);
    REQUIRE(inst.outputs.size() == 3);
    CHECK(inst.outputs[0].demand[1] == 22);  // P2 at D1/L1
    CHECK(inst.outputs[1].demand[0] == 5);   // P1 at D1/L2
    CHECK(inst.outputs[2].demand[0] == 5);   // P1 at D2/L2
    CHECK(inst.outputs[0].dual_purpose);
    CHECK(validate_instance(inst).ok());
}

TEST_CASE("instance round-trips through JSON") {
    for (const char* name : {"motivating", "example1", "example2"}) {
        const auto inst = builtin_instance(name);
        const std::string text = save_instance(inst);
        const auto again = load_instance(text);
        CHECK(save_instance(again) == text);
        CHECK(instance_hash(again) == instance_hash(inst));
    }
}

TEST_CASE("load rejects a short linefill") {
    auto inst = builtin_instance(BuiltinInstance::Example1);
    inst.initial[4].volume[0] = 19;  // line 1 now sums to 29 != 30
    inst.initial[4].coordinate[0] = 19;
    inst.initial[3].coordinate[0] = 29;
    const auto rep = validate_instance(inst);
    REQUIRE(!rep.ok());
    bool found = false;
    for (const auto& f : rep.issues)
        if (f.rule == "linefill-sum") found = true;
    CHECK(found);
    CHECK_THROWS_AS(load_instance(save_instance(inst)), ValidationError);
}

TEST_CASE("load rejects a zero depot offset") {
    auto inst = builtin_instance(BuiltinInstance::Example1);
    inst.outputs[0].offset = 0.0;
    CHECK_THROWS_AS(load_instance(save_instance(inst)), ValidationError);
}

TEST_CASE("validation flags forbidden initial adjacency") {
    auto inst = builtin_instance(BuiltinInstance::Example1);
    // I4(B) directly ahead of I5(A): forbid B -> A.
    inst.rules.forbidden[1][0] = true;
    const auto rep = validate_instance(inst);
    REQUIRE(!rep.ok());
    CHECK(rep.issues.front().rule == "forbidden-initial-adjacency");
}

TEST_CASE("validation flags a coordinate beyond the line volume") {
    auto inst = builtin_instance(BuiltinInstance::Example1);
    inst.initial[0].coordinate[1] = 55;  // vl_2 = 50
    const auto rep = validate_instance(inst);
    bool found = false;
    for (const auto& f : rep.issues)
        if (f.rule == "coordinate-exceeds-line") found = true;
    CHECK(found);
}

TEST_CASE("linefill sums to the line volume on every builtin") {
    for (const char* name : {"motivating", "example1", "example2"}) {
        const auto inst = builtin_instance(name);
        for (size_t l = 0; l < inst.lines.size(); ++l) {
            double sum = 0;
            for (const auto& b : inst.initial) sum += b.volume[l];
            CHECK(sum == inst.lines[l].volume);
        }
    }
}

TEST_CASE("depot eligibility defaults exclude unreachable batches") {
    const auto inst = builtin_instance(BuiltinInstance::Example1);
    // D1 sits at the junction: I1 (tail already past) and I2/I3 (tail at the
    // junction, entirely out of line 1) can never serve it.
    const auto& d1 = inst.depot_batches[0];
    CHECK(std::find(d1.begin(), d1.end(), 0) == d1.end());
    CHECK(std::find(d1.begin(), d1.end(), 1) == d1.end());
    CHECK(std::find(d1.begin(), d1.end(), 4) != d1.end());
    // D3 at the terminal takes anything.
    CHECK(inst.depot_batches[2].size() == 8);
    // L1 can only enlarge the hindmost old batch or the new ones.
    CHECK(inst.input_batches[0] == std::vector<BatchId>({4, 5, 6, 7}));
    // L2 can reach everything except I1.
    CHECK(inst.input_batches[1] == std::vector<BatchId>({1, 2, 3, 4, 5, 6, 7}));
}
