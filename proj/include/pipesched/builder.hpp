#pragma once

#include <limits>
#include <memory>

#include "pipesched/instance.hpp"
#include "pipesched/milp.hpp"

namespace pipesched {

struct BuildOptions {
    // When > 0, injection/delivery/transfer volumes are restricted to integer
    // multiples of this quantum via auxiliary integer variables. Used to match
    // the brute-force oracle's grid.
    double grid_quantum = 0.0;
    // Guard against runaway model sizes (rows + columns).
    long max_model_size = 2'000'000;
    // Override the instance backorder coefficient for every (p, d, l); used by
    // the sweep. NaN means "use the instance's".
    double backorder_cost_override = std::numeric_limits<double>::quiet_NaN();
};

// Translates a PipelineInstance into the MILP of the discrete-time
// formulation. Generators are split by equation family so tests can count and
// inspect rows per family; build() runs them all in a fixed order.
class ModelBuilder {
  public:
    ModelBuilder(const PipelineInstance& inst, BuildOptions opts = {});

    void add_assignment();    // Eqs. (1)-(2)
    void add_coordinates();   // Eqs. (3)-(6); (4) and (29) fix state 0
    void add_injection();     // Eqs. (7)-(16)
    void add_delivery();      // Eqs. (17)-(23)
    void add_transfer();      // Eqs. (24)-(27)
    void add_balance();       // Eqs. (28)-(31)
    void add_objective();     // Eq. (32) with (33)

    MilpModel take();  // finalize after the generators above

    // Convenience: run every generator in order and return the model.
    static MilpModel build(const PipelineInstance& inst, BuildOptions opts = {});

    const MilpModel& model() const { return *model_; }

  private:
    void declare_variables();
    void add_grid_rows();
    double slot_volume_cap(const InputNode& n) const;
    bool delivers(BatchId i, int out) const;

    const PipelineInstance& inst_;
    BuildOptions opts_;
    std::unique_ptr<MilpModel> model_;
    bool variables_declared_ = false;
};

}  // namespace pipesched
