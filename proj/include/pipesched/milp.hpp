#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pipesched/errors.hpp"

namespace pipesched {

// Solver-agnostic MILP intermediate representation. Variables are identified
// by (kind, index tuple); both ordering and naming are deterministic so MPS
// exports are byte-stable.

enum class VarKind : std::uint8_t {
    Y,        // y(i,p)        batch-product assignment, binary
    W_ACT,    // w(i,l,t)      node l injects batch i in slot t, binary
    X_ACT,    // x(i,d,l,t)    depot d on line l receives batch i, binary
    U_ACT,    // u(i,l,t)      batch i crosses from line l-1 into l, binary
    F,        // F(i,l,t)      upper coordinate
    W_VOL,    // W(i,l,t)      batch volume in line
    R,        // R(i,l,t)      injected volume
    RP,       // RP(i,p,l,t)   injected volume by product
    D,        // D(i,d,l,t)    delivered volume
    DP,       // DP(i,p,d,l,t) delivered volume by product
    S,        // S(i,l,t)      volume transferred from line l-1 into l
    BORDER,   // Border(p,d,l) backorder
    IC,       // IC(i)         interface reprocessing cost
    GRID_K,   // k(...)        integer multiplier tying a volume to the grid quantum
};

constexpr int kVarKindCount = 14;

const char* var_kind_tag(VarKind k);

struct VarRef {
    int id = -1;  // position in MilpModel::vars
    bool valid() const { return id >= 0; }
};

struct VarDef {
    VarKind kind;
    std::array<int, 5> idx;  // unused slots -1
    bool integral = false;   // binaries and grid multipliers
    double lo = 0.0;
    double hi = 0.0;
    std::string name;
};

enum class Sense : std::uint8_t { LE, EQ, GE };

struct LinTerm {
    VarRef var;
    double coef;
};

struct LinConstraint {
    std::string name;  // stable, unique; prefixed with its equation family
    std::vector<LinTerm> terms;
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

// Per-family row/variable tallies; a pure function of index-set cardinalities.
struct ModelStats {
    std::map<std::string, int> vars_by_kind;
    std::map<std::string, int> rows_by_family;
    int n_vars = 0;
    int n_rows = 0;
    int n_binary = 0;
    int n_integer = 0;  // includes binaries
    std::string to_json() const;
};

class MilpModel {
  public:
    std::vector<VarDef> vars;
    std::vector<LinConstraint> rows;
    std::vector<LinTerm> objective;  // minimize

    VarRef add_var(VarKind kind, std::array<int, 5> idx, bool integral, double lo,
                   double hi, std::string name);
    void add_row(LinConstraint c);
    void fix_var(VarRef v, double value) {
        vars[v.id].lo = value;
        vars[v.id].hi = value;
    }
    VarRef find(VarKind kind, std::array<int, 5> idx) const;  // invalid ref if absent
    double objective_value(const std::vector<double>& assignment) const;

    ModelStats stats() const;

  private:
    std::map<std::pair<VarKind, std::array<int, 5>>, int> index_;
    std::map<std::string, int> row_names_;
};

}  // namespace pipesched
