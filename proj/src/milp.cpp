#include "pipesched/milp.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace pipesched {

const char* var_kind_tag(VarKind k) {
    switch (k) {
        case VarKind::Y: return "y";
        case VarKind::W_ACT: return "w";
        case VarKind::X_ACT: return "x";
        case VarKind::U_ACT: return "u";
        case VarKind::F: return "F";
        case VarKind::W_VOL: return "W";
        case VarKind::R: return "R";
        case VarKind::RP: return "RP";
        case VarKind::D: return "D";
        case VarKind::DP: return "DP";
        case VarKind::S: return "S";
        case VarKind::BORDER: return "Border";
        case VarKind::IC: return "IC";
        case VarKind::GRID_K: return "k";
    }
    return "?";
}

VarRef MilpModel::add_var(VarKind kind, std::array<int, 5> idx, bool integral,
                          double lo, double hi, std::string name) {
    if (!(lo <= hi)) throw Error("variable '" + name + "' has lo > hi");
    auto key = std::make_pair(kind, idx);
    if (index_.count(key)) throw Error("variable '" + name + "' declared twice");
    if (name.size() > 255) throw Error("variable name too long: " + name);
    VarDef def{kind, idx, integral, lo, hi, std::move(name)};
    vars.push_back(std::move(def));
    const int id = static_cast<int>(vars.size()) - 1;
    index_[key] = id;
    return VarRef{id};
}

void MilpModel::add_row(LinConstraint c) {
    if (row_names_.count(c.name)) throw Error("constraint '" + c.name + "' declared twice");
    for (const auto& t : c.terms) {
        if (!t.var.valid() || t.var.id >= static_cast<int>(vars.size()))
            throw Error("constraint '" + c.name + "' references an undeclared variable");
        if (!std::isfinite(t.coef))
            throw Error("constraint '" + c.name + "' has a non-finite coefficient");
    }
    row_names_[c.name] = static_cast<int>(rows.size());
    rows.push_back(std::move(c));
}

VarRef MilpModel::find(VarKind kind, std::array<int, 5> idx) const {
    auto it = index_.find(std::make_pair(kind, idx));
    if (it == index_.end()) return VarRef{};
    return VarRef{it->second};
}

double MilpModel::objective_value(const std::vector<double>& assignment) const {
    double z = 0.0;
    for (const auto& t : objective) z += t.coef * assignment[t.var.id];
    return z;
}

ModelStats MilpModel::stats() const {
    ModelStats st;
    for (const auto& v : vars) {
        st.vars_by_kind[var_kind_tag(v.kind)]++;
        if (v.integral) {
            st.n_integer++;
            if (v.lo >= 0.0 && v.hi <= 1.0) st.n_binary++;
        }
    }
    for (const auto& r : rows) {
        // family = name up to the first '_', e.g. "eq12" from "eq12lo_i5_l1_t3"
        auto pos = r.name.find('_');
        st.rows_by_family[r.name.substr(0, pos)]++;
    }
    st.n_vars = static_cast<int>(vars.size());
    st.n_rows = static_cast<int>(rows.size());
    return st;
}

std::string ModelStats::to_json() const {
    nlohmann::json j;
    j["variables"] = n_vars;
    j["rows"] = n_rows;
    j["binary"] = n_binary;
    j["integer"] = n_integer;
    j["variables_by_kind"] = vars_by_kind;
    j["rows_by_family"] = rows_by_family;
    return j.dump(2);
}

}  // namespace pipesched
