#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "pipesched/solver.hpp"

namespace pipesched {

namespace {

// Shortest round-trip decimal form; keeps exports byte-stable and lets the
// reader reconstruct the exact coefficient doubles.
std::string num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

char sense_tag(Sense s) {
    switch (s) {
        case Sense::LE: return 'L';
        case Sense::EQ: return 'E';
        case Sense::GE: return 'G';
    }
    return '?';
}

}  // namespace

std::string export_mps(const MilpModel& model, const std::string& problem_name) {
    // Column entries: objective first, then rows in declaration order.
    // (column, row) duplicates are aggregated.
    std::vector<std::vector<std::pair<int, double>>> entries(model.vars.size());
    {
        std::vector<std::map<int, double>> agg(model.vars.size());
        for (const auto& t : model.objective) agg[t.var.id][-1] += t.coef;
        for (size_t r = 0; r < model.rows.size(); ++r)
            for (const auto& t : model.rows[r].terms)
                agg[t.var.id][static_cast<int>(r)] += t.coef;
        for (size_t v = 0; v < model.vars.size(); ++v)
            entries[v].assign(agg[v].begin(), agg[v].end());
    }

    size_t name_w = 8;
    for (const auto& v : model.vars) name_w = std::max(name_w, v.name.size());
    for (const auto& r : model.rows) name_w = std::max(name_w, r.name.size());
    auto pad = [&](const std::string& s) {
        std::string out = s;
        out.resize(name_w + 2, ' ');
        return out;
    };

    std::ostringstream os;
    os << "NAME          " << problem_name << "\n";
    os << "ROWS\n";
    os << " N  COST\n";
    for (const auto& r : model.rows) os << " " << sense_tag(r.sense) << "  " << r.name << "\n";

    os << "COLUMNS\n";
    auto write_col = [&](int v) {
        for (const auto& [row, coef] : entries[v]) {
            if (coef == 0.0 && row != -1) continue;
            os << "    " << pad(model.vars[v].name)
               << pad(row < 0 ? "COST" : model.rows[row].name) << num(coef) << "\n";
        }
    };
    bool marker_open = false;
    int marker_no = 0;
    for (size_t v = 0; v < model.vars.size(); ++v) {
        const bool integral = model.vars[v].integral;
        if (integral && !marker_open) {
            os << "    " << pad("MARKER" + std::to_string(marker_no++)) << pad("'MARKER'")
               << "'INTORG'\n";
            marker_open = true;
        } else if (!integral && marker_open) {
            os << "    " << pad("MARKER" + std::to_string(marker_no++)) << pad("'MARKER'")
               << "'INTEND'\n";
            marker_open = false;
        }
        write_col(static_cast<int>(v));
    }
    if (marker_open)
        os << "    " << pad("MARKER" + std::to_string(marker_no++)) << pad("'MARKER'")
           << "'INTEND'\n";

    os << "RHS\n";
    for (size_t r = 0; r < model.rows.size(); ++r)
        if (model.rows[r].rhs != 0.0)
            os << "    " << pad("RHS") << pad(model.rows[r].name) << num(model.rows[r].rhs) << "\n";

    os << "BOUNDS\n";
    for (const auto& v : model.vars) {
        if (v.lo == v.hi) {
            os << " FX " << pad("BND") << pad(v.name) << num(v.lo) << "\n";
            continue;
        }
        if (v.lo != 0.0) os << " LO " << pad("BND") << pad(v.name) << num(v.lo) << "\n";
        if (std::isfinite(v.hi)) os << " UP " << pad("BND") << pad(v.name) << num(v.hi) << "\n";
    }
    os << "ENDATA\n";
    return os.str();
}

}  // namespace pipesched
