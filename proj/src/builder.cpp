#include "pipesched/builder.hpp"

#include <algorithm>
#include <cmath>

namespace pipesched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string bname(int i) { return "i" + std::to_string(i + 1); }
std::string lname(int l) { return "l" + std::to_string(l + 1); }
std::string tname(int t) { return "t" + std::to_string(t); }

}  // namespace

ModelBuilder::ModelBuilder(const PipelineInstance& inst, BuildOptions opts)
    : inst_(inst), opts_(opts), model_(std::make_unique<MilpModel>()) {
    declare_variables();
}

double ModelBuilder::slot_volume_cap(const InputNode& n) const {
    return std::min(n.inject_max, inst_.grid.dt_hours * n.rate_max);
}

bool ModelBuilder::delivers(BatchId i, int out) const {
    const auto& set = inst_.depot_batches[out];
    return std::find(set.begin(), set.end(), i) != set.end();
}

void ModelBuilder::declare_variables() {
    auto& m = *model_;
    const int T = inst_.grid.slots;
    const int N = inst_.batch_count();
    const int P = static_cast<int>(inst_.products.size());

    auto pname = [&](ProductId p) { return "p" + inst_.products[p].id; };
    auto oname = [&](int o) {
        return "d" + std::to_string(inst_.outputs[o].index_in_line + 1) + "_" +
               lname(inst_.outputs[o].line);
    };

    for (BatchId i = 0; i < N; ++i)
        for (ProductId p = 0; p < P; ++p)
            m.add_var(VarKind::Y, {i, p, -1, -1, -1}, true, 0, 1,
                      "y_" + bname(i) + "_" + pname(p));

    for (size_t k = 0; k < inst_.inputs.size(); ++k) {
        const LineId l = inst_.inputs[k].line;
        for (BatchId i : inst_.input_batches[k])
            for (int t = 1; t <= T; ++t)
                m.add_var(VarKind::W_ACT, {i, l, t, -1, -1}, true, 0, 1,
                          "w_" + bname(i) + "_" + lname(l) + "_" + tname(t));
    }
    for (size_t o = 0; o < inst_.outputs.size(); ++o)
        for (BatchId i : inst_.depot_batches[o])
            for (int t = 1; t <= T; ++t)
                m.add_var(VarKind::X_ACT, {i, static_cast<int>(o), t, -1, -1}, true, 0, 1,
                          "x_" + bname(i) + "_" + oname(static_cast<int>(o)) + "_" + tname(t));
    for (LineId l = 1; l < static_cast<LineId>(inst_.lines.size()); ++l)
        for (BatchId i : inst_.line_batches[l - 1])
            for (int t = 1; t <= T; ++t)
                m.add_var(VarKind::U_ACT, {i, l, t, -1, -1}, true, 0, 1,
                          "u_" + bname(i) + "_" + lname(l) + "_" + tname(t));

    // State variables over states 0..T; state 0 carries the initial linefill
    // (Eqs. 4 and 29) through fixed bounds.
    for (LineId l = 0; l < static_cast<LineId>(inst_.lines.size()); ++l) {
        const double vl = inst_.lines[l].volume;
        for (BatchId i : inst_.line_batches[l]) {
            for (int t = 0; t <= T; ++t) {
                auto f = m.add_var(VarKind::F, {i, l, t, -1, -1}, false, 0, vl,
                                   "F_" + bname(i) + "_" + lname(l) + "_" + tname(t));
                auto w = m.add_var(VarKind::W_VOL, {i, l, t, -1, -1}, false, 0, vl,
                                   "W_" + bname(i) + "_" + lname(l) + "_" + tname(t));
                if (t == 0) {
                    const bool old = i < inst_.old_batch_count();
                    m.fix_var(f, old ? inst_.initial[i].coordinate[l] : 0.0);
                    m.fix_var(w, old ? inst_.initial[i].volume[l] : 0.0);
                }
            }
        }
    }

    for (size_t k = 0; k < inst_.inputs.size(); ++k) {
        const auto& n = inst_.inputs[k];
        const double cap = slot_volume_cap(n);
        for (BatchId i : inst_.input_batches[k]) {
            for (int t = 1; t <= T; ++t) {
                m.add_var(VarKind::R, {i, n.line, t, -1, -1}, false, 0, cap,
                          "R_" + bname(i) + "_" + lname(n.line) + "_" + tname(t));
                for (ProductId p = 0; p < P; ++p)
                    m.add_var(VarKind::RP, {i, p, n.line, t, -1}, false, 0, cap,
                              "RP_" + bname(i) + "_" + pname(p) + "_" + lname(n.line) + "_" + tname(t));
            }
        }
    }
    for (size_t o = 0; o < inst_.outputs.size(); ++o) {
        const double cap = inst_.outputs[o].deliver_max;
        for (BatchId i : inst_.depot_batches[o]) {
            for (int t = 1; t <= T; ++t) {
                m.add_var(VarKind::D, {i, static_cast<int>(o), t, -1, -1}, false, 0, cap,
                          "D_" + bname(i) + "_" + oname(static_cast<int>(o)) + "_" + tname(t));
                for (ProductId p = 0; p < P; ++p)
                    m.add_var(VarKind::DP, {i, p, static_cast<int>(o), t, -1}, false, 0, cap,
                              "DP_" + bname(i) + "_" + pname(p) + "_" + oname(static_cast<int>(o)) +
                                  "_" + tname(t));
            }
        }
    }
    for (LineId l = 1; l < static_cast<LineId>(inst_.lines.size()); ++l)
        for (BatchId i : inst_.line_batches[l - 1])
            for (int t = 1; t <= T; ++t)
                m.add_var(VarKind::S, {i, l, t, -1, -1}, false, 0, inst_.rules.transfer_max,
                          "S_" + bname(i) + "_" + lname(l) + "_" + tname(t));

    for (ProductId p = 0; p < P; ++p)
        for (size_t o = 0; o < inst_.outputs.size(); ++o)
            m.add_var(VarKind::BORDER, {p, static_cast<int>(o), -1, -1, -1}, false, 0, kInf,
                      "Border_" + pname(p) + "_" + oname(static_cast<int>(o)));
    for (BatchId i = 1; i < N; ++i)
        m.add_var(VarKind::IC, {i, -1, -1, -1, -1}, false, 0, kInf, "IC_" + bname(i));

    variables_declared_ = true;
}

void ModelBuilder::add_assignment() {
    auto& m = *model_;
    const int N = inst_.batch_count();
    const int P = static_cast<int>(inst_.products.size());

    for (BatchId i = 0; i < N; ++i) {
        const bool old = i < inst_.old_batch_count();
        if (old && inst_.initial[i].product) {
            // Eq. (1) for old batches: the assignment is data, not a decision.
            for (ProductId p = 0; p < P; ++p)
                m.fix_var(m.find(VarKind::Y, {i, p, -1, -1, -1}),
                          p == *inst_.initial[i].product ? 1.0 : 0.0);
            continue;
        }
        LinConstraint c;
        c.name = "eq1_" + bname(i);
        for (ProductId p = 0; p < P; ++p)
            c.terms.push_back({m.find(VarKind::Y, {i, p, -1, -1, -1}), 1.0});
        c.sense = inst_.is_optional_batch(i) ? Sense::LE : Sense::EQ;
        c.rhs = 1.0;
        m.add_row(std::move(c));
    }

    // Eq. (2): forbidden product sequences between consecutive batches.
    for (BatchId i = 1; i < N; ++i) {
        for (ProductId a = 0; a < P; ++a) {
            for (ProductId b = 0; b < P; ++b) {
                if (!inst_.rules.forbidden[a][b]) continue;
                LinConstraint c;
                c.name = "eq2_" + bname(i) + "_p" + inst_.products[a].id + "_p" +
                         inst_.products[b].id;
                c.terms.push_back({m.find(VarKind::Y, {i - 1, a, -1, -1, -1}), 1.0});
                c.terms.push_back({m.find(VarKind::Y, {i, b, -1, -1, -1}), 1.0});
                c.sense = Sense::LE;
                c.rhs = 1.0;
                m.add_row(std::move(c));
            }
        }
    }
}

void ModelBuilder::add_coordinates() {
    auto& m = *model_;
    const int T = inst_.grid.slots;

    for (LineId l = 0; l < static_cast<LineId>(inst_.lines.size()); ++l) {
        const auto& batches = inst_.line_batches[l];
        for (size_t bi = 0; bi < batches.size(); ++bi) {
            const BatchId i = batches[bi];
            const BatchId next = (bi + 1 < batches.size()) ? batches[bi + 1] : -1;
            for (int t = 0; t <= T; ++t) {
                // Eq. (3): F = W + F(next); the hindmost batch anchors F = W.
                LinConstraint c;
                c.name = "eq3_" + bname(i) + "_" + lname(l) + "_" + tname(t);
                c.terms.push_back({m.find(VarKind::F, {i, l, t, -1, -1}), 1.0});
                c.terms.push_back({m.find(VarKind::W_VOL, {i, l, t, -1, -1}), -1.0});
                if (next >= 0)
                    c.terms.push_back({m.find(VarKind::F, {next, l, t, -1, -1}), -1.0});
                c.sense = Sense::EQ;
                c.rhs = 0.0;
                m.add_row(std::move(c));

                if (t >= 1) {
                    // Eq. (5): unidirectional movement.
                    LinConstraint mono;
                    mono.name = "eq5_" + bname(i) + "_" + lname(l) + "_" + tname(t);
                    mono.terms.push_back({m.find(VarKind::F, {i, l, t, -1, -1}), 1.0});
                    mono.terms.push_back({m.find(VarKind::F, {i, l, t - 1, -1, -1}), -1.0});
                    mono.sense = Sense::GE;
                    mono.rhs = 0.0;
                    m.add_row(std::move(mono));
                }
            }
        }
    }
    // Eq. (4) is the fixed state-0 coordinate, Eq. (6) the F variable upper
    // bound; both live in the variable declarations.
}

void ModelBuilder::add_injection() {
    auto& m = *model_;
    const int T = inst_.grid.slots;
    const int P = static_cast<int>(inst_.products.size());
    const double dt = inst_.grid.dt_hours;

    for (size_t k = 0; k < inst_.inputs.size(); ++k) {
        const auto& n = inst_.inputs[k];
        const LineId l = n.line;
        const double vl = inst_.lines[l].volume;
        for (int t = 1; t <= T; ++t) {
            // Eq. (7): at most one batch enlarged per node and slot.
            LinConstraint c7;
            c7.name = "eq7_" + lname(l) + "_" + tname(t);
            for (BatchId i : inst_.input_batches[k])
                c7.terms.push_back({m.find(VarKind::W_ACT, {i, l, t, -1, -1}), 1.0});
            c7.sense = Sense::LE;
            c7.rhs = 1.0;
            m.add_row(std::move(c7));

            // Eq. (13): pump rate window for the active node. The upper bound
            // is not activity-gated, exactly as written.
            LinConstraint lo;
            lo.name = "eq13lo_" + lname(l) + "_" + tname(t);
            for (BatchId i : inst_.input_batches[k]) {
                lo.terms.push_back({m.find(VarKind::R, {i, l, t, -1, -1}), 1.0});
                lo.terms.push_back({m.find(VarKind::W_ACT, {i, l, t, -1, -1}), -dt * n.rate_min});
            }
            lo.sense = Sense::GE;
            lo.rhs = 0.0;
            m.add_row(std::move(lo));
            LinConstraint up;
            up.name = "eq13up_" + lname(l) + "_" + tname(t);
            for (BatchId i : inst_.input_batches[k])
                up.terms.push_back({m.find(VarKind::R, {i, l, t, -1, -1}), 1.0});
            up.sense = Sense::LE;
            up.rhs = dt * n.rate_max;
            m.add_row(std::move(up));
        }

        for (BatchId i : inst_.input_batches[k]) {
            for (int t = 1; t <= T; ++t) {
                const auto w = m.find(VarKind::W_ACT, {i, l, t, -1, -1});
                // Eq. (10): the enlarged batch sits at the line origin.
                LinConstraint c10;
                c10.name = "eq10_" + bname(i) + "_" + lname(l) + "_" + tname(t);
                c10.terms.push_back({m.find(VarKind::F, {i, l, t, -1, -1}), 1.0});
                c10.terms.push_back({m.find(VarKind::W_VOL, {i, l, t, -1, -1}), -1.0});
                c10.terms.push_back({w, vl});
                c10.sense = Sense::LE;
                c10.rhs = vl;
                m.add_row(std::move(c10));

                // Eq. (11): the previous line is completely behind the batch.
                if (l >= 1) {
                    const auto f_prev = m.find(VarKind::F, {i, l - 1, t, -1, -1});
                    if (!f_prev.valid())
                        throw Error("eligibility: batch " + bname(i) + " in I_" + lname(l) +
                                    "^input must be tracked in line " + lname(l - 1));
                    LinConstraint c11;
                    c11.name = "eq11_" + bname(i) + "_" + lname(l) + "_" + tname(t);
                    c11.terms.push_back({f_prev, 1.0});
                    c11.terms.push_back({w, -inst_.lines[l - 1].volume});
                    c11.sense = Sense::GE;
                    c11.rhs = 0.0;
                    m.add_row(std::move(c11));
                }

                // Eq. (12): per-slot injection volume window when active.
                const auto r = m.find(VarKind::R, {i, l, t, -1, -1});
                LinConstraint c12u;
                c12u.name = "eq12up_" + bname(i) + "_" + lname(l) + "_" + tname(t);
                c12u.terms.push_back({r, 1.0});
                c12u.terms.push_back({w, -n.inject_max});
                c12u.sense = Sense::LE;
                c12u.rhs = 0.0;
                m.add_row(std::move(c12u));
                LinConstraint c12l;
                c12l.name = "eq12lo_" + bname(i) + "_" + lname(l) + "_" + tname(t);
                c12l.terms.push_back({r, 1.0});
                c12l.terms.push_back({w, -n.inject_min});
                c12l.sense = Sense::GE;
                c12l.rhs = 0.0;
                m.add_row(std::move(c12l));

                // Eq. (14): product split matches the injected volume.
                LinConstraint c14;
                c14.name = "eq14_" + bname(i) + "_" + lname(l) + "_" + tname(t);
                for (ProductId p = 0; p < P; ++p)
                    c14.terms.push_back({m.find(VarKind::RP, {i, p, l, t, -1}), 1.0});
                c14.terms.push_back({r, -1.0});
                c14.sense = Sense::EQ;
                c14.rhs = 0.0;
                m.add_row(std::move(c14));
            }
        }
    }

    for (int t = 1; t <= T; ++t) {
        if (inst_.options.force_active_injection) {
            // Eq. (8): at least one active input node per slot.
            LinConstraint c8;
            c8.name = "eq8_" + tname(t);
            for (size_t k = 0; k < inst_.inputs.size(); ++k)
                for (BatchId i : inst_.input_batches[k])
                    c8.terms.push_back(
                        {m.find(VarKind::W_ACT, {i, inst_.inputs[k].line, t, -1, -1}), 1.0});
            c8.sense = Sense::GE;
            c8.rhs = 1.0;
            m.add_row(std::move(c8));
        }
        if (inst_.options.exclusive_injection) {
            // Single-active-refinery restriction (Example 2 runs).
            LinConstraint ex;
            ex.name = "excl_" + tname(t);
            for (size_t k = 0; k < inst_.inputs.size(); ++k)
                for (BatchId i : inst_.input_batches[k])
                    ex.terms.push_back(
                        {m.find(VarKind::W_ACT, {i, inst_.inputs[k].line, t, -1, -1}), 1.0});
            ex.sense = Sense::LE;
            ex.rhs = 1.0;
            m.add_row(std::move(ex));
        }
    }

    // Eq. (9): an assigned new batch must actually be injected. Old assigned
    // batches are exempt as in the paper; reserved EMPTY slots carry it in
    // the <= form, which leaves them free to stay unused.
    const int N = inst_.batch_count();
    for (BatchId i = 0; i < N; ++i) {
        const bool old_assigned =
            i < inst_.old_batch_count() && inst_.initial[i].product.has_value();
        if (old_assigned) continue;
        LinConstraint c9;
        c9.name = "eq9_" + bname(i);
        for (ProductId p = 0; p < P; ++p)
            c9.terms.push_back({m.find(VarKind::Y, {i, p, -1, -1, -1}), 1.0});
        for (size_t k = 0; k < inst_.inputs.size(); ++k)
            for (int t = 1; t <= T; ++t) {
                auto w = m.find(VarKind::W_ACT, {i, inst_.inputs[k].line, t, -1, -1});
                if (w.valid()) c9.terms.push_back({w, -1.0});
            }
        c9.sense = Sense::LE;
        c9.rhs = 0.0;
        m.add_row(std::move(c9));
    }

    // Eq. (15): no product flows into a batch not assigned to it.
    for (BatchId i = 0; i < N; ++i) {
        for (ProductId p = 0; p < P; ++p) {
            LinConstraint c15;
            c15.name = "eq15_" + bname(i) + "_p" + inst_.products[p].id;
            for (size_t k = 0; k < inst_.inputs.size(); ++k)
                for (int t = 1; t <= T; ++t) {
                    auto rp = m.find(VarKind::RP, {i, p, inst_.inputs[k].line, t, -1});
                    if (rp.valid()) c15.terms.push_back({rp, 1.0});
                }
            if (c15.terms.empty()) continue;
            c15.terms.push_back(
                {m.find(VarKind::Y, {i, p, -1, -1, -1}), -inst_.rules.product_cap[p]});
            c15.sense = Sense::LE;
            c15.rhs = 0.0;
            m.add_row(std::move(c15));
        }
    }

    // Eq. (16): horizon-wide inventory caps per node and product.
    for (size_t k = 0; k < inst_.inputs.size(); ++k) {
        const auto& n = inst_.inputs[k];
        for (ProductId p = 0; p < P; ++p) {
            LinConstraint c16;
            c16.name = "eq16_" + lname(n.line) + "_p" + inst_.products[p].id;
            for (BatchId i : inst_.input_batches[k])
                for (int t = 1; t <= T; ++t)
                    c16.terms.push_back({m.find(VarKind::RP, {i, p, n.line, t, -1}), 1.0});
            c16.sense = Sense::LE;
            c16.rhs = n.inventory[p];
            m.add_row(std::move(c16));
        }
    }
}

void ModelBuilder::add_delivery() {
    auto& m = *model_;
    const int T = inst_.grid.slots;
    const int P = static_cast<int>(inst_.products.size());
    const int N = inst_.batch_count();

    auto oname = [&](int o) {
        return "d" + std::to_string(inst_.outputs[o].index_in_line + 1) + "_" +
               lname(inst_.outputs[o].line);
    };

    for (size_t o = 0; o < inst_.outputs.size(); ++o) {
        const auto& out = inst_.outputs[o];
        const LineId l = out.line;
        const double vl = inst_.lines[l].volume;
        const double sig = out.offset;
        for (BatchId i : inst_.depot_batches[o]) {
            for (int t = 1; t <= T; ++t) {
                const auto x = m.find(VarKind::X_ACT, {i, static_cast<int>(o), t, -1, -1});
                const auto f = m.find(VarKind::F, {i, l, t, -1, -1});
                const auto wv = m.find(VarKind::W_VOL, {i, l, t, -1, -1});
                const std::string suffix =
                    bname(i) + "_" + oname(static_cast<int>(o)) + "_" + tname(t);

                // Eqs. (17)-(18): the batch straddles the depot offset.
                LinConstraint c17;
                c17.name = "eq17_" + suffix;
                c17.terms.push_back({f, 1.0});
                c17.terms.push_back({wv, -1.0});
                c17.terms.push_back({x, vl - sig});
                c17.sense = Sense::LE;
                c17.rhs = vl;
                m.add_row(std::move(c17));

                LinConstraint c18;
                c18.name = "eq18_" + suffix;
                c18.terms.push_back({f, 1.0});
                c18.terms.push_back({x, -sig});
                c18.sense = Sense::GE;
                c18.rhs = 0.0;
                m.add_row(std::move(c18));

                // Eq. (19): delivery window when active.
                const auto d = m.find(VarKind::D, {i, static_cast<int>(o), t, -1, -1});
                LinConstraint c19u;
                c19u.name = "eq19up_" + suffix;
                c19u.terms.push_back({d, 1.0});
                c19u.terms.push_back({x, -out.deliver_max});
                c19u.sense = Sense::LE;
                c19u.rhs = 0.0;
                m.add_row(std::move(c19u));
                LinConstraint c19l;
                c19l.name = "eq19lo_" + suffix;
                c19l.terms.push_back({d, 1.0});
                c19l.terms.push_back({x, -out.deliver_min});
                c19l.sense = Sense::GE;
                c19l.rhs = 0.0;
                m.add_row(std::move(c19l));

                // Eq. (20): material available to the line's depots from this
                // batch: what sits behind the offset plus same-slot inflows.
                LinConstraint c20;
                c20.name = "eq20_" + suffix;
                for (size_t o2 = 0; o2 < inst_.outputs.size(); ++o2) {
                    if (inst_.outputs[o2].line != l || !delivers(i, static_cast<int>(o2)))
                        continue;
                    c20.terms.push_back(
                        {m.find(VarKind::D, {i, static_cast<int>(o2), t, -1, -1}), 1.0});
                }
                c20.terms.push_back({f, 1.0});
                c20.terms.push_back({wv, -1.0});
                const auto r = m.find(VarKind::R, {i, l, t, -1, -1});
                if (r.valid()) c20.terms.push_back({r, -1.0});
                const auto s = m.find(VarKind::S, {i, l, t, -1, -1});
                if (s.valid()) c20.terms.push_back({s, -1.0});
                c20.terms.push_back({x, vl - sig});
                c20.sense = Sense::LE;
                c20.rhs = vl;
                m.add_row(std::move(c20));

                // Eq. (22): product split matches the delivered volume.
                LinConstraint c22;
                c22.name = "eq22_" + suffix;
                for (ProductId p = 0; p < P; ++p)
                    c22.terms.push_back(
                        {m.find(VarKind::DP, {i, p, static_cast<int>(o), t, -1}), 1.0});
                c22.terms.push_back({d, -1.0});
                c22.sense = Sense::EQ;
                c22.rhs = 0.0;
                m.add_row(std::move(c22));
            }
        }
    }

    // Eq. (21): no product leaves a batch not assigned to it.
    for (BatchId i = 0; i < N; ++i) {
        for (ProductId p = 0; p < P; ++p) {
            LinConstraint c21;
            c21.name = "eq21_" + bname(i) + "_p" + inst_.products[p].id;
            for (size_t o = 0; o < inst_.outputs.size(); ++o)
                for (int t = 1; t <= T; ++t) {
                    auto dp = m.find(VarKind::DP, {i, p, static_cast<int>(o), t, -1});
                    if (dp.valid()) c21.terms.push_back({dp, 1.0});
                }
            if (c21.terms.empty()) continue;
            c21.terms.push_back(
                {m.find(VarKind::Y, {i, p, -1, -1, -1}), -inst_.rules.product_cap[p]});
            c21.sense = Sense::LE;
            c21.rhs = 0.0;
            m.add_row(std::move(c21));
        }
    }

    // Eq. (23): demand satisfaction with backorder slack.
    for (ProductId p = 0; p < P; ++p) {
        for (size_t o = 0; o < inst_.outputs.size(); ++o) {
            if (inst_.outputs[o].demand[p] <= 0.0) continue;
            LinConstraint c23;
            c23.name = "eq23_p" + inst_.products[p].id + "_" + oname(static_cast<int>(o));
            for (BatchId i : inst_.depot_batches[o])
                for (int t = 1; t <= T; ++t)
                    c23.terms.push_back(
                        {m.find(VarKind::DP, {i, p, static_cast<int>(o), t, -1}), 1.0});
            c23.terms.push_back({m.find(VarKind::BORDER, {p, static_cast<int>(o), -1, -1, -1}), 1.0});
            c23.sense = Sense::GE;
            c23.rhs = inst_.outputs[o].demand[p];
            m.add_row(std::move(c23));
        }
    }
}

void ModelBuilder::add_transfer() {
    auto& m = *model_;
    const int T = inst_.grid.slots;

    for (LineId l = 1; l < static_cast<LineId>(inst_.lines.size()); ++l) {
        const double vl = inst_.lines[l].volume;
        const double vl_prev = inst_.lines[l - 1].volume;
        for (BatchId i : inst_.line_batches[l - 1]) {
            for (int t = 1; t <= T; ++t) {
                const auto u = m.find(VarKind::U_ACT, {i, l, t, -1, -1});
                const auto s = m.find(VarKind::S, {i, l, t, -1, -1});
                const std::string suffix = bname(i) + "_" + lname(l) + "_" + tname(t);

                // Eq. (24): the entering batch starts at the new line's origin.
                const auto f_dst = m.find(VarKind::F, {i, l, t, -1, -1});
                if (!f_dst.valid())
                    throw Error("eligibility: batch " + bname(i) +
                                " transfers into untracked line " + lname(l));
                LinConstraint c24;
                c24.name = "eq24_" + suffix;
                c24.terms.push_back({f_dst, 1.0});
                c24.terms.push_back({m.find(VarKind::W_VOL, {i, l, t, -1, -1}), -1.0});
                c24.terms.push_back({u, vl});
                c24.sense = Sense::LE;
                c24.rhs = vl;
                m.add_row(std::move(c24));

                // Eq. (25): it has reached the end of the previous line.
                LinConstraint c25;
                c25.name = "eq25_" + suffix;
                c25.terms.push_back({m.find(VarKind::F, {i, l - 1, t, -1, -1}), 1.0});
                c25.terms.push_back({u, -vl_prev});
                c25.sense = Sense::GE;
                c25.rhs = 0.0;
                m.add_row(std::move(c25));

                // Eq. (26): transfer volume window when active.
                LinConstraint c26u;
                c26u.name = "eq26up_" + suffix;
                c26u.terms.push_back({s, 1.0});
                c26u.terms.push_back({u, -inst_.rules.transfer_max});
                c26u.sense = Sense::LE;
                c26u.rhs = 0.0;
                m.add_row(std::move(c26u));
                LinConstraint c26l;
                c26l.name = "eq26lo_" + suffix;
                c26l.terms.push_back({s, 1.0});
                c26l.terms.push_back({u, -inst_.rules.transfer_min});
                c26l.sense = Sense::GE;
                c26l.rhs = 0.0;
                m.add_row(std::move(c26l));
            }
        }

        // Eq. (27): no transfer into a line whose node is injecting.
        const int k = inst_.input_index_at_line(l);
        for (int t = 1; t <= T; ++t) {
            LinConstraint c27;
            c27.name = "eq27_" + lname(l) + "_" + tname(t);
            for (BatchId i : inst_.line_batches[l - 1])
                c27.terms.push_back({m.find(VarKind::S, {i, l, t, -1, -1}), 1.0});
            if (k >= 0)
                for (BatchId i : inst_.input_batches[k])
                    c27.terms.push_back({m.find(VarKind::W_ACT, {i, l, t, -1, -1}),
                                         inst_.rules.transfer_max});
            c27.sense = Sense::LE;
            c27.rhs = inst_.rules.transfer_max;
            m.add_row(std::move(c27));
        }
    }
}

void ModelBuilder::add_balance() {
    auto& m = *model_;
    const int T = inst_.grid.slots;
    const int L = static_cast<int>(inst_.lines.size());

    for (LineId l = 0; l < L; ++l) {
        for (BatchId i : inst_.line_batches[l]) {
            for (int t = 1; t <= T; ++t) {
                // Eq. (28): batch volume recursion with same-slot flows. The
                // transfer terms vanish at the pipeline boundaries.
                LinConstraint c28;
                c28.name = "eq28_" + bname(i) + "_" + lname(l) + "_" + tname(t);
                c28.terms.push_back({m.find(VarKind::W_VOL, {i, l, t, -1, -1}), 1.0});
                c28.terms.push_back({m.find(VarKind::W_VOL, {i, l, t - 1, -1, -1}), -1.0});
                const auto r = m.find(VarKind::R, {i, l, t, -1, -1});
                if (r.valid()) c28.terms.push_back({r, -1.0});
                const auto s_in = m.find(VarKind::S, {i, l, t, -1, -1});
                if (s_in.valid()) c28.terms.push_back({s_in, -1.0});
                const auto s_out = m.find(VarKind::S, {i, l + 1, t, -1, -1});
                if (s_out.valid()) c28.terms.push_back({s_out, 1.0});
                for (size_t o = 0; o < inst_.outputs.size(); ++o) {
                    if (inst_.outputs[o].line != l || !delivers(i, static_cast<int>(o))) continue;
                    c28.terms.push_back(
                        {m.find(VarKind::D, {i, static_cast<int>(o), t, -1, -1}), 1.0});
                }
                c28.sense = Sense::EQ;
                c28.rhs = 0.0;
                m.add_row(std::move(c28));
            }
        }

        for (int t = 0; t <= T; ++t) {
            // Eq. (30): each line stays full.
            LinConstraint c30;
            c30.name = "eq30_" + lname(l) + "_" + tname(t);
            for (BatchId i : inst_.line_batches[l])
                c30.terms.push_back({m.find(VarKind::W_VOL, {i, l, t, -1, -1}), 1.0});
            c30.sense = Sense::EQ;
            c30.rhs = inst_.lines[l].volume;
            m.add_row(std::move(c30));
        }

        const int k = inst_.input_index_at_line(l);
        for (int t = 1; t <= T; ++t) {
            // Eq. (31): per-slot line throughput balance.
            LinConstraint c31;
            c31.name = "eq31_" + lname(l) + "_" + tname(t);
            if (l >= 1)
                for (BatchId i : inst_.line_batches[l - 1])
                    c31.terms.push_back({m.find(VarKind::S, {i, l, t, -1, -1}), 1.0});
            if (k >= 0)
                for (BatchId i : inst_.input_batches[k])
                    c31.terms.push_back({m.find(VarKind::R, {i, l, t, -1, -1}), 1.0});
            for (size_t o = 0; o < inst_.outputs.size(); ++o) {
                if (inst_.outputs[o].line != l) continue;
                for (BatchId i : inst_.depot_batches[o])
                    c31.terms.push_back(
                        {m.find(VarKind::D, {i, static_cast<int>(o), t, -1, -1}), -1.0});
            }
            if (l + 1 < L)
                for (BatchId i : inst_.line_batches[l])
                    c31.terms.push_back({m.find(VarKind::S, {i, l + 1, t, -1, -1}), -1.0});
            c31.sense = Sense::EQ;
            c31.rhs = 0.0;
            m.add_row(std::move(c31));
        }
    }
    // Eq. (29) is the fixed state-0 volume, set with the declarations.
}

void ModelBuilder::add_objective() {
    auto& m = *model_;
    const int T = inst_.grid.slots;
    const int P = static_cast<int>(inst_.products.size());
    const int N = inst_.batch_count();
    const double scale = inst_.cost_scale;

    // Eq. (32): pumping + backorder + interface reprocessing, in money units.
    for (size_t k = 0; k < inst_.inputs.size(); ++k) {
        const auto& n = inst_.inputs[k];
        for (BatchId i : inst_.input_batches[k])
            for (ProductId p = 0; p < P; ++p)
                for (int t = 1; t <= T; ++t)
                    m.objective.push_back({m.find(VarKind::RP, {i, p, n.line, t, -1}),
                                           scale * n.pumping_cost[p]});
    }
    const bool sweep_cb = !std::isnan(opts_.backorder_cost_override);
    for (ProductId p = 0; p < P; ++p)
        for (size_t o = 0; o < inst_.outputs.size(); ++o) {
            const double cb = sweep_cb ? opts_.backorder_cost_override
                                       : inst_.backorder_cost_for(p, static_cast<int>(o));
            m.objective.push_back(
                {m.find(VarKind::BORDER, {p, static_cast<int>(o), -1, -1, -1}), cb});
        }
    for (BatchId i = 1; i < N; ++i)
        m.objective.push_back({m.find(VarKind::IC, {i, -1, -1, -1, -1}), 1.0});

    // Eq. (33): interface cost activation per adjacent pair.
    for (BatchId i = 1; i < N; ++i) {
        const auto ic = m.find(VarKind::IC, {i, -1, -1, -1, -1});
        for (ProductId a = 0; a < P; ++a) {
            for (ProductId b = 0; b < P; ++b) {
                const double c = scale * inst_.rules.interface_cost[a][b];
                if (c <= 0.0) continue;
                LinConstraint row;
                row.name = "eq33_" + bname(i) + "_p" + inst_.products[a].id + "_p" +
                           inst_.products[b].id;
                row.terms.push_back({ic, 1.0});
                row.terms.push_back({m.find(VarKind::Y, {i - 1, a, -1, -1, -1}), -c});
                row.terms.push_back({m.find(VarKind::Y, {i, b, -1, -1, -1}), -c});
                row.sense = Sense::GE;
                row.rhs = -c;
                m.add_row(std::move(row));
            }
        }
    }

    // Optional variant: price the physical interface between the nearest
    // assigned batches when the batches in between stay empty.
    if (inst_.options.interface_across_empty) {
        for (BatchId i = 1; i < N; ++i) {
            const auto ic = m.find(VarKind::IC, {i, -1, -1, -1, -1});
            for (BatchId j = i - 2; j >= 0; --j) {
                bool gap_can_be_empty = true;
                for (BatchId mid = j + 1; mid < i; ++mid)
                    if (!inst_.is_optional_batch(mid)) gap_can_be_empty = false;
                if (!gap_can_be_empty) break;
                for (ProductId a = 0; a < P; ++a) {
                    for (ProductId b = 0; b < P; ++b) {
                        const double c = scale * inst_.rules.interface_cost[a][b];
                        if (c <= 0.0) continue;
                        LinConstraint row;
                        row.name = "eqskip_" + bname(j) + "_" + bname(i) + "_p" +
                                   inst_.products[a].id + "_p" + inst_.products[b].id;
                        row.terms.push_back({ic, 1.0});
                        row.terms.push_back({m.find(VarKind::Y, {j, a, -1, -1, -1}), -c});
                        row.terms.push_back({m.find(VarKind::Y, {i, b, -1, -1, -1}), -c});
                        for (BatchId mid = j + 1; mid < i; ++mid)
                            for (ProductId p = 0; p < P; ++p)
                                row.terms.push_back({m.find(VarKind::Y, {mid, p, -1, -1, -1}), c});
                        row.sense = Sense::GE;
                        row.rhs = -c;
                        m.add_row(std::move(row));
                    }
                }
            }
        }
    }
}

void ModelBuilder::add_grid_rows() {
    auto& m = *model_;
    const double q = opts_.grid_quantum;
    if (q <= 0.0) return;
    const int n_vars = static_cast<int>(m.vars.size());
    for (int v = 0; v < n_vars; ++v) {
        const auto kind = m.vars[v].kind;
        if (kind != VarKind::R && kind != VarKind::D && kind != VarKind::S) continue;
        const double hi = m.vars[v].hi;
        const auto k = m.add_var(VarKind::GRID_K, {v, -1, -1, -1, -1}, true, 0,
                                 std::floor(hi / q + 1e-9), "k_" + m.vars[v].name);
        LinConstraint row;
        row.name = "grid_" + m.vars[v].name;
        row.terms.push_back({VarRef{v}, 1.0});
        row.terms.push_back({k, -q});
        row.sense = Sense::EQ;
        row.rhs = 0.0;
        m.add_row(std::move(row));
    }
}

MilpModel ModelBuilder::take() {
    add_grid_rows();
    const long size = static_cast<long>(model_->vars.size()) +
                      static_cast<long>(model_->rows.size());
    if (size > opts_.max_model_size)
        throw ModelSizeError("model has " + std::to_string(size) +
                             " rows+columns, cap is " + std::to_string(opts_.max_model_size));
    return std::move(*model_);
}

MilpModel ModelBuilder::build(const PipelineInstance& inst, BuildOptions opts) {
    ModelBuilder b(inst, opts);
    b.add_assignment();
    b.add_coordinates();
    b.add_injection();
    b.add_delivery();
    b.add_transfer();
    b.add_balance();
    b.add_objective();
    return b.take();
}

}  // namespace pipesched
