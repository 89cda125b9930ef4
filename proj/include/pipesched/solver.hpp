#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pipesched/milp.hpp"

namespace pipesched {

// Deterministic fixed-layout MPS export (see docs/formats.md for the byte
// format). Every integral variable sits in a MARKER-delimited block with
// explicit bounds.
std::string export_mps(const MilpModel& model, const std::string& problem_name = "PIPESCHED");

enum class SolStatus {
    Optimal,
    FeasibleWithinGap,
    Infeasible,
    TimeLimitNoIncumbent,
    Error,
};

const char* to_string(SolStatus s);

struct Solution {
    SolStatus status = SolStatus::Error;
    double objective = 0.0;
    double bound = 0.0;  // best dual bound reported by the solver
    double gap = 0.0;
    std::vector<double> values;  // indexed by VarRef::id; absent names default 0
    std::vector<std::string> parse_log;
};

struct SolverConfig {
    // Command template with {mps} {sol} {timelimit} {gap} placeholders.
    std::string command;
    double time_limit_sec = 7200.0;
    double gap = 0.0;
    int threads = 1;
    // Directory for scratch files; empty = unique directory under the system
    // temp root (concurrent solves stay isolated).
    std::string work_dir;
    bool keep_files = false;

    // PIPESCHED_SOLVER_CMD env var, else the bundled HiGHS adapter looked up
    // next to the running executable / in ./tools.
    static SolverConfig with_default_command();
};

// Parse a solution document ("name value" pairs, '#' comments, unknown names
// rejected). Does not verify feasibility.
Solution parse_solution(const MilpModel& model, const std::string& text);

// Row-wise check of Ax {<=,=,>=} b at volume tolerance and recomputation of
// the objective; throws InconsistentSolution on mismatch.
void verify_solution(const MilpModel& model, Solution& sol);

// Export, invoke the external solver, parse and verify.
Solution solve(const MilpModel& model, const SolverConfig& cfg);

}  // namespace pipesched
