#include "pipesched/solver.hpp"

#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "pipesched/instance.hpp"

namespace pipesched {

namespace fs = std::filesystem;

const char* to_string(SolStatus s) {
    switch (s) {
        case SolStatus::Optimal: return "optimal";
        case SolStatus::FeasibleWithinGap: return "feasible";
        case SolStatus::Infeasible: return "infeasible";
        case SolStatus::TimeLimitNoIncumbent: return "timelimit_no_incumbent";
        case SolStatus::Error: return "error";
    }
    return "error";
}

namespace {

std::string executable_dir() {
    std::error_code ec;
    auto p = fs::read_symlink("/proc/self/exe", ec);
    if (ec) return {};
    return p.parent_path().string();
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

}  // namespace

SolverConfig SolverConfig::with_default_command() {
    SolverConfig cfg;
    if (const char* env = std::getenv("PIPESCHED_SOLVER_CMD")) {
        cfg.command = env;
        return cfg;
    }
    std::vector<std::string> candidates;
    if (const char* env = std::getenv("PIPESCHED_ADAPTER")) candidates.push_back(env);
    const std::string exe_dir = executable_dir();
    if (!exe_dir.empty()) {
        candidates.push_back(exe_dir + "/highs_solve.py");
        candidates.push_back(exe_dir + "/../highs_solve.py");
        candidates.push_back(exe_dir + "/../tools/highs_solve.py");
        candidates.push_back(exe_dir + "/../../tools/highs_solve.py");
    }
    candidates.push_back("tools/highs_solve.py");
    for (const auto& c : candidates) {
        if (fs::exists(c)) {
            cfg.command = "python3 " + fs::absolute(c).string() +
                          " --mps {mps} --sol {sol} --time-limit {timelimit} --gap {gap}";
            return cfg;
        }
    }
    throw SolverLaunchError(
        "no solver configured: set PIPESCHED_SOLVER_CMD (template with {mps} {sol} "
        "{timelimit} {gap}) or keep tools/highs_solve.py next to the executable");
}

Solution parse_solution(const MilpModel& model, const std::string& text) {
    std::map<std::string, int> by_name;
    for (size_t v = 0; v < model.vars.size(); ++v)
        by_name[model.vars[v].name] = static_cast<int>(v);

    Solution sol;
    sol.values.assign(model.vars.size(), 0.0);
    std::vector<bool> seen(model.vars.size(), false);
    std::optional<double> reported_obj;

    std::istringstream is(text);
    std::string line;
    long line_no = 0;
    bool status_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "status") {
                std::string v;
                ls >> v;
                status_seen = true;
                if (v == "optimal") sol.status = SolStatus::Optimal;
                else if (v == "feasible") sol.status = SolStatus::FeasibleWithinGap;
                else if (v == "infeasible") sol.status = SolStatus::Infeasible;
                else if (v == "timelimit_no_incumbent") sol.status = SolStatus::TimeLimitNoIncumbent;
                else sol.status = SolStatus::Error;
            } else if (key == "objective") {
                double v;
                if (ls >> v) reported_obj = v;
            } else if (key == "bound") {
                ls >> sol.bound;
            } else if (key == "gap") {
                ls >> sol.gap;
            }
            continue;
        }
        std::istringstream ls(line);
        std::string name;
        double value;
        if (!(ls >> name >> value))
            throw SolutionParseError(line_no, "expected 'name value', got: " + line);
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw SolutionParseError(line_no, "unknown variable name '" + name + "'");
        sol.values[it->second] = value;
        seen[it->second] = true;
    }
    if (!status_seen) sol.status = SolStatus::Optimal;

    long defaulted = 0;
    for (bool s : seen)
        if (!s) ++defaulted;
    if (defaulted > 0)
        sol.parse_log.push_back("defaulted " + std::to_string(defaulted) +
                                " absent variables to 0");
    sol.objective = reported_obj.value_or(model.objective_value(sol.values));
    return sol;
}

void verify_solution(const MilpModel& model, Solution& sol) {
    if (sol.status == SolStatus::Infeasible || sol.status == SolStatus::TimeLimitNoIncumbent ||
        sol.status == SolStatus::Error)
        return;

    for (size_t v = 0; v < model.vars.size(); ++v) {
        const auto& def = model.vars[v];
        const double x = sol.values[v];
        if (def.integral && std::abs(x - std::round(x)) > 1e-6)
            throw InconsistentSolution("variable " + def.name + " = " + std::to_string(x) +
                                       " is not integral");
        if (x < def.lo - 1e-6 * std::max(1.0, std::abs(def.lo)) ||
            x > def.hi + 1e-6 * std::max(1.0, std::abs(def.hi)))
            throw InconsistentSolution("variable " + def.name + " = " + std::to_string(x) +
                                       " violates its bounds");
    }
    for (const auto& row : model.rows) {
        double act = 0.0;
        for (const auto& t : row.terms) act += t.coef * sol.values[t.var.id];
        const double tol = kVolumeTol * std::max(1.0, std::abs(row.rhs));
        const bool ok = (row.sense == Sense::LE && act <= row.rhs + tol) ||
                        (row.sense == Sense::GE && act >= row.rhs - tol) ||
                        (row.sense == Sense::EQ && std::abs(act - row.rhs) <= tol);
        if (!ok)
            throw InconsistentSolution("row " + row.name + " violated: activity " +
                                       std::to_string(act) + " vs rhs " + std::to_string(row.rhs));
    }
    const double recomputed = model.objective_value(sol.values);
    if (std::abs(recomputed - sol.objective) > kCostTol * std::max(1.0, std::abs(recomputed)))
        throw InconsistentSolution("objective mismatch: solver reported " +
                                   std::to_string(sol.objective) + ", model recomputes " +
                                   std::to_string(recomputed));
    sol.objective = recomputed;
}

Solution solve(const MilpModel& model, const SolverConfig& cfg) {
    if (cfg.command.empty()) throw SolverLaunchError("empty solver command");

    fs::path dir;
    bool temp_dir = cfg.work_dir.empty();
    if (temp_dir) {
        std::random_device rd;
        dir = fs::temp_directory_path() /
              ("pipesched-" + std::to_string(rd()) + "-" + std::to_string(::getpid()));
    } else {
        dir = cfg.work_dir;
    }
    fs::create_directories(dir);
    const fs::path mps_path = dir / "model.mps";
    const fs::path sol_path = dir / "model.sol";
    const fs::path log_path = dir / "solver.log";

    {
        std::ofstream out(mps_path, std::ios::binary);
        out << export_mps(model);
    }

    std::string cmd = cfg.command;
    cmd = replace_all(cmd, "{mps}", mps_path.string());
    cmd = replace_all(cmd, "{sol}", sol_path.string());
    cmd = replace_all(cmd, "{timelimit}", std::to_string(cfg.time_limit_sec));
    cmd = replace_all(cmd, "{gap}", std::to_string(cfg.gap));
    cmd += " >" + log_path.string() + " 2>&1";

    const int rc = std::system(cmd.c_str());
    const int exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;

    auto cleanup = [&]() {
        if (temp_dir && !cfg.keep_files) {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    };

    // Exit codes of the bundled adapter (documented in docs/formats.md):
    // 0 solved, 2 infeasible, 3 stopped without an incumbent, else failure.
    if (exit_code != 0 && exit_code != 2 && exit_code != 3) {
        std::string tail;
        std::ifstream log(log_path);
        std::string l;
        while (std::getline(log, l)) tail = tail.empty() ? l : tail + " | " + l;
        cleanup();
        throw SolverLaunchError("solver exited with code " + std::to_string(exit_code) +
                                (tail.empty() ? "" : ": " + tail));
    }

    std::ifstream in(sol_path);
    if (!in) {
        cleanup();
        if (exit_code == 2) {
            Solution s;
            s.status = SolStatus::Infeasible;
            return s;
        }
        if (exit_code == 3) {
            Solution s;
            s.status = SolStatus::TimeLimitNoIncumbent;
            return s;
        }
        throw SolverLaunchError("solver wrote no solution file");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    Solution sol = parse_solution(model, ss.str());
    if (exit_code == 2) sol.status = SolStatus::Infeasible;
    if (exit_code == 3) sol.status = SolStatus::TimeLimitNoIncumbent;
    verify_solution(model, sol);
    cleanup();
    return sol;
}

}  // namespace pipesched
