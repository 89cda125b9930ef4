// Command-line front end: solve, validate, sweep, export, examples.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pipesched/builder.hpp"
#include "pipesched/instance.hpp"
#include "pipesched/oracle.hpp"
#include "pipesched/schedule.hpp"
#include "pipesched/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pipesched;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitSolverError = 3;
constexpr int kExitLoadError = 4;

std::string now_iso8601() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

struct InstanceArgs {
    std::string builtin;
    std::string path;

    PipelineInstance load() const {
        if (!builtin.empty()) return builtin_instance(builtin);
        if (!path.empty()) return load_instance_file(path);
        throw ParseError("one of --builtin or --instance is required");
    }
};

void add_instance_args(CLI::App* cmd, InstanceArgs& args) {
    auto* b = cmd->add_option("--builtin", args.builtin,
                              "built-in instance: motivating|example1|example2");
    auto* i = cmd->add_option("--instance", args.path, "instance JSON file");
    b->excludes(i);
}

struct SolverArgs {
    std::string command;
    double gap = 0.0;
    double time_limit = 7200.0;
    bool keep_files = false;

    SolverConfig config() const {
        SolverConfig cfg =
            command.empty() ? SolverConfig::with_default_command() : SolverConfig{};
        if (!command.empty()) cfg.command = command;
        cfg.gap = gap;
        cfg.time_limit_sec = time_limit;
        cfg.keep_files = keep_files;
        return cfg;
    }
};

void add_solver_args(CLI::App* cmd, SolverArgs& args) {
    cmd->add_option("--solver-cmd", args.command,
                    "solver command template with {mps} {sol} {timelimit} {gap} "
                    "(default: PIPESCHED_SOLVER_CMD or the bundled HiGHS adapter)");
    cmd->add_option("--gap", args.gap, "relative MIP gap target")->check(CLI::Range(0.0, 0.999));
    cmd->add_option("--time-limit", args.time_limit, "solver time limit in seconds")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--keep-files", args.keep_files, "keep solver scratch files");
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

json solution_json(const MilpModel& model, const Solution& sol) {
    json j;
    j["status"] = to_string(sol.status);
    j["objective"] = sol.objective;
    j["bound"] = sol.bound;
    j["gap"] = sol.gap;
    json vars = json::object();
    for (size_t v = 0; v < model.vars.size(); ++v)
        if (std::abs(sol.values[v]) > 1e-11) vars[model.vars[v].name] = sol.values[v];
    j["variables"] = vars;
    for (const auto& line : sol.parse_log) j["parse_log"].push_back(line);
    return j;
}

json manifest_base(const std::string& command, const PipelineInstance& inst,
                   const SolverArgs& solver) {
    json m;
    m["command"] = command;
    m["instance"] = inst.name;
    m["instance_hash"] = instance_hash(inst);
    m["solver"] = {{"command", solver.command.empty() ? "<default>" : solver.command},
                   {"gap", solver.gap},
                   {"time_limit_sec", solver.time_limit}};
    m["started"] = now_iso8601();
    return m;
}

int cmd_solve(const InstanceArgs& iargs, const SolverArgs& sargs, const std::string& out_dir,
              double grid_quantum) {
    PipelineInstance inst;
    try {
        inst = iargs.load();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLoadError;
    }
    fs::create_directories(out_dir);
    json manifest = manifest_base("solve", inst, sargs);

    BuildOptions bopts;
    bopts.grid_quantum = grid_quantum;
    const MilpModel model = ModelBuilder::build(inst, bopts);
    write_file(fs::path(out_dir) / "model_stats.json", model.stats().to_json() + "\n");

    Solution sol;
    try {
        sol = solve(model, sargs.config());
    } catch (const Error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        manifest["result"] = {{"status", "error"}, {"message", e.what()}};
        manifest["finished"] = now_iso8601();
        write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
        return kExitSolverError;
    }

    write_file(fs::path(out_dir) / "solution.json", solution_json(model, sol).dump(2) + "\n");
    manifest["result"] = {{"status", to_string(sol.status)},
                          {"objective", sol.objective},
                          {"gap", sol.gap}};
    manifest["outputs"] = {"solution.json", "model_stats.json"};

    int code = kExitOk;
    if (sol.status == SolStatus::Optimal || sol.status == SolStatus::FeasibleWithinGap) {
        const Schedule sched = extract_schedule(inst, model, sol);
        write_file(fs::path(out_dir) / "schedule.json",
                   render_report(inst, sched, ReportFormat::Json));
        write_file(fs::path(out_dir) / "gantt.json",
                   render_report(inst, sched, ReportFormat::GanttJson));
        const std::string text = render_report(inst, sched, ReportFormat::Text);
        write_file(fs::path(out_dir) / "report.txt", text);
        std::cout << text;
        manifest["outputs"].push_back("schedule.json");
        manifest["outputs"].push_back("gantt.json");
        manifest["outputs"].push_back("report.txt");
    } else if (sol.status == SolStatus::Infeasible) {
        std::cerr << "model is infeasible\n";
        code = kExitInfeasible;
    } else {
        std::cerr << "solver stopped without an incumbent\n";
        code = kExitSolverError;
    }
    manifest["finished"] = now_iso8601();
    write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
    return code;
}

int cmd_validate(const InstanceArgs& iargs, const std::string& plan_path,
                 const std::string& out_path) {
    PipelineInstance inst;
    OperatingPlan plan;
    try {
        inst = iargs.load();
        std::ifstream in(plan_path);
        if (!in) throw ParseError("cannot open plan file: " + plan_path);
        std::stringstream ss;
        ss << in.rdbuf();
        plan = plan_from_json(inst, ss.str());
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLoadError;
    }
    OracleReport rep;
    try {
        rep = check(inst, plan);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLoadError;
    }

    json j;
    j["feasible"] = rep.feasible();
    j["violations"] = json::array();
    for (const auto& v : rep.violations)
        j["violations"].push_back({{"rule", v.rule},
                                   {"where", v.where},
                                   {"measured", v.measured},
                                   {"bound", v.bound},
                                   {"message", v.message}});
    j["shortfalls"] = json::array();
    for (const auto& v : rep.shortfalls)
        j["shortfalls"].push_back({{"rule", v.rule},
                                   {"where", v.where},
                                   {"delivered", v.measured},
                                   {"demand", v.bound},
                                   {"message", v.message}});
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty() || out_path == "-")
        std::cout << text;
    else
        write_file(out_path, text);
    if (!rep.feasible()) {
        std::cerr << rep.violations.size() << " violation(s); first: rule "
                  << rep.violations.front().rule << " at " << rep.violations.front().where
                  << ": " << rep.violations.front().message << "\n";
        return kExitViolations;
    }
    return kExitOk;
}

int cmd_sweep(const InstanceArgs& iargs, const SolverArgs& sargs,
              const std::vector<double>& coefficients, const std::string& out_dir) {
    PipelineInstance inst;
    try {
        inst = iargs.load();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLoadError;
    }
    fs::create_directories(out_dir);
    json manifest = manifest_base("sweep", inst, sargs);
    manifest["coefficients"] = coefficients;

    // Rows stay comparable: one model per coefficient, differing only in the
    // backorder objective coefficients.
    json rows = json::array();
    std::ostringstream csv;
    csv << "coefficient,backorder_volume,objective,status\n";
    json series = {{"coefficients", json::array()},
                   {"backorder_volume", json::array()},
                   {"objective", json::array()}};
    for (double cb : coefficients) {
        BuildOptions bopts;
        bopts.backorder_cost_override = cb;
        const MilpModel model = ModelBuilder::build(inst, bopts);
        json row;
        row["coefficient"] = cb;
        try {
            const Solution sol = solve(model, sargs.config());
            if (sol.status == SolStatus::Optimal || sol.status == SolStatus::FeasibleWithinGap) {
                const Schedule sched = extract_schedule(inst, model, sol);
                row["status"] = to_string(sol.status);
                row["objective"] = sol.objective;
                row["backorder_volume"] = sched.costs.backorder_volume;
                csv << cb << "," << sched.costs.backorder_volume << "," << sol.objective << ","
                    << to_string(sol.status) << "\n";
                series["coefficients"].push_back(cb);
                series["backorder_volume"].push_back(sched.costs.backorder_volume);
                series["objective"].push_back(sol.objective);
            } else {
                row["status"] = to_string(sol.status);
                csv << cb << ",," << "," << to_string(sol.status) << "\n";
            }
        } catch (const Error& e) {
            row["status"] = "error";
            row["message"] = e.what();
            csv << cb << ",,,error\n";
        }
        rows.push_back(row);
        std::cout << "cb=" << cb << ": " << row.dump() << "\n";
    }
    json out;
    out["rows"] = rows;
    out["series"] = series;
    write_file(fs::path(out_dir) / "sweep.json", out.dump(2) + "\n");
    write_file(fs::path(out_dir) / "sweep.csv", csv.str());
    manifest["outputs"] = {"sweep.json", "sweep.csv"};
    manifest["finished"] = now_iso8601();
    write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
    return kExitOk;
}

int cmd_export(const InstanceArgs& iargs, const std::string& out_path,
               const std::string& stats_path) {
    PipelineInstance inst;
    try {
        inst = iargs.load();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLoadError;
    }
    const MilpModel model = ModelBuilder::build(inst);
    const std::string mps = export_mps(model);
    try {
        if (out_path.empty() || out_path == "-")
            std::cout << mps;
        else
            write_file(out_path, mps);
        if (!stats_path.empty()) write_file(stats_path, model.stats().to_json() + "\n");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLoadError;
    }
    return kExitOk;
}

int cmd_examples(const std::string& out_dir) {
    try {
        fs::create_directories(out_dir);
        for (const char* name : {"motivating", "example1", "example2"}) {
            const PipelineInstance inst = builtin_instance(name);
            write_file(fs::path(out_dir) / (std::string(name) + ".json"), save_instance(inst));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLoadError;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pipesched: discrete-time scheduling for straight multiproduct pipelines"};
    app.require_subcommand(1);

    InstanceArgs inst_solve, inst_validate, inst_sweep, inst_export;
    SolverArgs solver_solve, solver_sweep;
    std::string out_dir_solve = "out";
    std::string out_dir_sweep = "out";
    std::string out_dir_examples = ".";
    std::string plan_path, validate_out, export_out, export_stats;
    std::vector<double> coefficients;
    double grid_quantum = 0.0;

    auto* solve_cmd = app.add_subcommand("solve", "build the MILP, solve, extract the schedule");
    add_instance_args(solve_cmd, inst_solve);
    add_solver_args(solve_cmd, solver_solve);
    solve_cmd->add_option("--out-dir", out_dir_solve, "output directory");
    solve_cmd->add_option("--grid-quantum", grid_quantum,
                          "restrict operation volumes to multiples of this quantum");

    auto* validate_cmd =
        app.add_subcommand("validate", "check an operating plan against the instance rules");
    add_instance_args(validate_cmd, inst_validate);
    validate_cmd->add_option("--plan", plan_path, "operating plan JSON")->required();
    validate_cmd->add_option("--out", validate_out, "violation report path (default stdout)");

    auto* sweep_cmd =
        app.add_subcommand("sweep", "solve once per backorder coefficient (sensitivity study)");
    add_instance_args(sweep_cmd, inst_sweep);
    add_solver_args(sweep_cmd, solver_sweep);
    sweep_cmd->add_option("--cb", coefficients, "backorder coefficients")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--out-dir", out_dir_sweep, "output directory");

    auto* export_cmd = app.add_subcommand("export", "write the model as a fixed-layout MPS file");
    add_instance_args(export_cmd, inst_export);
    export_cmd->add_option("--out", export_out, "MPS path (default stdout)");
    export_cmd->add_option("--stats", export_stats, "also write model statistics JSON");

    auto* examples_cmd =
        app.add_subcommand("examples", "write the built-in instances as JSON files");
    examples_cmd->add_option("--out-dir", out_dir_examples, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed())
            return cmd_solve(inst_solve, solver_solve, out_dir_solve, grid_quantum);
        if (validate_cmd->parsed()) return cmd_validate(inst_validate, plan_path, validate_out);
        if (sweep_cmd->parsed())
            return cmd_sweep(inst_sweep, solver_sweep, coefficients, out_dir_sweep);
        if (export_cmd->parsed()) return cmd_export(inst_export, export_out, export_stats);
        if (examples_cmd->parsed()) return cmd_examples(out_dir_examples);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitLoadError;
    }
    return kExitOk;
}
