// Copyright 2026 The fairalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: solve, compare, sweep, bounds, check, gen.
// Exit codes: 0 success, 2 infeasible model, 3 non-convergence,
// 64 usage error, 66 file error.

#include <CLI11.hpp>

#include "fairalloc/analysis.hpp"
#include "fairalloc/baselines.hpp"
#include "fairalloc/cutting.hpp"
#include "fairalloc/io.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

namespace fa = fairalloc;

namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitUsage = 64;
constexpr int kExitFile = 66;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("FAIRALLOC_SEED"))
        return static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
    return 0;
}

// shared model/solve flags
struct SolveFlags {
    std::string model = "sadr";
    std::string instance_path;
    std::string scenarios_path;
    std::string gen_spec_path;
    double beta = 2.0;
    double lambda = 0.0;
    bool coupled = false;
    bool have_lambda = false;
    double theta = 1.0;
    double epsilon = 1e-6;
    std::uint64_t seed = default_seed();
    double delta = -1.0;  // ambiguity size; < 0 means unset
    bool vacuous = false;
    bool ev_theta_complement = false;
    bool timings = false;

    void add_to(CLI::App* cmd, bool with_model = true) {
        if (with_model)
            cmd->add_option("--model", model, "fds|ev|robust|saa|sadr")->required();
        cmd->add_option("--instance", instance_path, "instance JSON file")->required();
        cmd->add_option("--scenarios", scenarios_path, "scenario CSV file");
        cmd->add_option("--gen", gen_spec_path, "generator spec JSON file");
        cmd->add_option("--beta", beta, "fairness coefficient");
        auto* lam = cmd->add_option("--lambda", lambda, "efficiency coefficient");
        cmd->add_flag("--coupled", coupled, "tie lambda to (1-beta)/beta");
        lam->each([this](const std::string&) { have_lambda = true; });
        cmd->add_option("--theta", theta, "chance probability");
        cmd->add_option("--epsilon", epsilon, "solver tolerance");
        cmd->add_option("--seed", seed, "random seed (FAIRALLOC_SEED fallback)");
        cmd->add_option("--delta", delta, "moment ambiguity size around sample moments");
        cmd->add_flag("--vacuous", vacuous, "use the widest ambiguity set for the support");
        cmd->add_flag("--ev-theta-complement", ev_theta_complement,
                      "use 1-theta as the expected-value model's mass threshold");
        cmd->add_flag("--timings", timings, "record real wall time in reports");
    }

    fa::FairnessParams params() const {
        fa::FairnessParams p;
        p.beta = beta;
        p.theta = theta;
        p.epsilon = epsilon;
        if (coupled) {
            p.lambda_mode = fa::LambdaMode::coupled;
        } else if (have_lambda) {
            p.lambda = lambda;
        } else {
            throw CLI::ValidationError("--lambda or --coupled is required");
        }
        p.validate();
        return p;
    }

    fa::ScenarioSet load_scenarios() const {
        if (!scenarios_path.empty()) return fa::ingest_trace(scenarios_path).scenarios;
        if (!gen_spec_path.empty()) return fa::generate(fa::load_generator_spec(gen_spec_path));
        throw CLI::ValidationError("--scenarios or --gen is required");
    }

    fa::MomentAmbiguity ambiguity(const fa::ScenarioSet& scenarios) const {
        if (vacuous) return fa::vacuous_for(scenarios);
        if (delta >= 0.0) {
            const fa::SampleMoments mom = fa::sample_moments(scenarios);
            return fa::from_moments(mom.mean, mom.variance, delta);
        }
        const fa::AmbiguitySpec spec = fa::load_instance_ambiguity(instance_path);
        if (!spec.empty()) return spec.resolve(scenarios);
        throw CLI::ValidationError(
            "sadr needs an ambiguity set: --delta, --vacuous or an instance 'ambiguity' section");
    }
};

struct SolveOutcome {
    fa::SolveReport report;
    std::optional<fa::CutLog> log;
};

SolveOutcome run_model(const SolveFlags& flags, const fa::ResourceInstance& instance,
                       const fa::ScenarioSet& scenarios, const fa::FairnessParams& params) {
    const fa::Model model = fa::model_from_string(flags.model);
    SolveOutcome out;
    switch (model) {
        case fa::Model::fds: {
            // deterministic requirements: the single scenario, or the mean
            // matrix when several are given
            const fa::Matrix req = scenarios.size() == 1 ? scenarios.scenarios.front()
                                                         : fa::sample_moments(scenarios).mean;
            out.report = fa::solve_fds(instance, req, params, flags.seed);
            break;
        }
        case fa::Model::ev: {
            fa::BaselineOptions opts;
            opts.ev_theta_complement = flags.ev_theta_complement;
            out.report = fa::solve_ev(instance, scenarios,
                                      fa::DiscreteDistribution::uniform(scenarios.size()), params,
                                      flags.seed, opts);
            break;
        }
        case fa::Model::robust:
            out.report = fa::solve_robust(instance, scenarios, params, flags.seed);
            break;
        case fa::Model::saa:
            out.report = fa::solve_saa(instance, scenarios, params, flags.seed);
            break;
        case fa::Model::sadr: {
            const fa::MomentAmbiguity set = flags.ambiguity(scenarios);
            fa::SadrResult res = fa::solve_sadr(instance, scenarios, set, params, flags.seed);
            out.report = std::move(res.report);
            out.log = std::move(res.log);
            break;
        }
    }
    if (!flags.timings) out.report.wall_time = 0.0;
    return out;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        double lo, hi, step;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0)
            throw CLI::ValidationError("--values range must be lo:hi:step with step > 0");
        for (double v = lo; v <= hi + 1e-12; v += step) values.push_back(v);
        return values;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        values.push_back(std::stod(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (values.empty()) throw CLI::ValidationError("--values is empty");
    return values;
}

void write_row(std::FILE* f, const char* param, double value, const std::string& status,
               const fa::SolveReport& report, const fa::Vector& left,
               const fa::BoundsReport* bounds) {
    std::fprintf(f, "%s,%.12g,%s", param, value, status.c_str());
    std::fprintf(f, ",%.12g", report.objective);
    for (Eigen::Index j = 0; j < report.allocation.x.size(); ++j)
        std::fprintf(f, ",%.12g", report.allocation.x[j]);
    for (Eigen::Index i = 0; i < left.size(); ++i) std::fprintf(f, ",%.12g", left[i]);
    std::fprintf(f, ",%.6f", report.wall_time);
    if (bounds != nullptr)
        std::fprintf(f, ",%.12g,%.12g,%.12g", bounds->lower, bounds->upper, bounds->gap_percent);
    std::fprintf(f, "\n");
}

int cmd_solve(const SolveFlags& flags, const std::string& out_path,
              const std::string& cutlog_path) {
    const fa::ResourceInstance instance = fa::load_instance(flags.instance_path);
    const fa::ScenarioSet scenarios = flags.load_scenarios();
    const fa::FairnessParams params = flags.params();
    SolveOutcome out = run_model(flags, instance, scenarios, params);
    if (!out_path.empty()) fa::save_report(out.report, out_path, &params);
    if (!cutlog_path.empty() && out.log.has_value()) out.log->save_csv(cutlog_path);
    std::printf("model=%s objective=%.12g iterations=%d\n", flags.model.c_str(),
                out.report.objective, out.report.iterations);
    return 0;
}

int cmd_sweep(SolveFlags flags, const std::string& param, const std::string& values_text,
              const std::string& out_path, int jobs, bool with_bounds, int replicates,
              double prob) {
    const std::vector<double> values = parse_values(values_text);
    const fa::ResourceInstance instance = fa::load_instance(flags.instance_path);

    struct Row {
        double value = 0.0;
        std::string status = "ok";
        fa::SolveReport report;
        fa::Vector leftovers;
        std::optional<fa::BoundsReport> bounds;
    };
    std::vector<Row> rows(values.size());

    auto run_one = [&](std::size_t idx) {
        Row& row = rows[idx];
        row.value = values[idx];
        try {
            SolveFlags local = flags;
            fa::GeneratorSpec spec;
            fa::ScenarioSet scenarios;
            const bool generated = !flags.gen_spec_path.empty();
            if (generated) spec = fa::load_generator_spec(flags.gen_spec_path);

            if (param == "theta") {
                local.theta = row.value;
            } else if (param == "beta") {
                local.beta = row.value;
            } else if (param == "delta") {
                local.delta = row.value;
            } else if (param == "rho") {
                if (!generated || spec.family != fa::ScenarioFamily::box)
                    throw fa::Error("rho sweep needs a box generator spec via --gen");
                spec.radius = row.value;
            } else if (param == "omega") {
                if (!generated) throw fa::Error("omega sweep needs a generator spec via --gen");
                spec.count = static_cast<Eigen::Index>(row.value);
            } else if (param == "variance_config") {
                const auto configs = fa::demo_variance_configs(prob, flags.seed);
                const int k = static_cast<int>(row.value);
                if (k < 1 || k > 3) throw fa::Error("variance_config values must be 1, 2 or 3");
                spec = configs[static_cast<std::size_t>(k - 1)];
            } else {
                throw fa::Error("unknown sweep parameter '" + param + "'");
            }
            scenarios = (generated || param == "variance_config") ? fa::generate(spec)
                                                                  : local.load_scenarios();

            const fa::FairnessParams params = local.params();
            const SolveOutcome out = run_model(local, instance, scenarios, params);
            row.report = out.report;
            row.leftovers = fa::leftovers(out.report, scenarios, instance,
                                          fa::DiscreteDistribution::uniform(scenarios.size()));
            if (with_bounds) {
                fa::BoundsSetup setup;
                setup.generator = spec;
                setup.params = params;
                setup.replicates = replicates;
                setup.mode = local.model == "sadr" ? fa::BoundsMode::dr_replicate
                                                   : fa::BoundsMode::saa_point;
                setup.delta = local.delta >= 0.0 ? local.delta : 0.0;
                setup.solver_seed = local.seed;
                row.bounds = fa::confidence_bounds(instance, setup);
            }
        } catch (const fa::InfeasibleError& e) {
            row.status = "infeasible";
            row.report.warnings.push_back(e.what());
        } catch (const fa::NonConvergenceError& e) {
            row.status = "non-convergence";
            row.report.warnings.push_back(e.what());
        }
    };

    if (jobs <= 1) {
        for (std::size_t idx = 0; idx < values.size(); ++idx) run_one(idx);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (int t = 0; t < jobs; ++t) {
            workers.emplace_back([&] {
                for (std::size_t idx = next.fetch_add(1); idx < values.size();
                     idx = next.fetch_add(1))
                    run_one(idx);
            });
        }
        for (auto& w : workers) w.join();
    }

    std::FILE* f = out_path.empty() ? stdout : std::fopen(out_path.c_str(), "w");
    if (f == nullptr) throw fa::IoError("sweep: cannot write '" + out_path + "'");
    std::fprintf(f, "param,value,status,objective");
    for (Eigen::Index j = 0; j < instance.num_users(); ++j) std::fprintf(f, ",x_%ld", j + 1);
    for (Eigen::Index i = 0; i < instance.num_resources(); ++i)
        std::fprintf(f, ",leftover_%ld", i + 1);
    std::fprintf(f, ",wall_time");
    if (with_bounds) std::fprintf(f, ",lower,upper,gap_percent");
    std::fprintf(f, "\n");
    for (const Row& row : rows) {
        const fa::Vector left = row.leftovers.size() > 0
                                    ? row.leftovers
                                    : fa::Vector::Zero(instance.num_resources());
        fa::SolveReport rep = row.report;
        if (rep.allocation.x.size() == 0) rep.allocation.x = fa::Vector::Zero(instance.num_users());
        write_row(f, param.c_str(), row.value, row.status, rep, left,
                  row.bounds.has_value() ? &*row.bounds : nullptr);
    }
    if (f != stdout) std::fclose(f);
    return 0;
}

int cmd_compare(const SolveFlags& flags, const std::string& models_csv,
                const std::string& out_path) {
    const fa::ResourceInstance instance = fa::load_instance(flags.instance_path);
    const fa::ScenarioSet scenarios = flags.load_scenarios();
    const fa::FairnessParams params = flags.params();
    const fa::Matrix mus = fa::mu_table(fa::with_allocation_upper(instance, scenarios), scenarios);
    const fa::Vector uniform =
        fa::Vector::Constant(scenarios.size(), 1.0 / static_cast<double>(scenarios.size()));

    std::FILE* f = out_path.empty() ? stdout : std::fopen(out_path.c_str(), "w");
    if (f == nullptr) throw fa::IoError("compare: cannot write '" + out_path + "'");
    std::fprintf(f, "model,objective,saa_objective");
    for (Eigen::Index i = 0; i < instance.num_resources(); ++i)
        std::fprintf(f, ",leftover_%ld", i + 1);
    std::fprintf(f, "\n");

    std::size_t pos = 0;
    while (pos < models_csv.size()) {
        std::size_t next = models_csv.find(',', pos);
        if (next == std::string::npos) next = models_csv.size();
        SolveFlags local = flags;
        local.model = models_csv.substr(pos, next - pos);
        pos = next + 1;

        const SolveOutcome out = run_model(local, instance, scenarios, params);
        const double saa_obj = fa::expected_fairness_mu(out.report.allocation.x, mus, uniform,
                                                        params.beta, params.effective_lambda());
        const fa::Vector left = fa::leftovers(out.report, scenarios, instance,
                                              fa::DiscreteDistribution::uniform(scenarios.size()));
        std::fprintf(f, "%s,%.12g,%.12g", local.model.c_str(), out.report.objective, saa_obj);
        for (Eigen::Index i = 0; i < left.size(); ++i) std::fprintf(f, ",%.12g", left[i]);
        std::fprintf(f, "\n");
    }
    if (f != stdout) std::fclose(f);
    return 0;
}

int cmd_check(const std::string& report_path, const SolveFlags& flags, int trials,
              const std::string& out_path) {
    const fa::ResourceInstance instance = fa::load_instance(flags.instance_path);
    const fa::ScenarioSet scenarios = flags.load_scenarios();
    const fa::LoadedReport loaded = fa::load_report(report_path);
    fa::FairnessParams params;
    if (loaded.params.has_value()) {
        params = *loaded.params;
    } else {
        params = flags.params();
    }
    const fa::PropertyReport props =
        fa::check_properties(loaded.report, scenarios, instance, params, trials, flags.seed);
    if (!out_path.empty()) fa::save_report(loaded.report, out_path, &params, &props);

    std::printf("sharing_incentive=%s envy_violations=%zu pareto_trials=%d pareto_violations=%d "
                "guarantee_applies=%s\n",
                props.sharing_incentive_pass ? "pass" : "fail", props.envy.size(),
                props.pareto_spot.trials, props.pareto_spot.violations,
                props.pareto_spot.guarantee_applies ? "yes" : "no");
    return props.all_pass() ? 0 : 1;
}

int cmd_bounds(const SolveFlags& flags, const std::string& mode_name, int replicates,
               const std::string& out_path) {
    const fa::ResourceInstance instance = fa::load_instance(flags.instance_path);
    if (flags.gen_spec_path.empty())
        throw CLI::ValidationError("bounds needs a generator spec via --gen");
    fa::BoundsSetup setup;
    setup.generator = fa::load_generator_spec(flags.gen_spec_path);
    setup.params = flags.params();
    setup.replicates = replicates;
    setup.solver_seed = flags.seed;
    setup.delta = flags.delta >= 0.0 ? flags.delta : 0.0;
    if (mode_name == "saa_point") {
        setup.mode = fa::BoundsMode::saa_point;
    } else if (mode_name == "dr_replicate") {
        setup.mode = fa::BoundsMode::dr_replicate;
    } else {
        throw CLI::ValidationError("--mode must be saa_point or dr_replicate");
    }
    const fa::BoundsReport report = fa::confidence_bounds(instance, setup);
    if (!out_path.empty()) fa::save_bounds_report(report, out_path);
    std::printf("lower=%.12g upper=%.12g point=%.12g gap=%.4f%% (z=%.2f t=%.2f)\n", report.lower,
                report.upper, report.point_estimate, report.gap_percent, report.z_critical,
                report.t_critical);
    return 0;
}

int cmd_gen(const std::string& spec_path, Eigen::Index count, std::uint64_t seed, double radius,
            double prob, const std::string& out_path) {
    fa::GeneratorSpec spec = fa::load_generator_spec(spec_path);
    if (count > 0) spec.count = count;
    if (seed != std::numeric_limits<std::uint64_t>::max()) spec.seed = seed;
    if (radius >= 0.0) spec.radius = radius;
    if (prob >= 0.0) spec.prob = prob;
    const fa::ScenarioSet scenarios = fa::generate(spec);
    fa::save_scenarios(scenarios, out_path);
    std::printf("wrote %ld scenarios (%ld resources x %ld users) to %s\n",
                static_cast<long>(scenarios.size()), static_cast<long>(scenarios.num_resources()),
                static_cast<long>(scenarios.num_users()), out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fair multi-resource allocation under uncertain requirements"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "solve one model and write a report");
    SolveFlags solve_flags;
    solve_flags.add_to(solve);
    std::string solve_out, solve_cutlog;
    solve->add_option("--out", solve_out, "report JSON path");
    solve->add_option("--cutlog", solve_cutlog, "cutting-surface iteration CSV (sadr only)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "solve across a parameter grid, emit CSV");
    SolveFlags sweep_flags;
    sweep_flags.add_to(sweep);
    std::string sweep_param, sweep_values, sweep_out;
    int sweep_jobs = 1;
    bool sweep_bounds = false;
    int sweep_replicates = 5;
    double sweep_prob = 0.5;
    sweep->add_option("--param", sweep_param, "theta|beta|delta|rho|omega|variance_config")
        ->required();
    sweep->add_option("--values", sweep_values, "comma list or lo:hi:step")->required();
    sweep->add_option("--out", sweep_out, "CSV path (default stdout)");
    sweep->add_option("--jobs", sweep_jobs, "concurrent rows");
    sweep->add_flag("--bounds", sweep_bounds, "attach confidence bounds per row");
    sweep->add_option("--replicates", sweep_replicates, "bound replicates M");
    sweep->add_option("--prob", sweep_prob, "two-point probability for variance_config");

    // compare
    auto* compare = app.add_subcommand("compare", "run several models on shared scenarios");
    SolveFlags compare_flags;
    compare_flags.add_to(compare, /*with_model=*/false);
    std::string compare_models = "fds,ev,robust,saa,sadr";
    std::string compare_out;
    compare->add_option("--models", compare_models, "comma list of models");
    compare->add_option("--out", compare_out, "CSV path (default stdout)");

    // check
    auto* check = app.add_subcommand("check", "verify fairness properties of a report");
    SolveFlags check_flags;
    check_flags.add_to(check, /*with_model=*/false);
    std::string check_report, check_out;
    int check_trials = 200;
    check->add_option("--report", check_report, "solve report JSON")->required();
    check->add_option("--trials", check_trials, "Pareto spot-check trials");
    check->add_option("--out", check_out, "annotated report path");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "statistical lower/upper bounds");
    SolveFlags bounds_flags;
    bounds_flags.add_to(bounds);
    std::string bounds_mode = "saa_point", bounds_out;
    int bounds_replicates = 5;
    bounds->add_option("--mode", bounds_mode, "saa_point|dr_replicate");
    bounds->add_option("--replicates", bounds_replicates, "replicates M");
    bounds->add_option("--out", bounds_out, "bounds report JSON path");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a scenario CSV from a spec");
    std::string gen_spec, gen_out;
    Eigen::Index gen_count = 0;
    std::uint64_t gen_seed = std::numeric_limits<std::uint64_t>::max();
    double gen_radius = -1.0, gen_prob = -1.0;
    gen->add_option("--spec", gen_spec, "generator spec JSON")->required();
    gen->add_option("--count", gen_count, "override scenario count");
    gen->add_option("--seed", gen_seed, "override seed");
    gen->add_option("--radius", gen_radius, "override box radius");
    gen->add_option("--prob", gen_prob, "override two-point probability");
    gen->add_option("--out", gen_out, "scenario CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_flags, solve_out, solve_cutlog);
        if (sweep->parsed())
            return cmd_sweep(sweep_flags, sweep_param, sweep_values, sweep_out, sweep_jobs,
                             sweep_bounds, sweep_replicates, sweep_prob);
        if (compare->parsed()) {
            SolveFlags f = compare_flags;
            return cmd_compare(f, compare_models, compare_out);
        }
        if (check->parsed()) return cmd_check(check_report, check_flags, check_trials, check_out);
        if (bounds->parsed())
            return cmd_bounds(bounds_flags, bounds_mode, bounds_replicates, bounds_out);
        if (gen->parsed())
            return cmd_gen(gen_spec, gen_count, gen_seed, gen_radius, gen_prob, gen_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fa::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFile;
    } catch (const fa::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const fa::NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
