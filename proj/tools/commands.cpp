#include "commands.hpp"

#include "parallel.hpp"

#include "fyflow/conformal.hpp"
#include "fyflow/extension.hpp"
#include "fyflow/flow.hpp"
#include "fyflow/io.hpp"
#include "fyflow/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace fyflow::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

Grid make_grid(const RunConfig& cfg) {
    return Grid(cfg.get_int("grid.dim"), cfg.get_int("grid.points"),
                cfg.get_double("grid.side"));
}

FlowParams make_params(const RunConfig& cfg) {
    FlowParams p;
    p.gamma = cfg.get_double("params.gamma");
    p.n = cfg.get_int("params.n");
    p.q_c = cfg.get_double("params.q_c");
    p.h = cfg.get_double("params.h");
    p.tol_resolvent = cfg.get_double("params.tol_resolvent");
    p.max_iter = cfg.get_int("params.max_iter");
    return p;
}

// Band-limited noise with sup |z| <= 1, drawn deterministically from `rng`.
Field smooth_noise(const Grid& grid, Rng& rng, int cutoff) {
    Field z(grid, 0.0);
    const int n = grid.points_per_axis();
    const double unit = 2.0 * std::numbers::pi / grid.side_length();
    for (int comp = 0; comp < 8; ++comp) {
        int k[3] = {0, 0, 0};
        bool nonzero = false;
        for (int a = 0; a < grid.dim(); ++a) {
            k[a] = static_cast<int>(rng.uniform(0.0, cutoff + 1.0));
            if (k[a] > cutoff) k[a] = cutoff;
            if (k[a] != 0) nonzero = true;
        }
        if (!nonzero) k[0] = 1;
        const double amp = rng.normal();
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        std::size_t idx = 0;
        int c[3] = {0, 0, 0};
        for (idx = 0; idx < z.size(); ++idx) {
            double arg = phase;
            for (int a = 0; a < grid.dim(); ++a)
                arg += unit * k[a] * (c[a] * grid.spacing());
            z[idx] += amp * std::cos(arg);
            for (int a = grid.dim() - 1; a >= 0; --a) {
                if (++c[a] < n) break;
                c[a] = 0;
            }
        }
    }
    double m = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) m = std::max(m, std::abs(z[i]));
    if (m > 0.0)
        for (std::size_t i = 0; i < z.size(); ++i) z[i] /= m;
    return z;
}

Field make_initial(const RunConfig& cfg, const Grid& grid) {
    const std::string& kind = cfg.get_string("init.kind");
    const double value = cfg.get_double("init.value");
    const double amplitude = cfg.get_double("init.amplitude");
    const double floor_v = cfg.get_double("init.floor");

    Field f(grid, value);
    if (kind == "constant") {
        // nothing more
    } else if (kind == "one_plus_cos") {
        const int mode = cfg.get_int("init.mode");
        const double unit = 2.0 * std::numbers::pi / grid.side_length();
        const std::size_t s0 = grid.stride(0);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const std::size_t i0 = i / s0 % static_cast<std::size_t>(grid.points_per_axis());
            f[i] = value + amplitude * std::cos(unit * mode * (i0 * grid.spacing()));
        }
    } else if (kind == "random_smooth") {
        Rng rng = derive_stream(static_cast<std::uint64_t>(cfg.get_int("run.seed")),
                                stream_id::initial_data);
        const Field z = smooth_noise(grid, rng, cfg.get_int("init.cutoff"));
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = value + amplitude * z[i];
    } else if (kind == "file") {
        Field loaded = read_field_binary(cfg.get_string("init.path"));
        if (!(loaded.grid() == grid))
            throw ConfigError("init.path field does not match the configured grid",
                              "init.path");
        f = std::move(loaded);
    }
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::max(f[i], floor_v);
    return f;
}

fs::path ensure_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.get_string("run.out_dir"));
    fs::create_directories(dir);
    return dir;
}

void write_trace_csv(const FlowTrace& trace, const fs::path& path) {
    std::ofstream out(path);
    out << "t,mass,volume,sup,inf,harnack_quotient,dirichlet_energy\n";
    for (const auto& r : trace.records)
        out << format_double(r.t) << ',' << format_double(r.mass) << ','
            << format_double(r.volume) << ',' << format_double(r.sup) << ','
            << format_double(r.inf) << ',' << format_double(r.harnack_quotient) << ','
            << format_double(r.dirichlet_energy) << '\n';
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

void write_snapshots(const RunConfig& cfg, const FlowRun& run, const fs::path& dir) {
    const int stride = cfg.get_int("run.snapshot_stride");
    if (stride <= 0) return;
    for (std::size_t r = 0; r < run.fields.size(); r += static_cast<std::size_t>(stride)) {
        char name[32];
        std::snprintf(name, sizeof(name), "snapshot_%06zu.bin", r);
        write_field_binary(run.fields[r].second, dir / name);
    }
}

int cmd_flow_unrescaled(const RunConfig& cfg) {
    const Grid grid = make_grid(cfg);
    const FlowParams params = make_params(cfg);
    const Field u0 = make_initial(cfg, grid);
    const fs::path dir = ensure_out_dir(cfg);

    FlowRunOptions opts;
    opts.record_stride = cfg.get_int("run.record_stride");
    opts.extinction_threshold = cfg.get_double("run.extinction_threshold");
    opts.adapt_near_extinction = cfg.get_bool("run.adapt_near_extinction");
    opts.keep_fields =
        cfg.get_bool("run.rescale_output") || cfg.get_int("run.snapshot_stride") > 0;

    const FlowRun run =
        run_unrescaled({0.0, u0}, params, params.h, cfg.get_double("run.t_end"), opts);
    write_trace_csv(run.trace, dir / "trace.csv");
    write_snapshots(cfg, run, dir);

    const double mass0 = run.trace.records.front().mass;
    const double mass1 = run.trace.records.back().mass;
    const double drift = mass0 != 0.0 ? std::abs(mass1 - mass0) / std::abs(mass0) : 0.0;
    bool pass = true;
    json report{{"command", "flow-unrescaled"},
                {"extinct", run.trace.extinguished},
                {"extinction_time", run.trace.extinction_time},
                {"mass_initial", mass0},
                {"mass_final", mass1},
                {"steps_recorded", run.trace.records.size()}};
    if (params.q_c == 0.0) {
        const bool ok = drift <= cfg.get_double("run.mass_drift_tol");
        report["mass_drift_rel"] = drift;
        report["mass_ledger_pass"] = ok;
        pass = pass && ok;
    }

    if (cfg.get_bool("run.rescale_output")) {
        const RescaledTrajectory rt = rescale_via_time_change(run.fields, params);
        std::ofstream map_csv(dir / "rescale_map.csv");
        map_csv << "tau,t,F\n";
        for (std::size_t k = 0; k < rt.map.tau.size(); ++k)
            map_csv << format_double(rt.map.tau[k]) << ',' << format_double(rt.map.t[k])
                    << ',' << format_double(rt.map.F[k]) << '\n';
        FlowTrace vtrace;
        double v0 = 0.0, vdrift = 0.0;
        bool increasing = true;
        for (std::size_t k = 0; k < rt.v.size(); ++k) {
            vtrace.records.push_back(trace_record({rt.t[k], rt.v[k]}, params));
            const double m = vtrace.records.back().mass;
            if (k == 0)
                v0 = m;
            else
                vdrift = std::max(vdrift, std::abs(m - v0) / std::abs(v0));
            if (k > 0 && !(rt.t[k] > rt.t[k - 1])) increasing = false;
        }
        write_trace_csv(vtrace, dir / "rescaled_trace.csv");
        const bool ok = vdrift <= 1e-6 && increasing;
        report["rescale_mass_drift_rel"] = vdrift;
        report["rescale_time_map_increasing"] = increasing;
        report["rescale_ledger_pass"] = ok;
        pass = pass && ok;
    }

    report["pass"] = pass;
    write_json(report, dir / "report.json");
    return pass ? 0 : 1;
}

int cmd_flow_rescaled(const RunConfig& cfg) {
    const Grid grid = make_grid(cfg);
    const FlowParams params = make_params(cfg);
    const Field u0 = make_initial(cfg, grid);
    const fs::path dir = ensure_out_dir(cfg);

    FlowRunOptions opts;
    opts.record_stride = cfg.get_int("run.record_stride");
    opts.keep_fields = cfg.get_int("run.snapshot_stride") > 0;

    const FlowRun run =
        run_rescaled_direct({0.0, u0}, params, params.h, cfg.get_double("run.t_end"), opts);
    write_trace_csv(run.trace, dir / "trace.csv");
    write_snapshots(cfg, run, dir);

    const double vol0 = run.trace.records.front().volume;
    double vol_drift = 0.0;
    for (const auto& r : run.trace.records)
        vol_drift = std::max(vol_drift, std::abs(r.volume - vol0) / std::abs(vol0));
    const bool pass = vol_drift <= cfg.get_double("run.volume_drift_tol");

    json report{{"command", "flow-rescaled"},
                {"volume_initial", vol0},
                {"volume_drift_rel", vol_drift},
                {"q_first", run.q_samples.empty() ? 0.0 : run.q_samples.front()},
                {"q_last", run.q_samples.empty() ? 0.0 : run.q_samples.back()},
                {"harnack_initial", run.trace.records.front().harnack_quotient},
                {"harnack_final", run.trace.records.back().harnack_quotient},
                {"pass", pass}};
    write_json(report, dir / "report.json");
    return pass ? 0 : 1;
}

int cmd_ode(const RunConfig& cfg) {
    const double N = cfg.get_double("ode.exponent");
    const int sign = cfg.get_int("ode.q_sign");
    const double u0 = cfg.get_double("ode.u0");
    const double h = cfg.get_double("params.h");
    const double t_end = cfg.get_double("run.t_end");
    const fs::path dir = ensure_out_dir(cfg);

    const OdeTrajectory traj = ode_mode(N, sign, u0, h, t_end);
    std::ofstream csv(dir / "ode.csv");
    csv << "t,u\n";
    for (std::size_t k = 0; k < traj.t.size(); ++k)
        csv << format_double(traj.t[k]) << ',' << format_double(traj.u[k]) << '\n';

    json report{{"command", "ode"},
                {"exponent", N},
                {"q_sign", sign},
                {"u0", u0},
                {"extinct", traj.extinct},
                {"extinction_time", traj.extinction_time}};
    if (sign > 0 && u0 > 0.0)
        report["extinction_time_closed_form"] = extinction_time_constant(u0, 1.0, N);
    if (sign < 0) {
        report["selected_branch"] = to_string(classify_ode_branch(traj, N));
        // substitution residual of the nontrivial branch d/dt U^N = U
        double resid = 0.0;
        const double delta = 1e-5;
        for (double t = 0.5; t <= std::max(0.5, t_end); t += 0.25) {
            const double up = std::pow(ode_nontrivial_branch(t + delta, N), N);
            const double um = std::pow(ode_nontrivial_branch(t - delta, N), N);
            resid = std::max(resid,
                             std::abs((up - um) / (2.0 * delta) - ode_nontrivial_branch(t, N)));
        }
        report["nontrivial_branch_residual"] = resid;
    }
    write_json(report, dir / "report.json");
    return 0;
}

int cmd_resolvent(const RunConfig& cfg) {
    const Grid grid = make_grid(cfg);
    const FlowParams params = make_params(cfg);
    const Field g = make_initial(cfg, grid);
    if (inf(g) < 0.0)
        throw ConfigError("resolvent data must be nonnegative; raise init.floor",
                          "init.floor");
    const fs::path dir = ensure_out_dir(cfg);

    std::ofstream stream(dir / "iterations.jsonl");
    ResolventOptions opts;
    opts.observer = [&](const ResolventIteration& it) {
        stream << json{{"iteration", it.iteration},
                       {"objective", it.objective},
                       {"residual", it.residual},
                       {"step_length", it.step_length}}
                      .dump()
               << '\n';
    };

    const ResolventProblem prob(g, params);
    const ResolventSolution sol = solve_resolvent(prob, opts);
    write_field_binary(sol.w, (dir / "w.bin").string());
    write_field_csv(sol.w, (dir / "w.csv").string());

    json report{{"command", "resolvent"},
                {"iterations", sol.iterations},
                {"residual", sol.residual_norm},
                {"objective", sol.objective},
                {"mass_in", integral(g)},
                {"mass_out", integral(pow_plus(sol.w, params.N_gamma()))}};
    write_json(report, dir / "report.json");
    return 0;
}

int cmd_extension_check(const RunConfig& cfg) {
    const Grid grid = make_grid(cfg);
    const fs::path dir = ensure_out_dir(cfg);
    const std::vector<double> gammas = cfg.get_double_list("extension.gammas");
    const std::vector<int> modes = cfg.get_int_list("extension.modes");
    const int levels = cfg.get_int("extension.levels");
    const double beta = cfg.get_double("extension.beta");
    const double y_max = cfg.get_double("extension.y_max");
    const double threshold = cfg.get_double("extension.threshold");
    const double threshold_exact = cfg.get_double("extension.threshold_exact");

    ExtensionSolveOptions sopts;
    sopts.tol = cfg.get_double("extension.tol");
    sopts.max_iter = cfg.get_int("extension.max_iter");
    DtnOptions dopts;
    dopts.richardson = cfg.get_bool("extension.richardson");

    struct Task {
        double gamma;
        int mode;
        double error = 0.0;
        bool pass = false;
    };
    std::vector<Task> tasks;
    for (double g : gammas)
        for (int k : modes) tasks.push_back({g, k});

    const double unit = 2.0 * std::numbers::pi / grid.side_length();
    parallel_for(tasks.size(), [&](std::size_t i) {
        Task& task = tasks[i];
        const ExtensionMesh mesh =
            ExtensionMesh::graded(grid, task.gamma, levels, beta, y_max);
        Field f(grid);
        const std::size_t s0 = grid.stride(0);
        for (std::size_t p = 0; p < f.size(); ++p) {
            const std::size_t i0 =
                p / s0 % static_cast<std::size_t>(grid.points_per_axis());
            f[p] = std::cos(unit * task.mode * (i0 * grid.spacing()));
        }
        const ExtensionField U = solve_extension(f, mesh, sopts);
        const Field dtn = dtn_flux(U, task.gamma, dopts);
        const double target = std::pow(std::pow(unit * task.mode, 2.0), task.gamma);
        const Field diff = dtn - target * f;
        task.error = lp_norm(diff, 2.0) / (target * lp_norm(f, 2.0));
        task.pass = task.error <= (task.gamma == 0.5 ? threshold_exact : threshold);
    });

    std::ofstream out(dir / "extension_report.jsonl");
    bool all_pass = true;
    for (const auto& t : tasks) {
        out << json{{"gamma", t.gamma},
                    {"mode", t.mode},
                    {"mesh_size", levels},
                    {"relative_error", t.error},
                    {"pass", t.pass}}
                   .dump()
            << '\n';
        all_pass = all_pass && t.pass;
    }
    return all_pass ? 0 : 1;
}

int cmd_diagnostics(const RunConfig& cfg) {
    const Grid grid = make_grid(cfg);
    const FlowParams params = make_params(cfg);
    const fs::path dir = ensure_out_dir(cfg);
    const int trials = cfg.get_int("diagnostics.trials");
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("run.seed"));

    std::vector<std::string> selected;
    {
        const std::string& raw = cfg.get_string("diagnostics.checks");
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) selected.push_back(item);
    }
    auto wants = [&](const std::string& name) {
        for (const auto& s : selected)
            if (s == "all" || s == name) return true;
        return false;
    };

    std::vector<json> records;

    if (wants("t_contraction")) {
        const double slack = cfg.get_double("diagnostics.tc_tolerance");
        std::vector<json> rows(trials);
        parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
            Rng rng = derive_stream(seed, stream_id::t_contraction, trial);
            Field g1(grid), g2(grid);
            for (std::size_t i = 0; i < g1.size(); ++i) g1[i] = rng.uniform(0.0, 2.0);
            for (std::size_t i = 0; i < g2.size(); ++i) g2[i] = rng.uniform(0.0, 2.0);
            const TContractionPair pair = check_t_contraction(g1, g2, params, params.h);
            rows[trial] = json{{"check", "t_contraction"},
                               {"parameters",
                                {{"trial", trial},
                                 {"gamma", params.gamma},
                                 {"q_c", params.q_c},
                                 {"h", params.h}}},
                               {"lhs", pair.lhs},
                               {"rhs", pair.rhs},
                               {"pass", pair.lhs <= pair.rhs + slack}};
        });
        records.insert(records.end(), rows.begin(), rows.end());
    }

    if (wants("stroock_varopoulos")) {
        const std::vector<double> qs = cfg.get_double_list("diagnostics.sv_q");
        const std::vector<double> gs = cfg.get_double_list("diagnostics.sv_gammas");
        std::vector<std::vector<json>> rows(trials);
        parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
            Rng rng = derive_stream(seed, stream_id::stroock_varopoulos, trial);
            const Field z = smooth_noise(grid, rng, 8);
            Field v(grid);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(0.7 * z[i]);
            for (double q : qs)
                for (double g : gs) {
                    const CheckPair pair = stroock_varopoulos_check(v, g, q);
                    bool pass = pair.lhs >= pair.rhs - 1e-10;
                    if (q == 2.0)
                        pass = pass && std::abs(pair.lhs - pair.rhs) <=
                                           1e-12 * std::max(1.0, std::abs(pair.lhs));
                    rows[trial].push_back(json{{"check", "stroock_varopoulos"},
                                               {"parameters",
                                                {{"trial", trial}, {"gamma", g}, {"q", q}}},
                                               {"lhs", pair.lhs},
                                               {"rhs", pair.rhs},
                                               {"pass", pass}});
                }
        });
        for (auto& r : rows) records.insert(records.end(), r.begin(), r.end());
    }

    if (wants("conformal")) {
        const int n = params.n;
        const double gamma = params.gamma;
        Rng rng = derive_stream(seed, stream_id::kelvin);
        PointCloudField cloud;
        cloud.dim = n;
        const int npts = 1000;
        for (int p = 0; p < npts; ++p) {
            double r2 = 0.0;
            std::vector<double> x(n);
            do {
                r2 = 0.0;
                for (int d = 0; d < n; ++d) {
                    x[d] = rng.uniform(-2.0, 2.0);
                    r2 += x[d] * x[d];
                }
            } while (r2 < 1e-6);
            for (int d = 0; d < n; ++d) cloud.coords.push_back(x[d]);
            cloud.values.push_back(bubble_profile(x, n, gamma));
        }
        const PointCloudField twice = kelvin_transform(kelvin_transform(cloud, n, gamma), n, gamma);
        double invol_err = 0.0, bubble_err = 0.0;
        const PointCloudField once = kelvin_transform(cloud, n, gamma);
        for (std::size_t p = 0; p < cloud.size(); ++p) {
            invol_err = std::max(invol_err, std::abs(twice.values[p] - cloud.values[p]));
            bubble_err = std::max(
                bubble_err,
                std::abs(once.values[p] - bubble_profile(once.point(p), n, gamma)));
        }
        records.push_back(json{{"check", "kelvin_involution"},
                               {"parameters", {{"points", npts}, {"n", n}, {"gamma", gamma}}},
                               {"lhs", invol_err},
                               {"rhs", 1e-12},
                               {"pass", invol_err <= 1e-12}});
        records.push_back(json{{"check", "kelvin_bubble_fixed_point"},
                               {"parameters", {{"points", npts}, {"n", n}, {"gamma", gamma}}},
                               {"lhs", bubble_err},
                               {"rhs", 1e-12},
                               {"pass", bubble_err <= 1e-12}});

        Rng srng = derive_stream(seed, stream_id::stereographic);
        double norm_err = 0.0, round_err = 0.0;
        for (int p = 0; p < 10000; ++p) {
            std::vector<double> x(n);
            const double scale = std::pow(10.0, srng.uniform(-3.0, 6.0));
            for (int d = 0; d < n; ++d) x[d] = scale * srng.uniform(-1.0, 1.0);
            const std::vector<double> s = stereographic_inverse(x);
            double nrm = 0.0;
            for (double c : s) nrm += c * c;
            norm_err = std::max(norm_err, std::abs(std::sqrt(nrm) - 1.0));
            // the sphere coordinates resolve x only to eps*(1+|x|^2), so the
            // round trip is checked at moderate radius
            if (scale <= 10.0) {
                const std::vector<double> back = stereographic_forward(s);
                for (int d = 0; d < n; ++d)
                    round_err = std::max(round_err, std::abs(back[d] - x[d]) /
                                                        std::max(1.0, std::abs(x[d])));
            }
        }
        records.push_back(json{{"check", "stereographic_norm"},
                               {"parameters", {{"points", 10000}, {"n", n}}},
                               {"lhs", norm_err},
                               {"rhs", 1e-14},
                               {"pass", norm_err <= 1e-14}});
        records.push_back(json{{"check", "stereographic_roundtrip"},
                               {"parameters", {{"points", 10000}, {"n", n}}},
                               {"lhs", round_err},
                               {"rhs", 1e-12},
                               {"pass", round_err <= 1e-12}});
    }

    if (wants("harnack_box")) {
        HarnackBoxConfig hb;
        hb.gamma = params.gamma;
        hb.trials = trials;
        hb.seed = seed;
        hb.nodes_x = cfg.get_int("diagnostics.box_nodes_x");
        hb.nodes_y = cfg.get_int("diagnostics.box_nodes_y");
        const HarnackBoxReport rep = check_harnack_fks(hb);
        const double bound = cfg.get_double("diagnostics.harnack_bound");
        const double comp = cfg.get_double("diagnostics.harnack_comparability");
        const double ratio_of_scales = rep.max_ratio_outer / rep.max_ratio_inner;
        const bool pass = rep.max_ratio_outer <= bound && rep.max_ratio_inner <= bound &&
                          ratio_of_scales <= comp && ratio_of_scales >= 1.0 / comp;
        records.push_back(json{{"check", "harnack_box"},
                               {"parameters",
                                {{"gamma", hb.gamma},
                                 {"trials", hb.trials},
                                 {"scales", {hb.radius, 0.5 * hb.radius}}}},
                               {"lhs", rep.max_ratio_outer},
                               {"rhs", bound},
                               {"pass", pass}});
        HarnackBoxConfig corner = hb;
        corner.trials = 1;
        corner.vanishing_corner = true;
        const HarnackBoxReport crep = check_harnack_fks(corner);
        const bool cpass = std::isfinite(crep.max_ratio_outer) && crep.max_ratio_outer > 0.0;
        records.push_back(json{{"check", "harnack_box_vanishing_corner"},
                               {"parameters", {{"gamma", hb.gamma}}},
                               {"lhs", crep.max_ratio_outer},
                               {"rhs", bound},
                               {"pass", cpass}});
    }

    std::ofstream out(dir / "diagnostics.jsonl");
    bool all_pass = true;
    for (const auto& r : records) {
        out << r.dump() << '\n';
        all_pass = all_pass && r.at("pass").get<bool>();
    }
    return all_pass ? 0 : 1;
}

} // namespace

int run_command(const RunConfig& cfg) {
    const std::string& cmd = cfg.command();
    if (cmd == "flow-unrescaled") return cmd_flow_unrescaled(cfg);
    if (cmd == "flow-rescaled") return cmd_flow_rescaled(cfg);
    if (cmd == "ode") return cmd_ode(cfg);
    if (cmd == "resolvent") return cmd_resolvent(cfg);
    if (cmd == "extension-check") return cmd_extension_check(cfg);
    if (cmd == "diagnostics") return cmd_diagnostics(cfg);
    throw ConfigError("unknown command \"" + cmd + "\"");
}

} // namespace fyflow::cli
