// mcfobs: batch driver for the obstacle mean curvature flow scheme.
//
//   mcfobs run <config.json> [--out DIR]
//   mcfobs verify <suite> [--quick]
//   mcfobs compare <manifest_a> <manifest_b> [--assert-inclusion a-in-b]
//
// Exit codes: 0 ok, 1 failed check or assertion, 2 solver non-convergence,
// 3 invalid input.

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "mcfobs/analysis.hpp"
#include "mcfobs/geometry.hpp"
#include "mcfobs/io.hpp"
#include "mcfobs/scenario.hpp"
#include "mcfobs/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mcfobs;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kNonConvergence = 2;
constexpr int kInvalid = 3;

std::string step_stem(int n, double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "step_%d_t_%.6f", n, t);
    return buf;
}

json diag_json(const FlowState& s) {
    const StepDiagnostics& d = s.diag;
    return {{"step", s.step},
            {"time", s.time},
            {"cells", s.mask.count()},
            {"area", d.area},
            {"perimeter", d.perimeter},
            {"tv_perimeter", d.tv_perimeter},
            {"hausdorff_motion", d.hausdorff_motion},
            {"curvature_residual_median", d.curvature_residual_median},
            {"curvature_residual_p95", d.curvature_residual_p95},
            {"curvature_samples", d.curvature_samples},
            {"delta_ball", d.delta_ball},
            {"prox_gap", d.prox_gap},
            {"prox_iterations", d.prox_iterations},
            {"converged", d.converged},
            {"ambiguous_cells", d.ambiguous_cells}};
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw Error("cannot open " + p.string() + " for writing");
    out << text;
}

void write_diagnostics_csv(const fs::path& p, const FlowTrajectory& traj) {
    std::ofstream out(p);
    if (!out) throw Error("cannot open " + p.string() + " for writing");
    out << "step,time,cells,area,perimeter,tv_perimeter,hausdorff_motion,curvature_residual_median,"
           "curvature_residual_p95,delta_ball,prox_gap,prox_iterations,converged,ambiguous_cells\n";
    out.precision(17);
    for (const auto& s : traj.states) {
        const auto& d = s.diag;
        out << s.step << ',' << s.time << ',' << s.mask.count() << ',' << d.area << ',' << d.perimeter << ','
            << d.tv_perimeter << ',' << d.hausdorff_motion << ',' << d.curvature_residual_median << ','
            << d.curvature_residual_p95 << ',' << d.delta_ball << ',' << d.prox_gap << ',' << d.prox_iterations << ','
            << d.converged << ',' << d.ambiguous_cells << '\n';
    }
}

json residual_analysis(const FlowTrajectory& traj, const fs::path& csv) {
    json summary;
    summary["holder_quotient"] = holder_quotient(traj);
    if (traj.states.size() < 3) {
        summary["pde_residual"] = "skipped: fewer than 3 states";
        return summary;
    }
    ResidualReport rep;
    try {
        rep = pde_residual(traj);
    } catch (const Error& e) {
        summary["pde_residual"] = std::string("skipped: ") + e.what();
        return summary;
    }
    std::ofstream out(csv);
    if (!out) throw Error("cannot open " + csv.string() + " for writing");
    out << "step,time,off_contact_samples,off_contact_median_abs,off_contact_max_abs,contact_samples,"
           "contact_min_residual,contact_max_laplacian,contact_median_abs_dt,tolerance\n";
    out.precision(17);
    double worst_median = 0.0;
    double worst_contact = 0.0;
    std::size_t contact = 0;
    for (const auto& r : rep.rows) {
        out << r.step << ',' << r.time << ',' << r.off_contact_samples << ',' << r.off_contact_median_abs << ','
            << r.off_contact_max_abs << ',' << r.contact_samples << ',' << r.contact_min_residual << ','
            << r.contact_max_laplacian << ',' << r.contact_median_abs_dt << ',' << r.tolerance << '\n';
        worst_median = std::max(worst_median, r.off_contact_median_abs);
        worst_contact = std::min(worst_contact, r.contact_min_residual + r.tolerance);
        contact += r.contact_samples;
    }
    summary["pde_residual"] = {{"rows", rep.rows.size()},
                               {"max_off_contact_median_abs", worst_median},
                               {"contact_samples", contact},
                               {"contact_supersolution_ok", worst_contact >= 0.0}};
    return summary;
}

int cmd_run(const std::string& config_path, const std::string& out_opt) {
    Scenario sc;
    json config;
    try {
        std::ifstream in(config_path);
        if (!in) throw InvalidArgument("cannot open config " + config_path);
        config = json::parse(in);
        sc = scenario_from_json(config, fs::path(config_path).parent_path());
    } catch (const json::exception& e) {
        std::cerr << "error: config " << config_path << ": " << e.what() << '\n';
        return kInvalid;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    const fs::path out_dir = out_opt.empty() ? fs::path("runs") / sc.name : fs::path(out_opt);

    FlowTrajectory traj{sc.grid.make(), sc.flow.h, sc.flow.variant, {}, std::nullopt, {}, std::nullopt, std::nullopt, 0.0};
    try {
        traj = run_scenario(sc);
    } catch (const NonConvergence& e) {
        std::cerr << "error: " << e.what() << " (gap " << e.partial().prox.gap << " after "
                  << e.partial().prox.iterations << " iterations)\n";
        return kNonConvergence;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    for (const auto& w : traj.warnings) std::cerr << "warning: " << w << '\n';

    fs::create_directories(out_dir);
    json files = json::array();
    auto record = [&](const fs::path& p) {
        files.push_back({{"path", fs::relative(p, out_dir).generic_string()}, {"fnv1a64", file_hash(p)}});
    };
    json steps = json::array();
    for (const auto& s : traj.states) {
        const std::string stem = step_stem(s.step, s.time);
        const Contour front = s.field && !s.mask.empty() ? extract_contour(*s.field) : Contour{};
        write_contour_csv(out_dir / (stem + ".csv"), front);
        write_mask_pgm(out_dir / (stem + ".pgm"), s.mask);
        json row = diag_json(s);
        row["contour"] = stem + ".csv";
        row["mask"] = stem + ".pgm";
        record(out_dir / (stem + ".csv"));
        record(out_dir / (stem + ".pgm"));
        if (sc.write_fields && s.field) {
            write_field_raw(out_dir / (stem + ".raw"), *s.field);
            record(out_dir / (stem + ".raw"));
            row["field"] = stem + ".raw";
        }
        steps.push_back(row);
    }
    if (sc.write_trace) {
        // The trace of the first step's solve, re-run with recording on.
        ProxParams p = sc.flow.prox;
        p.h = sc.flow.h;
        p.record_trace = true;
        const ScalarField d0 = *traj.states.front().field;
        const ObstacleSpec ob = traj.omega_field && sc.flow.variant != Variant::Forcing
                                    ? ObstacleSpec::constrained(*traj.omega_field)
                                    : ObstacleSpec::unconstrained();
        write_trace_csv(out_dir / "trace_step_1.csv", tv_prox(d0, ob, p).trace);
        record(out_dir / "trace_step_1.csv");
    }
    write_diagnostics_csv(out_dir / "diagnostics.csv", traj);
    record(out_dir / "diagnostics.csv");
    const json analysis = residual_analysis(traj, out_dir / "residual.csv");
    if (fs::exists(out_dir / "residual.csv") && analysis["pde_residual"].is_object()) record(out_dir / "residual.csv");

    const Grid2& g = traj.grid;
    json manifest{{"name", sc.name},
                  {"config", to_json(sc)},
                  {"grid",
                   {{"nx", g.nx()},
                    {"ny", g.ny()},
                    {"spacing", g.spacing()},
                    {"origin", {g.origin().x, g.origin().y}}}},
                  {"variant", to_string(traj.variant)},
                  {"h", traj.h},
                  {"forcing_C", traj.forcing_C},
                  {"warnings", traj.warnings},
                  {"extinction_step", traj.extinction_step ? json(*traj.extinction_step) : json(nullptr)},
                  {"steps", steps},
                  {"analysis", analysis},
                  {"files", files}};
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << traj.states.size() << " states to " << out_dir.string() << '\n';
    if (traj.extinction_step) std::cout << "extinct at step " << *traj.extinction_step << '\n';
    return kOk;
}

int cmd_verify(const std::string& suite, bool quick) {
    const auto& names = verify::suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::cerr << "error: unknown suite '" << suite << "'; known:";
        for (const auto& n : names) std::cerr << ' ' << n;
        std::cerr << '\n';
        return kInvalid;
    }
    verify::Options o;
    o.quick = quick;
    bool all = true;
    for (const auto& r : verify::run_suite(suite, o)) {
        std::printf("%s  %s: %s (%.1f s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
        all = all && r.passed;
    }
    return all ? kOk : kFailed;
}

struct LoadedRun {
    fs::path dir;
    json manifest;
    Grid2 grid;
};

LoadedRun load_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open manifest " + path);
    json m = json::parse(in);
    const json& g = m.at("grid");
    const Grid2 grid(g.at("nx").get<int>(), g.at("ny").get<int>(), g.at("spacing").get<double>(),
                     {g.at("origin")[0].get<double>(), g.at("origin")[1].get<double>()});
    return {fs::path(path).parent_path(), std::move(m), grid};
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& inclusion) {
    if (!inclusion.empty() && inclusion != "a-in-b" && inclusion != "b-in-a") {
        std::cerr << "error: --assert-inclusion must be a-in-b or b-in-a\n";
        return kInvalid;
    }
    LoadedRun a{{}, {}, Grid2::unit_square(4)};
    LoadedRun b{{}, {}, Grid2::unit_square(4)};
    try {
        a = load_run(a_path);
        b = load_run(b_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    if (a.grid != b.grid) {
        std::cerr << "error: manifests are on different grids\n";
        return kInvalid;
    }
    const json& sa = a.manifest.at("steps");
    const json& sb = b.manifest.at("steps");
    const std::size_t n = std::min(sa.size(), sb.size());
    for (std::size_t k = 0; k < n; ++k) {
        const double ta = sa[k].at("time").get<double>();
        const double tb = sb[k].at("time").get<double>();
        if (std::abs(ta - tb) > 1e-9 * std::max(1.0, std::abs(ta))) {
            std::cerr << "error: time grids differ at step " << k << " (" << ta << " vs " << tb << ")\n";
            return kInvalid;
        }
    }
    if (sa.size() != sb.size()) {
        std::cerr << "note: runs have " << sa.size() << " and " << sb.size() << " states; comparing the first " << n
                  << '\n';
    }

    std::printf("step,time,symmetric_difference_area,hausdorff%s\n", inclusion.empty() ? "" : ",inclusion_violations");
    double worst_sd = 0.0;
    double worst_h = 0.0;
    std::size_t violations = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const RegionMask ma = read_mask_pgm(a.dir / sa[k].at("mask").get<std::string>(), a.grid);
        const RegionMask mb = read_mask_pgm(b.dir / sb[k].at("mask").get<std::string>(), b.grid);
        const Contour ca = read_contour_csv(a.dir / sa[k].at("contour").get<std::string>());
        const Contour cb = read_contour_csv(b.dir / sb[k].at("contour").get<std::string>());
        const double sd = symmetric_difference_area(ma, mb);
        double hd = 0.0;
        if (ca.empty() != cb.empty()) hd = std::numeric_limits<double>::infinity();
        else if (!ca.empty()) hd = hausdorff(ca, cb);
        worst_sd = std::max(worst_sd, sd);
        worst_h = std::max(worst_h, hd);
        std::printf("%d,%.6f,%.10g,%.10g", sa[k].at("step").get<int>(), sa[k].at("time").get<double>(), sd, hd);
        if (!inclusion.empty()) {
            const RegionMask& inner = inclusion == "a-in-b" ? ma : mb;
            const RegionMask& outer = inclusion == "a-in-b" ? mb : ma;
            std::size_t v = 0;
            for (std::size_t c = 0; c < inner.size(); ++c) v += inner[c] && !outer[c];
            violations += v;
            std::printf(",%zu", v);
        }
        std::printf("\n");
    }
    std::printf("# max symmetric difference %.10g, max hausdorff %.10g (%.3f cells)\n", worst_sd, worst_h,
                worst_h / a.grid.spacing());
    if (!inclusion.empty()) {
        std::printf("# inclusion %s: %s (%zu cells)\n", inclusion.c_str(), violations ? "violated" : "holds",
                    violations);
        if (violations) return kFailed;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* t = std::getenv("MCFOBS_THREADS")) {
        const int n = std::atoi(t);
        if (n > 0) omp_set_num_threads(n);
    }

    CLI::App app{"Obstacle mean curvature flow by minimizing movements"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
    run->add_option("config", config, "scenario JSON")->required();
    run->add_option("--out", out_dir, "output directory (default runs/<name>)");

    std::string suite;
    bool quick = false;
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("suite", suite, "prox_properties | scheme_properties | disk_law | pcf_equality | "
                                    "forcing_equivalence | convergence")
        ->required();
    ver->add_flag("--quick", quick, "reduced sizes for a fast smoke run");

    std::string ma;
    std::string mb;
    std::string inclusion;
    auto* cmp = app.add_subcommand("compare", "compare two runs step by step");
    cmp->add_option("manifest_a", ma)->required();
    cmp->add_option("manifest_b", mb)->required();
    cmp->add_option("--assert-inclusion", inclusion, "a-in-b or b-in-a");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*run) return cmd_run(config, out_dir);
        if (*ver) return cmd_verify(suite, quick);
        if (*cmp) return cmd_compare(ma, mb, inclusion);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kInvalid;
}
