#include <clocale>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "motionforge/bezier.hpp"
#include "motionforge/checks.hpp"
#include "motionforge/extmap.hpp"
#include "motionforge/motions.hpp"
#include "motionforge/posemodels.hpp"

using json = nlohmann::json;
using namespace motionforge;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json pose_to_json(const PoseMatrix& pose) {
    json j;
    j["matrix"] = {{pose.at(0, 0), pose.at(0, 1), pose.at(0, 2)},
                   {pose.at(1, 0), pose.at(1, 1), pose.at(1, 2)},
                   {pose.at(2, 0), pose.at(2, 1), pose.at(2, 2)}};
    j["t"] = {pose.translation[0], pose.translation[1], pose.translation[2]};
    return j;
}

json study_to_json(const DualQuaternion& h) {
    const auto c = h.coords();
    return json{{"study", std::vector<double>(c.begin(), c.end())}};
}

PoseMatrix pose_from_json(const json& j, double tol) {
    if (j.contains("study")) {
        const auto& s = j.at("study");
        if (!s.is_array() || s.size() != 8) throw InvalidInput("\"study\" must hold 8 numbers");
        std::array<double, 8> c{};
        for (int i = 0; i < 8; ++i) c[static_cast<std::size_t>(i)] = s.at(static_cast<std::size_t>(i)).get<double>();
        return dq_to_matrix(DualQuaternion::from_coords(c), tol);
    }
    if (!j.contains("matrix") || !j.contains("t")) {
        throw InvalidInput("pose JSON needs either \"study\" or \"matrix\" + \"t\"");
    }
    PoseMatrix pose;
    const auto& m = j.at("matrix");
    if (!m.is_array() || m.size() != 3) throw InvalidInput("\"matrix\" must be 3x3");
    for (int i = 0; i < 3; ++i) {
        const auto& row = m.at(static_cast<std::size_t>(i));
        if (!row.is_array() || row.size() != 3) throw InvalidInput("\"matrix\" must be 3x3");
        for (int k = 0; k < 3; ++k) pose.at(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    const auto& t = j.at("t");
    if (!t.is_array() || t.size() != 3) throw InvalidInput("\"t\" must hold 3 numbers");
    for (int i = 0; i < 3; ++i) pose.translation[static_cast<std::size_t>(i)] = t.at(static_cast<std::size_t>(i)).get<double>();
    const auto report = validate_pose(pose);
    if (!report.ok(std::max(tol, 1e-6))) {
        throw InvalidInput("pose matrix is not special orthogonal (orthogonality residual " +
                           std::to_string(report.max_orthogonality_residual) + ", det deviation " +
                           std::to_string(report.det_deviation) + ")");
    }
    return pose;
}

json load_json(const std::string& path_or_inline) {
    std::string text = path_or_inline;
    if (!text.empty() && text.front() != '{' && text.front() != '[') {
        std::ifstream in(path_or_inline);
        if (!in) throw InvalidInput("cannot open " + path_or_inline);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("JSON parse error: ") + e.what());
    }
}

void write_text(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path);
    out << content;
}

std::vector<double> parse_csv_numbers(const std::string& text, std::size_t expect, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw InvalidInput(std::string(what) + ": cannot parse number '" + item + "'");
        }
    }
    if (expect != 0 && out.size() != expect) {
        throw InvalidInput(std::string(what) + ": expected " + std::to_string(expect) + " numbers, got " +
                           std::to_string(out.size()));
    }
    return out;
}

struct MotionOptions {
    std::string method = "cubic";
    std::string pose_a, pose_b;
    std::string m_text = "1,0,0,0";
    std::string alpha_text = "0,0,0,0,0,0";
    std::string beta_text = "0,0,0,0,0,0";
    double fiber_a = 0, fiber_b = 0;
    int samples = 101;
};

void add_motion_flags(CLI::App* cmd, MotionOptions& opt, bool with_method = true) {
    if (with_method) {
        cmd->add_option("--method", opt.method, "darboux | cubic | helical")
            ->check(CLI::IsMember({"darboux", "cubic", "helical"}));
    }
    cmd->add_option("--pose-a", opt.pose_a, "start pose (JSON file or inline)")->required();
    cmd->add_option("--pose-b", opt.pose_b, "end pose (JSON file or inline)")->required();
    cmd->add_option("--m", opt.m_text, "map selector m0,m1,m2,m3 (default 1,0,0,0)");
    cmd->add_option("--alpha", opt.alpha_text, "fiber offsets of the start pose (six numbers, cubic)");
    cmd->add_option("--beta", opt.beta_text, "fiber offsets of the end pose (six numbers, cubic)");
    cmd->add_option("--fiber-a", opt.fiber_a, "scalar fiber offset of the start representative (darboux)");
    cmd->add_option("--fiber-b", opt.fiber_b, "scalar fiber offset of the end representative (darboux)");
    cmd->add_option("--samples", opt.samples, "number of output samples (>= 2)")->check(CLI::Range(2, 1000000));
}

MapSelector selector_from_text(const std::string& text) {
    const auto v = parse_csv_numbers(text, 4, "--m");
    return MapSelector::from({v[0], v[1], v[2], v[3]});
}

struct BuiltMotion {
    MotionCurve motion;
    CanonicalPair pair;
};

BuiltMotion build_motion(const MotionOptions& opt, double tol) {
    const PoseMatrix A = pose_from_json(load_json(opt.pose_a), tol);
    const PoseMatrix B = pose_from_json(load_json(opt.pose_b), tol);
    const CanonicalPair pair = canonicalize_pair(A, B, tol);
    if (opt.method == "darboux") {
        return {darboux_interpolant(matrix_to_dq(A, tol), matrix_to_dq(B, tol), opt.fiber_a, opt.fiber_b, tol),
                pair};
    }
    if (opt.method == "helical") {
        return {helical_interpolant(pair, tol).motion, pair};
    }
    const MapSelector m = selector_from_text(opt.m_text);
    const auto av = parse_csv_numbers(opt.alpha_text, 6, "--alpha");
    const auto bv = parse_csv_numbers(opt.beta_text, 6, "--beta");
    FiberOffsets alpha{}, beta{};
    std::copy(av.begin(), av.end(), alpha.begin());
    std::copy(bv.begin(), bv.end(), beta.begin());
    return {cubic_interpolant(pair, m, alpha, beta, tol), pair};
}

std::string pose_csv(const MotionCurve& motion, int samples) {
    std::string out = "t,r11,r12,r13,r21,r22,r23,r31,r32,r33,a1,a2,a3\n";
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(samples - 1);
        const PoseMatrix P = motion.pose_at(t);
        out += fmt17(t);
        for (int k = 0; k < 9; ++k) out += "," + fmt17(P.linear[static_cast<std::size_t>(k)]);
        for (int k = 0; k < 3; ++k) out += "," + fmt17(P.translation[static_cast<std::size_t>(k)]);
        out += "\n";
    }
    return out;
}

std::string study_csv(const MotionCurve& motion, int samples) {
    std::string out = "t,p0,p1,p2,p3,q0,q1,q2,q3\n";
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(samples - 1);
        const auto c = motion.at(t).coords();
        out += fmt17(t);
        for (double v : c) out += "," + fmt17(v);
        out += "\n";
    }
    return out;
}

int exit_code_for(const KinematicsError& e) {
    return (e.kind() == "InvalidInput" || e.kind() == "InvalidPose") ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"motionforge: dual quaternion pose models, extended kinematic maps, and rational "
                 "motion interpolants"};
    app.require_subcommand(1);

    double tolerance = kDefaultTolerance;
    if (const char* env = std::getenv("MOTIONFORGE_TOL")) {
        tolerance = std::atof(env);
    }
    app.add_option("--tolerance", tolerance, "absolute zero-test tolerance (default 1e-9, env MOTIONFORGE_TOL)");

    // ---------------------------------------------------------------- convert
    auto* convert = app.add_subcommand("convert", "convert pose JSON between matrix and Study forms");
    std::string convert_input, convert_output;
    convert->add_option("--input", convert_input, "pose JSON (file or inline)")->required();
    convert->add_option("--output", convert_output, "output path (default stdout)");

    // ---------------------------------------------------------------- fiber
    auto* fiber_cmd = app.add_subcommand("fiber", "nullspace basis and fiber samples for a pose");
    std::string fiber_input, fiber_output, fiber_m = "1,0,0,0";
    int fiber_samples = 5;
    unsigned long long fiber_seed = 42;
    fiber_cmd->add_option("--input", fiber_input, "pose JSON (file or inline)")->required();
    fiber_cmd->add_option("--m", fiber_m, "map selector m0,m1,m2,m3");
    fiber_cmd->add_option("--samples", fiber_samples, "number of random fiber samples")->check(CLI::Range(0, 100000));
    fiber_cmd->add_option("--seed", fiber_seed, "seed for the sample offsets");
    fiber_cmd->add_option("--output", fiber_output, "output path (default stdout)");

    // ---------------------------------------------------------------- interpolate
    auto* interp = app.add_subcommand("interpolate", "construct an interpolating motion and sample it");
    MotionOptions interp_opt;
    std::string interp_out_pose, interp_out_study;
    add_motion_flags(interp, interp_opt);
    interp->add_option("--out-pose", interp_out_pose, "pose CSV output path (default stdout)");
    interp->add_option("--out-study", interp_out_study, "Study CSV output path (optional)");

    // ---------------------------------------------------------------- transmission
    auto* trans = app.add_subcommand("transmission", "rotation angle / translation law of an interpolant");
    MotionOptions trans_opt;
    std::string trans_out, trans_report;
    add_motion_flags(trans, trans_opt);
    trans->add_option("--out", trans_out, "t,omega,z CSV output path (default stdout)");
    trans->add_option("--report", trans_report, "closed-form parameter JSON output path");

    // ---------------------------------------------------------------- trajectory
    auto* traj = app.add_subcommand("trajectory", "exact point trajectory of an interpolant");
    MotionOptions traj_opt;
    std::string traj_point = "1,0,0", traj_out, traj_report;
    add_motion_flags(traj, traj_opt);
    traj->add_option("--point", traj_point, "moving point x,y,z");
    traj->add_option("--out", traj_out, "t,x,y,z CSV output path (default stdout)");
    traj->add_option("--report", traj_report, "degree / circularity JSON output path");

    // ---------------------------------------------------------------- bezier
    auto* bez = app.add_subcommand("bezier", "motion of an ambient-space Bezier control polygon");
    std::string bez_control, bez_m = "1,0,0,0", bez_out_pose, bez_out_study;
    int bez_samples = 101;
    bez->add_option("--control", bez_control, "control polygon JSON (file or inline)")->required();
    bez->add_option("--m", bez_m, "map selector m0,m1,m2,m3");
    bez->add_option("--samples", bez_samples, "number of output samples (>= 2)")->check(CLI::Range(2, 1000000));
    bez->add_option("--out-pose", bez_out_pose, "pose CSV output path (default stdout)");
    bez->add_option("--out-study", bez_out_study, "Study CSV output path (optional)");

    // ---------------------------------------------------------------- check
    auto* check = app.add_subcommand("check", "run the full invariant suite (exit 1 on failure)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (tolerance <= 0) throw InvalidInput("tolerance must be positive");
        if (*convert) {
            const json j = load_json(convert_input);
            json out;
            if (j.contains("study")) {
                out = pose_to_json(pose_from_json(j, tolerance));
            } else {
                const auto conv = matrix_to_dq_detail(pose_from_json(j, tolerance), tolerance);
                out = study_to_json(conv.h);
                out["ratio_index"] = conv.ratio_index;
            }
            write_text(convert_output, out.dump(2) + "\n");
        } else if (*fiber_cmd) {
            const PoseMatrix pose = pose_from_json(load_json(fiber_input), tolerance);
            const MapSelector m = selector_from_text(fiber_m);
            const FiberGenerator gen = fiber(m, AmbientPose::embed(pose), tolerance);
            json out;
            out["selector"] = {{"m", std::vector<double>(m.m.begin(), m.m.end())},
                               {"n", std::vector<double>(m.n.begin(), m.n.end())}};
            json basis = json::array();
            for (const auto& f : gen.basis().effective) basis.push_back(std::vector<double>(f.begin(), f.end()));
            out["basis"] = {{"formula_rank", gen.basis().formula_rank},
                            {"used_fallback", gen.basis().used_fallback},
                            {"vectors", basis}};
            std::mt19937_64 rng(fiber_seed);
            std::uniform_real_distribution<double> dist(-0.5, 0.5);
            json samples = json::array();
            for (int i = 0; i < fiber_samples; ++i) {
                FiberOffsets alpha{};
                for (auto& v : alpha) v = dist(rng);
                const AmbientPose y = gen.at(alpha);
                json s;
                s["alpha"] = std::vector<double>(alpha.begin(), alpha.end());
                s["ambient"] = std::vector<double>(y.c.begin(), y.c.end());
                const auto img = mu(m, y, tolerance).coords();
                s["study_image"] = std::vector<double>(img.begin(), img.end());
                samples.push_back(s);
            }
            out["samples"] = samples;
            write_text(fiber_output, out.dump(2) + "\n");
        } else if (*interp) {
            const BuiltMotion built = build_motion(interp_opt, tolerance);
            write_text(interp_out_pose, pose_csv(built.motion, interp_opt.samples));
            if (!interp_out_study.empty()) {
                write_text(interp_out_study, study_csv(built.motion, interp_opt.samples));
            }
        } else if (*trans) {
            const BuiltMotion built = build_motion(trans_opt, tolerance);
            const TransmissionCurve tc =
                transmission_curve(built.motion, built.pair, trans_opt.samples, tolerance);
            std::string csv = "t,omega,z\n";
            for (const auto& s : tc.samples) {
                csv += fmt17(s[0]) + "," + fmt17(s[1]) + "," + fmt17(s[2]) + "\n";
            }
            write_text(trans_out, csv);
            if (!trans_report.empty()) {
                json rep;
                rep["law"] = tc.law == TransmissionCurve::Law::tangent ? "tangent" : "sine";
                if (tc.law == TransmissionCurve::Law::tangent) {
                    rep["p"] = tc.p;
                    rep["q"] = tc.q;
                    rep["r"] = tc.r;
                    rep["s"] = tc.s;
                } else {
                    rep["lambda"] = tc.lambda;
                    rep["kappa"] = tc.kappa;
                }
                rep["fit_residual"] = tc.fit_residual;
                rep["degenerate_translation"] = tc.degenerate_translation;
                write_text(trans_report, rep.dump(2) + "\n");
            }
        } else if (*traj) {
            const BuiltMotion built = build_motion(traj_opt, tolerance);
            const auto pv = parse_csv_numbers(traj_point, 3, "--point");
            const RationalCurve curve = trajectory_exact(built.motion, {pv[0], pv[1], pv[2]}, tolerance);
            std::string csv = "t,x,y,z\n";
            for (int i = 0; i < traj_opt.samples; ++i) {
                const double t = static_cast<double>(i) / static_cast<double>(traj_opt.samples - 1);
                const Vec3 p = curve.eval(t);
                csv += fmt17(t) + "," + fmt17(p[0]) + "," + fmt17(p[1]) + "," + fmt17(p[2]) + "\n";
            }
            write_text(traj_out, csv);
            if (!traj_report.empty()) {
                const auto diag = trajectory_diagnostics(curve, built.pair.axis_direction());
                json rep;
                rep["degree"] = diag.degree;
                rep["points_at_infinity"] = diag.points_at_infinity;
                rep["circle_residual"] = diag.circle_residual;
                rep["circle_radius"] = diag.circle_radius;
                rep["conic_residual"] = diag.conic_residual;
                rep["planarity_residual"] = diag.planarity_residual;
                rep["classification"] = diag.classification;
                write_text(traj_report, rep.dump(2) + "\n");
            }
        } else if (*bez) {
            const json control = load_json(bez_control);
            if (!control.is_array()) throw InvalidInput("--control must be a JSON array of control poses");
            const MapSelector m = selector_from_text(bez_m);
            ControlPolygon cp;
            for (const auto& entry : control) {
                const PoseMatrix pose = pose_from_json(entry, tolerance);
                AmbientPose point = AmbientPose::embed(pose);
                if (entry.contains("offsets")) {
                    const auto& off = entry.at("offsets");
                    if (!off.is_array() || off.size() != 6) throw InvalidInput("\"offsets\" must hold 6 numbers");
                    FiberOffsets alpha{};
                    for (int i = 0; i < 6; ++i) alpha[static_cast<std::size_t>(i)] = off.at(static_cast<std::size_t>(i)).get<double>();
                    point = fiber(m, point, tolerance).at(alpha);
                }
                cp.points.push_back(point);
            }
            const MotionCurve motion = bezier_motion(cp, m, tolerance);
            write_text(bez_out_pose, pose_csv(motion, bez_samples));
            if (!bez_out_study.empty()) write_text(bez_out_study, study_csv(motion, bez_samples));
        } else if (*check) {
            const auto results = checks::run_all(tolerance);
            bool all_ok = true;
            for (const auto& r : results) {
                std::printf("[%s] %2d %-36s %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                            r.detail.c_str());
                all_ok = all_ok && r.passed;
            }
            return all_ok ? 0 : 1;
        }
    } catch (const KinematicsError& e) {
        const json err = {{"error", {{"type", e.kind()}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        const json err = {{"error", {{"type", "Internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 3;
    }
    return 0;
}
