/*
 * supr - a sparse, separable statistical body model library
 *
 * File: tools/supr_cli.cpp
 *
 * Copyright 2026 The supr authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * Command-line driver. Every subcommand is a thin wrapper over one library
 * call: requested data goes to standard output, progress notes to standard
 * error. Library failures exit 1 with a machine-parsable category line;
 * usage mistakes exit 2 with the usage text.
 */

#include "supr/supr.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

json load_json(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
    {
        throw supr::InvalidArgumentError("cannot open parameter file '" + path + "'");
    }
    try
    {
        return json::parse(f);
    } catch (const json::exception& e)
    {
        throw supr::InvalidArgumentError("parameter file '" + path +
                                         "' is not valid JSON: " + e.what());
    }
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& path)
{
    if (!j.is_object())
    {
        throw supr::InvalidArgumentError("parameter file '" + path +
                                         "' must hold a JSON object");
    }
    for (const auto& item : j.items())
    {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        if (!known)
        {
            throw supr::InvalidArgumentError("parameter file '" + path +
                                             "' has unknown key '" + item.key() + "'");
        }
    }
}

supr::Vec3d parse_vec3(const json& j, const std::string& what, const std::string& path)
{
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
    {
        throw supr::InvalidArgumentError(what + " in '" + path +
                                         "' must be an array of 3 numbers");
    }
    return supr::Vec3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

/// Pose file: {"joint_rotations": [[x,y,z] per joint], "global_translation": [x,y,z]},
/// both keys optional; omitted parts stay at rest.
supr::PoseState parse_pose_file(const std::string& path, int joint_count)
{
    const json j = load_json(path);
    reject_unknown_keys(j, {"joint_rotations", "global_translation"}, path);
    supr::PoseState pose = supr::PoseState::rest(joint_count);
    if (j.contains("joint_rotations"))
    {
        const json& rows = j["joint_rotations"];
        if (!rows.is_array() || static_cast<int>(rows.size()) != joint_count)
        {
            throw supr::InvalidArgumentError(
                "joint_rotations in '" + path + "' must list exactly " +
                std::to_string(joint_count) + " rows of 3 numbers");
        }
        for (int r = 0; r < joint_count; ++r)
        {
            pose.joint_rotations.row(r) =
                parse_vec3(rows[r], "joint_rotations row " + std::to_string(r), path)
                    .transpose();
        }
    }
    if (j.contains("global_translation"))
    {
        pose.global_translation = parse_vec3(j["global_translation"], "global_translation", path);
    }
    return pose;
}

/// Coefficient file: a bare JSON array of numbers; shorter vectors than the
/// model's space are zero-padded by the library.
supr::VecXd parse_coeff_file(const std::string& path)
{
    const json j = load_json(path);
    if (!j.is_array())
    {
        throw supr::InvalidArgumentError("coefficient file '" + path +
                                         "' must hold a JSON array of numbers");
    }
    supr::VecXd coeffs(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        if (!j[i].is_number())
        {
            throw supr::InvalidArgumentError("coefficient file '" + path +
                                             "' must hold a JSON array of numbers");
        }
        coeffs[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return coeffs;
}

/// Contact file: {"left": flags, "right": flags}, each side optional. Flags
/// are either a single 0/1 (uniform over the side's foot vertices) or an
/// array of 0/1 with one entry per foot vertex.
supr::ContactState parse_contact_file(const std::string& path, const supr::ModelContainer& m)
{
    const json j = load_json(path);
    reject_unknown_keys(j, {"left", "right"}, path);
    supr::ContactState contacts;
    auto parse_side = [&](const char* side, std::optional<supr::ContactFlags>& out) {
        if (!j.contains(side)) return;
        const supr::FootDeformNet* net = m.foot_net(side);
        if (net == nullptr)
        {
            throw supr::UnsupportedError(std::string("contact flags given for the ") + side +
                                         " foot, but the model has no such network");
        }
        const json& flags = j[side];
        supr::ContactFlags c;
        auto flag_value = [&](const json& v) -> std::uint8_t {
            if (v.is_number_integer())
            {
                const auto n = v.get<std::int64_t>();
                if (n == 0 || n == 1) return static_cast<std::uint8_t>(n);
            }
            throw supr::InvalidArgumentError(std::string("contact flags for the ") + side +
                                             " foot in '" + path + "' must be 0 or 1");
        };
        if (flags.is_array())
        {
            for (const auto& v : flags) c.push_back(flag_value(v));
        }
        else
        {
            c.assign(static_cast<std::size_t>(net->foot_vertex_count()), flag_value(flags));
        }
        out = std::move(c);
    };
    parse_side("left", contacts.left);
    parse_side("right", contacts.right);
    return contacts;
}

/// Mask file: {"weights": [...], "exclude_vertices": [...], "exclude_parts": [...]},
/// all keys optional. Weights default to uniform ones; exclusions zero entries.
supr::VecXd parse_mask_file(const std::string& path, const supr::ModelContainer& m)
{
    const json j = load_json(path);
    reject_unknown_keys(j, {"weights", "exclude_vertices", "exclude_parts"}, path);
    supr::VecXd w = supr::VecXd::Ones(m.vertex_count());
    if (j.contains("weights"))
    {
        const json& vals = j["weights"];
        if (!vals.is_array() || static_cast<int>(vals.size()) != m.vertex_count())
        {
            throw supr::InvalidArgumentError("weights in '" + path + "' must list exactly " +
                                             std::to_string(m.vertex_count()) + " numbers");
        }
        for (int v = 0; v < m.vertex_count(); ++v)
        {
            if (!vals[static_cast<std::size_t>(v)].is_number())
            {
                throw supr::InvalidArgumentError("weights in '" + path + "' must be numbers");
            }
            w[v] = vals[static_cast<std::size_t>(v)].get<double>();
        }
    }
    if (j.contains("exclude_vertices"))
    {
        for (const auto& v : j["exclude_vertices"])
        {
            if (!v.is_number_integer())
            {
                throw supr::InvalidArgumentError("exclude_vertices in '" + path +
                                                 "' must be vertex indices");
            }
            const auto idx = v.get<std::int64_t>();
            if (idx < 0 || idx >= m.vertex_count())
            {
                throw supr::InvalidArgumentError("exclude_vertices in '" + path +
                                                 "' has out-of-range index " +
                                                 std::to_string(idx));
            }
            w[static_cast<Eigen::Index>(idx)] = 0.0;
        }
    }
    if (j.contains("exclude_parts"))
    {
        for (const auto& name : j["exclude_parts"])
        {
            if (!name.is_string())
            {
                throw supr::InvalidArgumentError("exclude_parts in '" + path +
                                                 "' must be label names");
            }
            const int label = m.part_label_index(name.get<std::string>());
            for (int v = 0; v < m.vertex_count(); ++v)
            {
                if (m.part_labels[static_cast<std::size_t>(v)] == label) w[v] = 0.0;
            }
        }
    }
    return w;
}

supr::ModelParams params_from_files(const supr::ModelContainer& m, const std::string& pose_path,
                                    const std::string& shape_path, const std::string& expr_path)
{
    supr::ModelParams p;
    p.pose = pose_path.empty() ? supr::PoseState::rest(m.joint_count())
                               : parse_pose_file(pose_path, m.joint_count());
    if (!shape_path.empty()) p.shape = parse_coeff_file(shape_path);
    if (!expr_path.empty()) p.expression = parse_coeff_file(expr_path);
    return p;
}

json params_to_json(const supr::ModelParams& p)
{
    json rot = json::array();
    for (Eigen::Index r = 0; r < p.pose.joint_rotations.rows(); ++r)
    {
        rot.push_back({p.pose.joint_rotations(r, 0), p.pose.joint_rotations(r, 1),
                       p.pose.joint_rotations(r, 2)});
    }
    json out;
    out["pose"] = {{"joint_rotations", std::move(rot)},
                   {"global_translation",
                    {p.pose.global_translation[0], p.pose.global_translation[1],
                     p.pose.global_translation[2]}}};
    out["shape"] = std::vector<double>(p.shape.data(), p.shape.data() + p.shape.size());
    out["expression"] =
        std::vector<double>(p.expression.data(), p.expression.data() + p.expression.size());
    return out;
}

supr::TriangleMesh to_mesh(const supr::PosedMesh& p)
{
    supr::TriangleMesh mesh;
    mesh.vertices = p.vertices;
    mesh.faces = p.faces;
    return mesh;
}

/// --format overrides the extension-based dispatch; ply output uses the
/// binary encoding.
void write_mesh_as(const std::string& path, const supr::TriangleMesh& mesh,
                   const std::string& format)
{
    if (format == "obj")
    {
        supr::write_obj(path, mesh);
    }
    else if (format == "ply")
    {
        supr::write_ply(path, mesh);
    }
    else
    {
        supr::write_mesh(path, mesh);
    }
}

struct CommandConfig
{
    std::string model_path;
    std::string out_path;
    std::string pose_path;
    std::string shape_path;
    std::string expr_path;
    std::string contact_path;
    std::string mask_path;
    std::string part;
    std::string format;
    std::string target_path;
    std::vector<std::string> target_paths;
    std::vector<int> components;
    int shape_components = -1;
    int max_iters = 60;
    double tol = 1e-10;
    std::uint64_t seed = 1;
    int jobs = 1;
    supr::SynthOptions synth;
};

int run_synth(const CommandConfig& cfg)
{
    const auto m = supr::synth_model(cfg.seed, cfg.synth);
    supr::save_model(m, cfg.out_path);
    std::cerr << "wrote synthetic model: " << m.vertex_count() << " vertices, "
              << m.joint_count() << " joints -> " << cfg.out_path << "\n";
    return 0;
}

int run_validate(const CommandConfig& cfg)
{
    const auto m = supr::load_model(cfg.model_path); // validates on load
    json sides = json::array();
    for (const auto& net : m.foot_nets) sides.push_back(net.side);
    json out;
    out["vertices"] = m.vertex_count();
    out["joints"] = m.joint_count();
    out["shape_components"] = m.shape_count();
    out["expression_components"] = m.expression_count();
    out["foot_nets"] = std::move(sides);
    out["part_labels"] = m.part_label_names;
    out["full_size"] = m.is_full_size();
    out["valid"] = true;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_pose(const CommandConfig& cfg, bool with_contacts)
{
    const auto m = supr::load_model(cfg.model_path);
    const auto params = params_from_files(m, cfg.pose_path, cfg.shape_path, cfg.expr_path);
    supr::ContactState contacts;
    if (with_contacts) contacts = parse_contact_file(cfg.contact_path, m);
    const auto posed = m.posed_mesh(params, contacts);
    write_mesh_as(cfg.out_path, to_mesh(posed), cfg.format);
    std::cerr << "wrote posed mesh: " << posed.vertices.rows() << " vertices -> "
              << cfg.out_path << "\n";
    return 0;
}

int run_fit(const CommandConfig& cfg)
{
    const auto m = supr::load_model(cfg.model_path);
    const auto target = supr::read_mesh(cfg.target_path);

    supr::FitOptions opt;
    opt.max_iterations = cfg.max_iters;
    opt.tolerance = cfg.tol;
    opt.shape_components = cfg.shape_components;
    if (!cfg.mask_path.empty()) opt.vertex_weights = parse_mask_file(cfg.mask_path, m);

    auto params = params_from_files(m, cfg.pose_path, cfg.shape_path, cfg.expr_path);
    const auto report = supr::fit_model(m, target.vertices, params, opt);

    json out;
    out["report"] = {{"v2v_error", report.v2v_error},
                     {"mabs_error", report.mabs_error},
                     {"iterations", report.iterations},
                     {"converged", report.converged},
                     {"objective_initial", report.objective_trace.front()},
                     {"objective_final", report.objective_trace.back()}};
    out["parameters"] = params_to_json(params);
    std::cout << out.dump(2) << "\n";

    if (!cfg.out_path.empty())
    {
        write_mesh_as(cfg.out_path, to_mesh(m.posed_mesh(params)), cfg.format);
        std::cerr << "wrote fitted mesh -> " << cfg.out_path << "\n";
    }
    return 0;
}

int run_separate(const CommandConfig& cfg)
{
    const auto m = supr::load_model(cfg.model_path);

    // --part names a label, or a JSON file {"name": ..., "vertices": [...]}
    supr::PartSpec spec;
    if (std::filesystem::exists(cfg.part))
    {
        const json j = load_json(cfg.part);
        reject_unknown_keys(j, {"name", "vertices"}, cfg.part);
        if (!j.contains("name") || !j["name"].is_string() || !j.contains("vertices") ||
            !j["vertices"].is_array())
        {
            throw supr::InvalidArgumentError("part spec '" + cfg.part +
                                             "' needs a name and a vertex array");
        }
        spec.name = j["name"].get<std::string>();
        for (const auto& v : j["vertices"])
        {
            if (!v.is_number_integer())
            {
                throw supr::InvalidArgumentError("part spec '" + cfg.part +
                                                 "' vertices must be integers");
            }
            spec.vertices.push_back(v.get<std::int32_t>());
        }
    }
    else
    {
        spec = supr::part_spec_from_labels(m, {cfg.part});
    }

    const auto part = supr::separate(m, spec.vertices);
    supr::save_model(part.model, cfg.out_path);

    json out;
    out["name"] = spec.name;
    out["vertex_map"] = part.vertex_map;
    out["joint_map"] = part.joint_map;
    out["regressor_renormalized"] = part.regressor_renormalized;
    std::cout << out.dump(2) << "\n";
    std::cerr << "wrote part model: " << part.model.vertex_count() << " vertices, "
              << part.model.joint_count() << " joints -> " << cfg.out_path << "\n";
    return 0;
}

int run_eval(const CommandConfig& cfg)
{
    const auto m = supr::load_model(cfg.model_path);
    std::vector<supr::MatX3d> targets;
    for (const auto& path : cfg.target_paths)
    {
        targets.push_back(supr::read_mesh(path).vertices);
    }

    supr::FitOptions opt;
    opt.max_iterations = cfg.max_iters;
    opt.tolerance = cfg.tol;

    const auto rows = supr::shape_sweep(m, targets, cfg.components, opt, cfg.jobs);
    const std::string csv = supr::sweep_to_csv(rows);
    std::cout << csv;
    if (!cfg.out_path.empty())
    {
        std::ofstream f(cfg.out_path, std::ios::binary);
        if (!f)
        {
            throw supr::Error(supr::ErrorCategory::io,
                              "cannot open '" + cfg.out_path + "' for writing");
        }
        f << csv;
        std::cerr << "wrote sweep table -> " << cfg.out_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"sparse, separable statistical body model tool"};
    app.require_subcommand(1);
    CommandConfig cfg;

    auto* synth = app.add_subcommand("synth", "generate a synthetic model container");
    synth->add_option("--out", cfg.out_path, "output container path")->required();
    synth->add_option("--seed", cfg.seed, "generator seed (default 1)");
    synth->add_option("--vertices", cfg.synth.vertex_count, "minimum vertex count");
    synth->add_option("--joints", cfg.synth.joint_count, "joint count");
    synth->add_option("--shape-components", cfg.synth.shape_components, "shape space size");
    synth->add_option("--expr-components", cfg.synth.expression_components,
                      "expression space size");
    synth->add_flag("--foot-nets", cfg.synth.with_foot_nets, "attach foot networks");
    synth->add_flag("--full-size", cfg.synth.full_size, "fixed full-size layout");

    auto* validate = app.add_subcommand("validate", "audit a container's invariants");
    validate->add_option("--model", cfg.model_path, "model container")
        ->required()
        ->check(CLI::ExistingFile);

    auto* pose = app.add_subcommand("pose", "pose a model and write the mesh");
    pose->add_option("--model", cfg.model_path, "model container")
        ->required()
        ->check(CLI::ExistingFile);
    pose->add_option("--out", cfg.out_path, "output mesh path")->required();
    pose->add_option("--pose", cfg.pose_path, "pose parameter file")->check(CLI::ExistingFile);
    pose->add_option("--shape", cfg.shape_path, "shape coefficient file")
        ->check(CLI::ExistingFile);
    pose->add_option("--expr", cfg.expr_path, "expression coefficient file")
        ->check(CLI::ExistingFile);
    pose->add_option("--format", cfg.format, "mesh format override")
        ->check(CLI::IsMember({"obj", "ply"}));

    auto* foot = app.add_subcommand("foot-deform",
                                    "pose a model with contact-conditioned foot deformation");
    foot->add_option("--model", cfg.model_path, "model container")
        ->required()
        ->check(CLI::ExistingFile);
    foot->add_option("--out", cfg.out_path, "output mesh path")->required();
    foot->add_option("--contact", cfg.contact_path, "contact flag file")
        ->required()
        ->check(CLI::ExistingFile);
    foot->add_option("--pose", cfg.pose_path, "pose parameter file")->check(CLI::ExistingFile);
    foot->add_option("--shape", cfg.shape_path, "shape coefficient file")
        ->check(CLI::ExistingFile);
    foot->add_option("--expr", cfg.expr_path, "expression coefficient file")
        ->check(CLI::ExistingFile);
    foot->add_option("--format", cfg.format, "mesh format override")
        ->check(CLI::IsMember({"obj", "ply"}));

    auto* fit = app.add_subcommand("fit", "fit model parameters to a target mesh");
    fit->add_option("target", cfg.target_path, "target mesh (same vertex order as the model)")
        ->required()
        ->check(CLI::ExistingFile);
    fit->add_option("--model", cfg.model_path, "model container")
        ->required()
        ->check(CLI::ExistingFile);
    fit->add_option("--out", cfg.out_path, "optional fitted mesh path");
    fit->add_option("--mask", cfg.mask_path, "vertex weight / exclusion file")
        ->check(CLI::ExistingFile);
    fit->add_option("--components", cfg.shape_components,
                    "free shape components (-1 = all, 0 = frozen)");
    fit->add_option("--max-iters", cfg.max_iters, "iteration budget per stage");
    fit->add_option("--tol", cfg.tol, "relative objective tolerance");
    fit->add_option("--pose", cfg.pose_path, "initial pose file")->check(CLI::ExistingFile);
    fit->add_option("--shape", cfg.shape_path, "initial shape file")->check(CLI::ExistingFile);
    fit->add_option("--expr", cfg.expr_path, "initial expression file")
        ->check(CLI::ExistingFile);
    fit->add_option("--format", cfg.format, "mesh format override")
        ->check(CLI::IsMember({"obj", "ply"}));

    auto* separate = app.add_subcommand("separate", "slice a part model out of a container");
    separate->add_option("--model", cfg.model_path, "model container")
        ->required()
        ->check(CLI::ExistingFile);
    separate->add_option("--part", cfg.part, "part label name, or a part spec JSON file")
        ->required();
    separate->add_option("--out", cfg.out_path, "output part container path")->required();

    auto* eval = app.add_subcommand("eval", "sweep shape capacity against fit error");
    eval->add_option("targets", cfg.target_paths, "target meshes")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--model", cfg.model_path, "model container")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--components", cfg.components, "component counts, e.g. 2,4,8,16")
        ->required()
        ->delimiter(',');
    eval->add_option("--jobs", cfg.jobs, "worker pool size (default 1)");
    eval->add_option("--max-iters", cfg.max_iters, "iteration budget per stage");
    eval->add_option("--tol", cfg.tol, "relative objective tolerance");
    eval->add_option("--out", cfg.out_path, "optional CSV output path");

    try
    {
        app.parse(argc, argv);
        if (synth->parsed()) return run_synth(cfg);
        if (validate->parsed()) return run_validate(cfg);
        if (pose->parsed()) return run_pose(cfg, false);
        if (foot->parsed()) return run_pose(cfg, true);
        if (fit->parsed()) return run_fit(cfg);
        if (separate->parsed()) return run_separate(cfg);
        if (eval->parsed()) return run_eval(cfg);
        return 2; // unreachable with require_subcommand(1)
    } catch (const CLI::ParseError& e)
    {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const supr::Error& e)
    {
        std::cerr << "error: category=" << to_string(e.category()) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e)
    {
        std::cerr << "error: category=internal: " << e.what() << "\n";
        return 1;
    }
}
