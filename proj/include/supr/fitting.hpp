/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/fitting.hpp
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
#pragma once

#include "supr/dual.hpp"
#include "supr/errors.hpp"
#include "supr/model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

/**
 * Model-to-surface fitting.
 *
 * Minimizes the weighted mean squared vertex error with Levenberg-Marquardt;
 * the Jacobian comes from one forward-mode derivative pass per free
 * parameter, so it is exact to machine precision. Optimization runs in three
 * stages sharing the iteration budget: rigid alignment (translation and root
 * rotation), full pose, then pose with shape and expression coefficients.
 * Steps are only ever accepted when they lower the objective, so the
 * reported objective trace is non-increasing by construction.
 */
namespace supr {

struct FitOptions
{
    int max_iterations = 60;       ///< Levenberg-Marquardt iterations per stage
    double tolerance = 1e-10;      ///< relative objective decrease that counts as converged
    int shape_components = -1;     ///< free shape coefficients; -1 all, 0 frozen
    int expression_components = 0; ///< free expression coefficients; 0 frozen
    VecXd vertex_weights;          ///< per-vertex loss weights; empty = uniform
    double shape_prior = 0.0;      ///< L2 penalty weight on free shape coefficients
    double expression_prior = 0.0; ///< L2 penalty weight on free expression coefficients
};

struct FitReport
{
    std::vector<double> objective_trace; ///< initial objective, then each accepted step
    double v2v_error = 0.0;              ///< weighted mean vertex-to-vertex distance
    double mabs_error = 0.0;             ///< unweighted mean absolute coordinate error
    int iterations = 0;                  ///< accepted steps across all stages
    bool converged = false;              ///< final stage ended by tolerance, not budget
};

namespace fit_detail {

/// Which entries of the packed parameter vector are free.
struct Layout
{
    int joint_count = 0;
    bool translation = false;
    bool root_rotation = false; ///< only the root row of the pose
    bool full_pose = false;     ///< all joint rows, overrides root_rotation
    int shape = 0;
    int expr = 0;

    int pose_slots() const
    {
        return full_pose ? 3 * joint_count : (root_rotation ? 3 : 0);
    }
    int count() const
    {
        return (translation ? 3 : 0) + pose_slots() + shape + expr;
    }
    int shape_slot(int s) const
    {
        return (translation ? 3 : 0) + pose_slots() + s;
    }
    int expr_slot(int e) const { return shape_slot(shape) + e; }
};

inline void mark_tangent(double&) {}
inline void mark_tangent(Dual& v) { v.d = 1.0; }

inline VecXd pack(const ModelParams& p, const Layout& L)
{
    VecXd x(L.count());
    int q = 0;
    if (L.translation)
    {
        for (int d = 0; d < 3; ++d) x[q++] = p.pose.global_translation[d];
    }
    if (L.full_pose)
    {
        for (int j = 0; j < L.joint_count; ++j)
        {
            for (int d = 0; d < 3; ++d) x[q++] = p.pose.joint_rotations(j, d);
        }
    }
    else if (L.root_rotation)
    {
        for (int d = 0; d < 3; ++d) x[q++] = p.pose.joint_rotations(0, d);
    }
    for (int s = 0; s < L.shape; ++s) x[q++] = p.shape[s];
    for (int e = 0; e < L.expr; ++e) x[q++] = p.expression[e];
    return x;
}

/// Rebuilds full parameters from the packed vector; with S = Dual, the entry
/// at tangent_slot carries a unit tangent so one forward pass yields one
/// Jacobian column.
template <typename S>
ModelParamsT<S> unpack(const VecXd& x, const Layout& L, const ModelParams& base,
                       int tangent_slot = -1)
{
    ModelParamsT<S> p;
    p.pose.joint_rotations = base.pose.joint_rotations.template cast<S>();
    p.pose.global_translation = base.pose.global_translation.template cast<S>();
    p.shape = base.shape.template cast<S>();
    p.expression = base.expression.template cast<S>();

    int q = 0;
    auto assign = [&x, &q, tangent_slot](S& dst) {
        dst = S{x[q]};
        if (q == tangent_slot) mark_tangent(dst);
        ++q;
    };
    if (L.translation)
    {
        for (int d = 0; d < 3; ++d) assign(p.pose.global_translation[d]);
    }
    if (L.full_pose)
    {
        for (int j = 0; j < L.joint_count; ++j)
        {
            for (int d = 0; d < 3; ++d) assign(p.pose.joint_rotations(j, d));
        }
    }
    else if (L.root_rotation)
    {
        for (int d = 0; d < 3; ++d) assign(p.pose.joint_rotations(0, d));
    }
    for (int s = 0; s < L.shape; ++s) assign(p.shape[s]);
    for (int e = 0; e < L.expr; ++e) assign(p.expression[e]);
    return p;
}

inline bool pose_in_range(const PoseState& pose)
{
    constexpr double two_pi = 6.283185307179586;
    for (int j = 0; j < pose.joint_count(); ++j)
    {
        const double n2 = pose.joint_rotations.row(j).squaredNorm();
        if (!std::isfinite(n2) || n2 >= two_pi * two_pi) return false;
    }
    return true;
}

struct Problem
{
    const ModelContainer* model = nullptr;
    const MatX3d* target = nullptr;
    std::vector<int> active;  ///< vertices with positive weight
    VecXd sqrt_weights;       ///< sqrt of normalized weights, one per active vertex
    const FitOptions* options = nullptr;
    int prior_shape = 0; ///< coefficients under the shape prior (final free count)
    int prior_expr = 0;  ///< coefficients under the expression prior

    /// Prior rows always cover the final free counts so the objective is the
    /// same function in every stage and the trace stays non-increasing.
    int prior_rows() const
    {
        return (options->shape_prior > 0.0 ? prior_shape : 0) +
               (options->expression_prior > 0.0 ? prior_expr : 0);
    }

    VecXd residuals(const ModelParams& p) const
    {
        const auto out = model->forward_vertices<double>(p);
        VecXd r(3 * static_cast<Eigen::Index>(active.size()) + prior_rows());
        for (std::size_t i = 0; i < active.size(); ++i)
        {
            const int v = active[i];
            for (int d = 0; d < 3; ++d)
            {
                r[3 * static_cast<Eigen::Index>(i) + d] =
                    sqrt_weights[static_cast<Eigen::Index>(i)] *
                    (out(v, d) - (*target)(v, d));
            }
        }
        Eigen::Index q = 3 * static_cast<Eigen::Index>(active.size());
        if (options->shape_prior > 0.0)
        {
            const double w = std::sqrt(options->shape_prior);
            for (int s = 0; s < prior_shape; ++s) r[q++] = w * p.shape[s];
        }
        if (options->expression_prior > 0.0)
        {
            const double w = std::sqrt(options->expression_prior);
            for (int e = 0; e < prior_expr; ++e) r[q++] = w * p.expression[e];
        }
        return r;
    }

    Eigen::MatrixXd jacobian(const VecXd& x, const Layout& L, const ModelParams& base) const
    {
        const auto rows = 3 * static_cast<Eigen::Index>(active.size()) + prior_rows();
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(rows, L.count());
        for (int slot = 0; slot < L.count(); ++slot)
        {
            const auto pd = unpack<Dual>(x, L, base, slot);
            const auto out = model->forward_vertices<Dual>(pd);
            for (std::size_t i = 0; i < active.size(); ++i)
            {
                const int v = active[i];
                for (int d = 0; d < 3; ++d)
                {
                    J(3 * static_cast<Eigen::Index>(i) + d, slot) =
                        sqrt_weights[static_cast<Eigen::Index>(i)] * out(v, d).d;
                }
            }
        }
        // Frozen coefficients keep their prior rows with zero derivative.
        Eigen::Index q = 3 * static_cast<Eigen::Index>(active.size());
        if (options->shape_prior > 0.0)
        {
            const double w = std::sqrt(options->shape_prior);
            for (int s = 0; s < prior_shape; ++s, ++q)
            {
                if (s < L.shape) J(q, L.shape_slot(s)) = w;
            }
        }
        if (options->expression_prior > 0.0)
        {
            const double w = std::sqrt(options->expression_prior);
            for (int e = 0; e < prior_expr; ++e, ++q)
            {
                if (e < L.expr) J(q, L.expr_slot(e)) = w;
            }
        }
        return J;
    }
};

/// One Levenberg-Marquardt run over the given free-parameter layout.
/// Returns the number of accepted steps; converged reports whether the stage
/// ended for a reason other than the iteration budget.
inline int run_stage(const Problem& prob, const Layout& L, ModelParams& params,
                     std::vector<double>& trace, bool& converged)
{
    VecXd x = pack(params, L);
    VecXd r = prob.residuals(params);
    double obj = r.squaredNorm();
    if (!std::isfinite(obj))
    {
        throw NumericalError("fit objective is not finite at the starting point", trace);
    }
    if (trace.empty()) trace.push_back(obj);

    double lambda = 1e-3;
    int accepted_steps = 0;
    converged = false;

    for (int it = 0; it < prob.options->max_iterations; ++it)
    {
        const Eigen::MatrixXd J = prob.jacobian(x, L, params);
        const VecXd g = J.transpose() * r;
        const Eigen::MatrixXd H = J.transpose() * J;
        if (g.lpNorm<Eigen::Infinity>() < 1e-14)
        {
            converged = true;
            break;
        }

        bool accepted = false;
        double relative_drop = 0.0;
        while (lambda <= 1e14)
        {
            Eigen::MatrixXd damped = H;
            damped.diagonal().array() += lambda;
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            if (ldlt.info() == Eigen::Success)
            {
                const VecXd delta = ldlt.solve(-g);
                if (delta.allFinite())
                {
                    const VecXd xt = x + delta;
                    const ModelParams pt = unpack<double>(xt, L, params);
                    if (pose_in_range(pt.pose))
                    {
                        const VecXd rt = prob.residuals(pt);
                        const double objt = rt.squaredNorm();
                        if (std::isfinite(objt) && objt < obj)
                        {
                            relative_drop = (obj - objt) / std::max(obj, 1e-300);
                            x = xt;
                            r = rt;
                            obj = objt;
                            params = pt;
                            trace.push_back(obj);
                            ++accepted_steps;
                            lambda = std::max(lambda / 3.0, 1e-15);
                            accepted = true;
                            break;
                        }
                    }
                }
            }
            lambda *= 10.0;
        }
        if (!accepted)
        {
            // No damping level could improve the objective: local optimum.
            converged = true;
            break;
        }
        if (relative_drop < prob.options->tolerance)
        {
            converged = true;
            break;
        }
    }
    return accepted_steps;
}

inline VecXd zero_padded(const VecXd& v, Eigen::Index n, const char* what)
{
    if (v.size() > n)
    {
        throw InvalidArgumentError(std::string(what) + " coefficients exceed the model's space");
    }
    VecXd full = VecXd::Zero(n);
    full.head(v.size()) = v;
    return full;
}

} // namespace fit_detail

/// Fits the model to per-vertex targets (same vertex order as the model).
/// params acts as the starting point and receives the solution.
inline FitReport fit_model(const ModelContainer& m, const MatX3d& target, ModelParams& params,
                           const FitOptions& options = {})
{
    if (target.rows() != m.template_vertices.rows())
    {
        throw InvalidArgumentError("fit target has " + std::to_string(target.rows()) +
                                   " vertices, model has " +
                                   std::to_string(m.template_vertices.rows()));
    }
    if (!target.allFinite())
    {
        throw InvalidArgumentError("fit target has non-finite coordinates");
    }
    if (options.max_iterations < 1)
    {
        throw InvalidArgumentError("fit needs a positive iteration budget");
    }

    fit_detail::Problem prob;
    prob.model = &m;
    prob.target = &target;
    prob.options = &options;
    {
        VecXd w = options.vertex_weights;
        if (w.size() == 0) w = VecXd::Ones(m.template_vertices.rows());
        if (w.size() != m.template_vertices.rows())
        {
            throw InvalidArgumentError("vertex weights size does not match the model");
        }
        double sum = 0.0;
        for (Eigen::Index v = 0; v < w.size(); ++v)
        {
            if (!std::isfinite(w[v]) || w[v] < 0.0)
            {
                throw InvalidArgumentError("vertex weights must be finite and non-negative");
            }
            if (w[v] > 0.0)
            {
                prob.active.push_back(static_cast<int>(v));
                sum += w[v];
            }
        }
        if (prob.active.empty())
        {
            throw InvalidArgumentError("all vertex weights are zero");
        }
        prob.sqrt_weights.resize(static_cast<Eigen::Index>(prob.active.size()));
        for (std::size_t i = 0; i < prob.active.size(); ++i)
        {
            prob.sqrt_weights[static_cast<Eigen::Index>(i)] =
                std::sqrt(w[prob.active[i]] / sum);
        }
    }

    const int k = static_cast<int>(m.joint_count());
    if (params.pose.joint_rotations.rows() == 0) params.pose = PoseState::rest(k);
    if (params.pose.joint_rotations.rows() != k)
    {
        throw InvalidArgumentError("initial pose does not match the model's joint count");
    }
    params.shape = fit_detail::zero_padded(params.shape, m.shape_count(), "shape");
    params.expression =
        fit_detail::zero_padded(params.expression, m.expression_count(), "expression");

    const int s_free = options.shape_components < 0
                           ? static_cast<int>(m.shape_count())
                           : std::min<int>(options.shape_components,
                                           static_cast<int>(m.shape_count()));
    const int e_free = std::min<int>(std::max(options.expression_components, 0),
                                     static_cast<int>(m.expression_count()));
    prob.prior_shape = s_free;
    prob.prior_expr = e_free;

    FitReport report;
    fit_detail::Layout L;
    L.joint_count = k;
    L.translation = true;

    bool converged = false;

    L.root_rotation = true;
    report.iterations += fit_detail::run_stage(prob, L, params, report.objective_trace,
                                               converged);

    L.root_rotation = false;
    L.full_pose = true;
    report.iterations += fit_detail::run_stage(prob, L, params, report.objective_trace,
                                               converged);

    if (s_free > 0 || e_free > 0)
    {
        L.shape = s_free;
        L.expr = e_free;
        report.iterations += fit_detail::run_stage(prob, L, params, report.objective_trace,
                                                   converged);
    }
    report.converged = converged;

    const auto out = m.forward_vertices<double>(params);
    double v2v = 0.0;
    double mabs = 0.0;
    for (std::size_t i = 0; i < prob.active.size(); ++i)
    {
        const int v = prob.active[i];
        const Eigen::RowVector3d diff = out.row(v) - target.row(v);
        const double wn = prob.sqrt_weights[static_cast<Eigen::Index>(i)];
        v2v += (wn * wn) * diff.norm();
        mabs += diff.cwiseAbs().sum();
    }
    report.v2v_error = v2v; // normalized weights already sum to one
    report.mabs_error = mabs / (3.0 * static_cast<double>(prob.active.size()));
    return report;
}

/// One row of a shape-capacity sweep.
struct SweepRow
{
    int component_count = 0;
    double mean_mabs = 0.0;
    double std_mabs = 0.0;
    int n = 0; ///< fits that finished (failures are excluded and reported here)
};

/// Fits every target at each component budget and aggregates the mean
/// absolute error. Failed fits lower a row's n instead of poisoning it; a
/// budget where every fit fails raises NumericalError.
inline std::vector<SweepRow> shape_sweep(const ModelContainer& m,
                                         const std::vector<MatX3d>& targets,
                                         const std::vector<int>& component_counts,
                                         const FitOptions& base_options = {}, int jobs = 1)
{
    if (targets.empty()) throw InvalidArgumentError("shape sweep needs at least one target");
    if (component_counts.empty())
    {
        throw InvalidArgumentError("shape sweep needs at least one component count");
    }
    for (const int c : component_counts)
    {
        if (c < 0) throw InvalidArgumentError("component counts must be non-negative");
    }
    if (jobs < 1) jobs = 1;

    const std::size_t total = component_counts.size() * targets.size();
    std::vector<double> mabs(total, std::numeric_limits<double>::quiet_NaN());

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;)
        {
            const std::size_t task = next.fetch_add(1);
            if (task >= total) return;
            const int count = component_counts[task / targets.size()];
            const auto& target = targets[task % targets.size()];
            try
            {
                FitOptions opt = base_options;
                opt.shape_components = count;
                ModelParams p;
                const auto report = fit_model(m, target, p, opt);
                mabs[task] = report.mabs_error;
            } catch (const NumericalError&)
            {
                // A diverged fit leaves its NaN marker in place.
            } catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (jobs == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<SweepRow> rows;
    for (std::size_t ci = 0; ci < component_counts.size(); ++ci)
    {
        SweepRow row;
        row.component_count = component_counts[ci];
        std::vector<double> vals;
        for (std::size_t t = 0; t < targets.size(); ++t)
        {
            const double v = mabs[ci * targets.size() + t];
            if (std::isfinite(v)) vals.push_back(v);
        }
        row.n = static_cast<int>(vals.size());
        if (row.n == 0)
        {
            throw NumericalError("every fit diverged at component count " +
                                     std::to_string(row.component_count),
                                 {});
        }
        double mean = 0.0;
        for (const double v : vals) mean += v;
        mean /= static_cast<double>(row.n);
        double var = 0.0;
        for (const double v : vals) var += (v - mean) * (v - mean);
        row.mean_mabs = mean;
        row.std_mabs = row.n > 1 ? std::sqrt(var / static_cast<double>(row.n - 1)) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows)
{
    std::string csv = "component_count,mean_mabs,std_mabs,n\n";
    char buf[128];
    for (const auto& row : rows)
    {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d\n", row.component_count,
                      row.mean_mabs, row.std_mabs, row.n);
        csv += buf;
    }
    return csv;
}

} // namespace supr
