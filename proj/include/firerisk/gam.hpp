#pragma once

#include "firerisk/bspline.hpp"
#include "firerisk/geo.hpp"
#include "firerisk/stats.hpp"
#include "firerisk/util.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace firerisk {

struct SmoothTermSpec {
    std::string variable;
    int basis_dim = 10;
};

struct GamSpec {
    std::vector<SmoothTermSpec> terms;
    double lambda_min = 1e-4;
    double lambda_max = 1e4;
    int lambda_grid = 25;
    int gcv_sweeps = 2;
    int max_iterations = 200;
    double tolerance = 1e-8;
    int degree = 3;
};

// Fitted smooth: clamped cubic B-spline basis on the standardized covariate with a
// second-difference penalty and a sum-to-zero constraint absorbed into the basis.
struct SmoothTerm {
    std::string variable;
    int basis_dim = 0;
    std::vector<double> knots; // standardized scale
    double center = 0;
    double scale = 1;
    Eigen::VectorXd gamma;        // unconstrained-basis coefficients (length basis_dim)
    Eigen::VectorXd beta;         // constrained coefficients (basis_dim - 1)
    Eigen::MatrixXd cov;          // sandwich covariance of beta (penalized estimator)
    Eigen::VectorXd basis_colsum; // training column sums; basis_colsum . gamma == 0
    double lambda = 1.0;
    double edf = 0;

    double eval(double x_original) const {
        double xs = (x_original - center) / scale;
        xs = std::clamp(xs, knots.front(), knots.back());
        return bspline_row(knots, static_cast<int>(knots.size()) - basis_dim - 1, xs) * gamma;
    }
};

struct TermDiagnostic {
    std::string term;
    double f_stat = 0;
    double p_value = 1;
    std::string stars;
    int rank = 0;
    double edf = 0;
};

struct GamFit {
    double intercept = 0;
    std::vector<std::string> states; // sorted; front() is the reference with effect 0
    std::vector<double> state_coef;  // aligned to states; state_coef[0] == 0
    std::vector<SmoothTerm> terms;
    double dispersion = 1;
    double deviance = 0;
    double gcv = 0;
    double edf_total = 0;
    long n_obs = 0;
    int iterations = 0;
    double final_rel_change = 0;
    bool converged = false;
    std::vector<double> deviance_trace; // one entry per accepted P-IRLS iteration
    Eigen::VectorXd fitted_mean;        // training-data means, not serialized

    double state_effect(const std::string& s) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == s) return state_coef[i];
        throw DataError("unknown state in fit: " + s);
    }

    double predict_eta(const std::string& state, const std::map<std::string, double>& x) const {
        double eta = intercept + state_effect(state);
        for (const auto& t : terms) eta += t.eval(x.at(t.variable));
        return eta;
    }
};

// Column-major model frame for occurrence fitting.
struct GamData {
    std::vector<double> response; // strictly positive rates
    std::vector<std::string> state;
    std::vector<int> month; // 1..12 when seasonal stratification is wanted, else 0
    std::vector<std::string> var_names;
    std::vector<std::vector<double>> covariates; // aligned with var_names

    std::size_t n() const { return response.size(); }

    const std::vector<double>& column(const std::string& name) const {
        for (std::size_t i = 0; i < var_names.size(); ++i)
            if (var_names[i] == name) return covariates[i];
        throw DataError("GamData has no covariate named " + name);
    }

    GamData subset(const std::vector<std::size_t>& idx) const {
        GamData out;
        out.var_names = var_names;
        out.covariates.resize(covariates.size());
        for (std::size_t i : idx) {
            out.response.push_back(response[i]);
            out.state.push_back(state[i]);
            out.month.push_back(month.empty() ? 0 : month[i]);
            for (std::size_t c = 0; c < covariates.size(); ++c)
                out.covariates[c].push_back(covariates[c][i]);
        }
        return out;
    }
};

namespace gam_detail {

inline double gamma_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
    double dev = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        dev += 2.0 * ((y(i) - mu(i)) / mu(i) - std::log(y(i) / mu(i)));
    return dev;
}

struct DesignBlock {
    int start = 0; // column offset in the full design
    int size = 0;
};

struct Workspace {
    Eigen::MatrixXd X;      // n x p full design
    Eigen::VectorXd y;
    Eigen::MatrixXd G0;     // X'X
    std::vector<Eigen::MatrixXd> penalties; // per term, embedded (size x size)
    std::vector<DesignBlock> blocks;        // per term
    int n_parametric = 0;   // intercept + state dummies
};

struct PirlsResult {
    Eigen::VectorXd beta;
    Eigen::VectorXd eta;
    double deviance = 0;
    double edf = 0;
    int iterations = 0;
    double final_rel_change = 0;
    bool converged = false;
    std::vector<double> trace;
    Eigen::MatrixXd a_inv_g0; // A^{-1} X'X, reused for per-term EDF
    Eigen::LLT<Eigen::MatrixXd> a_llt;
};

inline Eigen::MatrixXd penalized_matrix(const Workspace& w, const std::vector<double>& lambdas) {
    Eigen::MatrixXd A = w.G0;
    for (std::size_t j = 0; j < w.blocks.size(); ++j)
        A.block(w.blocks[j].start, w.blocks[j].start, w.blocks[j].size, w.blocks[j].size) +=
            lambdas[j] * w.penalties[j];
    return A;
}

// Penalized IRLS for the Gamma family with log link. The working weights are
// identically 1 for this family/link pair, so the penalized system matrix is fixed
// across iterations and is factorized once per lambda vector.
inline PirlsResult run_pirls(const Workspace& w, const std::vector<double>& lambdas,
                             int max_iter, double tol, bool want_edf) {
    PirlsResult r;
    Eigen::MatrixXd A = penalized_matrix(w, lambdas);
    r.a_llt.compute(A);
    if (r.a_llt.info() != Eigen::Success) {
        // name the offending term if one basis block is rank deficient
        for (std::size_t j = 0; j < w.blocks.size(); ++j) {
            Eigen::MatrixXd block =
                w.G0.block(w.blocks[j].start, w.blocks[j].start, w.blocks[j].size, w.blocks[j].size);
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(block);
            if (qr.rank() < w.blocks[j].size)
                throw DataError("rank error: smooth term " + std::to_string(j) +
                                " yields a singular penalized system");
        }
        throw DataError("rank error: singular penalized system (collinear design)");
    }

    Eigen::VectorXd eta = w.y.array().log();
    Eigen::VectorXd beta_prev;
    double dev_prev = 0;
    for (int iter = 1; iter <= max_iter; ++iter) {
        Eigen::VectorXd mu = eta.array().min(50.0).max(-50.0).exp();
        Eigen::VectorXd z = eta.array() + (w.y - mu).array() / mu.array();
        Eigen::VectorXd beta = r.a_llt.solve(w.X.transpose() * z);
        Eigen::VectorXd eta_new = w.X * beta;
        double dev = gamma_deviance(w.y, eta_new.array().min(50.0).max(-50.0).exp());

        if (iter > 1) {
            int halvings = 0;
            while (dev > dev_prev && halvings < 30) {
                beta = 0.5 * (beta + beta_prev);
                eta_new = w.X * beta;
                dev = gamma_deviance(w.y, eta_new.array().min(50.0).max(-50.0).exp());
                ++halvings;
            }
            if (dev > dev_prev) { // no descent direction left
                r.converged = true;
                break;
            }
        }

        r.trace.push_back(dev);
        r.beta = beta;
        r.eta = eta_new;
        r.deviance = dev;
        r.iterations = iter;
        if (iter > 1) {
            r.final_rel_change = std::fabs(dev_prev - dev) / (std::fabs(dev) + 0.1);
            if (r.final_rel_change < tol) {
                r.converged = true;
                break;
            }
        }
        beta_prev = beta;
        dev_prev = dev;
        eta = eta_new;
    }

    if (want_edf) {
        r.a_inv_g0 = r.a_llt.solve(w.G0);
        r.edf = r.a_inv_g0.trace();
    }
    return r;
}

inline double gcv_score(double n, double deviance, double edf) {
    double denom = n - edf;
    if (denom <= 0) return std::numeric_limits<double>::infinity();
    return n * deviance / (denom * denom);
}

} // namespace gam_detail

// Fit the Gamma/log-link GAM: intercept + state fixed effects (reference state pinned
// to 0) + penalized cubic-spline smooths. Smoothing parameters are selected by GCV over
// a log-spaced grid with coordinate-descent sweeps across terms.
inline GamFit fit_gam(const GamData& data, const GamSpec& spec) {
    const std::size_t n = data.n();
    if (n == 0) throw DataError("fit_gam: empty data");
    for (double v : data.response)
        if (!(v > 0))
            throw DataError("family error: Gamma response must be strictly positive");

    gam_detail::Workspace w;
    w.y = Eigen::Map<const Eigen::VectorXd>(data.response.data(), static_cast<Eigen::Index>(n));

    // reference state = alphabetically first present
    std::set<std::string> state_set(data.state.begin(), data.state.end());
    std::vector<std::string> states(state_set.begin(), state_set.end());
    const int n_states = static_cast<int>(states.size());
    w.n_parametric = 1 + std::max(0, n_states - 1);

    struct TermBuild {
        SmoothTermSpec spec;
        std::vector<double> knots;
        double center, scale;
        Eigen::MatrixXd constrained_basis; // B * Z
        Eigen::MatrixXd z;                 // basis_dim x (basis_dim - 1)
        Eigen::MatrixXd penalty;           // Z' S Z
        Eigen::VectorXd colsum;
    };
    std::vector<TermBuild> builds;
    int p = w.n_parametric;
    for (const auto& tspec : spec.terms) {
        const auto& col = data.column(tspec.variable);
        TermBuild b;
        b.spec = tspec;
        double mean = 0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(n);
        double var = 0;
        for (double v : col) var += (v - mean) * (v - mean);
        double sd = std::sqrt(var / std::max<std::size_t>(1, n - 1));
        if (!(sd > 0))
            throw DataError("rank error: covariate " + tspec.variable +
                            " is constant; smooth term is unidentifiable");
        b.center = mean;
        b.scale = sd;
        std::vector<double> xs(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) xs[i] = (col[i] - mean) / sd;
        auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        if (!(*hi > *lo))
            throw DataError("rank error: covariate " + tspec.variable + " has zero range");
        b.knots = clamped_knots(*lo, *hi, tspec.basis_dim, spec.degree);
        Eigen::MatrixXd B = bspline_basis(xs, b.knots, spec.degree);
        b.colsum = B.colwise().sum();

        // sum-to-zero constraint absorbed via the Householder null space of the column sums
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(b.colsum);
        Eigen::MatrixXd Q = qr.householderQ();
        b.z = Q.rightCols(tspec.basis_dim - 1);
        b.constrained_basis = B * b.z;
        b.penalty = b.z.transpose() * second_difference_penalty(tspec.basis_dim) * b.z;
        p += tspec.basis_dim - 1;
        builds.push_back(std::move(b));
    }

    w.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), p);
    w.X.col(0).setOnes();
    std::map<std::string, int> state_col;
    for (int s = 1; s < n_states; ++s) state_col[states[static_cast<std::size_t>(s)]] = s;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = state_col.find(data.state[i]);
        if (it != state_col.end()) w.X(static_cast<Eigen::Index>(i), it->second) = 1.0;
    }
    int offset = w.n_parametric;
    for (const auto& b : builds) {
        int size = b.spec.basis_dim - 1;
        w.X.block(0, offset, static_cast<Eigen::Index>(n), size) = b.constrained_basis;
        w.blocks.push_back({offset, size});
        w.penalties.push_back(b.penalty);
        offset += size;
    }
    w.G0 = w.X.transpose() * w.X;

    // GCV smoothing selection: per-term log-spaced grid, coordinate descent
    std::vector<double> lambdas(builds.size(), 1.0);
    if (!builds.empty() && spec.lambda_grid > 0) {
        std::vector<double> grid;
        if (spec.lambda_grid == 1) {
            grid.push_back(spec.lambda_min);
        } else {
            double llo = std::log10(spec.lambda_min), lhi = std::log10(spec.lambda_max);
            for (int g = 0; g < spec.lambda_grid; ++g)
                grid.push_back(std::pow(10.0, llo + (lhi - llo) * g / (spec.lambda_grid - 1)));
        }
        for (int sweep = 0; sweep < spec.gcv_sweeps; ++sweep) {
            bool changed = false;
            for (std::size_t j = 0; j < builds.size(); ++j) {
                double best_gcv = std::numeric_limits<double>::infinity();
                double best_lambda = lambdas[j];
                for (double cand : grid) {
                    std::vector<double> trial = lambdas;
                    trial[j] = cand;
                    auto res = gam_detail::run_pirls(w, trial, spec.max_iterations,
                                                     spec.tolerance, true);
                    double score = gam_detail::gcv_score(static_cast<double>(n), res.deviance,
                                                         res.edf);
                    if (score < best_gcv) {
                        best_gcv = score;
                        best_lambda = cand;
                    }
                }
                if (best_lambda != lambdas[j]) {
                    lambdas[j] = best_lambda;
                    changed = true;
                }
            }
            if (!changed) break;
        }
    }

    auto res = gam_detail::run_pirls(w, lambdas, spec.max_iterations, spec.tolerance, true);

    GamFit fit;
    fit.n_obs = static_cast<long>(n);
    fit.intercept = res.beta(0);
    fit.states = states;
    fit.state_coef.assign(states.size(), 0.0);
    for (int s = 1; s < n_states; ++s) fit.state_coef[static_cast<std::size_t>(s)] = res.beta(s);
    fit.deviance = res.deviance;
    fit.iterations = res.iterations;
    fit.final_rel_change = res.final_rel_change;
    fit.converged = res.converged;
    fit.deviance_trace = res.trace;
    fit.edf_total = res.edf;
    fit.gcv = gam_detail::gcv_score(static_cast<double>(n), res.deviance, res.edf);
    fit.fitted_mean = res.eta.array().min(50.0).max(-50.0).exp();

    // Pearson dispersion
    double pearson = 0;
    for (Eigen::Index i = 0; i < w.y.size(); ++i) {
        double d = (w.y(i) - fit.fitted_mean(i)) / fit.fitted_mean(i);
        pearson += d * d;
    }
    double resid_df = std::max(1.0, static_cast<double>(n) - res.edf);
    fit.dispersion = pearson / resid_df;

    // sandwich covariance of the penalized estimator: dispersion * A^{-1} G0 A^{-1};
    // exact for this family/link since the working weights are 1
    Eigen::MatrixXd a_inv = res.a_llt.solve(Eigen::MatrixXd::Identity(p, p));
    Eigen::MatrixXd sandwich = fit.dispersion * (a_inv * w.G0 * a_inv);
    for (std::size_t j = 0; j < builds.size(); ++j) {
        const auto& blk = w.blocks[j];
        SmoothTerm term;
        term.variable = builds[j].spec.variable;
        term.basis_dim = builds[j].spec.basis_dim;
        term.knots = builds[j].knots;
        term.center = builds[j].center;
        term.scale = builds[j].scale;
        term.beta = res.beta.segment(blk.start, blk.size);
        term.gamma = builds[j].z * term.beta;
        term.cov = sandwich.block(blk.start, blk.start, blk.size, blk.size);
        term.basis_colsum = builds[j].colsum;
        term.lambda = lambdas[j];
        term.edf = res.a_inv_g0.block(blk.start, blk.start, blk.size, blk.size).trace();
        fit.terms.push_back(std::move(term));
    }
    return fit;
}

// Centered smooth-term curve over a grid in the covariate's original units.
struct PdpPoint {
    double x;
    double effect; // log-rate scale
};

inline std::vector<PdpPoint> partial_dependence(const GamFit& fit, const std::string& term,
                                                const std::vector<double>& grid) {
    for (const auto& t : fit.terms) {
        if (t.variable != term) continue;
        std::vector<PdpPoint> curve;
        curve.reserve(grid.size());
        for (double x : grid) curve.push_back({x, t.eval(x)});
        return curve;
    }
    throw DataError("partial_dependence: unknown term " + term);
}

// Wald-type significance of each smooth block against the sandwich covariance of the
// penalized estimator, referenced to F(block dim, n - total edf). Under a null smooth
// the statistic is an exact quadratic form in the block covariance, which keeps the
// test calibrated despite shrinkage; this approximates rather than replicates the
// mgcv smooth-term test.
inline std::vector<TermDiagnostic> term_significance(const GamFit& fit) {
    std::vector<TermDiagnostic> diags;
    for (const auto& t : fit.terms) {
        TermDiagnostic d;
        d.term = t.variable;
        d.edf = t.edf;
        Eigen::VectorXd v = t.cov.llt().solve(t.beta);
        double wald = t.beta.dot(v);
        double dof1 = static_cast<double>(t.beta.size());
        double dof2 = std::max(1.0, static_cast<double>(fit.n_obs) - fit.edf_total);
        d.f_stat = wald / dof1;
        d.p_value = f_sf(d.f_stat, dof1, dof2);
        d.stars = d.p_value < 0.001 ? "***" : d.p_value < 0.01 ? "**" : d.p_value < 0.05 ? "*" : "";
        diags.push_back(std::move(d));
    }
    std::stable_sort(diags.begin(), diags.end(),
                     [](const TermDiagnostic& a, const TermDiagnostic& b) {
                         return a.f_stat > b.f_stat;
                     });
    for (std::size_t i = 0; i < diags.size(); ++i) diags[i].rank = static_cast<int>(i) + 1;
    return diags;
}

enum class Stratifier { season, region };

struct StratifiedFits {
    std::map<std::string, GamFit> fits;
    std::vector<std::string> warnings;
};

// Identical spec refit per stratum: four seasons, or four census regions via the
// state->region map. Empty strata are skipped with a warning rather than erroring.
inline StratifiedFits fit_stratified(const GamData& data, Stratifier stratifier,
                                     const std::map<std::string, std::string>& region_map,
                                     const GamSpec& spec) {
    StratifiedFits out;
    std::vector<std::string> strata;
    std::map<std::string, std::vector<std::size_t>> groups;
    if (stratifier == Stratifier::season) {
        for (const auto& s : season_names()) strata.push_back(s);
        for (std::size_t i = 0; i < data.n(); ++i) {
            if (data.month.empty() || data.month[i] < 1 || data.month[i] > 12)
                throw DataError("fit_stratified: month required for seasonal fits");
            groups[season_of_month(data.month[i])].push_back(i);
        }
    } else {
        for (const auto& r : region_names()) strata.push_back(r);
        for (std::size_t i = 0; i < data.n(); ++i) {
            auto it = region_map.find(data.state[i]);
            if (it == region_map.end())
                throw DataError("fit_stratified: state " + data.state[i] +
                                " missing from region map");
            groups[it->second].push_back(i);
        }
    }
    for (const auto& stratum : strata) {
        auto it = groups.find(stratum);
        if (it == groups.end() || it->second.empty()) {
            out.warnings.push_back("stratum '" + stratum + "' has no observations; skipped");
            continue;
        }
        out.fits.emplace(stratum, fit_gam(data.subset(it->second), spec));
    }
    return out;
}

inline nlohmann::json gam_fit_to_json(const GamFit& fit) {
    nlohmann::json j;
    j["intercept"] = fit.intercept;
    j["states"] = fit.states;
    j["state_coef"] = fit.state_coef;
    j["dispersion"] = fit.dispersion;
    j["deviance"] = fit.deviance;
    j["gcv"] = fit.gcv;
    j["edf_total"] = fit.edf_total;
    j["n_obs"] = fit.n_obs;
    j["iterations"] = fit.iterations;
    j["final_rel_change"] = fit.final_rel_change;
    j["converged"] = fit.converged;
    j["deviance_trace"] = fit.deviance_trace;
    j["terms"] = nlohmann::json::array();
    for (const auto& t : fit.terms) {
        nlohmann::json tj;
        tj["variable"] = t.variable;
        tj["basis_dim"] = t.basis_dim;
        tj["knots"] = t.knots;
        tj["center"] = t.center;
        tj["scale"] = t.scale;
        tj["lambda"] = t.lambda;
        tj["edf"] = t.edf;
        std::vector<double> gamma(t.gamma.data(), t.gamma.data() + t.gamma.size());
        tj["coefficients"] = gamma;
        j["terms"].push_back(std::move(tj));
    }
    return j;
}

} // namespace firerisk
