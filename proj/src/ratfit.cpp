#include "qnf/ratfit.hpp"

#include "qnf/stability.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qnf {

namespace {

using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

bool lex_less(const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

std::vector<cplx> initial_poles(const std::vector<cplx>& s, int m) {
    double wmin = std::numeric_limits<double>::infinity();
    double wmax = 0.0;
    for (const cplx& si : s) {
        const double w = std::abs(si.imag());
        if (w <= 0.0) continue;
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
    }
    if (!(wmin > 0.0) || !(wmax >= wmin))
        throw input_error("fit samples must include nonzero imaginary parts");
    std::vector<cplx> p(m);
    for (int k = 0; k < m; ++k) {
        const double w = (m == 1)
            ? wmin
            : wmin * std::pow(wmax / wmin, static_cast<double>(k) / (m - 1));
        p[k] = cplx(-w / 100.0, w);
    }
    return p;
}

// column-equilibrated complex least squares; throws on rank collapse
cvec solve_scaled(cmat A, const cvec& b, int pass) {
    const Eigen::Index cols = A.cols();
    std::vector<double> colnorm(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        colnorm[j] = A.col(j).norm();
        if (colnorm[j] > 0.0) A.col(j) /= colnorm[j];
    }
    Eigen::ColPivHouseholderQR<cmat> qr(A);
    if (qr.rank() < cols) {
        std::ostringstream msg;
        msg << "rank-deficient least-squares system in relocation pass " << pass;
        throw ill_posed_fit(msg.str());
    }
    cvec x = qr.solve(b);
    for (Eigen::Index j = 0; j < cols; ++j)
        if (colnorm[j] > 0.0) x[j] /= colnorm[j];
    return x;
}

std::vector<cplx> eigenvalues_of(const cmat& M) {
    Eigen::ComplexEigenSolver<cmat> es(M, /*computeEigenvectors=*/false);
    std::vector<cplx> out(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i) out[i] = es.eigenvalues()[i];
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

} // namespace

fit_result vector_fit(const fit_problem& problem) {
    const int m = problem.n_poles;
    const auto n = static_cast<Eigen::Index>(problem.s.size());
    if (m < 1) throw input_error("n_poles must be at least 1");
    if (problem.f.size() != problem.s.size())
        throw input_error("sample and target lengths differ");
    if (!problem.weights.empty() && problem.weights.size() != problem.s.size())
        throw input_error("weight length must match sample length");
    if (n < 2 * m + 1)
        throw input_error("need at least 2 n_poles + 1 samples");

    auto weight = [&](Eigen::Index i) {
        return problem.weights.empty() ? 1.0 : problem.weights[i];
    };

    std::vector<cplx> poles = initial_poles(problem.s, m);
    std::sort(poles.begin(), poles.end(), lex_less);

    fit_result res;
    for (int pass = 0; pass < problem.iterations; ++pass) {
        cmat A(n, 2 * m + 1);
        cvec b(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = weight(i);
            for (int k = 0; k < m; ++k) {
                const cplx basis = 1.0 / (problem.s[i] - poles[k]);
                A(i, k) = w * basis;
                A(i, m + 1 + k) = -w * problem.f[i] * basis;
            }
            A(i, m) = w;
            b[i] = w * problem.f[i];
        }
        const cvec x = solve_scaled(std::move(A), b, pass);

        cmat M(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                M(i, j) = (i == j ? poles[i] : cplx(0.0)) - x[m + 1 + j];
        std::vector<cplx> next = eigenvalues_of(M);
        for (cplx& p : next)
            if (p.real() > 0.0) p = cplx(-p.real(), p.imag());
        std::sort(next.begin(), next.end(), lex_less);

        double move = 0.0;
        for (int k = 0; k < m; ++k) {
            const double ref = std::max(std::abs(poles[k]), 1e-300);
            move = std::max(move, std::abs(next[k] - poles[k]) / ref);
        }
        poles = std::move(next);
        res.pole_history.push_back(poles);
        if (move < 1e-8) break;
    }

    // residue stage on the settled poles
    cmat A2(n, m + 1);
    cvec b2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = weight(i);
        for (int k = 0; k < m; ++k)
            A2(i, k) = w / (problem.s[i] - poles[k]);
        A2(i, m) = w;
        b2[i] = w * problem.f[i];
    }
    const cvec x2 = solve_scaled(std::move(A2), b2, problem.iterations);
    const cplx d = x2[m];
    if (std::abs(d) == 0.0)
        throw ill_posed_fit("vanishing direct term; zeros are unbounded");

    cmat Z(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            Z(i, j) = (i == j ? poles[i] : cplx(0.0)) - x2[i] / d;

    res.model.poles = poles;
    res.model.zeros = eigenvalues_of(Z);
    res.model.k = std::abs(d);

    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mag = std::abs(problem.f[i]);
        if (mag <= 0.0) continue;
        err = std::max(err, std::abs(zpk_eval(res.model, problem.s[i]) - problem.f[i]) / mag);
    }
    res.max_rel_err = err;
    return res;
}

fit_result seed_from_gopt(const interferometer_config& config,
                          const derived_rates& rates, int n_poles) {
    constexpr int n_samples = 400;
    const double lo = rates.gamma_s * (1.0 + 1e-6);
    const double hi = 2.0 * std::numbers::pi * 1e5;

    fit_problem prob;
    prob.n_poles = n_poles;
    prob.s.reserve(n_samples);
    prob.f.reserve(n_samples);
    const gain_model target = gain_optimal{};
    for (int i = 0; i < n_samples; ++i) {
        const double w = lo * std::pow(hi / lo, static_cast<double>(i) / (n_samples - 1));
        const cplx s(0.0, w);
        prob.s.push_back(s);
        prob.f.push_back(eval_gain(target, s, rates).value);
    }

    fit_result res = vector_fit(prob);
    bool stable = false;
    try {
        const gain_model fitted = gain_rational{res.model};
        stable = nyquist(config, rates, fitted, contour_spec{}, delay_mode::exact).stable;
    } catch (const indeterminate_verdict&) {
        stable = false;
    }
    if (!stable) {
        fit_problem sym = prob;
        for (int i = 0; i < n_samples; ++i) {
            sym.s.push_back(std::conj(prob.s[i]));
            sym.f.push_back(std::conj(prob.f[i]));
        }
        res = vector_fit(sym);
        res.conjugate_repaired = true;
    }
    return res;
}

} // namespace qnf
