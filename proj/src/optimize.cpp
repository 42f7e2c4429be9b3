#include "qnf/optimize.hpp"

#include "qnf/response.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qnf {

nm_result nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                      std::vector<double> x0, double init_scale, double tol,
                      int max_iter,
                      const std::function<void(int, double)>& on_iteration) {
    const size_t n = x0.size();
    if (n == 0) throw input_error("empty parameter vector");

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += std::max(std::abs(x0[i]) * init_scale, 1e-2);
    std::vector<double> fv(n + 1);
    for (size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    nm_result res;
    res.evaluations = static_cast<int>(n) + 1;

    auto sort_simplex = [&] {
        std::vector<size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (size_t i = 0; i <= n; ++i) { s2[i] = std::move(simplex[idx[i]]); f2[i] = fv[idx[i]]; }
        simplex = std::move(s2);
        fv = std::move(f2);
    };

    int it = 0;
    for (it = 0; it < max_iter; ++it) {
        sort_simplex();
        if (on_iteration) on_iteration(it, fv[0]);

        double spread = 0.0;
        for (size_t i = 1; i <= n; ++i) {
            double d2 = 0.0;
            for (size_t j = 0; j < n; ++j) {
                const double d = simplex[i][j] - simplex[0][j];
                d2 += d * d;
            }
            spread = std::max(spread, std::sqrt(d2));
        }
        if (spread < tol) { res.converged = true; break; }

        std::vector<double> xc(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) xc[j] += simplex[i][j] / static_cast<double>(n);

        auto blend = [&](double a, const std::vector<double>& v, double b,
                         const std::vector<double>& w) {
            std::vector<double> out(n);
            for (size_t j = 0; j < n; ++j) out[j] = a * v[j] + b * w[j];
            return out;
        };

        const std::vector<double>& worst = simplex[n];
        std::vector<double> xr = blend(2.0, xc, -1.0, worst);
        const double fr = f(xr);
        ++res.evaluations;

        if (fr < fv[0]) {
            std::vector<double> xe = blend(3.0, xc, -2.0, worst);
            const double fe = f(xe);
            ++res.evaluations;
            if (fe < fr) { simplex[n] = std::move(xe); fv[n] = fe; }
            else { simplex[n] = std::move(xr); fv[n] = fr; }
        } else if (fr < fv[n - 1]) {
            simplex[n] = std::move(xr);
            fv[n] = fr;
        } else {
            std::vector<double> xk = blend(0.5, xc, 0.5, worst);
            const double fk = f(xk);
            ++res.evaluations;
            if (fk < fv[n]) { simplex[n] = std::move(xk); fv[n] = fk; }
            else {
                for (size_t i = 1; i <= n; ++i) {
                    simplex[i] = blend(0.5, simplex[0], 0.5, simplex[i]);
                    fv[i] = f(simplex[i]);
                    ++res.evaluations;
                }
            }
        }
    }
    res.iterations = std::min(it + 1, max_iter);

    sort_simplex();
    res.x = simplex[0];
    res.fx = fv[0];
    return res;
}

cost_evaluator::cost_evaluator(const interferometer_config& config_in,
                               const derived_rates& rates_in,
                               const optimize_options& options_in)
    : config(config_in), rates(rates_in), options(options_in), phi_warm(options_in.phi_init) {
    const double half = std::numbers::pi / (2.0 * rates.tau_s);
    const double w_nb = rates.gamma_s * rates.t_IM * rates.t_IM / 4.0;
    const double lo = 1e-3 * w_nb;
    const double knee = 0.98 * half;
    grid.reserve(3759);
    for (int i = 0; i < 3600; ++i)
        grid.push_back(lo * std::pow(knee / lo, static_cast<double>(i) / 3599.0));
    for (int i = 1; i < 160; ++i)
        grid.push_back(knee + (half - knee) * static_cast<double>(i) / 159.0);
}

cost_breakdown cost_evaluator::operator()(const zpk& candidate) {
    cost_breakdown bd;
    const gain_model gain = gain_rational{candidate};
    bd.n_unstable_gain = count_unstable_open_poles(gain, rates, options.margin_unstable);

    try {
        // quadratic band integrals in the homodyne angle
        double IA = 0.0, IB = 0.0, IC = 0.0;
        double a_prev = 0.0, b_prev = 0.0, c_prev = 0.0;
        for (size_t i = 0; i < grid.size(); ++i) {
            const double w = grid[i];
            const transfer_values tp = transfer_set(config, rates, gain, cplx(0.0, w), options.mode);
            const transfer_values tm = transfer_set(config, rates, gain, cplx(0.0, -w), options.mode);
            const double noise = noise_psd_ratio(tp, tm);
            const cplx T1 = tp.T_xi + std::conj(tm.T_xi);
            const cplx Bq = cplx(0.0, 1.0) * (tp.T_xi - std::conj(tm.T_xi));
            const double a = std::norm(T1) / noise;
            const double c = std::norm(Bq) / noise;
            const double b = std::real(T1 * std::conj(Bq)) / noise;
            if (i == 0) {
                // flat continuation of the first sample down to zero frequency
                IA += a * w;
                IB += b * w;
                IC += c * w;
            } else {
                const double h = 0.5 * (w - grid[i - 1]);
                IA += h * (a + a_prev);
                IB += h * (b + b_prev);
                IC += h * (c + c_prev);
            }
            a_prev = a; b_prev = b; c_prev = c;
        }

        auto band_integral = [&](double phi) {
            const double sn = std::sin(phi), cs = std::cos(phi);
            return IA * sn * sn + 2.0 * IB * sn * cs + IC * cs * cs;
        };
        const nm_result inner = nelder_mead(
            [&](const std::vector<double>& v) { return -band_integral(v[0]); },
            {phi_warm}, options.init_scale, 1e-10, 300);
        double phi = std::fmod(inner.x[0], std::numbers::pi);
        if (phi < 0.0) phi += std::numbers::pi;
        phi_warm = phi;
        bd.phi_lo = phi;
        bd.normalized_integral = band_integral(phi) / (std::numbers::pi / rates.tau_s);

        const nyquist_report rep = nyquist(config, rates, gain, contour_spec{}, options.mode);
        bd.n_unstable_closed = std::max(rep.N, 0);
        bd.rho_min = rep.rho_min;
        bd.rho_penalty = std::max(0.0, 1.0 - rep.rho_min / options.margin_rho);
        bd.total = -bd.normalized_integral
                 + options.weight * (bd.n_unstable_gain + bd.n_unstable_closed + bd.rho_penalty);
    } catch (const singular_evaluation&) {
        bd.evaluation_failed = true;
        bd.total = 10.0 * options.weight;
    } catch (const indeterminate_verdict&) {
        bd.evaluation_failed = true;
        bd.total = 10.0 * options.weight;
    }
    return bd;
}

namespace {

std::vector<double> pack(const zpk& model) {
    std::vector<double> v;
    v.reserve(2 * (model.zeros.size() + model.poles.size()) + 1);
    for (const cplx& z : model.zeros) { v.push_back(z.real()); v.push_back(z.imag()); }
    for (const cplx& p : model.poles) { v.push_back(p.real()); v.push_back(p.imag()); }
    v.push_back(std::log(model.k));
    return v;
}

zpk unpack(const std::vector<double>& v, size_t nz, size_t np) {
    zpk m;
    m.zeros.reserve(nz);
    m.poles.reserve(np);
    for (size_t i = 0; i < nz; ++i) m.zeros.emplace_back(v[2 * i], v[2 * i + 1]);
    for (size_t j = 0; j < np; ++j) m.poles.emplace_back(v[2 * nz + 2 * j], v[2 * nz + 2 * j + 1]);
    m.k = std::exp(v.back());
    return m;
}

} // namespace

optimization_result optimize_filter(const interferometer_config& config,
                                    const derived_rates& rates, const zpk& seed,
                                    optimize_options options) {
    if (!(seed.k > 0.0)) throw input_error("seed gain factor must be positive");
    const size_t nz = seed.zeros.size();
    const size_t np = seed.poles.size();

    cost_evaluator cost(config, rates, options);

    optimization_result out;
    out.best = cost(seed);
    out.model = seed;
    out.trace.emplace_back(0, out.best.total);
    if (out.best.total >= options.weight) {
        out.seed_feasible = false;
        return out;
    }

    auto objective = [&](const std::vector<double>& v) { return cost(unpack(v, nz, np)).total; };

    std::vector<double> x = pack(seed);
    double best_cost = out.best.total;
    int done = 0;
    while (done < options.max_iterations) {
        const int base = done;
        const nm_result seg = nelder_mead(
            objective, x, options.init_scale, options.tol, options.max_iterations - done,
            [&](int it, double fbest) {
                if (fbest < best_cost) {
                    best_cost = fbest;
                    out.trace.emplace_back(base + it, fbest);
                }
            });
        done += seg.iterations;
        out.evaluations += seg.evaluations;
        ++out.segments;
        out.converged = out.converged || seg.converged;
        x = seg.x;
        if (seg.fx < best_cost) {
            best_cost = seg.fx;
            out.trace.emplace_back(done, best_cost);
        }
        if (!seg.converged) break; // iteration budget exhausted mid-segment
    }
    out.iterations = done;

    out.model = unpack(x, nz, np);
    cost.phi_warm = options.phi_init;
    out.best = cost(out.model);

    contour_spec wide;
    wide.omega_max = 4.0 * std::numbers::pi / rates.tau_s;
    out.verdict = nyquist(config, rates, gain_rational{out.model}, wide, options.mode);
    return out;
}

} // namespace qnf
