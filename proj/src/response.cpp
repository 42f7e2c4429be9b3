#include "qnf/response.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace qnf {

double signal_psd_ratio(const transfer_values& plus, const transfer_values& minus,
                        double phi_lo) {
    const cplx T1 = plus.T_xi + std::conj(minus.T_xi);
    const cplx T2 = plus.T_xi - std::conj(minus.T_xi);
    const cplx v = T1 * std::sin(phi_lo) + cplx(0.0, 1.0) * T2 * std::cos(phi_lo);
    return std::norm(v);
}

double noise_psd_ratio(const transfer_values& plus, const transfer_values& minus) {
    double tot = 0.0;
    tot += std::norm(plus.T_nq) + std::norm(minus.T_nq);
    tot += std::norm(plus.T_na1) + std::norm(minus.T_na1);
    tot += std::norm(plus.T_na2) + std::norm(minus.T_na2);
    tot += std::norm(plus.T_nLo) + std::norm(minus.T_nLo);
    tot += std::norm(plus.T_nLf) + std::norm(minus.T_nLf);
    tot += std::norm(plus.T_nLs) + std::norm(minus.T_nLs);
    return tot;
}

namespace {

// Per-frequency quadratic form in (sin phi, cos phi): coefficients a = |T1|^2,
// c = |iT2|^2, b = Re(T1 conj(iT2)), all normalized by the noise sum.
struct quad_parts {
    double a, b, c;
};

quad_parts chi_parts(const interferometer_config& cfg, const derived_rates& rates,
                     const gain_model& gain, double omega, delay_mode mode) {
    const transfer_values tp = transfer_set(cfg, rates, gain, cplx(0.0, omega), mode);
    const transfer_values tm = transfer_set(cfg, rates, gain, cplx(0.0, -omega), mode);
    const cplx T1 = tp.T_xi + std::conj(tm.T_xi);
    const cplx B = cplx(0.0, 1.0) * (tp.T_xi - std::conj(tm.T_xi));
    const double noise = noise_psd_ratio(tp, tm);
    return {std::norm(T1) / noise, (T1 * std::conj(B)).real() / noise,
            std::norm(B) / noise};
}

double lambda_max(double a, double b, double c) {
    return 0.5 * (a + c + std::hypot(a - c, 2.0 * b));
}

double phi_of_max(double a, double b, double c) {
    // eigenvector of [[a,b],[b,c]] at lambda_max, direction (sin phi, cos phi)
    const double lam = lambda_max(a, b, c);
    if (b == 0.0)
        return (a >= c) ? std::numbers::pi / 2.0 : 0.0;
    double phi = std::atan2(b, lam - a);
    if (phi < 0.0) phi += std::numbers::pi;
    return phi;
}

// Gauss-Kronrod 7-15 nodes on [-1,1] (nonnegative half; odd indices are the
// embedded Gauss points).
constexpr std::array<double, 8> gk_x = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr std::array<double, 8> gk_wk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> gk_wg = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct integrand_sample {
    double primary;       // drives adaptivity
    std::array<double, 3> comp; // accumulated components
};

struct segment {
    double lo, hi;
    std::array<double, 3> val;
    double err;
    std::uint64_t id; // insertion order, for deterministic tie-breaking
};

template <typename F>
segment eval_segment(double lo, double hi, std::uint64_t id, const F& f) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    std::array<double, 3> acc_k{0.0, 0.0, 0.0};
    double prim_k = 0.0, prim_g = 0.0;
    for (int j = 0; j < 8; ++j) {
        const double dx = half * gk_x[j];
        if (j == 7) {
            const integrand_sample c = f(mid);
            prim_k += gk_wk[7] * c.primary;
            prim_g += gk_wg[3] * c.primary;
            for (int q = 0; q < 3; ++q) acc_k[q] += gk_wk[7] * c.comp[q];
        } else {
            const integrand_sample a = f(mid - dx);
            const integrand_sample b = f(mid + dx);
            prim_k += gk_wk[j] * (a.primary + b.primary);
            for (int q = 0; q < 3; ++q) acc_k[q] += gk_wk[j] * (a.comp[q] + b.comp[q]);
            if (j % 2 == 1)
                prim_g += gk_wg[j / 2] * (a.primary + b.primary);
        }
    }
    segment s;
    s.lo = lo;
    s.hi = hi;
    for (int q = 0; q < 3; ++q) s.val[q] = acc_k[q] * half;
    s.err = std::abs((prim_k - prim_g) * half);
    s.id = id;
    return s;
}

struct adaptive_result {
    std::array<double, 3> total{0.0, 0.0, 0.0};
    double achieved_rel = 0.0;
    bool converged = true;
};

template <typename F>
adaptive_result integrate_adaptive(const std::vector<double>& breakpoints,
                                   const F& f, double rel_tol, int max_segments) {
    auto worse = [](const segment& a, const segment& b) {
        if (a.err != b.err) return a.err < b.err;
        return a.id > b.id;
    };
    std::priority_queue<segment, std::vector<segment>, decltype(worse)> heap(worse);
    std::uint64_t next_id = 0;
    double prim_total = 0.0, err_total = 0.0;
    int n_seg = 0;
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        segment s = eval_segment(breakpoints[i], breakpoints[i + 1], next_id++, f);
        prim_total += s.val[0] + s.val[2];
        err_total += s.err;
        heap.push(s);
        ++n_seg;
    }
    const double tiny = std::numeric_limits<double>::min();
    while (err_total > rel_tol * std::max(std::abs(prim_total), tiny)
           && n_seg < max_segments) {
        segment worst = heap.top();
        heap.pop();
        prim_total -= worst.val[0] + worst.val[2];
        err_total -= worst.err;
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) { // interval at double resolution
            heap.push(worst);
            break;
        }
        segment a = eval_segment(worst.lo, mid, next_id++, f);
        segment b = eval_segment(mid, worst.hi, next_id++, f);
        prim_total += a.val[0] + a.val[2] + b.val[0] + b.val[2];
        err_total += a.err + b.err;
        heap.push(a);
        heap.push(b);
        ++n_seg;
    }
    // deterministic final summation: ascending by left endpoint
    std::vector<segment> segs;
    segs.reserve(static_cast<size_t>(n_seg) + 1);
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(),
              [](const segment& a, const segment& b) { return a.lo < b.lo; });
    adaptive_result out;
    double prim = 0.0, err = 0.0;
    for (const segment& s : segs) {
        for (int q = 0; q < 3; ++q) out.total[q] += s.val[q];
        prim += s.val[0] + s.val[2];
        err += s.err;
    }
    out.achieved_rel = err / std::max(std::abs(prim), tiny);
    out.converged = out.achieved_rel <= rel_tol;
    return out;
}

// Filter detunings make the coupled cavity ring at isolated frequencies where
// the response is orders of magnitude narrower than a log-grid segment; those
// frequencies are planted as explicit breakpoints.
std::vector<double> passive_resonances(const derived_rates& r, double phi,
                                       double lo, double hi) {
    const cplx e2 = std::exp(cplx(0.0, 2.0 * phi));
    const cplx u = (1.0 - e2 * r.r_IM * r.r_CM) / (r.r_CM - e2 * r.r_IM);
    const double theta = -std::arg(u) / 2.0;
    std::vector<double> out;
    const int n_max = static_cast<int>(std::ceil(hi * r.tau_s / std::numbers::pi)) + 1;
    for (int n = -n_max; n <= n_max; ++n) {
        const double w = std::abs((theta + n * std::numbers::pi) / r.tau_s);
        for (double d : {-5.0, -0.5, 0.0, 0.5, 5.0}) {
            const double x = w + d;
            if (x > lo * 1.000001 && x < hi * 0.999999) out.push_back(x);
        }
    }
    return out;
}

std::vector<double> build_breakpoints(const derived_rates& rates,
                                      const gain_model& gain, double lo, double hi) {
    std::vector<double> pts;
    const int n_log = 24;
    for (int i = 0; i <= n_log; ++i)
        pts.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n_log));
    if (std::holds_alternative<gain_unity>(gain)) {
        auto res = passive_resonances(rates, 0.0, lo, hi);
        pts.insert(pts.end(), res.begin(), res.end());
    } else if (const auto* d = std::get_if<gain_detuned>(&gain)) {
        auto res = passive_resonances(rates, d->phi, lo, hi);
        pts.insert(pts.end(), res.begin(), res.end());
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> uniq;
    for (double p : pts)
        if (uniq.empty() || p > uniq.back() * (1.0 + 1e-12))
            uniq.push_back(p);
    uniq.front() = lo;
    uniq.back() = hi;
    return uniq;
}

} // namespace

chi_point chi_sq_at(const interferometer_config& cfg, const derived_rates& rates,
                    const gain_model& gain, double omega, double phi_lo,
                    delay_mode mode) {
    if (!(omega >= 0.0))
        throw input_error("chi_sq_at needs omega >= 0");
    const transfer_values tp = transfer_set(cfg, rates, gain, cplx(0.0, omega), mode);
    const transfer_values tm = transfer_set(cfg, rates, gain, cplx(0.0, -omega), mode);
    return {omega, signal_psd_ratio(tp, tm, phi_lo) / noise_psd_ratio(tp, tm), phi_lo};
}

std::pair<double, double> optimal_homodyne_at(const interferometer_config& cfg,
                                              const derived_rates& rates,
                                              const gain_model& gain, double omega,
                                              delay_mode mode) {
    if (!(omega >= 0.0))
        throw input_error("optimal_homodyne_at needs omega >= 0");
    const quad_parts q = chi_parts(cfg, rates, gain, omega, mode);
    return {phi_of_max(q.a, q.b, q.c), lambda_max(q.a, q.b, q.c)};
}

enhancement_integral integral_enhancement(const interferometer_config& cfg,
                                          const derived_rates& rates,
                                          const gain_model& gain,
                                          homodyne_choice homodyne,
                                          frequency_band band, delay_mode mode,
                                          double rel_tol) {
    const double fsr = std::numbers::pi / rates.tau_s;
    if (!(band.lo >= 0.0) || !(band.hi > band.lo) || band.hi > fsr * (1.0 + 1e-9))
        throw input_error("integration band must satisfy 0 <= lo < hi <= pi/tau_s");
    const double w_nb = rates.gamma_s * rates.t_IM * rates.t_IM / 4.0;
    const double eff_lo = std::max(band.lo, 1e-3 * w_nb);

    auto f = [&](double w) -> integrand_sample {
        const quad_parts q = chi_parts(cfg, rates, gain, w, mode);
        integrand_sample s;
        switch (homodyne.mode) {
        case homodyne_choice::kind::per_frequency:
            s.primary = lambda_max(q.a, q.b, q.c);
            s.comp = {s.primary, 0.0, 0.0};
            break;
        case homodyne_choice::kind::fixed: {
            const double sn = std::sin(homodyne.phi), cs = std::cos(homodyne.phi);
            s.primary = q.a * sn * sn + 2.0 * q.b * sn * cs + q.c * cs * cs;
            s.comp = {s.primary, 0.0, 0.0};
            break;
        }
        case homodyne_choice::kind::global_optimal:
            s.primary = q.a + q.c;
            s.comp = {q.a, q.b, q.c};
            break;
        }
        return s;
    };

    const std::vector<double> pts = build_breakpoints(rates, gain, eff_lo, band.hi);
    const adaptive_result r = integrate_adaptive(pts, f, rel_tol, 20000);

    const double plateau_width = eff_lo - band.lo;
    const integrand_sample at_lo = f(eff_lo);

    enhancement_integral out;
    out.band = band;
    out.achieved_rel = r.achieved_rel;
    out.converged = r.converged;
    const double I0 = std::numbers::pi / rates.tau_s;
    if (homodyne.mode == homodyne_choice::kind::global_optimal) {
        const double IA = r.total[0] + at_lo.comp[0] * plateau_width;
        const double IB = r.total[1] + at_lo.comp[1] * plateau_width;
        const double IC = r.total[2] + at_lo.comp[2] * plateau_width;
        out.value = lambda_max(IA, IB, IC);
        out.phi_lo = phi_of_max(IA, IB, IC);
    } else {
        out.value = r.total[0] + at_lo.comp[0] * plateau_width;
        out.phi_lo = homodyne.mode == homodyne_choice::kind::fixed
                         ? homodyne.phi
                         : std::numeric_limits<double>::quiet_NaN();
    }
    out.normalized = out.value / I0;
    return out;
}

double chi_approx(approx_kind kind, const derived_rates& r, double omega) {
    if (!(omega >= 0.0))
        throw input_error("chi_approx needs omega >= 0");
    const double t_im = r.t_IM, t_cm = r.t_CM;
    const double X_nb = 4.0 * std::sqrt(2.0) / (t_im * t_cm);
    const double X_bb = std::sqrt(2.0) * t_im / t_cm;
    const double w_nb = r.gamma_s * t_im * t_im / 4.0;
    const double w_bb = 4.0 * r.gamma_s / (t_im * t_im);
    const double w = omega;
    switch (kind) {
    case approx_kind::nb:
        return X_nb / std::sqrt(1.0 + (w / w_nb) * (w / w_nb));
    case approx_kind::bb:
        return X_bb / std::sqrt(1.0 + (w / w_bb) * (w / w_bb));
    case approx_kind::bb2: {
        const double q = (w / w_bb) * (w / w_bb);
        const double corr = 1.0 + (w * w - 2.0 * w_bb * r.gamma_f) / (r.gamma_f * r.gamma_f);
        return X_bb / std::sqrt(1.0 + q * corr);
    }
    case approx_kind::opt:
        return X_nb / std::sqrt(1.0 + (w / r.gamma_s) * (w / r.gamma_s));
    case approx_kind::opt2: {
        const double q = (w / r.gamma_s) * (w / r.gamma_s);
        return X_nb / std::sqrt(1.0 + q * (1.0 + w * w / (r.gamma_f * r.gamma_f)));
    }
    case approx_kind::pt_infq: {
        const double ts = r.tau_s, tf = r.tau_f;
        const double t_cm4 = std::pow(t_cm, 4);
        const double den = t_cm4 * t_cm4
                         + 48.0 * t_cm4 * t_im * t_im * ts * ts * w * w
                         + 64.0 * std::pow(ts, 4) * std::pow(w, 4)
                               * (std::pow(t_im, 4) + 16.0 * tf * tf * w * w);
        return 8.0 * std::sqrt(2.0) * t_cm * t_im * ts * w / std::sqrt(den);
    }
    }
    throw input_error("unknown approximation kind");
}

double chi_rel(double epsilon, double t_IM, bool* within_validity) {
    if (!(t_IM > 0.0 && t_IM < 1.0))
        throw input_error("chi_rel needs t_IM in (0,1)");
    if (within_validity)
        *within_validity = std::abs(epsilon) <= 0.5;
    const double t2 = t_IM * t_IM;
    const double t4 = t2 * t2;
    if (epsilon < 0.0)
        return t2 / std::sqrt(t4 + 16.0 * epsilon * epsilon
                              - 4.0 * t2 * epsilon * (epsilon + 2.0));
    return t2 / std::sqrt(t4 + 16.0 * epsilon * epsilon
                          + 12.0 * t2 * epsilon * (epsilon + 2.0));
}

pt_bound_pair pt_bounds(const derived_rates& r, double omega) {
    if (!(omega > 0.0))
        throw input_error("pt_bounds needs omega > 0");
    const double hf = std::sqrt(2.0) * (r.t_CM / r.t_IM) / (omega * r.tau_s);
    const double lf = (8.0 * r.t_IM / std::pow(r.t_CM, 3)) * omega * r.tau_s;
    return {hf, lf};
}

} // namespace qnf
