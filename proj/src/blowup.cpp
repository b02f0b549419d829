#include "foldlab/blowup.hpp"

#include <cmath>

namespace foldlab {

namespace {

bool is_sphere(ChartId id) { return id == ChartId::sph_r1 || id == ChartId::sph_eps2; }

[[noreturn]] void wrong_family(const char* op) {
    throw DomainError(std::string(op) + ": wrong chart family");
}

}  // namespace

std::string chart_name(ChartId id) {
    switch (id) {
        case ChartId::cyl_y1: return "cyl_y1";
        case ChartId::cyl_eps2: return "cyl_eps2";
        case ChartId::cyl_ym3: return "cyl_ym3";
        case ChartId::sph_r1: return "sph_r1";
        case ChartId::sph_eps2: return "sph_eps2";
    }
    return "unknown";
}

void ChartPoint::validate() const {
    if (!std::isfinite(coords[0]) || !std::isfinite(coords[1]) ||
        !std::isfinite(coords[2])) {
        throw DomainError("chart point: non-finite coordinate");
    }
    if (coords[0] < 0.0) {
        throw DomainError("chart point: radial coordinate must be >= 0");
    }
    if (is_sphere(id)) {
        if (k < 1) throw DomainError("sphere chart point: k must be >= 1");
        if (id == ChartId::sph_eps2 && coords[1] < 0.0) {
            throw DomainError("sph_eps2: r2 must be >= 0");
        }
    } else if (k != 0) {
        throw DomainError("cylinder chart point: k must be 0");
    }
}

ChartPoint make_cyl(ChartId id, double radial, double angular) {
    if (is_sphere(id)) wrong_family("make_cyl");
    ChartPoint p;
    p.id = id;
    p.coords = {radial, angular, 0.0};
    p.validate();
    return p;
}

ChartPoint make_sph(ChartId id, double c0, double c1, double c2, int k) {
    if (!is_sphere(id)) wrong_family("make_sph");
    ChartPoint p;
    p.id = id;
    p.coords = {c0, c1, c2};
    p.k = k;
    p.validate();
    return p;
}

std::pair<double, double> cyl_to_cartesian(const ChartPoint& p) {
    p.validate();
    switch (p.id) {
        case ChartId::cyl_y1: return {p.coords[0], p.coords[0] * p.coords[1]};
        case ChartId::cyl_eps2: return {p.coords[0] * p.coords[1], p.coords[0]};
        case ChartId::cyl_ym3: return {-p.coords[0], p.coords[0] * p.coords[1]};
        default: wrong_family("cyl_to_cartesian");
    }
}

ChartPoint cyl_chart_change(const ChartPoint& p, ChartId target) {
    p.validate();
    if (is_sphere(p.id) || is_sphere(target)) wrong_family("cyl_chart_change");
    if (p.id == target) return p;
    const auto [y, eps] = cyl_to_cartesian(p);
    switch (target) {
        case ChartId::cyl_y1: {
            // needs y > 0: r1 = y, eps1 = eps / y
            if (!(y > 0.0)) throw DomainError("cyl chart change: target cyl_y1 needs y > 0");
            return make_cyl(target, y, eps / y);
        }
        case ChartId::cyl_eps2: {
            // needs eps > 0: r2 = eps, y2 = y / eps
            if (!(eps > 0.0)) {
                throw DomainError("cyl chart change: target cyl_eps2 needs eps > 0");
            }
            return make_cyl(target, eps, y / eps);
        }
        case ChartId::cyl_ym3: {
            if (!(y < 0.0)) {
                throw DomainError("cyl chart change: target cyl_ym3 needs y < 0");
            }
            return make_cyl(target, -y, eps / (-y));
        }
        default: wrong_family("cyl_chart_change");
    }
}

ChartPoint sphere_from_cartesian(double x, double y, double eps, int k) {
    if (k < 1) throw DomainError("sphere_from_cartesian: k must be >= 1");
    if (y < 0.0) throw DomainError("sphere_from_cartesian: chart covers y >= 0");
    if (y == 0.0) {
        // chart boundary: only the blowup origin has a finite preimage
        if (x != 0.0 || eps != 0.0) {
            throw DomainError("sphere_from_cartesian: y = 0 with x or eps nonzero");
        }
        return make_sph(ChartId::sph_r1, 0.0, 0.0, 0.0, k);
    }
    const double rho1 = std::pow(y, 1.0 / (2.0 * k));
    const double x1 = x / std::sqrt(y);
    const double eps1 = eps * std::pow(y, -(2.0 * k + 1.0) / (2.0 * k));
    return make_sph(ChartId::sph_r1, rho1, x1, eps1, k);
}

std::array<double, 3> sphere_to_cartesian(const ChartPoint& p) {
    p.validate();
    const double kk = p.k;
    if (p.id == ChartId::sph_r1) {
        const double rho1 = p.coords[0], x1 = p.coords[1], eps1 = p.coords[2];
        return {std::pow(rho1, kk) * x1, std::pow(rho1, 2.0 * kk),
                std::pow(rho1, 2.0 * kk + 1.0) * eps1};
    }
    if (p.id == ChartId::sph_eps2) {
        const double rho2 = p.coords[0], r2 = p.coords[1], x2 = p.coords[2];
        return {std::pow(rho2, kk) * x2, std::pow(rho2, 2.0 * kk) * r2,
                std::pow(rho2, 2.0 * kk + 1.0) * r2};
    }
    wrong_family("sphere_to_cartesian");
}

ChartPoint sphere_chart_change(const ChartPoint& p, ChartId target) {
    p.validate();
    if (!is_sphere(p.id) || !is_sphere(target)) wrong_family("sphere_chart_change");
    if (p.id == target) return p;
    const double kk = p.k;
    if (p.id == ChartId::sph_r1) {
        const double rho1 = p.coords[0], x1 = p.coords[1], eps1 = p.coords[2];
        if (!(eps1 > 0.0)) {
            throw DomainError("sphere chart change: needs eps1 > 0 for chart 2");
        }
        return make_sph(ChartId::sph_eps2, rho1 * eps1, std::pow(eps1, -2.0 * kk),
                        std::pow(eps1, -kk) * x1, p.k);
    }
    const double rho2 = p.coords[0], r2 = p.coords[1], x2 = p.coords[2];
    if (!(r2 > 0.0)) throw DomainError("sphere chart change: needs r2 > 0 for chart 1");
    const double eps1 = std::pow(r2, -1.0 / (2.0 * kk));
    return make_sph(ChartId::sph_r1, rho2 / eps1, x2 / std::sqrt(r2), eps1, p.k);
}

double sphere_conservation(const ChartPoint& p) {
    p.validate();
    if (!is_sphere(p.id)) wrong_family("sphere_conservation");
    return std::pow(p.coords[0], 2.0 * p.k + 1.0) * p.coords[p.id == ChartId::sph_r1 ? 2 : 1];
}

// ---------------------------------------------------------------------------
// Q-map region report
// ---------------------------------------------------------------------------

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

}  // namespace

std::vector<RegionStats> q_region_report(const PwsModel& model, const RegFnDescriptor& fn,
                                         const std::vector<double>& eps_list,
                                         const SectionPair& sections, double chi,
                                         double theta, int n_per_region, int jobs) {
    sections.validate();
    if (!sections.local_geometry) {
        throw ConfigError("q_region_report needs local (fold) section geometry");
    }
    if (n_per_region < 3) throw ConfigError("q_region_report: need >= 3 points per region");
    const double p_exp = scaling_exponent(fn.decay);
    const double gl = sections.gamma_l;

    std::vector<RegionStats> out;
    out.reserve(eps_list.size());
    for (double eps : eps_list) {
        if (!(eps > 0.0)) throw DomainError("q_region_report: eps must be > 0");
        RegionStats st;
        st.eps = eps;
        st.p_exp = p_exp;
        const double w = std::pow(eps, p_exp);
        st.i_lo = gl - theta;
        st.i_hi = gl - theta / 3.0;
        st.ii_lo = gl - (chi / 6.0) * w;
        st.ii_hi = gl + chi * w;
        st.iii_lo = gl + 1.25 * chi * w;
        st.iii_hi = gl + std::abs(gl) / 10.0;
        st.iii_valid = st.iii_lo < st.iii_hi;

        st.samples_i = sweep_q_grid(model, fn, eps, sections,
                                    linspace(st.i_lo, st.i_hi, n_per_region), 0.0,
                                    false, jobs);
        st.samples_ii = sweep_q_grid(model, fn, eps, sections,
                                     linspace(st.ii_lo, st.ii_hi, n_per_region), 0.0,
                                     true, jobs);
        if (st.iii_valid) {
            st.samples_iii = sweep_q_grid(model, fn, eps, sections,
                                          linspace(st.iii_lo, st.iii_hi, n_per_region),
                                          0.0, false, jobs);
        }

        for (const GridSample& s : st.samples_i) {
            if (s.ok) st.max_abs_d1_i = std::max(st.max_abs_d1_i, std::abs(s.sample.d1));
        }

        int crossings = 0;
        const GridSample* prev = nullptr;
        for (const GridSample& s : st.samples_ii) {
            if (!s.ok) continue;
            ++st.n_ok_ii;
            if (s.sample.d1 < 0.0) ++st.n_d1_neg;
            if (s.sample.d2 && *s.sample.d2 < 0.0) ++st.n_d2_neg;
            if (prev) {
                const double f0 = prev->sample.d1 + 0.5;
                const double f1 = s.sample.d1 + 0.5;
                if (f0 == 0.0 || f0 * f1 < 0.0) {
                    ++crossings;
                    st.x_half_crossing = prev->x - f0 * (s.x - prev->x) / (f1 - f0);
                }
            }
            prev = &s;
        }
        st.unique_half_crossing = (crossings == 1);

        for (const GridSample& s : st.samples_iii) {
            if (s.ok) {
                st.max_dev_iii =
                    std::max(st.max_dev_iii, std::abs(std::abs(s.sample.d1) - 1.0));
            }
        }
        out.push_back(std::move(st));
    }
    return out;
}

}  // namespace foldlab
