#include "cpv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "linalg.hpp"

namespace cpv::analysis {

namespace {

// centered-window relative DNI spread around `time`
double dni_window_spread(const std::vector<env::WeatherSample>& weather, std::int64_t time,
                         double window_s) {
    std::int64_t half = static_cast<std::int64_t>(window_s / 2.0);
    auto lo_it = std::lower_bound(weather.begin(), weather.end(), time - half,
                                  [](const env::WeatherSample& w, std::int64_t t) {
                                      return w.timestamp < t;
                                  });
    double lo = 0.0, hi = 0.0, sum = 0.0;
    std::size_t n = 0;
    for (auto it = lo_it; it != weather.end() && it->timestamp <= time + half; ++it) {
        if (n == 0) lo = hi = it->dni_wm2;
        lo = std::min(lo, it->dni_wm2);
        hi = std::max(hi, it->dni_wm2);
        sum += it->dni_wm2;
        ++n;
    }
    if (n == 0 || sum <= 0.0) return 1e9;
    return (hi - lo) / (sum / static_cast<double>(n));
}

}  // namespace

FilterResult filter_samples(const std::vector<campaign::MeasurementRecord>& records,
                            const std::vector<env::WeatherSample>& weather,
                            const FilterConfig& cfg) {
    if (weather.empty()) throw DataError("filter: empty weather series");
    FilterResult out;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const campaign::MeasurementRecord& r = records[k];
        if (r.timestamp < weather.front().timestamp || r.timestamp > weather.back().timestamp)
            throw DataError("filter: record at " + format_iso8601_utc(r.timestamp) +
                            " outside weather coverage");

        const char* rule = nullptr;
        if (r.weather.t_ambient_c < cfg.t_min_c || r.weather.t_ambient_c > cfg.t_max_c)
            rule = kRuleTemperature;
        else if (!(r.weather.dni_wm2 > cfg.dni_min_wm2))
            rule = kRuleDniMin;
        else if (r.weather.diffuse_wm2 > cfg.diffuse_max_wm2)
            rule = kRuleDiffuse;
        else if (dni_window_spread(weather, r.timestamp, cfg.stability_window_s) >
                 cfg.stability_max_rel_spread)
            rule = kRuleDniStability;

        if (rule)
            out.rejected.push_back({k, rule});
        else
            out.kept.push_back(r);
    }
    return out;
}

namespace {

struct FitOutput {
    std::vector<double> coeffs;
    bool ta_term = true;
    double residual_rms = 0.0;
};

// y = DNI*(c1 + c2*DNI + c3*Ta); drops the Ta term when rank deficient
FitOutput fit_astm(const std::vector<campaign::MeasurementRecord>& recs,
                   const std::vector<double>& y) {
    std::size_t n = recs.size();
    std::vector<double> a;
    a.reserve(n * 3);
    for (const auto& r : recs) {
        double dni = r.weather.dni_wm2;
        a.insert(a.end(), {dni, dni * dni, dni * r.weather.t_ambient_c});
    }
    FitOutput out;
    auto full = detail::least_squares(a, n, 3, y);
    if (full) {
        out.coeffs = *full;
    } else {
        std::vector<double> a2;
        a2.reserve(n * 2);
        for (const auto& r : recs) {
            double dni = r.weather.dni_wm2;
            a2.insert(a2.end(), {dni, dni * dni});
        }
        auto reduced = detail::least_squares(a2, n, 2, y);
        if (!reduced) throw NumericError("rating regression: rank-deficient design");
        out.coeffs = *reduced;
        out.ta_term = false;
    }
    double ss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double dni = recs[k].weather.dni_wm2;
        double fit = out.coeffs[0] * dni + out.coeffs[1] * dni * dni;
        if (out.ta_term) fit += out.coeffs[2] * dni * recs[k].weather.t_ambient_c;
        ss += (y[k] - fit) * (y[k] - fit);
    }
    out.residual_rms = std::sqrt(ss / static_cast<double>(n));
    return out;
}

FitOutput fit_linear(const std::vector<campaign::MeasurementRecord>& recs,
                     const std::vector<double>& y) {
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < recs.size(); ++k) {
        double dni = recs[k].weather.dni_wm2;
        sxx += dni * dni;
        sxy += dni * y[k];
    }
    if (sxx <= 0.0) throw NumericError("rating regression: zero DNI column");
    FitOutput out;
    out.coeffs = {sxy / sxx};
    out.ta_term = false;
    double ss = 0.0;
    for (std::size_t k = 0; k < recs.size(); ++k) {
        double fit = out.coeffs[0] * recs[k].weather.dni_wm2;
        ss += (y[k] - fit) * (y[k] - fit);
    }
    out.residual_rms = std::sqrt(ss / static_cast<double>(recs.size()));
    return out;
}

double evaluate_fit(const FitOutput& f, double dni, double ta) {
    double v = f.coeffs[0] * dni;
    if (f.coeffs.size() > 1) v += f.coeffs[1] * dni * dni;
    if (f.ta_term && f.coeffs.size() > 2) v += f.coeffs[2] * dni * ta;
    return v;
}

}  // namespace

CsocRating regress_csoc(const std::vector<campaign::MeasurementRecord>& filtered,
                        double lens_aperture_cm2, const RatingOptions& opt) {
    if (filtered.size() < opt.min_samples)
        throw DataError("insufficient filtered data (n = " + std::to_string(filtered.size()) +
                        ", need " + std::to_string(opt.min_samples) + ")");
    double dni_lo = filtered.front().weather.dni_wm2, dni_hi = dni_lo;
    for (const auto& r : filtered) {
        dni_lo = std::min(dni_lo, r.weather.dni_wm2);
        dni_hi = std::max(dni_hi, r.weather.dni_wm2);
    }
    if (dni_hi - dni_lo < opt.min_dni_span_wm2)
        throw DataError("DNI span too narrow for regression (" +
                        std::to_string(dni_hi - dni_lo) + " W/m^2)");

    std::vector<double> isc(filtered.size()), pmax(filtered.size());
    double voc_sum = 0.0;
    for (std::size_t k = 0; k < filtered.size(); ++k) {
        isc[k] = filtered[k].summary.isc_a;
        pmax[k] = filtered[k].summary.p_max_w;
        voc_sum += filtered[k].summary.voc_v;
    }

    FitOutput isc_fit, pmax_fit;
    if (opt.mode == RegressionMode::Astm) {
        isc_fit = fit_astm(filtered, isc);
        pmax_fit = fit_astm(filtered, pmax);
    } else {
        isc_fit = fit_linear(filtered, isc);
        pmax_fit = fit_linear(filtered, pmax);
    }

    CsocRating rating;
    rating.submodule_id = filtered.front().submodule_id;
    rating.n_samples = filtered.size();
    rating.isc_coeffs = isc_fit.coeffs;
    rating.pmax_coeffs = pmax_fit.coeffs;
    rating.ta_term_used = isc_fit.ta_term && pmax_fit.ta_term;
    rating.isc_residual_rms_a = isc_fit.residual_rms;
    rating.pmax_residual_rms_w = pmax_fit.residual_rms;
    rating.isc_csoc_a = evaluate_fit(isc_fit, opt.csoc_dni_wm2, opt.csoc_t_ambient_c);
    rating.pmax_csoc_w = evaluate_fit(pmax_fit, opt.csoc_dni_wm2, opt.csoc_t_ambient_c);
    rating.voc_mean_v = voc_sum / static_cast<double>(filtered.size());
    rating.ff_csoc = rating.pmax_csoc_w / (rating.isc_csoc_a * rating.voc_mean_v);
    rating.efficiency_csoc = efficiency(rating.pmax_csoc_w, opt.csoc_dni_wm2, lens_aperture_cm2);
    return rating;
}

double effective_concentration(double isc_900_a, double jsc_eqe_ma_per_cm2, double area_cm2) {
    if (isc_900_a <= 0.0 || jsc_eqe_ma_per_cm2 <= 0.0 || area_cm2 <= 0.0)
        throw ConfigError("effective_concentration: all inputs must be > 0");
    return isc_900_a / (jsc_eqe_ma_per_cm2 * 1e-3 * area_cm2);
}

double ctm(double c_eff, double c_geo) {
    if (c_geo <= 0.0) throw ConfigError("ctm: geometric concentration must be > 0");
    return c_eff / c_geo;
}

double efficiency(double pmax_w, double dni_wm2, double aperture_cm2) {
    if (dni_wm2 <= 0.0 || aperture_cm2 <= 0.0)
        throw ConfigError("efficiency: DNI and aperture must be > 0");
    return pmax_w / (dni_wm2 * aperture_cm2 * 1e-4);
}

LinearFit ff_slope(const std::vector<campaign::MeasurementRecord>& filtered,
                   std::size_t min_samples, double min_dni_span_wm2) {
    if (filtered.size() < std::max<std::size_t>(min_samples, 2))
        throw DataError("ff_slope: insufficient data (n = " + std::to_string(filtered.size()) +
                        ")");
    double dni_lo = filtered.front().weather.dni_wm2, dni_hi = dni_lo;
    double sx = 0.0, sy = 0.0;
    for (const auto& r : filtered) {
        dni_lo = std::min(dni_lo, r.weather.dni_wm2);
        dni_hi = std::max(dni_hi, r.weather.dni_wm2);
        sx += r.weather.dni_wm2;
        sy += r.summary.ff;
    }
    if (dni_hi - dni_lo < min_dni_span_wm2)
        throw DataError("ff_slope: degenerate DNI span");
    double n = static_cast<double>(filtered.size());
    double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& r : filtered) {
        sxx += (r.weather.dni_wm2 - mx) * (r.weather.dni_wm2 - mx);
        sxy += (r.weather.dni_wm2 - mx) * (r.summary.ff - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.n = filtered.size();
    return fit;
}

// --- acceptance maps ---------------------------------------------------------

namespace {

std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > 1e-9) out.push_back(x);
    return out;
}

std::size_t index_of(const std::vector<double>& axis, double x) {
    auto it = std::lower_bound(axis.begin(), axis.end(), x - 1e-9);
    return static_cast<std::size_t>(std::distance(axis.begin(), it));
}

struct Pt {
    double x, y;
};

double cross(const Pt& o, const Pt& a, const Pt& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain, returns hull in counterclockwise order
std::vector<Pt> convex_hull(std::vector<Pt> pts) {
    std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Pt& a, const Pt& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Pt> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

bool inside_hull(const std::vector<Pt>& hull, double x, double y) {
    if (hull.size() < 3) return false;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Pt& a = hull[i];
        const Pt& b = hull[(i + 1) % hull.size()];
        if (cross(a, b, {x, y}) < -1e-9) return false;
    }
    return true;
}

}  // namespace

AcceptanceMap build_map(const std::vector<campaign::AcceptanceSample>& samples) {
    if (samples.empty()) throw DataError("build_map: no samples");

    std::vector<double> az, el;
    for (const auto& s : samples) {
        az.push_back(s.daz_deg);
        el.push_back(s.del_deg);
    }
    AcceptanceMap map;
    map.az_deg = unique_sorted(az);
    map.el_deg = unique_sorted(el);
    if (samples.size() < 4 || map.az_deg.size() < 2 || map.el_deg.size() < 2)
        throw DataError("build_map: need at least 4 non-collinear samples");

    std::size_t na = map.az_deg.size(), ne = map.el_deg.size();
    map.value.assign(na, std::vector<double>(ne, 0.0));
    map.defined.assign(na, std::vector<bool>(ne, false));
    std::vector<std::vector<bool>> measured(na, std::vector<bool>(ne, false));

    std::vector<Pt> pts;
    for (const auto& s : samples) {
        std::size_t i = index_of(map.az_deg, s.daz_deg);
        std::size_t j = index_of(map.el_deg, s.del_deg);
        map.value[i][j] = s.isc_over_dni;
        map.defined[i][j] = measured[i][j] = true;
        pts.push_back({s.daz_deg, s.del_deg});
    }

    // fill interior holes: iterative average of defined 4-neighbors, only
    // inside the convex hull of the measured nodes (no extrapolation)
    std::vector<Pt> hull = convex_hull(pts);
    bool changed = true;
    int rounds = 0;
    while (changed && rounds++ < 1000) {
        changed = false;
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t j = 0; j < ne; ++j) {
                if (measured[i][j]) continue;
                if (!inside_hull(hull, map.az_deg[i], map.el_deg[j])) continue;
                double sum = 0.0;
                int n = 0;
                auto grab = [&](std::size_t a, std::size_t b) {
                    if (map.defined[a][b]) {
                        sum += map.value[a][b];
                        ++n;
                    }
                };
                if (i > 0) grab(i - 1, j);
                if (i + 1 < na) grab(i + 1, j);
                if (j > 0) grab(i, j - 1);
                if (j + 1 < ne) grab(i, j + 1);
                if (n < 2) continue;
                double v = sum / n;
                if (!map.defined[i][j] || std::abs(v - map.value[i][j]) > 1e-13) {
                    map.value[i][j] = v;
                    map.defined[i][j] = true;
                    changed = true;
                }
            }
    }

    map.max_value = -1e300;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < ne; ++j)
            if (map.defined[i][j] && map.value[i][j] > map.max_value) {
                map.max_value = map.value[i][j];
                map.max_i = i;
                map.max_j = j;
            }
    if (map.max_value <= 0.0) throw DataError("build_map: no usable signal on the frame");
    return map;
}

namespace {

// segment of the level set inside one cell
struct Seg {
    Pt a, b;
};

double lerp_cross(double x0, double x1, double v0, double v1, double level) {
    return x0 + (level - v0) / (v1 - v0) * (x1 - x0);
}

}  // namespace

std::vector<ContourPoint> contour90(const AcceptanceMap& map) {
    const double level = 0.9 * map.max_value;
    std::size_t na = map.az_deg.size(), ne = map.el_deg.size();

    std::vector<Seg> segs;
    for (std::size_t i = 0; i + 1 < na; ++i) {
        for (std::size_t j = 0; j + 1 < ne; ++j) {
            if (!map.defined[i][j] || !map.defined[i + 1][j] || !map.defined[i][j + 1] ||
                !map.defined[i + 1][j + 1])
                continue;
            double x0 = map.az_deg[i], x1 = map.az_deg[i + 1];
            double y0 = map.el_deg[j], y1 = map.el_deg[j + 1];
            double v00 = map.value[i][j], v10 = map.value[i + 1][j];
            double v01 = map.value[i][j + 1], v11 = map.value[i + 1][j + 1];
            int idx = (v00 >= level ? 1 : 0) | (v10 >= level ? 2 : 0) | (v11 >= level ? 4 : 0) |
                      (v01 >= level ? 8 : 0);
            if (idx == 0 || idx == 15) continue;

            Pt bottom{lerp_cross(x0, x1, v00, v10, level), y0};
            Pt top{lerp_cross(x0, x1, v01, v11, level), y1};
            Pt left{x0, lerp_cross(y0, y1, v00, v01, level)};
            Pt right{x1, lerp_cross(y0, y1, v10, v11, level)};

            auto add = [&](Pt a, Pt b) { segs.push_back({a, b}); };
            switch (idx) {
                case 1: add(left, bottom); break;
                case 2: add(bottom, right); break;
                case 3: add(left, right); break;
                case 4: add(right, top); break;
                case 5: {  // saddle: split by cell-center value
                    double c = 0.25 * (v00 + v10 + v01 + v11);
                    if (c >= level) {
                        add(left, top);
                        add(right, bottom);
                    } else {
                        add(left, bottom);
                        add(right, top);
                    }
                    break;
                }
                case 6: add(bottom, top); break;
                case 7: add(left, top); break;
                case 8: add(top, left); break;
                case 9: add(top, bottom); break;
                case 10: {
                    double c = 0.25 * (v00 + v10 + v01 + v11);
                    if (c >= level) {
                        add(top, right);
                        add(bottom, left);
                    } else {
                        add(top, left);
                        add(bottom, right);
                    }
                    break;
                }
                case 11: add(top, right); break;
                case 12: add(right, left); break;
                case 13: add(right, bottom); break;
                case 14: add(bottom, left); break;
                default: break;
            }
        }
    }
    if (segs.empty())
        throw DataError("contour90: 90% level never crossed inside the frame "
                        "(contour exceeds frame)");

    // chain segments into loops
    auto close_enough = [](const Pt& a, const Pt& b) {
        return std::abs(a.x - b.x) < 1e-9 && std::abs(a.y - b.y) < 1e-9;
    };
    std::vector<std::vector<Pt>> loops;
    std::vector<bool> used(segs.size(), false);
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        std::vector<Pt> loop{segs[s].a, segs[s].b};
        used[s] = true;
        bool closed = false;
        bool extended = true;
        while (extended && !closed) {
            extended = false;
            for (std::size_t t = 0; t < segs.size(); ++t) {
                if (used[t]) continue;
                if (close_enough(loop.back(), segs[t].a)) {
                    loop.push_back(segs[t].b);
                    used[t] = true;
                    extended = true;
                } else if (close_enough(loop.back(), segs[t].b)) {
                    loop.push_back(segs[t].a);
                    used[t] = true;
                    extended = true;
                }
                if (extended) break;
            }
            if (close_enough(loop.front(), loop.back())) closed = true;
        }
        if (closed && loop.size() > 3) {
            loop.pop_back();
            loops.push_back(loop);
        }
    }
    if (loops.empty())
        throw DataError("contour90: contour is not closed inside the frame "
                        "(contour exceeds frame)");

    // keep the loop enclosing the maximum node
    double mx = map.az_deg[map.max_i], my = map.el_deg[map.max_j];
    const std::vector<Pt>* chosen = nullptr;
    for (const auto& loop : loops) {
        int winds = 0;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Pt& a = loop[i];
            const Pt& b = loop[(i + 1) % loop.size()];
            if ((a.y <= my) != (b.y <= my)) {
                double xc = a.x + (my - a.y) / (b.y - a.y) * (b.x - a.x);
                if (xc > mx) winds ^= 1;
            }
        }
        if (winds) {
            chosen = &loop;
            break;
        }
    }
    if (!chosen)
        throw DataError("contour90: no closed 90% contour encloses the map maximum");

    std::vector<Pt> poly = *chosen;
    double area2 = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Pt& a = poly[i];
        const Pt& b = poly[(i + 1) % poly.size()];
        area2 += a.x * b.y - b.x * a.y;
    }
    if (area2 < 0.0) std::reverse(poly.begin(), poly.end());

    std::vector<ContourPoint> out;
    out.reserve(poly.size());
    for (const Pt& p : poly) out.push_back({p.x, p.y});
    return out;
}

std::vector<ProjectedSample> project_map(const AcceptanceMap& map) {
    std::vector<ProjectedSample> out;
    double cx = map.az_deg[map.max_i], cy = map.el_deg[map.max_j];
    for (std::size_t i = 0; i < map.az_deg.size(); ++i)
        for (std::size_t j = 0; j < map.el_deg.size(); ++j)
            if (map.defined[i][j])
                out.push_back({std::hypot(map.az_deg[i] - cx, map.el_deg[j] - cy),
                               map.value[i][j]});
    return out;
}

AcceptanceResult acceptance_angle(const std::vector<ProjectedSample>& samples) {
    if (samples.empty()) throw DataError("acceptance_angle: no samples");
    double max_v = 0.0;
    for (const auto& s : samples) max_v = std::max(max_v, s.value);
    if (max_v <= 0.0) throw DataError("acceptance_angle: no signal in samples");

    bool below = false, above = false;
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples) {
        double norm = s.value / max_v;
        if (norm < 0.89) below = true;
        if (norm > 0.91) above = true;
        if (norm >= 0.89 && norm <= 0.91) {
            sum += s.deviation_deg;
            sum2 += s.deviation_deg * s.deviation_deg;
            ++n;
        }
    }
    if (n == 0 || !below || !above)
        throw DataError("acceptance_angle: no 90% crossing sampled "
                        "(sample the frame more densely)");

    AcceptanceResult res;
    res.samples_used = n;
    res.angle_deg = sum / static_cast<double>(n);
    if (n > 1) {
        double var = (sum2 - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1);
        res.spread_deg = std::sqrt(std::max(var, 0.0));
    }
    return res;
}

}  // namespace cpv::analysis
