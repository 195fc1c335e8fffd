#include "cpv/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "linalg.hpp"

namespace cpv::tracker {

void ScanConfig::validate() const {
    if (coarse_n < 2) throw ConfigError("scan: coarse_n must be >= 2");
    if (fine_n < coarse_n) throw ConfigError("scan: fine_n must be >= coarse_n");
    if (range_deg <= 0.0) throw ConfigError("scan: range must be positive");
}

std::optional<optics::Pointing> astro_pointing(const env::SunState& sun, double resolution_deg) {
    if (resolution_deg <= 0.0) throw ConfigError("tracker resolution must be positive");
    if (sun.astro_elevation_deg < 0.0) return std::nullopt;  // parked
    return optics::Pointing{quantize_angle(sun.astro_azimuth_deg, resolution_deg),
                            quantize_angle(sun.astro_elevation_deg, resolution_deg)};
}

namespace {

std::vector<double> grid_offsets(int n, double range) {
    std::vector<double> off(n);
    for (int k = 0; k < n; ++k)
        off[k] = -0.5 * range + range * static_cast<double>(k) / static_cast<double>(n - 1);
    return off;
}

// piecewise-bilinear evaluation on the coarse grid; fallback reconstruction
// when a shape fit is not possible
double bilinear(const std::vector<double>& xs, const std::vector<std::vector<double>>& vals,
                double x, double y) {
    auto cell_of = [&](double q) {
        std::size_t c = 0;
        while (c + 2 < xs.size() && q > xs[c + 1]) ++c;
        return c;
    };
    std::size_t i = cell_of(x), j = cell_of(y);
    double tx = (x - xs[i]) / (xs[i + 1] - xs[i]);
    double ty = (y - xs[j]) / (xs[j + 1] - xs[j]);
    tx = std::clamp(tx, 0.0, 1.0);
    ty = std::clamp(ty, 0.0, 1.0);
    return vals[i][j] * (1 - tx) * (1 - ty) + vals[i + 1][j] * tx * (1 - ty) +
           vals[i][j + 1] * (1 - tx) * ty + vals[i + 1][j + 1] * tx * ty;
}

}  // namespace

std::optional<ScanResult> scan_align(
    const optics::Pointing& center, double shape_exponent, const ScanConfig& cfg,
    double resolution_deg, const std::function<double(const optics::Pointing&)>& measure_isc) {
    cfg.validate();
    if (shape_exponent <= 0.0) throw ConfigError("scan: shape exponent must be positive");

    const double cos_el = std::max(std::cos(deg2rad(center.el_deg)), 1e-9);
    const std::vector<double> coarse = grid_offsets(cfg.coarse_n, cfg.range_deg);

    // measure the coarse grid; commanded positions are quantized, and the
    // fit uses the arc offsets actually commanded
    std::vector<std::vector<double>> isc(cfg.coarse_n, std::vector<double>(cfg.coarse_n));
    std::vector<double> arc_az(cfg.coarse_n), arc_el(cfg.coarse_n);
    double max_isc = 0.0;
    for (int i = 0; i < cfg.coarse_n; ++i) {
        for (int j = 0; j < cfg.coarse_n; ++j) {
            optics::Pointing p = optics::arc_shift(center, coarse[i], coarse[j]);
            p.az_deg = quantize_angle(p.az_deg, resolution_deg);
            p.el_deg = quantize_angle(p.el_deg, resolution_deg);
            if (j == 0) arc_az[i] = (p.az_deg - center.az_deg) * cos_el;
            if (i == 0) arc_el[j] = p.el_deg - center.el_deg;
            isc[i][j] = measure_isc(p);
            max_isc = std::max(max_isc, isc[i][j]);
        }
    }
    if (max_isc <= 0.0) return std::nullopt;  // sun fully outside the scan window

    // Map measurements through the inverse plateau: for the modeled
    // transmission T = 0.9^(rho^p), u2 = (ln(I/I_axis)/ln 0.9)^(2/p) is an
    // exact quadratic in the offsets. The on-axis current I_axis is unknown
    // (the best measured node sits off the true peak), so iterate: fit the
    // quadratic, locate its vertex, re-estimate I_axis from the measured
    // maximum's offset to the vertex, refit. Exact in-family data converges
    // in a couple of rounds.
    const double floor_frac = 1e-6;
    const double ln09 = std::log(0.9);
    std::vector<double> xs, ys, vals;
    double max_x = 0.0, max_y = 0.0;
    for (int i = 0; i < cfg.coarse_n; ++i)
        for (int j = 0; j < cfg.coarse_n; ++j) {
            if (isc[i][j] < floor_frac * max_isc) continue;
            xs.push_back(arc_az[i]);
            ys.push_back(arc_el[j]);
            vals.push_back(isc[i][j]);
            if (isc[i][j] == max_isc) {
                max_x = arc_az[i];
                max_y = arc_el[j];
            }
        }

    std::optional<std::vector<double>> fit;
    double scale = max_isc;  // on-axis current estimate
    if (vals.size() >= 6) {
        for (int round = 0; round < 6; ++round) {
            std::vector<double> a, u2;
            for (std::size_t k = 0; k < vals.size(); ++k) {
                double ratio = std::log(vals[k] / scale) / ln09;  // rho^p, >= 0
                a.insert(a.end(),
                         {1.0, xs[k], ys[k], xs[k] * xs[k], xs[k] * ys[k], ys[k] * ys[k]});
                u2.push_back(std::pow(std::max(ratio, 0.0), 2.0 / shape_exponent));
            }
            fit = detail::least_squares(a, u2.size(), 6, u2);
            if (!fit) break;
            const std::vector<double>& c = *fit;
            // vertex of the fitted quadratic
            double det = 4.0 * c[3] * c[5] - c[4] * c[4];
            if (!(c[3] > 0.0 && c[5] > 0.0 && det > 0.0)) break;  // not a bowl
            double vx = (-2.0 * c[5] * c[1] + c[4] * c[2]) / det;
            double vy = (-2.0 * c[3] * c[2] + c[4] * c[1]) / det;
            auto q = [&](double x, double y) {
                return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y;
            };
            double rho2_max_node = q(max_x, max_y) - q(vx, vy);
            if (rho2_max_node < 1e-12) break;  // reference already on axis
            double new_scale =
                max_isc / std::pow(0.9, std::pow(rho2_max_node, shape_exponent / 2.0));
            if (std::abs(new_scale - scale) <= 1e-12 * scale) break;
            scale = new_scale;
        }
    }

    auto reconstruct = [&](double x, double y) {
        if (fit) {
            const std::vector<double>& c = *fit;
            double q = c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y;
            return scale * std::pow(0.9, std::pow(std::max(q, 0.0), shape_exponent / 2.0));
        }
        return bilinear(coarse, isc, x, y);
    };

    // fine-grid argmax, row-major (elevation rows, azimuth within a row),
    // first strict maximum wins
    const std::vector<double> fine = grid_offsets(cfg.fine_n, cfg.range_deg);
    ScanResult best;
    double best_val = -1.0;
    int best_i = 0, best_j = 0;
    for (int j = 0; j < cfg.fine_n; ++j)
        for (int i = 0; i < cfg.fine_n; ++i) {
            double v = reconstruct(fine[i], fine[j]);
            if (v > best_val) {
                best_val = v;
                best_i = i;
                best_j = j;
            }
        }

    best.offset_az_deg = fine[best_i];
    best.offset_el_deg = fine[best_j];
    best.pointing = optics::arc_shift(center, best.offset_az_deg, best.offset_el_deg);
    best.interpolated_isc_a = best_val;
    best.at_boundary = best_i == 0 || best_j == 0 || best_i == cfg.fine_n - 1 ||
                       best_j == cfg.fine_n - 1;
    return best;
}

bool cloudless_check(std::span<const env::WeatherSample> recent, double max_rel_spread,
                     double diffuse_max_wm2) {
    if (recent.empty()) throw ConfigError("cloudless_check: empty window");
    double lo = recent[0].dni_wm2, hi = lo, sum = 0.0;
    for (const auto& w : recent) {
        if (w.diffuse_wm2 > diffuse_max_wm2) return false;
        lo = std::min(lo, w.dni_wm2);
        hi = std::max(hi, w.dni_wm2);
        sum += w.dni_wm2;
    }
    double mean = sum / static_cast<double>(recent.size());
    if (mean <= 0.0) return false;
    return (hi - lo) / mean <= max_rel_spread;
}

bool cloudless_check(const std::vector<env::WeatherSample>& series, std::int64_t time,
                     double window_s, double max_rel_spread, double diffuse_max_wm2) {
    auto last = env::sample_at_or_before(series, time);
    if (!last) return false;
    std::int64_t from = time - static_cast<std::int64_t>(window_s);
    std::size_t begin = *last;
    while (begin > 0 && series[begin - 1].timestamp >= from) --begin;
    if (series[begin].timestamp < from) ++begin;
    if (begin > *last) return false;
    std::span<const env::WeatherSample> window(series.data() + begin, *last - begin + 1);
    return cloudless_check(window, max_rel_spread, diffuse_max_wm2);
}

}  // namespace cpv::tracker

