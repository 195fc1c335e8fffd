#include "cpv/meter.hpp"

#include <algorithm>
#include <cmath>

namespace cpv::meter {

void IVCurve::validate() const {
    if (voltage_v.size() != current_a.size())
        throw DataError("iv curve: voltage/current size mismatch");
    if (voltage_v.size() < 3) throw DataError("iv curve: fewer than 3 points");
    if (voltage_v.front() != 0.0) throw DataError("iv curve: first voltage must be 0");
    for (std::size_t k = 1; k < voltage_v.size(); ++k)
        if (voltage_v[k] <= voltage_v[k - 1])
            throw DataError("iv curve: voltages must be strictly increasing");
}

std::vector<double> sweep_voltages(double voc_v) {
    if (voc_v <= 0.0) throw ConfigError("sweep_voltages: Voc must be positive");
    std::vector<double> v;
    v.reserve(32);
    double v70 = 0.7 * voc_v;
    double v95 = 0.95 * voc_v;
    for (int k = 0; k < 8; ++k) v.push_back(k * (v70 / 8.0));
    for (int k = 0; k < 16; ++k) v.push_back(v70 + k * ((v95 - v70) / 16.0));
    for (int k = 0; k < 8; ++k) v.push_back(v95 + k * ((voc_v - v95) / 7.0));
    v[8] = v70;    // pin the segment anchors exactly
    v[24] = v95;
    v[31] = voc_v;
    return v;
}

IVCurve measure_iv(const cell::OperatingPoint& op, double noise_sigma_a, std::mt19937_64* rng) {
    if (op.iph_a <= 0.0) throw NumericError("measure_iv: dark cell, degenerate curve");
    double voc = cell::solve_voc(op.iph_a, op.diode);

    IVCurve curve;
    curve.voltage_v = sweep_voltages(voc);
    curve.current_a.reserve(curve.voltage_v.size());
    std::normal_distribution<double> noise(0.0, noise_sigma_a);
    for (double v : curve.voltage_v) {
        double i = cell::iv_current(v, op.iph_a, op.diode);
        if (noise_sigma_a > 0.0 && rng) i += noise(*rng);
        curve.current_a.push_back(i);
    }
    return curve;
}

IVSummary summarize(const IVCurve& curve) {
    curve.validate();
    IVSummary s;
    s.isc_a = curve.current_a.front();
    s.voc_v = curve.voltage_v.back();

    std::size_t best = 0;
    double best_p = -1e300;
    std::vector<double> power(curve.voltage_v.size());
    for (std::size_t k = 0; k < curve.voltage_v.size(); ++k) {
        power[k] = curve.voltage_v[k] * curve.current_a[k];
        if (power[k] > best_p) {
            best_p = power[k];
            best = k;
        }
    }

    s.p_max_w = best_p;
    s.v_mp_v = curve.voltage_v[best];
    if (best > 0 && best + 1 < power.size()) {
        // parabola through the best sample and its neighbors, general spacing
        double x0 = curve.voltage_v[best - 1], x1 = curve.voltage_v[best],
               x2 = curve.voltage_v[best + 1];
        double y0 = power[best - 1], y1 = power[best], y2 = power[best + 1];
        double d01 = (y1 - y0) / (x1 - x0);
        double d12 = (y2 - y1) / (x2 - x1);
        double curv = (d12 - d01) / (x2 - x0);  // leading Newton-form coefficient
        if (curv < 0.0) {
            double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
            vertex = std::clamp(vertex, x0, x2);
            double val = y0 + d01 * (vertex - x0) + curv * (vertex - x0) * (vertex - x1);
            if (val >= best_p) {
                s.p_max_w = val;
                s.v_mp_v = vertex;
            }
        }
    }
    s.i_mp_a = s.v_mp_v > 0.0 ? s.p_max_w / s.v_mp_v : 0.0;
    s.ff = s.p_max_w / (s.isc_a * s.voc_v);
    return s;
}

}  // namespace cpv::meter
