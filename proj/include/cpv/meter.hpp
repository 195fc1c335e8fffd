#pragma once

#include <random>
#include <vector>

#include "cpv/cell.hpp"

namespace cpv::meter {

/// One swept I-V characteristic. Voltages are strictly increasing, starting
/// at 0 and ending at the measured open-circuit voltage.
struct IVCurve {
    std::vector<double> voltage_v;
    std::vector<double> current_a;

    void validate() const;
};

struct IVSummary {
    double isc_a = 0.0;
    double voc_v = 0.0;
    double p_max_w = 0.0;
    double v_mp_v = 0.0;
    double i_mp_a = 0.0;
    double ff = 0.0;
};

/// The 32-point segmented sweep: 8 points linearly from 0 to 70% of Voc,
/// 16 from 70% to 95%, 8 from 95% to Voc. The first two segments exclude
/// their upper boundary; the last includes both ends, so indices 0, 8, 24
/// and 31 land exactly on 0, 0.7*Voc, 0.95*Voc and Voc.
std::vector<double> sweep_voltages(double voc_v);

/// Measure Voc first (root of I(V) = 0), then sweep. Optional additive
/// gaussian current noise; with sigma == 0 the RNG is never touched and the
/// result is fully deterministic.
IVCurve measure_iv(const cell::OperatingPoint& op, double noise_sigma_a = 0.0,
                   std::mt19937_64* rng = nullptr);

/// Extract Isc, Voc, Pmax, Vmp, Imp and FF from a sweep. The maximum power
/// is refined with a parabola through the best sample and its neighbors
/// (endpoint maxima are reported as sampled).
IVSummary summarize(const IVCurve& curve);

}  // namespace cpv::meter
