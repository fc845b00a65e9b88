#pragma once

#include "grnbounds/bounds.hpp"
#include "grnbounds/model.hpp"

namespace grnbounds::sample {

// Three-gene network with mixed activation and repression, T = 6, t = 3.
inline GeneNetwork mixed_network() {
    return GeneNetwork(Matrix{{2.5, -0.2, -0.25}, {-0.03, 3.0, -0.3}, {-0.5, -0.1, 2.0}}, {0.5, 0.75, 1.0},
                       {0.2, 0.5, 0.6});
}
inline GaussianFinalData mixed_final_data() { return GaussianFinalData({5, 0.5, 0.3}, {150, 70, 80}); }
inline TimeWindow mixed_window() { return TimeWindow(6.0, 3.0); }

// Same rates with A = 0: every gene decouples and has a closed form.
inline GeneNetwork decoupled_network() { return GeneNetwork(Matrix(3, 3), {0.5, 0.75, 1.0}, {0.2, 0.5, 0.6}); }

// Gene 1 repressed by two self-activating genes, T = 4, t = 2.
inline GeneNetwork repressed_network() {
    return GeneNetwork(Matrix{{0.1, -2, -2}, {0, 0.04, 0}, {0, 0, 0.6}}, {0.4, 0.1, 0.3}, {1, 1, 1});
}
inline GaussianFinalData repressed_final_data() { return GaussianFinalData({4.89, 0.47, 0.51}, {75.98, 7.84, 8.85}); }
inline TimeWindow repressed_window() { return TimeWindow(4.0, 2.0); }

}  // namespace grnbounds::sample
