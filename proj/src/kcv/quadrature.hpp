#pragma once

#include <functional>

namespace kcv {

struct QuadResult {
    double value{0.0};
    double error_estimate{0.0};
    long evaluations{0};
};

// Composite adaptive Simpson on [a, b] with an absolute tolerance.
// The initial partition uses panels no wider than max_panel; each panel is
// then halved recursively until its Richardson estimate |S2-S1|/15 fits the
// width-proportional share of the tolerance (with a safety factor, since the
// integrands here are not always C^4 at the endpoints).
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            double abs_tol, double max_panel, int max_depth = 55);

} // namespace kcv
