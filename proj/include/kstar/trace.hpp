#pragma once

#include <vector>

#include "kstar/kahler.hpp"
#include "kstar/polynomial.hpp"
#include "kstar/star.hpp"

namespace kstar {

// poly(z, zbar) * exp(-1 / (1 - |z - c|^2 / R^2)) inside the disc, 0 outside.
struct BumpFunction {
    Polynomial poly;
    CDouble center{0.0, 0.0};
    double radius = 1.0;

    bool inside(CDouble z) const { return std::norm(z - center) < radius * radius; }
    // Jet in the displacement at z to total degree `cutoff`; zero jet outside.
    JetScalarD jet_at(CDouble z, int cutoff) const;
};

// Polar product rule on the bump disc: `panels` Gauss-Legendre panels in r
// (20 nodes each), trapezoid with `angles` nodes in theta.  The check runs
// the rule and its doubling; the difference is the error estimate.
struct QuadratureSpec {
    int panels = 4;
    int angles = 16;
};

enum class TraceKind { Tau, Tr };

struct TraceDefect {
    int k = 0;
    TraceKind kind = TraceKind::Tau;
    double integral = 0;  // |sum w g| on the refined rule
    double scale = 0;     // sum w |g|
    double defect = 0;    // integral / scale (0 when scale is 0)
    double error = 0;     // relative change under refinement
};

// Cyclicity defects of tau (bullet commutator against det H) and of tr
// (e times the star commutator) for every hbar order 0..K, n = 1 only.
// The (pi hbar)^{-n} volume prefactor is dropped.
std::vector<TraceDefect> trace_defects(const PotentialModel& model, const BumpFunction& f1, const BumpFunction& f2,
                                       int K, const QuadratureSpec& spec = {});

double trace_defect(const PotentialModel& model, const BumpFunction& f1, const BumpFunction& f2, int k,
                    TraceKind kind, const QuadratureSpec& spec = {});

}  // namespace kstar
