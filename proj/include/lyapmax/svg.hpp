#pragma once

// Deterministic SVG diagrams of an invariant multicone on the projective
// circle: highlighted cone arcs, per-generator image arcs with labeled
// arrows from each source component to its image, and eigendirection ticks.
// All geometry constants live in SvgLayout so plots can be golden-file
// tested byte for byte.

#include <string>

#include "lyapmax/pipeline.hpp"
#include "lyapmax/projcone.hpp"

namespace lyapmax {

// The complete layout-constant table.  Coordinates are emitted with two
// decimals, so equal inputs yield identical bytes.
struct SvgLayout {
    double size = 720.0;         // square canvas edge, px
    double radius = 280.0;       // projective circle radius, px
    double cone_stroke = 12.0;   // multicone arc stroke width
    double image_stroke = 5.0;   // generator-image arc stroke width
    double image_inset = 18.0;   // radial inset of image arcs inside the circle
    double arrow_pull = 0.55;    // fraction the arrow control point is pulled
                                 // from the chord midpoint toward the center
    double tick_len = 14.0;      // eigendirection tick half-length
    double font_size = 15.0;     // label text size, px
};

// Core renderer: the circle (projective directions at doubled angle), the
// multicone arcs, one labeled arrow per generator per component, and
// stable/unstable eigendirection ticks for generators with real spectrum.
std::string render_multicone_svg(const OneStepCocycle& A, const Multicone& mc,
                                 const std::string& title, const SvgLayout& layout = {});

// Report-driven wrapper: extracts the invariant multicone recorded in the
// report (input error when the report has none) and renders it with the
// config's generators.
std::string render_report_svg(const AnalysisConfig& config, const AnalysisReport& report,
                              const SvgLayout& layout = {});

}  // namespace lyapmax
