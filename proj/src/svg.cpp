#include "lyapmax/svg.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lyapmax {

namespace {

const char* kPalette[] = {"#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#17becf", "#bcbd22"};

const char* color_of(int symbol) {
    return kPalette[static_cast<std::size_t>(symbol - 1) % (sizeof kPalette / sizeof *kPalette)];
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x + 0.0);  // normalize -0.00
    return buf;
}

struct Point {
    double x, y;
};

// Both real eigendirections, most expanding first; nullopt for complex or
// scalar spectrum (nothing to mark).
struct EigenPair {
    double unstable, stable;
};

std::optional<EigenPair> real_eigen_pair(const Mat2& m) {
    const double scale = std::max(m.max_abs(), 1e-300);
    if (std::abs(m.b) <= 1e-14 * scale && std::abs(m.c) <= 1e-14 * scale &&
        std::abs(m.a - m.d) <= 1e-14 * scale)
        return std::nullopt;  // scalar
    const double tr = m.trace();
    const double disc = tr * tr - 4.0 * m.det();
    if (disc <= 0.0) return std::nullopt;  // complex pair (or defective)
    const double sq = std::sqrt(disc);
    const auto direction = [&](double lam) -> std::optional<double> {
        const double r1x = m.a - lam, r1y = m.b;
        const double r2x = m.c, r2y = m.d - lam;
        double vx, vy;
        if (std::hypot(r1x, r1y) >= std::hypot(r2x, r2y)) {
            vx = -r1y;
            vy = r1x;
        } else {
            vx = -r2y;
            vy = r2x;
        }
        if (std::hypot(vx, vy) <= 1e-13 * std::max(1.0, scale)) return std::nullopt;
        return wrap_pi(std::atan2(vy, vx));
    };
    const double lp = 0.5 * (tr + sq), lm = 0.5 * (tr - sq);
    const double big = std::abs(lp) >= std::abs(lm) ? lp : lm;
    const double small = std::abs(lp) >= std::abs(lm) ? lm : lp;
    const auto du = direction(big);
    const auto ds = direction(small);
    if (!du || !ds) return std::nullopt;
    return EigenPair{*du, *ds};
}

}  // namespace

std::string render_multicone_svg(const OneStepCocycle& A, const Multicone& mc,
                                 const std::string& title, const SvgLayout& L) {
    const double c = 0.5 * L.size;
    const double R = L.radius;

    // A projective direction theta lives at circle angle 2*theta, so the
    // interval [0, pi) wraps the drawn circle exactly once.
    const auto pt = [&](double theta, double r) -> Point {
        const double a = 2.0 * theta;
        return {c + r * std::cos(a), c - r * std::sin(a)};
    };
    const auto arc_path = [&](const Arc& a, double r) {
        std::string d;
        const int steps = 48;
        for (int i = 0; i <= steps; ++i) {
            const Point p = pt(a.start + a.length * i / steps, r);
            d += (i == 0 ? "M " : " L ") + num(p.x) + " " + num(p.y);
        }
        return d;
    };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(L.size) + " " +
         num(L.size) + "\" font-family=\"sans-serif\" font-size=\"" + num(L.font_size) +
         "\">\n";
    s += "<!-- layout: size=" + num(L.size) + " radius=" + num(L.radius) +
         " cone_stroke=" + num(L.cone_stroke) + " image_stroke=" + num(L.image_stroke) +
         " image_inset=" + num(L.image_inset) + " arrow_pull=" + num(L.arrow_pull) +
         " tick_len=" + num(L.tick_len) + " font_size=" + num(L.font_size) + " -->\n";
    s += "<rect width=\"" + num(L.size) + "\" height=\"" + num(L.size) +
         "\" fill=\"#ffffff\"/>\n";

    s += "<defs>\n";
    for (int g = 1; g <= A.alphabet_size(); ++g) {
        s += "<marker id=\"arrow-g" + std::to_string(g) +
             "\" viewBox=\"0 0 10 10\" refX=\"8\" refY=\"5\" markerWidth=\"7\" "
             "markerHeight=\"7\" orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 "
             "10 z\" fill=\"" +
             color_of(g) + "\"/></marker>\n";
    }
    s += "</defs>\n";

    s += "<text x=\"18.00\" y=\"30.00\" font-size=\"" + num(L.font_size + 3.0) +
         "\" fill=\"#202020\">" + title + "</text>\n";
    s += "<text x=\"18.00\" y=\"52.00\" fill=\"#606060\">components: " +
         std::to_string(mc.components()) + "</text>\n";

    s += "<circle cx=\"" + num(c) + "\" cy=\"" + num(c) + "\" r=\"" + num(R) +
         "\" fill=\"none\" stroke=\"#b8b8b8\" stroke-width=\"1.50\"/>\n";

    // Multicone components.
    for (const Arc& a : mc.arcs())
        s += "<path d=\"" + arc_path(a, R) + "\" fill=\"none\" stroke=\"#1f77b4\" "
             "stroke-width=\"" + num(L.cone_stroke) +
             "\" stroke-linecap=\"round\" class=\"cone-arc\"/>\n";

    // Per-generator image arcs (inset) and one labeled arrow per component.
    for (int g = 1; g <= A.alphabet_size(); ++g) {
        const Mat2& M = A.generator(g);
        Multicone img = image_multicone(M, mc).cone;
        for (const Arc& a : img.arcs())
            s += "<path d=\"" + arc_path(a, R - L.image_inset) +
                 "\" fill=\"none\" stroke=\"" + color_of(g) + "\" stroke-width=\"" +
                 num(L.image_stroke) + "\" stroke-linecap=\"round\" class=\"image-arc\"/>\n";
        for (const Arc& src : mc.arcs()) {
            const Arc dst = image_arc(M, src);
            const Point p0 = pt(src.midpoint(), R - L.image_inset);
            const Point p1 = pt(dst.midpoint(), R - L.image_inset);
            const Point mid{0.5 * (p0.x + p1.x), 0.5 * (p0.y + p1.y)};
            const Point ctrl{c + (1.0 - L.arrow_pull) * (mid.x - c),
                             c + (1.0 - L.arrow_pull) * (mid.y - c)};
            s += "<path d=\"M " + num(p0.x) + " " + num(p0.y) + " Q " + num(ctrl.x) + " " +
                 num(ctrl.y) + " " + num(p1.x) + " " + num(p1.y) +
                 "\" fill=\"none\" stroke=\"" + color_of(g) +
                 "\" stroke-width=\"2.00\" marker-end=\"url(#arrow-g" + std::to_string(g) +
                 ")\"/>\n";
            const Point lab{0.25 * p0.x + 0.5 * ctrl.x + 0.25 * p1.x,
                            0.25 * p0.y + 0.5 * ctrl.y + 0.25 * p1.y};
            s += "<text x=\"" + num(lab.x) + "\" y=\"" + num(lab.y - 6.0) +
                 "\" text-anchor=\"middle\" fill=\"" + color_of(g) + "\">A" +
                 std::to_string(g) + "</text>\n";
        }
    }

    // Eigendirection ticks: solid for the most expanding direction, dashed
    // for the contracting one.
    for (int g = 1; g <= A.alphabet_size(); ++g) {
        const auto eig = real_eigen_pair(A.generator(g));
        if (!eig) continue;
        const auto tick = [&](double theta, bool dashed) {
            const Point a = pt(theta, R - L.tick_len);
            const Point b = pt(theta, R + L.tick_len);
            std::string t = "<line x1=\"" + num(a.x) + "\" y1=\"" + num(a.y) + "\" x2=\"" +
                            num(b.x) + "\" y2=\"" + num(b.y) + "\" stroke=\"" + color_of(g) +
                            "\" stroke-width=\"" + (dashed ? "2.00" : "3.00") + "\"";
            if (dashed) t += " stroke-dasharray=\"4 3\"";
            t += " class=\"" + std::string(dashed ? "eig-stable" : "eig-unstable") + "\"/>\n";
            return t;
        };
        s += tick(eig->unstable, false);
        s += tick(eig->stable, true);
    }

    s += "</svg>\n";
    return s;
}

std::string render_report_svg(const AnalysisConfig& config, const AnalysisReport& report,
                              const SvgLayout& layout) {
    const nlohmann::json& doc = report.doc;
    if (!doc.contains("stages") || !doc["stages"].contains("multicone") ||
        !doc["stages"]["multicone"].value("found", false))
        throw InputError("report contains no invariant multicone; nothing to plot");
    std::vector<Arc> arcs;
    for (const auto& a : doc["stages"]["multicone"]["cone"]["arcs"])
        arcs.emplace_back(a.at("start").get<double>(), a.at("length").get<double>());
    return render_multicone_svg(config.cocycle(), Multicone(std::move(arcs)), config.name,
                                layout);
}

}  // namespace lyapmax
