#pragma once

#include <pueval/error.hpp>
#include <pueval/surrogate_tables.hpp>

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace pueval {

enum class CurveSpace { Roc, Pr };

constexpr std::string_view to_string(CurveSpace space) noexcept {
    return space == CurveSpace::Roc ? "roc" : "pr";
}

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct AucInterval {
    double lower = 0.0;
    double upper = 0.0;
    double width() const noexcept { return upper - lower; }
    double midpoint() const noexcept { return 0.5 * (lower + upper); }
    bool contains(double v) const noexcept { return lower <= v && v <= upper; }
    friend bool operator==(const AucInterval&, const AucInterval&) = default;
};

/// Lower and upper bound curves, one point per rank.
/// ROC: x = FPR, y = TPR over ranks 0..n. PR: x = recall, y = precision over
/// ranks 1..n, preceded by (0, precision at rank 1).
struct BoundCurve {
    CurveSpace space = CurveSpace::Roc;
    std::vector<CurvePoint> lower_points;
    std::vector<CurvePoint> upper_points;
    double auc_lower = 0.0;
    double auc_upper = 0.0;
    friend bool operator==(const BoundCurve&, const BoundCurve&) = default;
};

/// Trapezoid rule over the points in the order given. Bound ROC curves can
/// step back in x at known-positive ranks; the signed segments are kept.
inline double trapezoid_auc(std::span<const CurvePoint> points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].x - points[i - 1].x) * (points[i].y + points[i - 1].y) * 0.5;
    return area;
}

inline std::vector<CurvePoint> roc_points(std::span<const ContingencyTable> tables) {
    if (tables.empty()) throw Error(ErrorCode::DegenerateCurve, "no tables");
    if (tables.front().positives() == 0 || tables.front().negatives() == 0)
        throw Error(ErrorCode::DegenerateCurve, "ROC needs at least one positive and one negative");
    std::vector<CurvePoint> points;
    points.reserve(tables.size());
    for (const auto& t : tables) points.push_back({t.fpr(), t.tpr()});
    return points;
}

inline std::vector<CurvePoint> pr_points(std::span<const ContingencyTable> tables) {
    if (tables.size() < 2) throw Error(ErrorCode::DegenerateCurve, "PR curve needs at least one rank");
    if (tables.front().positives() == 0) throw Error(ErrorCode::DegenerateCurve, "PR curve needs positives");
    std::vector<CurvePoint> points;
    points.reserve(tables.size());
    points.push_back({0.0, tables[1].precision()});
    for (std::size_t r = 1; r < tables.size(); ++r) points.push_back({tables[r].tpr(), tables[r].precision()});
    return points;
}

/// The FPR-lower tables give the upper ROC curve; the FPR-upper tables the
/// lower one.
inline BoundCurve roc_bounds(const BoundTables& tables) {
    BoundCurve c;
    c.space = CurveSpace::Roc;
    c.upper_points = roc_points(tables.fpr_lower);
    c.lower_points = roc_points(tables.fpr_upper);
    c.auc_upper = trapezoid_auc(c.upper_points);
    c.auc_lower = trapezoid_auc(c.lower_points);
    return c;
}

inline BoundCurve pr_bounds(const BoundTables& tables) {
    BoundCurve c;
    c.space = CurveSpace::Pr;
    c.upper_points = pr_points(tables.fpr_lower);
    c.lower_points = pr_points(tables.fpr_upper);
    c.auc_upper = trapezoid_auc(c.upper_points);
    c.auc_lower = trapezoid_auc(c.lower_points);
    return c;
}

inline BoundCurve curve_bounds(const BoundTables& tables, CurveSpace space) {
    return space == CurveSpace::Roc ? roc_bounds(tables) : pr_bounds(tables);
}

inline AucInterval auc_interval(const BoundCurve& curve) {
    if (curve.lower_points.empty() || curve.upper_points.empty())
        throw Error(ErrorCode::DegenerateCurve, "curve has no points");
    return {curve.auc_lower, curve.auc_upper};
}

/// AUC of a single classical curve.
inline double curve_auc(std::span<const ContingencyTable> tables, CurveSpace space) {
    const auto points = space == CurveSpace::Roc ? roc_points(tables) : pr_points(tables);
    return trapezoid_auc(points);
}

} // namespace pueval
