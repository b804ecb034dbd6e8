#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "measureheat/mesh.hpp"

namespace mheat {

/// Dense d x d coefficient matrix, d <= 2. 1D problems use only m[0][0].
struct Mat2 {
    std::array<std::array<double, 2>, 2> m{{{0.0, 0.0}, {0.0, 0.0}}};

    static Mat2 scalar(double s) {
        Mat2 r;
        r.m[0][0] = s;
        r.m[1][1] = s;
        return r;
    }

    double operator()(int i, int j) const { return m[i][j]; }
    double& operator()(int i, int j) { return m[i][j]; }

    Mat2 transposed() const {
        Mat2 r = *this;
        std::swap(r.m[0][1], r.m[1][0]);
        return r;
    }
};

/// Smallest eigenvalue of the symmetric part of M restricted to the first
/// `dim` coordinates. For dim == 2 this is the closed-form eigenvalue of
/// sym(M), so the bound quantifies over every direction, not just probes.
inline double min_symmetric_eigenvalue(const Mat2& M, int dim) {
    if (dim == 1) return M(0, 0);
    const double a = M(0, 0);
    const double d = M(1, 1);
    const double b = 0.5 * (M(0, 1) + M(1, 0));
    const double mean = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    return mean - rad;
}

/// Probe directions for ellipticity spot checks: axis vectors plus the 2D
/// diagonals (1,+-1)/sqrt(2).
inline std::vector<std::array<double, 2>> ellipticity_probes(int dim) {
    if (dim == 1) return {{1.0, 0.0}};
    const double r = 1.0 / std::sqrt(2.0);
    return {{1.0, 0.0}, {0.0, 1.0}, {r, r}, {r, -r}};
}

enum class CoefficientKind { constant_scalar, constant_matrix, per_cell_table };

/// The matrix field M(x), sampled per grid cell. Entries may form a full
/// (possibly nonsymmetric) d x d matrix; coercivity is a property of the
/// symmetric part. Construction rejects fields whose declared ellipticity
/// constant is not met.
class CoefficientField {
public:
    static CoefficientField constant_scalar(int dim, double value,
                                            std::optional<double> alpha = std::nullopt) {
        return CoefficientField(dim, CoefficientKind::constant_scalar, {Mat2::scalar(value)},
                                1, 1, alpha);
    }

    static CoefficientField constant_matrix(int dim, const Mat2& value,
                                            std::optional<double> alpha = std::nullopt) {
        return CoefficientField(dim, CoefficientKind::constant_matrix, {value}, 1, 1, alpha);
    }

    /// cells are row-major over the grid cells (x fastest), nx*ny entries.
    static CoefficientField per_cell_table(int dim, std::vector<Mat2> cells, int nx, int ny,
                                           std::optional<double> alpha = std::nullopt) {
        return CoefficientField(dim, CoefficientKind::per_cell_table, std::move(cells), nx, ny,
                                alpha);
    }

    int dim() const { return dim_; }
    CoefficientKind kind() const { return kind_; }
    double alpha() const { return alpha_; }

    bool is_uniform() const { return kind_ != CoefficientKind::per_cell_table; }

    const Mat2& cell(int cx, int cy = 0) const {
        if (is_uniform()) return cells_[0];
        return cells_[cy * nx_ + cx];
    }

    int table_nx() const { return nx_; }
    int table_ny() const { return ny_; }

    bool is_diagonal() const {
        if (dim_ == 1) return true;
        for (const Mat2& c : cells_)
            if (c(0, 1) != 0.0 || c(1, 0) != 0.0) return false;
        return true;
    }

    bool is_symmetric() const {
        if (dim_ == 1) return true;
        for (const Mat2& c : cells_)
            if (c(0, 1) != c(1, 0)) return false;
        return true;
    }

    CoefficientField transposed() const {
        CoefficientField r = *this;
        for (Mat2& c : r.cells_) c = c.transposed();
        return r;
    }

    /// min over cells of the smallest symmetric-part eigenvalue; may be <= 0
    /// for an ill-posed field (construction prevents that for instances).
    double ellipticity_estimate() const {
        double worst = std::numeric_limits<double>::infinity();
        for (const Mat2& c : cells_) worst = std::min(worst, min_symmetric_eigenvalue(c, dim_));
        return worst;
    }

    /// True if the field matches this mesh (table sized to its cells).
    bool compatible_with(const Mesh& mesh) const {
        if (dim_ != mesh.dim()) return false;
        if (is_uniform()) return true;
        return nx_ == mesh.n_cells(0) && (dim_ == 1 || ny_ == mesh.n_cells(1));
    }

private:
    CoefficientField(int dim, CoefficientKind kind, std::vector<Mat2> cells, int nx, int ny,
                     std::optional<double> declared_alpha)
        : dim_(dim), kind_(kind), cells_(std::move(cells)), nx_(nx), ny_(ny) {
        if (dim_ != 1 && dim_ != 2)
            throw InvalidArgumentError("coefficient: dim must be 1 or 2");
        if (cells_.empty()) throw InvalidArgumentError("coefficient: empty cell table");
        if (kind_ == CoefficientKind::per_cell_table &&
            static_cast<int>(cells_.size()) != nx_ * (dim_ == 2 ? ny_ : 1))
            throw InvalidArgumentError("coefficient: cell table size mismatch");
        for (const Mat2& c : cells_)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    if (!std::isfinite(c(i, j)))
                        throw InvalidArgumentError("coefficient: non-finite entry");
        const double est = ellipticity_estimate();
        if (!(est > 0.0))
            throw NonEllipticError("coefficient: symmetric part not positive definite");
        alpha_ = declared_alpha.value_or(est);
        if (!(alpha_ > 0.0))
            throw NonEllipticError("coefficient: declared alpha must be positive");
        if (est < alpha_ * (1.0 - 1e-12))
            throw NonEllipticError("coefficient: field does not meet declared alpha");
    }

    int dim_;
    CoefficientKind kind_;
    std::vector<Mat2> cells_;
    int nx_;
    int ny_;
    double alpha_ = 0.0;
};

/// Returns the coercivity constant of M: the minimum over cells (and over all
/// directions, via the closed-form symmetric eigenvalue) of xi.M xi / |xi|^2.
/// Throws NonEllipticError when the estimate is not positive. Raw Mat2
/// overload provided so rejection paths can be exercised (a constructed
/// CoefficientField is already elliptic).
inline double check_ellipticity(const Mat2& M, int dim) {
    const double est = min_symmetric_eigenvalue(M, dim);
    if (!(est > 0.0)) throw NonEllipticError("check_ellipticity: estimate <= 0");
    return est;
}

inline double check_ellipticity(const CoefficientField& M) {
    const double est = M.ellipticity_estimate();
    if (!(est > 0.0)) throw NonEllipticError("check_ellipticity: estimate <= 0");
    return est;
}

/// A point mass: location strictly inside the domain, signed weight.
struct Atom {
    Coord x{0.0, 0.0};
    double weight = 0.0;
};

/// Finite signed measure: Dirac atoms plus an optional integrable density
/// sampled at interior nodes. Weights may take either sign.
struct MeasureData {
    std::vector<Atom> atoms;
    std::optional<NodalField> density;
};

inline void validate_measure(const MeasureData& mu, const Mesh& mesh) {
    for (const Atom& a : mu.atoms) {
        for (int ax = 0; ax < mesh.dim(); ++ax) {
            if (!(a.x[ax] > 0.0 && a.x[ax] < mesh.extent(ax)))
                throw InvalidArgumentError(
                    "measure: atom must lie strictly inside the domain; atoms on the "
                    "boundary have no discrete image and are rejected");
        }
        if (!std::isfinite(a.weight))
            throw InvalidArgumentError("measure: non-finite atom weight");
    }
    if (mu.density && !mu.density->mesh()->same_layout(mesh))
        throw InvalidArgumentError("measure: density sampled on a different mesh");
}

/// Total variation: sum |atom weights| + lumped L1 of the density.
inline double total_variation(const MeasureData& mu, const Mesh& mesh) {
    validate_measure(mu, mesh);
    double tv = 0.0;
    for (const Atom& a : mu.atoms) tv += std::abs(a.weight);
    if (mu.density) tv += l1_norm(*mu.density);
    return tv;
}

inline bool is_nonnegative(const MeasureData& mu) {
    for (const Atom& a : mu.atoms)
        if (a.weight < 0.0) return false;
    if (mu.density)
        for (double d : mu.density->values())
            if (d < 0.0) return false;
    return true;
}

inline bool is_zero_measure(const MeasureData& mu) {
    for (const Atom& a : mu.atoms)
        if (a.weight != 0.0) return false;
    if (mu.density)
        for (double d : mu.density->values())
            if (d != 0.0) return false;
    return true;
}

/// Clamp at level k.
inline double t_k(double k, double s) {
    if (!(k > 0.0)) throw InvalidArgumentError("t_k: k must be positive");
    return std::max(-k, std::min(k, s));
}

/// Primitive of the clamp: s^2/2 inside the ramp, k|s| - k^2/2 beyond it.
inline double theta_k(double k, double s) {
    if (!(k > 0.0)) throw InvalidArgumentError("theta_k: k must be positive");
    const double a = std::abs(s);
    return a <= k ? 0.5 * s * s : k * a - 0.5 * k * k;
}

/// Clamp level k with its primitive, as a value type.
struct Truncation {
    explicit Truncation(double level) : k(level) {
        if (!(k > 0.0)) throw InvalidArgumentError("truncation: k must be positive");
    }
    double clamp(double s) const { return t_k(k, s); }
    double primitive(double s) const { return theta_k(k, s); }
    double k;
};

/// Lumped integral of theta_k applied to a field: sum_j w_j Theta_k(f_j).
inline double theta_functional(double k, const NodalField& f) {
    double s = 0.0;
    for (double x : f.values()) s += theta_k(k, x);
    return s * f.mesh()->quad_weight();
}

}  // namespace mheat
