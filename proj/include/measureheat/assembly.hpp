#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "measureheat/model.hpp"

namespace mheat {

/// Square sparse matrix over interior nodes, compressed sparse rows with
/// column indices sorted within each row.
class SparseOperator {
public:
    SparseOperator() = default;

    static SparseOperator from_triplets(int n,
                                        std::vector<std::tuple<int, int, double>> triplets,
                                        bool symmetric_hint = false) {
        std::map<std::pair<int, int>, double> acc;
        for (auto& [i, j, v] : triplets) {
            if (i < 0 || i >= n || j < 0 || j >= n)
                throw InvalidArgumentError("sparse operator: triplet index out of range");
            acc[{i, j}] += v;
        }
        SparseOperator A;
        A.n_ = n;
        A.symmetric_ = symmetric_hint;
        A.row_ptr_.assign(n + 1, 0);
        for (auto& [ij, v] : acc) ++A.row_ptr_[ij.first + 1];
        for (int i = 0; i < n; ++i) A.row_ptr_[i + 1] += A.row_ptr_[i];
        A.col_.resize(acc.size());
        A.val_.resize(acc.size());
        std::vector<int> cursor(A.row_ptr_.begin(), A.row_ptr_.end() - 1);
        for (auto& [ij, v] : acc) {
            const int slot = cursor[ij.first]++;
            A.col_[slot] = ij.second;
            A.val_[slot] = v;
        }
        return A;
    }

    static SparseOperator diagonal(std::vector<double> d) {
        SparseOperator A;
        A.n_ = static_cast<int>(d.size());
        A.symmetric_ = true;
        A.row_ptr_.resize(A.n_ + 1);
        A.col_.resize(A.n_);
        A.val_ = std::move(d);
        for (int i = 0; i <= A.n_; ++i) A.row_ptr_[i] = i;
        for (int i = 0; i < A.n_; ++i) A.col_[i] = i;
        return A;
    }

    int size() const { return n_; }
    bool symmetric_flag() const { return symmetric_; }
    int nnz() const { return static_cast<int>(val_.size()); }

    void apply(std::span<const double> x, std::span<double> y) const {
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
            y[i] = s;
        }
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(n_);
        apply(x, y);
        return y;
    }

    /// Exact entrywise transpose; this is the definition of the discrete
    /// adjoint used by the retrograde march.
    SparseOperator transposed() const {
        SparseOperator T;
        T.n_ = n_;
        T.symmetric_ = symmetric_;
        T.row_ptr_.assign(n_ + 1, 0);
        T.col_.resize(val_.size());
        T.val_.resize(val_.size());
        for (int c : col_) ++T.row_ptr_[c + 1];
        for (int i = 0; i < n_; ++i) T.row_ptr_[i + 1] += T.row_ptr_[i];
        std::vector<int> cursor(T.row_ptr_.begin(), T.row_ptr_.end() - 1);
        for (int i = 0; i < n_; ++i) {
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                const int slot = cursor[col_[k]]++;
                T.col_[slot] = i;
                T.val_[slot] = val_[k];
            }
        }
        return T;
    }

    double coeff(int i, int j) const {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            if (col_[k] == j) return val_[k];
        return 0.0;
    }

    std::vector<double> diagonal_values() const {
        std::vector<double> d(n_);
        for (int i = 0; i < n_; ++i) d[i] = coeff(i, i);
        return d;
    }

    double inf_norm() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(val_[k]);
            m = std::max(m, s);
        }
        return m;
    }

    int bandwidth() const {
        int b = 0;
        for (int i = 0; i < n_; ++i)
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                b = std::max(b, std::abs(col_[k] - i));
        return b;
    }

    bool exactly_equal(const SparseOperator& other) const {
        return n_ == other.n_ && row_ptr_ == other.row_ptr_ && col_ == other.col_ &&
               val_ == other.val_;
    }

    template <class F>
    void for_each_entry(F&& f) const {
        for (int i = 0; i < n_; ++i)
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) f(i, col_[k], val_[k]);
    }

    /// B = a*this + b*other (same size; patterns may differ).
    static SparseOperator linear_combination(double a, const SparseOperator& X, double b,
                                             const SparseOperator& Y) {
        if (X.n_ != Y.n_)
            throw InvalidArgumentError("sparse operator: size mismatch in combination");
        std::vector<std::tuple<int, int, double>> trips;
        trips.reserve(X.val_.size() + Y.val_.size());
        X.for_each_entry([&](int i, int j, double v) { trips.emplace_back(i, j, a * v); });
        Y.for_each_entry([&](int i, int j, double v) { trips.emplace_back(i, j, b * v); });
        return from_triplets(X.n_, std::move(trips), X.symmetric_ && Y.symmetric_);
    }

    void scale(double a) {
        for (double& v : val_) v *= a;
    }

private:
    int n_ = 0;
    bool symmetric_ = false;
    std::vector<int> row_ptr_;
    std::vector<int> col_;
    std::vector<double> val_;
};

/// Per-interior-node functionals of a measure: entries pair against nodal
/// values directly (no division by cell volume).
using LoadVector = std::vector<double>;

namespace detail {

inline double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

/// Node-centered mixed coefficient: arithmetic mean of the (1, 2 or 4)
/// cells adjacent to lattice node (ix, iy).
inline double node_average(const Mesh& mesh, const CoefficientField& M, int ix, int iy,
                           int row, int colm) {
    double sum = 0.0;
    int count = 0;
    for (int cy = iy - 1; cy <= iy; ++cy) {
        if (cy < 0 || cy >= mesh.n_cells(1)) continue;
        for (int cx = ix - 1; cx <= ix; ++cx) {
            if (cx < 0 || cx >= mesh.n_cells(0)) continue;
            sum += M.cell(cx, cy)(row, colm);
            ++count;
        }
    }
    return sum / count;
}

}  // namespace detail

/// Discretize -div(M(x) grad u) on interior nodes with the flux stencil:
/// 3-point in 1D, 5-point for diagonal M in 2D plus corner couplings from the
/// mixed entries. Face coefficients use the harmonic mean of the two adjacent
/// cells; mixed entries use centered differences with node-averaged
/// coefficients. Dirichlet rows/columns are eliminated.
///
/// The discrete maximum principle is guaranteed for diagonal M only; strongly
/// non-diagonal fields can break the M-matrix sign pattern.
inline SparseOperator assemble_stiffness(const Mesh& mesh, const CoefficientField& M) {
    if (!M.compatible_with(mesh))
        throw InvalidArgumentError("assemble_stiffness: coefficient/mesh mismatch");
    check_ellipticity(M);

    std::vector<std::tuple<int, int, double>> trips;

    if (mesh.dim() == 1) {
        const int n = mesh.n_interior(0);
        const double inv_h2 = 1.0 / (mesh.h(0) * mesh.h(0));
        for (int i = 1; i <= n; ++i) {
            // face i-1/2 lies inside cell i-1, face i+1/2 inside cell i
            const double mw = M.cell(i - 1)(0, 0);
            const double me = M.cell(i)(0, 0);
            const int row = mesh.interior_index(i);
            trips.emplace_back(row, row, (mw + me) * inv_h2);
            if (i > 1) trips.emplace_back(row, mesh.interior_index(i - 1), -mw * inv_h2);
            if (i < n) trips.emplace_back(row, mesh.interior_index(i + 1), -me * inv_h2);
        }
        return SparseOperator::from_triplets(mesh.interior_count(), std::move(trips), true);
    }

    const int nx = mesh.n_cells(0);
    const int ny = mesh.n_cells(1);
    const double inv_hx2 = 1.0 / (mesh.h(0) * mesh.h(0));
    const double inv_hy2 = 1.0 / (mesh.h(1) * mesh.h(1));
    const double cross = 1.0 / (4.0 * mesh.h(0) * mesh.h(1));
    const bool mixed = !M.is_diagonal();

    auto emit = [&](int row, int ix, int iy, double v) {
        if (!mesh.is_boundary_node(ix, iy)) trips.emplace_back(row, mesh.interior_index(ix, iy), v);
    };

    for (int iy = 1; iy < ny; ++iy) {
        for (int ix = 1; ix < nx; ++ix) {
            const int row = mesh.interior_index(ix, iy);
            // faces normal to x: harmonic mean across the two cells the edge borders
            const double aW = detail::harmonic_mean(M.cell(ix - 1, iy - 1)(0, 0),
                                                    M.cell(ix - 1, iy)(0, 0)) * inv_hx2;
            const double aE = detail::harmonic_mean(M.cell(ix, iy - 1)(0, 0),
                                                    M.cell(ix, iy)(0, 0)) * inv_hx2;
            const double aS = detail::harmonic_mean(M.cell(ix - 1, iy - 1)(1, 1),
                                                    M.cell(ix, iy - 1)(1, 1)) * inv_hy2;
            const double aN = detail::harmonic_mean(M.cell(ix - 1, iy)(1, 1),
                                                    M.cell(ix, iy)(1, 1)) * inv_hy2;
            trips.emplace_back(row, row, aW + aE + aS + aN);
            emit(row, ix - 1, iy, -aW);
            emit(row, ix + 1, iy, -aE);
            emit(row, ix, iy - 1, -aS);
            emit(row, ix, iy + 1, -aN);

            if (mixed) {
                // -d/dx(mxy du/dy) via centered differences in x of node values
                const double bE = detail::node_average(mesh, M, ix + 1, iy, 0, 1);
                const double bW = detail::node_average(mesh, M, ix - 1, iy, 0, 1);
                emit(row, ix + 1, iy + 1, -bE * cross);
                emit(row, ix + 1, iy - 1, bE * cross);
                emit(row, ix - 1, iy + 1, bW * cross);
                emit(row, ix - 1, iy - 1, -bW * cross);
                // -d/dy(myx du/dx)
                const double cN = detail::node_average(mesh, M, ix, iy + 1, 1, 0);
                const double cS = detail::node_average(mesh, M, ix, iy - 1, 1, 0);
                emit(row, ix + 1, iy + 1, -cN * cross);
                emit(row, ix - 1, iy + 1, cN * cross);
                emit(row, ix + 1, iy - 1, cS * cross);
                emit(row, ix - 1, iy - 1, -cS * cross);
            }
        }
    }
    return SparseOperator::from_triplets(mesh.interior_count(), std::move(trips),
                                         M.is_symmetric());
}

/// Lumped mass: diagonal of quadrature weights.
inline SparseOperator assemble_mass(const Mesh& mesh) {
    return SparseOperator::diagonal(std::vector<double>(mesh.interior_count(), mesh.quad_weight()));
}

/// Hat-function discretization of a measure. An atom at x contributes
/// weight * hat_j(x) to each interior corner node j of its cell; a density d
/// contributes quad_weight * d(x_j) at every interior node.
inline LoadVector discretize_measure(const Mesh& mesh, const MeasureData& mu) {
    validate_measure(mu, mesh);
    LoadVector b(mesh.interior_count(), 0.0);

    for (const Atom& atom : mu.atoms) {
        if (mesh.dim() == 1) {
            const double h = mesh.h(0);
            int c = std::min(static_cast<int>(atom.x[0] / h), mesh.n_cells(0) - 1);
            const double xi = atom.x[0] / h - c;
            const double hat[2] = {1.0 - xi, xi};
            for (int d = 0; d < 2; ++d) {
                const int node = c + d;
                if (!mesh.is_boundary_node(node))
                    b[mesh.interior_index(node)] += atom.weight * hat[d];
            }
        } else {
            const double hx = mesh.h(0);
            const double hy = mesh.h(1);
            int cx = std::min(static_cast<int>(atom.x[0] / hx), mesh.n_cells(0) - 1);
            int cy = std::min(static_cast<int>(atom.x[1] / hy), mesh.n_cells(1) - 1);
            const double xi = atom.x[0] / hx - cx;
            const double eta = atom.x[1] / hy - cy;
            const double hx_w[2] = {1.0 - xi, xi};
            const double hy_w[2] = {1.0 - eta, eta};
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                    const int nxn = cx + dx;
                    const int nyn = cy + dy;
                    if (!mesh.is_boundary_node(nxn, nyn))
                        b[mesh.interior_index(nxn, nyn)] += atom.weight * hx_w[dx] * hy_w[dy];
                }
        }
    }

    if (mu.density) {
        const double w = mesh.quad_weight();
        for (int j = 0; j < mu.density->size(); ++j) b[j] += w * (*mu.density)[j];
    }
    return b;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Coordinate-format text dump for external inspection.
inline void write_matrix_market(const SparseOperator& A, std::ostream& os) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << A.size() << " " << A.size() << " " << A.nnz() << "\n";
    char buf[64];
    A.for_each_entry([&](int i, int j, double v) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1, j + 1, v);
        os << buf;
    });
}

}  // namespace mheat
