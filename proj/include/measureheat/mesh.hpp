#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <vector>

#include "measureheat/errors.hpp"

namespace mheat {

using Coord = std::array<double, 2>;  // (x, y); y is 0 in 1D

/// Uniform tensor grid on (0,Lx) or (0,Lx)x(0,Ly) with homogeneous Dirichlet
/// boundary. Nodes live on the lattice including the boundary; only interior
/// nodes carry unknowns. Interior nodes are numbered row-major (x fastest).
/// The lumped quadrature weight of every interior node is the cell volume
/// (h in 1D, hx*hy in 2D), identical across nodes on a uniform grid.
class Mesh {
public:
    Mesh(int dim, std::vector<double> extents, std::vector<int> n_cells)
        : dim_(dim), extents_(std::move(extents)), n_cells_(std::move(n_cells)) {
        if (dim_ != 1 && dim_ != 2)
            throw InvalidArgumentError("mesh: dim must be 1 or 2");
        if (extents_.size() != static_cast<size_t>(dim_) ||
            n_cells_.size() != static_cast<size_t>(dim_))
            throw InvalidArgumentError("mesh: extents/n_cells must have one entry per axis");
        for (int a = 0; a < dim_; ++a) {
            if (!(extents_[a] > 0.0) || !std::isfinite(extents_[a]))
                throw InvalidArgumentError("mesh: extents must be positive");
            if (n_cells_[a] < 2)
                throw InvalidArgumentError("mesh: need n_cells >= 2 per axis (no interior node otherwise)");
            h_[a] = extents_[a] / n_cells_[a];
        }
        if (dim_ == 1) {
            extents_.resize(1);
            h_[1] = 0.0;
        }
    }

    int dim() const { return dim_; }
    double extent(int axis) const { return extents_[axis]; }
    double h(int axis) const { return h_[axis]; }
    int n_cells(int axis) const { return n_cells_[axis]; }

    /// Interior lattice size along an axis (n_cells - 1).
    int n_interior(int axis) const { return n_cells_[axis] - 1; }

    int interior_count() const {
        return dim_ == 1 ? n_interior(0) : n_interior(0) * n_interior(1);
    }

    int node_count() const {
        return dim_ == 1 ? n_cells_[0] + 1 : (n_cells_[0] + 1) * (n_cells_[1] + 1);
    }

    int boundary_count() const { return node_count() - interior_count(); }

    /// Lumped quadrature weight; uniform grid, so one value serves all nodes.
    double quad_weight() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }
    double quad_weight(int /*interior_index*/) const { return quad_weight(); }

    /// Interior index from lattice coordinates (ix in 1..n_cells-1, same for iy).
    int interior_index(int ix, int iy = 1) const {
        return (iy - 1) * n_interior(0) + (ix - 1);
    }

    /// Lattice coordinates of an interior index.
    std::array<int, 2> interior_lattice(int k) const {
        if (dim_ == 1) return {k + 1, 0};
        return {k % n_interior(0) + 1, k / n_interior(0) + 1};
    }

    Coord coord(int interior_index) const {
        auto ij = interior_lattice(interior_index);
        return {ij[0] * h_[0], dim_ == 2 ? ij[1] * h_[1] : 0.0};
    }

    /// Global lattice node id, row-major over the full (boundary-inclusive) lattice.
    int global_node(int ix, int iy = 0) const {
        return dim_ == 1 ? ix : iy * (n_cells_[0] + 1) + ix;
    }

    bool is_boundary_node(int ix, int iy = 0) const {
        if (ix == 0 || ix == n_cells_[0]) return true;
        if (dim_ == 2 && (iy == 0 || iy == n_cells_[1])) return true;
        return false;
    }

    std::vector<int> interior_nodes() const {
        std::vector<int> out;
        out.reserve(interior_count());
        for_each_node([&](int ix, int iy) {
            if (!is_boundary_node(ix, iy)) out.push_back(global_node(ix, iy));
        });
        return out;
    }

    std::vector<int> boundary_nodes() const {
        std::vector<int> out;
        out.reserve(boundary_count());
        for_each_node([&](int ix, int iy) {
            if (is_boundary_node(ix, iy)) out.push_back(global_node(ix, iy));
        });
        return out;
    }

    bool same_layout(const Mesh& other) const {
        return dim_ == other.dim_ && n_cells_ == other.n_cells_ && extents_ == other.extents_;
    }

private:
    template <class F>
    void for_each_node(F&& f) const {
        const int ny = dim_ == 2 ? n_cells_[1] : 0;
        for (int iy = 0; iy <= ny; ++iy)
            for (int ix = 0; ix <= n_cells_[0]; ++ix) f(ix, iy);
    }

    int dim_;
    std::vector<double> extents_;
    std::vector<int> n_cells_;
    std::array<double, 2> h_{0.0, 0.0};
};

using MeshPtr = std::shared_ptr<const Mesh>;

inline MeshPtr build_mesh(int dim, std::vector<double> extents, std::vector<int> n_cells) {
    return std::make_shared<const Mesh>(dim, std::move(extents), std::move(n_cells));
}

/// Values at interior nodes; the boundary trace is identically zero and is
/// never stored.
class NodalField {
public:
    explicit NodalField(MeshPtr mesh)
        : mesh_(require_mesh(std::move(mesh))), v_(mesh_->interior_count(), 0.0) {}

    NodalField(MeshPtr mesh, std::vector<double> values)
        : mesh_(require_mesh(std::move(mesh))), v_(std::move(values)) {
        if (static_cast<int>(v_.size()) != mesh_->interior_count())
            throw InvalidArgumentError("nodal field: value count does not match interior node count");
        for (double x : v_)
            if (!std::isfinite(x)) throw InvalidArgumentError("nodal field: non-finite value");
    }

    const MeshPtr& mesh() const { return mesh_; }
    int size() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[i]; }
    double& operator[](int i) { return v_[i]; }
    std::span<const double> values() const { return v_; }
    std::vector<double>& raw() { return v_; }
    const std::vector<double>& raw() const { return v_; }

private:
    static MeshPtr require_mesh(MeshPtr m) {
        if (!m) throw InvalidArgumentError("nodal field: null mesh");
        return m;
    }

    MeshPtr mesh_;
    std::vector<double> v_;
};

inline NodalField constant_field(MeshPtr mesh, double c) {
    NodalField f(std::move(mesh));
    std::fill(f.raw().begin(), f.raw().end(), c);
    return f;
}

/// Sample f at interior node coordinates.
inline NodalField sample_field(MeshPtr mesh, const std::function<double(Coord)>& f) {
    NodalField out(std::move(mesh));
    for (int i = 0; i < out.size(); ++i) out[i] = f(out.mesh()->coord(i));
    return out;
}

inline void check_same_mesh(const NodalField& a, const NodalField& b, const char* where) {
    if (!a.mesh()->same_layout(*b.mesh()))
        throw InvalidArgumentError(std::string(where) + ": mismatched meshes");
}

inline double l1_norm(const NodalField& f) {
    double s = 0.0;
    for (double x : f.values()) s += std::abs(x);
    return s * f.mesh()->quad_weight();
}

inline double linf_norm(const NodalField& f) {
    double m = 0.0;
    for (double x : f.values()) m = std::max(m, std::abs(x));
    return m;
}

inline double l1_distance(const NodalField& a, const NodalField& b) {
    check_same_mesh(a, b, "l1_distance");
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s * a.mesh()->quad_weight();
}

inline double linf_distance(const NodalField& a, const NodalField& b) {
    check_same_mesh(a, b, "linf_distance");
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Weighted inner product sum_j quad_weight * a_j * b_j.
inline double dot_weighted(const NodalField& a, const NodalField& b) {
    check_same_mesh(a, b, "dot_weighted");
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.mesh()->quad_weight();
}

inline NodalField axpy(double alpha, const NodalField& x, const NodalField& y) {
    check_same_mesh(x, y, "axpy");
    NodalField out = y;
    for (int i = 0; i < out.size(); ++i) out[i] += alpha * x[i];
    return out;
}

inline NodalField scaled(const NodalField& x, double alpha) {
    NodalField out = x;
    for (double& v : out.raw()) v *= alpha;
    return out;
}

inline NodalField component_min(const NodalField& a, const NodalField& b) {
    check_same_mesh(a, b, "component_min");
    NodalField out = a;
    for (int i = 0; i < out.size(); ++i) out[i] = std::min(a[i], b[i]);
    return out;
}

inline NodalField component_max(const NodalField& a, const NodalField& b) {
    check_same_mesh(a, b, "component_max");
    NodalField out = a;
    for (int i = 0; i < out.size(); ++i) out[i] = std::max(a[i], b[i]);
    return out;
}

/// First index where a_i > b_i + slack, or -1 if a <= b within slack.
inline int first_violation_leq(const NodalField& a, const NodalField& b, double slack) {
    check_same_mesh(a, b, "first_violation_leq");
    for (int i = 0; i < a.size(); ++i)
        if (a[i] > b[i] + slack) return i;
    return -1;
}

}  // namespace mheat
