#ifndef HELMTG_MESH_HPP
#define HELMTG_MESH_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace helmtg {

enum class ElementKind { Square, Triangle };

enum class BoundaryTag { Dirichlet, Neumann, Absorbing };

enum class Side { Left, Right, Bottom, Top };

/// Lattice coordinate of a cell or vertex of the underlying square mesh.
struct CellIndex {
    int x = 0, y = 0;
    friend bool operator==(CellIndex a, CellIndex b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(CellIndex a, CellIndex b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    }
};

/// A lattice edge: horizontal ('h', from (x,y) to (x+1,y)) or vertical ('v',
/// from (x,y) to (x,y+1)). Diagonal edges of triangle meshes are never part of
/// the domain boundary and carry no tag.
struct EdgeKey {
    int x = 0, y = 0;
    char dir = 'h';
    friend bool operator==(EdgeKey a, EdgeKey b) {
        return a.x == b.x && a.y == b.y && a.dir == b.dir;
    }
    friend bool operator<(EdgeKey a, EdgeKey b) {
        if (a.dir != b.dir) return a.dir < b.dir;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    }
};

struct CellIndexHash {
    std::size_t operator()(CellIndex c) const {
        return std::hash<std::int64_t>()((static_cast<std::int64_t>(c.x) << 32) ^
                                         static_cast<std::uint32_t>(c.y));
    }
};
struct EdgeKeyHash {
    std::size_t operator()(EdgeKey e) const {
        return std::hash<std::int64_t>()(((static_cast<std::int64_t>(e.x) << 33) ^
                                          (static_cast<std::int64_t>(static_cast<std::uint32_t>(e.y)) << 1)) ^
                                         (e.dir == 'v' ? 1 : 0));
    }
};

/// Regular mesh over a connected union of h x h lattice squares. For the
/// Triangle kind every square is split along its lower-left to upper-right
/// diagonal, uniformly over the mesh. Immutable after construction.
class StructuredMesh {
  public:
    static StructuredMesh unit_square(int n_cells_per_side, ElementKind kind);
    static StructuredMesh rectangle(int nx, int ny, double h, ElementKind kind);
    /// General union of lattice squares (must be connected).
    static StructuredMesh from_cells(std::vector<CellIndex> cells, double h, ElementKind kind);

    double spacing() const { return h_; }
    ElementKind element_kind() const { return kind_; }

    const std::vector<CellIndex>& cells() const { return cells_; }
    bool has_cell(int x, int y) const { return cell_set_.count({x, y}) > 0; }
    bool has_cell(CellIndex c) const { return cell_set_.count(c) > 0; }

    /// Counting cells of the finite-element mesh: squares, or 2 triangles per square.
    std::size_t n_elements() const {
        return kind_ == ElementKind::Square ? cells_.size() : 2 * cells_.size();
    }
    std::size_t n_vertices() const;
    std::size_t n_edges() const; // lattice edges + diagonals for triangle meshes

    /// Boundary edges, counterclockwise for rectangles (bottom, right, top, left),
    /// lexicographic for general unions.
    const std::vector<EdgeKey>& boundary_edges() const { return boundary_; }

    bool vertex_present(int x, int y) const;
    bool hedge_present(int x, int y) const;
    bool vedge_present(int x, int y) const;
    bool is_boundary_edge(EdgeKey e) const;

    /// The unique cell adjacent to a boundary edge.
    CellIndex cell_adjacent_to_boundary(EdgeKey e) const;

    bool is_rectangle() const { return rectangle_; }
    CellIndex cell_min() const { return lo_; }
    CellIndex cell_max() const { return hi_; } // inclusive

  private:
    double h_ = 1.0;
    ElementKind kind_ = ElementKind::Square;
    std::vector<CellIndex> cells_; // sorted by (y, x)
    std::unordered_map<CellIndex, char, CellIndexHash> cell_set_;
    std::vector<EdgeKey> boundary_;
    bool rectangle_ = false;
    CellIndex lo_{0, 0}, hi_{0, 0};

    void finalize();
};

/// Per-edge boundary tags. Tags must partition the boundary edge set.
class BoundaryTags {
  public:
    BoundaryTags() = default;
    void set(EdgeKey e, BoundaryTag t) { tags_[e] = t; }
    BoundaryTag get(EdgeKey e) const;
    bool complete(const StructuredMesh& mesh) const;
    std::size_t count(BoundaryTag t) const;

  private:
    std::unordered_map<EdgeKey, BoundaryTag, EdgeKeyHash> tags_;
};

/// Tag every boundary edge of a rectangle-shaped mesh by side. Throws if a side
/// is missing from the map (untagged edges are not allowed).
BoundaryTags tag_boundary(const StructuredMesh& mesh, const std::map<Side, BoundaryTag>& side_tags);

BoundaryTags tag_all(const StructuredMesh& mesh, BoundaryTag t);

/// Cell-wise k and epsilon. Values are constant per underlying square cell;
/// both triangles of a split square share them.
class CoefficientField {
  public:
    static CoefficientField constant(double k, double eps = 0.0);

    double k(CellIndex c) const;
    double eps(CellIndex c) const;
    void set_k(CellIndex c, double value);
    void set_eps(CellIndex c, double value);

    /// The same field on a mesh refined by factor m per direction: cell (x,y)
    /// of the fine lattice inherits the values of its parent cell.
    CoefficientField subdivided(int m) const;

  private:
    double k_const_ = 1.0;
    double eps_const_ = 0.0;
    std::unordered_map<CellIndex, double, CellIndexHash> k_override_, eps_override_;
};

/// sin^2 ramp from 0 to 2k^2/pi as the penetration depth runs over [0, layer_width].
double layer_epsilon(double k, double depth, double layer_width);

/// Constant-k field with a sin^2 absorbing-layer epsilon profile rising from 0
/// to 2k^2/pi over the layer depth on the given sides of a rectangle mesh.
CoefficientField absorbing_layer(const StructuredMesh& mesh, double k,
                                 const std::vector<Side>& layer_sides, double layer_width);

inline const char* to_string(BoundaryTag t) {
    switch (t) {
        case BoundaryTag::Dirichlet: return "dirichlet";
        case BoundaryTag::Neumann: return "neumann";
        default: return "absorbing";
    }
}

} // namespace helmtg

#endif
