#include "helmtg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace helmtg {

StructuredMesh StructuredMesh::unit_square(int n, ElementKind kind) {
    if (n < 1) throw std::invalid_argument("unit_square: n_cells_per_side must be >= 1");
    return rectangle(n, n, 1.0 / n, kind);
}

StructuredMesh StructuredMesh::rectangle(int nx, int ny, double h, ElementKind kind) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("rectangle: cell counts must be >= 1");
    if (!(h > 0.0)) throw std::invalid_argument("rectangle: spacing must be positive");
    StructuredMesh m;
    m.h_ = h;
    m.kind_ = kind;
    m.cells_.reserve(static_cast<std::size_t>(nx) * ny);
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) m.cells_.push_back({x, y});
    m.rectangle_ = true;
    m.lo_ = {0, 0};
    m.hi_ = {nx - 1, ny - 1};
    m.finalize();
    return m;
}

StructuredMesh StructuredMesh::from_cells(std::vector<CellIndex> cells, double h, ElementKind kind) {
    if (cells.empty()) throw std::invalid_argument("from_cells: empty cell set");
    if (!(h > 0.0)) throw std::invalid_argument("from_cells: spacing must be positive");
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    StructuredMesh m;
    m.h_ = h;
    m.kind_ = kind;
    m.cells_ = std::move(cells);
    m.lo_ = m.hi_ = m.cells_.front();
    for (CellIndex c : m.cells_) {
        m.lo_.x = std::min(m.lo_.x, c.x);
        m.lo_.y = std::min(m.lo_.y, c.y);
        m.hi_.x = std::max(m.hi_.x, c.x);
        m.hi_.y = std::max(m.hi_.y, c.y);
    }
    m.rectangle_ = m.cells_.size() == static_cast<std::size_t>(m.hi_.x - m.lo_.x + 1) *
                                          static_cast<std::size_t>(m.hi_.y - m.lo_.y + 1);
    m.finalize();
    return m;
}

void StructuredMesh::finalize() {
    cell_set_.reserve(cells_.size() * 2);
    for (CellIndex c : cells_) cell_set_.emplace(c, 1);

    // connectivity (edge adjacency)
    std::unordered_map<CellIndex, char, CellIndexHash> seen;
    std::queue<CellIndex> q;
    q.push(cells_.front());
    seen.emplace(cells_.front(), 1);
    while (!q.empty()) {
        CellIndex c = q.front();
        q.pop();
        for (CellIndex nb : {CellIndex{c.x - 1, c.y}, CellIndex{c.x + 1, c.y},
                             CellIndex{c.x, c.y - 1}, CellIndex{c.x, c.y + 1}}) {
            if (has_cell(nb) && !seen.count(nb)) {
                seen.emplace(nb, 1);
                q.push(nb);
            }
        }
    }
    if (seen.size() != cells_.size()) throw std::invalid_argument("mesh domain is not connected");

    if (rectangle_) {
        // counterclockwise enumeration: bottom, right, top, left
        for (int x = lo_.x; x <= hi_.x; ++x) boundary_.push_back({x, lo_.y, 'h'});
        for (int y = lo_.y; y <= hi_.y; ++y) boundary_.push_back({hi_.x + 1, y, 'v'});
        for (int x = hi_.x; x >= lo_.x; --x) boundary_.push_back({x, hi_.y + 1, 'h'});
        for (int y = hi_.y; y >= lo_.y; --y) boundary_.push_back({lo_.x, y, 'v'});
    } else {
        std::set<EdgeKey> b;
        for (CellIndex c : cells_) {
            if (!has_cell(c.x, c.y - 1)) b.insert({c.x, c.y, 'h'});
            if (!has_cell(c.x, c.y + 1)) b.insert({c.x, c.y + 1, 'h'});
            if (!has_cell(c.x - 1, c.y)) b.insert({c.x, c.y, 'v'});
            if (!has_cell(c.x + 1, c.y)) b.insert({c.x + 1, c.y, 'v'});
        }
        boundary_.assign(b.begin(), b.end());
    }
}

bool StructuredMesh::vertex_present(int x, int y) const {
    return has_cell(x - 1, y - 1) || has_cell(x, y - 1) || has_cell(x - 1, y) || has_cell(x, y);
}

bool StructuredMesh::hedge_present(int x, int y) const {
    return has_cell(x, y) || has_cell(x, y - 1);
}

bool StructuredMesh::vedge_present(int x, int y) const {
    return has_cell(x, y) || has_cell(x - 1, y);
}

bool StructuredMesh::is_boundary_edge(EdgeKey e) const {
    if (e.dir == 'h') return hedge_present(e.x, e.y) && (has_cell(e.x, e.y) != has_cell(e.x, e.y - 1));
    return vedge_present(e.x, e.y) && (has_cell(e.x, e.y) != has_cell(e.x - 1, e.y));
}

CellIndex StructuredMesh::cell_adjacent_to_boundary(EdgeKey e) const {
    if (e.dir == 'h') return has_cell(e.x, e.y) ? CellIndex{e.x, e.y} : CellIndex{e.x, e.y - 1};
    return has_cell(e.x, e.y) ? CellIndex{e.x, e.y} : CellIndex{e.x - 1, e.y};
}

std::size_t StructuredMesh::n_vertices() const {
    std::set<CellIndex> v;
    for (CellIndex c : cells_)
        for (int dx = 0; dx <= 1; ++dx)
            for (int dy = 0; dy <= 1; ++dy) v.insert({c.x + dx, c.y + dy});
    return v.size();
}

std::size_t StructuredMesh::n_edges() const {
    std::set<EdgeKey> e;
    for (CellIndex c : cells_) {
        e.insert({c.x, c.y, 'h'});
        e.insert({c.x, c.y + 1, 'h'});
        e.insert({c.x, c.y, 'v'});
        e.insert({c.x + 1, c.y, 'v'});
    }
    std::size_t n = e.size();
    if (kind_ == ElementKind::Triangle) n += cells_.size(); // one diagonal per square
    return n;
}

BoundaryTag BoundaryTags::get(EdgeKey e) const {
    auto it = tags_.find(e);
    if (it == tags_.end())
        throw std::invalid_argument("untagged boundary edge (" + std::to_string(e.x) + "," +
                                    std::to_string(e.y) + "," + e.dir + ")");
    return it->second;
}

bool BoundaryTags::complete(const StructuredMesh& mesh) const {
    for (EdgeKey e : mesh.boundary_edges())
        if (!tags_.count(e)) return false;
    return true;
}

std::size_t BoundaryTags::count(BoundaryTag t) const {
    std::size_t n = 0;
    for (const auto& [e, tag] : tags_)
        if (tag == t) ++n;
    return n;
}

BoundaryTags tag_boundary(const StructuredMesh& mesh, const std::map<Side, BoundaryTag>& side_tags) {
    if (!mesh.is_rectangle())
        throw std::invalid_argument("tag_boundary by side requires a rectangle mesh; tag per edge instead");
    const CellIndex lo = mesh.cell_min(), hi = mesh.cell_max();
    BoundaryTags tags;
    auto side_of = [&](EdgeKey e) {
        if (e.dir == 'h') return e.y == lo.y ? Side::Bottom : Side::Top;
        return e.x == lo.x ? Side::Left : Side::Right;
    };
    for (EdgeKey e : mesh.boundary_edges()) {
        auto it = side_tags.find(side_of(e));
        if (it == side_tags.end())
            throw std::invalid_argument("tag_boundary: side left untagged");
        tags.set(e, it->second);
    }
    return tags;
}

BoundaryTags tag_all(const StructuredMesh& mesh, BoundaryTag t) {
    BoundaryTags tags;
    for (EdgeKey e : mesh.boundary_edges()) tags.set(e, t);
    return tags;
}

CoefficientField CoefficientField::constant(double k, double eps) {
    if (!(k > 0.0)) throw std::invalid_argument("CoefficientField: k must be positive");
    if (eps < 0.0) throw std::invalid_argument("CoefficientField: eps must be nonnegative");
    CoefficientField f;
    f.k_const_ = k;
    f.eps_const_ = eps;
    return f;
}

double CoefficientField::k(CellIndex c) const {
    auto it = k_override_.find(c);
    return it != k_override_.end() ? it->second : k_const_;
}

double CoefficientField::eps(CellIndex c) const {
    auto it = eps_override_.find(c);
    return it != eps_override_.end() ? it->second : eps_const_;
}

void CoefficientField::set_k(CellIndex c, double value) {
    if (!(value > 0.0)) throw std::invalid_argument("k must be positive");
    k_override_[c] = value;
}

void CoefficientField::set_eps(CellIndex c, double value) {
    if (value < 0.0) throw std::invalid_argument("eps must be nonnegative");
    eps_override_[c] = value;
}

CoefficientField CoefficientField::subdivided(int m) const {
    CoefficientField out;
    out.k_const_ = k_const_;
    out.eps_const_ = eps_const_;
    auto expand = [m](const std::unordered_map<CellIndex, double, CellIndexHash>& src,
                      std::unordered_map<CellIndex, double, CellIndexHash>& dst) {
        for (const auto& [c, v] : src)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) dst[{c.x * m + a, c.y * m + b}] = v;
    };
    expand(k_override_, out.k_override_);
    expand(eps_override_, out.eps_override_);
    return out;
}

double layer_epsilon(double k, double depth, double layer_width) {
    const double d = std::clamp(depth, 0.0, layer_width);
    if (d <= 0.0) return 0.0;
    const double s = std::sin(M_PI / 2.0 * d / layer_width);
    return 2.0 * k * k / M_PI * s * s; // peak value gives D = 2 damping per wavelength
}

CoefficientField absorbing_layer(const StructuredMesh& mesh, double k,
                                 const std::vector<Side>& layer_sides, double layer_width) {
    if (!mesh.is_rectangle()) throw std::invalid_argument("absorbing_layer requires a rectangle mesh");
    const double h = mesh.spacing();
    const CellIndex lo = mesh.cell_min(), hi = mesh.cell_max();
    const double wx = (hi.x - lo.x + 1) * h, wy = (hi.y - lo.y + 1) * h;
    if (layer_width > std::min(wx, wy))
        throw std::invalid_argument("absorbing_layer: layer wider than domain");
    const double n_cells = layer_width / h;
    if (std::abs(n_cells - std::round(n_cells)) > 1e-9)
        throw std::invalid_argument("absorbing_layer: layer_width must span a whole number of cells");

    CoefficientField f = CoefficientField::constant(k);
    for (CellIndex c : mesh.cells()) {
        // penetration depth of the cell midpoint into the layer
        double d = 0.0;
        for (Side s : layer_sides) {
            double dist;
            switch (s) {
                case Side::Left: dist = (c.x - lo.x + 0.5) * h; break;
                case Side::Right: dist = (hi.x - c.x + 0.5) * h; break;
                case Side::Bottom: dist = (c.y - lo.y + 0.5) * h; break;
                default: dist = (hi.y - c.y + 0.5) * h; break;
            }
            d = std::max(d, layer_width - dist);
        }
        if (d > 0.0) f.set_eps(c, layer_epsilon(k, d, layer_width));
    }
    return f;
}

} // namespace helmtg
