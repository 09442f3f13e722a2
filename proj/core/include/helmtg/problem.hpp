#ifndef HELMTG_PROBLEM_HPP
#define HELMTG_PROBLEM_HPP

#include <map>
#include <memory>

#include "helmtg/fespace.hpp"
#include "helmtg/mesh.hpp"

namespace helmtg {

/// Unit-square benchmark problem: k = 2 pi wavelengths, n = round(W ppw / p)
/// cells per side, point load at the vertex dof nearest the domain center.
struct ProblemSpec {
    int order = 4;
    ElementKind kind = ElementKind::Square;
    double wavelengths = 20.0;
    double ppw = 10.0;
    std::map<Side, BoundaryTag> side_tags = {{Side::Left, BoundaryTag::Absorbing},
                                             {Side::Right, BoundaryTag::Absorbing},
                                             {Side::Bottom, BoundaryTag::Absorbing},
                                             {Side::Top, BoundaryTag::Absorbing}};
    std::vector<Side> layer_sides;     // sin^2 epsilon layers (Neumann behind by default)
    double layer_width_dofs = 40.0;    // converted to cells by rounding up
    double damping_D = 0.0;            // uniform volume damping eps = k^2 D / pi
};

struct Problem {
    std::unique_ptr<StructuredMesh> mesh;
    std::unique_ptr<FeSpace> space;
    CoefficientField coeffs = CoefficientField::constant(1.0);
    BoundaryTags tags;
    ComplexVector rhs;
    double k = 0.0;
    int n_cells = 0;
};

Problem build_problem(const ProblemSpec& spec);

} // namespace helmtg

#endif
