#include <cmath>
#include <fstream>
#include <ostream>

#include "helmtg/cli.hpp"
#include "helmtg/dispersion.hpp"
#include "helmtg/lfa1d.hpp"
#include "helmtg/lfa2d.hpp"
#include "helmtg/problem.hpp"
#include "helmtg/twogrid.hpp"

namespace helmtg {

Problem build_problem(const ProblemSpec& spec) {
    Problem pr;
    pr.k = 2.0 * M_PI * spec.wavelengths;
    pr.n_cells = static_cast<int>(std::lround(spec.wavelengths * spec.ppw / spec.order));
    if (pr.n_cells < 2) throw std::invalid_argument("build_problem: domain under-resolved");
    pr.mesh = std::make_unique<StructuredMesh>(StructuredMesh::unit_square(pr.n_cells, spec.kind));
    pr.space = std::make_unique<FeSpace>(FeSpace::build(*pr.mesh, spec.order));
    pr.tags = tag_boundary(*pr.mesh, spec.side_tags);
    const double eps_vol = pr.k * pr.k * spec.damping_D / M_PI;
    if (spec.layer_sides.empty()) {
        pr.coeffs = CoefficientField::constant(pr.k, eps_vol);
    } else {
        const int layer_cells = static_cast<int>(
            std::ceil(spec.layer_width_dofs / spec.order - 1e-12));
        pr.coeffs = absorbing_layer(*pr.mesh, pr.k, spec.layer_sides,
                                    layer_cells * pr.mesh->spacing());
        if (eps_vol > 0.0)
            for (CellIndex c : pr.mesh->cells())
                pr.coeffs.set_eps(c, pr.coeffs.eps(c) + eps_vol);
    }
    pr.rhs = ComplexVector::Zero(pr.space->ndof());
    const int mid = pr.n_cells / 2;
    pr.rhs(pr.space->vertex_dof(mid, mid)) = Complex(1, 0);
    for (int d : pr.space->dirichlet_dofs(pr.tags)) pr.rhs(d) = Complex(0, 0);
    return pr;
}

namespace {

BoundaryTag parse_tag(const std::string& s) {
    if (s == "absorbing") return BoundaryTag::Absorbing;
    if (s == "neumann") return BoundaryTag::Neumann;
    if (s == "dirichlet") return BoundaryTag::Dirichlet;
    throw ConfigError("unknown boundary tag '" + s + "'");
}

Side parse_side(const std::string& s) {
    if (s == "left") return Side::Left;
    if (s == "right") return Side::Right;
    if (s == "bottom") return Side::Bottom;
    if (s == "top") return Side::Top;
    throw ConfigError("unknown side '" + s + "'");
}

ElementKind parse_element(const std::string& s) {
    if (s == "square") return ElementKind::Square;
    if (s == "triangle") return ElementKind::Triangle;
    throw ConfigError("unknown element kind '" + s + "'");
}

CoarseKind parse_coarsening(const std::string& s) {
    if (s == "opt") return CoarseKind::OptimizedFD;
    if (s == "galerkin") return CoarseKind::GalerkinP;
    if (s == "none") return CoarseKind::None;
    throw ConfigError("unknown coarsening '" + s + "'");
}

const char* coarsening_name(CoarseKind c) {
    switch (c) {
        case CoarseKind::OptimizedFD: return "opt";
        case CoarseKind::GalerkinP: return "galerkin";
        default: return "none";
    }
}

SolverConfig solver_config_from(const RunConfig& cfg, int order) {
    SolverConfig sc;
    sc.alpha_s = cfg.number("alpha_s", 0.2);
    sc.alpha_c = cfg.number("alpha_c", 0.0);
    sc.n_s = cfg.integer("n_s", 1);
    sc.n_dd = cfg.integer("n_dd", 1);
    sc.omega_c = cfg.number("omega_c", 1.0);
    sc.coarsening = parse_coarsening(cfg.str("coarsening", "opt"));
    // subdomain size either directly in cells or as dofs per direction
    const double sub_dofs = cfg.number("subdomain_dofs", 0.0);
    const int l_dd = cfg.integer("l_dd", 4);
    sc.l_dd = sub_dofs > 0.0 ? std::max(2, static_cast<int>(std::lround(sub_dofs / order))) : l_dd;
    const std::string sm = cfg.str("smoother", "csdd");
    if (sm == "csdd")
        sc.smoother = SmootherKind::CSDD;
    else if (sm == "exact")
        sc.smoother = SmootherKind::ExactShifted;
    else
        throw ConfigError("unknown smoother '" + sm + "'");
    const std::string outer = cfg.str("outer", "richardson");
    if (outer == "richardson")
        sc.outer = OuterKind::Richardson;
    else if (outer == "krylov")
        sc.outer = OuterKind::KrylovAccelerated;
    else
        throw ConfigError("unknown outer iteration '" + outer + "'");
    sc.stop_rel_residual = cfg.number("tol", 1e-6);
    sc.max_iters = cfg.integer("max_iters", 200);
    return sc;
}

ProblemSpec problem_spec_from(const RunConfig& cfg) {
    ProblemSpec spec;
    spec.order = cfg.integer("order", 4);
    spec.kind = parse_element(cfg.str("element", "square"));
    spec.wavelengths = cfg.number_required("wavelengths");
    spec.ppw = cfg.number_required("ppw");
    spec.damping_D = cfg.number("damping_D", 0.0);
    for (const std::string& s : cfg.str_list("layer_sides"))
        spec.layer_sides.push_back(parse_side(s));
    spec.layer_width_dofs = cfg.number("layer_width_dofs", 40.0);
    auto side_default = [&](Side s) {
        for (Side ls : spec.layer_sides)
            if (ls == s) return std::string("neumann"); // Neumann behind layers
        return std::string("absorbing");
    };
    spec.side_tags[Side::Left] = parse_tag(cfg.str("boundary_left", side_default(Side::Left)));
    spec.side_tags[Side::Right] = parse_tag(cfg.str("boundary_right", side_default(Side::Right)));
    spec.side_tags[Side::Bottom] = parse_tag(cfg.str("boundary_bottom", side_default(Side::Bottom)));
    spec.side_tags[Side::Top] = parse_tag(cfg.str("boundary_top", side_default(Side::Top)));
    return spec;
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

} // namespace

int cmd_solve(const RunConfig& cfg, const std::string& out_path, std::ostream& log) {
    const ProblemSpec spec = problem_spec_from(cfg);
    const SolverConfig sc = solver_config_from(cfg, spec.order);
    cfg.reject_unknown();
    const Problem pr = build_problem(spec);
    const TwoGridOperators ops = setup_two_grid(*pr.space, pr.coeffs, pr.tags, sc);
    const SolveResult res = solve(pr.rhs, ops, sc);

    std::ofstream out = open_csv(out_path);
    out << "iter,relres\n";
    for (std::size_t i = 0; i < res.residual_history.size(); ++i)
        out << (i + 1) << ',' << format_number(res.residual_history[i]) << '\n';
    log << "order=" << spec.order << " ppw=" << format_number(spec.ppw)
        << " wavelengths=" << format_number(spec.wavelengths)
        << " coarsening=" << coarsening_name(sc.coarsening) << " dofs=" << pr.space->ndof()
        << " iters=" << res.iterations << (res.converged ? "" : " (not converged)") << "\n";
    return res.converged ? 0 : 3;
}

int cmd_lfa1d(const RunConfig& cfg, const std::string& out_path, std::ostream& log) {
    const int M = cfg.integer("M", 2);
    const std::vector<double> ppws = cfg.number_list("ppw");
    if (ppws.empty()) throw ConfigError("lfa1d: key 'ppw' (list) is required");
    const double D = cfg.number("damping_D", 0.01);
    const double alpha_s = cfg.number("alpha_s", 0.2);
    const int nu1 = cfg.integer("nu1", 1), nu2 = cfg.integer("nu2", 1);
    const int n_theta = cfg.integer("n_theta", 1024);
    cfg.reject_unknown();

    std::ofstream out = open_csv(out_path);
    out << "ppw,rho,R,zeta_f,zeta_c,delta\n";
    for (const auto& r : lfa1d::sweep(M, ppws, D, alpha_s, nu1, nu2, n_theta)) {
        out << format_number(r.ppw) << ',' << format_number(r.rho) << ',' << format_number(r.R)
            << ',' << format_number(r.zeta_f) << ',' << format_number(r.zeta_c) << ','
            << format_number(r.delta) << '\n';
    }
    log << "lfa1d: " << ppws.size() << " rows -> " << out_path << "\n";
    return 0;
}

int cmd_lfa2d(const RunConfig& cfg, const std::string& out_path, std::ostream& log) {
    const int order = cfg.integer("order", 4);
    const ElementKind kind = parse_element(cfg.str("element", "square"));
    const std::vector<double> ppws = cfg.number_list("ppw");
    if (ppws.empty()) throw ConfigError("lfa2d: key 'ppw' (list) is required");
    std::vector<lfa2d::Coarsening> coarsenings;
    for (const std::string& s : cfg.str_list("coarsening"))
        coarsenings.push_back(s == "galerkin" ? lfa2d::Coarsening::GalerkinP
                                              : lfa2d::Coarsening::OptimizedFD);
    if (coarsenings.empty()) coarsenings.push_back(lfa2d::Coarsening::OptimizedFD);
    std::vector<int> n_s_list;
    for (double v : cfg.number_list("n_s")) n_s_list.push_back(static_cast<int>(v));
    if (n_s_list.empty()) n_s_list.push_back(1);
    std::vector<double> omega_list = cfg.number_list("omega_c");
    if (omega_list.empty()) omega_list.push_back(1.0);
    const double D = cfg.number("damping_D", 0.01);
    const double alpha_s = cfg.number("alpha_s", 0.2);
    const double alpha_c = cfg.number("alpha_c", 0.0);
    lfa2d::ThetaGrid grid;
    grid.uniform = cfg.integer("grid", 64);
    grid.annulus = cfg.integer("annulus", 512);
    grid.refine = cfg.flag("refine", true);
    cfg.reject_unknown();

    auto rows = lfa2d::parameter_sweep({order}, ppws, coarsenings, n_s_list, omega_list, kind, D,
                                       alpha_s, alpha_c, grid);
    std::ofstream out = open_csv(out_path);
    out << "order,ppw,coarsening,n_s,omega_c,rho,theta1_max,theta2_max\n";
    for (const auto& r : rows) {
        out << r.order << ',' << format_number(r.ppw) << ','
            << (r.coarsening == lfa2d::Coarsening::OptimizedFD ? "opt" : "galerkin") << ','
            << r.n_s << ',' << format_number(r.omega_c) << ',' << format_number(r.rho) << ','
            << format_number(r.theta1_max) << ',' << format_number(r.theta2_max) << '\n';
    }
    log << "lfa2d: " << rows.size() << " rows -> " << out_path << "\n";
    return 0;
}

namespace {

dispersion::DispersionQuery scheme_query(const std::string& name, ElementKind kind, double ppw,
                                         double k, int directions) {
    dispersion::DispersionQuery q;
    q.kind = kind;
    q.ppw = ppw;
    q.k = k;
    q.n_directions = directions;
    if (name == "opt") {
        q.scheme = dispersion::Scheme::Qsfem;
        q.order = 1;
    } else if (name.size() == 4 && name.substr(0, 3) == "gal") {
        q.scheme = dispersion::Scheme::FiniteElement;
        q.order = name[3] - '0';
        if (q.order < 1 || q.order > 8) throw ConfigError("unknown scheme '" + name + "'");
    } else {
        throw ConfigError("unknown scheme '" + name + "' (use opt or gal<p>)");
    }
    return q;
}

} // namespace

int cmd_dispersion(const RunConfig& cfg, const std::string& out_path, std::ostream& log) {
    const ElementKind kind = parse_element(cfg.str("element", "square"));
    const std::vector<double> ppws = cfg.number_list("ppw");
    if (ppws.empty()) throw ConfigError("dispersion: key 'ppw' (list) is required");
    const double k = cfg.number("k", 1.0);
    const int directions = cfg.integer("directions", 360);
    const std::string mode = cfg.str("mode", "errors");

    if (mode == "errors") {
        std::vector<std::string> schemes = cfg.str_list("schemes");
        if (schemes.empty()) schemes = {"opt", "gal2", "gal4", "gal6", "gal8"};
        cfg.reject_unknown();
        std::ofstream out = open_csv(out_path);
        out << "scheme,ppw,max_dispersion_error\n";
        for (const std::string& s : schemes) {
            for (double ppw : ppws) {
                const auto q = scheme_query(s, kind, ppw, k, directions);
                out << s << ',' << format_number(ppw) << ','
                    << format_number(dispersion::max_dispersion_error(q)) << '\n';
            }
        }
        log << "dispersion: errors -> " << out_path << "\n";
        return 0;
    }
    if (mode != "overlay") throw ConfigError("dispersion: mode must be errors or overlay");

    // Coarse-vs-fine mismatch ratio R with the matching two-grid rate rho
    const int order = cfg.integer("order", 4);
    const std::string coarse = cfg.str("coarsening", "opt");
    const double D = cfg.number("damping_D", 0.01);
    const double alpha_s = cfg.number("alpha_s", 0.2);
    const double alpha_c = cfg.number("alpha_c", 0.0);
    cfg.reject_unknown();
    std::ofstream out = open_csv(out_path);
    out << "scheme_pair,ppw,R,rho\n";
    for (double ppw : ppws) {
        dispersion::DispersionQuery fine;
        fine.scheme = dispersion::Scheme::FiniteElement;
        fine.order = order;
        fine.kind = kind;
        fine.ppw = ppw;
        fine.k = k;
        fine.n_directions = directions;
        dispersion::DispersionQuery cq;
        if (coarse == "opt") {
            cq = scheme_query("opt", kind, ppw / 2.0, k, directions);
        } else {
            cq = scheme_query("gal" + std::to_string(order / 2), kind, ppw / 2.0, k, directions);
        }
        const auto dr = dispersion::delta_and_R(fine, cq, D);
        lfa2d::LfaConfig lc;
        lc.p = order;
        lc.kind = kind;
        lc.ppw = ppw;
        lc.D = D;
        lc.alpha_s = alpha_s;
        lc.alpha_c = alpha_c;
        lc.coarsening = coarse == "opt" ? lfa2d::Coarsening::OptimizedFD
                                        : lfa2d::Coarsening::GalerkinP;
        lfa2d::LfaOperators ops(lc);
        const auto rate = lfa2d::two_grid_rate(ops);
        out << "p" << order << '-' << coarse << ',' << format_number(ppw) << ','
            << format_number(dr.R) << ',' << format_number(rate.rho) << '\n';
    }
    log << "dispersion: overlay -> " << out_path << "\n";
    return 0;
}

int cmd_bench(const RunConfig& cfg, const std::string& out_path, std::ostream& log) {
    std::vector<double> orders = cfg.number_list("orders");
    if (orders.empty()) orders = {4};
    std::vector<double> ppws = cfg.number_list("ppws");
    if (ppws.empty()) ppws = {10};
    std::vector<double> sizes = cfg.number_list("wavelengths");
    std::vector<std::string> bsets = cfg.str_list("boundary_sets");
    if (bsets.empty()) bsets = {"all_absorbing"};
    std::vector<std::string> coarsenings = cfg.str_list("coarsenings");
    if (coarsenings.empty()) coarsenings = {"opt"};
    const ElementKind kind = parse_element(cfg.str("element", "square"));
    const double D = cfg.number("damping_D", 0.0);

    std::ofstream out = open_csv(out_path);
    out << "order,ppw,wavelengths,boundary,coarsening,iterations,converged\n";
    bool all_converged = true;
    // empty sweep list -> header-only CSV
    for (double size : sizes) {
        for (double po : orders) {
            for (double ppw : ppws) {
                for (const std::string& bset : bsets) {
                    for (const std::string& ck : coarsenings) {
                        ProblemSpec spec;
                        spec.order = static_cast<int>(po);
                        spec.kind = kind;
                        spec.wavelengths = size;
                        spec.ppw = ppw;
                        spec.damping_D = D;
                        if (bset == "all_absorbing") {
                            // defaults
                        } else if (bset == "dirichlet2") {
                            spec.side_tags[Side::Left] = BoundaryTag::Dirichlet;
                            spec.side_tags[Side::Bottom] = BoundaryTag::Dirichlet;
                        } else if (bset == "neumann2") {
                            spec.side_tags[Side::Left] = BoundaryTag::Neumann;
                            spec.side_tags[Side::Bottom] = BoundaryTag::Neumann;
                        } else if (bset == "layer2") {
                            spec.layer_sides = {Side::Left, Side::Bottom};
                            spec.side_tags[Side::Left] = BoundaryTag::Neumann;
                            spec.side_tags[Side::Bottom] = BoundaryTag::Neumann;
                        } else {
                            throw ConfigError("unknown boundary set '" + bset + "'");
                        }
                        SolverConfig sc = solver_config_from(cfg, spec.order);
                        sc.coarsening = parse_coarsening(ck);
                        const Problem pr = build_problem(spec);
                        const TwoGridOperators ops = setup_two_grid(*pr.space, pr.coeffs, pr.tags, sc);
                        const SolveResult res = solve(pr.rhs, ops, sc);
                        all_converged = all_converged && res.converged;
                        out << spec.order << ',' << format_number(ppw) << ','
                            << format_number(size) << ',' << bset << ',' << ck << ','
                            << res.iterations << ',' << (res.converged ? 1 : 0) << '\n';
                        log << "bench: p=" << spec.order << " ppw=" << format_number(ppw)
                            << " W=" << format_number(size) << " " << bset << " " << ck << " -> "
                            << res.iterations << (res.converged ? "" : " (not converged)") << "\n";
                    }
                }
            }
        }
    }
    {
        SolverConfig tmp = solver_config_from(cfg, 4); // mark solver keys consumed
        (void)tmp;
        cfg.reject_unknown();
    }
    return all_converged ? 0 : 3;
}

} // namespace helmtg
