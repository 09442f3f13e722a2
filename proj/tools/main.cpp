#include <iostream>

#include <CLI11.hpp>

#include "helmtg/cli.hpp"
#include "helmtg/parallel.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, const std::string& default_out) {
    cmd->add_option("--config", o.config_path, "path to the key-value run config")->required();
    cmd->add_option("--out", o.out_path, "output CSV path")->default_val(default_out);
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

int run(int (*fn)(const helmtg::RunConfig&, const std::string&, std::ostream&),
        const CommonOpts& o) {
    helmtg::set_thread_count(o.threads);
    try {
        const helmtg::RunConfig cfg = helmtg::RunConfig::load(o.config_path);
        return fn(cfg, o.out_path, std::cout);
    } catch (const helmtg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "helmtg: two-grid Helmholtz solver with dispersion-matched coarsening,\n"
        "plus Fourier-analysis and dispersion-error studies. Each subcommand reads\n"
        "a 'key = value' config document and writes one CSV file."};
    app.require_subcommand(1);

    CommonOpts so, l1, l2, di, be;
    auto* c_solve = app.add_subcommand(
        "solve",
        "Run the two-grid solver on a unit-square problem. CSV columns: iter,relres.\n"
        "Keys: order, element, wavelengths, ppw, boundary_<side>, layer_sides,\n"
        "layer_width_dofs, damping_D, coarsening, alpha_s, alpha_c, n_s, n_dd,\n"
        "omega_c, l_dd, subdomain_dofs, smoother, outer, tol, max_iters.\n"
        "The right-hand side is a unit point load at the vertex dof nearest the\n"
        "domain center.");
    add_common(c_solve, so, "solve.csv");
    auto* c_lfa1d = app.add_subcommand(
        "lfa1d",
        "1-D two-grid Fourier analysis sweep. CSV: ppw,rho,R,zeta_f,zeta_c,delta.\n"
        "Keys: M, ppw (list), damping_D, alpha_s, nu1, nu2, n_theta.");
    add_common(c_lfa1d, l1, "lfa1d.csv");
    auto* c_lfa2d = app.add_subcommand(
        "lfa2d",
        "2-D Bloch-wave two-grid analysis. CSV: order,ppw,coarsening,n_s,omega_c,\n"
        "rho,theta1_max,theta2_max. Keys: order, element, coarsening (list),\n"
        "ppw (list), n_s (list), omega_c (list), damping_D, alpha_s, alpha_c,\n"
        "grid, annulus, refine.");
    add_common(c_lfa2d, l2, "lfa2d.csv");
    auto* c_disp = app.add_subcommand(
        "dispersion",
        "Dispersion errors of FE / optimized-FD discretizations.\n"
        "mode=errors CSV: scheme,ppw,max_dispersion_error over schemes (opt, gal<p>).\n"
        "mode=overlay CSV: scheme_pair,ppw,R,rho for a fine/coarse two-grid pair.\n"
        "Keys: mode, schemes (list), element, ppw (list), k, directions;\n"
        "overlay adds order, coarsening, damping_D, alpha_s, alpha_c.");
    add_common(c_disp, di, "dispersion.csv");
    auto* c_bench = app.add_subcommand(
        "bench",
        "Iteration-count sweeps over sizes, orders and boundary sets. CSV:\n"
        "order,ppw,wavelengths,boundary,coarsening,iterations,converged.\n"
        "Keys: orders, ppws, wavelengths (lists), boundary_sets (all_absorbing,\n"
        "dirichlet2, neumann2, layer2), coarsenings (list), element, damping_D,\n"
        "plus the solver keys of 'solve'.");
    add_common(c_bench, be, "bench.csv");

    CLI11_PARSE(app, argc, argv);

    if (c_solve->parsed()) return run(helmtg::cmd_solve, so);
    if (c_lfa1d->parsed()) return run(helmtg::cmd_lfa1d, l1);
    if (c_lfa2d->parsed()) return run(helmtg::cmd_lfa2d, l2);
    if (c_disp->parsed()) return run(helmtg::cmd_dispersion, di);
    if (c_bench->parsed()) return run(helmtg::cmd_bench, be);
    return 1;
}
