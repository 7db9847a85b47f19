#include "mhfrac/constants.hpp"
#include "mhfrac/covering.hpp"
#include "mhfrac/error.hpp"
#include "mhfrac/extension.hpp"
#include "mhfrac/geometry.hpp"
#include "mhfrac/harness.hpp"
#include "mhfrac/shape_io.hpp"
#include "mhfrac/spectral.hpp"
#include "mhfrac/torus.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace mhfrac;

namespace {

struct Common {
    std::string out = "csv";
    std::string config;
    std::optional<double> cn;
    double safety = 10.0;
};

// Values from --config fill options the command line left unset.
struct Config {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    double number(const std::string& key) const { return std::stod(kv.at(key)); }
    std::vector<double> numbers(const std::string& key) const { return split_numbers(kv.at(key)); }
    std::vector<std::string> list(const std::string& key) const {
        std::vector<std::string> items;
        std::stringstream ss(kv.at(key));
        std::string item;
        while (std::getline(ss, item, ';'))
            if (item.find_first_not_of(" \t") != std::string::npos) items.push_back(item);
        return items;
    }

    static std::vector<double> split_numbers(const std::string& text) {
        std::vector<double> values;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
            if (item.find_first_not_of(" \t") != std::string::npos) values.push_back(std::stod(item));
        return values;
    }
};

Config load_config(const Common& common) {
    Config c;
    if (!common.config.empty()) c.kv = read_key_values_file(common.config);
    return c;
}

MSConfig resolve_ms(const Common& common, const Config& config) {
    if (common.cn) return MSConfig::user(*common.cn);
    if (config.has("cn")) return MSConfig::user(config.number("cn"));
    return default_ms(config.has("safety") ? config.number("safety") : common.safety);
}

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--out", common.out, "Report format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--config", common.config, "key = value file (h, s, shapes, k, cn, safety, sigma)");
    cmd->add_option("--cn", common.cn, "User-supplied C_N; empirical battery otherwise");
    cmd->add_option("--safety", common.safety, "Safety factor on the empirical battery maximum");
}

int emit(const std::vector<ReportRow>& rows, const Common& common, const MSConfig& ms) {
    if (common.out == "json") {
        write_json(std::cout, rows, ms);
    } else {
        std::cout << "# ms: " << ms.describe() << "\n";
        write_csv(std::cout, rows);
    }
    if (all_hard_pass(rows)) return 0;
    std::cerr << "hard assertion failed\n";
    return 1;
}

template <typename T>
void fill(std::vector<T>& target, const Config& config, const std::string& key) {
    if (!target.empty() || !config.has(key)) return;
    for (double v : config.numbers(key)) target.push_back(static_cast<T>(v));
}

void fill(std::optional<double>& target, const Config& config, const std::string& key) {
    if (!target && config.has(key)) target = config.number(key);
}

std::vector<ShapeSpec> resolve_shapes(const std::vector<std::string>& names, const Config& config) {
    std::vector<ShapeSpec> shapes;
    if (!names.empty()) {
        for (const std::string& n : names) shapes.push_back(parse_shape(n));
    } else if (config.has("shapes")) {
        for (const std::string& n : config.list("shapes")) shapes.push_back(parse_shape(n));
    } else {
        shapes = default_zoo();
    }
    return shapes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional Makai-Hayman experiments"};
    // --h is the grid spacing, so help is long-form only
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    // constants
    std::vector<double> c_s_values;
    Common c_common;
    auto* constants = app.add_subcommand("constants", "Print the constants chain for each s");
    constants->add_option("--s", c_s_values, "Orders")->delimiter(',')->required();
    add_common(constants, c_common);

    // torus-check
    std::vector<double> t_s_values{0.55, 0.75, 0.9};
    int t_seeds = 50;
    int t_panels = 1024;
    auto* torus = app.add_subcommand("torus-check", "Fourier vs quadrature seminorms and Poincare margins");
    torus->add_option("--s", t_s_values, "Orders")->delimiter(',');
    torus->add_option("--seeds", t_seeds, "Random polynomials per order");
    torus->add_option("--panels", t_panels, "Quadrature panels");

    // eigen
    std::string e_shape;
    std::string e_order;
    double e_h = 1.0 / 32;
    std::string e_dump;
    auto* eigen = app.add_subcommand("eigen", "Smallest eigenvalue of a shape");
    eigen->add_option("--shape", e_shape, "Shape: tag[:key=value,...] or @file")->required();
    eigen->add_option("--s", e_order, "Order in (0, 1) or 'local'")->required();
    eigen->add_option("--h", e_h, "Grid spacing");
    eigen->add_option("--dump-mode", e_dump, "Write 'x y value' lines of the eigenvector");

    // cover
    std::string v_shape;
    double v_h = 1.0 / 32;
    auto* cover = app.add_subcommand("cover", "Boundary disk covering as CSV");
    cover->add_option("--shape", v_shape, "Shape")->required();
    cover->add_option("--h", v_h, "Grid spacing");

    // extension-check
    double x_r = std::sqrt(2.0);
    std::vector<double> x_s{0.75};
    int x_seeds = 200;
    double x_spacing = 1.0 / 16;
    auto* extension = app.add_subcommand("extension-check", "Kelvin extension ratios against their bounds");
    extension->add_option("--R", x_r, "Outer radius");
    extension->add_option("--s", x_s, "Orders")->delimiter(',');
    extension->add_option("--seeds", x_seeds, "Random fields");
    extension->add_option("--spacing", x_spacing, "Sample spacing on the unit disk");

    // sweep
    Common w_common;
    std::vector<std::string> w_shapes;
    std::vector<double> w_s;
    std::optional<double> w_h;
    std::optional<double> w_sigma;
    auto* sweep = app.add_subcommand("sweep", "Makai-Hayman and density bounds over shapes and orders");
    sweep->add_option("--shape", w_shapes, "Shapes (repeatable); default zoo");
    sweep->add_option("--s", w_s, "Orders; default grid, s <= 1/2 skipped")->delimiter(',');
    sweep->add_option("--h", w_h, "Grid spacing");
    sweep->add_option("--sigma", w_sigma, "Density ball factor");
    add_common(sweep, w_common);

    // counterexample
    Common k_common;
    std::vector<int> k_values;
    std::vector<double> k_s;
    std::optional<double> k_h;
    auto* counter = app.add_subcommand("counterexample", "Cracked squares on both sides of s = 1/2");
    counter->add_option("--k", k_values, "Crack counts")->delimiter(',');
    counter->add_option("--s", k_s, "Orders")->delimiter(',');
    counter->add_option("--h", k_h, "Grid spacing (coarsest for s <= 1/2)");
    add_common(counter, k_common);

    // cheeger
    Common g_common;
    std::vector<std::string> g_shapes;
    std::vector<double> g_s;
    std::optional<double> g_h;
    auto* cheeger = app.add_subcommand("cheeger", "Fractional Cheeger lower bounds");
    cheeger->add_option("--shape", g_shapes, "Shapes (repeatable); default zoo");
    cheeger->add_option("--s", g_s, "Orders")->delimiter(',');
    cheeger->add_option("--h", g_h, "Grid spacing");
    add_common(cheeger, g_common);

    // compare
    Common m_common;
    std::vector<std::string> m_shapes;
    std::vector<double> m_s;
    std::optional<double> m_h;
    int m_refinements = 2;
    auto* compare = app.add_subcommand("compare", "Fractional vs local eigenvalue chains");
    compare->add_option("--shape", m_shapes, "Shapes (repeatable); default zoo");
    compare->add_option("--s", m_s, "Orders")->delimiter(',');
    compare->add_option("--h", m_h, "Grid spacing");
    compare->add_option("--refinements", m_refinements, "Halvings allowed for the upper chain");
    add_common(compare, m_common);

    CLI11_PARSE(app, argc, argv);

    try {
        std::cout << std::setprecision(10);
        if (*constants) {
            const Config config = load_config(c_common);
            const MSConfig ms = resolve_ms(c_common, config);
            std::cout << "# ms: " << ms.describe() << "\n";
            std::cout << "s,c1s,c2s,mu_s,t_s,c_s,beta_s,alpha_s\n";
            for (double s : c_s_values) {
                const ConstantsProfile p = constants_profile(s, ms);
                std::ostringstream row;
                row << std::setprecision(10) << s << ',' << p.c1s << ',' << (p.c2s ? *p.c2s : NAN) << ','
                    << (p.mu_s ? *p.mu_s : NAN) << ',' << (p.t_s ? *p.t_s : NAN) << ',' << (p.c_s ? *p.c_s : NAN)
                    << ',' << p.beta_s << ',' << (p.alpha_s ? *p.alpha_s : NAN);
                std::cout << row.str() << "\n";
            }
            return 0;
        }
        if (*torus) {
            int failures = 0;
            std::cout << "s,seed,degree,fourier,quadrature,relative_gap,poincare_margin\n";
            for (double s : t_s_values) {
                for (int seed = 0; seed < t_seeds; ++seed) {
                    const int degree = 1 + seed % 8;
                    const TorusFunction w = random_trig_polynomial(degree, static_cast<std::uint64_t>(seed));
                    const double f = seminorm_fourier(w, s);
                    const double q = seminorm_quadrature(w, s, t_panels);
                    const double gap = std::abs(q / f - 1.0);
                    const double margin = s > 0.5 ? poincare_margin(w.vanishing_at(0.0), s, 0.0) : NAN;
                    if (gap > 1e-3 || margin < 0.0) ++failures;
                    std::cout << s << ',' << seed << ',' << degree << ',' << f << ',' << q << ',' << gap << ','
                              << margin << "\n";
                }
            }
            return failures == 0 ? 0 : 1;
        }
        if (*eigen) {
            const ShapeSpec shape = parse_shape(e_shape);
            const DomainMask mask = rasterize(shape, e_h);
            const EigenEstimate est =
                e_order == "local" ? lambda1_local(mask) : lambda1_s(mask, std::stod(e_order));
            std::cout << "shape " << shape.label() << "\n";
            std::cout << "s " << (e_order == "local" ? std::string("local") : e_order) << "\n";
            std::cout << "h " << e_h << "\n";
            std::cout << "lambda " << est.lambda << "\n";
            std::cout << "residual " << est.residual << "\n";
            std::cout << "nodes " << est.vector.size() << "\n";
            std::cout << "iterations " << est.iterations << "\n";
            if (!e_dump.empty()) {
                std::ofstream out(e_dump);
                if (!out) throw Error("cannot write " + e_dump);
                write_mode(out, est);
            }
            return 0;
        }
        if (*cover) {
            const ShapeSpec shape = parse_shape(v_shape);
            const DomainMask mask = rasterize(shape, v_h);
            const Covering cov = color_covering(build_covering(mask));
            const CoveringCheck check = verify_covering(mask, cov);
            std::cout << "# shape " << shape.label() << " inradius " << cov.inradius << " radius " << cov.radius
                      << " classes " << cov.class_count << " uncovered " << check.uncovered_cells
                      << " overlapping " << check.overlapping_pairs << "\n";
            std::cout << "x,y,radius,color\n";
            for (std::size_t i = 0; i < cov.centers.size(); ++i)
                std::cout << cov.centers[i].x << ',' << cov.centers[i].y << ',' << cov.radius << ',' << cov.colors[i]
                          << "\n";
            return check.ok() && cov.class_count <= 36 ? 0 : 1;
        }
        if (*extension) {
            int violations = 0;
            std::cout << "s,seed,seminorm_ratio,l2_ratio,seminorm_bound,l2_bound\n";
            for (double s : x_s) {
                for (int seed = 0; seed < x_seeds; ++seed) {
                    const SampledField u = SampledField::sample(random_smooth_field(static_cast<unsigned>(seed)),
                                                                {0.0, 0.0}, 1.0, 1.0, x_spacing);
                    const ExtensionRatios r = extension_bound_ratios(u, x_r, s);
                    const double semi = r.seminorm_ratio.value_or(NAN);
                    if (semi > r.seminorm_bound || r.l2_ratio > r.l2_bound) ++violations;
                    std::cout << s << ',' << seed << ',' << semi << ',' << r.l2_ratio << ',' << r.seminorm_bound << ','
                              << r.l2_bound << "\n";
                }
            }
            const InversionCheck inv = check_inversion_inequalities(1000000, 1);
            std::cout << "# inversion pairs " << inv.pairs << " i2 violations " << inv.i2_violations
                      << " i3 violations " << inv.i3_violations << "\n";
            return violations == 0 && inv.i2_violations == 0 && inv.i3_violations == 0 ? 0 : 1;
        }
        if (*sweep) {
            const Config config = load_config(w_common);
            fill(w_s, config, "s");
            fill(w_h, config, "h");
            fill(w_sigma, config, "sigma");
            const MSConfig ms = resolve_ms(w_common, config);
            const std::vector<ShapeSpec> shapes = resolve_shapes(w_shapes, config);
            std::vector<double> orders;
            for (double s : w_s.empty() ? default_s_grid() : w_s)
                if (s > 0.5 && s < 1.0) orders.push_back(s);
            const double h = w_h.value_or(1.0 / 32);
            std::vector<ReportRow> rows = run_makai_hayman(shapes, orders, h, ms);
            for (const ShapeSpec& shape : shapes)
                for (double s : orders) rows.push_back(run_density(shape, s, h, w_sigma.value_or(2.0)));
            return emit(rows, w_common, ms);
        }
        if (*counter) {
            const Config config = load_config(k_common);
            fill(k_values, config, "k");
            fill(k_s, config, "s");
            fill(k_h, config, "h");
            const MSConfig ms = resolve_ms(k_common, config);
            if (k_values.empty()) k_values = {2, 3, 4};
            if (k_s.empty()) k_s = {0.5, 0.75};
            return emit(run_counterexample(k_values, k_s, k_h.value_or(1.0 / 16), ms), k_common, ms);
        }
        if (*cheeger) {
            const Config config = load_config(g_common);
            fill(g_s, config, "s");
            fill(g_h, config, "h");
            const MSConfig ms = resolve_ms(g_common, config);
            if (g_s.empty()) g_s = {0.75};
            std::vector<ReportRow> rows;
            for (const ShapeSpec& shape : resolve_shapes(g_shapes, config))
                for (double s : g_s)
                    for (const ReportRow& r : run_cheeger(shape, s, g_h.value_or(1.0 / 32), ms)) rows.push_back(r);
            return emit(rows, g_common, ms);
        }
        if (*compare) {
            const Config config = load_config(m_common);
            fill(m_s, config, "s");
            fill(m_h, config, "h");
            const MSConfig ms = resolve_ms(m_common, config);
            if (m_s.empty()) m_s = {0.75};
            std::vector<ReportRow> rows;
            for (const ShapeSpec& shape : resolve_shapes(m_shapes, config))
                for (double s : m_s)
                    for (const ReportRow& r : run_comparison(shape, s, m_h.value_or(1.0 / 32), ms, m_refinements))
                        rows.push_back(r);
            return emit(rows, m_common, ms);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
