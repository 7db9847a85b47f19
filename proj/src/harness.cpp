#include "mhfrac/harness.hpp"

#include "mhfrac/error.hpp"
#include "mhfrac/extension.hpp"
#include "mhfrac/nonlocal.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

namespace mhfrac {

namespace {

constexpr double pi = std::numbers::pi;

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string cache_key(const std::string& label, double s, double h) {
    std::ostringstream os;
    os << label << '|' << std::setprecision(17) << s << '|' << h;
    return os.str();
}

std::mutex cache_mutex;
std::map<std::string, EigenEstimate>& eigen_cache() {
    static std::map<std::string, EigenEstimate> cache;
    return cache;
}

void require_supercritical(double s, const char* who) {
    if (!(s > 0.5 && s < 1.0)) throw DomainError(std::string(who) + ": s must lie in (1/2, 1)");
}

DomainMask simply_connected_mask(const ShapeSpec& shape, double h, const char* who) {
    DomainMask mask = rasterize(shape, h);
    if (!is_simply_connected(mask))
        throw DomainError(std::string(who) + ": " + shape.label() + " is not simply connected");
    return mask;
}

ReportRow make_row(std::string experiment, const ShapeSpec& shape, double s, double h) {
    ReportRow row;
    row.experiment = std::move(experiment);
    row.shape = shape.label();
    row.s = s;
    row.h = h;
    return row;
}

}  // namespace

ReportRow finish_row(ReportRow row) {
    row.margin = row.product - row.bound;
    row.pass = std::isfinite(row.margin) && row.margin >= 0.0;
    return row;
}

bool is_hard(const ReportRow& row) {
    const std::string tag = "-soft";
    return !(row.experiment.size() >= tag.size() &&
             row.experiment.compare(row.experiment.size() - tag.size(), tag.size(), tag) == 0);
}

bool all_hard_pass(const std::vector<ReportRow>& rows) {
    for (const ReportRow& r : rows)
        if (is_hard(r) && !r.pass) return false;
    return true;
}

std::vector<ShapeSpec> default_zoo() {
    return {ShapeSpec::disk(1.0),          ShapeSpec::square(2.0),          ShapeSpec::rectangle(2.0, 1.0),
            ShapeSpec::l_shape(2.0),       ShapeSpec::spiral(1.0, 0.5, 2.5), ShapeSpec::cracked_square(2),
            ShapeSpec::cracked_square(3), ShapeSpec::cracked_square(4)};
}

std::vector<double> default_s_grid() { return {0.4, 0.5, 0.55, 0.6, 0.75, 0.9}; }

EigenEstimate cached_lambda1_s(const ShapeSpec& shape, double s, double h, const SolverOptions& options) {
    const std::string key = cache_key(shape.label(), s, h);
    {
        std::lock_guard lock(cache_mutex);
        auto it = eigen_cache().find(key);
        if (it != eigen_cache().end()) return it->second;
    }
    EigenEstimate e = lambda1_s(rasterize(shape, h), s, options);
    std::lock_guard lock(cache_mutex);
    return eigen_cache().emplace(key, std::move(e)).first->second;
}

EigenEstimate cached_lambda1_local(const ShapeSpec& shape, double h, const SolverOptions& options) {
    const std::string key = cache_key(shape.label(), 1.0, h);
    {
        std::lock_guard lock(cache_mutex);
        auto it = eigen_cache().find(key);
        if (it != eigen_cache().end()) return it->second;
    }
    EigenEstimate e = lambda1_local(rasterize(shape, h), options);
    std::lock_guard lock(cache_mutex);
    return eigen_cache().emplace(key, std::move(e)).first->second;
}

void clear_eigen_cache() {
    std::lock_guard lock(cache_mutex);
    eigen_cache().clear();
}

std::vector<ReportRow> run_makai_hayman(const std::vector<ShapeSpec>& shapes, const std::vector<double>& s_values,
                                        double h, const MSConfig& ms) {
    for (double s : s_values) require_supercritical(s, "run_makai_hayman");
    std::vector<ReportRow> rows;
    for (const ShapeSpec& shape : shapes) {
        const DomainMask mask = simply_connected_mask(shape, h, "run_makai_hayman");
        const double r = inradius(mask);
        for (double s : s_values) {
            const Stopwatch clock;
            ReportRow row = make_row("makai-hayman", shape, s, h);
            row.lambda = cached_lambda1_s(shape, s, h).lambda;
            row.inradius = r;
            row.product = row.lambda * std::pow(r, 2.0 * s);
            row.bound = c_s(s, ms);
            row.runtime = clock.seconds();
            rows.push_back(finish_row(row));
        }
    }
    return rows;
}

std::vector<ReportRow> run_counterexample(const std::vector<int>& k_values, const std::vector<double>& s_values,
                                          double h, const MSConfig& ms) {
    if (k_values.empty()) throw DomainError("run_counterexample: no k values");
    for (int k : k_values)
        if (k < 2) throw DomainError("run_counterexample: k must be at least 2");
    std::vector<ReportRow> rows;
    const double crack_radius = std::sqrt(5.0) / 2.0;
    for (double s : s_values) {
        if (!(s > 0.0 && s < 1.0)) throw DomainError("run_counterexample: s must lie in (0, 1)");
        if (s > 0.5) {
            const int k0 = *std::min_element(k_values.begin(), k_values.end());
            const double ref = cached_lambda1_s(ShapeSpec::square(2.0 * k0), s, h).lambda * std::pow(k0, 2.0 * s);
            for (int k : k_values) {
                const ShapeSpec cracked = ShapeSpec::cracked_square(k);
                const double r = inradius(rasterize(cracked, h));
                Stopwatch clock;
                ReportRow row = make_row("counterexample-cracked", cracked, s, h);
                row.lambda = cached_lambda1_s(cracked, s, h).lambda;
                row.inradius = r;
                row.product = row.lambda * std::pow(crack_radius, 2.0 * s);
                row.bound = c_s(s, ms);
                row.runtime = clock.seconds();
                rows.push_back(finish_row(row));

                const ShapeSpec square = ShapeSpec::square(2.0 * k);
                Stopwatch clock2;
                ReportRow scaled = make_row("counterexample-scaling", square, s, h);
                scaled.lambda = cached_lambda1_s(square, s, h).lambda;
                scaled.inradius = r;
                scaled.product = 0.03 * ref;
                scaled.bound = std::abs(scaled.lambda * std::pow(k, 2.0 * s) - ref);
                scaled.runtime = clock2.seconds();
                rows.push_back(finish_row(scaled));
            }
        } else {
            const ShapeSpec cracked = ShapeSpec::cracked_square(2);
            const ShapeSpec square = ShapeSpec::square(4.0);
            std::vector<double> ratios;
            std::vector<double> lambdas;
            std::vector<double> radii;
            std::vector<double> times;
            for (int level = 0; level < 3; ++level) {
                const double hl = h / std::pow(2.0, level);
                Stopwatch clock;
                lambdas.push_back(cached_lambda1_s(cracked, s, hl).lambda);
                ratios.push_back(lambdas.back() / cached_lambda1_s(square, s, hl).lambda);
                radii.push_back(inradius(rasterize(cracked, hl)));
                times.push_back(clock.seconds());
            }
            for (int level = 0; level + 1 < 3; ++level) {
                ReportRow row = make_row("counterexample-refine", cracked, s, h / std::pow(2.0, level));
                row.lambda = lambdas[level];
                row.inradius = radii[level];
                row.product = ratios[level];
                row.bound = ratios[level + 1];
                row.runtime = times[level + 1];
                rows.push_back(finish_row(row));
            }
            std::vector<int> ks = k_values;
            std::sort(ks.begin(), ks.end());
            for (std::size_t i = 1; i < ks.size(); ++i) {
                const ShapeSpec prev = ShapeSpec::cracked_square(ks[i - 1]);
                const ShapeSpec cur = ShapeSpec::cracked_square(ks[i]);
                Stopwatch clock;
                ReportRow row = make_row("counterexample-k-soft", cur, s, h);
                row.lambda = cached_lambda1_s(cur, s, h).lambda;
                row.inradius = inradius(rasterize(cur, h));
                row.product = cached_lambda1_s(prev, s, h).lambda;
                row.bound = row.lambda;
                row.runtime = clock.seconds();
                rows.push_back(finish_row(row));
            }
        }
    }
    return rows;
}

double cheeger_hs_upper(double r, double s, double h) {
    if (!(r > 0.0)) throw DomainError("cheeger_hs_upper: radius must be positive");
    const DomainMask disk = rasterize(ShapeSpec::disk(r), std::min(h, r / 16.0));
    return fractional_perimeter(disk, s) / disk.occupied_area();
}

std::vector<ReportRow> run_cheeger(const ShapeSpec& shape, double s, double h, const MSConfig& ms) {
    require_supercritical(s, "run_cheeger");
    const DomainMask mask = simply_connected_mask(shape, h, "run_cheeger");
    const double r = inradius(mask);
    const double cs = c_s(s, ms);
    Stopwatch clock;
    const double lambda = cached_lambda1_s(shape, s, h).lambda;
    const double lambda_time = clock.seconds();

    ReportRow first = make_row("cheeger-h1", shape, s, h);
    first.lambda = lambda;
    first.inradius = r;
    first.product = lambda;
    first.bound = cs * std::pow((2.0 / r) / 2.0, 2.0 * s);
    first.runtime = lambda_time;

    Stopwatch perimeter_clock;
    // P_s(B_1) from the competitor raster of B_r scaled to unit radius
    const double unit_perimeter =
        fractional_perimeter(scale(rasterize(ShapeSpec::disk(r), std::min(h, r / 16.0)), 1.0 / r), s);
    const double hs = cheeger_hs_upper(r, s, h);
    ReportRow second = make_row("cheeger-hs", shape, s, h);
    second.lambda = lambda;
    second.inradius = r;
    second.product = lambda;
    second.bound = cs * std::pow(pi / unit_perimeter * hs, 2.0);
    second.runtime = lambda_time + perimeter_clock.seconds();
    return {finish_row(first), finish_row(second)};
}

std::vector<ReportRow> run_comparison(const ShapeSpec& shape, double s, double h, const MSConfig& ms,
                                      int refinements) {
    require_supercritical(s, "run_comparison");
    const DomainMask mask = simply_connected_mask(shape, h, "run_comparison");
    const double r = inradius(mask);
    Stopwatch clock;
    double frac = cached_lambda1_s(shape, s, h).lambda;
    double local = cached_lambda1_local(shape, h).lambda;

    ReportRow lower = make_row("compare-lower", shape, s, h);
    lower.lambda = frac;
    lower.inradius = r;
    lower.product = frac;
    lower.bound = alpha_s(s, disk_dirichlet_eigenvalue(), ms) * std::pow(local * (1.0 + 2.0 * h), s);
    lower.runtime = clock.seconds();

    bool agreed = false;
    double hf = h;
    for (int level = 1; level <= refinements && !agreed; ++level) {
        hf = h / std::pow(2.0, level);
        const double frac_f = cached_lambda1_s(shape, s, hf).lambda;
        const double local_f = cached_lambda1_local(shape, hf).lambda;
        agreed = std::abs(frac_f - frac) <= 0.02 * frac_f && std::abs(local_f - local) <= 0.02 * local_f;
        frac = frac_f;
        local = local_f;
    }
    ReportRow upper = make_row(agreed ? "compare-upper" : "compare-upper-soft", shape, s, hf);
    upper.lambda = frac;
    upper.inradius = r;
    upper.product = 1.1 * beta_s(s) * std::pow(local, s);
    upper.bound = frac;
    upper.runtime = clock.seconds();
    return {finish_row(lower), finish_row(upper)};
}

DensityBound density_lower_bound(const DomainMask& mask, double sigma, double s) {
    if (!(sigma > 1.0)) throw DomainError("density_lower_bound: sigma must exceed 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("density_lower_bound: s must lie in (0, 1)");
    if (mask.empty()) throw EmptyDomainError("density_lower_bound: empty mask");
    const int nx = mask.nx();
    const int ny = mask.ny();
    const double h = mask.h();
    // prefix[j][i] = occupied cells among the first i of row j
    std::vector<int> prefix(static_cast<std::size_t>(ny) * (nx + 1), 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            prefix[static_cast<std::size_t>(j) * (nx + 1) + i + 1] =
                prefix[static_cast<std::size_t>(j) * (nx + 1) + i] + (mask.occupied(i, j) ? 1 : 0);
    const auto row_count = [&](int j, int a, int b) {
        if (j < 0 || j >= ny) return 0;
        a = std::max(a, 0);
        b = std::min(b, nx - 1);
        if (a > b) return 0;
        return prefix[static_cast<std::size_t>(j) * (nx + 1) + b + 1] - prefix[static_cast<std::size_t>(j) * (nx + 1) + a];
    };
    DensityBound out;
    out.inradius = inradius(mask);
    const double rho = sigma * out.inradius / h;
    const int reach = static_cast<int>(std::floor(rho + 1e-9));
    std::vector<int> half(static_cast<std::size_t>(reach) + 1);
    long total = 0;
    for (int dj = -reach; dj <= reach; ++dj) {
        const int w = static_cast<int>(std::floor(std::sqrt(rho * rho - static_cast<double>(dj) * dj) + 1e-9));
        half[static_cast<std::size_t>(std::abs(dj))] = w;
        total += 2 * w + 1;
    }
    double alpha = 1.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!mask.occupied(i, j)) continue;
            long inside = 0;
            for (int dj = -reach; dj <= reach; ++dj) {
                const int w = half[static_cast<std::size_t>(std::abs(dj))];
                inside += row_count(j + dj, i - w, i + w);
            }
            alpha = std::min(alpha, 1.0 - static_cast<double>(inside) / static_cast<double>(total));
        }
    }
    out.alpha = alpha;
    out.value = alpha * pi * std::pow(sigma, -2.0 * s) * std::pow(out.inradius, -2.0 * s);
    return out;
}

ReportRow run_density(const ShapeSpec& shape, double s, double h, double sigma) {
    Stopwatch clock;
    const DomainMask mask = rasterize(shape, h);
    const DensityBound d = density_lower_bound(mask, sigma, s);
    ReportRow row = make_row("density", shape, s, h);
    row.lambda = cached_lambda1_s(shape, s, h).lambda;
    row.inradius = d.inradius;
    row.product = row.lambda;
    row.bound = d.value;
    row.runtime = clock.seconds();
    return finish_row(row);
}

MSConfig default_ms(double safety_factor) {
    static std::mutex mutex;
    static std::map<double, MSConfig> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(safety_factor);
    if (it != cache.end()) return it->second;
    const PoincareBattery battery = run_poincare_battery({0.6, 0.75, 0.9}, 200, 1.0, 1.0 / 16, 1);
    return cache.emplace(safety_factor, empirical_ms(battery, safety_factor)).first->second;
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << "experiment,shape,s,h,lambda,inradius,product,bound,margin,pass,runtime\n";
    const auto quote = [](const std::string& text) {
        if (text.find_first_of(",\"") == std::string::npos) return text;
        std::string q = "\"";
        for (char c : text) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    };
    std::ostringstream line;
    line << std::setprecision(10);
    for (const ReportRow& r : rows) {
        line.str("");
        line << quote(r.experiment) << ',' << quote(r.shape) << ',' << r.s << ',' << r.h << ',' << r.lambda << ','
             << r.inradius << ',' << r.product << ',' << r.bound << ',' << r.margin << ',' << (r.pass ? 1 : 0) << ','
             << r.runtime << '\n';
        out << line.str();
    }
}

void write_json(std::ostream& out, const std::vector<ReportRow>& rows, const MSConfig& ms) {
    nlohmann::json doc;
    doc["ms"] = {{"mode", ms.mode == MSConfig::Mode::empirical ? "empirical" : "user"},
                 {"cn", ms.cn},
                 {"certified", ms.mode != MSConfig::Mode::empirical},
                 {"description", ms.describe()}};
    nlohmann::json list = nlohmann::json::array();
    for (const ReportRow& r : rows) {
        list.push_back({{"experiment", r.experiment},
                        {"shape", r.shape},
                        {"s", r.s},
                        {"h", r.h},
                        {"lambda", r.lambda},
                        {"inradius", r.inradius},
                        {"product", r.product},
                        {"bound", r.bound},
                        {"margin", r.margin},
                        {"pass", r.pass},
                        {"runtime", r.runtime}});
    }
    doc["rows"] = std::move(list);
    doc["all_hard_pass"] = all_hard_pass(rows);
    out << doc.dump(2) << '\n';
}

}  // namespace mhfrac
