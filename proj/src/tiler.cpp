#include "mmmdse/tiler.hpp"

#include "mmmdse/errors.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <sstream>
#include <thread>
#include <tuple>

namespace mmmdse {

namespace {

constexpr std::uint64_t unbounded = std::numeric_limits<std::uint64_t>::max();

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

std::uint64_t abs_diff(std::uint64_t a, std::uint64_t b) { return a > b ? a - b : b - a; }

std::vector<std::uint64_t> divisors(std::uint64_t v) {
    std::vector<std::uint64_t> lo, hi;
    for (std::uint64_t d = 1; d * d <= v; ++d) {
        if (v % d != 0) continue;
        lo.push_back(d);
        if (d != v / d) hi.push_back(v / d);
    }
    lo.insert(lo.end(), hi.rbegin(), hi.rend());
    return lo;
}

struct PeLimit {
    std::uint64_t count = 0;  // largest feasible N_p
    std::string binding;      // which limit produced it
};

// Largest N_p for a PE of `units` compute units, from resources, memory blocks,
// chain depth (1D) and an explicit cap.
PeLimit max_processing_elements(const HardwareSpec& hw, const DataTypeSpec& dt, std::uint64_t units,
                                Layout layout, std::uint64_t cap) {
    PeLimit lim{unbounded, "bound"};
    auto tighten = [&](std::uint64_t v, std::string why) {
        if (v < lim.count) {
            lim.count = v;
            lim.binding = std::move(why);
        }
    };
    for (const auto& [kind, r_max] : hw.resources_max.entries()) {
        const auto per_pe = dt.overhead_per_pe.amount(kind) + dt.cost_per_compute_unit.amount(kind) * units;
        if (per_pe > 0) tighten(r_max / per_pe, "resources." + kind);
    }
    const auto bw = block_words(hw, dt);
    tighten(hw.memory_blocks_max / ceil_div(dt.width_bits * units, bw.port_width_bits), constraint::memory_blocks);
    if (layout == Layout::chain_1d) tighten(bw.words_per_block, constraint::chain_depth);
    tighten(cap, "search bound");
    return lim;
}

struct Score {
    bool fits = true;
    Ratio ci;
    std::uint64_t skew = 0;
};

// Greater is better: fitting shapes first, then intensity, then squareness.
bool better_shape(const TileConfig& a, const Score& sa, const TileConfig& b, const Score& sb) {
    if (sa.fits != sb.fits) return sa.fits;
    if (sa.ci != sb.ci) return sa.ci > sb.ci;
    if (sa.skew != sb.skew) return sa.skew < sb.skew;
    return a < b;
}

Score score_of(const TileConfig& cfg, const std::optional<ProblemSize>& problem) {
    Score s;
    s.fits = !problem || (cfg.x_tot() <= problem->m && cfg.y_tot() <= problem->n);
    s.ci = computational_intensity(cfg.x_tot(), cfg.y_tot());
    s.skew = abs_diff(cfg.x_tot(), cfg.y_tot());
    return s;
}

struct ShapeLimits {
    std::uint64_t max_x_t, max_y_t, max_x_b, max_y_b;
};

ShapeLimits shape_limits(const SearchBounds& bounds) {
    return {bounds.max_x_t.value_or(unbounded), bounds.max_y_t.value_or(unbounded),
            bounds.max_x_b.value_or(unbounded), bounds.max_y_b.value_or(unbounded)};
}

// Shapes that fill the block depth (x_t*y_t = s_b) and use every usable block
// tile (x_b*y_b = floor(N_b,max/N_b,min)).
std::vector<TileConfig> filling_shapes(const HardwareSpec& hw, const DataTypeSpec& dt, const TileConfig& compute,
                                       const SearchBounds& bounds) {
    const auto n_min = min_memory_blocks(compute, hw, dt);
    if (n_min > hw.memory_blocks_max) return {};
    const auto s_b = block_words(hw, dt).words_per_block;
    const auto block_tiles = hw.memory_blocks_max / n_min;
    const auto lim = shape_limits(bounds);

    std::vector<TileConfig> out;
    const auto b_divs = divisors(block_tiles);
    for (auto x_t : divisors(s_b)) {
        const auto y_t = s_b / x_t;
        if (x_t > lim.max_x_t || y_t > lim.max_y_t) continue;
        if (bounds.layout == Layout::chain_1d && x_t * y_t < compute.processing_elements()) continue;
        for (auto x_b : b_divs) {
            const auto y_b = block_tiles / x_b;
            if (x_b > lim.max_x_b || y_b > lim.max_y_b) continue;
            TileConfig cfg = compute;
            cfg.x_t = x_t;
            cfg.y_t = y_t;
            cfg.x_b = x_b;
            cfg.y_b = y_b;
            out.push_back(cfg);
        }
    }
    return out;
}

// Single block tile sized to fit the problem, used when no filling shape fits.
std::optional<TileConfig> fitted_shape(const HardwareSpec& hw, const DataTypeSpec& dt, const TileConfig& compute,
                                       const std::optional<ProblemSize>& problem, const SearchBounds& bounds) {
    const auto s_b = block_words(hw, dt).words_per_block;
    const auto lim = shape_limits(bounds);
    const auto x_unit = compute.x_c * compute.x_p;
    const auto y_unit = compute.y_c * compute.y_p;
    auto x_limit = std::min(s_b, lim.max_x_t);
    auto y_limit = std::min(s_b, lim.max_y_t);
    if (problem) {
        x_limit = std::min(x_limit, problem->m / x_unit);
        y_limit = std::min(y_limit, problem->n / y_unit);
    }
    std::optional<TileConfig> best;
    Score best_score;
    for (std::uint64_t x_t = 1; x_t <= x_limit; ++x_t) {
        const auto y_t = std::min(y_limit, s_b / x_t);
        if (y_t < 1) break;
        if (bounds.layout == Layout::chain_1d && x_t * y_t < compute.processing_elements()) continue;
        TileConfig cfg = compute;
        cfg.x_t = x_t;
        cfg.y_t = y_t;
        cfg.x_b = cfg.y_b = 1;
        const auto s = score_of(cfg, problem);
        if (!best || better_shape(cfg, s, *best, best_score)) {
            best = cfg;
            best_score = s;
        }
    }
    return best;
}

std::optional<TileConfig> pick_best(const std::vector<TileConfig>& shapes, const std::optional<ProblemSize>& problem) {
    std::optional<TileConfig> best;
    Score best_score;
    for (const auto& cfg : shapes) {
        const auto s = score_of(cfg, problem);
        if (!best || better_shape(cfg, s, *best, best_score)) {
            best = cfg;
            best_score = s;
        }
    }
    return best;
}

bool compute_feasible(const HardwareSpec& hw, const DataTypeSpec& dt, const TileConfig& c, Layout layout) {
    const auto n_p = c.processing_elements();
    const auto units = c.units_per_pe();
    for (const auto& [kind, r_max] : hw.resources_max.entries()) {
        if (n_p * (dt.overhead_per_pe.amount(kind) + dt.cost_per_compute_unit.amount(kind) * units) > r_max) {
            return false;
        }
    }
    if (c.x_c * dt.width_bits > hw.max_bus_width_bits || c.y_c * dt.width_bits > hw.max_bus_width_bits) return false;
    const auto bw = block_words(hw, dt);
    if (n_p * ceil_div(dt.width_bits * units, bw.port_width_bits) > hw.memory_blocks_max) return false;
    if (layout == Layout::chain_1d && (c.x_c != 1 || c.y_p != 1 || n_p > bw.words_per_block)) return false;
    return true;
}

std::string describe(const TileConfig& c) {
    std::ostringstream os;
    os << "(x_c=" << c.x_c << ", y_c=" << c.y_c << ", x_p=" << c.x_p << ", y_p=" << c.y_p << ", x_t=" << c.x_t
       << ", y_t=" << c.y_t << ", x_b=" << c.x_b << ", y_b=" << c.y_b << ")";
    return os.str();
}

}  // namespace

void SearchBounds::validate() const {
    for (const auto& v : {max_x_c, max_y_c, max_x_p, max_y_p, max_x_t, max_y_t, max_x_b, max_y_b, fixed_y_c,
                          fixed_n_p}) {
        if (v && *v < 1) throw ConfigError("search bounds must be >= 1");
    }
    if (frequency_hz && !(*frequency_hz > 0.0)) throw ConfigError("frequency must be > 0");
}

std::optional<TileConfig> choose_memory_shape(const HardwareSpec& hw, const DataTypeSpec& dt, const TileConfig& compute,
                                              const std::optional<ProblemSize>& problem, const SearchBounds& bounds) {
    auto best = pick_best(filling_shapes(hw, dt, compute, bounds), problem);
    if (best && score_of(*best, problem).fits) return best;
    auto fitted = fitted_shape(hw, dt, compute, problem, bounds);
    if (fitted) return fitted;
    return best;
}

Selection select_parameters(const HardwareSpec& hw, const DataTypeSpec& dt, const std::optional<ProblemSize>& problem,
                            const SearchBounds& bounds) {
    hw.validate();
    dt.validate();
    dt.validate_against(hw);
    bounds.validate();
    if (problem) problem->validate();

    Selection sel;
    const bool chain = bounds.layout == Layout::chain_1d;

    // Step 1: PE granularity.
    const auto bus_limit = hw.max_bus_width_bits / dt.width_bits;
    std::uint64_t y_c_hi = std::min(bus_limit, bounds.max_y_c.value_or(unbounded));
    std::uint64_t y_c_lo = 1;
    if (bounds.fixed_y_c) {
        if (*bounds.fixed_y_c > bus_limit) y_c_hi = 0;
        else y_c_hi = y_c_lo = *bounds.fixed_y_c;
    }
    if (y_c_hi == 0) {
        throw InfeasibleError("infeasible: bus width constraint y_c*w_c <= w_p,max (w_c = " +
                              std::to_string(dt.width_bits) + ", w_p,max = " + std::to_string(hw.max_bus_width_bits) +
                              ")");
    }
    sel.steps.push_back({"step 1: PE granularity",
                         "x_c = 1; y_c <= " + std::to_string(y_c_hi) + " (bus width y_c*w_c <= " +
                             std::to_string(hw.max_bus_width_bits) + " bit" +
                             (bounds.fixed_y_c ? ", fixed by request" : "") + ")"});

    // Step 2: maximise N_c = N_p * y_c.
    TileConfig best_compute;
    std::uint64_t best_units = 0;
    std::string best_binding;
    for (auto y_c = y_c_hi; y_c >= y_c_lo; --y_c) {
        TileConfig c;
        c.x_c = 1;
        c.y_c = y_c;
        std::string binding;
        if (chain) {
            const auto lim = max_processing_elements(hw, dt, y_c, bounds.layout, bounds.max_x_p.value_or(unbounded));
            std::uint64_t n_p = lim.count;
            binding = lim.binding;
            if (bounds.fixed_n_p) {
                n_p = *bounds.fixed_n_p <= lim.count ? *bounds.fixed_n_p : 0;
                binding = "fixed N_p";
            }
            c.x_p = n_p;
            c.y_p = 1;
        } else {
            const auto lim = max_processing_elements(hw, dt, y_c, bounds.layout, unbounded);
            binding = lim.binding;
            const auto x_cap = std::min(lim.count, bounds.max_x_p.value_or(unbounded));
            std::uint64_t best_prod = 0, bx = 0, by = 0;
            for (std::uint64_t x_p = 1; x_p <= x_cap; ++x_p) {
                auto y_p = std::min(lim.count / x_p, bounds.max_y_p.value_or(unbounded));
                if (bounds.fixed_n_p) {
                    if (*bounds.fixed_n_p % x_p != 0 || *bounds.fixed_n_p / x_p > y_p) continue;
                    y_p = *bounds.fixed_n_p / x_p;
                }
                if (y_p == 0) break;
                const auto prod = x_p * y_p;
                if (prod > best_prod || (prod == best_prod && abs_diff(x_p, y_p) < abs_diff(bx, by))) {
                    best_prod = prod;
                    bx = x_p;
                    by = y_p;
                }
            }
            c.x_p = bx;
            c.y_p = by;
        }
        const auto units = c.x_p * c.y_p * y_c;
        if (c.x_p > 0 && c.y_p > 0 && units > best_units) {
            best_units = units;
            best_compute = c;
            best_binding = binding;
        }
        if (y_c == 1) break;
    }
    if (best_units == 0) {
        TileConfig minimal;
        minimal.y_c = y_c_lo;
        if (bounds.fixed_n_p && chain) minimal.x_p = *bounds.fixed_n_p;
        const auto report = check_resource_feasibility(minimal, hw, dt, bounds.layout);
        const auto* v = report.first_violation();
        throw InfeasibleError("infeasible: " + (v ? v->name + " constraint " + v->detail
                                                  : std::string("no configuration satisfies the search bounds")));
    }
    sel.steps.push_back({"step 2: maximise compute units",
                         "y_c = " + std::to_string(best_compute.y_c) + ", N_p = " +
                             std::to_string(best_compute.processing_elements()) + " (x_p = " +
                             std::to_string(best_compute.x_p) + ", y_p = " + std::to_string(best_compute.y_p) +
                             "), N_c = " + std::to_string(best_units) + "; N_p bound by " + best_binding});

    // Step 3: memory tile.
    const auto shape = choose_memory_shape(hw, dt, best_compute, problem, bounds);
    if (!shape) {
        throw InfeasibleError("infeasible: " + std::string(constraint::chain_depth) +
                              " constraint x_t*y_t >= N_p cannot be met within the problem and bounds");
    }
    const auto n_min = min_memory_blocks(*shape, hw, dt);
    const auto bw = block_words(hw, dt);
    sel.steps.push_back({"step 3: memory tile",
                         "N_b,min = " + std::to_string(n_min) + ", usable blocks = " +
                             std::to_string((hw.memory_blocks_max / n_min) * n_min) + " of " +
                             std::to_string(hw.memory_blocks_max) + "; s_b = " + std::to_string(bw.words_per_block) +
                             " (" + std::to_string(bw.port_width_bits) + " bit ports); x_tot = " +
                             std::to_string(shape->x_tot()) + ", y_tot = " + std::to_string(shape->y_tot())});

    sel.design = evaluate_design(hw, dt, *shape, bounds.layout, problem, bounds.frequency_hz);
    if (!sel.design.feasible()) {
        const auto* v = sel.design.feasibility.first_violation();
        throw InfeasibleError("infeasible: selected " + describe(*shape) + " violates " + v->name + ": " + v->detail);
    }
    return sel;
}

bool ranks_before(const DesignPoint& a, const DesignPoint& b) {
    if (a.peak_ops_per_cycle != b.peak_ops_per_cycle) return a.peak_ops_per_cycle > b.peak_ops_per_cycle;
    if (a.computational_intensity != b.computational_intensity) {
        return a.computational_intensity > b.computational_intensity;
    }
    if (a.used_blocks != b.used_blocks) return a.used_blocks > b.used_blocks;
    const auto skew_a = abs_diff(a.x_tot, a.y_tot);
    const auto skew_b = abs_diff(b.x_tot, b.y_tot);
    if (skew_a != skew_b) return skew_a < skew_b;
    if (a.processing_elements != b.processing_elements) return a.processing_elements < b.processing_elements;
    return a.cfg < b.cfg;
}

std::vector<DesignPoint> sweep(const HardwareSpec& hw, const DataTypeSpec& dt, const std::optional<ProblemSize>& problem,
                               const SearchBounds& bounds) {
    hw.validate();
    dt.validate();
    dt.validate_against(hw);
    bounds.validate();
    if (problem) problem->validate();

    const bool chain = bounds.layout == Layout::chain_1d;
    const auto bus_limit = hw.max_bus_width_bits / dt.width_bits;
    const auto n_c_max = max_compute_units(hw, dt);

    const std::uint64_t max_x_c = chain ? 1 : std::min(bus_limit, bounds.max_x_c.value_or(unbounded));
    std::uint64_t lo_y_c = 1;
    std::uint64_t max_y_c = std::min(bus_limit, bounds.max_y_c.value_or(unbounded));
    if (bounds.fixed_y_c) {
        if (*bounds.fixed_y_c > max_y_c) return {};
        lo_y_c = max_y_c = *bounds.fixed_y_c;
    }
    const std::uint64_t max_x_p = std::min(n_c_max, bounds.max_x_p.value_or(unbounded));
    const std::uint64_t max_y_p = chain ? 1 : std::min(n_c_max, bounds.max_y_p.value_or(unbounded));

    std::vector<std::pair<std::uint64_t, std::uint64_t>> granularities;
    for (std::uint64_t x_c = 1; x_c <= max_x_c; ++x_c) {
        for (std::uint64_t y_c = lo_y_c; y_c <= max_y_c; ++y_c) granularities.emplace_back(x_c, y_c);
    }

    auto explore = [&](std::uint64_t x_c, std::uint64_t y_c) {
        std::vector<DesignPoint> out;
        for (std::uint64_t x_p = 1; x_p <= max_x_p; ++x_p) {
            bool any = false;
            for (std::uint64_t y_p = 1; y_p <= max_y_p; ++y_p) {
                TileConfig c;
                c.x_c = x_c;
                c.y_c = y_c;
                c.x_p = x_p;
                c.y_p = y_p;
                // Resources and blocks grow with N_p, so the first failure ends the row.
                if (!compute_feasible(hw, dt, c, bounds.layout)) break;
                any = true;
                if (bounds.fixed_n_p && c.processing_elements() != *bounds.fixed_n_p) continue;

                std::vector<TileConfig> shapes;
                if (bounds.memory_shapes == MemoryShapes::all) {
                    shapes = filling_shapes(hw, dt, c, bounds);
                    if (shapes.empty()) {
                        if (auto s = choose_memory_shape(hw, dt, c, problem, bounds)) shapes.push_back(*s);
                    }
                } else if (auto s = choose_memory_shape(hw, dt, c, problem, bounds)) {
                    shapes.push_back(*s);
                }
                for (const auto& shape : shapes) {
                    auto d = evaluate_design(hw, dt, shape, bounds.layout, problem, bounds.frequency_hz);
                    if (d.feasible()) out.push_back(std::move(d));
                }
            }
            if (!any) break;
        }
        return out;
    };

    std::vector<std::vector<DesignPoint>> partial(granularities.size());
    unsigned workers = bounds.threads != 0 ? bounds.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, granularities.size()));
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (auto i = next.fetch_add(1); i < granularities.size(); i = next.fetch_add(1)) {
            partial[i] = explore(granularities[i].first, granularities[i].second);
        }
    };
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    }

    std::vector<DesignPoint> ranked;
    for (auto& part : partial) {
        std::move(part.begin(), part.end(), std::back_inserter(ranked));
    }
    std::sort(ranked.begin(), ranked.end(), ranks_before);
    return ranked;
}

}  // namespace mmmdse
