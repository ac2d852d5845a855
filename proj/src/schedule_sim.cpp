#include "mmmdse/schedule_sim.hpp"

#include "mmmdse/errors.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace mmmdse {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

struct IntMac {
    std::uint64_t mask;
    std::uint64_t operator()(std::uint64_t acc, std::uint64_t a, std::uint64_t b) const { return (acc + a * b) & mask; }
};

struct Binary16Mac {
    float operator()(float acc, float a, float b) const {
        return round_to_binary16(acc + round_to_binary16(a * b));
    }
};

template <typename T>
struct NativeMac {
    T operator()(T acc, T a, T b) const {
        const T product = a * b;
        return acc + product;
    }
};

// Calls fn(matrix_a, matrix_b, mac) with the storage type selected by the format.
template <typename Fn>
decltype(auto) dispatch(const MatrixBuffer& a, const MatrixBuffer& b, Fn&& fn) {
    const auto& f = a.format();
    if (f.kind == ArithmeticKind::exact_integer) {
        return fn(std::get<Matrix<std::uint64_t>>(a.storage()), std::get<Matrix<std::uint64_t>>(b.storage()),
                  IntMac{f.mask()});
    }
    if (f.width_bits == 64) {
        return fn(std::get<Matrix<double>>(a.storage()), std::get<Matrix<double>>(b.storage()), NativeMac<double>{});
    }
    if (f.width_bits == 16) {
        return fn(std::get<Matrix<float>>(a.storage()), std::get<Matrix<float>>(b.storage()), Binary16Mac{});
    }
    return fn(std::get<Matrix<float>>(a.storage()), std::get<Matrix<float>>(b.storage()), NativeMac<float>{});
}

// Merges consecutive row-major A addresses into runs.
class RunTracker {
public:
    explicit RunTracker(std::map<std::uint64_t, std::uint64_t>& out) : out_(out) {}
    ~RunTracker() { flush(); }

    void access(std::uint64_t addr) {
        if (len_ > 0 && addr == last_ + 1) {
            ++len_;
        } else {
            flush();
            len_ = 1;
        }
        last_ = addr;
    }

    void flush() {
        if (len_ > 0) ++out_[len_];
        len_ = 0;
    }

private:
    std::map<std::uint64_t, std::uint64_t>& out_;
    std::uint64_t last_ = 0;
    std::uint64_t len_ = 0;
};

// Shared off-chip transfer bookkeeping for both simulators.
class IoRecorder {
public:
    IoRecorder(const ProblemSize& p, bool record) : p_(p), record_(record), runs_(io.burst_runs_a) {}

    template <typename T>
    void load_a_column(const Matrix<T>& a, std::uint64_t im, std::uint64_t jm, std::uint64_t kk, std::uint64_t height,
                       std::vector<T>& dst) {
        for (std::uint64_t ii = 0; ii < height; ++ii) {
            const auto row = im + ii;
            if (row < p_.m) {
                dst[ii] = a(row, kk);
                ++io.loads_a;
                runs_.access(row * p_.k + kk);
                if (record_) io.log.push_back({Operand::a, im, jm, kk, row, kk});
            } else {
                dst[ii] = T{};
                ++io.padded_loads_a;
            }
        }
    }

    template <typename T>
    void load_b_row(const Matrix<T>& b, std::uint64_t im, std::uint64_t jm, std::uint64_t kk, std::uint64_t width,
                    std::vector<T>& dst) {
        for (std::uint64_t jj = 0; jj < width; ++jj) {
            const auto col = jm + jj;
            if (col < p_.n) {
                dst[jj] = b(kk, col);
                ++io.loads_b;
                if (record_) io.log.push_back({Operand::b, im, jm, kk, kk, col});
            } else {
                dst[jj] = T{};
                ++io.padded_loads_b;
            }
        }
    }

    /// Returns false for padding elements, which are counted but not written.
    bool store_c(std::uint64_t im, std::uint64_t jm, std::uint64_t row, std::uint64_t col) {
        if (row < p_.m && col < p_.n) {
            ++io.stores_c;
            if (record_) io.log.push_back({Operand::c, im, jm, p_.k - 1, row, col});
            return true;
        }
        ++io.padded_stores_c;
        return false;
    }

    IoTrace finish() {
        runs_.flush();
        return std::move(io);
    }

    IoTrace io;

private:
    ProblemSize p_;
    bool record_;
    RunTracker runs_;
};

void validate_inputs(const ProblemSize& p, const TileConfig& cfg, const DataTypeSpec& dt, const MatrixBuffer& a,
                     const MatrixBuffer& b, const SimOptions& options) {
    p.validate();
    cfg.validate();
    const auto fmt = ElementFormat::of(dt);
    fmt.validate();
    if (!(a.format() == fmt) || !(b.format() == fmt)) {
        throw ConfigError("matrix element format does not match datatype " + dt.name);
    }
    if (a.rows() != p.m || a.cols() != p.k || b.rows() != p.k || b.cols() != p.n) {
        throw DimensionError("matrix shapes do not match the problem size m=" + std::to_string(p.m) +
                             ", n=" + std::to_string(p.n) + ", k=" + std::to_string(p.k));
    }
    const auto x_tot = cfg.x_tot();
    const auto y_tot = cfg.y_tot();
    if (x_tot > p.m || y_tot > p.n) {
        throw DimensionError("memory tile " + std::to_string(x_tot) + "x" + std::to_string(y_tot) +
                             " exceeds the " + std::to_string(p.m) + "x" + std::to_string(p.n) + " output");
    }
    if (!options.pad && (p.m % x_tot != 0 || p.n % y_tot != 0)) {
        throw DimensionError("memory tile " + std::to_string(x_tot) + "x" + std::to_string(y_tot) +
                             " does not divide the " + std::to_string(p.m) + "x" + std::to_string(p.n) +
                             " output (enable padding to simulate)");
    }
}

template <typename T>
MatrixBuffer wrap_result(const ElementFormat& fmt, Matrix<T>&& m) {
    MatrixBuffer out(fmt, m.rows, m.cols);
    std::get<Matrix<T>>(out.storage()) = std::move(m);
    return out;
}

}  // namespace

const char* to_string(Operand op) {
    switch (op) {
        case Operand::a: return "A";
        case Operand::b: return "B";
        default: return "C";
    }
}

double SimResult::drain_efficiency() const {
    const auto total = compute_cycles + drain_cycles;
    return total == 0 ? 0.0 : static_cast<double>(compute_cycles) / static_cast<double>(total);
}

double ScheduleCounts::efficiency() const {
    const auto total = compute_cycles + drain_cycles;
    return total == 0 ? 0.0 : static_cast<double>(compute_cycles) / static_cast<double>(total);
}

MatrixBuffer reference_mmm(const MatrixBuffer& a, const MatrixBuffer& b) {
    if (!(a.format() == b.format())) throw ConfigError("operands have different element formats");
    if (a.cols() != b.rows()) {
        throw DimensionError("inner dimensions differ: " + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()));
    }
    return dispatch(a, b, [&](const auto& ma, const auto& mb, auto mac) {
        using T = typename std::decay_t<decltype(ma.data)>::value_type;
        Matrix<T> c(ma.rows, mb.cols);
        for (std::size_t i = 0; i < ma.rows; ++i) {
            for (std::size_t j = 0; j < mb.cols; ++j) {
                T acc{};
                for (std::size_t kk = 0; kk < ma.cols; ++kk) acc = mac(acc, ma(i, kk), mb(kk, j));
                c(i, j) = acc;
            }
        }
        return wrap_result(a.format(), std::move(c));
    });
}

SimResult simulate_schedule(const ProblemSize& p, const TileConfig& cfg, const DataTypeSpec& dt, const MatrixBuffer& a,
                            const MatrixBuffer& b, const SimOptions& options) {
    validate_inputs(p, cfg, dt, a, b, options);

    const auto x_tot = cfg.x_tot();
    const auto y_tot = cfg.y_tot();
    const auto m_ext = ceil_div(p.m, x_tot) * x_tot;
    const auto n_ext = ceil_div(p.n, y_tot) * y_tot;
    // Strides of the tiling levels inside a memory tile.
    const auto x_pe = cfg.x_c, x_ct = cfg.x_c * cfg.x_p, x_bt = x_ct * cfg.x_t;
    const auto y_pe = cfg.y_c, y_ct = cfg.y_c * cfg.y_p, y_bt = y_ct * cfg.y_t;

    SimResult result;
    result.config = cfg;
    result.pipeline_safe = pipeline_safe(cfg, dt.accumulation_latency_cycles);
    IoRecorder rec(p, options.record_log);

    result.c = dispatch(a, b, [&](const auto& ma, const auto& mb, auto mac) {
        using T = typename std::decay_t<decltype(ma.data)>::value_type;
        Matrix<T> c(p.m, p.n);
        std::vector<T> tile(x_tot * y_tot);
        std::vector<T> col_a(x_tot);
        std::vector<T> row_b(y_tot);

        for (std::uint64_t im = 0; im < m_ext; im += x_tot) {              // memory tiles, i
            for (std::uint64_t jm = 0; jm < n_ext; jm += y_tot) {          // memory tiles, j
                std::fill(tile.begin(), tile.end(), T{});
                for (std::uint64_t kk = 0; kk < p.k; ++kk) {               // full k
                    rec.load_a_column(ma, im, jm, kk, x_tot, col_a);
                    rec.load_b_row(mb, im, jm, kk, y_tot, row_b);
                    for (std::uint64_t bx = 0; bx < cfg.x_b; ++bx) {       // block tiles
                        for (std::uint64_t by = 0; by < cfg.y_b; ++by) {
                            for (std::uint64_t tx = 0; tx < cfg.x_t; ++tx) {  // compute tiles
                                for (std::uint64_t ty = 0; ty < cfg.y_t; ++ty) {
                                    ++result.compute_cycles;
                                    // PEs and compute units: one parallel step.
                                    for (std::uint64_t px = 0; px < cfg.x_p; ++px) {
                                        for (std::uint64_t py = 0; py < cfg.y_p; ++py) {
                                            for (std::uint64_t cx = 0; cx < cfg.x_c; ++cx) {
                                                const auto ii = bx * x_bt + tx * x_ct + px * x_pe + cx;
                                                for (std::uint64_t cy = 0; cy < cfg.y_c; ++cy) {
                                                    const auto jj = by * y_bt + ty * y_ct + py * y_pe + cy;
                                                    auto& acc = tile[ii * y_tot + jj];
                                                    acc = mac(acc, col_a[ii], row_b[jj]);
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                result.drain_cycles += x_tot * y_tot / cfg.y_c;
                for (std::uint64_t ii = 0; ii < x_tot; ++ii) {
                    for (std::uint64_t jj = 0; jj < y_tot; ++jj) {
                        if (rec.store_c(im, jm, im + ii, jm + jj)) c(im + ii, jm + jj) = tile[ii * y_tot + jj];
                    }
                }
            }
        }
        return wrap_result(a.format(), std::move(c));
    });
    result.io = rec.finish();
    return result;
}

SimResult simulate_pe_chain(const ProblemSize& p, const TileConfig& cfg, const DataTypeSpec& dt, const MatrixBuffer& a,
                            const MatrixBuffer& b, const SimOptions& options) {
    if (cfg.x_c != 1 || cfg.y_p != 1) {
        throw InfeasibleError("PE chain requires the 1D layout (x_c = 1, y_p = 1)");
    }
    const auto n_p = cfg.x_p;
    if (cfg.x_t * cfg.y_t < n_p) {
        throw InfeasibleError("chain depth: x_t*y_t = " + std::to_string(cfg.x_t * cfg.y_t) + " < N_p = " +
                              std::to_string(n_p));
    }
    validate_inputs(p, cfg, dt, a, b, options);

    const auto x_tot = cfg.x_tot();
    const auto y_tot = cfg.y_tot();
    const auto m_ext = ceil_div(p.m, x_tot) * x_tot;
    const auto n_ext = ceil_div(p.n, y_tot) * y_tot;
    const auto rows_per_pe = cfg.x_t * cfg.x_b;
    const auto phases_per_k = cfg.x_b * cfg.x_t;     // one A value per PE per phase
    const auto phase_cycles = cfg.y_b * cfg.y_t;     // B vectors streamed per phase
    const auto drain_per_tile = x_tot * y_tot / cfg.y_c;

    SimResult result;
    result.config = cfg;
    result.pipeline_safe = pipeline_safe(cfg, dt.accumulation_latency_cycles);
    IoRecorder rec(p, options.record_log);

    result.c = dispatch(a, b, [&](const auto& ma, const auto& mb, auto mac) {
        using T = typename std::decay_t<decltype(ma.data)>::value_type;
        Matrix<T> c(p.m, p.n);
        std::vector<std::vector<T>> pe_c(n_p, std::vector<T>(rows_per_pe * y_tot));
        std::vector<T> a_current(n_p), a_next(n_p);  // the two A registers of each PE
        std::vector<T> feed_b(y_tot);
        std::vector<T> col_a(x_tot);
        std::deque<T> transpose_out;  // A values in chain order, farthest PE first
        std::uint64_t hidden_by_drain = 0;

        for (std::uint64_t im = 0; im < m_ext; im += x_tot) {
            for (std::uint64_t jm = 0; jm < n_ext; jm += y_tot) {
                for (auto& v : pe_c) std::fill(v.begin(), v.end(), T{});
                std::uint64_t a_loaded = 0;

                auto ensure_a = [&](std::uint64_t kk) {
                    for (; a_loaded <= kk; ++a_loaded) {
                        rec.load_a_column(ma, im, jm, a_loaded, x_tot, col_a);
                        for (std::uint64_t phase = 0; phase < phases_per_k; ++phase) {
                            for (std::uint64_t pe = n_p; pe-- > 0;) transpose_out.push_back(col_a[phase * n_p + pe]);
                        }
                    }
                };
                // N_p shifts move one value into every shadow register.
                auto shift_in = [&]() {
                    for (std::uint64_t s = 0; s < n_p; ++s) {
                        for (std::uint64_t pe = n_p - 1; pe > 0; --pe) a_next[pe] = a_next[pe - 1];
                        a_next[0] = transpose_out.front();
                        transpose_out.pop_front();
                    }
                };

                ensure_a(0);
                shift_in();
                result.stall_cycles += n_p > hidden_by_drain ? n_p - hidden_by_drain : 0;

                const auto phases = p.k * phases_per_k;
                for (std::uint64_t q = 0; q < phases; ++q) {
                    std::swap(a_current, a_next);
                    const auto kk = q / phases_per_k;
                    const auto local_row = q % phases_per_k;  // bx * x_t + tx
                    if (local_row == 0) rec.load_b_row(mb, im, jm, kk, y_tot, feed_b);
                    if (q + 1 < phases) {
                        ensure_a((q + 1) / phases_per_k);
                        shift_in();
                        if (n_p > phase_cycles) result.stall_cycles += n_p - phase_cycles;
                    }
                    for (std::uint64_t cycle = 0; cycle < phase_cycles; ++cycle) {
                        ++result.compute_cycles;
                        const auto col0 = cycle * cfg.y_c;  // (by * y_t + ty) * y_c
                        for (std::uint64_t pe = 0; pe < n_p; ++pe) {
                            auto* acc = pe_c[pe].data() + local_row * y_tot + col0;
                            for (std::uint64_t u = 0; u < cfg.y_c; ++u) acc[u] = mac(acc[u], a_current[pe], feed_b[col0 + u]);
                        }
                    }
                }

                // Drain backwards through the chain, emitted row-major at the head.
                result.drain_cycles += drain_per_tile;
                hidden_by_drain = drain_per_tile;
                for (std::uint64_t ii = 0; ii < x_tot; ++ii) {
                    const auto pe = ii % n_p;
                    const auto local_row = ii / n_p;
                    for (std::uint64_t jj = 0; jj < y_tot; ++jj) {
                        if (rec.store_c(im, jm, im + ii, jm + jj)) {
                            c(im + ii, jm + jj) = pe_c[pe][local_row * y_tot + jj];
                        }
                    }
                }
            }
        }
        return wrap_result(a.format(), std::move(c));
    });
    result.io = rec.finish();
    return result;
}

ScheduleCounts count_schedule(const ProblemSize& p, const TileConfig& cfg, bool pad) {
    p.validate();
    cfg.validate();
    const auto x_tot = cfg.x_tot();
    const auto y_tot = cfg.y_tot();
    if (x_tot > p.m || y_tot > p.n) throw DimensionError("memory tile exceeds the output matrix");
    if (!pad && (p.m % x_tot != 0 || p.n % y_tot != 0)) {
        throw DimensionError("memory tile does not divide the output (enable padding)");
    }
    const auto tiles_i = ceil_div(p.m, x_tot);
    const auto tiles_j = ceil_div(p.n, y_tot);
    ScheduleCounts out;
    out.io.loads_a = tiles_j * p.k * p.m;
    out.io.padded_loads_a = tiles_j * p.k * (tiles_i * x_tot - p.m);
    out.io.loads_b = tiles_i * p.k * p.n;
    out.io.padded_loads_b = tiles_i * p.k * (tiles_j * y_tot - p.n);
    out.io.stores_c = p.m * p.n;
    out.io.padded_stores_c = tiles_i * tiles_j * x_tot * y_tot - p.m * p.n;
    out.compute_cycles = tiles_i * tiles_j * p.k * cfg.x_t * cfg.x_b * cfg.y_t * cfg.y_b;
    out.drain_cycles = tiles_i * tiles_j * (x_tot * y_tot / cfg.y_c);
    return out;
}

std::uint64_t BurstStats::run_count() const {
    std::uint64_t n = 0;
    for (const auto& [len, count] : runs) n += count;
    return n;
}

std::uint64_t BurstStats::element_count() const {
    std::uint64_t n = 0;
    for (const auto& [len, count] : runs) n += len * count;
    return n;
}

std::uint64_t BurstStats::min_run() const { return runs.empty() ? 0 : runs.begin()->first; }

TransposeAnalysis transpose_access_analysis(const ProblemSize& p, const TileConfig& cfg, std::uint64_t vector_width,
                                            std::uint64_t fifo_depth) {
    p.validate();
    cfg.validate();
    if (vector_width < 1) throw ConfigError("vector width must be >= 1 element");
    const auto x_tot = cfg.x_tot();
    if (fifo_depth == 0) fifo_depth = x_tot;
    if (fifo_depth < x_tot) {
        throw ConfigError("transpose FIFO depth " + std::to_string(fifo_depth) +
                          " is below the memory-tile column height " + std::to_string(x_tot));
    }

    TransposeAnalysis out;
    out.fifo_count = vector_width;
    out.fifo_depth = fifo_depth;
    out.passes_over_a = ceil_div(p.n, cfg.y_tot());

    // Without the module every element of a column segment is its own read.
    for (std::uint64_t im = 0; im < p.m; im += x_tot) {
        const auto height = std::min(x_tot, p.m - im);
        out.without_module.runs[1] += height * p.k;
    }

    // With the module: wide row reads into per-column FIFOs, popped column-wise.
    std::vector<std::deque<std::uint64_t>> fifos(vector_width);
    for (std::uint64_t im = 0; im < p.m; im += x_tot) {
        const auto height = std::min(x_tot, p.m - im);
        for (std::uint64_t k0 = 0; k0 < p.k; k0 += vector_width) {
            const auto width = std::min(vector_width, p.k - k0);
            for (std::uint64_t ii = 0; ii < height; ++ii) {
                ++out.with_module.runs[width];
                for (std::uint64_t f = 0; f < width; ++f) {
                    if (fifos[f].size() >= fifo_depth) throw ConfigError("transpose FIFO overflow");
                    fifos[f].push_back((im + ii) * p.k + k0 + f);
                }
            }
            for (std::uint64_t f = 0; f < width; ++f) {
                for (std::uint64_t ii = 0; ii < height; ++ii) {
                    const auto addr = fifos[f].front();
                    fifos[f].pop_front();
                    if (addr != (im + ii) * p.k + k0 + f) throw std::logic_error("transpose FIFO order broken");
                }
            }
        }
    }
    return out;
}

}  // namespace mmmdse
