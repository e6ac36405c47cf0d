// Command-line front end: generate, ingest, build, evaluate, bench, sweep
// and progressive-window experiments over the kreg library. Emits CSV (or a
// JSON summary with --json); data rows are byte-identical across reruns with
// the same seeds, timing columns excepted.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kreg/kreg.hpp"

using json = nlohmann::json;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = resolve from KREG_THREADS, then hardware
    bool json_out = false;
    std::string out_path;  // empty = stdout
};

unsigned resolve_threads(unsigned flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("KREG_THREADS")) {
        if (auto v = kreg::parse_int(env); v && *v > 0)
            return static_cast<unsigned>(*v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Writes to --out, or stdout when no path is given.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw kreg::CsvError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

kreg::KernelForm parse_form(const std::string& s) {
    if (s == "plain") return kreg::KernelForm::Plain;
    if (s == "half") return kreg::KernelForm::Half;
    throw CLI::ValidationError("--kernel-form", "expected plain|half");
}

/// "--truncate 10sigma | off | <k>sigma"
std::optional<double> parse_truncate(const std::string& s) {
    if (s == "off") return std::nullopt;
    std::string_view v(s);
    if (v.size() > 5 && v.substr(v.size() - 5) == "sigma") {
        auto k = kreg::parse_double(v.substr(0, v.size() - 5));
        if (k && *k >= 1.0) return *k;
    }
    throw CLI::ValidationError("--truncate", "expected 10sigma, <k>sigma or off");
}

std::vector<std::size_t> parse_count_list(const std::string& s, const char* flag) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto v = kreg::parse_int(tok);
        if (!v || *v < 1) throw CLI::ValidationError(flag, "expected positive integers");
        out.push_back(static_cast<std::size_t>(*v));
    }
    if (out.empty()) throw CLI::ValidationError(flag, "empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto v = kreg::parse_double(tok);
        if (!v) throw CLI::ValidationError(flag, "expected numbers");
        out.push_back(*v);
    }
    if (out.empty()) throw CLI::ValidationError(flag, "empty list");
    return out;
}

std::vector<std::size_t> parse_index_list(const std::string& s, const char* flag) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto v = kreg::parse_int(tok);
        if (!v || *v < 0) throw CLI::ValidationError(flag, "expected column indices");
        out.push_back(static_cast<std::size_t>(*v));
    }
    return out;
}

std::vector<kreg::Method> parse_methods(const std::string& s) {
    std::vector<kreg::Method> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto m = kreg::method_from_flag(tok);
        if (!m)
            throw CLI::ValidationError(
                "--methods", "unknown method '" + tok + "' (rs|kcen|z|za|g|ga|an|prog-ga)");
        out.push_back(*m);
    }
    if (out.empty()) throw CLI::ValidationError("--methods", "empty list");
    return out;
}

/// "--queries random:N | <path>". random:0 picks the dimension default.
struct QuerySpec {
    bool random = true;
    std::size_t n = 0;
    std::string path;
};

QuerySpec parse_queries(const std::string& s) {
    QuerySpec q;
    if (s.rfind("random:", 0) == 0) {
        auto v = kreg::parse_int(std::string_view(s).substr(7));
        if (!v || *v < 0) throw CLI::ValidationError("--queries", "expected random:N");
        q.n = static_cast<std::size_t>(*v);
        return q;
    }
    q.random = false;
    q.path = s;
    return q;
}

kreg::PointCloud load_query_file(const std::string& path, std::size_t d) {
    std::ifstream in(path);
    if (!in) throw kreg::CsvError("cannot open " + path);
    kreg::PointCloud cloud{d, {}};
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> row;
        bool ok = true;
        while (std::getline(ss, tok, ',')) {
            auto v = kreg::parse_double(tok);
            if (!v) {
                ok = false;
                break;
            }
            row.push_back(*v);
        }
        if (!ok || row.size() < d) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw kreg::CsvError("bad query row: " + line);
        }
        first = false;
        cloud.coords.insert(cloud.coords.end(), row.begin(), row.begin() + d);
    }
    if (cloud.size() == 0) throw kreg::CsvError("no queries in " + path);
    return cloud;
}

kreg::PointCloud make_cloud(const QuerySpec& q, const kreg::Dataset& ds,
                            double margin, std::uint64_t seed) {
    if (!q.random) return load_query_file(q.path, ds.dim());
    std::size_t n = q.n ? q.n : kreg::default_eval_points(ds.dim());
    return kreg::sample_cloud(kreg::data_domain(ds, margin), n, seed);
}

std::vector<double> resolve_origin(const std::string& mode, const kreg::Dataset& ds) {
    if (mode == "zero") return {};
    if (mode == "min") return ds.extent_lo();
    throw CLI::ValidationError("--origin", "expected zero|min");
}

json report_to_json(const kreg::ErrorReport& r) {
    return json{{"linf", r.linf},
                {"linf_normalized", r.linf_normalized},
                {"argmax_q", r.argmax_q},
                {"mean_abs", r.mean_abs},
                {"admissible_count", r.admissible_count},
                {"skipped_count", r.skipped_count},
                {"per_run_linf", r.per_run_linf},
                {"build_ms", r.build_ms},
                {"query_ms_p", r.query_ms_p},
                {"query_ms_s", r.query_ms_s}};
}

void write_report_csv(std::ostream& out, const kreg::ErrorReport& r, std::size_t d) {
    out << "linf,linf_norm,";
    for (std::size_t j = 0; j < d; ++j) out << "argmax_x" << (j + 1) << ',';
    out << "mean_abs,admissible,skipped,build_ms,query_ms_p,query_ms_s\n";
    out << kreg::format_double(r.linf) << ',' << kreg::format_double(r.linf_normalized)
        << ',';
    for (std::size_t j = 0; j < d; ++j)
        out << kreg::format_double(j < r.argmax_q.size() ? r.argmax_q[j] : 0.0) << ',';
    out << kreg::format_double(r.mean_abs) << ',' << r.admissible_count << ','
        << r.skipped_count << ',' << kreg::format_double(r.build_ms) << ','
        << kreg::format_double(r.query_ms_p) << ','
        << kreg::format_double(r.query_ms_s) << "\n";
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthOpts {
    std::size_t n = 0;
    double c = 0.0, phi = 1.0, y0 = 10.0, noise = 1.0;
};

void run_synth(const SynthOpts& o, const GlobalOpts& g) {
    kreg::Dataset ds = kreg::synth_ar1(o.n, o.c, o.phi, o.y0, o.noise, g.seed);
    Output out(g.out_path);
    kreg::write_points(ds, out.stream(),
                       {"method=synth-ar1 n=" + std::to_string(o.n) +
                        " c=" + kreg::format_double_short(o.c) +
                        " phi=" + kreg::format_double_short(o.phi) +
                        " y0=" + kreg::format_double_short(o.y0) +
                        " noise=" + kreg::format_double_short(o.noise),
                        "seed=" + std::to_string(g.seed)});
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

struct IngestOpts {
    std::string in;
    std::string x_cols = "0";
    std::size_t y_col = 1;
    int w_col = -1;
    std::string delim = ",";
    std::string missing = "?";
    std::string date_time_cols;
};

void run_ingest(const IngestOpts& o, const GlobalOpts& g) {
    kreg::ColumnSchema schema;
    schema.x_cols = parse_index_list(o.x_cols, "--x-cols");
    schema.y_col = o.y_col;
    if (o.w_col >= 0) schema.w_col = static_cast<std::size_t>(o.w_col);
    if (o.delim.size() != 1)
        throw CLI::ValidationError("--delim", "expected a single character");
    schema.delim = o.delim[0];
    schema.missing_token = o.missing;
    if (!o.date_time_cols.empty()) {
        auto cols = parse_index_list(o.date_time_cols, "--date-time-cols");
        if (cols.size() != 2)
            throw CLI::ValidationError("--date-time-cols", "expected two columns");
        schema.date_time_cols = {{cols[0], cols[1]}};
    }
    kreg::CsvLoad loaded = kreg::load_csv(o.in, schema);
    std::cerr << "ingest: " << loaded.data.size() << " rows, skipped "
              << loaded.skipped_rows << "\n";
    Output out(g.out_path);
    kreg::write_points(loaded.data, out.stream(),
                       {"method=ingest source-file=" + o.in +
                        " skipped=" + std::to_string(loaded.skipped_rows)});
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

struct BuildOpts {
    std::string in;
    std::string method;
    std::size_t size = 0;
    std::size_t k = 0;
    double gamma = 0.0;
    double eps = 0.0, rho = 0.0;
    double sigma = 0.0;
    std::string form = "half";
    std::string truncate = "off";
    bool per_block = false;
    std::string origin = "zero";
    double gamma1 = 0.0, width1 = 0.0, a = 1.5;
    std::size_t regions = 0;
};

void run_build(const BuildOpts& o, const GlobalOpts& g) {
    auto method = kreg::method_from_flag(o.method);
    if (!method)
        throw CLI::ValidationError("--method", "expected rs|kcen|z|za|g|ga|an|prog-ga");
    kreg::Dataset P = kreg::load_points(o.in).data;

    auto need_size = [&]() {
        if (o.size < 1) throw CLI::ValidationError("--size", "required for this method");
        return o.size;
    };
    auto grid_gamma = [&]() {
        if (o.gamma > 0.0) return o.gamma;
        if (o.eps > 0.0 && o.rho > 0.0) {
            if (!(o.sigma > 0.0))
                throw CLI::ValidationError("--sigma", "required with --eps/--rho");
            return kreg::grid_gamma_for(o.eps, o.sigma, o.rho, P.dim());
        }
        throw CLI::ValidationError("--gamma", "give --gamma or --eps with --rho");
    };

    kreg::Coreset cs = [&]() -> kreg::Coreset {
        switch (*method) {
            case kreg::Method::RandomSample:
                return kreg::random_sample(P, need_size(), g.seed);
            case kreg::Method::KCenter:
                return kreg::k_center(P, o.k ? o.k : need_size(), g.seed);
            case kreg::Method::ZOrder:
                return kreg::z_order_select(P, need_size(), g.seed, o.per_block);
            case kreg::Method::ZAggregate:
                return kreg::z_aggregate(P, need_size());
            case kreg::Method::Grid:
                return kreg::grid_select(P, grid_gamma(), g.seed,
                                         resolve_origin(o.origin, P));
            case kreg::Method::GAggregate:
                return kreg::g_aggregate(P, grid_gamma(), resolve_origin(o.origin, P));
            case kreg::Method::AggregateNeighbor: {
                if (!(o.sigma > 0.0))
                    throw CLI::ValidationError("--sigma", "required for method an");
                kreg::GaussianKernel kernel(o.sigma, parse_form(o.form));
                auto trunc = parse_truncate(o.truncate);
                kreg::EvalContext ctx =
                    trunc ? kreg::truncated_context(kernel, P, *trunc)
                          : kreg::exact_context(kernel);
                return kreg::aggregate_neighbor(P, grid_gamma(), ctx,
                                                resolve_origin(o.origin, P));
            }
            case kreg::Method::ProgressiveGAggregate: {
                if (!(o.gamma1 > 0.0) || !(o.width1 > 0.0))
                    throw CLI::ValidationError("--gamma1",
                                               "prog-ga needs --gamma1 and --width1");
                kreg::ProgressiveSpec spec{o.gamma1, o.width1, o.a,
                                           o.regions ? std::optional<std::size_t>(o.regions)
                                                     : std::nullopt};
                return kreg::progressive_g_aggregate(P, spec);
            }
        }
        throw CLI::ValidationError("--method", "unknown method");
    }();

    if (!g.out_path.empty()) {
        kreg::save_coreset(cs, g.out_path);
    } else {
        kreg::write_points(cs.data, std::cout,
                           {kreg::coreset_metadata_line(cs),
                            "seed=" + std::to_string(cs.seed)});
    }
    std::cerr << "build: " << cs.data.size() << " points ("
              << kreg::method_name(cs.method) << ")\n";
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOpts {
    std::string in;
    std::string coreset;
    double sigma = 0.0;
    std::string form = "half";
    std::string queries = "random:0";
    std::string truncate = "10sigma";
    double rho = 0.0;
    double margin = 0.0;
    std::size_t reps = 1;
};

void run_eval(const EvalOpts& o, const GlobalOpts& g) {
    if (!(o.sigma > 0.0)) throw CLI::ValidationError("--sigma", "required");
    kreg::Dataset P = kreg::load_points(o.in).data;
    kreg::GaussianKernel kernel(o.sigma, parse_form(o.form));
    auto trunc = parse_truncate(o.truncate);
    kreg::PointCloud cloud = make_cloud(parse_queries(o.queries), P, o.margin, g.seed);

    Output out(g.out_path);
    if (o.coreset.empty()) {
        // pointwise mode: q..., value, defined
        kreg::EvalContext ctx = trunc ? kreg::truncated_context(kernel, P, *trunc)
                                      : kreg::exact_context(kernel);
        auto values = kreg::reg_batch(P, ctx, cloud, resolve_threads(g.threads));
        std::ostream& os = out.stream();
        for (std::size_t j = 0; j < P.dim(); ++j) os << 'q' << (j + 1) << ',';
        os << "value,defined\n";
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            auto q = cloud[i];
            for (std::size_t j = 0; j < P.dim(); ++j)
                os << kreg::format_double(q[j]) << ',';
            if (values[i])
                os << kreg::format_double(*values[i]) << ",1\n";
            else
                os << "nan,0\n";
        }
        return;
    }

    kreg::Dataset S = kreg::load_points(o.coreset).data;
    kreg::EvalConfig cfg;
    cfg.rho = o.rho;
    cfg.margin = o.margin;
    cfg.seed = g.seed;
    cfg.repetitions = o.reps;
    cfg.truncation_sigmas = trunc;
    cfg.threads = resolve_threads(g.threads);
    kreg::ErrorEvaluator ev(P, kernel, cfg, std::move(cloud));
    kreg::ErrorReport r = ev.evaluate(S);
    if (g.json_out)
        out.stream() << report_to_json(r).dump(2) << "\n";
    else
        write_report_csv(out.stream(), r, P.dim());
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOpts {
    std::string in;
    std::string methods = "ga,g,rs,z,za";
    std::string sizes = "1000";
    double sigma = 0.0;
    std::string form = "half";
    std::string truncate = "10sigma";
    std::string queries = "random:0";
    double rho = 0.0;
    std::size_t reps = 10;
};

void run_bench(const BenchOpts& o, const GlobalOpts& g) {
    if (!(o.sigma > 0.0)) throw CLI::ValidationError("--sigma", "required");
    kreg::Dataset P = kreg::load_points(o.in).data;
    kreg::GaussianKernel kernel(o.sigma, parse_form(o.form));
    QuerySpec qs = parse_queries(o.queries);
    kreg::EvalConfig cfg;
    cfg.n_points = qs.random ? qs.n : 0;
    cfg.rho = o.rho;
    cfg.seed = g.seed;
    cfg.repetitions = o.reps;
    cfg.truncation_sigmas = parse_truncate(o.truncate);
    cfg.threads = resolve_threads(g.threads);
    if (!qs.random)
        throw CLI::ValidationError("--queries", "bench uses random:N clouds");

    auto rows =
        kreg::bench(P, parse_methods(o.methods), parse_count_list(o.sizes, "--sizes"),
                    kernel, cfg);
    Output out(g.out_path);
    std::ostream& os = out.stream();
    os << "method,size,build_ms,query_ms,linf,linf_norm,failed\n";
    for (const auto& r : rows) {
        os << r.method << ',' << r.size << ',' << kreg::format_double(r.build_ms) << ','
           << kreg::format_double(r.query_ms) << ',' << kreg::format_double(r.linf)
           << ',' << kreg::format_double(r.linf_norm) << ',' << (r.failed ? 1 : 0)
           << "\n";
    }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOpts {
    std::string in;
    std::string methods = "ga,rs";
    std::string sizes = "1000";
    std::string sigmas = "50";
    std::string form = "half";
    std::string truncate = "10sigma";
    std::string queries = "random:0";
    double rho = 0.0;
    std::size_t reps = 10;
};

void run_sweep(const SweepOpts& o, const GlobalOpts& g) {
    kreg::Dataset P = kreg::load_points(o.in).data;
    auto methods = parse_methods(o.methods);
    auto sizes = parse_count_list(o.sizes, "--sizes");
    auto sigmas = parse_double_list(o.sigmas, "--sigmas");
    QuerySpec qs = parse_queries(o.queries);
    if (!qs.random)
        throw CLI::ValidationError("--queries", "sweep uses random:N clouds");
    auto trunc = parse_truncate(o.truncate);
    auto form = parse_form(o.form);

    Output out(g.out_path);
    std::ostream& os = out.stream();
    os << "method,size,sigma,rep,linf,linf_norm,build_ms,query_ms\n";
    for (double sigma : sigmas) {
        kreg::GaussianKernel kernel(sigma, form);
        kreg::EvalConfig cfg;
        cfg.n_points = qs.n;
        cfg.rho = o.rho;
        cfg.seed = g.seed;
        cfg.truncation_sigmas = trunc;
        cfg.threads = resolve_threads(g.threads);
        kreg::ErrorEvaluator ev(P, kernel, cfg);
        kreg::EvalContext build_ctx = ev.make_context(P);
        for (kreg::Method m : methods) {
            for (std::size_t size : sizes) {
                for (std::size_t rep = 0; rep < o.reps; ++rep) {
                    std::string row = std::string(kreg::method_flag(m)) + ',' +
                                      std::to_string(size) + ',' +
                                      kreg::format_double_short(sigma) + ',' +
                                      std::to_string(rep) + ',';
                    try {
                        auto t0 = std::chrono::steady_clock::now();
                        kreg::Coreset cs =
                            kreg::build_by_size(P, m, size, g.seed + rep, build_ctx);
                        double build_ms =
                            std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
                        kreg::ErrorReport r = ev.evaluate(cs.data);
                        row += kreg::format_double(r.linf) + ',' +
                               kreg::format_double(r.linf_normalized) + ',' +
                               kreg::format_double(build_ms) + ',' +
                               kreg::format_double(r.query_ms_s);
                    } catch (const std::exception& e) {
                        row += std::string("failed,failed,failed,failed");
                        std::cerr << "sweep: " << row << ": " << e.what() << "\n";
                    }
                    os << row << "\n";
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// progressive
// ---------------------------------------------------------------------------

struct ProgressiveOpts {
    std::string in;
    double gamma1 = 0.0, width1 = 0.0, a = 1.5;
    double sigma = 0.0;
    std::string form = "half";
    std::string truncate = "10sigma";
    std::string windows;
    std::string queries = "random:0";
    double rho = 0.0;
};

void run_progressive(const ProgressiveOpts& o, const GlobalOpts& g) {
    if (!(o.sigma > 0.0)) throw CLI::ValidationError("--sigma", "required");
    if (!(o.gamma1 > 0.0) || !(o.width1 > 0.0))
        throw CLI::ValidationError("--gamma1", "required with --width1");
    if (o.windows.empty()) throw CLI::ValidationError("--windows", "required");
    kreg::Dataset raw = kreg::load_points(o.in).data;
    if (raw.dim() != 1)
        throw CLI::ValidationError("--in", "progressive experiments need d=1 data");

    // shift so the newest record sits at x = 0
    const double now = raw.extent_hi()[0];
    std::vector<double> xs(raw.coords());
    for (auto& x : xs) x -= now;
    kreg::Dataset P(1, std::move(xs), raw.ys(), raw.ws());

    auto windows = parse_double_list(o.windows, "--windows");
    QuerySpec qs = parse_queries(o.queries);
    if (!qs.random)
        throw CLI::ValidationError("--queries", "progressive uses random:N clouds");
    kreg::GaussianKernel kernel(o.sigma, parse_form(o.form));
    auto trunc = parse_truncate(o.truncate);

    Output out(g.out_path);
    std::ostream& os = out.stream();
    os << "window,regions,size,linf,linf_norm\n";
    for (double T : windows) {
        // window restriction [-T, 0]
        std::vector<double> wx, wy, ww;
        for (std::size_t i = 0; i < P.size(); ++i) {
            if (P.x(i)[0] >= -T) {
                wx.push_back(P.x(i)[0]);
                wy.push_back(P.y(i));
                ww.push_back(P.w(i));
            }
        }
        std::string row = kreg::format_double_short(T) + ',';
        try {
            kreg::Dataset window(1, std::move(wx), std::move(wy), std::move(ww));
            kreg::ProgressiveSpec spec{o.gamma1, o.width1, o.a, {}};
            kreg::Coreset cs = kreg::progressive_g_aggregate(window, spec);
            std::string regions = "?";
            for (const auto& [k, v] : cs.params)
                if (k == "regions") regions = v;
            kreg::EvalConfig cfg;
            cfg.n_points = qs.n ? qs.n : 32000;
            cfg.rho = o.rho;
            cfg.seed = g.seed;
            cfg.truncation_sigmas = trunc;
            cfg.threads = resolve_threads(g.threads);
            cfg.domain = kreg::Box{{-T}, {0.0}};
            kreg::ErrorReport r = kreg::linf_error(window, cs.data, kernel, cfg);
            row += regions + ',' + std::to_string(cs.data.size()) + ',' +
                   kreg::format_double(r.linf) + ',' +
                   kreg::format_double(r.linf_normalized);
        } catch (const std::exception& e) {
            row += std::string("failed,failed,failed,failed");
            std::cerr << "progressive: window " << T << ": " << e.what() << "\n";
        }
        os << row << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coresets for Nadaraya-Watson kernel regression"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "seed for every randomized step")
        ->capture_default_str();
    app.add_option("--threads", g.threads,
                   "worker threads for evaluation (0: KREG_THREADS or hardware)")
        ->capture_default_str();
    app.add_flag("--json", g.json_out, "emit a JSON summary where supported");

    SynthOpts synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate an AR(1) time series");
    synth_cmd->add_option("--n", synth.n, "number of points")->required();
    synth_cmd->add_option("--c", synth.c, "drift constant")->capture_default_str();
    synth_cmd->add_option("--phi", synth.phi, "AR coefficient")->capture_default_str();
    synth_cmd->add_option("--y0", synth.y0, "initial value")->capture_default_str();
    synth_cmd->add_option("--noise", synth.noise, "noise stddev")->capture_default_str();
    synth_cmd->add_option("--out", g.out_path, "output CSV (default stdout)");

    IngestOpts ingest;
    auto* ingest_cmd =
        app.add_subcommand("ingest", "convert a foreign CSV into x,y,w form");
    ingest_cmd->add_option("--in", ingest.in, "input CSV")->required();
    ingest_cmd->add_option("--x-cols", ingest.x_cols, "x column indices, e.g. 0,1")
        ->capture_default_str();
    ingest_cmd->add_option("--y-col", ingest.y_col, "y column index")
        ->capture_default_str();
    ingest_cmd->add_option("--w-col", ingest.w_col, "weight column index (-1: none)")
        ->capture_default_str();
    ingest_cmd->add_option("--delim", ingest.delim, "field delimiter")
        ->capture_default_str();
    ingest_cmd->add_option("--missing-token", ingest.missing, "missing-value marker")
        ->capture_default_str();
    ingest_cmd->add_option("--date-time-cols", ingest.date_time_cols,
                           "date,time column pair mapped to minutes since first record");
    ingest_cmd->add_option("--out", g.out_path, "output CSV (default stdout)");

    BuildOpts build;
    auto* build_cmd = app.add_subcommand("build", "construct a coreset");
    build_cmd->add_option("--in", build.in, "input points CSV")->required();
    build_cmd->add_option("--method", build.method, "rs|kcen|z|za|g|ga|an|prog-ga")
        ->required();
    build_cmd->add_option("--size", build.size, "target size (rs, z, za)");
    build_cmd->add_option("--k", build.k, "number of centers (kcen)");
    build_cmd->add_option("--gamma", build.gamma, "grid cell side (g, ga, an)");
    build_cmd->add_option("--eps", build.eps, "error target; with --rho derives gamma");
    build_cmd->add_option("--rho", build.rho, "density threshold for --eps");
    build_cmd->add_option("--sigma", build.sigma, "bandwidth (an, or --eps/--rho)");
    build_cmd->add_option("--kernel-form", build.form, "plain|half")
        ->capture_default_str();
    build_cmd->add_option("--truncate", build.truncate, "10sigma|<k>sigma|off (an)")
        ->capture_default_str();
    build_cmd->add_flag("--per-block", build.per_block,
                        "z: independent offset per block");
    build_cmd->add_option("--origin", build.origin, "grid anchor: zero|min")
        ->capture_default_str();
    build_cmd->add_option("--gamma1", build.gamma1, "prog-ga: finest cell side");
    build_cmd->add_option("--width1", build.width1, "prog-ga: newest region width");
    build_cmd->add_option("--a", build.a, "prog-ga: growth factor")
        ->capture_default_str();
    build_cmd->add_option("--regions", build.regions,
                          "prog-ga: fixed region count (default: derive)");
    build_cmd->add_option("--out", g.out_path, "output CSV (default stdout)");

    EvalOpts eval;
    auto* eval_cmd = app.add_subcommand(
        "eval", "evaluate the regression, or compare against a coreset");
    eval_cmd->add_option("--in", eval.in, "input points CSV")->required();
    eval_cmd->add_option("--coreset", eval.coreset,
                         "coreset CSV; enables the error report");
    eval_cmd->add_option("--sigma", eval.sigma, "bandwidth")->required();
    eval_cmd->add_option("--kernel-form", eval.form, "plain|half")
        ->capture_default_str();
    eval_cmd->add_option("--queries", eval.queries, "random:N or a CSV of locations")
        ->capture_default_str();
    eval_cmd->add_option("--truncate", eval.truncate, "10sigma|<k>sigma|off")
        ->capture_default_str();
    eval_cmd->add_option("--rho", eval.rho, "skip queries with kde_P below rho")
        ->capture_default_str();
    eval_cmd->add_option("--margin", eval.margin, "expand the query domain box")
        ->capture_default_str();
    eval_cmd->add_option("--out", g.out_path, "output CSV (default stdout)");

    BenchOpts bench_o;
    auto* bench_cmd =
        app.add_subcommand("bench", "construction/query timing and error per method");
    bench_cmd->add_option("--in", bench_o.in, "input points CSV")->required();
    bench_cmd->add_option("--methods", bench_o.methods, "comma list of methods")
        ->capture_default_str();
    bench_cmd->add_option("--sizes", bench_o.sizes, "comma list of coreset sizes")
        ->capture_default_str();
    bench_cmd->add_option("--sigma", bench_o.sigma, "bandwidth")->required();
    bench_cmd->add_option("--kernel-form", bench_o.form, "plain|half")
        ->capture_default_str();
    bench_cmd->add_option("--truncate", bench_o.truncate, "10sigma|<k>sigma|off")
        ->capture_default_str();
    bench_cmd->add_option("--queries", bench_o.queries, "random:N evaluation cloud")
        ->capture_default_str();
    bench_cmd->add_option("--rho", bench_o.rho, "admissibility threshold")
        ->capture_default_str();
    bench_cmd->add_option("--reps", bench_o.reps, "repetitions per row")
        ->capture_default_str();
    bench_cmd->add_option("--out", g.out_path, "output CSV (default stdout)");

    SweepOpts sweep;
    auto* sweep_cmd =
        app.add_subcommand("sweep", "cross-product error table over sizes and bandwidths");
    sweep_cmd->add_option("--in", sweep.in, "input points CSV")->required();
    sweep_cmd->add_option("--methods", sweep.methods, "comma list of methods")
        ->capture_default_str();
    sweep_cmd->add_option("--sizes", sweep.sizes, "comma list of coreset sizes")
        ->capture_default_str();
    sweep_cmd->add_option("--sigmas", sweep.sigmas, "comma list of bandwidths")
        ->capture_default_str();
    sweep_cmd->add_option("--kernel-form", sweep.form, "plain|half")
        ->capture_default_str();
    sweep_cmd->add_option("--truncate", sweep.truncate, "10sigma|<k>sigma|off")
        ->capture_default_str();
    sweep_cmd->add_option("--queries", sweep.queries, "random:N evaluation cloud")
        ->capture_default_str();
    sweep_cmd->add_option("--rho", sweep.rho, "admissibility threshold")
        ->capture_default_str();
    sweep_cmd->add_option("--reps", sweep.reps, "repetitions per cell")
        ->capture_default_str();
    sweep_cmd->add_option("--out", g.out_path, "output CSV (default stdout)");

    ProgressiveOpts prog;
    auto* prog_cmd = app.add_subcommand(
        "progressive", "windowed error of the progressive grid scheme");
    prog_cmd->add_option("--in", prog.in, "input points CSV (d=1)")->required();
    prog_cmd->add_option("--gamma1", prog.gamma1, "finest cell side")->required();
    prog_cmd->add_option("--width1", prog.width1, "newest region width")->required();
    prog_cmd->add_option("--a", prog.a, "growth factor")->capture_default_str();
    prog_cmd->add_option("--sigma", prog.sigma, "bandwidth")->required();
    prog_cmd->add_option("--kernel-form", prog.form, "plain|half")
        ->capture_default_str();
    prog_cmd->add_option("--truncate", prog.truncate, "10sigma|<k>sigma|off")
        ->capture_default_str();
    prog_cmd->add_option("--windows", prog.windows, "comma list of window widths T")
        ->required();
    prog_cmd->add_option("--queries", prog.queries, "random:N evaluation cloud")
        ->capture_default_str();
    prog_cmd->add_option("--rho", prog.rho, "admissibility threshold")
        ->capture_default_str();
    prog_cmd->add_option("--out", g.out_path, "output CSV (default stdout)");

    // global flags (--seed, --threads, --json) may follow the subcommand
    for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(synth_cmd)) run_synth(synth, g);
        else if (app.got_subcommand(ingest_cmd)) run_ingest(ingest, g);
        else if (app.got_subcommand(build_cmd)) run_build(build, g);
        else if (app.got_subcommand(eval_cmd)) run_eval(eval, g);
        else if (app.got_subcommand(bench_cmd)) run_bench(bench_o, g);
        else if (app.got_subcommand(sweep_cmd)) run_sweep(sweep, g);
        else if (app.got_subcommand(prog_cmd)) run_progressive(prog, g);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
