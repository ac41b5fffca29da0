// fission_cli: command-line front end for the fission clustering library.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fission/fission.hpp"

namespace fs = std::filesystem;
using namespace fission;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitAlgorithm = 4;
constexpr int kExitInternal = 5;

constexpr const char* kExitCodeHelp =
    "Exit codes: 0 success, 1 usage error, 2 I/O error, 3 invalid input or parameters,\n"
    "4 algorithm failure (e.g. over-denoising), 5 internal error.\n"
    "FC_THREADS caps worker threads (0 or unset = all cores).";

void warn(std::vector<std::string>& sink, const std::string& message) {
    std::cerr << "warning: " << message << '\n';
    sink.push_back(message);
}

// ----------------------------------------------------------------------------
// Data source: --input CSV or --generate GenSpec JSON, optionally reseeded.

struct SourceOptions {
    std::string input;
    std::string generate;
    std::optional<std::uint64_t> seed;
};

void add_source_options(CLI::App* cmd, SourceOptions& src) {
    auto* group = cmd->add_option_group("source", "Exactly one data source");
    group->add_option("--input", src.input, "CSV file (optional header; a trailing 'label' column holds classes)");
    group->add_option("--generate", src.generate, "Generator spec JSON file, e.g. {\"kind\":\"imbalance\",\"seed\":1}");
    group->require_option(1);
    cmd->add_option("--seed", src.seed, "Overrides the seed in the --generate spec");
}

GenSpec load_gen_spec(const std::string& path) {
    const std::string text = io::read_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("generator spec '" + path + "' is not valid JSON: " + e.what());
    }
    return GenSpec::from_json(doc);
}

struct LoadedData {
    Dataset dataset;
    Json source;
};

LoadedData load_source(const SourceOptions& src, std::vector<std::string>& warnings) {
    if (!src.generate.empty()) {
        GenSpec spec = load_gen_spec(src.generate);
        if (src.seed) spec.seed = *src.seed;
        Dataset ds = generate(spec);
        return {std::move(ds), Json{{"generate", spec.to_json()}}};
    }
    if (src.seed) warn(warnings, "--seed only applies to --generate; ignored");
    return {load_csv(src.input), Json{{"input", src.input}}};
}

// ----------------------------------------------------------------------------
// Algorithm parameters shared by cluster and sweep.

struct AlgoOptions {
    std::string algorithm = "fc-knn";
    std::string metric = "euclidean";
    double t = 4.0;
    std::string n0 = "2%";
    std::string threshold_mode = "global";
    std::string dense_stop = "t*d0";
    double r_start = 0.4;
    double r_step = 0.1;
    double r_max = 0.9;
};

struct AlgoFlags {
    CLI::Option* t = nullptr;
    CLI::Option* n0 = nullptr;
    CLI::Option* dense_stop = nullptr;
    CLI::Option* r_start = nullptr;
    CLI::Option* r_step = nullptr;
    CLI::Option* r_max = nullptr;
};

AlgoFlags add_algo_options(CLI::App* cmd, AlgoOptions& o, bool with_algorithm) {
    AlgoFlags f;
    if (with_algorithm)
        cmd->add_option("--algorithm", o.algorithm, "fc | fc-knn")
            ->check(CLI::IsMember({"fc", "fc-knn"}))
            ->capture_default_str();
    cmd->add_option("--metric", o.metric, "euclidean | manhattan | minkowski:p")->capture_default_str();
    cmd->add_option("--threshold-mode", o.threshold_mode, "global | per-subset")->capture_default_str();
    if (with_algorithm) {
        f.t = cmd->add_option("--t", o.t, "Denoising multiplier (> 1), fc-knn only")->capture_default_str();
        f.n0 = cmd->add_option("--n0", o.n0, "Neighbour count: integer or percentage of n, e.g. 5 or 2%")
                   ->capture_default_str();
    }
    f.dense_stop =
        cmd->add_option("--dense-stop", o.dense_stop, "Stop rule on the dense subset: t*d0 | d0")->capture_default_str();
    f.r_start = cmd->add_option("--r-start", o.r_start, "First removal ratio")->capture_default_str();
    f.r_step = cmd->add_option("--r-step", o.r_step, "Removal ratio increment")->capture_default_str();
    f.r_max = cmd->add_option("--r-max", o.r_max, "Largest removal ratio")->capture_default_str();
    return f;
}

FcParams make_params(const AlgoOptions& o) {
    FcParams p;
    p.t = o.t;
    p.n0 = N0Rule::parse(o.n0);
    p.r_start = o.r_start;
    p.r_step = o.r_step;
    p.r_max = o.r_max;
    p.metric = Metric::parse(o.metric);
    p.threshold_mode = parse_threshold_mode(o.threshold_mode);
    p.dense_stop = parse_dense_stop(o.dense_stop);
    return p;
}

Json params_json(const FcParams& p, std::size_t n, bool knn) {
    Json j{{"metric", p.metric.tag()}, {"threshold_mode", to_string(p.threshold_mode)}};
    if (knn) {
        j["t"] = p.t;
        j["n0_rule"] = p.n0.describe();
        j["n0"] = p.n0.resolve(n);
        j["r_start"] = p.r_start;
        j["r_step"] = p.r_step;
        j["r_max"] = p.r_max;
        j["dense_stop"] = to_string(p.dense_stop);
    }
    return j;
}

void check_metric(const Metric& m, std::vector<std::string>& warnings) {
    if (!m.is_true_metric())
        warn(warnings, "minkowski with p < 1 is not a metric; the crack/d0 separation guarantee does not hold");
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ----------------------------------------------------------------------------
// cluster

struct ClusterOptions {
    SourceOptions source;
    AlgoOptions algo;
    std::string labels_out;
    std::string report_out;
    std::string plot_out;
    bool timings = false;
};

int run_cluster(const ClusterOptions& o, const AlgoFlags& flags) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> warnings;
    LoadedData data = load_source(o.source, warnings);
    const Dataset& ds = data.dataset;
    const bool knn = o.algo.algorithm == "fc-knn";
    const FcParams params = make_params(o.algo);
    check_metric(params.metric, warnings);
    if (!knn) {
        for (auto [flag, name] : {std::pair{flags.t, "--t"}, {flags.n0, "--n0"}, {flags.dense_stop, "--dense-stop"},
                                  {flags.r_start, "--r-start"}, {flags.r_step, "--r-step"}, {flags.r_max, "--r-max"}})
            if (flag->count() > 0) warn(warnings, std::string(name) + " is ignored by --algorithm fc");
    }
    if (!o.plot_out.empty() && ds.dims() != 2) throw ValidationError("plot requires 2-D data");

    const auto t_matrix = std::chrono::steady_clock::now();
    const DistanceMatrix dm = distance_matrix(ds, params.metric);
    const double matrix_ms = elapsed_ms(t_matrix);

    const auto t_cluster = std::chrono::steady_clock::now();
    Partition partition;
    std::optional<DenoiseResult> denoised;
    if (knn) {
        params.validate(ds.size());
        FcKnnResult r = fc_knn(dm, params);
        for (const auto& w : r.warnings) warn(warnings, w);
        partition = std::move(r.partition);
        denoised = std::move(r.denoise);
    } else {
        partition = fission_cluster(dm, FissionOptions{params.threshold_mode, std::nullopt});
    }
    const double cluster_ms = elapsed_ms(t_cluster);

    Json report;
    report["source"] = data.source;
    report["n"] = ds.size();
    report["dims"] = ds.dims();
    report["algorithm"] = o.algo.algorithm;
    report["params"] = params_json(params, ds.size(), knn);
    report["k"] = partition.k;
    report["partition"] = to_json(partition);
    report["denoise"] = denoised ? to_json(*denoised) : Json(nullptr);
    if (ds.labels()) report["evaluation"] = to_json(evaluate(partition.labels, *ds.labels()));
    report["warnings"] = warnings;
    if (o.timings)
        report["timings_ms"] = Json{{"distance_matrix", matrix_ms}, {"clustering", cluster_ms},
                                    {"total", elapsed_ms(start)}};

    std::vector<io::FileContent> outputs;
    if (!o.labels_out.empty()) outputs.emplace_back(o.labels_out, format_labels(partition.labels));
    if (!o.report_out.empty()) outputs.emplace_back(o.report_out, dump(report));
    if (!o.plot_out.empty()) outputs.emplace_back(o.plot_out, render_svg(ds, partition.labels));
    io::write_files_atomic(outputs);

    std::cout << "k=" << partition.k;
    if (denoised) std::cout << " separated=" << (denoised->separated ? "true" : "false");
    if (report.contains("evaluation"))
        std::cout << " accuracy=" << io::format_double(report["evaluation"]["accuracy"].get<double>())
                  << " f_score=" << io::format_double(report["evaluation"]["f_score"].get<double>());
    std::cout << '\n';
    return kExitOk;
}

// ----------------------------------------------------------------------------
// generate

struct GenerateOptions {
    std::string spec;
    std::string kind;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string labels_out;
    std::string plot_out;
};

int run_generate(const GenerateOptions& o) {
    GenSpec spec = o.spec.empty() ? GenSpec::defaults(parse_gen_kind(o.kind)) : load_gen_spec(o.spec);
    if (o.seed) spec.seed = *o.seed;
    const Dataset ds = generate(spec);
    if (!o.plot_out.empty() && ds.dims() != 2) throw ValidationError("plot requires 2-D data");
    std::vector<io::FileContent> outputs{{o.out, format_csv(ds)}};
    if (!o.labels_out.empty()) outputs.emplace_back(o.labels_out, format_labels(*ds.labels()));
    if (!o.plot_out.empty()) outputs.emplace_back(o.plot_out, render_svg(ds, *ds.labels()));
    io::write_files_atomic(outputs);
    std::cout << "generated " << ds.size() << " points, " << ds.class_count() << " classes ("
              << spec.to_json().dump() << ")\n";
    return kExitOk;
}

// ----------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
    std::string pred;
    std::string truth;
    std::string input;
    std::string report_out;
};

int run_evaluate(const EvaluateOptions& o) {
    const std::vector<int> pred = load_labels(o.pred);
    std::vector<int> truth;
    if (!o.truth.empty()) {
        truth = load_labels(o.truth);
    } else {
        const Dataset ds = load_csv(o.input);
        if (!ds.labels()) throw ValidationError("'" + o.input + "' has no label column");
        truth = *ds.labels();
    }
    const EvalReport r = evaluate(pred, truth);
    if (!o.report_out.empty()) io::write_file_atomic(o.report_out, dump(to_json(r)));
    std::cout << "accuracy=" << io::format_double(r.accuracy) << " f_score=" << io::format_double(r.f_score)
              << " predicted_k=" << r.predicted_k << " true_k=" << r.true_k << '\n';
    return kExitOk;
}

// ----------------------------------------------------------------------------
// sweep

struct SweepOptions {
    SourceOptions source;
    AlgoOptions algo;
    double t_min = 2.0;
    double t_max = 13.0;
    double t_step = 1.0;
    std::vector<std::string> n0s{"2%"};
    std::string report_out;
    std::string table_out;
};

int run_sweep(const SweepOptions& o) {
    std::vector<std::string> warnings;
    LoadedData data = load_source(o.source, warnings);
    const Dataset& ds = data.dataset;
    FcParams base = make_params(o.algo);
    check_metric(base.metric, warnings);
    const std::vector<double> ts = t_grid(o.t_min, o.t_max, o.t_step);
    std::vector<std::size_t> n0s;
    for (const auto& text : o.n0s) n0s.push_back(N0Rule::parse(text).resolve(ds.size()));
    if (ds.size() < 5) throw ValidationError("fc-knn needs at least 5 points");

    const DistanceMatrix dm = distance_matrix(ds, base.metric);
    std::optional<std::span<const int>> truth;
    if (ds.labels()) truth = std::span<const int>(*ds.labels());
    const SweepReport result = sweep(dm, truth, ts, n0s, base);

    std::string table = "n0,t,k,separated";
    if (truth) table += ",accuracy,f_score";
    table += '\n';
    for (const auto& p : result.points) {
        table += std::to_string(p.n0) + "," + io::format_double(p.t) + "," + std::to_string(p.k) + "," +
                 (p.separated ? "true" : "false");
        if (p.accuracy) table += "," + io::format_double(*p.accuracy) + "," + io::format_double(*p.f_score);
        table += '\n';
    }

    Json params = params_json(base, ds.size(), true);
    params.erase("t");
    params.erase("n0_rule");
    params.erase("n0");
    Json report;
    report["source"] = data.source;
    report["n"] = ds.size();
    report["dims"] = ds.dims();
    report["params"] = std::move(params);
    report["sweep"] = to_json(result);
    report["warnings"] = warnings;

    std::vector<io::FileContent> outputs;
    if (!o.report_out.empty()) outputs.emplace_back(o.report_out, dump(report));
    if (!o.table_out.empty()) outputs.emplace_back(o.table_out, table);
    io::write_files_atomic(outputs);

    std::cout << table;
    for (const auto& iv : result.intervals)
        std::cout << "stable: n0=" << iv.n0 << " t=[" << io::format_double(iv.t_begin) << ", "
                  << io::format_double(iv.t_end) << "] k=" << iv.k << '\n';
    return kExitOk;
}

// ----------------------------------------------------------------------------
// bench

struct BenchOptions {
    std::vector<std::size_t> sizes{1000, 2000, 4000};
    std::size_t repeats = 3;
    std::size_t n0 = 10;
    std::uint64_t seed = 1;
    std::string out;
};

int run_bench_cmd(const BenchOptions& o) {
    if (o.sizes.empty()) throw ValidationError("bench needs at least one size");
    const std::vector<BenchRow> rows = run_bench(o.sizes, o.repeats, o.n0, o.seed);
    const std::string csv = format_bench_csv(rows);
    if (!o.out.empty()) io::write_file_atomic(o.out, csv);
    std::cout << csv;
    return kExitOk;
}

// ----------------------------------------------------------------------------
// plot

struct PlotOptions {
    SourceOptions source;
    std::string labels;
    std::string out;
};

int run_plot(const PlotOptions& o) {
    std::vector<std::string> warnings;
    LoadedData data = load_source(o.source, warnings);
    const Dataset& ds = data.dataset;
    std::vector<int> labels;
    if (!o.labels.empty())
        labels = load_labels(o.labels);
    else if (ds.labels())
        labels = *ds.labels();
    else
        labels.assign(ds.size(), 0);
    io::write_file_atomic(o.out, render_svg(ds, labels));
    return kExitOk;
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::io: return kExitIo;
    case ErrorKind::validation: return kExitValidation;
    case ErrorKind::algorithm: return kExitAlgorithm;
    }
    return kExitInternal;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fission clustering: divisive clustering by maximal cracks, with k-NN density denoising."};
    app.footer(kExitCodeHelp);
    app.require_subcommand(1);

    ClusterOptions cluster;
    auto* cmd_cluster = app.add_subcommand("cluster", "Cluster a dataset with fc or fc-knn");
    add_source_options(cmd_cluster, cluster.source);
    const AlgoFlags cluster_flags = add_algo_options(cmd_cluster, cluster.algo, true);
    cmd_cluster->add_option("--labels-out", cluster.labels_out, "Write one label per line");
    cmd_cluster->add_option("--report-out", cluster.report_out, "Write the JSON report");
    cmd_cluster->add_option("--plot-out", cluster.plot_out, "Write an SVG scatter plot (2-D data only)");
    cmd_cluster->add_flag("--timings", cluster.timings, "Include wall-clock timings in the report");

    GenerateOptions gen;
    auto* cmd_generate = app.add_subcommand("generate", "Write a synthetic dataset as CSV");
    auto* gen_source = cmd_generate->add_option_group("spec", "Generator selection");
    gen_source->add_option("--spec", gen.spec, "Generator spec JSON file");
    gen_source->add_option("--kind", gen.kind, "blobs | imbalance | annulus_blobs | grid_line | families (defaults)");
    gen_source->require_option(1);
    cmd_generate->add_option("--seed", gen.seed, "Overrides the spec seed");
    cmd_generate->add_option("--out", gen.out, "Output CSV (with label column)")->required();
    cmd_generate->add_option("--labels-out", gen.labels_out, "Also write the class labels");
    cmd_generate->add_option("--plot-out", gen.plot_out, "Also write an SVG of the classes (2-D only)");

    EvaluateOptions eval;
    auto* cmd_evaluate = app.add_subcommand("evaluate", "Score predicted labels against ground truth");
    cmd_evaluate->add_option("--pred", eval.pred, "Predicted labels file")->required();
    auto* truth_source = cmd_evaluate->add_option_group("truth", "Ground truth source");
    truth_source->add_option("--truth", eval.truth, "Ground-truth labels file");
    truth_source->add_option("--input", eval.input, "CSV with a label column");
    truth_source->require_option(1);
    cmd_evaluate->add_option("--report-out", eval.report_out, "Write the JSON evaluation");

    SweepOptions sw;
    auto* cmd_sweep = app.add_subcommand("sweep", "Run fc-knn over a grid of t and n0 values");
    add_source_options(cmd_sweep, sw.source);
    add_algo_options(cmd_sweep, sw.algo, false);
    cmd_sweep->add_option("--t-min", sw.t_min, "Smallest t")->capture_default_str();
    cmd_sweep->add_option("--t-max", sw.t_max, "Largest t")->capture_default_str();
    cmd_sweep->add_option("--t-step", sw.t_step, "t increment")->capture_default_str();
    cmd_sweep->add_option("--n0", sw.n0s, "One or more n0 values (integer or percentage)")->capture_default_str();
    cmd_sweep->add_option("--report-out", sw.report_out, "Write the JSON sweep report");
    cmd_sweep->add_option("--table-out", sw.table_out, "Write the sweep table as CSV");

    BenchOptions bench;
    auto* cmd_bench = app.add_subcommand("bench", "Time each stage on generated blobs of growing size");
    cmd_bench->add_option("--sizes", bench.sizes, "Dataset sizes (each >= 10)")->delimiter(',')->capture_default_str();
    cmd_bench->add_option("--repeats", bench.repeats, "Runs per stage; the median is reported")->capture_default_str();
    cmd_bench->add_option("--n0", bench.n0, "Fixed neighbour count")->capture_default_str();
    cmd_bench->add_option("--seed", bench.seed, "Generator seed")->capture_default_str();
    cmd_bench->add_option("--out", bench.out, "Write the timing table as CSV");

    PlotOptions plot;
    auto* cmd_plot = app.add_subcommand("plot", "Render a 2-D dataset and partition as SVG");
    add_source_options(cmd_plot, plot.source);
    cmd_plot->add_option("--labels", plot.labels, "Labels file (default: dataset classes, else one color)");
    cmd_plot->add_option("--out", plot.out, "Output SVG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*cmd_cluster) return run_cluster(cluster, cluster_flags);
        if (*cmd_generate) return run_generate(gen);
        if (*cmd_evaluate) return run_evaluate(eval);
        if (*cmd_sweep) return run_sweep(sw);
        if (*cmd_bench) return run_bench_cmd(bench);
        if (*cmd_plot) return run_plot(plot);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}
