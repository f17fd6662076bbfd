#include "mvfuse/cli.hpp"

#include "mvfuse/datagen.hpp"
#include "mvfuse/io.hpp"
#include "mvfuse/metrics.hpp"
#include "mvfuse/pipeline.hpp"
#include "mvfuse/report.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace mvfuse::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct FuseArgs {
    std::string mode = "sgf";
    std::size_t k = 6;
    int clusters = 0;
    double beta = 1.0;
    double gamma = 1e4;
    std::string lambda;
    std::string metric = "euclidean";
    std::string views_are = "features";
    std::uint64_t seed = 0;
    std::string out = "report.json";
    std::string graph_out = "graph.tsv";
    int max_outer = 50;
    double tol = 1e-6;
    bool header = false;
    std::string truth;
    int restarts = 10;
    int kmeans_iter = 1000;
    std::vector<std::string> views;
};

struct EvalArgs {
    std::string pred;
    std::string truth;
    std::string out;
};

struct SynthArgs {
    std::string spec_file;
    datagen::SyntheticSpec spec;
    std::string out_dir = ".";
};

Vector parse_lambda(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw io::InputError("--lambda: cannot parse '" + item + "'");
        }
    }
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << j.dump(2) << '\n';
}

int cmd_fuse(const FuseArgs& a, std::ostream& out) {
    pipeline::PipelineConfig cfg;
    cfg.mode = a.mode == "sgf" ? pipeline::Mode::sgf : pipeline::Mode::dgf;
    cfg.k = a.k;
    cfg.n_clusters = a.clusters;
    cfg.metric = a.metric == "euclidean" ? graphs::Metric::euclidean : graphs::Metric::cosine;
    cfg.input = a.views_are == "features" ? pipeline::InputKind::features : pipeline::InputKind::distances;
    cfg.fusion.beta = a.beta;
    cfg.fusion.gamma = a.gamma;
    cfg.fusion.max_outer = a.max_outer;
    cfg.fusion.rel_tol = a.tol;
    if (!a.lambda.empty()) cfg.fusion.lambda = parse_lambda(a.lambda);
    cfg.kmeans_restarts = a.restarts;
    cfg.kmeans_max_iter = a.kmeans_iter;
    cfg.seed = a.seed;

    std::vector<Matrix> views;
    for (const auto& path : a.views) views.push_back(io::read_matrix_csv(path, a.header));
    for (std::size_t v = 0; v < views.size(); ++v) {
        require_shape(views[v].rows() == views.front().rows(),
                      "view '" + a.views[v] + "' has " + std::to_string(views[v].rows()) + " rows, expected " +
                          std::to_string(views.front().rows()));
        if (cfg.input == pipeline::InputKind::distances)
            require_shape(views[v].rows() == views[v].cols(), "distance matrix '" + a.views[v] + "' is not square");
    }
    cfg.fusion.validate(static_cast<Eigen::Index>(views.size()));

    std::optional<Labels> truth;
    if (!a.truth.empty()) {
        truth = io::read_labels(a.truth);
        require_shape(truth->size() == static_cast<std::size_t>(views.front().rows()),
                      "truth labels do not match the number of instances");
    }

    const auto result = pipeline::run(views, cfg);
    auto rep = report::make_report(cfg, result);
    if (truth) rep.metrics = metrics::evaluate(rep.labels, *truth);

    write_json(a.out, json(rep));
    if (!a.graph_out.empty()) io::write_edge_list(a.graph_out, result.fused);
    out << "wrote " << a.out;
    if (!a.graph_out.empty()) out << " and " << a.graph_out;
    out << " (" << result.fusion.iterations << " outer iterations, "
        << (result.fusion.converged ? "converged" : "not converged") << ")\n";
    return ok;
}

Labels read_prediction(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw io::InputError("cannot open '" + path.string() + "'");
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw io::InputError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    try {
        if (j.is_array()) return j.get<Labels>();
        return j.at("labels").get<Labels>();
    } catch (const json::exception&) {
        throw io::InputError("'" + path.string() + "' has no integer 'labels' array");
    }
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    const Labels pred = read_prediction(a.pred);
    const Labels truth = io::read_labels(a.truth);
    require_shape(pred.size() == truth.size(), "prediction has " + std::to_string(pred.size()) +
                                                   " labels but truth has " + std::to_string(truth.size()));
    const json scores = metrics::evaluate(pred, truth);
    if (!a.out.empty()) write_json(a.out, scores);
    out << scores.dump(2) << '\n';
    return ok;
}

void apply_spec_file(const std::string& path, datagen::SyntheticSpec& spec) {
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_file(path);
    } catch (const CLI::Error& e) {
        throw io::InputError("cannot read spec '" + path + "': " + e.what());
    }
    for (const auto& item : items) {
        std::string key = item.name;
        std::replace(key.begin(), key.end(), '-', '_');
        if (item.inputs.empty() || key == "++" || key == "--") continue;
        auto number = [&] {
            try {
                return std::stod(item.inputs.front());
            } catch (const std::exception&) {
                throw io::InputError("spec '" + path + "': bad value for " + key);
            }
        };
        if (key == "n") spec.n = static_cast<std::size_t>(number());
        else if (key == "clusters" || key == "n_clusters") spec.n_clusters = static_cast<int>(number());
        else if (key == "views") spec.views = static_cast<int>(number());
        else if (key == "p_in") spec.p_in = number();
        else if (key == "p_out") spec.p_out = number();
        else if (key == "corrupt_rate") spec.corrupt_rate = number();
        else if (key == "noise_scale") spec.noise_scale = number();
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(number());
        else if (key == "corrupt_views") {
            spec.corrupt_views.clear();
            for (const auto& v : item.inputs) {
                try {
                    spec.corrupt_views.push_back(std::stoi(v));
                } catch (const std::exception&) {
                    throw io::InputError("spec '" + path + "': bad corrupt_views entry '" + v + "'");
                }
            }
        } else {
            throw io::InputError("spec '" + path + "': unknown key '" + item.name + "'");
        }
    }
}

int cmd_synth(SynthArgs a, const CLI::App& sub, std::ostream& out) {
    datagen::SyntheticSpec spec;
    if (!a.spec_file.empty()) apply_spec_file(a.spec_file, spec);
    // explicit flags override the spec file
    const auto& given = a.spec;
    if (sub.count("--n")) spec.n = given.n;
    if (sub.count("--clusters")) spec.n_clusters = given.n_clusters;
    if (sub.count("--views")) spec.views = given.views;
    if (sub.count("--p-in")) spec.p_in = given.p_in;
    if (sub.count("--p-out")) spec.p_out = given.p_out;
    if (sub.count("--corrupt-views")) spec.corrupt_views = given.corrupt_views;
    if (sub.count("--corrupt-rate")) spec.corrupt_rate = given.corrupt_rate;
    if (sub.count("--noise-scale")) spec.noise_scale = given.noise_scale;
    if (sub.count("--seed")) spec.seed = given.seed;

    const auto data = datagen::generate_multiview(spec);
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    for (std::size_t v = 0; v < data.views.size(); ++v) {
        const fs::path path = dir / ("view_" + std::to_string(v) + ".csv");
        io::write_matrix_csv(path, datagen::similarity_to_distance(data.views[v]));
        out << path.string() << '\n';
    }
    io::write_labels(dir / "truth.csv", data.truth);
    out << (dir / "truth.csv").string() << '\n';
    return ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-view graph fusion with consistency and inconsistency learning", "mvfuse"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    FuseArgs fa;
    auto* fuse = app.add_subcommand("fuse", "Fuse per-view graphs and cluster the result");
    fuse->add_option("--mode", fa.mode, "Fusion variant")->check(CLI::IsMember({"sgf", "dgf"}));
    fuse->add_option("--k", fa.k, "Nearest neighbours per node")->check(CLI::PositiveNumber);
    fuse->add_option("--clusters", fa.clusters, "Number of clusters")
        ->required()
        ->check(CLI::Range(2, 1 << 30))
        ->default_str("");
    fuse->add_option("--beta", fa.beta, "Inconsistency magnitude weight");
    fuse->add_option("--gamma", fa.gamma, "Cross-view inconsistency weight");
    fuse->add_option("--lambda", fa.lambda, "Comma-separated per-view importance");
    fuse->add_option("--metric", fa.metric, "Feature distance")->check(CLI::IsMember({"euclidean", "cosine"}));
    fuse->add_option("--views-are", fa.views_are, "Input kind")->check(CLI::IsMember({"features", "distances"}));
    fuse->add_option("--seed", fa.seed, "Random seed for k-means and Lanczos");
    fuse->add_option("--out", fa.out, "Report JSON path");
    fuse->add_option("--graph-out", fa.graph_out, "Fused graph TSV path (empty to skip)");
    fuse->add_option("--max-outer", fa.max_outer, "Maximum outer iterations")->check(CLI::PositiveNumber);
    fuse->add_option("--tol", fa.tol, "Relative objective tolerance")->check(CLI::NonNegativeNumber);
    fuse->add_flag("--header", fa.header, "Skip the first line of every CSV");
    fuse->add_option("--truth", fa.truth, "Ground-truth labels for scoring");
    fuse->add_option("--restarts", fa.restarts, "k-means restarts")->check(CLI::PositiveNumber);
    fuse->add_option("--kmeans-iter", fa.kmeans_iter, "k-means iteration cap")->check(CLI::PositiveNumber);
    fuse->add_option("views", fa.views, "One CSV per view")->required()->default_str("");

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Score predicted labels against the truth");
    eval->add_option("pred", ea.pred, "Report JSON (or JSON array of labels)")->required();
    eval->add_option("truth", ea.truth, "Truth labels")->required();
    eval->add_option("--out", ea.out, "Also write the scores to this JSON file");

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "Write a synthetic multi-view dataset as distance CSVs");
    synth->add_option("--spec", sa.spec_file, "TOML file with spec keys (flags override it)");
    synth->add_option("--n", sa.spec.n, "Nodes");
    synth->add_option("--clusters", sa.spec.n_clusters, "Planted clusters");
    synth->add_option("--views", sa.spec.views, "Views");
    synth->add_option("--p-in", sa.spec.p_in, "Within-cluster weight scale");
    synth->add_option("--p-out", sa.spec.p_out, "Cross-cluster weight scale");
    synth->add_option("--corrupt-views", sa.spec.corrupt_views, "Indices of corrupted views")->delimiter(',')->default_str("");
    synth->add_option("--corrupt-rate", sa.spec.corrupt_rate, "Fraction of cross-cluster pairs perturbed");
    synth->add_option("--noise-scale", sa.spec.noise_scale, "Magnitude of the added noise");
    synth->add_option("--seed", sa.spec.seed, "Random seed");
    synth->add_option("--out-dir", sa.out_dir, "Output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : malformed_input;
    }

    try {
        if (*fuse) return cmd_fuse(fa, out);
        if (*eval) return cmd_eval(ea, out);
        if (*synth) return cmd_synth(sa, *synth, out);
    } catch (const ShapeError& e) {
        err << "error: " << e.what() << '\n';
        return shape_mismatch;
    } catch (const io::InputError& e) {
        err << "error: " << e.what() << '\n';
        return malformed_input;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return malformed_input;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
    return failure;
}

} // namespace mvfuse::cli
