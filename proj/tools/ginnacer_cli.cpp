#include "ginnacer/bench.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace {

using namespace ginnacer;

Vector load_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open vector file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("cannot parse " + path + ": " + e.what());
    }
    if (!doc.is_array())
        throw std::runtime_error(path + ": expected a JSON array of numbers");
    Vector v(static_cast<Index>(doc.size()));
    for (std::size_t i = 0; i < doc.size(); ++i) {
        if (!doc[i].is_number())
            throw std::runtime_error(path + ": non-numeric entry");
        v(static_cast<Index>(i)) = doc[i].get<double>();
    }
    return v;
}

NegInput parse_neg_input(const std::string& s) {
    if (s == "on")
        return NegInput::On;
    if (s == "off")
        return NegInput::Off;
    if (s == "auto")
        return NegInput::Auto;
    throw CLI::ValidationError("--neg-input must be one of on, off, auto");
}

// Accepts "K", "A..B" or a comma list.
std::vector<std::size_t> parse_skip_range(const std::string& s) {
    std::vector<std::size_t> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const std::size_t a = std::stoul(s.substr(0, dots));
        const std::size_t b = std::stoul(s.substr(dots + 2));
        if (b < a)
            throw CLI::ValidationError("--skip-sweep range must be ascending");
        for (std::size_t k = a; k <= b; ++k)
            out.push_back(k);
        return out;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(std::stoul(tok));
    if (out.empty())
        throw CLI::ValidationError("--skip-sweep is empty");
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << content;
}

void print_interval(const IntervalVector& iv) {
    std::string lower = "lower:";
    std::string upper = "upper:";
    char buf[40];
    for (Index i = 0; i < iv.size(); ++i) {
        std::snprintf(buf, sizeof buf, " %.17g", iv.lower(i));
        lower += buf;
        std::snprintf(buf, sizeof buf, " %.17g", iv.upper(i));
        upper += buf;
    }
    std::cout << lower << '\n' << upper << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Global interval abstractions of feedforward ReLU networks "
                 "with exact reconstruction at a chosen centroid"};
    app.require_subcommand(1);

    // abstract
    auto* cmd_abstract = app.add_subcommand(
        "abstract", "Build an abstraction and write it to a JSON file");
    std::string net_path, centroid_path, out_path, neg_input = "auto";
    std::size_t skip_layers = 0;
    cmd_abstract->add_option("--network", net_path, "Network JSON file")->required();
    cmd_abstract->add_option("--centroid", centroid_path, "Centroid JSON array")->required();
    cmd_abstract->add_option("--neg-input", neg_input, "Pre-layer for negative inputs: on|off|auto");
    cmd_abstract->add_option("--skip-layers", skip_layers, "Leading ReLU layers kept exact");
    cmd_abstract->add_option("--out", out_path, "Output abstraction JSON")->required();

    // eval
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate an abstraction at a point");
    std::string abs_path, baseline_path, input_path;
    cmd_eval->add_option("--abstraction", abs_path, "Abstraction JSON file");
    cmd_eval->add_option("--baseline", baseline_path, "Merge-baseline JSON file");
    cmd_eval->add_option("--input", input_path, "Input JSON array")->required();

    // baseline
    auto* cmd_baseline = app.add_subcommand(
        "baseline", "Build the merge baseline matched to an abstraction's ReLU counts");
    std::string match_path;
    std::uint64_t bl_seed = 0;
    cmd_baseline->add_option("--network", net_path, "Network JSON file")->required();
    cmd_baseline->add_option("--match", match_path, "Abstraction JSON to copy group counts from")
        ->required();
    cmd_baseline->add_option("--seed", bl_seed, "Random pairing seed");
    cmd_baseline->add_option("--out", out_path, "Output baseline JSON")->required();

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "Margin and timing benchmark, CSV output");
    std::string deltas_str = "0.01,0.1,1,10", variants_str = "ginnacer,baseline,ibp";
    std::string skip_sweep = "0";
    int samples = 10000;
    std::uint64_t bench_seed = 0;
    bool no_timing = false;
    cmd_bench->add_option("--network", net_path, "Network JSON file")->required();
    cmd_bench->add_option("--centroid", centroid_path, "Centroid JSON array")->required();
    cmd_bench->add_option("--deltas", deltas_str, "Comma list of hypercube half-widths");
    cmd_bench->add_option("--samples", samples, "Surface samples per delta");
    cmd_bench->add_option("--seed", bench_seed, "Sampling seed");
    cmd_bench->add_option("--variants", variants_str, "Comma list: ginnacer,baseline,ibp");
    cmd_bench->add_option("--skip-sweep", skip_sweep, "Skip settings, e.g. 0..2 or 0,2");
    cmd_bench->add_option("--neg-input", neg_input, "Pre-layer flag: on|off|auto");
    cmd_bench->add_flag("--no-timing", no_timing,
                        "Zero the timing columns for reproducible output");
    cmd_bench->add_option("--out", out_path, "Output CSV")->required();

    // gen-poly
    auto* cmd_poly = app.add_subcommand("gen-poly", "Emit the polynomial regression samples");
    cmd_poly->add_option("--out", out_path, "Output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_abstract->parsed()) {
            const Network net = load_network(net_path);
            BuildOptions opts;
            opts.neg_input = parse_neg_input(neg_input);
            opts.skip_layers = skip_layers;
            const GinnacerAbstraction g = build_ginnacer(net, load_vector(centroid_path), opts);
            save_abstraction(g, out_path);
            const ReluStats stats = relu_stats(g);
            std::cout << "wrote " << out_path << ": " << stats.total_abstracted << "/"
                      << stats.total_original << " ReLUs kept";
            if (stats.pre_layer_relus > 0)
                std::cout << " (+" << stats.pre_layer_relus << " pre-layer)";
            std::cout << '\n';
        } else if (cmd_eval->parsed()) {
            if (abs_path.empty() == baseline_path.empty())
                throw std::runtime_error("eval: pass exactly one of --abstraction or --baseline");
            const Vector x = load_vector(input_path);
            if (!abs_path.empty())
                print_interval(eval_ginnacer(load_abstraction(abs_path), x));
            else
                print_interval(eval_merge_baseline(load_baseline(baseline_path), x));
        } else if (cmd_baseline->parsed()) {
            const Network net = load_network(net_path);
            const GinnacerAbstraction g = load_abstraction(match_path);
            std::vector<Index> targets;
            for (const ReluLayerCount& rc : g.relu_counts)
                targets.push_back(rc.abstracted);
            BaselineOptions opts;
            opts.apply_pre_layer = g.pre_layer.has_value();
            const MergeBaseline bl = build_merge_baseline(net, targets, bl_seed, opts);
            save_baseline(bl, out_path);
            Index groups = 0;
            for (const ReluLayerCount& rc : bl.relu_counts)
                groups += rc.abstracted;
            // each group carries an upper and a lower ReLU
            std::cout << "wrote " << out_path << ": " << groups << " groups, " << 2 * groups
                      << " ReLUs";
            if (bl.pre_layer)
                std::cout << " (+" << bl.pre_layer->output_dim() << " pre-layer)";
            std::cout << '\n';
        } else if (cmd_bench->parsed()) {
            BenchConfig cfg;
            cfg.centroid = load_vector(centroid_path);
            cfg.deltas.clear();
            std::stringstream ds(deltas_str);
            std::string tok;
            while (std::getline(ds, tok, ','))
                cfg.deltas.push_back(std::stod(tok));
            cfg.samples_per_delta = samples;
            cfg.seed = bench_seed;
            cfg.variants.clear();
            std::stringstream vs(variants_str);
            while (std::getline(vs, tok, ','))
                cfg.variants.push_back(tok);
            cfg.skip_values = parse_skip_range(skip_sweep);
            cfg.neg_input = parse_neg_input(neg_input);
            cfg.timing = !no_timing;
            const Network net = load_network(net_path);
            write_file(out_path, benchmark_csv(run_benchmark(net, cfg)));
            std::cout << "wrote " << out_path << '\n';
        } else if (cmd_poly->parsed()) {
            write_file(out_path, polynomial_csv());
            std::cout << "wrote " << out_path << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
