#include "ginnacer/bench.hpp"

#include "serialize_util.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <stdexcept>

namespace ginnacer {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0)
        return 0.0;
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Seed stream per delta so every variant sees the same sample set.
std::uint64_t delta_seed(std::uint64_t base, std::size_t delta_index) {
    return base * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(delta_index) + 1;
}

bool has_variant(const BenchConfig& cfg, const std::string& name) {
    return std::find(cfg.variants.begin(), cfg.variants.end(), name) != cfg.variants.end();
}

Index total_neurons(const Network& net) {
    Index total = 0;
    for (const Layer& l : net.layers)
        if (l.relu)
            total += l.output_dim();
    return total;
}

struct MarginResult {
    double margin = 0.0;
    double eval_us_median = 0.0;
};

MarginResult measure_margin(const PointEvaluator& evaluate, const std::vector<Vector>& points,
                            bool timing) {
    MarginResult res;
    std::vector<double> times;
    if (timing)
        times.reserve(points.size());
    for (const Vector& x : points) {
        const auto t0 = Clock::now();
        const IntervalVector out = evaluate(x);
        const auto t1 = Clock::now();
        res.margin = std::max(res.margin, out.width().maxCoeff());
        if (timing)
            times.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    }
    res.eval_us_median = median(std::move(times));
    return res;
}

// Median build time over 13 repetitions.
template <typename BuildFn>
double measure_build_ms(const BuildFn& build, bool timing) {
    if (!timing)
        return 0.0;
    std::vector<double> times;
    times.reserve(13);
    for (int rep = 0; rep < 13; ++rep) {
        const auto t0 = Clock::now();
        build();
        const auto t1 = Clock::now();
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return median(std::move(times));
}

} // namespace

void BenchConfig::validate() const {
    if (centroid.size() == 0)
        throw std::invalid_argument("bench config: empty centroid");
    if (deltas.empty())
        throw std::invalid_argument("bench config: no deltas");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (deltas[i] <= 0.0)
            throw std::invalid_argument("bench config: deltas must be positive");
        if (i > 0 && deltas[i] <= deltas[i - 1])
            throw std::invalid_argument("bench config: deltas must be strictly increasing");
    }
    if (samples_per_delta < 1)
        throw std::invalid_argument("bench config: samples_per_delta must be >= 1");
    for (const std::string& v : variants)
        if (v != "ginnacer" && v != "baseline" && v != "ibp")
            throw std::invalid_argument("bench config: unknown variant \"" + v + "\"");
}

std::vector<Vector> sample_hypercube_surface(const Vector& center, double delta, int count,
                                             std::uint64_t seed) {
    if (delta <= 0.0)
        throw std::invalid_argument("sample_hypercube_surface: delta must be positive");
    if (count < 0)
        throw std::invalid_argument("sample_hypercube_surface: negative sample count");
    const Index n = center.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> offset(-delta, delta);
    std::uniform_int_distribution<Index> coord(0, n - 1);
    std::uniform_int_distribution<int> side(0, 1);

    std::vector<Vector> points;
    points.reserve(static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) {
        Vector x(n);
        for (Index i = 0; i < n; ++i)
            x(i) = center(i) + offset(rng);
        const Index k = coord(rng);
        x(k) = side(rng) ? center(k) + delta : center(k) - delta;
        points.push_back(std::move(x));
    }
    return points;
}

double max_margin(const PointEvaluator& evaluate, const std::vector<Vector>& points) {
    if (points.empty())
        throw std::invalid_argument("max_margin: no points");
    double margin = 0.0;
    for (const Vector& x : points)
        margin = std::max(margin, evaluate(x).width().maxCoeff());
    return margin;
}

std::vector<std::pair<double, double>> sample_polynomial() {
    std::vector<std::pair<double, double>> samples;
    samples.reserve(201);
    for (int i = 0; i <= 200; ++i) {
        const double x = static_cast<double>(i - 100) / 10.0;
        const double x2 = x * x;
        const double x3 = x2 * x;
        const double x4 = x2 * x2;
        const double x5 = x3 * x2;
        const double x6 = x3 * x3;
        const double num = -0.035 * x5 - 0.12 * x3 + x;
        const double den = 0.021 * x6 - 0.10 * x4 + 0.55 * x2 + 1.0;
        samples.emplace_back(x, num / den);
    }
    return samples;
}

std::string polynomial_csv() {
    std::string out = "x,y\n";
    for (const auto& [x, y] : sample_polynomial()) {
        out += detail::fmt_double(x);
        out += ',';
        out += detail::fmt_double(y);
        out += '\n';
    }
    return out;
}

std::vector<BenchRow> run_benchmark(const Network& net, const BenchConfig& cfg) {
    cfg.validate();
    net.validate();
    if (cfg.centroid.size() != net.input_dim())
        throw std::invalid_argument("run_benchmark: centroid does not match network input");

    // Shared sample sets, one per delta.
    std::vector<std::vector<Vector>> samples;
    samples.reserve(cfg.deltas.size());
    for (std::size_t di = 0; di < cfg.deltas.size(); ++di)
        samples.push_back(sample_hypercube_surface(cfg.centroid, cfg.deltas[di],
                                                   cfg.samples_per_delta,
                                                   delta_seed(cfg.seed, di)));

    std::vector<BenchRow> rows;
    const bool want_ginnacer = has_variant(cfg, "ginnacer");
    const bool want_baseline = has_variant(cfg, "baseline");

    for (std::size_t skip : cfg.skip_values) {
        if (!want_ginnacer && !want_baseline)
            break;
        BuildOptions build_opts;
        build_opts.neg_input = cfg.neg_input;
        build_opts.skip_layers = skip;
        const double g_build_ms = measure_build_ms(
            [&] { (void)build_ginnacer(net, cfg.centroid, build_opts); },
            cfg.timing && want_ginnacer);
        const GinnacerAbstraction abs = build_ginnacer(net, cfg.centroid, build_opts);

        Index g_groups = 0;
        for (const ReluLayerCount& rc : abs.relu_counts)
            g_groups += rc.abstracted;
        const Index pre_relus = abs.pre_layer ? abs.pre_layer->output_dim() : 0;

        if (want_ginnacer) {
            for (std::size_t di = 0; di < cfg.deltas.size(); ++di) {
                const MarginResult r = measure_margin(
                    [&](const Vector& x) { return eval_ginnacer(abs, x); }, samples[di],
                    cfg.timing);
                rows.push_back({"ginnacer", skip, cfg.deltas[di], r.margin, g_groups,
                                g_groups + pre_relus, g_build_ms, r.eval_us_median});
            }
        }
        if (want_baseline) {
            std::vector<Index> targets;
            targets.reserve(abs.relu_counts.size());
            for (const ReluLayerCount& rc : abs.relu_counts)
                targets.push_back(rc.abstracted);
            BaselineOptions bopts;
            bopts.apply_pre_layer = abs.pre_layer.has_value();
            const double b_build_ms = measure_build_ms(
                [&] { (void)build_merge_baseline(net, targets, cfg.seed, bopts); }, cfg.timing);
            const MergeBaseline bl = build_merge_baseline(net, targets, cfg.seed, bopts);
            Index b_groups = 0;
            for (const ReluLayerCount& rc : bl.relu_counts)
                b_groups += rc.abstracted;
            const Index b_pre = bl.pre_layer ? bl.pre_layer->output_dim() : 0;
            for (std::size_t di = 0; di < cfg.deltas.size(); ++di) {
                const MarginResult r = measure_margin(
                    [&](const Vector& x) { return eval_merge_baseline(bl, x); }, samples[di],
                    cfg.timing);
                rows.push_back({"baseline", skip, cfg.deltas[di], r.margin, b_groups,
                                2 * b_groups + b_pre, b_build_ms, r.eval_us_median});
            }
        }
    }

    if (has_variant(cfg, "ibp")) {
        const Index relus = total_neurons(net);
        for (std::size_t di = 0; di < cfg.deltas.size(); ++di) {
            const double d = cfg.deltas[di];
            const IntervalVector box{(cfg.centroid.array() - d).matrix(),
                                     (cfg.centroid.array() + d).matrix()};
            std::vector<double> times;
            IntervalVector out = interval_forward(net, box);
            if (cfg.timing) {
                for (int rep = 0; rep < 13; ++rep) {
                    const auto t0 = Clock::now();
                    out = interval_forward(net, box);
                    const auto t1 = Clock::now();
                    times.push_back(
                        std::chrono::duration<double, std::micro>(t1 - t0).count());
                }
            }
            rows.push_back({"ibp", 0, d, out.width().maxCoeff(), relus, relus, 0.0,
                            median(std::move(times))});
        }
    }
    return rows;
}

std::string benchmark_csv(const std::vector<BenchRow>& rows) {
    std::string out =
        "variant,skip_layers,delta,max_margin,groups_total,relus_total,build_ms,eval_us_median\n";
    for (const BenchRow& r : rows) {
        out += r.variant;
        out += ',';
        out += std::to_string(r.skip_layers);
        out += ',';
        out += detail::fmt_double(r.delta);
        out += ',';
        out += detail::fmt_double(r.max_margin);
        out += ',';
        out += std::to_string(r.groups_total);
        out += ',';
        out += std::to_string(r.relus_total);
        out += ',';
        out += detail::fmt_double(r.build_ms);
        out += ',';
        out += detail::fmt_double(r.eval_us_median);
        out += '\n';
    }
    return out;
}

} // namespace ginnacer
