// ausn: post-training quantization of weight/activation tensors as adaptive
// superpositions of power-of-two terms, plus error analysis, shift-add
// simulation, and hardware cost estimates.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ausn/analysis.hpp"
#include "ausn/container.hpp"
#include "ausn/error_model.hpp"
#include "ausn/hw_cost.hpp"
#include "ausn/power_poly.hpp"
#include "ausn/quantizer.hpp"
#include "ausn/rng.hpp"
#include "ausn/tensor_io.hpp"
#include "ausn/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Layout flag format: "b" or "b:t1,t2,..." (basic bits, tier bits).
ausn::BitLayout parse_layout_spec(const std::string& spec, int total_bits) {
    int b_basic = 0;
    std::vector<int> tiers;
    try {
        const auto colon = spec.find(':');
        b_basic = std::stoi(spec.substr(0, colon));
        if (colon != std::string::npos) {
            std::stringstream rest(spec.substr(colon + 1));
            std::string part;
            while (std::getline(rest, part, ',')) {
                if (!part.empty()) tiers.push_back(std::stoi(part));
            }
        }
    } catch (const std::exception&) {
        throw CLI::ValidationError("--layout", "expected b[:t1,t2,...], got '" + spec + "'");
    }
    try {
        return ausn::make_layout(total_bits, b_basic, std::move(tiers),
                                 ausn::kMaxFieldCount - 1);
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("--layout", e.what());
    }
}

std::string layout_spec(const ausn::BitLayout& layout) {
    std::string spec = std::to_string(layout.b_basic);
    if (layout.tiers() > 0) {
        spec += ":";
        for (int i = 0; i < layout.tiers(); ++i) {
            if (i) spec += ",";
            spec += std::to_string(layout.tier_bits[static_cast<size_t>(i)]);
        }
    }
    return spec;
}

json layout_json(const ausn::BitLayout& layout) {
    return {{"total_bits", layout.total_bits},
            {"b_basic", layout.b_basic},
            {"tier_bits", layout.tier_bits},
            {"spec", layout_spec(layout)}};
}

json errors_json(const ausn::ErrorPair& e) {
    return {{"clipping", e.clipping},
            {"rounding", e.rounding},
            {"boundary", e.boundary},
            {"clip_bound", e.clip_bound}};
}

json sqnr_json(double db) {
    if (std::isinf(db)) {
        return {{"sqnr_db", nullptr}, {"exact_reconstruction", true}};
    }
    return {{"sqnr_db", db}, {"exact_reconstruction", false}};
}

// Prints the report and optionally writes it; bare filenames honor the
// AUSN_REPORT_DIR override.
void emit_report(const json& report, const std::string& report_path) {
    std::cout << report.dump(2) << "\n";
    if (report_path.empty()) return;
    fs::path out = report_path;
    if (const char* dir = std::getenv("AUSN_REPORT_DIR");
        dir != nullptr && !out.has_parent_path()) {
        out = fs::path(dir) / out;
    }
    std::ofstream file(out);
    if (!file) {
        throw std::runtime_error("cannot write report " + out.string());
    }
    file << report.dump(2) << "\n";
}

ausn::RoundingMode parse_mode(const std::string& mode) {
    return mode == "nearest" ? ausn::RoundingMode::nearest : ausn::RoundingMode::floor;
}

struct QuantizeArgs {
    std::string input, out, report, layout, mode = "floor";
    int bits = 0;
    int max_tiers = ausn::kDefaultMaxTiers;
    double lambda = 1.0;
    bool auto_layout = false;
};

int run_quantize(const QuantizeArgs& args) {
    const ausn::TensorFile tensor = ausn::load_tensor(args.input);
    const ausn::RoundingMode mode = parse_mode(args.mode);

    json report;
    report["command"] = "quantize";
    report["input"] = args.input;
    report["elements"] = tensor.size();
    report["shape"] = tensor.shape;
    report["mode"] = args.mode;

    ausn::QuantizedTensor qt;
    if (!args.layout.empty()) {
        const ausn::BitLayout layout = parse_layout_spec(args.layout, args.bits);
        qt = ausn::quantize_tensor(tensor.data, tensor.shape, layout, mode);
    } else {
        const ausn::SearchResult found =
            ausn::search_layout(tensor.data, args.bits, args.max_tiers, args.lambda, mode);
        qt = ausn::quantize_tensor(tensor.data, tensor.shape, found.layout, mode,
                                   found.power_j);
        report["scale_offset"] = found.scale_offset;
        report["candidates_evaluated"] = found.candidates_evaluated;
    }

    const ausn::ErrorPair errors = ausn::empirical_errors(tensor.data, qt);
    const std::vector<double> dequant = ausn::dequantize_tensor(qt);

    report["layout"] = layout_json(qt.layout);
    report["power_j"] = qt.power_j;
    report["errors"] = errors_json(errors);
    report.update(sqnr_json(ausn::sqnr_db(tensor.data, dequant)));
    report["kl"] = ausn::kl_information_loss(tensor.data, dequant).kl;
    report["output"] = args.out;

    ausn::save_container(args.out, qt);
    emit_report(report, args.report);
    return 0;
}

struct SearchArgs {
    std::string input, report, mode = "floor";
    int bits = 0;
    int max_tiers = ausn::kDefaultMaxTiers;
    double lambda = 1.0;
};

int run_search(const SearchArgs& args) {
    const ausn::TensorFile tensor = ausn::load_tensor(args.input);
    const ausn::SearchResult found = ausn::search_layout(
        tensor.data, args.bits, args.max_tiers, args.lambda, parse_mode(args.mode));

    json report;
    report["command"] = "search";
    report["input"] = args.input;
    report["total_bits"] = args.bits;
    report["lambda"] = args.lambda;
    report["mode"] = args.mode;
    report["layout"] = layout_json(found.layout);
    report["scale_offset"] = found.scale_offset;
    report["power_j"] = found.power_j;
    report["errors"] = errors_json(found.errors);
    report["objective"] = found.errors.clipping + args.lambda * found.errors.rounding;
    report["candidates_evaluated"] = found.candidates_evaluated;
    emit_report(report, args.report);
    return 0;
}

struct AnalyzeArgs {
    std::string input, quantized, baselines, report, csv_hist;
    std::optional<double> acc_loss;
};

int run_analyze(const AnalyzeArgs& args) {
    const ausn::TensorFile tensor = ausn::load_tensor(args.input);
    const ausn::QuantizedTensor qt = ausn::load_container(args.quantized);
    if (qt.size() != tensor.size()) {
        throw std::runtime_error("analyze: tensor and container element counts differ");
    }
    const std::vector<double> dequant = ausn::dequantize_tensor(qt);
    const ausn::ErrorPair errors = ausn::empirical_errors(tensor.data, qt);
    const ausn::InfoLossReport info = ausn::kl_information_loss(tensor.data, dequant);

    json report;
    report["command"] = "analyze";
    report["input"] = args.input;
    report["quantized"] = args.quantized;
    report["layout"] = layout_json(qt.layout);
    report["power_j"] = qt.power_j;
    report["errors"] = errors_json(errors);
    report.update(sqnr_json(ausn::sqnr_db(tensor.data, dequant)));
    report["kl"] = info.kl;
    if (args.acc_loss.has_value()) {
        report["accuracy_loss"] = *args.acc_loss;
        report["information_loss"] = ausn::total_information_loss(info.kl, args.acc_loss);
    }

    if (!args.baselines.empty()) {
        json baselines;
        std::stringstream names(args.baselines);
        std::string name;
        while (std::getline(names, name, ',')) {
            if (name == "uniform") {
                const auto uni = ausn::baseline_uniform(tensor.data, qt.layout.total_bits);
                const double bound =
                    uni.scale * static_cast<double>((1 << (qt.layout.total_bits - 1)) - 1);
                json entry;
                entry["errors"] =
                    errors_json(ausn::empirical_errors(tensor.data, uni.dequantized, bound));
                entry.update(sqnr_json(ausn::sqnr_db(tensor.data, uni.dequantized)));
                entry["kl"] = ausn::kl_information_loss(tensor.data, uni.dequantized).kl;
                baselines["uniform"] = entry;
            } else if (name == "pow2") {
                const auto p2 =
                    ausn::baseline_power_of_two(tensor.data, qt.layout.total_bits, qt.mode);
                const auto p2_dequant = ausn::dequantize_tensor(p2);
                json entry;
                entry["errors"] = errors_json(ausn::empirical_errors(tensor.data, p2));
                entry.update(sqnr_json(ausn::sqnr_db(tensor.data, p2_dequant)));
                entry["kl"] = ausn::kl_information_loss(tensor.data, p2_dequant).kl;
                baselines["pow2"] = entry;
            } else {
                throw std::runtime_error("analyze: unknown baseline '" + name + "'");
            }
        }
        report["baselines"] = baselines;
    }

    if (!args.csv_hist.empty()) {
        std::ofstream csv(args.csv_hist);
        if (!csv) {
            throw std::runtime_error("cannot write " + args.csv_hist);
        }
        csv << "level,original_mass,quantized_mass\n";
        for (const ausn::InfoBin& bin : info.bins) {
            csv << bin.level << "," << bin.original_mass << "," << bin.quantized_mass << "\n";
        }
        report["csv_histogram"] = args.csv_hist;
    }

    emit_report(report, args.report);
    return 0;
}

struct SimulateArgs {
    std::string weights, activations, out_layout, report, mode = "exact";
    int acc_bits = 0;
};

int run_simulate(const SimulateArgs& args) {
    const ausn::QuantizedTensor wq = ausn::load_container(args.weights);
    const ausn::QuantizedTensor aq = ausn::load_container(args.activations);
    const ausn::DotMode mode =
        args.mode == "rounded" ? ausn::DotMode::rounded : ausn::DotMode::exact;

    int out_bits = wq.layout.total_bits;
    if (!args.out_layout.empty()) {
        // Total width follows from the flag value: 1 sign bit + fields.
        const auto colon = args.out_layout.find(':');
        int width = 1;
        try {
            width += std::stoi(args.out_layout.substr(0, colon));
            if (colon != std::string::npos) {
                std::stringstream rest(args.out_layout.substr(colon + 1));
                std::string part;
                while (std::getline(rest, part, ',')) {
                    if (!part.empty()) width += std::stoi(part);
                }
            }
        } catch (const std::exception&) {
            throw CLI::ValidationError("--out-layout", "expected b[:t1,t2,...]");
        }
        out_bits = width;
    }
    const ausn::BitLayout out_layout = args.out_layout.empty()
                                           ? wq.layout
                                           : parse_layout_spec(args.out_layout, out_bits);

    // A [M, K] weight matrix against K activations runs M row products;
    // otherwise both operands flatten into a single dot product.
    std::vector<std::pair<std::size_t, std::size_t>> rows;  // offset, length
    if (wq.shape.size() == 2 && aq.size() == wq.shape[1]) {
        for (std::size_t m = 0; m < wq.shape[0]; ++m) {
            rows.emplace_back(m * wq.shape[1], wq.shape[1]);
        }
    } else if (wq.size() == aq.size()) {
        rows.emplace_back(0, wq.size());
    } else {
        throw std::runtime_error("simulate: operand shapes are incompatible");
    }

    json report;
    report["command"] = "simulate";
    report["weights"] = args.weights;
    report["activations"] = args.activations;
    report["mode"] = args.mode;
    report["out_layout"] = layout_json(out_layout);
    json products = json::array();
    for (const auto& [offset, length] : rows) {
        const std::span<const ausn::CodeWord> w_row(wq.codes.data() + offset, length);
        const ausn::DotProductResult r =
            ausn::dot_product(w_row, wq.layout, wq.power_j, aq.codes, aq.layout, aq.power_j,
                              out_layout, mode, args.acc_bits);
        json entry;
        entry["exact_value"] = r.exact.to_double();
        entry["quantized_value"] = r.quantized_value;
        entry["power_j"] = r.power_j;
        json code_fields = json::array();
        for (int i = 0; i < out_layout.field_count(); ++i) {
            code_fields.push_back(r.code.k[static_cast<size_t>(i)]);
        }
        entry["code"] = {{"negative", r.code.negative}, {"k", code_fields}};
        if (args.acc_bits > 0) {
            entry["accumulator_overflow"] = r.accumulator_overflow;
        }
        products.push_back(entry);
    }
    report["products"] = products;
    emit_report(report, args.report);
    return 0;
}

struct GenArgs {
    std::string out, dist = "normal", dtype = "float64";
    std::vector<std::size_t> shape;
    std::uint64_t seed = 1;
    double mean = 0.0, stddev = 1.0;
};

int run_gen(const GenArgs& args) {
    std::size_t count = 1;
    for (std::size_t d : args.shape) count *= d;
    if (args.shape.empty() || count == 0) {
        throw std::runtime_error("gen: shape must be non-empty and positive");
    }
    ausn::TensorFile tensor;
    tensor.name = fs::path(args.out).stem().string();
    tensor.dtype = args.dtype == "float32" ? ausn::ElementType::f32 : ausn::ElementType::f64;
    tensor.shape = args.shape;
    if (args.dist == "normal") {
        tensor.data = ausn::seeded_normal(args.seed, count, args.mean, args.stddev);
    } else {
        throw std::runtime_error("gen: unknown distribution '" + args.dist + "'");
    }
    if (tensor.dtype == ausn::ElementType::f32) {
        for (double& v : tensor.data) v = static_cast<float>(v);
    }
    ausn::save_tensor(tensor, args.out);
    json report;
    report["command"] = "gen";
    report["output"] = args.out;
    report["elements"] = count;
    report["seed"] = args.seed;
    emit_report(report, "");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AUSN power-of-two superposition quantization toolkit"};
    app.set_version_flag("--version", std::string("ausn ") + ausn::kVersion);
    app.require_subcommand(1);

    QuantizeArgs quantize_args;
    CLI::App* quantize = app.add_subcommand("quantize", "Quantize a tensor into a container");
    quantize->add_option("--input", quantize_args.input, "Tensor file (.npy or raw+sidecar)")
        ->required();
    quantize->add_option("--bits", quantize_args.bits, "Total code width")->required();
    auto* layout_opt =
        quantize->add_option("--layout", quantize_args.layout, "Fixed layout b[:t1,t2,...]");
    quantize->add_flag("--auto", quantize_args.auto_layout, "Search the layout (default)")
        ->excludes(layout_opt);
    quantize->add_option("--mode", quantize_args.mode, "floor|nearest")
        ->check(CLI::IsMember({"floor", "nearest"}));
    quantize->add_option("--max-tiers", quantize_args.max_tiers, "Search tier cap");
    quantize->add_option("--lambda", quantize_args.lambda, "Rounding-error weight");
    quantize->add_option("--out", quantize_args.out, "Output container")->required();
    quantize->add_option("--report", quantize_args.report, "Write the JSON report here");

    SearchArgs search_args;
    CLI::App* search = app.add_subcommand("search", "Report the best bit allocation");
    search->add_option("--input", search_args.input)->required();
    search->add_option("--bits", search_args.bits)->required();
    search->add_option("--max-tiers", search_args.max_tiers);
    search->add_option("--lambda", search_args.lambda);
    search->add_option("--mode", search_args.mode)
        ->check(CLI::IsMember({"floor", "nearest"}));
    search->add_option("--report", search_args.report);

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze", "Compare a container to its source");
    analyze->add_option("--input", analyze_args.input)->required();
    analyze->add_option("--quantized", analyze_args.quantized)->required();
    analyze->add_option("--baselines", analyze_args.baselines,
                        "Comma list from {uniform, pow2}");
    double acc_loss_flag = 0.0;
    auto* acc_opt = analyze->add_option("--acc-loss", acc_loss_flag,
                                        "Externally measured accuracy loss (%)");
    analyze->add_option("--report", analyze_args.report);
    analyze->add_option("--csv-hist", analyze_args.csv_hist, "Histogram CSV path");

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand("simulate", "Shift-add dot products");
    simulate->add_option("--weights", simulate_args.weights)->required();
    simulate->add_option("--activations", simulate_args.activations)->required();
    simulate->add_option("--mode", simulate_args.mode)
        ->check(CLI::IsMember({"exact", "rounded"}));
    simulate->add_option("--out-layout", simulate_args.out_layout, "b[:t1,t2,...]");
    simulate->add_option("--acc-bits", simulate_args.acc_bits, "Flag overflow past this width");
    simulate->add_option("--report", simulate_args.report);

    struct {
        std::string scheme;
        int a_bits = 0, w_bits = 0;
    } cost_args;
    CLI::App* cost = app.add_subcommand("cost", "LUT cost of one operation");
    cost->add_option("--scheme", cost_args.scheme, "shift|ausn")
        ->required()
        ->check(CLI::IsMember({"shift", "ausn"}));
    cost->add_option("--a-bits", cost_args.a_bits)->required();
    cost->add_option("--w-bits", cost_args.w_bits)->required();

    struct {
        double ops = 0, weight_elems = 0, output_elems = 0, bytes = 4.0;
        double bandwidth = 0, peak = 0;
    } roofline_args;
    CLI::App* roofline = app.add_subcommand("roofline", "Attainable performance");
    roofline->add_option("--ops", roofline_args.ops)->required();
    roofline->add_option("--weight-elems", roofline_args.weight_elems)->required();
    roofline->add_option("--output-elems", roofline_args.output_elems)->required();
    roofline->add_option("--bytes-per-elem", roofline_args.bytes);
    roofline->add_option("--bandwidth", roofline_args.bandwidth)->required();
    roofline->add_option("--peak", roofline_args.peak)->required();

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "Write a seeded synthetic tensor");
    gen->add_option("--out", gen_args.out)->required();
    gen->add_option("--shape", gen_args.shape, "Dimensions")->required();
    gen->add_option("--seed", gen_args.seed);
    gen->add_option("--dist", gen_args.dist)->check(CLI::IsMember({"normal"}));
    gen->add_option("--mean", gen_args.mean);
    gen->add_option("--std", gen_args.stddev);
    gen->add_option("--dtype", gen_args.dtype)
        ->check(CLI::IsMember({"float32", "float64"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*quantize) return run_quantize(quantize_args);
        if (*search) return run_search(search_args);
        if (*analyze) {
            if (acc_opt->count() > 0) analyze_args.acc_loss = acc_loss_flag;
            return run_analyze(analyze_args);
        }
        if (*simulate) return run_simulate(simulate_args);
        if (*cost) {
            const ausn::ArithScheme scheme = cost_args.scheme == "shift"
                                                 ? ausn::ArithScheme::shift_mult
                                                 : ausn::ArithScheme::ausn_add;
            std::cout << ausn::lut_cost(scheme, cost_args.a_bits, cost_args.w_bits) << "\n";
            return 0;
        }
        if (*roofline) {
            ausn::LayerDesc layer;
            layer.ops = roofline_args.ops;
            layer.weight_elems = roofline_args.weight_elems;
            layer.output_elems = roofline_args.output_elems;
            layer.bytes_per_elem = roofline_args.bytes;
            const double ratio = ausn::ccr(layer);
            const ausn::RooflineConfig cfg{roofline_args.bandwidth, roofline_args.peak};
            const double attainable = ausn::roofline_attainable(ratio, cfg);
            json report;
            report["command"] = "roofline";
            report["ccr"] = ratio;
            report["attainable"] = attainable;
            report["regime"] =
                attainable < cfg.peak ? "bandwidth_bound" : "compute_bound";
            emit_report(report, "");
            return 0;
        }
        if (*gen) return run_gen(gen_args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
