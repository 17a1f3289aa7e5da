#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <string>

#include "loghd/classifier.hpp"
#include "loghd/dataset_io.hpp"
#include "loghd/errors.hpp"
#include "loghd/experiment.hpp"
#include "loghd/faults.hpp"
#include "loghd/model_file.hpp"
#include "loghd/rng.hpp"

using namespace loghd;
namespace fs = std::filesystem;

namespace {

// Relative output paths resolve against LOGHD_OUTPUT_DIR when it is set.
fs::path output_path(const std::string& name) {
    const fs::path p(name);
    if (p.is_absolute()) return p;
    const char* dir = std::getenv("LOGHD_OUTPUT_DIR");
    if (!dir || !*dir) return p;
    fs::create_directories(dir);
    return fs::path(dir) / p;
}

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::configuration:
        case ErrorKind::training: return 2;
        case ErrorKind::ingestion: return 3;
        case ErrorKind::format: return 4;
        default: return 1;
    }
}

struct TrainArgs {
    std::string train_csv, test_csv, dataset_name, method = "loghd", out = "model.lhd";
    std::size_t dim = 4096, redundancy = 0, code_length = 0, epochs = 100;
    unsigned k = 2, bits = 8;
    double sparsity = 0.5, alpha = 1.0, learning_rate = 3e-4;
    std::uint64_t seed = 1;
    std::string nonlinearity = "cosine";
};

void print_ledger(const ClassifierModel& m, const QuantizedState& st) {
    const auto l = budget_ledger(st, m.class_count, m.hyper_dim());
    std::printf("ledger: baseline_coords=%zu model_coords=%zu profile_coords=%zu fraction=%.6g bits=%u "
                "payload_bits=%zu payload_bytes=%zu\n",
                l.baseline_coords, l.model_coords, l.profile_coords, l.fraction, l.bits, l.payload_bits,
                l.payload_bytes);
}

int run_train(const TrainArgs& a) {
    const auto data = load_dataset(DatasetSpec{a.dataset_name, a.train_csv, a.test_csv, 0, 0});
    EncoderSpec enc{data.train.feature_count(), a.dim, derive_seed(a.seed, "encoder"), parse_nonlinearity(a.nonlinearity)};
    const Encoder encoder(enc);
    const auto train = encode_dataset(encoder, data.train);
    const auto test = encode_dataset(encoder, data.test);
    const auto protos = train_prototypes(train, enc);

    const Method method = parse_method(a.method);
    auto loghd_model = [&] {
        LogHDConfig cfg;
        cfg.alphabet_size = a.k;
        cfg.code_length = a.code_length;
        cfg.redundancy = a.redundancy;
        cfg.alpha = a.alpha;
        cfg.codebook_seed = derive_seed(a.seed, "codebook");
        cfg.refinement.epochs = a.epochs;
        cfg.refinement.learning_rate = a.learning_rate;
        cfg.refinement.seed = derive_seed(a.seed, "refine");
        return train_loghd(protos, train, cfg);
    };
    ClassifierModel model;
    switch (method) {
        case Method::conventional: model = make_classifier(protos); break;
        case Method::sparsehd: model = make_classifier(sparsify(protos, a.sparsity)); break;
        case Method::loghd: model = make_classifier(loghd_model()); break;
        case Method::hybrid: model = make_classifier(hybridize(loghd_model(), a.sparsity, train)); break;
    }
    const auto file = make_model_file(model, QuantSpec{a.bits}, data.label_values, data.scaler);
    const auto path = output_path(a.out);
    save_model(path, file);
    std::printf("method=%s C=%zu D=%zu vectors=%zu bits=%u\n", std::string(to_string(method)).c_str(),
                model.class_count, model.hyper_dim(), model.vectors.size(), a.bits);
    std::printf("accuracy: float=%.6g quantized=%.6g\n", accuracy(model, test), accuracy(file.model(), test));
    print_ledger(model, file.state);
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
}

struct EvalArgs {
    std::string model, data;
    double p = 0.0;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
};

int run_eval(const EvalArgs& a) {
    const auto file = load_model(a.model);
    const auto split = load_split(a.data, file.scaler, file.label_values);
    const Encoder encoder(file.shape.encoder);
    const auto test = encode_dataset(encoder, split);
    const auto acc = evaluate_under_faults(file.model(), file.state, test, FaultSpec{a.p, a.seed, a.trials});
    for (std::size_t t = 0; t < acc.size(); ++t) std::printf("trial %zu accuracy %.6g\n", t, acc[t]);
    std::printf("mean %.6g over %zu trials at p=%.6g\n",
                std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size()), acc.size(), a.p);
    return 0;
}

int run_sweep(const std::string& plan_path, const std::string& out, bool summary) {
    const auto plan = load_plan(plan_path);
    const auto result = run_plan(plan);
    const auto path = output_path(out);
    emit_results(result, path);
    std::printf("wrote %zu rows to %s\n", result.rows.size(), path.string().c_str());
    if (summary) {
        std::printf("requested_budget,method,k,n,sparsity,bits,p,budget_fraction,clean_accuracy,mean,stddev,trials\n");
        for (const auto& c : summarize(result)) {
            char req[32] = "";
            if (c.requested_budget) std::snprintf(req, sizeof req, "%.6g", *c.requested_budget);
            std::printf("%s,%s,%u,%zu,%.6g,%u,%.6g,%.6g,%.6g,%.6g,%.6g,%zu\n", req,
                        std::string(to_string(c.method)).c_str(), c.k, c.n, c.sparsity, c.bits, c.p, c.budget_fraction,
                        c.clean_accuracy, c.mean, c.stddev, c.trials);
        }
    }
    return 0;
}

int run_inspect(const std::string& model_path, const std::string& codebook_out) {
    const auto file = load_model(model_path);
    const auto& m = file.shape;
    std::printf("method=%s C=%zu D=%zu vectors=%zu input_dim=%zu nonlinearity=%s encoder_seed=%llu\n",
                std::string(to_string(m.method)).c_str(), m.class_count, m.hyper_dim(), m.vectors.size(),
                m.encoder.input_dim, std::string(to_string(m.encoder.nonlinearity)).c_str(),
                static_cast<unsigned long long>(m.encoder.seed));
    std::printf("sparsity=%.6g retained=%zu checksum=%08x\n", m.mask.sparsity, m.mask.retained_count,
                payload_checksum(file.state.payload));
    print_ledger(m, file.state);
    if (!m.codebook) return 0;
    const auto& cb = *m.codebook;
    std::string csv = "class";
    for (std::size_t j = 0; j < cb.code_length(); ++j) csv += ",b" + std::to_string(j);
    csv += '\n';
    for (std::size_t c = 0; c < cb.class_count(); ++c) {
        csv += std::to_string(file.label_values.empty() ? static_cast<std::int64_t>(c) : file.label_values[c]);
        for (std::size_t j = 0; j < cb.code_length(); ++j) csv += ',' + std::to_string(cb.at(c, j));
        csv += '\n';
    }
    std::printf("codebook k=%u n=%zu max_load=%.6g\n", cb.alphabet_size(), cb.code_length(), max_load(load_profile(cb)));
    if (codebook_out.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        const auto path = output_path(codebook_out);
        std::FILE* f = std::fopen(path.string().c_str(), "wb");
        if (!f) throw std::runtime_error("cannot open " + path.string());
        std::fputs(csv.c_str(), f);
        std::fclose(f);
        std::printf("wrote %s\n", path.string().c_str());
    }
    return 0;
}

int run_gen_blobs(const BlobSpec& spec, const std::string& prefix) {
    const auto data = generate_blobs(spec);
    const auto train = output_path(prefix + "_train.csv");
    const auto test = output_path(prefix + "_test.csv");
    write_dataset_csv(train, data.train);
    write_dataset_csv(test, data.test);
    std::printf("wrote %s (%zu rows) and %s (%zu rows)\n", train.string().c_str(), data.train.size(),
                test.string().c_str(), data.test.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LogHD class-axis compressed hyperdimensional classifiers"};
    app.require_subcommand(1);

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "train, quantize and save a model");
    train->add_option("--train", ta.train_csv, "training CSV (features..., label)")->required();
    train->add_option("--test", ta.test_csv, "test CSV")->required();
    train->add_option("--name", ta.dataset_name, "dataset name (ISOLET, UCIHAR, PAMAP2, PAGE are shape-checked)");
    train->add_option("--method", ta.method, "conventional | loghd | sparsehd | hybrid")->capture_default_str();
    train->add_option("--dim", ta.dim, "hypervector dimensionality D")->capture_default_str();
    train->add_option("-k,--alphabet", ta.k, "code alphabet size")->capture_default_str();
    train->add_option("--redundancy", ta.redundancy, "extra bundles beyond ceil(log_k C)")->capture_default_str();
    train->add_option("-n,--code-length", ta.code_length, "explicit bundle count (0 = minimum + redundancy)");
    train->add_option("--sparsity", ta.sparsity, "fraction of dimensions dropped (sparsehd, hybrid)")->capture_default_str();
    train->add_option("--bits", ta.bits, "quantization precision: 1, 2, 4 or 8")->capture_default_str();
    train->add_option("--alpha", ta.alpha, "capacity exponent")->capture_default_str();
    train->add_option("--epochs", ta.epochs, "refinement epochs")->capture_default_str();
    train->add_option("--lr", ta.learning_rate, "refinement learning rate")->capture_default_str();
    train->add_option("--nonlinearity", ta.nonlinearity, "cosine | sign | none")->capture_default_str();
    train->add_option("--seed", ta.seed, "master seed")->capture_default_str();
    train->add_option("-o,--out", ta.out, "model file")->capture_default_str();

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "evaluate a saved model, optionally under bit flips");
    eval->add_option("--model", ea.model, "model file")->required();
    eval->add_option("--data", ea.data, "CSV to score")->required();
    eval->add_option("-p,--flip-probability", ea.p, "per-bit flip probability")->capture_default_str();
    eval->add_option("--trials", ea.trials, "fault trials")->capture_default_str();
    eval->add_option("--seed", ea.seed, "fault seed (trial t uses seed + t)")->capture_default_str();

    std::string plan_path, sweep_out = "results.csv";
    bool summary = false;
    auto* sweep = app.add_subcommand("sweep", "run an experiment plan and write results CSV");
    sweep->add_option("--plan", plan_path, "JSON plan file")->required();
    sweep->add_option("-o,--out", sweep_out, "results CSV")->capture_default_str();
    sweep->add_flag("--summary", summary, "also print per-cell mean/stddev");

    std::string inspect_model, codebook_out;
    auto* inspect = app.add_subcommand("inspect", "print model header, budget ledger and codebook");
    inspect->add_option("--model", inspect_model, "model file")->required();
    inspect->add_option("--codebook-csv", codebook_out, "write the codebook here instead of stdout");

    BlobSpec blobs;
    std::string prefix = "blobs";
    auto* gen = app.add_subcommand("gen-blobs", "write a synthetic Gaussian-blob train/test pair");
    gen->add_option("--classes", blobs.classes)->capture_default_str();
    gen->add_option("--features", blobs.features)->capture_default_str();
    gen->add_option("--train-per-class", blobs.train_per_class)->capture_default_str();
    gen->add_option("--test-per-class", blobs.test_per_class)->capture_default_str();
    gen->add_option("--spread", blobs.spread)->capture_default_str();
    gen->add_option("--seed", blobs.seed)->capture_default_str();
    gen->add_option("--prefix", prefix, "output prefix; writes <prefix>_train.csv and <prefix>_test.csv")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*train) return run_train(ta);
        if (*eval) return run_eval(ea);
        if (*sweep) return run_sweep(plan_path, sweep_out, summary);
        if (*inspect) return run_inspect(inspect_model, codebook_out);
        if (*gen) return run_gen_blobs(blobs, prefix);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
