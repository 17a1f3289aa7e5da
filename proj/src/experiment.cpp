#include "loghd/experiment.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "loghd/compression.hpp"
#include "loghd/errors.hpp"
#include "loghd/faults.hpp"
#include "loghd/prototype.hpp"
#include "loghd/rng.hpp"

namespace loghd {

using nlohmann::json;

void ExperimentPlan::validate() const {
    if (methods.empty()) throw ConfigError("plan lists no methods");
    if (hyper_dim < 1) throw ConfigError("plan hyper_dim must be >= 1");
    if (precisions.empty()) throw ConfigError("plan lists no precisions");
    for (unsigned b : precisions) QuantSpec{b}.validate();
    if (flip_probabilities.empty()) throw ConfigError("plan lists no flip probabilities");
    for (double p : flip_probabilities) FaultSpec{p, 0, 1}.validate();
    for (unsigned k : alphabet_sizes) {
        if (k < 2) throw ConfigError("alphabet sizes must be >= 2");
    }
    for (double s : sparsities) retained_count_for(s, hyper_dim);
    for (double x : budgets) {
        if (!(x > 0.0 && x <= 1.0)) throw ConfigError("budget fractions must lie in (0, 1]");
    }
    if (trials < 1) throw ConfigError("plan trials must be >= 1");
    if (!(alpha > 0.0)) throw ConfigError("plan alpha must be > 0");
    refinement.validate();
    if (!data.blobs && (data.files.train_path.empty() || data.files.test_path.empty())) {
        throw ConfigError("plan needs either a blob generator or train/test CSV paths");
    }
}

// ---------------------------------------------------------------------------
// JSON plan files

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentPlan plan_from_json(const std::string& text) {
    ExperimentPlan plan;
    try {
        const json j = json::parse(text);
        const json& d = j.at("dataset");
        read_opt(d, "name", plan.data.files.name);
        if (d.contains("blobs")) {
            const json& b = d.at("blobs");
            BlobSpec bs;
            read_opt(b, "classes", bs.classes);
            read_opt(b, "features", bs.features);
            read_opt(b, "train_per_class", bs.train_per_class);
            read_opt(b, "test_per_class", bs.test_per_class);
            read_opt(b, "spread", bs.spread);
            read_opt(b, "seed", bs.seed);
            plan.data.blobs = bs;
        } else {
            plan.data.files.train_path = d.at("train").get<std::string>();
            plan.data.files.test_path = d.at("test").get<std::string>();
            read_opt(d, "features", plan.data.files.feature_count);
            read_opt(d, "classes", plan.data.files.class_count);
        }
        if (j.contains("methods")) {
            plan.methods.clear();
            for (const auto& m : j.at("methods")) plan.methods.push_back(parse_method(m.get<std::string>()));
        }
        read_opt(j, "hyper_dim", plan.hyper_dim);
        if (j.contains("nonlinearity")) plan.nonlinearity = parse_nonlinearity(j.at("nonlinearity").get<std::string>());
        read_opt(j, "alphabet_sizes", plan.alphabet_sizes);
        read_opt(j, "redundancy", plan.redundancy);
        read_opt(j, "code_length", plan.code_length);
        read_opt(j, "sparsities", plan.sparsities);
        read_opt(j, "precisions", plan.precisions);
        read_opt(j, "flip_probabilities", plan.flip_probabilities);
        read_opt(j, "budgets", plan.budgets);
        read_opt(j, "trials", plan.trials);
        read_opt(j, "seed", plan.seed);
        read_opt(j, "alpha", plan.alpha);
        if (j.contains("refinement")) {
            const json& r = j.at("refinement");
            read_opt(r, "epochs", plan.refinement.epochs);
            read_opt(r, "learning_rate", plan.refinement.learning_rate);
            read_opt(r, "refresh_profiles", plan.refinement.refresh_profiles);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid plan: ") + e.what());
    }
    plan.validate();
    return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open plan " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentPlan plan = plan_from_json(ss.str());
    // Dataset paths in a plan file are relative to the plan's directory.
    auto& f = plan.data.files;
    const auto base = path.parent_path();
    if (!f.train_path.empty() && f.train_path.is_relative()) f.train_path = base / f.train_path;
    if (!f.test_path.empty() && f.test_path.is_relative()) f.test_path = base / f.test_path;
    return plan;
}

std::string plan_to_json(const ExperimentPlan& plan) {
    json d;
    d["name"] = plan.data.files.name;
    if (plan.data.blobs) {
        const auto& b = *plan.data.blobs;
        d["blobs"] = {{"classes", b.classes},         {"features", b.features},
                      {"train_per_class", b.train_per_class}, {"test_per_class", b.test_per_class},
                      {"spread", b.spread},           {"seed", b.seed}};
    } else {
        d["train"] = plan.data.files.train_path.string();
        d["test"] = plan.data.files.test_path.string();
    }
    json methods = json::array();
    for (Method m : plan.methods) methods.push_back(std::string(to_string(m)));
    json j;
    j["dataset"] = d;
    j["methods"] = methods;
    j["hyper_dim"] = plan.hyper_dim;
    j["nonlinearity"] = std::string(to_string(plan.nonlinearity));
    j["alphabet_sizes"] = plan.alphabet_sizes;
    j["redundancy"] = plan.redundancy;
    j["code_length"] = plan.code_length;
    j["sparsities"] = plan.sparsities;
    j["precisions"] = plan.precisions;
    j["flip_probabilities"] = plan.flip_probabilities;
    j["budgets"] = plan.budgets;
    j["trials"] = plan.trials;
    j["seed"] = plan.seed;
    j["alpha"] = plan.alpha;
    j["refinement"] = {{"epochs", plan.refinement.epochs},
                       {"learning_rate", plan.refinement.learning_rate},
                       {"refresh_profiles", plan.refinement.refresh_profiles}};
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Runner

namespace {

struct ModelConfig {
    Method method;
    unsigned k = 0;
    std::size_t n = 0;
    double sparsity = 0.0;
    std::optional<double> requested_budget;
    bool feasible = true;
};

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string config_key(const ModelConfig& c) {
    return std::string(to_string(c.method)) + "/k" + std::to_string(c.k) + "/n" + std::to_string(c.n) + "/S" +
           fmt6(c.sparsity);
}

std::vector<ModelConfig> resolve_configs(const ExperimentPlan& plan, std::size_t classes) {
    std::vector<ModelConfig> out;
    auto loghd_n = [&](unsigned k) {
        return plan.code_length != 0 ? plan.code_length : min_code_length(classes, k) + plan.redundancy;
    };
    if (plan.budgets.empty()) {
        for (Method m : plan.methods) {
            switch (m) {
                case Method::conventional: out.push_back({m, 0, classes, 0.0, std::nullopt, true}); break;
                case Method::loghd:
                    for (unsigned k : plan.alphabet_sizes) out.push_back({m, k, loghd_n(k), 0.0, std::nullopt, true});
                    break;
                case Method::sparsehd:
                    for (double s : plan.sparsities) out.push_back({m, 0, classes, s, std::nullopt, true});
                    break;
                case Method::hybrid:
                    for (unsigned k : plan.alphabet_sizes) {
                        for (double s : plan.sparsities) out.push_back({m, k, loghd_n(k), s, std::nullopt, true});
                    }
                    break;
            }
        }
        return out;
    }
    for (double x : plan.budgets) {
        for (Method m : plan.methods) {
            switch (m) {
                case Method::conventional: out.push_back({m, 0, classes, 0.0, x, x >= 1.0}); break;
                case Method::sparsehd: {
                    const auto b = matched_budget_configs(classes, plan.hyper_dim, 2, x);
                    out.push_back({m, 0, classes, b.sparsehd.sparsity, x, b.sparsehd.feasible});
                    break;
                }
                case Method::loghd:
                    for (unsigned k : plan.alphabet_sizes) {
                        const auto b = matched_budget_configs(classes, plan.hyper_dim, k, x);
                        out.push_back({m, k, b.loghd.code_length, 0.0, x, b.loghd.feasible});
                    }
                    break;
                case Method::hybrid:
                    for (unsigned k : plan.alphabet_sizes) {
                        const auto b = matched_budget_configs(classes, plan.hyper_dim, k, x);
                        for (const auto& h : b.hybrid) out.push_back({m, k, h.code_length, h.sparsity, x, h.feasible});
                    }
                    break;
            }
        }
    }
    return out;
}

SweepRow infeasible_row(const std::string& dataset, const ModelConfig& c, unsigned bits) {
    SweepRow r;
    r.dataset = dataset;
    r.method = c.method;
    r.k = c.k;
    r.n = c.n;
    r.sparsity = c.sparsity;
    r.bits = bits;
    r.requested_budget = c.requested_budget;
    r.feasible = false;
    r.accuracy = std::nan("");
    r.clean_accuracy = std::nan("");
    r.budget_fraction = std::nan("");
    return r;
}

}  // namespace

SweepResult run_plan(const ExperimentPlan& plan) {
    plan.validate();
    const LoadedDataset data = plan.data.blobs ? generate_blobs(*plan.data.blobs) : load_dataset(plan.data.files);
    return run_plan(plan, data);
}

SweepResult run_plan(const ExperimentPlan& plan, const LoadedDataset& data) {
    plan.validate();
    const std::string dataset = plan.data.name();
    const std::size_t classes = data.train.class_count;

    EncoderSpec enc;
    enc.input_dim = data.train.feature_count();
    enc.hyper_dim = plan.hyper_dim;
    enc.seed = derive_seed(plan.seed, "encoder");
    enc.nonlinearity = plan.nonlinearity;
    const Encoder encoder(enc);
    const EncodedSet train = encode_dataset(encoder, data.train);
    const EncodedSet test = encode_dataset(encoder, data.test);
    const PrototypeModel protos = train_prototypes(train, enc);

    std::map<std::pair<unsigned, std::size_t>, std::optional<LogHDModel>> loghd_cache;
    auto base_loghd = [&](unsigned k, std::size_t n) -> const std::optional<LogHDModel>& {
        auto it = loghd_cache.find({k, n});
        if (it != loghd_cache.end()) return it->second;
        LogHDConfig cfg;
        cfg.alphabet_size = k;
        cfg.code_length = n;
        cfg.alpha = plan.alpha;
        const std::string key = "k" + std::to_string(k) + "/n" + std::to_string(n);
        cfg.codebook_seed = derive_seed(plan.seed, "codebook/" + key);
        cfg.refinement = plan.refinement;
        cfg.refinement.seed = derive_seed(plan.seed, "refine/" + key);
        std::optional<LogHDModel> model;
        try {
            model = train_loghd(protos, train, cfg);
        } catch (const ConfigError&) {
        } catch (const TrainingError&) {
        }
        return loghd_cache.emplace(std::make_pair(k, n), std::move(model)).first->second;
    };

    SweepResult result;
    for (ModelConfig cfg : resolve_configs(plan, classes)) {
        std::optional<ClassifierModel> model;
        if (cfg.feasible) {
            try {
                switch (cfg.method) {
                    case Method::conventional: model = make_classifier(protos); break;
                    case Method::sparsehd: model = make_classifier(sparsify(protos, cfg.sparsity)); break;
                    case Method::loghd:
                        if (const auto& base = base_loghd(cfg.k, cfg.n)) model = make_classifier(*base);
                        break;
                    case Method::hybrid:
                        if (const auto& base = base_loghd(cfg.k, cfg.n)) {
                            model = make_classifier(hybridize(*base, cfg.sparsity, train));
                        }
                        break;
                }
            } catch (const ConfigError&) {
            } catch (const TrainingError&) {
            }
        }
        for (unsigned bits : plan.precisions) {
            if (!model) {
                result.rows.push_back(infeasible_row(dataset, cfg, bits));
                continue;
            }
            const QuantizedState state = quantize(*model, QuantSpec{bits});
            const BudgetLedger ledger = budget_ledger(state, classes, plan.hyper_dim);
            const double clean = accuracy(dequantized(*model, state), test);
            for (double p : plan.flip_probabilities) {
                FaultSpec fs;
                fs.flip_probability = p;
                fs.trials = plan.trials;
                fs.seed = derive_seed(plan.seed, "faults/" + config_key(cfg) + "/b" + std::to_string(bits) + "/p" + fmt6(p));
                const auto acc = evaluate_under_faults(*model, state, test, fs);
                for (std::size_t t = 0; t < acc.size(); ++t) {
                    SweepRow r;
                    r.dataset = dataset;
                    r.method = cfg.method;
                    r.k = cfg.k;
                    r.n = model->vectors.size();
                    r.sparsity = cfg.sparsity;
                    r.bits = bits;
                    r.p = p;
                    r.budget_fraction = ledger.fraction;
                    r.requested_budget = cfg.requested_budget;
                    r.trial = t;
                    r.accuracy = acc[t];
                    r.clean_accuracy = clean;
                    r.seed = fs.seed + t;
                    result.rows.push_back(std::move(r));
                }
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV results

namespace {

constexpr const char* kHeader =
    "dataset,method,k,n,sparsity,bits,p,budget_fraction,requested_budget,trial,accuracy,clean_accuracy,seed,status";

std::string opt6(double v) { return std::isnan(v) ? std::string() : fmt6(v); }

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_real(const std::string& s) { return s.empty() ? std::nan("") : std::stod(s); }

}  // namespace

std::string format_results(const SweepResult& result) {
    if (result.rows.empty()) throw ConfigError("refusing to emit an empty sweep result");
    std::string out = kHeader;
    out += '\n';
    for (const auto& r : result.rows) {
        out += r.dataset + ',' + std::string(to_string(r.method)) + ',' + std::to_string(r.k) + ',' +
               std::to_string(r.n) + ',' + fmt6(r.sparsity) + ',' + std::to_string(r.bits) + ',' + fmt6(r.p) + ',' +
               opt6(r.budget_fraction) + ',' + (r.requested_budget ? fmt6(*r.requested_budget) : std::string()) +
               ',' + std::to_string(r.trial) + ',' + opt6(r.accuracy) + ',' + opt6(r.clean_accuracy) + ',' +
               std::to_string(r.seed) + ',' + (r.feasible ? "ok" : "infeasible") + '\n';
    }
    return out;
}

void emit_results(const SweepResult& result, const std::filesystem::path& path) {
    const std::string text = format_results(result);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

SweepResult parse_results(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) throw FormatError("results CSV has an unexpected header");
    SweepResult result;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto c = split_csv(line);
        if (c.size() != 14) throw FormatError("results CSV line " + std::to_string(line_no) + " has wrong arity");
        SweepRow r;
        try {
            r.dataset = c[0];
            r.method = parse_method(c[1]);
            r.k = static_cast<unsigned>(std::stoul(c[2]));
            r.n = std::stoull(c[3]);
            r.sparsity = parse_real(c[4]);
            r.bits = static_cast<unsigned>(std::stoul(c[5]));
            r.p = parse_real(c[6]);
            r.budget_fraction = parse_real(c[7]);
            if (!c[8].empty()) r.requested_budget = parse_real(c[8]);
            r.trial = std::stoull(c[9]);
            r.accuracy = parse_real(c[10]);
            r.clean_accuracy = parse_real(c[11]);
            r.seed = std::stoull(c[12]);
            r.feasible = c[13] == "ok";
        } catch (const std::logic_error&) {
            throw FormatError("results CSV line " + std::to_string(line_no) + " is malformed");
        }
        result.rows.push_back(std::move(r));
    }
    return result;
}

std::vector<CellSummary> summarize(const SweepResult& result) {
    using Key = std::tuple<double, int, unsigned, std::size_t, double, unsigned, double>;
    std::map<Key, std::size_t> index;
    std::vector<CellSummary> cells;
    std::vector<std::vector<double>> values;
    for (const auto& r : result.rows) {
        if (!r.feasible) continue;
        const double budget = r.requested_budget.value_or(-1.0);
        const Key key{budget, static_cast<int>(r.method), r.k, r.n, r.sparsity, r.bits, r.p};
        auto [it, inserted] = index.try_emplace(key, cells.size());
        if (inserted) {
            cells.push_back({r.method, r.k, r.n, r.sparsity, r.bits, r.p, r.budget_fraction, r.requested_budget,
                             r.clean_accuracy, 0, 0, 0});
            values.emplace_back();
        }
        values[it->second].push_back(r.accuracy);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& v = values[i];
        double mean = 0.0;
        for (double a : v) mean += a;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double a : v) var += (a - mean) * (a - mean);
        cells[i].mean = mean;
        cells[i].stddev = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
        cells[i].trials = v.size();
    }
    return cells;
}

}  // namespace loghd
