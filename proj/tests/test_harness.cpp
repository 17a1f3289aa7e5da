#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "loghd/classifier.hpp"
#include "loghd/dataset_io.hpp"
#include "loghd/errors.hpp"
#include "loghd/experiment.hpp"
#include "loghd/faults.hpp"
#include "loghd/model_file.hpp"
#include "test_support.hpp"

using namespace loghd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "loghd_tests";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const auto path = scratch(name);
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

std::string ingestion_message(const DatasetSpec& spec) {
    try {
        load_dataset(spec);
    } catch (const IngestionError& e) {
        return e.what();
    }
    return {};
}

std::vector<ClassifierModel> all_models(const test::EncodedProblem& p) {
    const auto protos = train_prototypes(p.train, p.spec);
    LogHDConfig cfg;
    cfg.refinement.epochs = 3;
    const auto lhd = train_loghd(protos, p.train, cfg);
    return {make_classifier(protos), make_classifier(sparsify(protos, 0.6)), make_classifier(lhd),
            make_classifier(hybridize(lhd, 0.4, p.train))};
}

ExperimentPlan small_plan() {
    ExperimentPlan plan;
    BlobSpec b;
    b.classes = 5;
    b.features = 8;
    b.train_per_class = 12;
    b.test_per_class = 8;
    b.seed = 4;
    plan.data.blobs = b;
    plan.hyper_dim = 256;
    plan.alphabet_sizes = {2, 3};
    plan.sparsities = {0.5};
    plan.precisions = {1, 8};
    plan.flip_probabilities = {0.0, 0.1};
    plan.trials = 2;
    plan.seed = 9;
    plan.refinement.epochs = 2;
    return plan;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("CSV ingestion: scaling and label remapping") {
    const auto train = write_file("ok_train.csv", "0,10,7\n 2 , 20 ,3\n1,15,7\n");
    const auto test_csv = write_file("ok_test.csv", "1,30,3\n");
    const auto d = load_dataset(DatasetSpec{"tiny", train, test_csv, 0, 0});
    CHECK(d.label_values == std::vector<std::int64_t>{3, 7});
    CHECK(d.train.labels == std::vector<std::size_t>{1, 0, 1});
    CHECK(d.train.class_count == 2);
    CHECK(d.train.features[1] == std::vector<double>{1.0, 1.0});
    CHECK(d.test.features[0][0] == doctest::Approx(0.5));
    CHECK(d.test.features[0][1] == doctest::Approx(2.0));  // out-of-range test values are not clipped
    CHECK(d.test.labels == std::vector<std::size_t>{0});
}

TEST_CASE("CSV ingestion errors carry file and line") {
    const auto good = write_file("good.csv", "0,0,1\n1,1,2\n");
    const auto ragged = write_file("ragged.csv", "0,0,1\n1,2\n");
    CHECK(ingestion_message(DatasetSpec{"", ragged, good, 0, 0}).find("ragged.csv:2") != std::string::npos);

    const auto nan = write_file("nan.csv", "0,0,1\nnan,1,2\n");
    CHECK(ingestion_message(DatasetSpec{"", nan, good, 0, 0}).find("nan.csv:2") != std::string::npos);

    const auto unseen = write_file("unseen.csv", "0,0,1\n0,1,9\n");
    CHECK(ingestion_message(DatasetSpec{"", good, unseen, 0, 0}).find("unseen.csv:2") != std::string::npos);

    const auto frac = write_file("frac.csv", "0,0,1.5\n");
    CHECK(ingestion_message(DatasetSpec{"", frac, good, 0, 0}).find("frac.csv:1") != std::string::npos);

    CHECK_THROWS_AS(load_dataset(DatasetSpec{"", scratch("missing.csv"), good, 0, 0}), IngestionError);
    CHECK_THROWS_AS(load_dataset(DatasetSpec{"PAGE", good, good, 0, 0}), IngestionError);
}

TEST_CASE("known dataset table") {
    const auto known = known_datasets();
    auto find = [&](std::string_view n) {
        for (const auto& k : known)
            if (k.name == n) return k;
        FAIL("missing dataset");
        return known.front();
    };
    CHECK(find("ISOLET").features == 617);
    CHECK(find("ISOLET").classes == 26);
    CHECK(find("ISOLET").train_rows == 6238);
    CHECK(find("ISOLET").test_rows == 1559);
    CHECK(find("UCIHAR").features == 261);
    CHECK(find("UCIHAR").classes == 12);
    CHECK(find("PAMAP2").features == 75);
    CHECK(find("PAMAP2").classes == 5);
    CHECK(find("PAGE").features == 10);
    CHECK(find("PAGE").classes == 5);
}

TEST_CASE("blob generator is deterministic and round-trips through CSV") {
    BlobSpec b;
    b.seed = 77;
    const auto a = generate_blobs(b);
    const auto c = generate_blobs(b);
    CHECK(a.train.features == c.train.features);
    CHECK(a.test.labels == c.test.labels);
    b.seed = 78;
    CHECK(generate_blobs(b).train.features != a.train.features);

    const auto tr = scratch("blob_train.csv");
    const auto te = scratch("blob_test.csv");
    write_dataset_csv(tr, a.train);
    write_dataset_csv(te, a.test);
    const auto back = load_dataset(DatasetSpec{"blobs", tr, te, 0, 0});
    CHECK(back.train.labels == a.train.labels);
    CHECK(back.train.class_count == a.train.class_count);
}

TEST_CASE("save/load: prediction parity on 100 inputs for every method") {
    const auto p = test::encoded_blobs(5, 512, 41, 0.15, 16, 20, 20);
    for (const auto& m : all_models(p)) {
        for (unsigned bits : {1u, 4u, 8u}) {
            const auto file = make_model_file(m, QuantSpec{bits}, {10, 20, 30, 40, 50}, p.data.scaler);
            const auto path = scratch("model.lhd");
            save_model(path, file);
            const auto loaded = load_model(path);
            CHECK(loaded.label_values == file.label_values);
            CHECK(loaded.scaler.minimum == p.data.scaler.minimum);
            CHECK(loaded.state.payload == file.state.payload);
            const auto before = file.model();
            const auto after = loaded.model();
            CHECK(after.method == m.method);
            REQUIRE(p.test.size() == 100);
            for (std::size_t i = 0; i < 100; ++i) CHECK(predict(after, p.test.samples[i]) == predict(before, p.test.samples[i]));

            if (uses_profiles(m.method)) {
                // Reloading adds no error beyond quantization.
                const auto a = estimate_profiles(before.vectors, p.train);
                const auto b = estimate_profiles(after.vectors, p.train);
                for (std::size_t c = 0; c < a.size(); ++c)
                    for (std::size_t j = 0; j < a[c].size(); ++j) CHECK(std::fabs(a[c][j] - b[c][j]) <= 1e-9);
                CHECK(after.codebook->symbols == m.codebook->symbols);
            }
        }
    }
}

TEST_CASE("corrupted model files are format errors") {
    const auto p = test::encoded_blobs(4, 128, 3);
    const auto m = all_models(p)[3];
    const auto bytes = serialize_model(make_model_file(m, QuantSpec{4}));
    CHECK_NOTHROW(parse_model(bytes));
    for (std::size_t len = 0; len < bytes.size(); ++len) {
        CHECK_THROWS_AS(parse_model(std::span(bytes.data(), len)), FormatError);
    }
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(parse_model(bad_magic), FormatError);
    auto bad_version = bytes;
    bad_version[5] = '2';
    CHECK_THROWS_AS(parse_model(bad_version), FormatError);
    auto bad_crc = bytes;
    bad_crc[bytes.size() - 10] ^= 0x10;  // inside the payload
    CHECK_THROWS_AS(parse_model(bad_crc), FormatError);
    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(parse_model(trailing), FormatError);
    CHECK_THROWS_AS(load_model(scratch("does_not_exist.lhd")), FormatError);
}

TEST_CASE("payload size of a 1-bit 26-class LogHD model with n=5, D=10000") {
    Rng rng(6);
    ClassifierModel m;
    m.method = Method::loghd;
    m.encoder = EncoderSpec{617, 10000, 1, Nonlinearity::cosine};
    m.class_count = 26;
    for (int j = 0; j < 5; ++j) m.vectors.push_back(test::random_unit(rng, 10000));
    for (int c = 0; c < 26; ++c) {
        std::vector<double> prof(5);
        for (double& v : prof) v = 2 * rng.uniform() - 1;
        m.profiles.push_back(prof);
    }
    CodebookSpec cs;
    cs.class_count = 26;
    cs.code_length = 5;
    m.codebook = build_codebook(cs);
    m.mask = SparsityMask::dense(10000);
    const auto file = make_model_file(m, QuantSpec{1});
    CHECK(file.state.payload_bits == 5 * 10000 + 26 * 5);
    const auto reparsed = parse_model(serialize_model(file));
    CHECK(reparsed.state.payload_bits == 50130);
    CHECK(payload_checksum(reparsed.state.payload) == payload_checksum(file.state.payload));
}

TEST_CASE("results CSV: refusal, fixture, parse-back") {
    CHECK_THROWS_AS(format_results(SweepResult{}), ConfigError);

    SweepResult r;
    SweepRow a;
    a.dataset = "blobs";
    a.method = Method::loghd;
    a.k = 2;
    a.n = 5;
    a.bits = 8;
    a.p = 0.1;
    a.budget_fraction = 5.0 / 16.0;
    a.requested_budget = 0.31;
    a.trial = 0;
    a.accuracy = 0.9125;
    a.clean_accuracy = 1.0;
    a.seed = 12345;
    SweepRow b = a;
    b.method = Method::sparsehd;
    b.k = 0;
    b.n = 16;
    b.sparsity = 0.69;
    b.budget_fraction = 1270.0 / 4096.0;
    b.trial = 1;
    b.accuracy = 2.0 / 3.0;
    SweepRow c = a;
    c.method = Method::hybrid;
    c.feasible = false;
    c.requested_budget.reset();
    c.budget_fraction = std::nan("");
    c.accuracy = std::nan("");
    c.clean_accuracy = std::nan("");
    r.rows = {a, b, c};
    const std::string expected =
        "dataset,method,k,n,sparsity,bits,p,budget_fraction,requested_budget,trial,accuracy,clean_accuracy,seed,status\n"
        "blobs,loghd,2,5,0,8,0.1,0.3125,0.31,0,0.9125,1,12345,ok\n"
        "blobs,sparsehd,0,16,0.69,8,0.1,0.310059,0.31,1,0.666667,1,12345,ok\n"
        "blobs,hybrid,2,5,0,8,0.1,,,0,,,12345,infeasible\n";
    CHECK(format_results(r) == expected);

    const auto parsed = parse_results(expected);
    REQUIRE(parsed.rows.size() == 3);
    CHECK(parsed.rows[0] == a);
    CHECK(parsed.rows[1].accuracy == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK_FALSE(parsed.rows[2].feasible);
    CHECK(std::isnan(parsed.rows[2].accuracy));
    CHECK(format_results(parsed) == expected);
    CHECK_THROWS_AS(parse_results("bogus\n"), FormatError);
}

TEST_CASE("plan JSON round-trip and validation") {
    auto plan = small_plan();
    plan.budgets = {0.4, 0.8};
    plan.methods = {Method::loghd, Method::hybrid};
    const auto text = plan_to_json(plan);
    const auto back = plan_from_json(text);
    CHECK(plan_to_json(back) == text);
    CHECK(back.data.blobs->seed == 4);
    CHECK(back.budgets == plan.budgets);
    CHECK_THROWS_AS(plan_from_json("{ not json"), ConfigError);
    CHECK_THROWS_AS(plan_from_json(R"({"precisions": [3]})"), ConfigError);
    CHECK_THROWS_AS(plan_from_json(R"({"methods": ["mystery"]})"), ConfigError);
}

TEST_CASE("run_plan: determinism, shared encoder, budget honesty") {
    const auto plan = small_plan();
    const auto first = format_results(run_plan(plan));
    const auto second = format_results(run_plan(plan));
    CHECK(first == second);

    const auto result = run_plan(plan);
    // conventional + 2 loghd + sparsehd + 2 hybrid, 2 precisions, 2 p, 2 trials
    CHECK(result.rows.size() == 6 * 2 * 2 * 2);
    for (const auto& row : result.rows) {
        CHECK(row.feasible);
        CHECK(row.accuracy >= 0.0);
        CHECK(row.accuracy <= 1.0);
        if (row.p == 0.0) CHECK(row.accuracy == row.clean_accuracy);
        if (row.method == Method::sparsehd) CHECK(row.budget_fraction == doctest::Approx(128.0 / 256.0));
        if (row.method == Method::loghd) CHECK(row.budget_fraction == doctest::Approx(static_cast<double>(row.n) / 5.0));
    }

    auto other = plan;
    other.seed = 10;
    CHECK(format_results(run_plan(other)) != first);
}

TEST_CASE("run_plan: infeasible budgets become flagged rows") {
    auto plan = small_plan();
    plan.methods = {Method::conventional, Method::loghd};
    plan.alphabet_sizes = {3};
    plan.budgets = {0.2};
    plan.precisions = {8};
    plan.flip_probabilities = {0.0};
    plan.trials = 1;
    const auto result = run_plan(plan);
    REQUIRE(result.rows.size() == 2);
    for (const auto& row : result.rows) {
        CHECK_FALSE(row.feasible);
        CHECK(std::isnan(row.accuracy));
        CHECK(row.requested_budget == 0.2);
    }
}

}  // TEST_SUITE
