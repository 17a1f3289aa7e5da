#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "loghd/classifier.hpp"
#include "loghd/errors.hpp"
#include "loghd/loghd.hpp"
#include "naive_oracle.hpp"
#include "test_support.hpp"

using namespace loghd;

namespace {

Codebook manual_codebook(std::size_t classes, unsigned k, std::size_t n, std::vector<Symbol> symbols) {
    Codebook cb;
    cb.spec.class_count = classes;
    cb.spec.alphabet_size = k;
    cb.spec.code_length = n;
    cb.symbols = std::move(symbols);
    cb.final_loads = load_profile(cb);
    return cb;
}

PrototypeModel random_prototypes(Rng& rng, std::size_t classes, std::size_t dim) {
    PrototypeModel m;
    m.encoder = EncoderSpec{1, dim, 0, Nonlinearity::cosine};
    for (std::size_t c = 0; c < classes; ++c) m.prototypes.push_back(test::random_unit(rng, dim));
    return m;
}

std::vector<std::vector<int>> symbol_rows(const Codebook& cb) {
    std::vector<std::vector<int>> rows(cb.class_count());
    for (std::size_t c = 0; c < cb.class_count(); ++c)
        for (std::size_t j = 0; j < cb.code_length(); ++j) rows[c].push_back(cb.at(c, j));
    return rows;
}

}  // namespace

TEST_SUITE("loghd") {

TEST_CASE("build_bundles matches naive superposition") {
    Rng rng(17);
    for (int rep = 0; rep < 5; ++rep) {
        const auto protos = random_prototypes(rng, 3, 48);
        CodebookSpec s;
        s.class_count = 3;
        s.alphabet_size = 2;
        s.code_length = 2;
        s.seed = static_cast<std::uint64_t>(rep);
        const auto cb = build_codebook(s);
        const auto got = build_bundles(protos, cb);
        const auto want = test::naive::bundles(protos.prototypes, symbol_rows(cb), 2);
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(norm(got[j]) == doctest::Approx(1.0).epsilon(1e-12));
            for (std::size_t d = 0; d < 48; ++d) CHECK(std::fabs(got[j][d] - want[j][d]) <= 1e-12);
        }
    }
}

TEST_CASE("single class with code (1) bundles to its prototype") {
    Rng rng(2);
    const auto protos = random_prototypes(rng, 1, 32);
    const auto bundles = build_bundles(protos, manual_codebook(1, 2, 1, {1}));
    for (std::size_t d = 0; d < 32; ++d) CHECK(bundles[0][d] == doctest::Approx(protos.prototypes[0][d]).epsilon(1e-14));
}

TEST_CASE("all-zero column is a construction error naming the bundle") {
    Rng rng(3);
    const auto protos = random_prototypes(rng, 2, 16);
    try {
        build_bundles(protos, manual_codebook(2, 2, 2, {1, 0, 0, 0}));
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        CHECK(std::string(e.what()).find("bundle 1") != std::string::npos);
    }
}

TEST_CASE("activation examples") {
    Rng rng(5);
    const std::vector<Hypervector> bundles{test::random_unit(rng, 64), test::random_unit(rng, 64)};
    CHECK(activation(bundles, bundles[0])[0] == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<Hypervector> ortho{{1, 0, 0}, {0, 1, 0}};
    const auto a = activation(ortho, ortho[1]);
    CHECK(a[0] == 0.0);
    CHECK(a[1] == 1.0);

    const auto h = test::random_vector(rng, 64);
    const auto got = activation(bundles, h);
    const auto want = test::naive::activation(bundles, h);
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::fabs(got[j] - want[j]) <= 1e-12);
}

TEST_CASE("estimate_profiles is the class-conditional mean") {
    Rng rng(7);
    const std::vector<Hypervector> bundles{test::random_unit(rng, 32), test::random_unit(rng, 32),
                                           test::random_unit(rng, 32)};
    EncodedSet one;
    one.class_count = 2;
    one.samples = {test::random_vector(rng, 32), test::random_vector(rng, 32)};
    one.labels = {0, 1};
    const auto p1 = estimate_profiles(bundles, one);
    for (std::size_t c = 0; c < 2; ++c) CHECK(p1[c] == activation(bundles, one.samples[c]));

    EncodedSet dup = one;
    dup.samples.insert(dup.samples.end(), one.samples.begin(), one.samples.end());
    dup.labels.insert(dup.labels.end(), one.labels.begin(), one.labels.end());
    const auto p2 = estimate_profiles(bundles, dup);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < 3; ++j) CHECK(p2[c][j] == doctest::Approx(p1[c][j]).epsilon(1e-15));

    EncodedSet two;
    two.class_count = 2;
    for (int i = 0; i < 4; ++i) two.samples.push_back(test::random_vector(rng, 32));
    two.labels = {0, 1, 1, 0};
    const auto got = estimate_profiles(bundles, two);
    const auto want = test::naive::profiles(bundles, two.samples, two.labels, 2);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(got[c][j] - want[c][j]) <= 1e-12);

    EncodedSet missing = one;
    missing.class_count = 3;
    CHECK_THROWS_AS(estimate_profiles(bundles, missing), TrainingError);
}

TEST_CASE("nearest_profile: exact hit and tie-break") {
    const std::vector<std::vector<double>> profiles{{0.1, 0.2}, {0.5, -0.3}, {0.9, 0.9}};
    const std::vector<double> hit{0.5, -0.3};
    CHECK(nearest_profile(profiles, hit) == 1);
    const std::vector<std::vector<double>> twins{{0.3, 0.3}, {0.7, 0.1}, {0.7, 0.1}};
    const std::vector<double> q{0.69, 0.12};
    CHECK(nearest_profile(twins, q) == 1);
}

TEST_CASE("inference counts n similarities and C distances per query") {
    const auto p = test::encoded_blobs(6, 256, 4);
    const auto protos = train_prototypes(p.train, p.spec);
    LogHDConfig cfg;
    cfg.alphabet_size = 2;
    cfg.refinement.epochs = 0;
    const auto model = train_loghd(protos, p.train, cfg);
    InferenceCounters counters;
    for (std::size_t i = 0; i < 10; ++i) predict(model, p.test.samples[i], &counters);
    CHECK(counters.similarity_ops == 10 * model.bundle_count());
    CHECK(model.bundle_count() == 3);
    CHECK(counters.distance_ops == 10 * 6);

    InferenceCounters via_classifier;
    predict(make_classifier(model), p.test.samples[0], &via_classifier);
    CHECK(via_classifier.similarity_ops == 3);
    CHECK(via_classifier.distance_ops == 6);
}

TEST_CASE("separable blobs: LogHD stays within 3 points of conventional HDC") {
    const auto p = test::encoded_blobs(4, 2048, 12);
    const auto protos = train_prototypes(p.train, p.spec);
    LogHDConfig cfg;
    cfg.alphabet_size = 2;
    cfg.code_length = 2;
    cfg.codebook_seed = 1;
    cfg.refinement.seed = 2;
    const auto model = train_loghd(protos, p.train, cfg);
    const double conv = accuracy(make_classifier(protos), p.test);
    const double lhd = accuracy(make_classifier(model), p.test);
    CHECK(lhd >= conv - 0.03);
}

TEST_CASE("refine: T=0 and zero-correction cases") {
    const auto p = test::encoded_blobs(3, 128, 6);
    const auto protos = train_prototypes(p.train, p.spec);
    LogHDConfig cfg;
    cfg.refinement.epochs = 0;
    const auto model = train_loghd(protos, p.train, cfg);
    RefinementSpec none;
    none.epochs = 0;
    const auto same = refine(model, p.train, none);
    CHECK(same.bundles == model.bundles);
    CHECK(same.profiles == model.profiles);

    // k=2 symbol 1 targets +1; a bundle equal to the sample needs no correction.
    const Hypervector h{0.6, 0.8, 0.0};
    std::vector<Hypervector> bundles{h};
    refine_step(bundles, manual_codebook(2, 2, 1, {1, 0}), h, 0, 0.5);
    for (std::size_t d = 0; d < 3; ++d) CHECK(bundles[0][d] == doctest::Approx(h[d]).epsilon(1e-15));

    // k=3 symbol 1 targets 0; an orthogonal bundle stays put.
    std::vector<Hypervector> ortho{{0.0, 0.0, 1.0}};
    refine_step(ortho, manual_codebook(2, 3, 1, {1, 2}), h, 0, 0.5);
    CHECK(ortho[0] == Hypervector{0.0, 0.0, 1.0});
}

TEST_CASE("refine targets span [-1, 1]") {
    for (unsigned k : {2u, 3u, 4u}) {
        CHECK(symbol_target(0, k) == -1.0);
        CHECK(symbol_target(k - 1, k) == 1.0);
    }
}

TEST_CASE("property: one small step moves every activation toward its target") {
    Rng rng(23);
    int checked = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t classes = 2 + rng.below(4);
        const unsigned k = 2 + static_cast<unsigned>(rng.below(2));
        CodebookSpec s;
        s.class_count = classes;
        s.alphabet_size = k;
        s.code_length = min_code_length(classes, k) + rng.below(2);
        s.seed = rng.next_u64();
        const auto cb = build_codebook(s);
        const auto protos = random_prototypes(rng, classes, 64);
        const auto loads = load_profile(cb);
        if (*std::min_element(loads.begin(), loads.end()) == 0.0) continue;  // zero column, no bundle
        ++checked;
        auto bundles = build_bundles(protos, cb);
        const auto h = test::random_vector(rng, 64);
        const std::size_t y = rng.below(classes);
        const auto before = activation(bundles, h);
        refine_step(bundles, cb, h, y, 1e-4);
        const auto after = activation(bundles, h);
        for (std::size_t j = 0; j < bundles.size(); ++j) {
            const double tau = symbol_target(cb.at(y, j), k);
            CHECK(std::fabs(tau - after[j]) <= std::fabs(tau - before[j]) + 1e-9);
            CHECK(norm(bundles[j]) == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    CHECK(checked >= 30);
}

TEST_CASE("refine is deterministic, keeps bundles normalized, and honours the profile flag") {
    const auto p = test::encoded_blobs(5, 256, 9, 0.2);
    const auto protos = train_prototypes(p.train, p.spec);
    LogHDConfig cfg;
    cfg.refinement.epochs = 0;
    const auto base = train_loghd(protos, p.train, cfg);
    RefinementSpec r;
    r.epochs = 5;
    r.seed = 77;
    const auto a = refine(base, p.train, r);
    const auto b = refine(base, p.train, r);
    CHECK(a.bundles == b.bundles);
    CHECK(a.profiles == b.profiles);
    for (const auto& m : a.bundles) CHECK(norm(m) == doctest::Approx(1.0).epsilon(1e-6));
    for (const auto& prof : a.profiles)
        for (double v : prof) CHECK(std::fabs(v) <= 1.0);
    CHECK(a.profiles == estimate_profiles(a.bundles, p.train));

    r.refresh_profiles = false;
    const auto stale = refine(base, p.train, r);
    CHECK(stale.bundles == a.bundles);
    CHECK(stale.profiles == base.profiles);
}

TEST_CASE("model_memory accounting") {
    LogHDModel m;
    m.encoder.hyper_dim = 10000;
    m.codebook.spec.class_count = 26;
    m.codebook.spec.code_length = 3;
    m.bundles.resize(3);
    const auto f = model_memory(m, 8);
    CHECK(f.vector_coords == 30000);
    CHECK(f.profile_coords == 78);
    CHECK(f.baseline_coords == 260000);
    CHECK(1.0 / f.budget_fraction == doctest::Approx(26.0 / 3.0));
    CHECK(1.0 / f.budget_fraction == doctest::Approx(8.67).epsilon(1e-3));
    CHECK(f.total_bytes == 30078);

    CHECK(static_cast<double>(std::min(min_code_length(5, 2), min_code_length(5, 3))) / 5.0 == 0.4);

    PrototypeModel conv;
    conv.encoder.hyper_dim = 100;
    conv.prototypes.resize(5);
    CHECK(model_memory(conv).budget_fraction == 1.0);
}

TEST_CASE("one-hot codebook decodes like a per-class profile match") {
    const auto p = test::encoded_blobs(5, 1024, 31);
    const auto protos = train_prototypes(p.train, p.spec);
    std::vector<Symbol> identity(25, 0);
    for (std::size_t c = 0; c < 5; ++c) identity[c * 5 + c] = 1;
    LogHDModel m;
    m.encoder = p.spec;
    m.codebook = manual_codebook(5, 2, 5, identity);
    m.bundles = build_bundles(protos, m.codebook);
    for (std::size_t c = 0; c < 5; ++c)
        for (std::size_t d = 0; d < 1024; ++d) CHECK(m.bundles[c][d] == doctest::Approx(protos.prototypes[c][d]).epsilon(1e-12));
    m.profiles = estimate_profiles(m.bundles, p.train);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < p.test.size(); ++i) hits += predict(m, p.test.samples[i]) == p.test.labels[i];
    CHECK(static_cast<double>(hits) / static_cast<double>(p.test.size()) >= 0.95);
}

}  // TEST_SUITE
