#include "loghd/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "loghd/errors.hpp"

namespace loghd {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::conventional: return "conventional";
        case Method::loghd: return "loghd";
        case Method::sparsehd: return "sparsehd";
        case Method::hybrid: return "hybrid";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "conventional") return Method::conventional;
    if (name == "loghd") return Method::loghd;
    if (name == "sparsehd") return Method::sparsehd;
    if (name == "hybrid") return Method::hybrid;
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

ClassifierModel make_classifier(const PrototypeModel& model, Method method) {
    ClassifierModel m;
    m.method = method;
    m.encoder = model.encoder;
    m.class_count = model.class_count();
    m.vectors = model.prototypes;
    m.mask = SparsityMask::dense(model.encoder.hyper_dim);
    return m;
}

ClassifierModel make_classifier(const SparsePrototypes& model) {
    ClassifierModel m = make_classifier(model.model, Method::sparsehd);
    m.mask = model.mask;
    return m;
}

ClassifierModel make_classifier(const LogHDModel& model) {
    ClassifierModel m;
    m.method = Method::loghd;
    m.encoder = model.encoder;
    m.class_count = model.class_count();
    m.vectors = model.bundles;
    m.profiles = model.profiles;
    m.codebook = model.codebook;
    m.mask = SparsityMask::dense(model.hyper_dim());
    return m;
}

ClassifierModel make_classifier(const SparseLogHD& model) {
    ClassifierModel m = make_classifier(model.model);
    m.method = Method::hybrid;
    m.mask = model.mask;
    return m;
}

namespace {

// Stored vectors scaled to unit norm once per model; zero vectors stay zero
// and therefore score 0 against any query.
struct UnitVectors {
    explicit UnitVectors(const std::vector<Hypervector>& vectors) : rows(vectors) {
        for (auto& v : rows) {
            const double n = norm(v);
            if (n == 0.0) continue;
            for (double& x : v) x /= n;
        }
    }

    std::vector<double> similarities(std::span<const double> query) const {
        const double qn = norm(query);
        std::vector<double> s(rows.size(), 0.0);
        if (qn == 0.0) return s;
        for (std::size_t i = 0; i < rows.size(); ++i) s[i] = std::clamp(dot(rows[i], query) / qn, -1.0, 1.0);
        return s;
    }

    std::vector<Hypervector> rows;
};

std::size_t predict_prepared(const ClassifierModel& model, const UnitVectors& unit, std::span<const double> encoded,
                             InferenceCounters* counters) {
    const auto s = unit.similarities(encoded);
    if (counters) counters->similarity_ops += s.size();
    if (uses_profiles(model.method)) return nearest_profile(model.profiles, s, counters);
    return argmax(s);
}

}  // namespace

std::size_t predict(const ClassifierModel& model, std::span<const double> encoded, InferenceCounters* counters) {
    return predict_prepared(model, UnitVectors(model.vectors), encoded, counters);
}

double accuracy(const ClassifierModel& model, const EncodedSet& data) {
    if (data.size() == 0) throw ConfigError("accuracy over an empty dataset");
    const UnitVectors unit(model.vectors);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (predict_prepared(model, unit, data.samples[i], nullptr) == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::vector<Tensor> model_tensors(const ClassifierModel& model) {
    std::vector<Tensor> out;
    Tensor v;
    v.rows = model.vectors.size();
    v.cols = model.hyper_dim();
    v.values.reserve(v.rows * v.cols);
    for (const auto& row : model.vectors) v.values.insert(v.values.end(), row.begin(), row.end());
    if (!model.mask.is_dense()) v.column_mask = model.mask.retained;
    out.push_back(std::move(v));

    if (uses_profiles(model.method)) {
        Tensor p;
        p.rows = model.profiles.size();
        p.cols = p.rows == 0 ? 0 : model.profiles.front().size();
        for (const auto& row : model.profiles) p.values.insert(p.values.end(), row.begin(), row.end());
        out.push_back(std::move(p));
    }
    return out;
}

ClassifierModel with_tensors(const ClassifierModel& shape, const std::vector<Tensor>& tensors) {
    const std::size_t expected = uses_profiles(shape.method) ? 2 : 1;
    if (tensors.size() != expected) throw FormatError("tensor count does not match the model method");
    ClassifierModel m = shape;
    const Tensor& v = tensors[0];
    if (v.cols != shape.hyper_dim()) throw FormatError("vector tensor width does not match D");
    m.vectors.assign(v.rows, Hypervector(v.cols));
    for (std::size_t r = 0; r < v.rows; ++r) {
        std::copy_n(v.values.begin() + static_cast<std::ptrdiff_t>(r * v.cols), v.cols, m.vectors[r].begin());
    }
    if (expected == 2) {
        const Tensor& p = tensors[1];
        m.profiles.assign(p.rows, std::vector<double>(p.cols));
        for (std::size_t r = 0; r < p.rows; ++r) {
            std::copy_n(p.values.begin() + static_cast<std::ptrdiff_t>(r * p.cols), p.cols, m.profiles[r].begin());
        }
    }
    return m;
}

QuantizedState quantize(const ClassifierModel& model, const QuantSpec& spec) {
    return quantize(model_tensors(model), spec);
}

ClassifierModel dequantized(const ClassifierModel& shape, const QuantizedState& state) {
    return with_tensors(shape, dequantize(state));
}

}  // namespace loghd
