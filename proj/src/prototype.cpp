#include "loghd/prototype.hpp"

#include <string>

#include "loghd/errors.hpp"

namespace loghd {

PrototypeModel train_prototypes(const EncodedSet& data, const EncoderSpec& spec) {
    data.require_every_class();
    PrototypeModel model;
    model.encoder = spec;
    model.prototypes.assign(data.class_count, Hypervector(spec.hyper_dim, 0.0));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& h = data.samples[i];
        if (h.size() != spec.hyper_dim) throw InputError("encoded sample has wrong dimension");
        auto& acc = model.prototypes[data.labels[i]];
        for (std::size_t d = 0; d < h.size(); ++d) acc[d] += h[d];
    }
    for (std::size_t c = 0; c < model.prototypes.size(); ++c) {
        if (norm(model.prototypes[c]) == 0.0) {
            throw TrainingError("prototype for class " + std::to_string(c) + " sums to zero");
        }
        normalize(model.prototypes[c]);
    }
    return model;
}

PrototypeModel train_prototypes(const LabeledDataset& data, const EncoderSpec& spec) {
    data.validate();
    const Encoder encoder(spec);
    return train_prototypes(encode_dataset(encoder, data), spec);
}

std::size_t classify_by_similarity(std::span<const Hypervector> prototypes, std::span<const double> encoded) {
    std::vector<double> scores(prototypes.size());
    for (std::size_t c = 0; c < prototypes.size(); ++c) scores[c] = cosine_or_zero(prototypes[c], encoded);
    return argmax(scores);
}

std::size_t predict_conventional(const PrototypeModel& model, const Encoder& encoder, std::span<const double> x) {
    return classify_by_similarity(model.prototypes, encoder.encode(x));
}

}  // namespace loghd
