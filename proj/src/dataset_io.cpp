#include "loghd/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "loghd/errors.hpp"
#include "loghd/rng.hpp"

namespace loghd {

namespace {

constexpr std::array<KnownDataset, 4> kKnown{{
    {"ISOLET", 617, 26, 6238, 1559},
    {"UCIHAR", 261, 12, 6213, 1554},
    {"PAMAP2", 75, 5, 611142, 101582},
    {"PAGE", 10, 5, 4925, 548},
}};

struct RawRow {
    std::vector<double> features;
    std::int64_t label;
    std::size_t line;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& why) {
    throw IngestionError(path.string() + ":" + std::to_string(line) + ": " + why);
}

std::vector<RawRow> read_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open " + path.string());
    std::vector<RawRow> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            cells.push_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cells.size() < 2) fail(path, line_no, "row needs at least one feature and a label");
        if (width == 0) width = cells.size();
        if (cells.size() != width) {
            fail(path, line_no, "ragged row: " + std::to_string(cells.size()) + " cells, expected " +
                                    std::to_string(width));
        }
        RawRow row;
        row.line = line_no;
        row.features.reserve(cells.size() - 1);
        for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
            double v = 0.0;
            const auto cell = cells[i];
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                fail(path, line_no, "bad numeric value '" + std::string(cell) + "'");
            }
            if (!std::isfinite(v)) fail(path, line_no, "non-finite feature value");
            row.features.push_back(v);
        }
        const auto label = cells.back();
        const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), row.label);
        if (ec != std::errc() || ptr != label.data() + label.size()) {
            fail(path, line_no, "label '" + std::string(label) + "' is not an integer");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IngestionError(path.string() + ": no data rows");
    return rows;
}

LabeledDataset to_dataset(const std::filesystem::path& path, const std::vector<RawRow>& rows,
                          const std::vector<std::int64_t>& label_values) {
    std::map<std::int64_t, std::size_t> index;
    for (std::size_t i = 0; i < label_values.size(); ++i) index[label_values[i]] = i;
    LabeledDataset d;
    d.class_count = label_values.size();
    for (const auto& r : rows) {
        const auto it = index.find(r.label);
        if (it == index.end()) fail(path, r.line, "label " + std::to_string(r.label) + " not present in training split");
        d.features.push_back(r.features);
        d.labels.push_back(it->second);
    }
    return d;
}

}  // namespace

std::span<const KnownDataset> known_datasets() { return kKnown; }

LabeledDataset load_split(const std::filesystem::path& path, const MinMaxScaler& scaler,
                          const std::vector<std::int64_t>& label_values) {
    const auto rows = read_rows(path);
    if (rows.front().features.size() != scaler.minimum.size()) {
        throw IngestionError(path.string() + ": has " + std::to_string(rows.front().features.size()) +
                             " features, expected " + std::to_string(scaler.minimum.size()));
    }
    LabeledDataset d = to_dataset(path, rows, label_values);
    scaler.apply(d);
    return d;
}

LoadedDataset load_dataset(const DatasetSpec& spec) {
    const auto train_rows = read_rows(spec.train_path);
    std::vector<std::int64_t> labels;
    for (const auto& r : train_rows) labels.push_back(r.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    const std::size_t features = train_rows.front().features.size();
    if (spec.feature_count != 0 && spec.feature_count != features) {
        throw IngestionError(spec.train_path.string() + ": has " + std::to_string(features) + " features, expected " +
                             std::to_string(spec.feature_count));
    }
    if (spec.class_count != 0 && spec.class_count != labels.size()) {
        throw IngestionError(spec.train_path.string() + ": has " + std::to_string(labels.size()) +
                             " classes, expected " + std::to_string(spec.class_count));
    }
    for (const auto& k : kKnown) {
        if (spec.name == k.name && (features != k.features || labels.size() != k.classes)) {
            throw IngestionError("dataset " + spec.name + " should have " + std::to_string(k.features) +
                                 " features and " + std::to_string(k.classes) + " classes");
        }
    }

    LoadedDataset out;
    out.name = spec.name;
    out.label_values = labels;
    out.train = to_dataset(spec.train_path, train_rows, labels);
    out.scaler = MinMaxScaler::fit(out.train);
    out.scaler.apply(out.train);
    out.test = load_split(spec.test_path, out.scaler, labels);
    return out;
}

void write_dataset_csv(const std::filesystem::path& path, const LabeledDataset& data,
                       const std::vector<std::int64_t>& label_values) {
    std::ofstream out(path);
    if (!out) throw IngestionError("cannot write " + path.string());
    char buf[64];
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.features[i]) {
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out.write(buf, ptr - buf);
            out << ',';
        }
        const std::size_t y = data.labels[i];
        out << (label_values.empty() ? static_cast<std::int64_t>(y) : label_values.at(y)) << '\n';
    }
    if (!out) throw IngestionError("write failed for " + path.string());
}

LoadedDataset generate_blobs(const BlobSpec& spec) {
    if (spec.classes < 1 || spec.features < 1) throw ConfigError("blobs need >= 1 class and >= 1 feature");
    if (spec.train_per_class < 1 || spec.test_per_class < 1) throw ConfigError("blobs need samples in both splits");
    Rng rng(spec.seed);
    std::vector<std::vector<double>> centers(spec.classes, std::vector<double>(spec.features));
    for (auto& c : centers) {
        for (double& v : c) v = rng.uniform();
    }
    auto draw = [&](std::size_t per_class) {
        LabeledDataset d;
        d.class_count = spec.classes;
        for (std::size_t c = 0; c < spec.classes; ++c) {
            for (std::size_t i = 0; i < per_class; ++i) {
                std::vector<double> x(spec.features);
                for (std::size_t f = 0; f < spec.features; ++f) x[f] = centers[c][f] + spec.spread * rng.normal();
                d.features.push_back(std::move(x));
                d.labels.push_back(c);
            }
        }
        return d;
    };
    LoadedDataset out;
    out.name = "blobs";
    out.train = draw(spec.train_per_class);
    out.test = draw(spec.test_per_class);
    for (std::size_t c = 0; c < spec.classes; ++c) out.label_values.push_back(static_cast<std::int64_t>(c));
    out.scaler = MinMaxScaler::fit(out.train);
    out.scaler.apply(out.train);
    out.scaler.apply(out.test);
    return out;
}

}  // namespace loghd
