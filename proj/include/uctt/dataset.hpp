#pragma once

// Supervised-learning dataset logged from GA evaluations: one example per
// evaluated individual (alleles, fitness, feasibility label). Storage is a
// plain CSV with a comment header; readers accept a gzip-compressed variant
// transparently.

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uctt {

struct Example {
    std::vector<int> features;  // gene values (room-period indices)
    long long fitness = 0;
    bool feasible = false;
    bool operator==(const Example&) const = default;
};

/// Append-only evaluation log for one instance.
class DatasetLog {
public:
    DatasetLog() = default;
    DatasetLog(std::string instance_name, int n_features)
        : instance_name_(std::move(instance_name)), n_features_(n_features) {}

    const std::string& instance_name() const { return instance_name_; }
    int n_features() const { return n_features_; }
    const std::vector<Example>& examples() const { return examples_; }
    size_t size() const { return examples_.size(); }
    bool empty() const { return examples_.empty(); }

    void record(std::vector<int> features, long long fitness, bool feasible) {
        if (static_cast<int>(features.size()) != n_features_)
            throw std::invalid_argument("example has " + std::to_string(features.size()) +
                                        " features, log expects " + std::to_string(n_features_));
        if (fitness < 0) throw std::invalid_argument("fitness must be non-negative");
        examples_.push_back({std::move(features), fitness, feasible});
    }

    /// Fractions (feasible, non-feasible); throws on an empty log.
    std::pair<double, double> class_balance() const {
        if (examples_.empty()) throw std::invalid_argument("class balance of an empty log");
        size_t f = 0;
        for (const Example& e : examples_)
            if (e.feasible) ++f;
        const double frac = static_cast<double>(f) / static_cast<double>(examples_.size());
        return {frac, 1.0 - frac};
    }

private:
    std::string instance_name_;
    int n_features_ = 0;
    std::vector<Example> examples_;
};

/// Views over a block of examples; batches and splits hand these around
/// without copying the log.
using ExampleSpan = std::span<const Example>;
using ExampleRefs = std::vector<const Example*>;

inline ExampleRefs as_refs(ExampleSpan examples) {
    ExampleRefs refs;
    refs.reserve(examples.size());
    for (const Example& e : examples) refs.push_back(&e);
    return refs;
}

/// Seeded random 70/30-style split: disjoint, exhaustive, train size within
/// one example of n * train_fraction.
inline std::pair<ExampleRefs, ExampleRefs> split_examples(ExampleSpan examples,
                                                          double train_fraction, uint64_t seed) {
    if (examples.empty()) throw std::invalid_argument("split of an empty example set");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train fraction must be inside (0, 1)");
    std::vector<size_t> order(examples.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const size_t train_size = static_cast<size_t>(
        std::llround(static_cast<double>(examples.size()) * train_fraction));
    std::pair<ExampleRefs, ExampleRefs> out;
    out.first.reserve(train_size);
    out.second.reserve(examples.size() - train_size);
    for (size_t i = 0; i < order.size(); ++i)
        (i < train_size ? out.first : out.second).push_back(&examples[order[i]]);
    return out;
}

/// Consecutive blocks in generation order; the last block may be short.
inline std::vector<ExampleSpan> batches(const DatasetLog& log, size_t batch_size = 10000) {
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    std::vector<ExampleSpan> blocks;
    const auto& all = log.examples();
    for (size_t start = 0; start < all.size(); start += batch_size)
        blocks.emplace_back(all.data() + start, std::min(batch_size, all.size() - start));
    return blocks;
}

inline void write_dataset_csv(std::ostream& out, const DatasetLog& log) {
    out << "# instance=" << log.instance_name() << " n_features=" << log.n_features() << '\n';
    for (const Example& e : log.examples()) {
        for (int v : e.features) out << v << ',';
        out << e.fitness << ',' << (e.feasible ? "F" : "NF") << '\n';
    }
}

inline void save_dataset(const std::string& path, const DatasetLog& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_dataset_csv(out, log);
    if (!out) throw std::runtime_error("failed writing dataset to '" + path + "'");
}

namespace detail {

// Whole-file read through zlib, which passes plain files through unchanged
// and inflates gzip ones.
inline std::string read_maybe_gzip(const std::string& path) {
    gzFile file = gzopen(path.c_str(), "rb");
    if (!file) throw std::runtime_error("cannot open '" + path + "'");
    std::string content;
    char buffer[1 << 16];
    int got = 0;
    while ((got = gzread(file, buffer, sizeof buffer)) > 0) content.append(buffer, got);
    const bool bad = got < 0;
    gzclose(file);
    if (bad) throw std::runtime_error("failed reading '" + path + "'");
    return content;
}

struct DatasetRowError : std::runtime_error {
    DatasetRowError(size_t line, const std::string& what)
        : std::runtime_error("row " + std::to_string(line) + ": " + what), line_(line) {}
    size_t line_;
};

}  // namespace detail

/// Parses dataset CSV text. Errors carry the 1-based file line number.
inline DatasetLog parse_dataset_csv(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    size_t line_no = 0;

    // Header: "# instance=<name> n_features=<k>", extra key=value tokens ignored.
    if (!std::getline(in, line)) throw detail::DatasetRowError(1, "empty dataset file");
    ++line_no;
    std::string name;
    int n_features = -1;
    {
        std::istringstream head(line);
        std::string tok;
        head >> tok;
        if (tok != "#") throw detail::DatasetRowError(line_no, "expected '# instance=... n_features=...' header");
        while (head >> tok) {
            const size_t eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq);
            const std::string value = tok.substr(eq + 1);
            if (key == "instance") name = value;
            if (key == "n_features") {
                try {
                    n_features = std::stoi(value);
                } catch (const std::exception&) {
                    throw detail::DatasetRowError(line_no, "bad n_features value '" + value + "'");
                }
            }
        }
        if (n_features < 0) throw detail::DatasetRowError(line_no, "header is missing n_features");
    }

    DatasetLog log(name, n_features);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        size_t start = 0;
        while (true) {
            const size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (static_cast<int>(fields.size()) != n_features + 2)
            throw detail::DatasetRowError(line_no, "expected " + std::to_string(n_features + 2) +
                                                       " fields, got " +
                                                       std::to_string(fields.size()));
        Example e;
        e.features.reserve(n_features);
        try {
            for (int i = 0; i < n_features; ++i) e.features.push_back(std::stoi(fields[i]));
            e.fitness = std::stoll(fields[n_features]);
        } catch (const std::exception&) {
            throw detail::DatasetRowError(line_no, "non-numeric field");
        }
        if (e.fitness < 0) throw detail::DatasetRowError(line_no, "negative fitness");
        const std::string& label = fields[n_features + 1];
        if (label == "F")
            e.feasible = true;
        else if (label == "NF")
            e.feasible = false;
        else
            throw detail::DatasetRowError(line_no, "label must be F or NF, got '" + label + "'");
        log.record(std::move(e.features), e.fitness, e.feasible);
    }
    return log;
}

/// Loads a dataset from a plain or gzip-compressed CSV file.
inline DatasetLog load_dataset(const std::string& path) {
    return parse_dataset_csv(detail::read_maybe_gzip(path));
}

}  // namespace uctt
