#pragma once

// Evaluation protocol for the learned models. Regression quality is the
// fraction of unordered test pairs ordered the same way by the true fitness
// and the prediction; classification quality is accuracy plus
// support-weighted precision and recall. Both are scored per 10,000-example
// batch with a seeded 70/30 split and aggregated as min/max/mean.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uctt/dataset.hpp"
#include "uctt/surrogate.hpp"

namespace uctt {

enum class LearningMode { Traditional, Incremental };

/// 1 if the first evaluation is less than or equal to the second, else 0.
inline int compare(double eval_i, double eval_j) { return eval_i <= eval_j ? 1 : 0; }

/// Agreement between true and predicted orderings over all n(n-1)/2
/// unordered index pairs. Invariant under strictly increasing transforms of
/// the predictions.
inline double comparison_accuracy(std::span<const double> truths,
                                  std::span<const double> predictions) {
    if (truths.size() != predictions.size())
        throw std::invalid_argument("truth/prediction length mismatch");
    const size_t n = truths.size();
    if (n < 2) throw std::invalid_argument("comparison accuracy needs at least 2 examples");
    long long agree = 0;
    for (size_t i = 0; i + 1 < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            agree += compare(truths[i], truths[j]) == compare(predictions[i], predictions[j]);
    return static_cast<double>(agree) / (static_cast<double>(n) * (n - 1) / 2.0);
}

inline double comparison_accuracy(const ExampleRefs& test_examples,
                                  const SurrogateModel& regressor) {
    std::vector<double> truths, predictions;
    truths.reserve(test_examples.size());
    predictions.reserve(test_examples.size());
    for (const Example* e : test_examples) {
        truths.push_back(static_cast<double>(e->fitness));
        predictions.push_back(regressor.predict_fitness(e->features));
    }
    return comparison_accuracy(truths, predictions);
}

struct ClassificationReport {
    double accuracy = 0.0;
    double precision = 0.0;  // support-weighted over the two classes
    double recall = 0.0;     // support-weighted; equals accuracy for single-label data
    bool operator==(const ClassificationReport&) const = default;
};

inline ClassificationReport classification_report(const std::vector<bool>& predictions,
                                                  const std::vector<bool>& labels) {
    if (predictions.size() != labels.size())
        throw std::invalid_argument("prediction/label length mismatch");
    if (labels.empty()) throw std::invalid_argument("classification report of an empty set");
    // Confusion counts with F as the positive class.
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] && predictions[i]) ++tp;
        else if (!labels[i] && predictions[i]) ++fp;
        else if (!labels[i] && !predictions[i]) ++tn;
        else ++fn;
    }
    const double total = static_cast<double>(labels.size());
    const double support_f = static_cast<double>(tp + fn);
    const double support_nf = static_cast<double>(tn + fp);
    const double precision_f = (tp + fp) > 0 ? tp / static_cast<double>(tp + fp) : 0.0;
    const double precision_nf = (tn + fn) > 0 ? tn / static_cast<double>(tn + fn) : 0.0;
    const double recall_f = support_f > 0 ? tp / support_f : 0.0;
    const double recall_nf = support_nf > 0 ? tn / support_nf : 0.0;

    ClassificationReport rep;
    rep.accuracy = (tp + tn) / total;
    rep.precision = (support_f * precision_f + support_nf * precision_nf) / total;
    rep.recall = (support_f * recall_f + support_nf * recall_nf) / total;
    return rep;
}

struct BatchRow {
    double score = 0.0;      // comparison accuracy (regression) or accuracy (classification)
    double precision = std::numeric_limits<double>::quiet_NaN();
    double recall = std::numeric_limits<double>::quiet_NaN();
    int n_train = 0;
    int n_test = 0;
};

struct BatchReport {
    std::string dataset;
    Task task = Task::Regression;
    LearningMode mode = LearningMode::Traditional;
    size_t batch_size = 10000;
    double split_fraction = 0.7;
    uint64_t seed = 0;
    bool single_block_warning = false;  // dataset smaller than one batch
    std::vector<BatchRow> rows;

    double min_score() const { return fold([](double a, double b) { return std::min(a, b); }); }
    double max_score() const { return fold([](double a, double b) { return std::max(a, b); }); }
    double mean_score() const {
        double sum = 0.0;
        for (const BatchRow& r : rows) sum += r.score;
        return rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
    }
    double mean_precision() const {
        double sum = 0.0;
        for (const BatchRow& r : rows) sum += r.precision;
        return rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
    }
    double mean_recall() const {
        double sum = 0.0;
        for (const BatchRow& r : rows) sum += r.recall;
        return rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
    }

private:
    template <typename F>
    double fold(F&& f) const {
        if (rows.empty()) return 0.0;
        double acc = rows.front().score;
        for (const BatchRow& r : rows) acc = f(acc, r.score);
        return acc;
    }
};

struct ProtocolResult {
    BatchReport report;
    SurrogateModel final_model;  // incremental: the persistent model; traditional: last batch's
};

/// Runs the per-batch training protocol over a dataset log. Every batch is
/// split 70/30 with a seed derived from (hyper.seed, batch index); the
/// traditional mode fits a fresh model per batch while the incremental mode
/// keeps partial-fitting one persistent model. Scores come from the batch's
/// own test split. The allele scale is pinned once from the whole log so the
/// persistent model sees consistent inputs.
inline ProtocolResult batch_protocol(const DatasetLog& log, LearningMode mode, Task task,
                                     const Hyperparameters& hyper, size_t batch_size = 10000,
                                     double split_fraction = 0.7) {
    if (log.empty()) throw std::invalid_argument("batch protocol over an empty dataset");
    hyper.validate();

    int max_feature = 1;
    for (const Example& e : log.examples())
        for (int v : e.features) max_feature = std::max(max_feature, v);

    ProtocolResult result;
    BatchReport& report = result.report;
    report.dataset = log.instance_name();
    report.task = task;
    report.mode = mode;
    report.batch_size = batch_size;
    report.split_fraction = split_fraction;
    report.seed = hyper.seed;
    report.single_block_warning = log.size() < batch_size;

    SurrogateModel persistent(task, log.n_features());
    persistent.set_feature_scale(0.0, static_cast<double>(max_feature));

    const std::vector<ExampleSpan> blocks = batches(log, batch_size);
    for (size_t b = 0; b < blocks.size(); ++b) {
        auto [train_refs, test_refs] =
            split_examples(blocks[b], split_fraction, detail::mix_seed(hyper.seed, b));
        const SurrogateModel* scorer = nullptr;
        if (mode == LearningMode::Traditional) {
            result.final_model = train(task, train_refs, hyper, static_cast<double>(max_feature));
            scorer = &result.final_model;
        } else {
            persistent.partial_fit(train_refs, hyper);
            scorer = &persistent;
        }

        BatchRow row;
        row.n_train = static_cast<int>(train_refs.size());
        row.n_test = static_cast<int>(test_refs.size());
        if (task == Task::Regression) {
            row.score = comparison_accuracy(test_refs, *scorer);
        } else {
            std::vector<bool> predictions, labels;
            predictions.reserve(test_refs.size());
            labels.reserve(test_refs.size());
            for (const Example* e : test_refs) {
                predictions.push_back(scorer->predict_feasible(e->features));
                labels.push_back(e->feasible);
            }
            const ClassificationReport rep = classification_report(predictions, labels);
            row.score = rep.accuracy;
            row.precision = rep.precision;
            row.recall = rep.recall;
        }
        report.rows.push_back(row);
    }
    if (mode == LearningMode::Incremental) result.final_model = std::move(persistent);
    return result;
}

inline const char* to_string(Task task) {
    return task == Task::Regression ? "regression" : "classification";
}
inline const char* to_string(LearningMode mode) {
    return mode == LearningMode::Traditional ? "traditional" : "incremental";
}

inline void write_report_csv(std::ostream& out, const BatchReport& report) {
    out << "# uctt-report v1 dataset=" << report.dataset << " task=" << to_string(report.task)
        << " mode=" << to_string(report.mode) << " batch_size=" << report.batch_size
        << " split=" << detail::format_double(report.split_fraction) << " seed=" << report.seed
        << " warning=" << (report.single_block_warning ? 1 : 0) << '\n';
    out << "batch,train_examples,test_examples,score,precision,recall\n";
    for (size_t i = 0; i < report.rows.size(); ++i) {
        const BatchRow& r = report.rows[i];
        out << (i + 1) << ',' << r.n_train << ',' << r.n_test << ','
            << detail::format_double(r.score) << ',';
        if (!std::isnan(r.precision)) out << detail::format_double(r.precision);
        out << ',';
        if (!std::isnan(r.recall)) out << detail::format_double(r.recall);
        out << '\n';
    }
}

inline void save_report(const std::string& path, const BatchReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_report_csv(out, report);
    if (!out) throw std::runtime_error("failed writing report to '" + path + "'");
}

inline BatchReport parse_report_csv(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty report file");
    BatchReport report;
    {
        std::istringstream head(line);
        std::string tok;
        head >> tok;
        if (tok != "#") throw std::runtime_error("missing report header");
        bool versioned = false;
        while (head >> tok) {
            if (tok == "uctt-report") continue;
            if (tok == "v1") {
                versioned = true;
                continue;
            }
            const size_t eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq);
            const std::string value = tok.substr(eq + 1);
            if (key == "dataset") report.dataset = value;
            else if (key == "task") {
                if (value == "regression") report.task = Task::Regression;
                else if (value == "classification") report.task = Task::Classification;
                else throw std::runtime_error("unknown task '" + value + "' in report header");
            } else if (key == "mode") {
                if (value == "traditional") report.mode = LearningMode::Traditional;
                else if (value == "incremental") report.mode = LearningMode::Incremental;
                else throw std::runtime_error("unknown mode '" + value + "' in report header");
            } else if (key == "batch_size") report.batch_size = std::stoull(value);
            else if (key == "split") report.split_fraction = std::stod(value);
            else if (key == "seed") report.seed = std::stoull(value);
            else if (key == "warning") report.single_block_warning = value != "0";
        }
        if (!versioned) throw std::runtime_error("unrecognized report header version");
    }
    if (!std::getline(in, line)) throw std::runtime_error("report has no column line");
    while (std::getline(in, line)) {
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
        if (fields.size() != 6) throw std::runtime_error("report row needs 6 fields");
        BatchRow row;
        try {
            row.n_train = std::stoi(fields[1]);
            row.n_test = std::stoi(fields[2]);
            row.score = std::stod(fields[3]);
            row.precision = fields[4].empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : std::stod(fields[4]);
            row.recall = fields[5].empty() ? std::numeric_limits<double>::quiet_NaN()
                                           : std::stod(fields[5]);
        } catch (const std::exception&) {
            throw std::runtime_error("non-numeric field in report row");
        }
        report.rows.push_back(row);
    }
    return report;
}

inline BatchReport load_report(const std::string& path) {
    return parse_report_csv(detail::read_maybe_gzip(path));
}

/// Merges batch reports into one aligned table, one row per dataset with the
/// incremental and traditional columns side by side: Min/Max/Mean of the
/// per-batch comparison accuracy for regression, mean A/P/R for
/// classification. All reports must share the task; a dataset+mode pair may
/// appear only once.
inline std::string render_report_table(const std::vector<BatchReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("no reports to merge");
    const Task task = reports.front().task;
    for (const BatchReport& r : reports)
        if (r.task != task)
            throw std::invalid_argument("schema mismatch: reports mix regression and classification");

    std::vector<std::string> datasets;
    std::vector<std::array<const BatchReport*, 2>> by_dataset;  // [incremental, traditional]
    for (const BatchReport& r : reports) {
        size_t row = datasets.size();
        for (size_t i = 0; i < datasets.size(); ++i)
            if (datasets[i] == r.dataset) row = i;
        if (row == datasets.size()) {
            datasets.push_back(r.dataset);
            by_dataset.push_back({nullptr, nullptr});
        }
        const int slot = r.mode == LearningMode::Incremental ? 0 : 1;
        if (by_dataset[row][slot])
            throw std::invalid_argument("schema mismatch: duplicate report for dataset '" +
                                        r.dataset + "', mode " + to_string(r.mode));
        by_dataset[row][slot] = &r;
    }

    bool have_mode[2] = {false, false};
    for (const auto& cells : by_dataset)
        for (int s = 0; s < 2; ++s)
            if (cells[s]) have_mode[s] = true;

    size_t name_width = 7;  // "Dataset"
    for (const std::string& d : datasets) name_width = std::max(name_width, d.size());

    std::ostringstream out;
    const char* group_name[2] = {"Incremental learning", "Traditional learning"};
    const std::array<const char*, 3> columns = task == Task::Regression
                                                   ? std::array<const char*, 3>{"Min", "Max", "Mean"}
                                                   : std::array<const char*, 3>{"A", "P", "R"};
    out << std::left << std::setw(static_cast<int>(name_width)) << "Dataset";
    for (int s = 0; s < 2; ++s)
        if (have_mode[s]) out << "  " << std::left << std::setw(22) << group_name[s];
    out << '\n';
    out << std::left << std::setw(static_cast<int>(name_width)) << "";
    for (int s = 0; s < 2; ++s)
        if (have_mode[s]) {
            out << "  ";
            for (const char* c : columns) out << std::right << std::setw(6) << c;
            out << std::setw(4) << "";
        }
    out << '\n';

    out << std::fixed << std::setprecision(2);
    for (size_t i = 0; i < datasets.size(); ++i) {
        out << std::left << std::setw(static_cast<int>(name_width)) << datasets[i];
        for (int s = 0; s < 2; ++s) {
            if (!have_mode[s]) continue;
            out << "  ";
            const BatchReport* r = by_dataset[i][s];
            if (!r) {
                for (int c = 0; c < 3; ++c) out << std::right << std::setw(6) << "-";
            } else if (task == Task::Regression) {
                out << std::right << std::setw(6) << r->min_score() << std::setw(6)
                    << r->max_score() << std::setw(6) << r->mean_score();
            } else {
                out << std::right << std::setw(6) << r->mean_score() << std::setw(6)
                    << r->mean_precision() << std::setw(6) << r->mean_recall();
            }
            out << std::setw(4) << "";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace uctt
