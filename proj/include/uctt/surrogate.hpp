#pragma once

// Learned stand-ins for the timetable evaluator: a linear regressor for the
// fitness value (epsilon-insensitive loss) and a linear classifier for
// feasibility (hinge loss), both trained by stochastic gradient descent with
// an inverse-scaling learning rate. One code path serves batch ("train") and
// incremental ("partial_fit") use; incremental fitting continues from the
// current weights and never revisits earlier batches.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uctt/dataset.hpp"

namespace uctt {

enum class Task { Regression, Classification };

struct Hyperparameters {
    double eta0 = 0.05;      // initial learning rate, decayed as eta0 / t^0.25
    double alpha = 1e-4;     // L2 regularization strength
    int epochs = 20;         // shuffled passes per fit call
    double epsilon = 0.005;  // regression insensitivity, in normalized target units
    uint64_t seed = 0;

    void validate() const {
        if (eta0 <= 0) throw std::invalid_argument("eta0 must be positive");
        if (alpha < 0) throw std::invalid_argument("alpha must be non-negative");
        if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
        if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
    }
};

namespace detail {

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Linear surrogate model: prediction = w . scale(x) + b, where scale maps
/// each allele to (x - offset) / divisor. Regression targets are normalized
/// internally (mean/sd of the first fitted batch) and predictions are mapped
/// back, a monotone transform that leaves pairwise comparisons intact.
class SurrogateModel {
public:
    SurrogateModel() = default;

    SurrogateModel(Task task, int n_features) : task_(task), n_features_(n_features) {
        if (n_features < 1) throw std::invalid_argument("model needs at least one feature");
        weights_.assign(n_features, 0.0);
        feature_offset_.assign(n_features, 0.0);
        feature_divisor_.assign(n_features, 0.0);  // 0 = unset, derived on first fit
    }

    Task task() const { return task_; }
    int n_features() const { return n_features_; }
    bool fitted() const { return fitted_; }
    bool single_class_warning() const { return single_class_warning_; }
    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    long long updates() const { return updates_; }
    int batches_seen() const { return batches_seen_; }

    /// Uniform feature scaling, e.g. offset 0 and divisor num_room_period_pairs - 1.
    /// Must be set before the first fit; divisors must be positive.
    void set_feature_scale(double offset, double divisor) {
        if (fitted_) throw std::logic_error("feature scale is frozen once the model is fitted");
        if (divisor <= 0) throw std::invalid_argument("scale divisor must be positive");
        feature_offset_.assign(n_features_, offset);
        feature_divisor_.assign(n_features_, divisor);
    }

    bool has_feature_scale() const {
        return !feature_divisor_.empty() && feature_divisor_[0] > 0;
    }

    std::vector<double> scale_features(std::span<const int> features) const {
        if (static_cast<int>(features.size()) != n_features_)
            throw std::invalid_argument("feature vector has wrong length");
        if (!has_feature_scale()) throw std::logic_error("feature scale is not initialized");
        std::vector<double> scaled(n_features_);
        for (int j = 0; j < n_features_; ++j)
            scaled[j] = (features[j] - feature_offset_[j]) / feature_divisor_[j];
        return scaled;
    }

    /// One incremental fit over this batch only: SGD continues from the
    /// current weights; the learning-rate clock and shuffling seed advance
    /// with every batch, so repeated runs are bit-identical. An empty batch
    /// leaves the model untouched.
    void partial_fit(const ExampleRefs& batch, const Hyperparameters& hyper) {
        hyper.validate();
        if (batch.empty()) return;
        for (const Example* e : batch)
            if (static_cast<int>(e->features.size()) != n_features_)
                throw std::invalid_argument("batch feature length does not match the model");
        hyper_ = hyper;

        if (!fitted_) {
            if (!has_feature_scale()) derive_feature_scale(batch);
            if (task_ == Task::Regression) derive_target_scale(batch);
            if (task_ == Task::Classification) {
                bool any_f = false, any_nf = false;
                for (const Example* e : batch) (e->feasible ? any_f : any_nf) = true;
                if (!any_f || !any_nf) {
                    // Degenerate single-class input: constant classifier.
                    std::fill(weights_.begin(), weights_.end(), 0.0);
                    bias_ = any_f ? 1.0 : -1.0;
                    single_class_warning_ = true;
                    fitted_ = true;
                    ++batches_seen_;
                    return;
                }
            }
            fitted_ = true;
        }

        std::mt19937_64 rng(detail::mix_seed(hyper_.seed, static_cast<uint64_t>(batches_seen_)));
        std::vector<size_t> order(batch.size());
        std::iota(order.begin(), order.end(), size_t{0});
        std::vector<double> x(n_features_);

        for (int epoch = 0; epoch < hyper_.epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            for (size_t idx : order) {
                const Example& ex = *batch[idx];
                for (int j = 0; j < n_features_; ++j)
                    x[j] = (ex.features[j] - feature_offset_[j]) / feature_divisor_[j];
                ++updates_;
                const double eta = hyper_.eta0 / std::pow(static_cast<double>(updates_), 0.25);
                const double decay = 1.0 - eta * hyper_.alpha;
                double p = bias_;
                for (int j = 0; j < n_features_; ++j) p += weights_[j] * x[j];
                if (task_ == Task::Regression) {
                    const double y = (static_cast<double>(ex.fitness) - target_offset_) / target_divisor_;
                    const double err = p - y;
                    for (int j = 0; j < n_features_; ++j) weights_[j] *= decay;
                    if (err > hyper_.epsilon) {
                        for (int j = 0; j < n_features_; ++j) weights_[j] -= eta * x[j];
                        bias_ -= eta;
                    } else if (err < -hyper_.epsilon) {
                        for (int j = 0; j < n_features_; ++j) weights_[j] += eta * x[j];
                        bias_ += eta;
                    }
                } else {
                    const double y = ex.feasible ? 1.0 : -1.0;
                    for (int j = 0; j < n_features_; ++j) weights_[j] *= decay;
                    if (y * p < 1.0) {
                        for (int j = 0; j < n_features_; ++j) weights_[j] += eta * y * x[j];
                        bias_ += eta * y;
                    }
                }
            }
        }
        ++batches_seen_;
    }

    double predict_fitness(std::span<const int> features) const {
        require_fitted(Task::Regression);
        return raw_score(features) * target_divisor_ + target_offset_;
    }

    /// Feasible iff the decision value is non-negative (F encoded as +1).
    bool predict_feasible(std::span<const int> features) const {
        require_fitted(Task::Classification);
        return raw_score(features) >= 0.0;
    }

    void save(std::ostream& out) const {
        out << "uctt-model v1\n";
        out << "task " << (task_ == Task::Regression ? "regression" : "classification") << '\n';
        out << "n_features " << n_features_ << '\n';
        out << "fitted " << (fitted_ ? 1 : 0) << '\n';
        out << "warning " << (single_class_warning_ ? 1 : 0) << '\n';
        out << "seed " << hyper_.seed << '\n';
        out << "eta0 " << detail::format_double(hyper_.eta0) << '\n';
        out << "alpha " << detail::format_double(hyper_.alpha) << '\n';
        out << "epochs " << hyper_.epochs << '\n';
        out << "epsilon " << detail::format_double(hyper_.epsilon) << '\n';
        out << "updates " << updates_ << '\n';
        out << "batches_seen " << batches_seen_ << '\n';
        out << "target_offset " << detail::format_double(target_offset_) << '\n';
        out << "target_divisor " << detail::format_double(target_divisor_) << '\n';
        out << "feature_offsets";
        for (double v : feature_offset_) out << ' ' << detail::format_double(v);
        out << "\nfeature_divisors";
        for (double v : feature_divisor_) out << ' ' << detail::format_double(v);
        out << "\nweights";
        for (double v : weights_) out << ' ' << detail::format_double(v);
        out << "\nbias " << detail::format_double(bias_) << '\n';
    }

    static SurrogateModel load(std::istream& in) {
        SurrogateModel m;
        std::string line;
        auto bad = [](const std::string& what) -> std::runtime_error {
            return std::runtime_error("malformed model file: " + what);
        };
        if (!std::getline(in, line) || line != "uctt-model v1") throw bad("bad magic line");
        auto next = [&](const std::string& key) -> std::istringstream {
            if (!std::getline(in, line)) throw bad("missing field " + key);
            std::istringstream s(line);
            std::string k;
            s >> k;
            if (k != key) throw bad("expected field " + key + ", got " + k);
            return s;
        };
        std::string task_name;
        next("task") >> task_name;
        if (task_name == "regression")
            m.task_ = Task::Regression;
        else if (task_name == "classification")
            m.task_ = Task::Classification;
        else
            throw bad("unknown task " + task_name);
        next("n_features") >> m.n_features_;
        if (m.n_features_ < 1) throw bad("n_features must be positive");
        int flag = 0;
        next("fitted") >> flag;
        m.fitted_ = flag != 0;
        next("warning") >> flag;
        m.single_class_warning_ = flag != 0;
        next("seed") >> m.hyper_.seed;
        next("eta0") >> m.hyper_.eta0;
        next("alpha") >> m.hyper_.alpha;
        next("epochs") >> m.hyper_.epochs;
        next("epsilon") >> m.hyper_.epsilon;
        next("updates") >> m.updates_;
        next("batches_seen") >> m.batches_seen_;
        next("target_offset") >> m.target_offset_;
        next("target_divisor") >> m.target_divisor_;
        auto read_vector = [&](const std::string& key, std::vector<double>& out_vec) {
            auto s = next(key);
            out_vec.assign(m.n_features_, 0.0);
            for (int j = 0; j < m.n_features_; ++j)
                if (!(s >> out_vec[j])) throw bad(key + " needs " + std::to_string(m.n_features_) + " values");
        };
        read_vector("feature_offsets", m.feature_offset_);
        read_vector("feature_divisors", m.feature_divisor_);
        read_vector("weights", m.weights_);
        next("bias") >> m.bias_;
        if (!in && !in.eof()) throw bad("truncated file");
        return m;
    }

private:
    void require_fitted(Task expected) const {
        if (task_ != expected) throw std::logic_error("model was trained for the other task");
        if (!fitted_) throw std::logic_error("model is not fitted");
    }

    double raw_score(std::span<const int> features) const {
        const std::vector<double> x = scale_features(features);
        double p = bias_;
        for (int j = 0; j < n_features_; ++j) p += weights_[j] * x[j];
        return p;
    }

    void derive_feature_scale(const ExampleRefs& batch) {
        int max_value = 1;
        for (const Example* e : batch)
            for (int v : e->features) max_value = std::max(max_value, v);
        feature_offset_.assign(n_features_, 0.0);
        feature_divisor_.assign(n_features_, static_cast<double>(max_value));
    }

    void derive_target_scale(const ExampleRefs& batch) {
        double mean = 0.0;
        for (const Example* e : batch) mean += static_cast<double>(e->fitness);
        mean /= static_cast<double>(batch.size());
        double var = 0.0;
        for (const Example* e : batch) {
            const double d = static_cast<double>(e->fitness) - mean;
            var += d * d;
        }
        var /= static_cast<double>(batch.size());
        target_offset_ = mean;
        target_divisor_ = var > 0 ? std::sqrt(var) : 1.0;
    }

    Task task_ = Task::Regression;
    int n_features_ = 0;
    std::vector<double> weights_;
    double bias_ = 0.0;
    std::vector<double> feature_offset_;
    std::vector<double> feature_divisor_;
    double target_offset_ = 0.0;
    double target_divisor_ = 1.0;
    bool fitted_ = false;
    bool single_class_warning_ = false;
    long long updates_ = 0;  // learning-rate clock, persists across batches
    int batches_seen_ = 0;
    Hyperparameters hyper_;
};

/// Fresh model fitted on one example set (traditional learning). Needs at
/// least two examples; pass feature_divisor to pin the allele scale (e.g.
/// num_room_period_pairs - 1), otherwise it is derived from the data.
inline SurrogateModel train(Task task, const ExampleRefs& examples, const Hyperparameters& hyper,
                            std::optional<double> feature_divisor = std::nullopt) {
    if (examples.size() < 2) throw std::invalid_argument("training needs at least 2 examples");
    SurrogateModel model(task, static_cast<int>(examples.front()->features.size()));
    if (feature_divisor) model.set_feature_scale(0.0, *feature_divisor);
    model.partial_fit(examples, hyper);
    return model;
}

inline SurrogateModel train(Task task, ExampleSpan examples, const Hyperparameters& hyper,
                            std::optional<double> feature_divisor = std::nullopt) {
    return train(task, as_refs(examples), hyper, feature_divisor);
}

inline void save_model(const std::string& path, const SurrogateModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    model.save(out);
    if (!out) throw std::runtime_error("failed writing model to '" + path + "'");
}

inline SurrogateModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return SurrogateModel::load(in);
}

}  // namespace uctt
