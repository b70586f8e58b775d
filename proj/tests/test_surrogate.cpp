#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "uctt/metrics.hpp"
#include "uctt/surrogate.hpp"

using namespace uctt;

namespace {

// fitness = w . x with non-negative integer weights, optionally noisy.
struct LinearOracle {
    std::vector<int> weights;
    long long apply(const std::vector<int>& x) const {
        long long sum = 0;
        for (size_t j = 0; j < weights.size(); ++j) sum += weights[j] * x[j];
        return sum;
    }
};

DatasetLog linear_dataset(int n_examples, int n_features, uint64_t seed, LinearOracle& oracle,
                          double noise_sd = 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> weight(1, 9);
    std::uniform_int_distribution<int> value(0, 50);
    std::normal_distribution<double> noise(0.0, noise_sd);
    oracle.weights.resize(n_features);
    for (int& w : oracle.weights) w = weight(rng);
    DatasetLog log("linear", n_features);
    for (int i = 0; i < n_examples; ++i) {
        std::vector<int> x(n_features);
        for (int& v : x) v = value(rng);
        long long y = oracle.apply(x);
        if (noise_sd > 0) y += std::llround(noise(rng));
        if (y < 0) y = 0;
        log.record(std::move(x), y, true);
    }
    return log;
}

SurrogateModel model_from_text(const std::string& text) {
    std::istringstream in(text);
    return SurrogateModel::load(in);
}

const std::string kConstantRegressor =
    "uctt-model v1\n"
    "task regression\n"
    "n_features 4\n"
    "fitted 1\n"
    "warning 0\n"
    "seed 0\n"
    "eta0 0.01\n"
    "alpha 0.0001\n"
    "epochs 5\n"
    "epsilon 0.1\n"
    "updates 0\n"
    "batches_seen 1\n"
    "target_offset 0\n"
    "target_divisor 1\n"
    "feature_offsets 0 0 0 0\n"
    "feature_divisors 7 7 7 7\n"
    "weights 0 0 0 0\n"
    "bias 31\n";

}  // namespace

TEST_CASE("feature scaling maps alleles into the unit interval") {
    SurrogateModel model(Task::Regression, 4);
    model.set_feature_scale(0.0, 7.0);
    const std::vector<double> scaled = model.scale_features(std::vector<int>{7, 0, 3, 1});
    CHECK(scaled[0] == Catch::Approx(1.0));
    CHECK(scaled[1] == Catch::Approx(0.0));
    CHECK(scaled[2] == Catch::Approx(3.0 / 7.0));
    CHECK(scaled[3] == Catch::Approx(1.0 / 7.0));

    CHECK(model.scale_features(std::vector<int>{0, 0, 0, 0}) ==
          std::vector<double>{0.0, 0.0, 0.0, 0.0});

    CHECK_THROWS_AS(model.set_feature_scale(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(model.scale_features(std::vector<int>{1, 2}), std::invalid_argument);

    SurrogateModel unset(Task::Regression, 2);
    CHECK_THROWS_AS(unset.scale_features(std::vector<int>{1, 2}), std::logic_error);
}

TEST_CASE("a regressor fitted on a linear oracle orders held-out pairs") {
    LinearOracle oracle;
    const DatasetLog log = linear_dataset(1000, 20, 2024, oracle);
    const auto [train_refs, test_refs] = split_examples(log.examples(), 0.7, 9);
    Hyperparameters hyper;
    hyper.seed = 1;
    const SurrogateModel model = train(Task::Regression, train_refs, hyper);
    CHECK(comparison_accuracy(test_refs, model) >= 0.98);
}

TEST_CASE("constant targets are predicted within epsilon") {
    DatasetLog log("const", 3);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> value(0, 9);
    for (int i = 0; i < 200; ++i)
        log.record({value(rng), value(rng), value(rng)}, 77, true);
    Hyperparameters hyper;
    const SurrogateModel model = train(Task::Regression, log.examples(), hyper);
    for (int i = 0; i < 10; ++i) {
        const std::vector<int> x = {value(rng), value(rng), value(rng)};
        CHECK(model.predict_fitness(x) == Catch::Approx(77.0).margin(hyper.epsilon));
    }
}

TEST_CASE("linearly separable classes are learned exactly") {
    DatasetLog log("sep", 3);
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> low(0, 10), high(30, 40);
    for (int i = 0; i < 400; ++i) {
        if (i % 2 == 0)
            log.record({high(rng), high(rng), high(rng)}, 0, true);
        else
            log.record({low(rng), low(rng), low(rng)}, 2000, false);
    }
    Hyperparameters hyper;
    hyper.epochs = 10;
    const SurrogateModel model = train(Task::Classification, log.examples(), hyper);
    for (const Example& e : log.examples())
        REQUIRE(model.predict_feasible(e.features) == e.feasible);
}

TEST_CASE("partial fit on an unfitted model equals train") {
    LinearOracle oracle;
    const DatasetLog log = linear_dataset(300, 8, 31, oracle);
    Hyperparameters hyper;
    hyper.seed = 77;
    const ExampleRefs refs = as_refs(log.examples());

    const SurrogateModel trained = train(Task::Regression, refs, hyper);
    SurrogateModel incremental(Task::Regression, 8);
    incremental.partial_fit(refs, hyper);

    CHECK(trained.weights() == incremental.weights());
    CHECK(trained.bias() == incremental.bias());
}

TEST_CASE("two sequential partial fits differ from one fit on the concatenation") {
    LinearOracle oracle;
    const DatasetLog log = linear_dataset(400, 8, 32, oracle);
    Hyperparameters hyper;
    hyper.seed = 5;
    const auto blocks = batches(log, 200);
    REQUIRE(blocks.size() == 2);

    SurrogateModel incremental(Task::Regression, 8);
    incremental.partial_fit(as_refs(blocks[0]), hyper);
    incremental.partial_fit(as_refs(blocks[1]), hyper);

    const SurrogateModel concatenated = train(Task::Regression, log.examples(), hyper);
    CHECK(incremental.weights() != concatenated.weights());
}

TEST_CASE("an empty batch leaves the model untouched") {
    LinearOracle oracle;
    const DatasetLog log = linear_dataset(100, 4, 33, oracle);
    Hyperparameters hyper;
    SurrogateModel model = train(Task::Regression, log.examples(), hyper);
    std::ostringstream before;
    model.save(before);
    model.partial_fit({}, hyper);
    std::ostringstream after;
    model.save(after);
    CHECK(before.str() == after.str());
}

TEST_CASE("training is bit-deterministic for a fixed seed") {
    LinearOracle oracle;
    const DatasetLog log = linear_dataset(500, 10, 34, oracle);
    Hyperparameters hyper;
    hyper.seed = 123;
    const SurrogateModel a = train(Task::Regression, log.examples(), hyper);
    const SurrogateModel b = train(Task::Regression, log.examples(), hyper);
    CHECK(a.weights() == b.weights());
    CHECK(a.bias() == b.bias());
}

TEST_CASE("single-class training yields a flagged constant classifier") {
    DatasetLog log("onesided", 2);
    for (int i = 0; i < 50; ++i) log.record({i, i + 1}, 3, true);
    Hyperparameters hyper;
    const SurrogateModel model = train(Task::Classification, log.examples(), hyper);
    CHECK(model.single_class_warning());
    CHECK(model.predict_feasible(std::vector<int>{0, 0}));
    CHECK(model.predict_feasible(std::vector<int>{999, 999}));

    CHECK_THROWS_AS(train(Task::Classification, ExampleRefs{}, hyper), std::invalid_argument);
}

TEST_CASE("prediction guards task and fitted state") {
    SurrogateModel unfitted(Task::Regression, 2);
    CHECK_THROWS_AS(unfitted.predict_fitness(std::vector<int>{1, 2}), std::logic_error);

    DatasetLog log("g", 2);
    for (int i = 0; i < 20; ++i) log.record({i, 2 * i}, i, i % 2 == 0);
    Hyperparameters hyper;
    const SurrogateModel reg = train(Task::Regression, log.examples(), hyper);
    CHECK_THROWS_AS(reg.predict_feasible(std::vector<int>{1, 2}), std::logic_error);
    const SurrogateModel cls = train(Task::Classification, log.examples(), hyper);
    CHECK_THROWS_AS(cls.predict_fitness(std::vector<int>{1, 2}), std::logic_error);
}

TEST_CASE("zero weights and bias 31 predict 31 everywhere") {
    const SurrogateModel model = model_from_text(kConstantRegressor);
    CHECK(model.predict_fitness(std::vector<int>{7, 0, 3, 1}) == 31.0);
    CHECK(model.predict_fitness(std::vector<int>{0, 7, 7, 7}) == 31.0);
}

TEST_CASE("zero weights and positive bias classify everything feasible") {
    std::string text = kConstantRegressor;
    text.replace(text.find("task regression"), 15, "task classification");
    text.replace(text.find("bias 31"), 7, "bias 1");
    const SurrogateModel model = model_from_text(text);
    CHECK(model.predict_feasible(std::vector<int>{7, 0, 3, 1}));
    CHECK(model.predict_feasible(std::vector<int>{0, 0, 0, 0}));
}

TEST_CASE("model files round-trip bit-exactly") {
    LinearOracle oracle;
    const DatasetLog log = linear_dataset(250, 6, 35, oracle);
    Hyperparameters hyper;
    hyper.seed = 9;
    hyper.eta0 = 0.037;
    const SurrogateModel model = train(Task::Regression, log.examples(), hyper);

    std::ostringstream first;
    model.save(first);
    std::istringstream in(first.str());
    const SurrogateModel loaded = SurrogateModel::load(in);
    std::ostringstream second;
    loaded.save(second);
    CHECK(first.str() == second.str());
    CHECK(loaded.weights() == model.weights());
    CHECK(loaded.predict_fitness(log.examples()[0].features) ==
          model.predict_fitness(log.examples()[0].features));

    std::istringstream garbage("not a model\n");
    CHECK_THROWS_AS(SurrogateModel::load(garbage), std::runtime_error);
}

TEST_CASE("scaling all targets by a power of two preserves pairwise comparisons") {
    LinearOracle oracle;
    const DatasetLog log = linear_dataset(600, 10, 36, oracle);
    DatasetLog scaled("linear4x", 10);
    for (const Example& e : log.examples()) scaled.record(e.features, e.fitness * 4, e.feasible);

    Hyperparameters hyper;
    hyper.seed = 21;
    const auto [train_a, test_a] = split_examples(log.examples(), 0.7, 3);
    const auto [train_b, test_b] = split_examples(scaled.examples(), 0.7, 3);
    const SurrogateModel model_a = train(Task::Regression, train_a, hyper);
    const SurrogateModel model_b = train(Task::Regression, train_b, hyper);

    for (size_t i = 0; i < test_a.size(); ++i)
        for (size_t j = i + 1; j < test_a.size(); ++j) {
            const int lhs = compare(model_a.predict_fitness(test_a[i]->features),
                                    model_a.predict_fitness(test_a[j]->features));
            const int rhs = compare(model_b.predict_fitness(test_b[i]->features),
                                    model_b.predict_fitness(test_b[j]->features));
            REQUIRE(lhs == rhs);
        }
}

TEST_CASE("predictions stay finite across the allele range") {
    LinearOracle oracle;
    const DatasetLog log = linear_dataset(300, 5, 37, oracle);
    Hyperparameters hyper;
    const SurrogateModel model = train(Task::Regression, log.examples(), hyper);
    for (int v : {0, 1, 25, 50}) {
        const std::vector<int> x(5, v);
        CHECK(std::isfinite(model.predict_fitness(x)));
    }
}
