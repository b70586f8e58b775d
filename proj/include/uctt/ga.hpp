#pragma once

// Two-stage genetic algorithm. Stage one evolves event-ordering permutations
// until the greedy decoder yields a feasible timetable; stage two evolves
// room-period assignments to shrink the soft penalty, with every evaluation
// forwarded to an optional sink so it can be logged as a training example.

#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "uctt/encoding.hpp"
#include "uctt/evaluation.hpp"
#include "uctt/instance.hpp"

namespace uctt {

enum class MoveMode { Simple, Chain };

struct GaConfig {
    int population_size = 50;
    int offspring_count = 100;          // lambda of the varOr strategy
    double crossover_probability = 0.6;
    double mutation_probability = 0.3;  // remainder up to 1 is plain reproduction
    int tournament_size = 3;
    int non_improving_switch = 10;   // soft stage: toggle simple/chain after this many stagnant generations
    int stop_non_improving = 100;    // stop after this many stagnant generations
    long long max_evaluations = 1'000'000;
    std::optional<long long> target_fitness;
    uint64_t rng_seed = 0;
    int threads = 1;  // >1 parallelizes offspring evaluation; results are order-stable

    void validate() const {
        if (population_size < 1) throw std::invalid_argument("population_size must be >= 1");
        if (offspring_count < 1) throw std::invalid_argument("offspring_count must be >= 1");
        if (crossover_probability < 0 || mutation_probability < 0 ||
            crossover_probability + mutation_probability > 1.0)
            throw std::invalid_argument(
                "crossover and mutation probabilities must be non-negative and sum to <= 1");
        if (tournament_size < 1) throw std::invalid_argument("tournament_size must be >= 1");
        if (non_improving_switch < 1) throw std::invalid_argument("non_improving_switch must be >= 1");
        if (stop_non_improving < 1) throw std::invalid_argument("stop_non_improving must be >= 1");
        if (max_evaluations < 1) throw std::invalid_argument("max_evaluations must be >= 1");
        if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    }
};

struct TraceRow {
    long long generation = 0;
    Stage stage = Stage::Hard;
    long long evaluations = 0;
    long long best_fitness = 0;
};

struct EvolutionTrace {
    std::vector<TraceRow> rows;

    void write_csv(std::ostream& out) const {
        out << "generation,stage,evaluations,best_fitness\n";
        for (const TraceRow& r : rows)
            out << r.generation << ',' << (r.stage == Stage::Hard ? "HARD" : "SOFT") << ','
                << r.evaluations << ',' << r.best_fitness << '\n';
    }
};

/// Receives every fitness evaluation: raw genes, fitness, feasibility label.
using EvaluationSink = std::function<void(const std::vector<int>&, long long, bool)>;

namespace detail {

inline int uniform_index(std::mt19937_64& rng, int bound) {
    return static_cast<int>(std::uniform_int_distribution<int>(0, bound - 1)(rng));
}

// Uniform over [0, bound) excluding `current`; the "new possible value" of
// the mutation operator.
inline int uniform_new_allele(std::mt19937_64& rng, int bound, int current) {
    if (bound <= 1) return current;
    int v = uniform_index(rng, bound - 1);
    if (v >= current) ++v;
    return v;
}

}  // namespace detail

/// Tournament selection over fitness values (minimization): each pick draws
/// k contestants uniformly with replacement and keeps the fittest.
inline std::vector<int> tournament_select_indices(const std::vector<long long>& fitnesses, int k,
                                                  int count, std::mt19937_64& rng) {
    if (fitnesses.empty()) throw std::invalid_argument("tournament over an empty population");
    if (k < 1) throw std::invalid_argument("tournament size must be >= 1");
    std::vector<int> picked;
    picked.reserve(count);
    for (int c = 0; c < count; ++c) {
        int best = detail::uniform_index(rng, static_cast<int>(fitnesses.size()));
        for (int round = 1; round < k; ++round) {
            const int challenger = detail::uniform_index(rng, static_cast<int>(fitnesses.size()));
            if (fitnesses[challenger] < fitnesses[best]) best = challenger;
        }
        picked.push_back(best);
    }
    return picked;
}

/// Midpoint single-point crossover realized through neighborhood moves, so
/// representation invariants survive: offspring one drives the first half of
/// ind_one toward ind_two's alleles, offspring two the second half.
template <typename Individual, typename MoveFn>
std::pair<Individual, Individual> single_point_crossover_with(const Individual& ind_one,
                                                              const Individual& ind_two,
                                                              MoveFn&& move) {
    if (ind_one.genes.size() != ind_two.genes.size())
        throw std::invalid_argument("crossover parents differ in length");
    const int n = static_cast<int>(ind_one.genes.size());
    const int half = n / 2;
    Individual first = ind_one;
    for (int i = 0; i < half; ++i) move(first, i, ind_two.genes[i]);
    Individual second = ind_one;
    for (int i = half; i < n; ++i) move(second, i, ind_two.genes[i]);
    return {std::move(first), std::move(second)};
}

inline std::pair<HardIndividual, HardIndividual> single_point_crossover(
    const Instance& inst, const HardIndividual& a, const HardIndividual& b, bool /*chain*/ = false) {
    return single_point_crossover_with(
        a, b, [&](HardIndividual& ind, int pos, int allele) { simple_move(inst, ind, pos, allele); });
}

inline std::pair<SoftIndividual, SoftIndividual> single_point_crossover(const Instance& inst,
                                                                        const SoftIndividual& a,
                                                                        const SoftIndividual& b,
                                                                        bool chain) {
    return single_point_crossover_with(a, b, [&](SoftIndividual& ind, int pos, int allele) {
        if (chain)
            chain_move(inst, ind, pos, allele);
        else
            simple_move(inst, ind, pos, allele);
    });
}

/// Stage policy for the permutation (hard constraint) representation.
class HardStage {
public:
    using Individual = HardIndividual;

    explicit HardStage(const Instance& inst) : inst_(inst) {}

    Stage stage() const { return Stage::Hard; }
    const Instance& instance() const { return inst_; }

    Individual random_individual(std::mt19937_64& rng) const {
        Individual ind;
        ind.genes.resize(inst_.num_events());
        std::iota(ind.genes.begin(), ind.genes.end(), 0);
        std::shuffle(ind.genes.begin(), ind.genes.end(), rng);
        return ind;
    }

    long long evaluate(const Individual& ind, bool& feasible) const {
        const long long h = hard_violations(inst_, decode_hard(inst_, ind)).hard_total();
        feasible = h == 0;
        return h;
    }

    // Hard-constraint evolution only uses the simple move.
    void mutate(Individual& ind, MoveMode, std::mt19937_64& rng) const {
        if (ind.genes.empty()) return;
        const int pos = detail::uniform_index(rng, static_cast<int>(ind.genes.size()));
        const int allele =
            detail::uniform_new_allele(rng, inst_.num_events(), ind.genes[pos]);
        simple_move(inst_, ind, pos, allele);
    }

    std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b,
                                                MoveMode) const {
        return single_point_crossover(inst_, a, b, false);
    }

private:
    const Instance& inst_;
};

/// Stage policy for the room-period (soft constraint) representation.
class SoftStage {
public:
    using Individual = SoftIndividual;

    explicit SoftStage(const Instance& inst) : inst_(inst) {}

    Stage stage() const { return Stage::Soft; }
    const Instance& instance() const { return inst_; }

    long long evaluate(const Individual& ind, bool& feasible) const {
        const ViolationReport rep = evaluate_full(ind);
        feasible = rep.hard_total() == 0;
        return kHardWeight * rep.hard_total() + rep.soft_total();
    }

    void mutate(Individual& ind, MoveMode mode, std::mt19937_64& rng) const {
        if (ind.genes.empty()) return;
        const int pos = detail::uniform_index(rng, static_cast<int>(ind.genes.size()));
        const int allele =
            detail::uniform_new_allele(rng, inst_.num_room_period_pairs(), ind.genes[pos]);
        if (mode == MoveMode::Chain)
            chain_move(inst_, ind, pos, allele);
        else
            simple_move(inst_, ind, pos, allele);
    }

    std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b,
                                                MoveMode mode) const {
        return single_point_crossover(inst_, a, b, mode == MoveMode::Chain);
    }

private:
    ViolationReport evaluate_full(const Individual& ind) const {
        return ::uctt::evaluate(inst_, decode_soft(inst_, ind));
    }

    const Instance& inst_;
};

/// varOr offspring generation: each child comes from exactly one operator
/// (crossover keeps one of the two offspring at random, reproduction clones).
/// Parents are drawn uniformly; selection pressure is applied afterwards when
/// the next generation is picked from parents plus offspring.
template <typename Rep>
std::vector<typename Rep::Individual> var_or(const Rep& rep,
                                             const std::vector<typename Rep::Individual>& population,
                                             int lambda, double cx_prob, double mut_prob,
                                             MoveMode mode, std::mt19937_64& rng) {
    if (population.empty()) throw std::invalid_argument("varOr over an empty population");
    if (cx_prob < 0 || mut_prob < 0 || cx_prob + mut_prob > 1.0)
        throw std::invalid_argument("operator probabilities must be non-negative and sum to <= 1");
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const int n = static_cast<int>(population.size());
    std::vector<typename Rep::Individual> offspring;
    offspring.reserve(lambda);
    for (int i = 0; i < lambda; ++i) {
        const double u = coin(rng);
        if (u < cx_prob) {
            int a = detail::uniform_index(rng, n);
            int b = n > 1 ? detail::uniform_index(rng, n - 1) : a;
            if (n > 1 && b >= a) ++b;
            auto [first, second] = rep.crossover(population[a], population[b], mode);
            offspring.push_back(coin(rng) < 0.5 ? std::move(first) : std::move(second));
        } else if (u < cx_prob + mut_prob) {
            typename Rep::Individual child = population[detail::uniform_index(rng, n)];
            rep.mutate(child, mode, rng);
            offspring.push_back(std::move(child));
        } else {
            offspring.push_back(population[detail::uniform_index(rng, n)]);
        }
    }
    return offspring;
}

template <typename Individual>
struct StageResult {
    Individual best;
    long long best_fitness = 0;
    bool best_feasible = false;
    long long evaluations = 0;
    EvolutionTrace trace;
};

namespace detail {

// Evaluates a block of individuals, optionally across threads. Results come
// back in input order, so sink calls and downstream RNG use stay serial and
// runs are reproducible regardless of the thread count.
template <typename Rep>
void evaluate_all(const Rep& rep, const std::vector<typename Rep::Individual>& individuals,
                  int threads, std::vector<long long>& fitnesses, std::vector<char>& feasible) {
    const int n = static_cast<int>(individuals.size());
    fitnesses.resize(n);
    feasible.resize(n);
    auto work = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            bool f = false;
            fitnesses[i] = rep.evaluate(individuals[i], f);
            feasible[i] = f ? 1 : 0;
        }
    };
    if (threads <= 1 || n < 2 * threads) {
        work(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int begin = t * chunk;
        const int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(work, begin, end);
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace detail

/// Runs one evolution stage: evaluate the initial population, then loop
/// varOr -> evaluate -> tournament over parents+offspring, keeping the
/// fittest individual ever seen (it is re-injected if selection drops it).
///
/// Stops at fitness 0 (nothing can improve), when the next generation would
/// exceed max_evaluations, or after stop_non_improving stagnant generations
/// (with a target_fitness set, stagnation only stops the run once the target
/// has been reached). The soft stage flips between simple and chain moves
/// after non_improving_switch stagnant generations.
template <typename Rep>
StageResult<typename Rep::Individual> evolve_stage(
    const Rep& rep, const GaConfig& cfg, std::vector<typename Rep::Individual> population,
    const EvaluationSink& sink = {}) {
    cfg.validate();
    if (population.empty()) throw std::invalid_argument("evolve_stage needs a non-empty population");
    std::mt19937_64 rng(cfg.rng_seed);

    std::vector<long long> fitnesses;
    std::vector<char> feasible;
    detail::evaluate_all(rep, population, cfg.threads, fitnesses, feasible);

    StageResult<typename Rep::Individual> result;
    result.evaluations = static_cast<long long>(population.size());
    if (sink)
        for (size_t i = 0; i < population.size(); ++i)
            sink(population[i].genes, fitnesses[i], feasible[i] != 0);

    int best_index = 0;
    for (size_t i = 1; i < population.size(); ++i)
        if (fitnesses[i] < fitnesses[best_index]) best_index = static_cast<int>(i);
    result.best = population[best_index];
    result.best_fitness = fitnesses[best_index];
    result.best_feasible = feasible[best_index] != 0;

    long long generation = 0;
    result.trace.rows.push_back({generation, rep.stage(), result.evaluations, result.best_fitness});

    MoveMode mode = MoveMode::Simple;
    int stagnant = 0;
    int stagnant_since_switch = 0;

    const auto target_reached = [&] {
        return !cfg.target_fitness || result.best_fitness <= *cfg.target_fitness;
    };

    while (true) {
        if (result.best_fitness == 0) break;
        if (stagnant >= cfg.stop_non_improving && target_reached()) break;
        if (result.evaluations + cfg.offspring_count > cfg.max_evaluations) break;

        ++generation;
        std::vector<typename Rep::Individual> offspring =
            var_or(rep, population, cfg.offspring_count, cfg.crossover_probability,
                   cfg.mutation_probability, mode, rng);
        std::vector<long long> off_fitnesses;
        std::vector<char> off_feasible;
        detail::evaluate_all(rep, offspring, cfg.threads, off_fitnesses, off_feasible);
        result.evaluations += cfg.offspring_count;
        if (sink)
            for (size_t i = 0; i < offspring.size(); ++i)
                sink(offspring[i].genes, off_fitnesses[i], off_feasible[i] != 0);

        // mu + lambda pool
        std::vector<typename Rep::Individual> pool = std::move(population);
        pool.insert(pool.end(), std::make_move_iterator(offspring.begin()),
                    std::make_move_iterator(offspring.end()));
        std::vector<long long> pool_fitnesses = std::move(fitnesses);
        pool_fitnesses.insert(pool_fitnesses.end(), off_fitnesses.begin(), off_fitnesses.end());
        std::vector<char> pool_feasible = std::move(feasible);
        pool_feasible.insert(pool_feasible.end(), off_feasible.begin(), off_feasible.end());

        const std::vector<int> chosen =
            tournament_select_indices(pool_fitnesses, cfg.tournament_size, cfg.population_size, rng);
        population.clear();
        fitnesses.clear();
        feasible.clear();
        for (int idx : chosen) {
            population.push_back(pool[idx]);
            fitnesses.push_back(pool_fitnesses[idx]);
            feasible.push_back(pool_feasible[idx]);
        }

        const long long previous_best = result.best_fitness;
        int gen_best = 0;
        for (size_t i = 1; i < fitnesses.size(); ++i)
            if (fitnesses[i] < fitnesses[gen_best]) gen_best = static_cast<int>(i);
        if (fitnesses[gen_best] < result.best_fitness) {
            result.best = population[gen_best];
            result.best_fitness = fitnesses[gen_best];
            result.best_feasible = feasible[gen_best] != 0;
        } else if (fitnesses[gen_best] > result.best_fitness) {
            // Elitism: selection lost the all-time best, put it back.
            int worst = 0;
            for (size_t i = 1; i < fitnesses.size(); ++i)
                if (fitnesses[i] > fitnesses[worst]) worst = static_cast<int>(i);
            population[worst] = result.best;
            fitnesses[worst] = result.best_fitness;
            feasible[worst] = result.best_feasible ? 1 : 0;
        }

        if (result.best_fitness < previous_best) {
            stagnant = 0;
            stagnant_since_switch = 0;
        } else {
            ++stagnant;
            ++stagnant_since_switch;
        }
        if (rep.stage() == Stage::Soft && stagnant_since_switch >= cfg.non_improving_switch) {
            mode = mode == MoveMode::Simple ? MoveMode::Chain : MoveMode::Simple;
            stagnant_since_switch = 0;
        }
        result.trace.rows.push_back(
            {generation, rep.stage(), result.evaluations, result.best_fitness});
    }
    return result;
}

struct SolveResult {
    Timetable timetable;           // decoded best of stage two
    long long soft_fitness = 0;    // 1000 * hard + soft of that timetable
    bool feasible = false;
    long long evaluations = 0;     // both stages
    long long stage1_evaluations = 0;
    EvolutionTrace trace;          // stage-1 rows then stage-2 rows
};

/// End-to-end solve. Stage one searches for a feasible timetable; its best
/// decoding is re-encoded as the seed of stage two, whose initial population
/// is the seed plus single-move perturbations of it. Only stage-two
/// evaluations reach the sink (one coherent feature space for learning).
inline SolveResult solve(const Instance& inst, const GaConfig& cfg,
                         const EvaluationSink& sink = {}) {
    cfg.validate();
    std::mt19937_64 rng(cfg.rng_seed);

    HardStage hard_rep(inst);
    std::vector<HardIndividual> hard_pop;
    hard_pop.reserve(cfg.population_size);
    for (int i = 0; i < cfg.population_size; ++i) hard_pop.push_back(hard_rep.random_individual(rng));

    GaConfig stage1 = cfg;
    stage1.target_fitness = 0;
    stage1.rng_seed = rng();
    const auto r1 = evolve_stage(hard_rep, stage1, std::move(hard_pop));

    const Timetable hard_tt = decode_hard(inst, r1.best);
    SoftIndividual seed = encode_soft(inst, hard_tt);

    std::vector<SoftIndividual> soft_pop;
    soft_pop.reserve(cfg.population_size);
    soft_pop.push_back(seed);
    for (int i = 1; i < cfg.population_size; ++i) {
        SoftIndividual ind = seed;
        if (!ind.genes.empty()) {
            const int pos = detail::uniform_index(rng, static_cast<int>(ind.genes.size()));
            const int allele =
                detail::uniform_new_allele(rng, inst.num_room_period_pairs(), ind.genes[pos]);
            simple_move(inst, ind, pos, allele);
        }
        soft_pop.push_back(std::move(ind));
    }

    GaConfig stage2 = cfg;
    stage2.rng_seed = rng();
    stage2.max_evaluations = std::max<long long>(1, cfg.max_evaluations - r1.evaluations);
    SoftStage soft_rep(inst);
    const auto r2 = evolve_stage(soft_rep, stage2, std::move(soft_pop), sink);

    SolveResult result;
    result.timetable = decode_soft(inst, r2.best);
    result.soft_fitness = r2.best_fitness;
    result.feasible = r2.best_feasible;
    result.stage1_evaluations = r1.evaluations;
    result.evaluations = r1.evaluations + r2.evaluations;
    result.trace = r1.trace;
    result.trace.rows.insert(result.trace.rows.end(), r2.trace.rows.begin(), r2.trace.rows.end());
    return result;
}

}  // namespace uctt
