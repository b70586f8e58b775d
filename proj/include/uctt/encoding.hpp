#pragma once

// Genome encodings and the neighborhood moves that transform them.
//
// Hard stage: the genome is a permutation of event indices; the value order
// is the order events are greedily placed. Soft stage: position = event,
// value = room-period flat index; values stay pairwise distinct, which the
// swap semantics of simple_move and the free-slot relocation of chain_move
// both preserve.

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "uctt/evaluation.hpp"
#include "uctt/instance.hpp"

namespace uctt {

struct HardIndividual {
    std::vector<int> genes;  // permutation of [0, num_events)
    bool operator==(const HardIndividual&) const = default;
};

struct SoftIndividual {
    std::vector<int> genes;  // distinct flat indices in [0, num_room_period_pairs)
    bool operator==(const SoftIndividual&) const = default;
};

inline bool is_valid_hard(const Instance& inst, const HardIndividual& ind) {
    if (static_cast<int>(ind.genes.size()) != inst.num_events()) return false;
    std::vector<bool> seen(ind.genes.size(), false);
    for (int g : ind.genes) {
        if (g < 0 || g >= static_cast<int>(ind.genes.size()) || seen[g]) return false;
        seen[g] = true;
    }
    return true;
}

inline bool is_valid_soft(const Instance& inst, const SoftIndividual& ind) {
    if (static_cast<int>(ind.genes.size()) != inst.num_events()) return false;
    std::vector<bool> seen(inst.num_room_period_pairs(), false);
    for (int g : ind.genes) {
        if (g < 0 || g >= inst.num_room_period_pairs() || seen[g]) return false;
        seen[g] = true;
    }
    return true;
}

/// Soft decoding: event i sits at room_period_of_index(genes[i]).
inline Timetable decode_soft(const Instance& inst, const SoftIndividual& ind) {
    if (static_cast<int>(ind.genes.size()) != inst.num_events())
        throw std::invalid_argument("soft genome length != num_events");
    Timetable tt;
    tt.event_slot.reserve(ind.genes.size());
    for (int g : ind.genes) {
        if (g < 0 || g >= inst.num_room_period_pairs())
            throw std::out_of_range("soft gene value " + std::to_string(g) + " outside [0, " +
                                    std::to_string(inst.num_room_period_pairs()) + ")");
        tt.event_slot.push_back(g);
    }
    return tt;
}

/// Inverse of decode_soft. Events left unassigned by the greedy hard decoder
/// are given the lowest free flat indices so the result is a valid genome.
inline SoftIndividual encode_soft(const Instance& inst, const Timetable& tt) {
    detail::check_length(inst, tt);
    std::vector<bool> occupied(inst.num_room_period_pairs(), false);
    for (int s : tt.event_slot) {
        if (s == kUnassigned) continue;
        if (occupied[s])
            throw std::invalid_argument("timetable assigns slot " + std::to_string(s) + " twice");
        occupied[s] = true;
    }
    SoftIndividual ind;
    ind.genes = tt.event_slot;
    int next_free = 0;
    for (int& g : ind.genes) {
        if (g != kUnassigned) continue;
        while (next_free < inst.num_room_period_pairs() && occupied[next_free]) ++next_free;
        if (next_free >= inst.num_room_period_pairs())
            throw std::invalid_argument("no free slot left to complete the genome");
        g = next_free;
        occupied[next_free] = true;
    }
    return ind;
}

namespace detail {

// Course-level conflict: lectures of these courses may not share a period.
inline bool courses_conflict(const Instance& inst, int course_a, int course_b) {
    return course_a == course_b || inst.teacher_of(course_a) == inst.teacher_of(course_b) ||
           inst.share_curriculum(course_a, course_b);
}

}  // namespace detail

/// Greedy hard decoding. Gene values are read in array order; each value
/// names the event scheduled next. An event goes to the free room-period
/// causing no hard violation against what is already placed, preferring
/// (least capacity shortfall, smallest sufficient room, lowest flat index);
/// with no such slot it stays unassigned and is counted by HC1.
inline Timetable decode_hard(const Instance& inst, const HardIndividual& ind) {
    if (!is_valid_hard(inst, ind))
        throw std::invalid_argument("hard genome is not a permutation of [0, num_events)");

    const int num_rp = inst.num_room_period_pairs();
    const int ppw = inst.periods_per_week();
    Timetable tt = Timetable::unassigned(inst.num_events());
    std::vector<bool> occupied(num_rp, false);
    std::vector<std::vector<int>> courses_in_period(ppw);

    for (int event : ind.genes) {
        const int course = inst.event_course(event);
        const int students = inst.courses()[course].students;
        int best_slot = -1;
        int best_shortfall = std::numeric_limits<int>::max();
        int best_capacity = std::numeric_limits<int>::max();
        for (int slot = 0; slot < num_rp; ++slot) {
            if (occupied[slot]) continue;
            const int pw = slot % ppw;
            if (inst.unavailable(course, pw)) continue;
            bool clashes = false;
            for (int other : courses_in_period[pw]) {
                if (detail::courses_conflict(inst, course, other)) {
                    clashes = true;
                    break;
                }
            }
            if (clashes) continue;
            const int capacity = inst.rooms()[slot / ppw].capacity;
            const int shortfall = std::max(0, students - capacity);
            if (shortfall < best_shortfall ||
                (shortfall == best_shortfall && capacity < best_capacity)) {
                best_slot = slot;
                best_shortfall = shortfall;
                best_capacity = capacity;
            }
        }
        if (best_slot >= 0) {
            tt.event_slot[event] = best_slot;
            occupied[best_slot] = true;
            courses_in_period[best_slot % ppw].push_back(course);
        }
    }
    return tt;
}

/// Sets genes[position] to new_allele; if the value already occurs at another
/// position the two gene values are swapped instead, so permutation and
/// distinctness invariants always survive.
inline void simple_move(std::vector<int>& genes, int position, int new_allele, int allele_range) {
    if (position < 0 || position >= static_cast<int>(genes.size()))
        throw std::out_of_range("move position outside the genome");
    if (new_allele < 0 || new_allele >= allele_range)
        throw std::out_of_range("allele " + std::to_string(new_allele) + " outside [0, " +
                                std::to_string(allele_range) + ")");
    for (size_t i = 0; i < genes.size(); ++i) {
        if (genes[i] == new_allele) {
            std::swap(genes[position], genes[i]);
            return;
        }
    }
    genes[position] = new_allele;
}

inline void simple_move(const Instance& inst, HardIndividual& ind, int position, int new_allele) {
    simple_move(ind.genes, position, new_allele, inst.num_events());
}

inline void simple_move(const Instance& inst, SoftIndividual& ind, int position, int new_allele) {
    simple_move(ind.genes, position, new_allele, inst.num_room_period_pairs());
}

/// Kempe-style chain move, soft representation only. Moving the event at
/// `position` to the slot `new_allele` may clash (room, curriculum, teacher)
/// with events in the target period p1; those are relocated to the event's
/// old period p2, and events of p2 clashing with the relocated ones move to
/// p1 in turn. Relocation depth is one level of this back-and-forth; each
/// relocated event takes the lowest-flat-index free room of its destination
/// period. A clash-free move, a move within one period, or a chain with no
/// free slot left all fall back to simple_move semantics.
inline void chain_move(const Instance& inst, SoftIndividual& ind, int position, int new_allele) {
    const int num_rp = inst.num_room_period_pairs();
    const int ppw = inst.periods_per_week();
    std::vector<int>& genes = ind.genes;
    if (position < 0 || position >= static_cast<int>(genes.size()))
        throw std::out_of_range("move position outside the genome");
    if (new_allele < 0 || new_allele >= num_rp)
        throw std::out_of_range("allele " + std::to_string(new_allele) + " outside [0, " +
                                std::to_string(num_rp) + ")");
    if (genes[position] == new_allele) return;

    const int mover = position;  // soft representation: position = event index
    const int mover_course = inst.event_course(mover);
    const int p1 = new_allele % ppw;
    const int p2 = genes[mover] % ppw;

    // Events of the target period that clash with the mover once it arrives.
    std::vector<int> move_list_one;
    for (int e = 0; e < static_cast<int>(genes.size()); ++e) {
        if (e == mover || genes[e] % ppw != p1) continue;
        if (genes[e] == new_allele ||
            detail::courses_conflict(inst, mover_course, inst.event_course(e)))
            move_list_one.push_back(e);
    }
    if (move_list_one.empty()) {
        genes[mover] = new_allele;  // target slot is free, no conflict in p1
        return;
    }
    if (p1 == p2) {
        simple_move(inst, ind, position, new_allele);
        return;
    }

    // Events staying in p2 that would clash with the relocated ones.
    std::vector<int> move_list_two;
    for (int e = 0; e < static_cast<int>(genes.size()); ++e) {
        if (e == mover || genes[e] % ppw != p2) continue;
        const int course = inst.event_course(e);
        for (int m : move_list_one) {
            if (detail::courses_conflict(inst, course, inst.event_course(m))) {
                move_list_two.push_back(e);
                break;
            }
        }
    }

    // Plan the relocations on a scratch occupancy map; commit only if every
    // event finds a free room in its destination period.
    std::vector<bool> occupied(num_rp, false);
    for (int g : genes) occupied[g] = true;
    occupied[genes[mover]] = false;
    for (int e : move_list_one) occupied[genes[e]] = false;
    for (int e : move_list_two) occupied[genes[e]] = false;
    occupied[new_allele] = true;

    std::vector<std::pair<int, int>> plan;  // (event, new slot)
    plan.emplace_back(mover, new_allele);
    auto relocate = [&](const std::vector<int>& events, int period) {
        for (int e : events) {
            int slot = -1;
            for (int room = 0; room < static_cast<int>(inst.rooms().size()); ++room) {
                const int candidate = room * ppw + period;
                if (!occupied[candidate]) {
                    slot = candidate;
                    break;
                }
            }
            if (slot < 0) return false;
            occupied[slot] = true;
            plan.emplace_back(e, slot);
        }
        return true;
    };
    if (!relocate(move_list_one, p2) || !relocate(move_list_two, p1)) {
        simple_move(inst, ind, position, new_allele);
        return;
    }
    for (auto [event, slot] : plan) genes[event] = slot;
}

}  // namespace uctt
