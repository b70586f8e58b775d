#pragma once

// Constraint evaluation: hard violations HC1-HC5, soft penalties SC1-SC4,
// and the stage-dependent fitness. All functions here are pure; distinct
// timetables may be evaluated concurrently.

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uctt/instance.hpp"

namespace uctt {

enum class Stage { Hard, Soft };

inline constexpr long long kHardWeight = 1000;  // per hard violation in the soft stage
inline constexpr int kUnassigned = -1;

/// Decoded assignment of every event to a room-period flat index (or kUnassigned).
struct Timetable {
    std::vector<int> event_slot;

    static Timetable unassigned(int num_events) {
        Timetable tt;
        tt.event_slot.assign(num_events, kUnassigned);
        return tt;
    }

    int size() const { return static_cast<int>(event_slot.size()); }
    bool assigned(int event) const { return event_slot[event] != kUnassigned; }
    bool fully_assigned() const {
        for (int s : event_slot)
            if (s == kUnassigned) return false;
        return true;
    }
    bool operator==(const Timetable&) const = default;
};

/// Per-constraint violation counts. Hard components count unordered event
/// pairs (three clashing events in one slot = three pair violations); HC1
/// additionally counts each unassigned event once.
struct ViolationReport {
    int hc1 = 0;  // same-course lectures sharing a period, plus unassigned events
    int hc2 = 0;  // room occupied by more than one lecture in a period
    int hc3 = 0;  // same-curriculum lectures sharing a period
    int hc4 = 0;  // same-teacher lectures sharing a period
    int hc5 = 0;  // lecture in a period its course is unavailable
    int sc1 = 0;  // students over room capacity, 1 per student
    int sc2 = 0;  // missing working days, 5 per day
    int sc3 = 0;  // isolated curriculum lectures, 2 per lecture
    int sc4 = 0;  // extra rooms used by a course, 1 per room

    int hard_total() const { return hc1 + hc2 + hc3 + hc4 + hc5; }
    int soft_total() const { return sc1 + sc2 + sc3 + sc4; }
    bool operator==(const ViolationReport&) const = default;
};

namespace detail {

inline void check_length(const Instance& inst, const Timetable& tt) {
    if (tt.size() != inst.num_events())
        throw std::invalid_argument("timetable has " + std::to_string(tt.size()) +
                                    " events, instance has " +
                                    std::to_string(inst.num_events()));
}

}  // namespace detail

/// Counts HC1-HC5. Works on partial timetables; each unassigned event adds
/// one HC1 violation so partial and full solutions stay comparable.
inline ViolationReport hard_violations(const Instance& inst, const Timetable& tt) {
    detail::check_length(inst, tt);
    ViolationReport rep;

    const int ppw = inst.periods_per_week();
    // Bucket assigned events by weekly period.
    std::vector<std::vector<int>> by_period(ppw);
    for (int e = 0; e < tt.size(); ++e) {
        if (!tt.assigned(e)) {
            ++rep.hc1;
            continue;
        }
        const RoomPeriod rp = inst.room_period_of_index(tt.event_slot[e]);
        by_period[rp.period_in_week].push_back(e);
        if (inst.unavailable(inst.event_course(e), rp.period_in_week)) ++rep.hc5;
    }

    for (const auto& bucket : by_period) {
        for (size_t i = 0; i < bucket.size(); ++i) {
            const int ei = bucket[i];
            const int ci = inst.event_course(ei);
            const int room_i = tt.event_slot[ei];  // same period, so slot equality = room equality
            for (size_t j = i + 1; j < bucket.size(); ++j) {
                const int ej = bucket[j];
                const int cj = inst.event_course(ej);
                // Same-course pairs belong to HC1; HC3/HC4 are between
                // distinct courses of one curriculum / one teacher.
                if (ci == cj) ++rep.hc1;
                if (tt.event_slot[ej] == room_i) ++rep.hc2;
                if (ci != cj && inst.share_curriculum(ci, cj)) ++rep.hc3;
                if (ci != cj && inst.teacher_of(ci) == inst.teacher_of(cj)) ++rep.hc4;
            }
        }
    }
    return rep;
}

/// Computes SC1-SC4 for a fully assigned timetable (hard feasibility is not
/// required). Throws std::invalid_argument if any event is unassigned.
inline ViolationReport soft_penalty(const Instance& inst, const Timetable& tt) {
    detail::check_length(inst, tt);
    if (!tt.fully_assigned())
        throw std::invalid_argument("soft penalty needs a fully assigned timetable");

    ViolationReport rep;
    const int n_courses = static_cast<int>(inst.courses().size());
    const int days = inst.days_in_week();
    const int ppd = inst.periods_per_day();

    // SC1: room capacity, per lecture.
    for (int e = 0; e < tt.size(); ++e) {
        const RoomPeriod rp = inst.room_period_of_index(tt.event_slot[e]);
        const int over =
            inst.courses()[inst.event_course(e)].students - inst.rooms()[rp.room].capacity;
        if (over > 0) rep.sc1 += over;
    }

    // SC2 (working days) and SC4 (room stability), per course.
    for (int c = 0; c < n_courses; ++c) {
        uint32_t day_mask = 0;
        std::vector<int> rooms_used;
        const int first = inst.course_first_event(c);
        for (int k = 0; k < inst.courses()[c].lectures; ++k) {
            const RoomPeriod rp = inst.room_period_of_index(tt.event_slot[first + k]);
            day_mask |= 1u << rp.day;
            rooms_used.push_back(rp.room);
        }
        const int distinct_days = __builtin_popcount(day_mask);
        if (distinct_days < inst.courses()[c].min_working_days)
            rep.sc2 += 5 * (inst.courses()[c].min_working_days - distinct_days);
        std::sort(rooms_used.begin(), rooms_used.end());
        const int distinct_rooms = static_cast<int>(
            std::unique(rooms_used.begin(), rooms_used.end()) - rooms_used.begin());
        if (distinct_rooms > 1) rep.sc4 += distinct_rooms - 1;
    }

    // SC3: isolated curriculum lectures. A lecture is isolated within a
    // curriculum if no other lecture of that curriculum sits in an adjacent
    // period of the same day; 2 points each, counted per curriculum.
    std::vector<uint32_t> day_occupancy(days);
    for (const Curriculum& q : inst.curricula()) {
        std::fill(day_occupancy.begin(), day_occupancy.end(), 0);
        std::vector<std::pair<int, int>> placements;  // (day, period_in_day)
        for (const std::string& cid : q.course_ids) {
            const int c = inst.course_index(cid);
            const int first = inst.course_first_event(c);
            for (int k = 0; k < inst.courses()[c].lectures; ++k) {
                const RoomPeriod rp = inst.room_period_of_index(tt.event_slot[first + k]);
                day_occupancy[rp.day] |= 1u << rp.period_in_day;
                placements.emplace_back(rp.day, rp.period_in_day);
            }
        }
        for (auto [day, period] : placements) {
            const bool before = period > 0 && (day_occupancy[day] & (1u << (period - 1)));
            const bool after = period + 1 < ppd && (day_occupancy[day] & (1u << (period + 1)));
            if (!before && !after) rep.sc3 += 2;
        }
    }
    return rep;
}

/// Full report: hard counts on any timetable, soft counts when fully assigned.
inline ViolationReport evaluate(const Instance& inst, const Timetable& tt) {
    ViolationReport rep = hard_violations(inst, tt);
    if (tt.fully_assigned()) {
        const ViolationReport soft = soft_penalty(inst, tt);
        rep.sc1 = soft.sc1;
        rep.sc2 = soft.sc2;
        rep.sc3 = soft.sc3;
        rep.sc4 = soft.sc4;
    }
    return rep;
}

/// Stage fitness, lower is better. Hard stage counts violations only; the
/// soft stage weights each hard violation by 1000 on top of the soft points.
inline long long fitness(const Instance& inst, const Timetable& tt, Stage stage) {
    if (stage == Stage::Hard) return hard_violations(inst, tt).hard_total();
    const ViolationReport rep = evaluate(inst, tt);
    return kHardWeight * rep.hard_total() + rep.soft_total();
}

inline bool is_feasible(const Instance& inst, const Timetable& tt) {
    return hard_violations(inst, tt).hard_total() == 0;
}

/// ITC-2007 solution text: one `<CourseID> <RoomID> <Day> <Period>` line per
/// assigned lecture, in event order.
inline std::string solution_to_text(const Instance& inst, const Timetable& tt) {
    detail::check_length(inst, tt);
    std::ostringstream out;
    for (int e = 0; e < tt.size(); ++e) {
        if (!tt.assigned(e)) continue;
        const RoomPeriod rp = inst.room_period_of_index(tt.event_slot[e]);
        out << inst.courses()[inst.event_course(e)].id << ' ' << inst.rooms()[rp.room].id << ' '
            << rp.day << ' ' << rp.period_in_day << '\n';
    }
    return out.str();
}

}  // namespace uctt
