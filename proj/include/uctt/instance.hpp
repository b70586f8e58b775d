#pragma once

// Problem model for curriculum-based course timetabling (ITC-2007 track 3).
// An Instance is immutable after construction and safe to share across threads.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace uctt {

struct Course {
    std::string id;
    std::string teacher;
    int lectures = 0;          // weekly lectures, >= 1
    int min_working_days = 0;  // >= 1, <= days_in_week
    int students = 0;
    bool operator==(const Course&) const = default;
};

struct Room {
    std::string id;
    int capacity = 0;
    bool operator==(const Room&) const = default;
};

struct Curriculum {
    std::string id;
    std::vector<std::string> course_ids;  // as listed in the file, no duplicates
    bool operator==(const Curriculum&) const = default;
};

struct Unavailability {
    std::string course_id;
    int day = 0;
    int period = 0;  // period within the day
    bool operator==(const Unavailability&) const = default;
};

// One room at one weekly period. Flat index ordering is room-major:
// flat = room * periods_per_week + period_in_week.
struct RoomPeriod {
    int room = 0;
    int day = 0;
    int period_in_day = 0;
    int period_in_week = 0;
    bool operator==(const RoomPeriod&) const = default;
};

/// Thrown by the .ctt parser; carries the 1-based line the problem was found on.
class parse_error : public std::runtime_error {
public:
    parse_error(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Parsed timetabling problem plus derived lookup tables.
///
/// The event list is fixed as file-order of courses, then lecture index:
/// a course with k lectures contributes k consecutive events.
class Instance {
public:
    /// Validates the parts, computes derived tables, and freezes the result.
    /// Throws std::invalid_argument on any broken invariant (duplicate ids,
    /// dangling references, out-of-grid days/periods, non-positive counts).
    static Instance from_parts(std::string name, std::vector<Course> courses,
                               std::vector<Room> rooms, std::vector<Curriculum> curricula,
                               std::vector<Unavailability> unavailabilities, int days_in_week,
                               int periods_per_day) {
        Instance inst;
        inst.name_ = std::move(name);
        inst.courses_ = std::move(courses);
        inst.rooms_ = std::move(rooms);
        inst.curricula_ = std::move(curricula);
        inst.unavailabilities_ = std::move(unavailabilities);
        inst.days_in_week_ = days_in_week;
        inst.periods_per_day_ = periods_per_day;
        inst.validate_and_freeze();
        return inst;
    }

    const std::string& name() const { return name_; }
    const std::vector<Course>& courses() const { return courses_; }
    const std::vector<Room>& rooms() const { return rooms_; }
    const std::vector<Curriculum>& curricula() const { return curricula_; }
    const std::vector<Unavailability>& unavailabilities() const { return unavailabilities_; }
    int days_in_week() const { return days_in_week_; }
    int periods_per_day() const { return periods_per_day_; }
    int periods_per_week() const { return days_in_week_ * periods_per_day_; }

    /// Total lectures across all courses; the genome length of both encodings.
    int num_events() const { return num_events_; }

    /// Room count * days * periods per day; the soft-genome allele range.
    int num_room_period_pairs() const {
        return static_cast<int>(rooms_.size()) * periods_per_week();
    }

    int event_course(int event) const { return event_course_[event]; }
    int course_first_event(int course) const { return course_first_event_[course]; }
    int teacher_of(int course) const { return course_teacher_[course]; }
    int num_teachers() const { return num_teachers_; }

    bool share_curriculum(int course_a, int course_b) const {
        return curriculum_conflict_[course_a * courses_.size() + course_b] != 0;
    }

    /// True if the course may not be taught in the given weekly period (HC5).
    bool unavailable(int course, int period_in_week) const {
        return unavailable_[course * periods_per_week() + period_in_week] != 0;
    }

    RoomPeriod room_period_of_index(int flat_index) const {
        if (flat_index < 0 || flat_index >= num_room_period_pairs())
            throw std::out_of_range("room-period index " + std::to_string(flat_index) +
                                    " outside [0, " + std::to_string(num_room_period_pairs()) +
                                    ")");
        const int ppw = periods_per_week();
        RoomPeriod rp;
        rp.room = flat_index / ppw;
        rp.period_in_week = flat_index % ppw;
        rp.day = rp.period_in_week / periods_per_day_;
        rp.period_in_day = rp.period_in_week % periods_per_day_;
        return rp;
    }

    int flat_index(const RoomPeriod& rp) const {
        return rp.room * periods_per_week() + rp.period_in_week;
    }

    int flat_index(int room, int period_in_week) const {
        return room * periods_per_week() + period_in_week;
    }

    int course_index(const std::string& id) const {
        auto it = course_by_id_.find(id);
        if (it == course_by_id_.end())
            throw std::invalid_argument("unknown course id '" + id + "'");
        return it->second;
    }

    /// Structural identity over the raw parts (derived tables follow from them).
    bool operator==(const Instance& other) const {
        return name_ == other.name_ && courses_ == other.courses_ && rooms_ == other.rooms_ &&
               curricula_ == other.curricula_ && unavailabilities_ == other.unavailabilities_ &&
               days_in_week_ == other.days_in_week_ && periods_per_day_ == other.periods_per_day_;
    }

private:
    Instance() = default;

    void validate_and_freeze() {
        if (days_in_week_ < 1) throw std::invalid_argument("days_in_week must be positive");
        if (periods_per_day_ < 1) throw std::invalid_argument("periods_per_day must be positive");

        course_by_id_.clear();
        for (size_t i = 0; i < courses_.size(); ++i) {
            const Course& c = courses_[i];
            if (!course_by_id_.emplace(c.id, static_cast<int>(i)).second)
                throw std::invalid_argument("duplicate course id '" + c.id + "'");
            if (c.lectures < 1)
                throw std::invalid_argument("course '" + c.id + "' must have at least 1 lecture");
            if (c.min_working_days < 1 || c.min_working_days > days_in_week_)
                throw std::invalid_argument("course '" + c.id +
                                            "' min working days outside [1, days_in_week]");
            if (c.students < 0)
                throw std::invalid_argument("course '" + c.id + "' has negative students");
        }

        std::unordered_set<std::string> seen;
        for (const Room& r : rooms_) {
            if (!seen.insert(r.id).second)
                throw std::invalid_argument("duplicate room id '" + r.id + "'");
            if (r.capacity < 0)
                throw std::invalid_argument("room '" + r.id + "' has negative capacity");
        }

        seen.clear();
        for (const Curriculum& q : curricula_) {
            if (!seen.insert(q.id).second)
                throw std::invalid_argument("duplicate curriculum id '" + q.id + "'");
            std::unordered_set<std::string> members;
            for (const std::string& cid : q.course_ids) {
                if (course_by_id_.find(cid) == course_by_id_.end())
                    throw std::invalid_argument("curriculum '" + q.id +
                                                "' references unknown course '" + cid + "'");
                if (!members.insert(cid).second)
                    throw std::invalid_argument("curriculum '" + q.id + "' lists course '" + cid +
                                                "' twice");
            }
        }

        for (const Unavailability& u : unavailabilities_) {
            if (course_by_id_.find(u.course_id) == course_by_id_.end())
                throw std::invalid_argument("unavailability references unknown course '" +
                                            u.course_id + "'");
            if (u.day < 0 || u.day >= days_in_week_ || u.period < 0 ||
                u.period >= periods_per_day_)
                throw std::invalid_argument("unavailability for '" + u.course_id +
                                            "' outside the day/period grid");
        }

        // Event list: course file order, then lecture index.
        const int n_courses = static_cast<int>(courses_.size());
        num_events_ = 0;
        course_first_event_.assign(n_courses, 0);
        event_course_.clear();
        for (int c = 0; c < n_courses; ++c) {
            course_first_event_[c] = num_events_;
            num_events_ += courses_[c].lectures;
            event_course_.insert(event_course_.end(), courses_[c].lectures, c);
        }

        // Teacher interning.
        std::unordered_map<std::string, int> teacher_ids;
        course_teacher_.assign(n_courses, 0);
        for (int c = 0; c < n_courses; ++c) {
            auto [it, inserted] =
                teacher_ids.emplace(courses_[c].teacher, static_cast<int>(teacher_ids.size()));
            course_teacher_[c] = it->second;
        }
        num_teachers_ = static_cast<int>(teacher_ids.size());

        // Pairwise curriculum conflicts (course level).
        curriculum_conflict_.assign(static_cast<size_t>(n_courses) * n_courses, 0);
        for (const Curriculum& q : curricula_) {
            std::vector<int> members;
            members.reserve(q.course_ids.size());
            for (const std::string& cid : q.course_ids) members.push_back(course_by_id_[cid]);
            for (size_t i = 0; i < members.size(); ++i)
                for (size_t j = i + 1; j < members.size(); ++j) {
                    curriculum_conflict_[members[i] * n_courses + members[j]] = 1;
                    curriculum_conflict_[members[j] * n_courses + members[i]] = 1;
                }
        }

        // Unavailability grid, deduplicated.
        unavailable_.assign(static_cast<size_t>(n_courses) * periods_per_week(), 0);
        for (const Unavailability& u : unavailabilities_) {
            const int course = course_by_id_[u.course_id];
            const int pw = u.day * periods_per_day_ + u.period;
            unavailable_[course * periods_per_week() + pw] = 1;
        }
    }

    std::string name_;
    std::vector<Course> courses_;
    std::vector<Room> rooms_;
    std::vector<Curriculum> curricula_;
    std::vector<Unavailability> unavailabilities_;
    int days_in_week_ = 0;
    int periods_per_day_ = 0;

    int num_events_ = 0;
    int num_teachers_ = 0;
    std::vector<int> event_course_;
    std::vector<int> course_first_event_;
    std::vector<int> course_teacher_;
    std::vector<uint8_t> curriculum_conflict_;
    std::vector<uint8_t> unavailable_;
    std::unordered_map<std::string, int> course_by_id_;
};

namespace detail {

struct CttCursor {
    std::vector<std::pair<int, std::string>> lines;  // (1-based line number, content)
    size_t pos = 0;
    int last_line = 1;

    explicit CttCursor(std::string_view text) {
        int number = 0;
        size_t start = 0;
        while (start <= text.size()) {
            size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            ++number;
            std::string line(text.substr(start, end - start));
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos) lines.emplace_back(number, line);
            if (end == text.size()) break;
            start = end + 1;
        }
        if (number == 0) number = 1;
        last_line = number;
    }

    bool done() const { return pos >= lines.size(); }
    int line_number() const { return done() ? last_line : lines[pos].first; }

    std::vector<std::string> next_tokens(const char* what) {
        if (done()) throw parse_error(last_line, std::string("unexpected end of file, expected ") + what);
        std::istringstream in(lines[pos].second);
        std::vector<std::string> toks;
        std::string t;
        while (in >> t) toks.push_back(t);
        ++pos;
        return toks;
    }

    // Next line without consuming it, tokenized.
    std::vector<std::string> peek_tokens() const {
        std::vector<std::string> toks;
        if (done()) return toks;
        std::istringstream in(lines[pos].second);
        std::string t;
        while (in >> t) toks.push_back(t);
        return toks;
    }
};

inline int parse_int(const std::string& tok, int line, const char* what) {
    size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(tok, &used);
    } catch (const std::exception&) {
        throw parse_error(line, std::string("expected integer ") + what + ", got '" + tok + "'");
    }
    if (used != tok.size())
        throw parse_error(line, std::string("expected integer ") + what + ", got '" + tok + "'");
    return value;
}

inline int parse_header_int(CttCursor& cur, const std::string& key) {
    const int line = cur.line_number();
    auto toks = cur.next_tokens(key.c_str());
    if (toks.size() != 2 || toks[0] != key)
        throw parse_error(line, "expected '" + key + " <value>' header");
    return parse_int(toks[1], line, key.c_str());
}

inline void expect_section(CttCursor& cur, const std::string& header) {
    const int line = cur.line_number();
    auto toks = cur.next_tokens(header.c_str());
    if (toks.size() != 1 || toks[0] != header)
        throw parse_error(line, "expected '" + header + "' section header");
}

inline bool is_section_header(const std::vector<std::string>& toks) {
    if (toks.size() != 1) return false;
    const std::string& t = toks[0];
    return t == "COURSES:" || t == "ROOMS:" || t == "CURRICULA:" ||
           t == "UNAVAILABILITY_CONSTRAINTS:" || t == "END.";
}

}  // namespace detail

/// Parses the full contents of an ITC-2007 curriculum-based .ctt file.
/// Throws parse_error with a 1-based line number on any malformed input,
/// declared-vs-actual count mismatch, dangling reference, or out-of-grid slot.
inline Instance parse_instance(std::string_view text) {
    using namespace detail;
    CttCursor cur(text);
    if (cur.done()) throw parse_error(1, "expected 'Name:' header");

    int line = cur.line_number();
    auto name_toks = cur.next_tokens("Name:");
    if (name_toks.size() != 2 || name_toks[0] != "Name:")
        throw parse_error(line, "expected 'Name: <name>' header");
    const std::string name = name_toks[1];

    const int n_courses = parse_header_int(cur, "Courses:");
    const int n_rooms = parse_header_int(cur, "Rooms:");
    const int n_days = parse_header_int(cur, "Days:");
    const int n_periods = parse_header_int(cur, "Periods_per_day:");
    const int n_curricula = parse_header_int(cur, "Curricula:");
    const int n_constraints = parse_header_int(cur, "Constraints:");
    for (auto [count, what] : {std::pair{n_courses, "Courses"}, {n_rooms, "Rooms"},
                               {n_curricula, "Curricula"}, {n_constraints, "Constraints"}})
        if (count < 0) throw parse_error(cur.line_number(), std::string(what) + " count is negative");
    if (n_days < 1) throw parse_error(cur.line_number(), "Days must be positive");
    if (n_periods < 1) throw parse_error(cur.line_number(), "Periods_per_day must be positive");

    expect_section(cur, "COURSES:");
    std::vector<Course> courses;
    courses.reserve(n_courses);
    for (int i = 0; i < n_courses; ++i) {
        line = cur.line_number();
        if (is_section_header(cur.peek_tokens()))
            throw parse_error(line, "declared " + std::to_string(n_courses) + " courses, found " +
                                        std::to_string(i));
        auto toks = cur.next_tokens("course line");
        if (toks.size() != 5)
            throw parse_error(line,
                              "course line needs '<id> <teacher> <lectures> <minDays> <students>'");
        Course c;
        c.id = toks[0];
        c.teacher = toks[1];
        c.lectures = parse_int(toks[2], line, "lecture count");
        c.min_working_days = parse_int(toks[3], line, "min working days");
        c.students = parse_int(toks[4], line, "student count");
        if (c.lectures < 1) throw parse_error(line, "course '" + c.id + "' needs >= 1 lecture");
        if (c.min_working_days < 1 || c.min_working_days > n_days)
            throw parse_error(line, "course '" + c.id + "' min working days outside [1, " +
                                        std::to_string(n_days) + "]");
        if (c.students < 0) throw parse_error(line, "negative student count");
        courses.push_back(std::move(c));
    }

    expect_section(cur, "ROOMS:");
    std::vector<Room> rooms;
    rooms.reserve(n_rooms);
    for (int i = 0; i < n_rooms; ++i) {
        line = cur.line_number();
        if (is_section_header(cur.peek_tokens()))
            throw parse_error(line, "declared " + std::to_string(n_rooms) + " rooms, found " +
                                        std::to_string(i));
        auto toks = cur.next_tokens("room line");
        if (toks.size() != 2) throw parse_error(line, "room line needs '<id> <capacity>'");
        Room r;
        r.id = toks[0];
        r.capacity = parse_int(toks[1], line, "capacity");
        if (r.capacity < 0) throw parse_error(line, "negative room capacity");
        rooms.push_back(std::move(r));
    }

    std::unordered_set<std::string> known_courses;
    for (const Course& c : courses) known_courses.insert(c.id);

    expect_section(cur, "CURRICULA:");
    std::vector<Curriculum> curricula;
    curricula.reserve(n_curricula);
    for (int i = 0; i < n_curricula; ++i) {
        line = cur.line_number();
        if (is_section_header(cur.peek_tokens()))
            throw parse_error(line, "declared " + std::to_string(n_curricula) +
                                        " curricula, found " + std::to_string(i));
        auto toks = cur.next_tokens("curriculum line");
        if (toks.size() < 2)
            throw parse_error(line, "curriculum line needs '<id> <#courses> <courseId>...'");
        Curriculum q;
        q.id = toks[0];
        const int member_count = parse_int(toks[1], line, "course count");
        if (member_count < 0) throw parse_error(line, "negative curriculum course count");
        if (static_cast<int>(toks.size()) != 2 + member_count)
            throw parse_error(line, "curriculum '" + q.id + "' declares " +
                                        std::to_string(member_count) + " courses but lists " +
                                        std::to_string(toks.size() - 2));
        q.course_ids.assign(toks.begin() + 2, toks.end());
        for (const std::string& cid : q.course_ids)
            if (!known_courses.count(cid))
                throw parse_error(line, "curriculum '" + q.id + "' references unknown course '" +
                                            cid + "'");
        curricula.push_back(std::move(q));
    }

    expect_section(cur, "UNAVAILABILITY_CONSTRAINTS:");
    std::vector<Unavailability> unavailabilities;
    unavailabilities.reserve(n_constraints);
    for (int i = 0; i < n_constraints; ++i) {
        line = cur.line_number();
        if (is_section_header(cur.peek_tokens()))
            throw parse_error(line, "declared " + std::to_string(n_constraints) +
                                        " constraints, found " + std::to_string(i));
        auto toks = cur.next_tokens("unavailability line");
        if (toks.size() != 3)
            throw parse_error(line, "unavailability line needs '<courseId> <day> <period>'");
        Unavailability u;
        u.course_id = toks[0];
        u.day = parse_int(toks[1], line, "day");
        u.period = parse_int(toks[2], line, "period");
        if (!known_courses.count(u.course_id))
            throw parse_error(line, "unavailability references unknown course '" + u.course_id + "'");
        if (u.day < 0 || u.day >= n_days || u.period < 0 || u.period >= n_periods)
            throw parse_error(line, "unavailability for '" + u.course_id +
                                        "' outside the day/period grid");
        unavailabilities.push_back(std::move(u));
    }

    line = cur.line_number();
    auto end_toks = cur.next_tokens("END.");
    if (end_toks.size() != 1 || end_toks[0] != "END.") {
        if (is_section_header(end_toks))
            throw parse_error(line, "section count mismatch: unexpected '" + end_toks[0] + "'");
        throw parse_error(line, "expected 'END.' terminator");
    }
    if (!cur.done()) throw parse_error(cur.line_number(), "content after 'END.'");

    try {
        return Instance::from_parts(name, std::move(courses), std::move(rooms),
                                    std::move(curricula), std::move(unavailabilities), n_days,
                                    n_periods);
    } catch (const std::invalid_argument& e) {
        // Cross-reference problems (dangling ids) surface here; point at the file as a whole.
        throw parse_error(1, e.what());
    }
}

/// Canonical .ctt serialization; parse(to_ctt(i)) is structurally identical to i.
inline std::string to_ctt(const Instance& inst) {
    std::ostringstream out;
    out << "Name: " << inst.name() << '\n';
    out << "Courses: " << inst.courses().size() << '\n';
    out << "Rooms: " << inst.rooms().size() << '\n';
    out << "Days: " << inst.days_in_week() << '\n';
    out << "Periods_per_day: " << inst.periods_per_day() << '\n';
    out << "Curricula: " << inst.curricula().size() << '\n';
    out << "Constraints: " << inst.unavailabilities().size() << '\n';
    out << "\nCOURSES:\n";
    for (const Course& c : inst.courses())
        out << c.id << ' ' << c.teacher << ' ' << c.lectures << ' ' << c.min_working_days << ' '
            << c.students << '\n';
    out << "\nROOMS:\n";
    for (const Room& r : inst.rooms()) out << r.id << ' ' << r.capacity << '\n';
    out << "\nCURRICULA:\n";
    for (const Curriculum& q : inst.curricula()) {
        out << q.id << ' ' << q.course_ids.size();
        for (const std::string& cid : q.course_ids) out << ' ' << cid;
        out << '\n';
    }
    out << "\nUNAVAILABILITY_CONSTRAINTS:\n";
    for (const Unavailability& u : inst.unavailabilities())
        out << u.course_id << ' ' << u.day << ' ' << u.period << '\n';
    out << "\nEND.\n";
    return out.str();
}

}  // namespace uctt
