#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bangoff {

// Control field bound: h_x(t) is restricted to {+M, 0, -M}.
inline constexpr double kControlBound = 4.0;

// Tolerance used when checking that a duration vector sums to the total
// duration. Looser than arithmetic precision because duration vectors
// typically arrive from an optimizer with accumulated round-off.
inline constexpr double kDurationSumTol = 1e-9;

enum class ControlLevel : std::uint8_t { P = 0, Off = 1, N = 2 };

double level_value(ControlLevel lev);   // +M, 0, -M
char level_char(ControlLevel lev);      // 'P', '0', 'N'
ControlLevel level_from_char(char c);
ControlLevel negated(ControlLevel lev); // P <-> N, 0 fixed

// A control type is the letter sequence over {P, 0, N} naming the segment
// values in time order. Adjacent letters must differ (equal neighbours would
// not be a switch). Switch count N_s = size() - 1.
struct ControlType {
    std::vector<ControlLevel> seq;

    ControlType() = default;
    explicit ControlType(std::vector<ControlLevel> s) : seq(std::move(s)) {}
    explicit ControlType(const std::string& letters);

    std::size_t size() const { return seq.size(); }
    int switch_count() const { return static_cast<int>(seq.size()) - 1; }
    std::string str() const;

    bool operator==(const ControlType& o) const { return seq == o.seq; }
    // Lexicographic with P < 0 < N (the enumeration order).
    bool operator<(const ControlType& o) const { return seq < o.seq; }
};

using DurationVector = std::vector<double>;

// A bang-off control field: type plus one duration per segment.
struct BangOffControl {
    ControlType type;
    DurationVector durations;

    double total_duration() const;
    std::size_t segments() const { return type.size(); }
};

// All valid types with exactly `ns` switches, in lexicographic order
// (P < 0 < N). There are 3 * 2^ns of them.
std::vector<ControlType> enumerate_types(int ns);

// Level of the segment containing time t. A switch instant belongs to the
// later segment, except t = T which belongs to the last.
ControlLevel field_at(const BangOffControl& control, double t);

// Remove zero-duration segments and merge equal adjacent levels (summing
// durations), repeated to fixpoint. The result generates the same evolution.
BangOffControl canonicalize(const BangOffControl& control);

// The transform h(t) -> -h(T - t): reverse segment order and negate levels.
BangOffControl flip(const BangOffControl& control);
ControlType flip_type(const ControlType& type);

// Pointwise negation h(t) -> -h(t).
BangOffControl negate(const BangOffControl& control);
ControlType negate_type(const ControlType& type);

// Returns an error description, or nullopt when the control is valid for the
// given total duration (nonnegative durations, matching lengths,
// adjacent-distinct levels, sum within kDurationSumTol of T).
std::optional<std::string> validation_error(const BangOffControl& control,
                                            double total_duration);

// Throwing variant of the above (std::invalid_argument).
void validate(const BangOffControl& control, double total_duration);

// Serialization: {"type": "P0N", "durations": [...], "total_duration": x}.
// Numbers survive a round trip bit-exactly.
nlohmann::json control_to_json(const BangOffControl& control);
BangOffControl control_from_json(const nlohmann::json& j);

} // namespace bangoff
