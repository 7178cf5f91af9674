#include "bangoff/control.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace bangoff {

namespace {
constexpr ControlLevel kLevelOrder[3] = {ControlLevel::P, ControlLevel::Off,
                                         ControlLevel::N};
}

double level_value(ControlLevel lev) {
    switch (lev) {
    case ControlLevel::P: return kControlBound;
    case ControlLevel::Off: return 0.0;
    case ControlLevel::N: return -kControlBound;
    }
    throw std::logic_error("invalid ControlLevel");
}

char level_char(ControlLevel lev) {
    switch (lev) {
    case ControlLevel::P: return 'P';
    case ControlLevel::Off: return '0';
    case ControlLevel::N: return 'N';
    }
    throw std::logic_error("invalid ControlLevel");
}

ControlLevel level_from_char(char c) {
    switch (c) {
    case 'P': case 'p': return ControlLevel::P;
    case '0': case 'o': return ControlLevel::Off;
    case 'N': case 'n': return ControlLevel::N;
    default:
        throw std::invalid_argument(std::string("invalid control letter '") + c +
                                    "' (expected P, 0 or N)");
    }
}

ControlLevel negated(ControlLevel lev) {
    switch (lev) {
    case ControlLevel::P: return ControlLevel::N;
    case ControlLevel::Off: return ControlLevel::Off;
    case ControlLevel::N: return ControlLevel::P;
    }
    throw std::logic_error("invalid ControlLevel");
}

ControlType::ControlType(const std::string& letters) {
    seq.reserve(letters.size());
    for (char c : letters) seq.push_back(level_from_char(c));
}

std::string ControlType::str() const {
    std::string s;
    s.reserve(seq.size());
    for (ControlLevel lev : seq) s.push_back(level_char(lev));
    return s;
}

double BangOffControl::total_duration() const {
    double sum = 0.0;
    for (double d : durations) sum += d;
    return sum;
}

std::vector<ControlType> enumerate_types(int ns) {
    if (ns < 0) throw std::invalid_argument("switch count must be >= 0");
    std::vector<ControlType> out;
    out.reserve(std::size_t(3) << ns);
    std::vector<ControlLevel> seq;
    seq.reserve(std::size_t(ns) + 1);
    auto rec = [&](auto&& self, int remaining) -> void {
        if (remaining == 0) {
            out.emplace_back(seq);
            return;
        }
        for (ControlLevel lev : kLevelOrder) {
            if (!seq.empty() && lev == seq.back()) continue;
            seq.push_back(lev);
            self(self, remaining - 1);
            seq.pop_back();
        }
    };
    rec(rec, ns + 1);
    return out;
}

ControlLevel field_at(const BangOffControl& control, double t) {
    const double T = control.total_duration();
    if (!(t >= 0.0 && t <= T))
        throw std::out_of_range("field_at: t outside [0, T]");
    double edge = 0.0;
    for (std::size_t k = 0; k + 1 < control.durations.size(); ++k) {
        edge += control.durations[k];
        if (t < edge) return control.type.seq[k];
    }
    return control.type.seq.back(); // last segment owns its closing endpoint
}

BangOffControl canonicalize(const BangOffControl& control) {
    BangOffControl cur = control;
    for (;;) {
        BangOffControl next;
        for (std::size_t k = 0; k < cur.type.seq.size(); ++k) {
            if (cur.durations[k] == 0.0) continue;
            if (!next.type.seq.empty() && next.type.seq.back() == cur.type.seq[k]) {
                next.durations.back() += cur.durations[k];
            } else {
                next.type.seq.push_back(cur.type.seq[k]);
                next.durations.push_back(cur.durations[k]);
            }
        }
        if (next.type.seq.empty()) {
            // all segments zero: represent as a single zero segment of the
            // first original level (or Off for an empty input)
            ControlLevel lev = cur.type.seq.empty() ? ControlLevel::Off : cur.type.seq[0];
            next.type.seq = {lev};
            next.durations = {0.0};
        }
        if (next.type.seq == cur.type.seq) return next;
        cur = std::move(next);
    }
}

ControlType flip_type(const ControlType& type) {
    ControlType out;
    out.seq.reserve(type.seq.size());
    for (auto it = type.seq.rbegin(); it != type.seq.rend(); ++it)
        out.seq.push_back(negated(*it));
    return out;
}

BangOffControl flip(const BangOffControl& control) {
    BangOffControl out;
    out.type = flip_type(control.type);
    out.durations.assign(control.durations.rbegin(), control.durations.rend());
    return out;
}

ControlType negate_type(const ControlType& type) {
    ControlType out;
    out.seq.reserve(type.seq.size());
    for (ControlLevel lev : type.seq) out.seq.push_back(negated(lev));
    return out;
}

BangOffControl negate(const BangOffControl& control) {
    return BangOffControl{negate_type(control.type), control.durations};
}

std::optional<std::string> validation_error(const BangOffControl& control,
                                            double total_duration) {
    if (control.type.seq.empty())
        return "control has no segments";
    if (control.type.seq.size() != control.durations.size())
        return "type and duration vector lengths differ";
    for (std::size_t k = 0; k + 1 < control.type.seq.size(); ++k)
        if (control.type.seq[k] == control.type.seq[k + 1])
            return std::string("adjacent equal levels at segment ") + std::to_string(k);
    for (std::size_t k = 0; k < control.durations.size(); ++k)
        if (!(control.durations[k] >= 0.0))
            return std::string("negative duration at segment ") + std::to_string(k);
    const double sum = control.total_duration();
    if (std::abs(sum - total_duration) > kDurationSumTol)
        return "durations sum to " + std::to_string(sum) + ", expected " +
               std::to_string(total_duration);
    return std::nullopt;
}

void validate(const BangOffControl& control, double total_duration) {
    if (auto err = validation_error(control, total_duration))
        throw std::invalid_argument("invalid control: " + *err);
}

nlohmann::json control_to_json(const BangOffControl& control) {
    return nlohmann::json{{"type", control.type.str()},
                          {"durations", control.durations},
                          {"total_duration", control.total_duration()}};
}

BangOffControl control_from_json(const nlohmann::json& j) {
    BangOffControl c;
    c.type = ControlType(j.at("type").get<std::string>());
    c.durations = j.at("durations").get<std::vector<double>>();
    const double T = j.at("total_duration").get<double>();
    validate(c, T);
    return c;
}

} // namespace bangoff
