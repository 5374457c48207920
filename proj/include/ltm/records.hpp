#pragma once
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ltm/memory_types.hpp"
#include "ltm/time.hpp"

namespace ltm {

// ---- Raw input records (market side) ----

struct PriceBar {
    std::string ticker;
    Timestamp timestamp;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    std::int64_t volume = 0;
};

struct NewsItem {
    std::string ticker;
    Timestamp timestamp;
    std::string headline;
    std::string body;
};

enum class TradeDirection { Buy, Sell };

const char* to_string(TradeDirection d);
TradeDirection direction_from_string(const std::string& s);

struct HoldingRecord {
    std::string fund;
    std::string ticker;
    Timestamp timestamp;
    std::int64_t shares = 0; // signed delta; sign must agree with direction
    TradeDirection direction = TradeDirection::Buy;
};

// ---- Agent-side records ----

enum class RiskProfile { Seeking, Neutral, Averse };

const char* to_string(RiskProfile r);
RiskProfile risk_from_string(const std::string& s);

struct TraderCharacter {
    std::string agent_id;
    RiskProfile risk = RiskProfile::Neutral;
    std::set<std::string> sectors;
    double initial_cash = 0.0;
};

// Ordered weakest-sell to strongest-buy; notch adjustments step along it.
enum class TradeAction {
    SigDecrease = 0,
    SlightDecrease = 1,
    Hold = 2,
    SlightIncrease = 3,
    SigIncrease = 4,
};

const char* to_string(TradeAction a);
TradeAction action_from_string(const std::string& s);
// The five verbatim phrases the chat-completion contract expects on line one.
const char* action_phrase(TradeAction a);
std::optional<TradeAction> action_from_phrase(const std::string& first_line);

// +1 for increases, -1 for decreases, 0 for hold.
inline int action_direction(TradeAction a) {
    if (a == TradeAction::Hold) return 0;
    return a > TradeAction::Hold ? 1 : -1;
}

// One step along the action ordering toward `direction`; saturates at the ends.
TradeAction step_action(TradeAction a, int direction);

struct Recommendation {
    TradeAction action = TradeAction::Hold;
    std::string rationale;
};

enum class ReflectionFlag { Immediate, Extended };

struct Reflection {
    ReflectionFlag flag = ReflectionFlag::Immediate;
    std::string agent_id;
    std::string ticker;        // immediate only
    Timestamp period_from;     // extended only
    Timestamp period_to;       // extended only
    Recommendation recommendation; // immediate only
    std::string rationale;
    std::int64_t trade_volume = 0;   // shares
    double realized_return = 0.0;    // fraction
    Timestamp timestamp;
};

enum class TradeSide { Buy, Sell };

const char* to_string(TradeSide s);
TradeSide side_from_string(const std::string& s);

struct TradeExecution {
    std::string agent_id;
    Timestamp timestamp;
    std::string ticker;
    TradeSide side = TradeSide::Buy;
    std::int64_t shares = 0; // always positive; side carries the sign
    double price = 0.0;
};

// ---- Debate records ----

struct SharedMemoryRef {
    std::string id;
    double gamma = 0.0;
    std::string text;
};

struct DebatePayload {
    std::vector<SharedMemoryRef> memories; // sender's top-K across layers
    TradeAction stance = TradeAction::Hold;
    double trade_value = 0.0;   // cash value the stance maps to
    std::int64_t volume = 0;    // executed shares (training); 0 pre-trade
    double realized_return = 0.0;
    std::string feedback;       // sender's feedback on the receiver's stance
    std::optional<TradeAction> revised_action;
};

struct DebateMessage {
    std::string session_id; // "<date>/<ticker>"
    int round = 1;
    std::string sender_id;
    std::string receiver_id;
    std::string ticker;
    Timestamp timestamp;
    DebatePayload payload;
};

} // namespace ltm
