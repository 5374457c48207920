#pragma once
#include <string>

#include "json.hpp"
#include "ltm/memory_types.hpp"
#include "ltm/records.hpp"

namespace ltm {

// Wire schema for the JSON-lines logs and reports. Field names here are the
// on-disk contract covered by the golden-file tests; change them and the
// golden tests fail.

using json = nlohmann::ordered_json;

json to_json(const PriceBar& bar, std::uint64_t id);
json to_json(const NewsItem& item, std::uint64_t id);
json to_json(const HoldingRecord& record, std::uint64_t id);
PriceBar price_bar_from_json(const json& j);
NewsItem news_item_from_json(const json& j);
HoldingRecord holding_from_json(const json& j);

// Memory events are logged without their embedding; replay re-embeds the
// text through the run's deterministic provider.
json memory_event_to_json(const MemoryEvent& event);
MemoryEvent memory_event_from_json(const json& j); // embedding left empty

json reflection_to_json(const Reflection& r);
Reflection reflection_from_json(const json& j);

json debate_message_to_json(const DebateMessage& m);
DebateMessage debate_message_from_json(const json& j);

// Canonical double formatting shared by CSV and JSON emitters (shortest
// round-trip representation, via the JSON serializer).
std::string format_double(double v);

} // namespace ltm
