#include <cstdio>
#include <string>

#include "ltm/decision.hpp"
#include "ltm/json_io.hpp"

namespace ltm {

const char* const kPromptTemplateVersion = "prompts-v1";

namespace {

// Template texts. {placeholders} expand via expand(); everything else is
// emitted verbatim so identical contexts render identical prompts.

constexpr const char* kHeaderTemplate =
    "You are a {risk} trading agent (id {agent_id}) covering sectors {sectors}.\n"
    "Ticker: {ticker}  Date: {date}\n";

constexpr const char* kMemoriesHeader =
    "Top-ranked memories per layer (score 0-120):\n";

constexpr const char* kTrainFactsHeader =
    "Market facts (training: closing price and fund trading records):\n";

constexpr const char* kTestFactsHeader =
    "Market facts (testing: closing price only):\n";

constexpr const char* kReflectionWindowHeader =
    "Prior-week reflections and peer feedback:\n";

constexpr const char* kDecisionInstruction =
    "Decide the position adjustment. Reply with exactly one of:\n"
    "significantly increase position\n"
    "slightly increase position\n"
    "hold\n"
    "slightly decrease position\n"
    "significantly decrease position\n"
    "on the first line, then your reasoning.\n";

constexpr const char* kDebateInstruction =
    "You are debating peers who traded the same ticker today. Weigh their "
    "shared memories and reflections against your own before finalizing.\n";

std::string expand(std::string text, const std::string& key, const std::string& value) {
    const std::string token = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
    return text;
}

std::string fixed(double v, int digits = 2) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

} // namespace

std::string render_prompt(const DecisionContext& ctx, PromptPhase phase) {
    std::string sectors;
    for (const auto& s : ctx.character.sectors) {
        if (!sectors.empty()) sectors += ",";
        sectors += s;
    }
    std::string out = kHeaderTemplate;
    out = expand(out, "risk", to_string(ctx.character.risk));
    out = expand(out, "agent_id", ctx.character.agent_id);
    out = expand(out, "sectors", sectors);
    out = expand(out, "ticker", ctx.ticker);
    out = expand(out, "date", ctx.date.date_string());

    out += kMemoriesHeader;
    for (LayerKind layer : kAllLayers) {
        out += std::string("[") + to_string(layer) + "]\n";
        const auto& events = ctx.memories[static_cast<int>(layer)];
        if (events.empty()) {
            out += "  (none)\n";
            continue;
        }
        for (const auto& scored : events) {
            out += "  (" + fixed(scored.score.gamma) + ") " +
                   scored.event.timestamp.date_string() + " " + scored.event.text + "\n";
        }
    }

    out += phase == PromptPhase::Train ? kTrainFactsHeader : kTestFactsHeader;
    out += "  close " + ctx.ticker + " = " + fixed(ctx.close(), 4) + "\n";
    if (phase == PromptPhase::Train) {
        for (const auto& h : ctx.fund_records) {
            out += "  fund " + h.fund + " " + to_string(h.direction) + " " +
                   std::to_string(h.shares < 0 ? -h.shares : h.shares) + " " + h.ticker + "\n";
        }
    }

    if (!ctx.recent_reflections.empty() || !ctx.recent_feedback.empty()) {
        out += kReflectionWindowHeader;
        for (const auto& r : ctx.recent_reflections) {
            out += "  " + r.timestamp.date_string() + " " +
                   (r.flag == ReflectionFlag::Immediate ? "immediate" : "extended") + ": " +
                   r.rationale + "\n";
        }
        for (const auto& m : ctx.recent_feedback) {
            out += "  " + m.timestamp.date_string() + " from " + m.sender_id + ": " +
                   m.payload.feedback + "\n";
        }
    }

    if (phase == PromptPhase::Debate) out += kDebateInstruction;
    out += kDecisionInstruction;
    return out;
}

} // namespace ltm
