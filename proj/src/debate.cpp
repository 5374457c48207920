#include "ltm/debate.hpp"

#include <algorithm>

#include "ltm/errors.hpp"

namespace ltm {

std::optional<DebateSession> DebateCoordinator::convene(
    Timestamp date, const std::string& ticker, const std::vector<TradingAgent*>& agents,
    const std::map<std::string, Recommendation>& decisions) const {
    std::vector<std::string> eligible;
    for (const TradingAgent* agent : agents) {
        const bool holds = agent->portfolio().shares(ticker) > 0;
        bool traded_today = false;
        for (const auto& exec : agent->portfolio().ledger) {
            if (exec.ticker == ticker &&
                exec.timestamp.start_of_day() == date.start_of_day()) {
                traded_today = true;
                break;
            }
        }
        if ((holds || traded_today) && decisions.count(agent->id())) {
            eligible.push_back(agent->id());
        }
    }
    if (eligible.size() < 2) return std::nullopt;
    std::sort(eligible.begin(), eligible.end());

    DebateSession session;
    session.session_id = date.date_string() + "/" + ticker;
    session.date = date.start_of_day();
    session.ticker = ticker;
    session.participants = std::move(eligible);
    for (const auto& id : session.participants) {
        session.stances[id] = decisions.at(id);
    }
    return session;
}

std::vector<DebateMessage> DebateCoordinator::exchange_round(
    DebateSession& session, std::map<std::string, TradingAgent*>& agents,
    const std::map<std::string, DecisionContext>& contexts,
    const std::map<std::string, PackageFigures>& figures, Timestamp round_time) {
    if (session.rounds_completed >= config_.debate.max_rounds) {
        fail(ErrorCode::SchemaViolation,
             "session " + session.session_id + " already ran all rounds");
    }
    const int round = session.rounds_completed + 1;
    std::vector<DebateMessage> messages;

    for (const auto& sender_id : session.participants) {
        const DecisionContext& sender_ctx = contexts.at(sender_id);
        const Recommendation& sender_stance = session.stances.at(sender_id);
        TradingAgent* sender = agents.at(sender_id);

        // Shared package: the sender's retrieved memories across layers.
        std::vector<SharedMemoryRef> package;
        for (const auto& layer : sender_ctx.memories) {
            for (const auto& scored : layer) {
                package.push_back(
                    SharedMemoryRef{scored.event.id, scored.score.gamma, scored.event.text});
            }
        }
        const auto fig = figures.count(sender_id) ? figures.at(sender_id) : PackageFigures{};
        const double close = sender_ctx.close();
        const double trade_value = action_trade_value(
            sender_stance.action, sender->portfolio(), session.ticker, close, config_.sizing);

        for (const auto& receiver_id : session.participants) {
            if (receiver_id == sender_id) continue;
            std::string feedback;
            try {
                feedback = core_.feedback(sender_ctx, sender_stance, receiver_id,
                                          session.stances.at(receiver_id).action);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::CoreUnavailable) throw;
                continue; // sender abstains this round
            }
            DebateMessage message;
            message.session_id = session.session_id;
            message.round = round;
            message.sender_id = sender_id;
            message.receiver_id = receiver_id;
            message.ticker = session.ticker;
            message.timestamp = round_time;
            message.payload.memories = package;
            message.payload.stance = sender_stance.action;
            message.payload.trade_value = trade_value;
            message.payload.volume = fig.volume;
            message.payload.realized_return = fig.realized_return;
            message.payload.feedback = feedback;
            store_.add_debate(message);
            messages.push_back(message);

            agents.at(receiver_id)
                ->remember(MemoryOrigin::DebateFeedback,
                           "[" + session.session_id + " r" + std::to_string(round) + "] " +
                               sender_id + ": " + feedback,
                           round_time);
        }
    }
    session.rounds_completed = round;
    return messages;
}

std::map<std::string, Recommendation> DebateCoordinator::finalize(
    DebateSession& session, const std::map<std::string, DecisionContext>& contexts) {
    if (session.rounds_completed < config_.debate.max_rounds) {
        fail(ErrorCode::SchemaViolation,
             "session " + session.session_id + " finalized before all rounds ran");
    }
    for (const auto& agent_id : session.participants) {
        std::vector<TradeAction> peer_stances;
        for (const auto& peer_id : session.participants) {
            if (peer_id != agent_id) peer_stances.push_back(session.stances.at(peer_id).action);
        }
        session.revised[agent_id] =
            core_.revise(contexts.at(agent_id), session.stances.at(agent_id), peer_stances);
    }
    return session.revised;
}

} // namespace ltm
