#include "ltm/agent.hpp"

#include <cmath>
#include <cstdio>

#include "ltm/errors.hpp"

namespace ltm {

LayerKind assign_layer(MemoryOrigin origin) {
    switch (origin) {
        case MemoryOrigin::MacroIndicator: return LayerKind::Long;
        case MemoryOrigin::StrategyDoc: return LayerKind::Middle;
        case MemoryOrigin::ExtendedReflection: return LayerKind::Middle;
        case MemoryOrigin::MarketNews:
        case MemoryOrigin::ImmediateReflection:
        case MemoryOrigin::DebateFeedback:
        case MemoryOrigin::TradeOutcome: return LayerKind::Short;
    }
    return LayerKind::Short;
}

namespace {

std::string fixed(double v, int digits = 2) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

} // namespace

double action_trade_value(TradeAction action, const PortfolioState& portfolio,
                          const std::string& ticker, double price, const TradeSizing& sizing) {
    switch (action) {
        case TradeAction::SigIncrease: return portfolio.cash * sizing.significant;
        case TradeAction::SlightIncrease: return portfolio.cash * sizing.slight;
        case TradeAction::SigDecrease:
            return static_cast<double>(portfolio.shares(ticker)) * sizing.significant * price;
        case TradeAction::SlightDecrease:
            return static_cast<double>(portfolio.shares(ticker)) * sizing.slight * price;
        case TradeAction::Hold: return 0.0;
    }
    return 0.0;
}

void PortfolioState::apply(const TradeExecution& exec) {
    const double value = static_cast<double>(exec.shares) * exec.price;
    Position& pos = positions[exec.ticker];
    if (exec.side == TradeSide::Buy) {
        pos.cost_basis = (pos.cost_basis * static_cast<double>(pos.shares) + value) /
                         static_cast<double>(pos.shares + exec.shares);
        pos.shares += exec.shares;
        cash -= value;
    } else {
        pos.shares -= exec.shares;
        cash += value;
        if (pos.shares == 0) pos.cost_basis = 0.0;
    }
    ledger.push_back(exec);
}

ExecutionResult execute_recommendation(TradeAction action, PortfolioState& portfolio,
                                       const std::string& agent_id, const std::string& ticker,
                                       double price, Timestamp when,
                                       const TradeSizing& sizing) {
    if (price <= 0.0) {
        fail(ErrorCode::SchemaViolation, "non-positive execution price for " + ticker);
    }
    if (action == TradeAction::Hold) {
        return ExecutionResult{std::nullopt, "hold"};
    }

    if (action_direction(action) > 0) {
        const double fraction =
            action == TradeAction::SigIncrease ? sizing.significant : sizing.slight;
        const double budget = portfolio.cash * fraction;
        const auto shares = static_cast<std::int64_t>(std::floor(budget / price));
        if (shares < 1) {
            return ExecutionResult{std::nullopt, "insufficient cash"};
        }
        TradeExecution exec{agent_id, when, ticker, TradeSide::Buy, shares, price};
        portfolio.apply(exec);
        return ExecutionResult{exec, ""};
    }

    const std::int64_t held = portfolio.shares(ticker);
    if (held <= 0) {
        return ExecutionResult{std::nullopt, "no position"};
    }
    const double fraction =
        action == TradeAction::SigDecrease ? sizing.significant : sizing.slight;
    auto shares =
        static_cast<std::int64_t>(std::floor(static_cast<double>(held) * fraction));
    if (shares < 1) shares = 1; // minimum one share while a position exists
    if (shares > held) shares = held;
    TradeExecution exec{agent_id, when, ticker, TradeSide::Sell, shares, price};
    portfolio.apply(exec);
    return ExecutionResult{exec, ""};
}

TradingAgent::TradingAgent(TraderCharacter character, const RunConfig& config, Store& store,
                           MemoryEngine& engine)
    : character_(std::move(character)), config_(config), store_(store), engine_(engine) {
    portfolio_.cash = character_.initial_cash;
}

std::string TradingAgent::remember(MemoryOrigin origin, const std::string& text,
                                   Timestamp when) {
    MemoryEvent event;
    event.agent_id = character_.agent_id;
    event.layer = assign_layer(origin);
    event.text = text;
    event.embedding = engine_.embedder().embed(text);
    event.timestamp = when;
    event.origin = origin;
    return store_.add_memory(std::move(event));
}

DecisionContext TradingAgent::build_context(const std::string& ticker, Timestamp date,
                                            Phase phase) {
    if (!store_.has_price(ticker, date)) {
        fail(ErrorCode::MissingMarketData,
             ticker + " has no bar on " + date.date_string());
    }
    DecisionContext ctx;
    ctx.character = character_;
    ctx.ticker = ticker;
    ctx.date = date.start_of_day();
    ctx.phase = phase;
    ctx.top_k = config_.top_k;

    const Timestamp decide_time = date.at(16, 0);
    const std::string prompt_text =
        "trading decision for " + ticker + " on " + date.date_string() + " close " +
        fixed(store_.price_bar(ticker, date)->close, 4);
    const EmbeddingVector prompt = engine_.embedder().embed(prompt_text);
    for (LayerKind layer : kAllLayers) {
        ctx.memories[static_cast<int>(layer)] = engine_.retrieve_top_k(
            character_.agent_id, layer, prompt,
            static_cast<std::size_t>(config_.top_k), decide_time);
    }

    const std::size_t bars_needed = static_cast<std::size_t>(config_.decision.momentum_window) + 1;
    ctx.recent_closes = store_.closes_up_to(ticker, date, bars_needed);

    if (phase == Phase::Train) {
        ctx.fund_records = store_.holdings_on(date, ticker);
    } else {
        const Timestamp window_from = date.start_of_day().add_days(-7);
        ctx.recent_reflections =
            store_.reflections_in(character_.agent_id, window_from, date.start_of_day());
        ctx.recent_feedback =
            store_.feedback_in(character_.agent_id, window_from, date.start_of_day());
    }
    return ctx;
}

ExecutionResult TradingAgent::execute(const Recommendation& rec, const std::string& ticker,
                                      double price, Timestamp when) {
    ExecutionResult result = execute_recommendation(rec.action, portfolio_,
                                                    character_.agent_id, ticker, price, when,
                                                    config_.sizing);
    if (result.execution) {
        const auto& exec = *result.execution;
        remember(MemoryOrigin::TradeOutcome,
                 std::string(to_string(exec.side)) + " " + std::to_string(exec.shares) + " " +
                     ticker + " at " + fixed(price, 4),
                 when);
    }
    return result;
}

Reflection TradingAgent::immediate_reflection(const DecisionContext& ctx,
                                              const Recommendation& decision,
                                              const ExecutionResult& result,
                                              double position_return, Timestamp when) {
    Reflection r;
    r.flag = ReflectionFlag::Immediate;
    r.agent_id = character_.agent_id;
    r.ticker = ctx.ticker;
    r.recommendation = decision;
    r.trade_volume = result.execution ? result.execution->shares : 0;
    r.realized_return = position_return;
    r.timestamp = when;
    r.rationale = std::string(to_string(decision.action)) + " on " + ctx.ticker + ": " +
                  decision.rationale +
                  (result.execution
                       ? "; executed " + std::string(to_string(result.execution->side)) + " " +
                             std::to_string(result.execution->shares)
                       : "; no trade (" + result.reason + ")") +
                  "; daily position return " + fixed(position_return * 100.0, 4) + "%";
    store_.add_reflection(r);
    remember(MemoryOrigin::ImmediateReflection, r.rationale, when);

    if (std::abs(position_return) >= config_.counter.pnl_trigger) {
        store_.apply_access_boost(character_.agent_id, ctx.cited_ids(), "pnl");
    }
    return r;
}

Reflection TradingAgent::extended_reflection(Timestamp period_from, Timestamp period_to,
                                             Timestamp when) {
    // Portfolio value at the window edges from daily closes; positions from
    // the ledger replayed to each edge.
    std::vector<Timestamp> days;
    for (Timestamp d = period_from.start_of_day(); d <= period_to.start_of_day();
         d = d.add_days(1)) {
        for (const auto& ticker : store_.tickers()) {
            if (store_.has_price(ticker, d)) {
                days.push_back(d);
                break;
            }
        }
    }
    if (days.empty()) {
        fail(ErrorCode::NoActivity, "no trading days in " + period_from.date_string() + " .. " +
                                        period_to.date_string());
    }

    auto value_at = [&](Timestamp day) {
        double cash = character_.initial_cash;
        std::map<std::string, std::int64_t> shares;
        for (const auto& exec : portfolio_.ledger) {
            if (exec.timestamp.start_of_day() > day.start_of_day()) continue;
            const double value = static_cast<double>(exec.shares) * exec.price;
            if (exec.side == TradeSide::Buy) {
                cash -= value;
                shares[exec.ticker] += exec.shares;
            } else {
                cash += value;
                shares[exec.ticker] -= exec.shares;
            }
        }
        double total = cash;
        for (const auto& [ticker, count] : shares) {
            if (count == 0) continue;
            const auto closes = store_.closes_up_to(ticker, day, 1);
            if (!closes.empty()) {
                total += static_cast<double>(count) * closes.back().second;
            }
        }
        return total;
    };

    const double v_start = value_at(days.front().add_days(-1));
    const double v_end = value_at(days.back());

    std::int64_t volume = 0;
    int trades = 0;
    for (const auto& exec : portfolio_.ledger) {
        if (exec.timestamp >= period_from && exec.timestamp < period_to.add_days(1)) {
            volume += exec.shares;
            ++trades;
        }
    }

    Reflection r;
    r.flag = ReflectionFlag::Extended;
    r.agent_id = character_.agent_id;
    r.period_from = period_from.start_of_day();
    r.period_to = period_to.start_of_day();
    r.trade_volume = volume;
    r.realized_return = v_start != 0.0 ? v_end / v_start - 1.0 : 0.0;
    r.timestamp = when;
    r.rationale = "week " + r.period_from.date_string() + " .. " + r.period_to.date_string() +
                  ": " + std::to_string(trades) + " trades, volume " + std::to_string(volume) +
                  ", portfolio return " + fixed(r.realized_return * 100.0, 4) + "%";
    store_.add_reflection(r);
    remember(MemoryOrigin::ExtendedReflection, r.rationale, when);
    return r;
}

double TradingAgent::position_return(const std::string& ticker, Timestamp date) const {
    if (portfolio_.shares(ticker) <= 0) return 0.0;
    const auto closes = store_.closes_up_to(ticker, date, 2);
    if (closes.size() < 2) return 0.0;
    return closes.back().second / closes[closes.size() - 2].second - 1.0;
}

} // namespace ltm
