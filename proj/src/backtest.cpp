#include "ltm/backtest.hpp"

#include <algorithm>
#include <set>

#include "ltm/errors.hpp"
#include "ltm/json_io.hpp"

namespace ltm {

std::unique_ptr<EmbeddingProvider> make_embedder(const EmbeddingConfig& config) {
    if (config.provider == "hashing") {
        return std::make_unique<HashingEmbedder>(config.dimension);
    }
    if (config.provider == "http") {
        if (config.endpoint.empty()) {
            fail(ErrorCode::ConfigError, "http embedding provider needs an endpoint");
        }
        return std::make_unique<HttpEmbedder>(config.endpoint, config.dimension,
                                              config.timeout_ms);
    }
    fail(ErrorCode::ConfigError, "unknown embedding provider '" + config.provider + "'");
}

Backtester::Backtester(RunConfig config, Store& store, std::filesystem::path run_dir)
    : config_(std::move(config)), store_(store), run_dir_(std::move(run_dir)) {
    config_.validate();
    embedder_ = make_embedder(config_.embedding);
    engine_ = std::make_unique<MemoryEngine>(store_, config_.layers, *embedder_);
    core_ = make_core(config_.core, config_.decision);
    debate_ = std::make_unique<DebateCoordinator>(config_, store_, *core_);
    for (const auto& character : config_.agents) {
        agents_.push_back(std::make_unique<TradingAgent>(character, config_, store_, *engine_));
        agents_by_id_[character.agent_id] = agents_.back().get();
    }
    if (!run_dir_.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(run_dir_, ec);
        load_prior_ledger();
        audit_log_.open(run_dir_ / "audit.jsonl", std::ios::app);
        ledger_log_.open(run_dir_ / "ledger.jsonl", std::ios::app);
        if (!audit_log_ || !ledger_log_) {
            fail(ErrorCode::IoError, "cannot open run logs under " + run_dir_.string());
        }
    }
}

void Backtester::load_prior_ledger() {
    const auto path = run_dir_ / "ledger.jsonl";
    if (!std::filesystem::exists(path)) return;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        TradeExecution exec;
        exec.agent_id = j.at("agent_id").get<std::string>();
        exec.timestamp = Timestamp::parse(j.at("timestamp").get<std::string>());
        exec.ticker = j.at("ticker").get<std::string>();
        exec.side = side_from_string(j.at("side").get<std::string>());
        exec.shares = j.at("shares").get<std::int64_t>();
        exec.price = j.at("price").get<double>();
        ledger_.push_back(exec);
        if (auto it = agents_by_id_.find(exec.agent_id); it != agents_by_id_.end()) {
            it->second->portfolio().apply(exec);
        }
    }
}

void Backtester::append_ledger_line(const TradeExecution& exec) {
    ledger_.push_back(exec);
    if (ledger_log_.is_open()) {
        nlohmann::ordered_json j{{"agent_id", exec.agent_id},
                                 {"timestamp", exec.timestamp.to_string()},
                                 {"ticker", exec.ticker},
                                 {"side", to_string(exec.side)},
                                 {"shares", exec.shares},
                                 {"price", exec.price}};
        ledger_log_ << j.dump() << '\n';
        ledger_log_.flush();
    }
}

void Backtester::write_audit(const nlohmann::ordered_json& record) {
    if (audit_log_.is_open()) {
        audit_log_ << record.dump() << '\n';
        audit_log_.flush();
    }
}

TradingAgent* Backtester::agent(const std::string& agent_id) {
    auto it = agents_by_id_.find(agent_id);
    return it == agents_by_id_.end() ? nullptr : it->second;
}

bool Backtester::phase_completed(const std::filesystem::path& run_dir, Phase phase) {
    const auto path = run_dir / "audit.jsonl";
    if (!std::filesystem::exists(path)) return false;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        if (j.value("type", "") == "phase_complete" &&
            j.value("phase", "") == to_string(phase)) {
            return true;
        }
    }
    return false;
}

void Backtester::execute_and_record(TradingAgent& agent, TickerDecision& decision,
                                    const std::string& ticker, Timestamp when,
                                    DayReport& report) {
    const auto bar = store_.price_bar(ticker, when);
    decision.result = agent.execute(decision.rec, ticker, bar->close, when);
    decision.executed = true;
    if (decision.result.execution) {
        append_ledger_line(*decision.result.execution);
        ++report.trades;
    } else {
        ++report.no_trades;
    }
    decision.position_return = agent.position_return(ticker, when);
}

void Backtester::reflect(TradingAgent& agent, TickerDecision& decision, Timestamp when,
                         DayReport& report) {
    agent.immediate_reflection(decision.ctx, decision.rec, decision.result,
                               decision.position_return, when);
    ++report.reflections;
}

DayReport Backtester::run_day(Timestamp date, Phase phase) {
    DayReport report;
    report.date = date.start_of_day();
    report.phase = phase;

    // decisions retrieve at the 16:00 close inside build_context; everything
    // after advances the intraday clock so log timestamps expose the order
    const Timestamp train_exec_time = date.at(16, 5);
    const Timestamp train_reflect_time = date.at(16, 15);
    const Timestamp debate_time = date.at(16, 30);
    const Timestamp test_exec_time = date.at(16, 45);
    const Timestamp test_reflect_time = date.at(16, 50);
    const Timestamp sweep_time = date.at(17, 0);
    const Timestamp extended_time = date.at(17, 30);

    // 1. Decisions: every agent over its in-scope tickers.
    std::map<std::string, std::map<std::string, TickerDecision>> decided;
    const std::size_t bars_needed =
        static_cast<std::size_t>(config_.decision.momentum_window) + 1;
    for (const auto& agent : agents_) {
        for (const auto& ticker : config_.scope_tickers(agent->character())) {
            if (!store_.has_price(ticker, date)) {
                report.gaps.push_back(agent->id() + "/" + ticker + ": missing-data");
                continue;
            }
            if (store_.closes_up_to(ticker, date, bars_needed).size() < bars_needed) {
                report.gaps.push_back(agent->id() + "/" + ticker + ": insufficient-history");
                continue;
            }
            TickerDecision decision;
            try {
                decision.ctx = agent->build_context(ticker, date, phase);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::MissingMarketData ||
                    e.code() == ErrorCode::InsufficientHistory) {
                    report.gaps.push_back(agent->id() + "/" + ticker + ": " + e.what());
                    continue;
                }
                throw;
            }
            const auto violations = audit_context(decision.ctx);
            for (const auto& v : violations) {
                (void)v;
                ++report.lookahead_violations;
            }
            if (phase == Phase::Test && !decision.ctx.fund_records.empty()) {
                ++report.test_holdings_in_context;
            }
            decision.rec = core_->decide(decision.ctx);
            ++report.decisions;
            decided[agent->id()].emplace(ticker, std::move(decision));
        }
    }

    // 2. Training: execute pre-debate decisions, then reflect (the debate
    //    package quotes the executed volumes and returns).
    if (phase == Phase::Train) {
        for (auto& [agent_id, tickers] : decided) {
            TradingAgent& agent = *agents_by_id_.at(agent_id);
            for (auto& [ticker, decision] : tickers) {
                execute_and_record(agent, decision, ticker, train_exec_time, report);
            }
        }
        for (auto& [agent_id, tickers] : decided) {
            TradingAgent& agent = *agents_by_id_.at(agent_id);
            for (auto& [ticker, decision] : tickers) {
                reflect(agent, decision, train_reflect_time, report);
            }
        }
    }

    // 3. Debates over tickers multiple agents hold or traded today.
    std::set<std::string> debate_tickers;
    for (const auto& [agent_id, tickers] : decided) {
        for (const auto& [ticker, _] : tickers) debate_tickers.insert(ticker);
    }
    std::map<std::string, std::map<std::string, Recommendation>> revised_by_ticker;
    std::vector<TradingAgent*> agent_ptrs;
    for (const auto& agent : agents_) agent_ptrs.push_back(agent.get());

    for (const auto& ticker : debate_tickers) {
        std::map<std::string, Recommendation> ticker_decisions;
        std::map<std::string, DecisionContext> contexts;
        std::map<std::string, PackageFigures> figures;
        for (const auto& [agent_id, tickers] : decided) {
            auto it = tickers.find(ticker);
            if (it == tickers.end()) continue;
            ticker_decisions[agent_id] = it->second.rec;
            contexts[agent_id] = it->second.ctx;
            PackageFigures fig;
            if (it->second.executed && it->second.result.execution) {
                fig.volume = it->second.result.execution->shares;
            }
            fig.realized_return = it->second.position_return;
            figures[agent_id] = fig;
        }
        auto session = debate_->convene(date, ticker, agent_ptrs, ticker_decisions);
        if (!session) continue;
        for (int round = 0; round < debate_->max_rounds(); ++round) {
            const auto messages = debate_->exchange_round(
                *session, agents_by_id_, contexts, figures, debate_time.add_minutes(round));
            report.debate_messages += static_cast<int>(messages.size());
        }
        const auto revised = debate_->finalize(*session, contexts);
        revised_by_ticker[ticker] = revised;

        SessionSummary summary;
        summary.session_id = session->session_id;
        summary.ticker = ticker;
        summary.participants = session->participants;
        summary.rounds = session->rounds_completed;
        for (const auto& [agent_id, rec] : revised) {
            summary.revised[agent_id] = to_string(rec.action);
        }
        report.sessions.push_back(std::move(summary));
    }

    // 4. Testing: execute the post-debate recommendation, then reflect.
    if (phase == Phase::Test) {
        for (auto& [agent_id, tickers] : decided) {
            TradingAgent& agent = *agents_by_id_.at(agent_id);
            for (auto& [ticker, decision] : tickers) {
                if (auto by_ticker = revised_by_ticker.find(ticker);
                    by_ticker != revised_by_ticker.end()) {
                    if (auto rec = by_ticker->second.find(agent_id);
                        rec != by_ticker->second.end()) {
                        decision.rec = rec->second;
                    }
                }
                execute_and_record(agent, decision, ticker, test_exec_time, report);
            }
        }
        for (auto& [agent_id, tickers] : decided) {
            TradingAgent& agent = *agents_by_id_.at(agent_id);
            for (auto& [ticker, decision] : tickers) {
                reflect(agent, decision, test_reflect_time, report);
            }
        }
    }

    // 5. Maintenance sweeps.
    for (const auto& agent : agents_) {
        const SweepReport sweep = engine_->maintenance_sweep(agent->id(), sweep_time);
        report.promoted += sweep.promoted;
        report.purged += sweep.purged;
        std::vector<std::string> promoted_ids;
        for (const auto& t : sweep.outcome.promoted) promoted_ids.push_back(t.id);
        write_audit(nlohmann::ordered_json{{"type", "sweep"},
                                           {"date", report.date.date_string()},
                                           {"agent_id", agent->id()},
                                           {"promoted", promoted_ids},
                                           {"purged", sweep.outcome.purged},
                                           {"pinned", sweep.outcome.pinned}});
    }

    // 6. Weekly extended reflections.
    if (day_index_ % 7 == 6) {
        for (const auto& agent : agents_) {
            try {
                agent->extended_reflection(date.add_days(-6), date, extended_time);
                ++report.reflections;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoActivity) throw;
                report.gaps.push_back(agent->id() + "/week: no-activity");
            }
        }
    }

    store_.day_close(date);

    nlohmann::ordered_json sessions = nlohmann::ordered_json::array();
    for (const auto& s : report.sessions) {
        nlohmann::ordered_json revised = nlohmann::ordered_json::object();
        for (const auto& [agent_id, action] : s.revised) revised[agent_id] = action;
        sessions.push_back(nlohmann::ordered_json{{"session_id", s.session_id},
                                                  {"ticker", s.ticker},
                                                  {"participants", s.participants},
                                                  {"rounds", s.rounds},
                                                  {"revised", std::move(revised)}});
    }
    write_audit(nlohmann::ordered_json{{"type", "day"},
                                       {"date", report.date.date_string()},
                                       {"phase", to_string(phase)},
                                       {"decisions", report.decisions},
                                       {"trades", report.trades},
                                       {"no_trades", report.no_trades},
                                       {"reflections", report.reflections},
                                       {"promoted", report.promoted},
                                       {"purged", report.purged},
                                       {"debate_messages", report.debate_messages},
                                       {"sessions", std::move(sessions)},
                                       {"gaps", report.gaps},
                                       {"lookahead_violations", report.lookahead_violations}});
    ++day_index_;
    return report;
}

RunSummary Backtester::run(Phase phase) {
    if (!run_dir_.empty()) {
        if (phase == Phase::Test && !phase_completed(run_dir_, Phase::Train)) {
            fail(ErrorCode::ConfigError, "test phase requires a completed training phase");
        }
        if (phase_completed(run_dir_, phase)) {
            fail(ErrorCode::ConfigError,
                 std::string("phase '") + to_string(phase) + "' already completed in " +
                     run_dir_.string());
        }
    }

    RunSummary summary;
    summary.phase = phase;
    day_index_ = 0;
    const Timestamp from = config_.span_from(phase);
    const Timestamp to = config_.span_to(phase);
    for (Timestamp date = from.start_of_day(); date <= to.start_of_day();
         date = date.add_days(1)) {
        bool any_price = false;
        for (const auto& ticker : store_.tickers()) {
            if (store_.has_price(ticker, date)) {
                any_price = true;
                break;
            }
        }
        if (!any_price) continue;
        DayReport report = run_day(date, phase);
        ++summary.days;
        summary.decisions += report.decisions;
        summary.trades += report.trades;
        summary.sessions += static_cast<int>(report.sessions.size());
        summary.lookahead_violations += report.lookahead_violations;
        summary.test_holdings_in_context += report.test_holdings_in_context;
        if (capture_checkpoints_) {
            summary.checkpoints.push_back(Checkpoint{report.date, store_.cognition_digest()});
        }
        summary.day_reports.push_back(std::move(report));
    }

    write_audit(nlohmann::ordered_json{{"type", "phase_complete"},
                                       {"phase", to_string(phase)},
                                       {"config_hash", config_.config_hash()}});
    if (!run_dir_.empty()) {
        const MetricsReport report = metrics(phase);
        emit_report(report, ReportFormat::Csv, run_dir_ / "report.csv");
        emit_report(report, ReportFormat::Json, run_dir_ / "report.json");
    }
    return summary;
}

MetricsReport Backtester::metrics(Phase phase) const {
    std::vector<std::pair<std::string, double>> roster;
    for (const auto& character : config_.agents) {
        roster.emplace_back(character.agent_id, character.initial_cash);
    }
    return build_metrics_report(config_, phase, roster, ledger_, store_);
}

} // namespace ltm
