#include <cmath>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "ltm/embedding.hpp"
#include "ltm/errors.hpp"
#include "ltm/memory_engine.hpp"
#include "test_support.hpp"

using namespace ltm;
using test_support::oracle_cosine;

namespace {

// Independent reimplementation of the documented hashing scheme.
std::vector<double> oracle_embed(const std::string& text, std::size_t dim) {
    std::vector<double> acc(dim, 0.0);
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : token) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        acc[h % dim] += (h >> 63) ? -1.0 : 1.0;
        token.clear();
    };
    for (unsigned char c : text) {
        const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                           (c >= '0' && c <= '9');
        if (alnum) {
            token += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
        } else {
            flush();
        }
    }
    flush();
    double norm = 0.0;
    for (double v : acc) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : acc) v /= norm;
    return acc;
}

std::string random_text(Rng& rng) {
    static const char* words[] = {"alpha", "rates", "fund",   "rise",  "fall",
                                  "tech",  "macro", "signal", "trade", "risk"};
    std::string text;
    const int len = static_cast<int>(rng.uniform_int(1, 10));
    for (int i = 0; i < len; ++i) {
        if (!text.empty()) text += ' ';
        text += words[rng.uniform_int(0, 9)];
        text += std::to_string(rng.uniform_int(0, 99));
    }
    return text;
}

} // namespace

TEST_SUITE("embedding") {

TEST_CASE("deterministic across calls for 1000 random strings") {
    HashingEmbedder embedder;
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const std::string text = random_text(rng);
        const EmbeddingVector a = embedder.embed(text);
        const EmbeddingVector b = embedder.embed(text);
        REQUIRE(a.values() == b.values()); // bit-exact
    }
}

TEST_CASE("unit norm and self-similarity") {
    HashingEmbedder embedder;
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        const EmbeddingVector v = embedder.embed(random_text(rng));
        double norm = 0.0;
        for (double x : v.values()) norm += x * x;
        CHECK(std::abs(std::sqrt(norm) - 1.0) <= 1e-9);
        CHECK(std::abs(oracle_cosine(v.values(), v.values()) - 1.0) <= 1e-9);
    }
}

TEST_CASE("matches the documented hashing scheme") {
    HashingEmbedder embedder;
    for (const char* text : {"interest rates rise", "Fed cuts, MARKETS rally 3%",
                             "a  b\tc", "soccer match result"}) {
        CHECK(embedder.embed(text).values() == oracle_embed(text, 256));
    }
}

TEST_CASE("near-duplicate text scores above unrelated text") {
    HashingEmbedder embedder;
    const EmbeddingVector base = embedder.embed("interest rates rise");
    const EmbeddingVector close_text = embedder.embed("interest rates rise sharply");
    const EmbeddingVector far_text = embedder.embed("soccer match result");
    CHECK(oracle_cosine(base.values(), close_text.values()) >
          oracle_cosine(base.values(), far_text.values()));
}

TEST_CASE("case folding and separators collapse") {
    HashingEmbedder embedder;
    CHECK(embedder.embed("ABC def").values() == embedder.embed("abc DEF").values());
    CHECK(embedder.embed("abc,def").values() == embedder.embed("abc def").values());
}

TEST_CASE("token-free text is degenerate") {
    HashingEmbedder embedder;
    for (const char* text : {"", "...", "!!! ---", "\t\n"}) {
        CHECK_THROWS_AS(embedder.embed(text), Error);
    }
    try {
        embedder.embed("...");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateEmbedding);
    }
}

TEST_CASE("configurable dimension") {
    HashingEmbedder small(32);
    CHECK(small.embed("hello world").dimension() == 32);
    CHECK(HashingEmbedder().dimension() == 256);
}

TEST_CASE("http provider round-trips against a local service") {
    HashingEmbedder reference(8);
    httplib::Server server;
    server.Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        nlohmann::json vectors = nlohmann::json::array();
        for (const auto& text : body.at("texts")) {
            vectors.push_back(reference.embed(text.get<std::string>()).values());
        }
        res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpEmbedder remote("http://127.0.0.1:" + std::to_string(port) + "/embed", 8);
    CHECK(remote.embed("interest rates rise").values() ==
          reference.embed("interest rates rise").values());
    const auto batch = remote.embed_batch({"abc", "def"});
    CHECK(batch.size() == 2);
    CHECK(batch[0].values() == reference.embed("abc").values());

    // a service answering with the wrong dimension is rejected
    HttpEmbedder mismatched("http://127.0.0.1:" + std::to_string(port) + "/embed", 16);
    CHECK_THROWS_AS(mismatched.embed("abc"), Error);
    try {
        mismatched.embed("abc");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }

    server.stop();
    listener.join();
}

TEST_CASE("http provider failure raises CoreUnavailable") {
    HttpEmbedder remote("http://127.0.0.1:9/none", 8, 200); // port 9: discard, closed
    CHECK_THROWS_AS(remote.embed("abc"), Error);
    try {
        remote.embed("abc");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CoreUnavailable);
    }
}

} // TEST_SUITE
