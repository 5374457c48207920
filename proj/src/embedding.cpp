#include "ltm/embedding.hpp"

#include <cctype>
#include <cmath>

#include "httplib.h"
#include "json.hpp"
#include "ltm/errors.hpp"

namespace ltm {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        fail(ErrorCode::DegenerateEmbedding, "empty vector");
    }
    double sq = 0.0;
    for (double v : values_) sq += v * v;
    if (sq == 0.0 || !std::isfinite(sq)) {
        fail(ErrorCode::DegenerateEmbedding, "zero or non-finite norm");
    }
    const double norm = std::sqrt(sq);
    for (double& v : values_) v /= norm;
}

std::vector<EmbeddingVector> EmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
}

std::uint64_t HashingEmbedder::fnv1a(const std::string& token) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : token) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

EmbeddingVector HashingEmbedder::embed(const std::string& text) const {
    std::vector<double> acc(dimension_, 0.0);
    std::string token;
    bool any = false;
    auto flush = [&] {
        if (token.empty()) return;
        const std::uint64_t h = fnv1a(token);
        const std::size_t bucket = static_cast<std::size_t>(h % dimension_);
        acc[bucket] += (h >> 63) ? -1.0 : 1.0;
        token.clear();
        any = true;
    };
    for (unsigned char c : text) {
        if (std::isalnum(c) && c < 0x80) {
            token += static_cast<char>(std::tolower(c));
        } else {
            flush();
        }
    }
    flush();
    if (!any) {
        fail(ErrorCode::DegenerateEmbedding, "no alphanumeric tokens in text");
    }
    // Opposite-signed collisions can cancel the whole vector; the constructor
    // rejects that residual case.
    return EmbeddingVector(std::move(acc));
}

namespace {

// Splits "http://host:port/path" into client target and path.
void split_endpoint(const std::string& endpoint, std::string& host, std::string& path) {
    auto scheme = endpoint.find("://");
    const std::size_t begin = scheme == std::string::npos ? 0 : scheme + 3;
    auto slash = endpoint.find('/', begin);
    if (slash == std::string::npos) {
        host = endpoint;
        path = "/";
    } else {
        host = endpoint.substr(0, slash);
        path = endpoint.substr(slash);
    }
}

} // namespace

HttpEmbedder::HttpEmbedder(std::string endpoint, std::size_t dimension, int timeout_ms)
    : dimension_(dimension), timeout_ms_(timeout_ms) {
    split_endpoint(endpoint, host_, path_);
}

EmbeddingVector HttpEmbedder::embed(const std::string& text) const {
    return embed_batch({text}).front();
}

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(
    const std::vector<std::string>& texts) const {
    nlohmann::json body;
    body["texts"] = texts;

    httplib::Client client(host_);
    client.set_connection_timeout(0, timeout_ms_ * 1000);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res || res->status != 200) {
        fail(ErrorCode::CoreUnavailable, "embedding endpoint unreachable: " + host_ + path_);
    }
    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const std::exception& e) {
        fail(ErrorCode::CoreUnavailable, std::string("embedding reply unparseable: ") + e.what());
    }
    if (!reply.contains("vectors") || !reply["vectors"].is_array() ||
        reply["vectors"].size() != texts.size()) {
        fail(ErrorCode::CoreUnavailable, "embedding reply missing vectors");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& vec : reply["vectors"]) {
        std::vector<double> values = vec.get<std::vector<double>>();
        if (values.size() != dimension_) {
            fail(ErrorCode::DimensionMismatch,
                 "embedding service returned dimension " + std::to_string(values.size()) +
                     ", expected " + std::to_string(dimension_));
        }
        out.emplace_back(std::move(values));
    }
    return out;
}

} // namespace ltm
