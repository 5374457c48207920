#pragma once
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ltm {

// Unit-L2-norm vector. Construction normalizes and rejects zero vectors.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<double> values);

    std::size_t dimension() const { return values_.size(); }
    const double* data() const { return values_.data(); }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const EmbeddingVector&) const = default;

private:
    std::vector<double> values_;
};

struct EmbeddingProvider {
    virtual ~EmbeddingProvider() = default;
    virtual EmbeddingVector embed(const std::string& text) const = 0;
    virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const;
    virtual std::size_t dimension() const = 0;
    virtual std::string name() const = 0;
};

// Deterministic signed feature hashing.
//
// Tokenization: maximal runs of ASCII alphanumerics, case-folded A-Z -> a-z;
// every other byte is a separator. Each token is hashed with FNV-1a 64-bit
// (offset 0xcbf29ce484222325, prime 0x100000001b3); bucket = hash % dimension,
// sign = +1 if the top hash bit is clear else -1. The accumulated vector is
// L2-normalized. No seeds, no locale: the same text yields the same vector on
// every platform and run.
class HashingEmbedder final : public EmbeddingProvider {
public:
    static constexpr std::size_t kDefaultDimension = 256;

    explicit HashingEmbedder(std::size_t dimension = kDefaultDimension)
        : dimension_(dimension) {}

    EmbeddingVector embed(const std::string& text) const override;
    std::size_t dimension() const override { return dimension_; }
    std::string name() const override { return "hashing"; }

    static std::uint64_t fnv1a(const std::string& token);

private:
    std::size_t dimension_;
};

// Adapter for an external embedding service:
//   POST <endpoint> {"texts": [...]} -> {"vectors": [[...], ...]}
// Responses are validated for dimension and renormalized to unit length.
class HttpEmbedder final : public EmbeddingProvider {
public:
    HttpEmbedder(std::string endpoint, std::size_t dimension, int timeout_ms = 5000);

    EmbeddingVector embed(const std::string& text) const override;
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override;
    std::size_t dimension() const override { return dimension_; }
    std::string name() const override { return "http"; }

private:
    std::string host_;
    std::string path_;
    std::size_t dimension_;
    int timeout_ms_;
};

} // namespace ltm
