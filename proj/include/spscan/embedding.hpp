#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace spscan {

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<double> embed(std::string_view text) = 0;
};

// Feature-hashed bag of words: each token hashes to a bucket with a hashed
// sign, vectors are L2-normalized. No fitting step, fully deterministic.
class HashedBowEmbedder : public EmbeddingProvider {
public:
    explicit HashedBowEmbedder(int dim = 64, uint64_t salt = 0);
    std::vector<double> embed(std::string_view text) override;

private:
    int dim_;
    uint64_t salt_;
};

// Throws on zero-norm input rather than inventing a similarity.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace spscan
