#include "spscan/embedding.hpp"

#include <cmath>

#include "spscan/common.hpp"
#include "spscan/vocab.hpp"

namespace spscan {

HashedBowEmbedder::HashedBowEmbedder(int dim, uint64_t salt) : dim_(dim), salt_(salt) {
    if (dim <= 0) fail("embedding dim must be positive");
}

std::vector<double> HashedBowEmbedder::embed(std::string_view text) {
    std::vector<double> v(static_cast<size_t>(dim_), 0.0);
    for (const std::string& word : word_tokenize(text)) {
        uint64_t h = mix64(hash_str(to_lower(word)) ^ salt_);
        size_t bucket = static_cast<size_t>(h % static_cast<uint64_t>(dim_));
        double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
        v[bucket] += sign;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (double& x : v) x /= norm;
    return v;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) fail("cosine: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) fail("cosine: zero-norm vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace spscan
