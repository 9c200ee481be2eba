#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scruple {

// Linear Q over hashed sparse text features: bag of context tokens, bag of
// action tokens, and their pairwise conjunctions, with sign hashing.
// q_value is a pure function of (weights, context text, action text).
class QFunction {
public:
    struct Feature {
        uint32_t index;
        int8_t sign;
    };
    using FeatureVec = std::vector<Feature>;

    // Pre-hashed context tokens, reusable across candidate actions.
    struct ContextKey {
        std::vector<uint64_t> token_hashes;
    };

    explicit QFunction(int log2_dim = 20);

    static ContextKey context_key(const std::string& context);

    FeatureVec features(const ContextKey& ctx, const std::string& action) const;
    FeatureVec features(const std::string& context, const std::string& action) const;

    double value(const FeatureVec& fv) const;
    double value(const ContextKey& ctx, const std::string& action) const;
    double value(const std::string& context, const std::string& action) const;

    // w += step * phi. The caller folds learning rate and TD error into step.
    void apply_update(const FeatureVec& fv, double step);

    void randomize(uint64_t seed, double scale);

    size_t dimension() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<double> weights_;
    uint32_t mask_;
};

}  // namespace scruple
