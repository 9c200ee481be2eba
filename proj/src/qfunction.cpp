#include "scruple/qfunction.hpp"

#include "scruple/rng.hpp"
#include "scruple/text.hpp"

namespace scruple {

namespace {
// long observations add little beyond their prefix and blow up the
// conjunction count
constexpr size_t kMaxContextTokens = 48;

inline QFunction::Feature make_feature(uint64_t h, uint32_t mask) {
    return {static_cast<uint32_t>(h) & mask, static_cast<int8_t>((h >> 40) & 1 ? 1 : -1)};
}
}  // namespace

QFunction::QFunction(int log2_dim)
    : weights_(size_t{1} << log2_dim, 0.0), mask_((uint32_t{1} << log2_dim) - 1) {}

QFunction::ContextKey QFunction::context_key(const std::string& context) {
    ContextKey key;
    auto tokens = tokenize(context);
    if (tokens.size() > kMaxContextTokens) tokens.resize(kMaxContextTokens);
    key.token_hashes.reserve(tokens.size());
    for (const auto& t : tokens) key.token_hashes.push_back(fnv1a64(t));
    return key;
}

QFunction::FeatureVec QFunction::features(const ContextKey& ctx, const std::string& action) const {
    auto a_tokens = tokenize(action);
    FeatureVec fv;
    fv.reserve(ctx.token_hashes.size() * (1 + a_tokens.size()) + a_tokens.size());
    for (uint64_t ch : ctx.token_hashes) fv.push_back(make_feature(hash_combine(1, ch), mask_));
    for (const auto& at : a_tokens) {
        uint64_t ah = fnv1a64(at);
        fv.push_back(make_feature(hash_combine(2, ah), mask_));
        for (uint64_t ch : ctx.token_hashes)
            fv.push_back(make_feature(hash_combine(3, hash_combine(ch, ah)), mask_));
    }
    return fv;
}

QFunction::FeatureVec QFunction::features(const std::string& context,
                                          const std::string& action) const {
    return features(context_key(context), action);
}

double QFunction::value(const FeatureVec& fv) const {
    double sum = 0;
    for (const auto& f : fv) sum += weights_[f.index] * f.sign;
    return sum;
}

double QFunction::value(const ContextKey& ctx, const std::string& action) const {
    // same features as features(ctx, action), summed without materializing
    auto a_tokens = tokenize(action);
    double sum = 0;
    for (uint64_t ch : ctx.token_hashes) {
        Feature f = make_feature(hash_combine(1, ch), mask_);
        sum += weights_[f.index] * f.sign;
    }
    for (const auto& at : a_tokens) {
        uint64_t ah = fnv1a64(at);
        Feature f = make_feature(hash_combine(2, ah), mask_);
        sum += weights_[f.index] * f.sign;
        for (uint64_t ch : ctx.token_hashes) {
            Feature g = make_feature(hash_combine(3, hash_combine(ch, ah)), mask_);
            sum += weights_[g.index] * g.sign;
        }
    }
    return sum;
}

double QFunction::value(const std::string& context, const std::string& action) const {
    return value(context_key(context), action);
}

void QFunction::apply_update(const FeatureVec& fv, double step) {
    for (const auto& f : fv) weights_[f.index] += step * f.sign;
}

void QFunction::randomize(uint64_t seed, double scale) {
    Rng rng(seed);
    for (double& w : weights_) w = (2.0 * rng.next_double() - 1.0) * scale;
}

}  // namespace scruple
