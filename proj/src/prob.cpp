#include "bellforge/prob.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bellforge {

std::string to_string_row(const ConditionalTable& t, std::size_t g);

namespace {

std::size_t grid_size(const std::vector<VariableSpec>& vars) {
    std::size_t n = 1;
    for (const auto& v : vars) n *= v.support.size();
    return n;
}

std::size_t encode(const std::vector<VariableSpec>& vars, std::span<const Value> values) {
    if (values.size() != vars.size())
        throw ShapeMismatch("assignment arity does not match variable list");
    std::size_t index = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const auto& support = vars[i].support;
        auto it = std::find(support.begin(), support.end(), values[i]);
        if (it == support.end())
            throw UnknownVariable("value " + to_string(values[i]) + " not in support of " +
                                  vars[i].name);
        index = index * support.size() + static_cast<std::size_t>(it - support.begin());
    }
    return index;
}

std::vector<Value> decode(const std::vector<VariableSpec>& vars, std::size_t index) {
    std::vector<Value> values(vars.size());
    for (std::size_t i = vars.size(); i-- > 0;) {
        const auto& support = vars[i].support;
        values[i] = support[index % support.size()];
        index /= support.size();
    }
    return values;
}

} // namespace

void VariableSpec::validate() const {
    if (support.empty()) throw RangeError("variable " + name + " has empty support");
    for (std::size_t i = 0; i < support.size(); ++i)
        for (std::size_t j = i + 1; j < support.size(); ++j)
            if (support[i] == support[j])
                throw RangeError("variable " + name + " has duplicate support value " +
                                 to_string(support[i]));
}

ConditionalTable ConditionalTable::build(std::vector<VariableSpec> given,
                                         std::vector<VariableSpec> target,
                                         std::vector<double> entries, bool normalized) {
    for (const auto& v : given) v.validate();
    for (const auto& v : target) v.validate();
    std::set<std::string> names;
    for (const auto& v : given)
        if (!names.insert(v.name).second)
            throw ShapeMismatch("duplicate variable name " + v.name);
    for (const auto& v : target)
        if (!names.insert(v.name).second)
            throw ShapeMismatch("duplicate variable name " + v.name);
    if (target.empty()) throw ShapeMismatch("table needs at least one target variable");

    ConditionalTable t;
    t.given_ = std::move(given);
    t.target_ = std::move(target);
    t.given_size_ = grid_size(t.given_);
    t.target_size_ = grid_size(t.target_);
    if (entries.size() != t.given_size_ * t.target_size_)
        throw IncompleteError("expected " + std::to_string(t.given_size_ * t.target_size_) +
                              " entries, got " + std::to_string(entries.size()));
    for (double p : entries) {
        if (!(p >= 0.0 && p <= 1.0) || !std::isfinite(p))
            throw RangeError("probability entry " + std::to_string(p) + " outside [0, 1]");
    }
    t.entries_ = std::move(entries);

    if (normalized) {
        for (std::size_t g = 0; g < t.given_size_; ++g) {
            double sum = 0.0;
            for (std::size_t k = 0; k < t.target_size_; ++k) sum += t.entries_[g * t.target_size_ + k];
            if (std::abs(sum - 1.0) > kNormTolerance)
                throw NormalizationError("row " + to_string_row(t, g) + " sums to " +
                                         std::to_string(sum));
            for (std::size_t k = 0; k < t.target_size_; ++k) t.entries_[g * t.target_size_ + k] /= sum;
        }
    }
    return t;
}

std::string to_string_row(const ConditionalTable& t, std::size_t g) {
    if (t.given_vars().empty()) return "()";
    std::vector<Binding> bindings;
    auto values = t.given_values(g);
    for (std::size_t i = 0; i < values.size(); ++i)
        bindings.emplace_back(t.given_vars()[i].name, values[i]);
    return to_string(bindings);
}

ConditionalTable ConditionalTable::make(std::vector<VariableSpec> given,
                                        std::vector<VariableSpec> target,
                                        std::vector<double> entries) {
    return build(std::move(given), std::move(target), std::move(entries), true);
}

ConditionalTable ConditionalTable::make_unnormalized(std::vector<VariableSpec> given,
                                                     std::vector<VariableSpec> target,
                                                     std::vector<double> entries) {
    return build(std::move(given), std::move(target), std::move(entries), false);
}

std::size_t ConditionalTable::given_index(std::span<const Value> values) const {
    return encode(given_, values);
}

std::size_t ConditionalTable::target_index(std::span<const Value> values) const {
    return encode(target_, values);
}

std::vector<Value> ConditionalTable::given_values(std::size_t index) const {
    return decode(given_, index);
}

std::vector<Value> ConditionalTable::target_values(std::size_t index) const {
    return decode(target_, index);
}

bool ConditionalTable::has_target(const std::string& name) const {
    for (const auto& v : target_)
        if (v.name == name) return true;
    return false;
}

std::size_t ConditionalTable::target_position(const std::string& name) const {
    for (std::size_t i = 0; i < target_.size(); ++i)
        if (target_[i].name == name) return i;
    throw UnknownVariable(name + " is not a target variable");
}

std::size_t ConditionalTable::given_position(const std::string& name) const {
    for (std::size_t i = 0; i < given_.size(); ++i)
        if (given_[i].name == name) return i;
    throw UnknownVariable(name + " is not a given variable");
}

ConditionalTable ConditionalTable::marginalize(const std::vector<std::string>& drop) const {
    for (const auto& name : drop) target_position(name); // throws on unknowns

    std::vector<VariableSpec> kept;
    std::vector<std::size_t> kept_positions;
    for (std::size_t i = 0; i < target_.size(); ++i) {
        if (std::find(drop.begin(), drop.end(), target_[i].name) == drop.end()) {
            kept.push_back(target_[i]);
            kept_positions.push_back(i);
        }
    }
    if (kept.empty()) throw ShapeMismatch("cannot marginalize away every target variable");

    std::size_t kept_size = grid_size(kept);
    std::vector<double> out(given_size_ * kept_size, 0.0);
    for (std::size_t g = 0; g < given_size_; ++g) {
        for (std::size_t k = 0; k < target_size_; ++k) {
            auto values = target_values(k);
            std::size_t idx = 0;
            for (std::size_t pos : kept_positions)
                idx = idx * target_[pos].support.size() +
                      static_cast<std::size_t>(
                          std::find(target_[pos].support.begin(), target_[pos].support.end(),
                                    values[pos]) -
                          target_[pos].support.begin());
            out[g * kept_size + idx] += at(g, k);
        }
    }
    // Sums of a normalized row stay in [0,1] up to rounding; clamp the dust.
    for (double& p : out) p = std::clamp(p, 0.0, 1.0);
    return make(given_, std::move(kept), std::move(out));
}

std::vector<double> ConditionalTable::row_residuals() const {
    std::vector<double> residuals(given_size_);
    for (std::size_t g = 0; g < given_size_; ++g) {
        double sum = 0.0;
        for (std::size_t k = 0; k < target_size_; ++k) sum += at(g, k);
        residuals[g] = std::abs(sum - 1.0);
    }
    return residuals;
}

double total_variation(std::span<const double> p1, std::span<const double> p2) {
    if (p1.size() != p2.size()) throw ShapeMismatch("distributions differ in length");
    double d = 0.0;
    for (std::size_t i = 0; i < p1.size(); ++i) d += std::abs(p1[i] - p2[i]);
    return 0.5 * d;
}

double total_variation(const ConditionalTable& t1, const ConditionalTable& t2,
                       std::span<const Value> given_assignment) {
    if (t1.target_vars().size() != t2.target_vars().size() ||
        t1.target_count() != t2.target_count())
        throw ShapeMismatch("tables have different target shapes");
    for (std::size_t i = 0; i < t1.target_vars().size(); ++i) {
        if (t1.target_vars()[i].name != t2.target_vars()[i].name ||
            t1.target_vars()[i].support != t2.target_vars()[i].support)
            throw ShapeMismatch("tables have different target variable specs");
    }
    std::size_t g1 = t1.given_index(given_assignment);
    std::size_t g2 = t2.given_index(given_assignment);
    double d = 0.0;
    for (std::size_t k = 0; k < t1.target_count(); ++k) d += std::abs(t1.at(g1, k) - t2.at(g2, k));
    return 0.5 * d;
}

} // namespace bellforge
