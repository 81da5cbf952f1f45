#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bellforge/errors.hpp"
#include "bellforge/value.hpp"

namespace bellforge {

// Normalization slack for conditional rows. Every model in scope is exactly
// rational or analytic, so anything looser hides bugs.
inline constexpr double kNormTolerance = 1e-12;

// Conditioning events below this mass are treated as undefined and skipped
// by all downstream quantification.
inline constexpr double kZeroMass = 1e-12;

struct VariableSpec {
    std::string name;
    std::vector<Value> support;

    void validate() const;
};

// Exact finite discrete conditional table P(targets | givens). Entries are
// stored flat, row-major: given assignment index major, target index minor.
// Assignment indices are mixed-radix over the supports in declared order,
// first variable most significant. Immutable after construction.
class ConditionalTable {
public:
    // Validates completeness, range and per-row normalization. Rows whose
    // sum deviates from 1 by at most kNormTolerance are renormalized;
    // larger deviations raise NormalizationError.
    static ConditionalTable make(std::vector<VariableSpec> given,
                                 std::vector<VariableSpec> target,
                                 std::vector<double> entries);

    // Range-checks only; rows may be unnormalized. Used to build candidate
    // tables whose residuals are then inspected by model validation.
    static ConditionalTable make_unnormalized(std::vector<VariableSpec> given,
                                              std::vector<VariableSpec> target,
                                              std::vector<double> entries);

    const std::vector<VariableSpec>& given_vars() const { return given_; }
    const std::vector<VariableSpec>& target_vars() const { return target_; }

    std::size_t given_count() const { return given_size_; }
    std::size_t target_count() const { return target_size_; }

    double at(std::size_t given_index, std::size_t target_index) const {
        return entries_[given_index * target_size_ + target_index];
    }
    const std::vector<double>& entries() const { return entries_; }

    // Mixed-radix encode/decode over the declared support order.
    std::size_t given_index(std::span<const Value> values) const;
    std::size_t target_index(std::span<const Value> values) const;
    std::vector<Value> given_values(std::size_t index) const;
    std::vector<Value> target_values(std::size_t index) const;

    double prob(std::span<const Value> given, std::span<const Value> target) const {
        return at(given_index(given), target_index(target));
    }

    // Sums the named target variables out. Remaining targets keep their
    // declared support order.
    ConditionalTable marginalize(const std::vector<std::string>& drop) const;

    // Residual |row sum - 1| per given assignment.
    std::vector<double> row_residuals() const;

    bool has_target(const std::string& name) const;
    std::size_t target_position(const std::string& name) const;
    std::size_t given_position(const std::string& name) const;

private:
    ConditionalTable() = default;
    static ConditionalTable build(std::vector<VariableSpec> given,
                                  std::vector<VariableSpec> target,
                                  std::vector<double> entries, bool normalized);

    std::vector<VariableSpec> given_;
    std::vector<VariableSpec> target_;
    std::vector<double> entries_;
    std::size_t given_size_ = 1;
    std::size_t target_size_ = 1;
};

// Half the L1 distance between the target distributions of two tables at one
// conditioning assignment. Requires identical target specs.
double total_variation(const ConditionalTable& t1, const ConditionalTable& t2,
                       std::span<const Value> given_assignment);

double total_variation(std::span<const double> p1, std::span<const double> p2);

// Pretty-prints the given-assignment of one table row, for diagnostics.
std::string to_string_row(const ConditionalTable& t, std::size_t given_index);

} // namespace bellforge
