#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nsa/syntax.hpp"

namespace nsa {

// Call-by-value evaluator for closed terms. Total on well-typed input; a step
// budget turns accidental divergence (an engine bug, since the calculus is
// strongly normalizing) into a diagnosable error instead of a hang.

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct EnvNode;
using EnvPtr = std::shared_ptr<const EnvNode>;
struct EnvNode {
  std::string name;
  ValuePtr value;
  EnvPtr next;
};
EnvPtr env_bind(EnvPtr env, std::string name, ValuePtr v);
const ValuePtr* env_lookup(const EnvPtr& env, const std::string& name);

struct Value {
  enum class Kind { Num, Seq, Closure, Native };
  Kind kind = Kind::Num;
  std::uint64_t num = 0;                    // Num
  std::vector<ValuePtr> elems;              // Seq
  TypePtr elem_type;                        // Seq
  TermPtr lam;                              // Closure: the original Lam node
  EnvPtr env;                               // Closure
  std::function<ValuePtr(const ValuePtr&)> native;  // Native
};

ValuePtr num_value(std::uint64_t n);
ValuePtr seq_value(std::vector<ValuePtr> elems, TypePtr elem_type);
ValuePtr native_value(std::function<ValuePtr(const ValuePtr&)> fn);

constexpr std::uint64_t kDefaultStepBudget = 10'000'000;

// Core entry points. steps counts down; hitting zero raises
// StepBudgetExceeded.
ValuePtr eval(const TermPtr& t, const EnvPtr& env, std::uint64_t& steps);
ValuePtr apply_value(const ValuePtr& f, const ValuePtr& a,
                     std::uint64_t& steps);

// Closed-term normalization with the default budget.
ValuePtr normalize(const TermPtr& t);
// normalize(f a0 a1 ...).
ValuePtr apply_closed(const TermPtr& f, const std::vector<TermPtr>& args);

// Ground values (and closures over ground environments) back to terms.
TermPtr value_to_term(const ValuePtr& v);
// Structural equality on ground values; false when functions are involved.
bool value_eq(const ValuePtr& a, const ValuePtr& b);

// Returns a term computing the maximum element of s (0 for the empty list).
// Works for open s; type-checked when a context/table is supplied.
TermPtr max_of_list(const TermPtr& s,
                    const std::map<std::string, TypePtr>& ctx = {},
                    const SymbolTable& tab = {});

}  // namespace nsa
