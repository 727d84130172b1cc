#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tamp::pddl {

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
          line(line_),
          col(col_) {}
};

struct TypedName {
    std::string name;
    std::string type = "object";
    bool operator==(const TypedName&) const = default;
};

struct Predicate {
    std::string name;
    std::vector<TypedName> params;
};

// Literal template inside a schema; args are parameter names (with '?').
struct Literal {
    std::string pred;
    std::vector<std::string> args;
    bool negated = false;
};

struct ActionSchema {
    std::string name;
    std::vector<TypedName> params;
    std::vector<Literal> preconditions;
    std::vector<Literal> add_effects;
    std::vector<Literal> del_effects;
};

struct DomainDef {
    std::string name;
    std::vector<std::string> requirements;
    std::map<std::string, std::string> type_parent;  // type -> parent, roots point to "object"
    std::vector<Predicate> predicates;
    std::vector<ActionSchema> actions;

    bool is_subtype(const std::string& t, const std::string& ancestor) const;
    const Predicate* find_predicate(const std::string& name) const;
};

struct GroundAtom {
    std::string pred;
    std::vector<std::string> args;

    std::string str() const;
    auto operator<=>(const GroundAtom&) const = default;
};

// Parses "(pred a b)" back into an atom.
GroundAtom parse_atom(const std::string& text);

struct ProblemDef {
    std::string name;
    std::string domain_name;
    std::vector<TypedName> objects;
    std::vector<GroundAtom> init;
    std::vector<GroundAtom> goal;
};

DomainDef parse_domain(const std::string& text);
ProblemDef parse_problem(const std::string& text, const DomainDef& domain);
std::string emit_domain(const DomainDef& d);
std::string emit_problem(const ProblemDef& p);

// All type-correct ground atoms for a domain/problem pair, lexicographically
// ordered by (predicate, args). Index in the table is the atom id.
class AtomTable {
  public:
    static AtomTable enumerate(const DomainDef& d, const ProblemDef& p);

    int id(const GroundAtom& a) const;  // -1 when absent
    const GroundAtom& atom(int id) const { return atoms_.at(static_cast<std::size_t>(id)); }
    int size() const { return static_cast<int>(atoms_.size()); }

  private:
    std::vector<GroundAtom> atoms_;
    std::map<GroundAtom, int> index_;
};

// Set of true atoms, stored as sorted unique atom ids.
class SymbolicState {
  public:
    SymbolicState() = default;
    explicit SymbolicState(std::vector<int> ids);

    bool contains(int id) const;
    bool superset_of(std::span<const int> ids) const;
    const std::vector<int>& ids() const { return ids_; }
    std::vector<GroundAtom> atoms(const AtomTable& table) const;
    std::string str(const AtomTable& table) const;

    auto operator<=>(const SymbolicState&) const = default;

  private:
    std::vector<int> ids_;
};

struct GroundAction {
    std::string name;  // "(schema arg ...)"
    int schema_index = -1;
    std::vector<std::string> binding;
    std::vector<int> pre_pos, pre_neg, add, del;  // sorted atom ids
};

// Everything the planners need, grounded and interned.
struct Task {
    DomainDef domain;
    ProblemDef problem;
    AtomTable atoms;
    std::vector<GroundAction> actions;
    SymbolicState init;
    std::vector<int> goal_ids;  // sorted

    static Task make(DomainDef d, ProblemDef p);
};

// All type-correct groundings, ordered by schema declaration order then
// lexicographic bindings.
std::vector<GroundAction> ground(const DomainDef& d, const ProblemDef& p, const AtomTable& table);

bool applicable(const SymbolicState& s, const GroundAction& a);

// Precondition check plus add/delete. Throws std::invalid_argument when the
// action is not applicable.
SymbolicState apply(const SymbolicState& s, const GroundAction& a);

}  // namespace tamp::pddl
