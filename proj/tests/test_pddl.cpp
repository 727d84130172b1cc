#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <set>

#include "tamp/pddl.hpp"

using namespace tamp::pddl;

namespace {

const char* kBlocksworld = R"((define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block - object)
  (:predicates (on ?x - block ?y - block) (on-table ?x - block) (clear ?x - block)
               (holding ?x - block) (arm-empty))
  (:action pickup
    :parameters (?x - block)
    :precondition (and (clear ?x) (on-table ?x) (arm-empty))
    :effect (and (holding ?x) (not (clear ?x)) (not (on-table ?x)) (not (arm-empty))))
  (:action putdown
    :parameters (?x - block)
    :precondition (and (holding ?x))
    :effect (and (clear ?x) (on-table ?x) (arm-empty) (not (holding ?x))))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (clear ?x) (on ?x ?y) (arm-empty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (clear ?x) (on ?x ?y) (arm-empty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (on ?x ?y)) (not (arm-empty)))))
)";

const char* kTwoBlocks = R"((define (problem two)
  (:domain blocksworld)
  (:objects a b - block)
  (:init (on-table a) (on-table b) (clear a) (clear b) (arm-empty))
  (:goal (and (on a b))))
)";

// Oracle: a STRIPS interpreter over atom-string sets, sharing nothing with the
// interned implementation under test.
using StrState = std::set<std::string>;

struct StrAction {
    std::string name;
    StrState pre, add, del;
};

std::vector<StrAction> oracle_ground_blocksworld(const std::vector<std::string>& blocks) {
    std::vector<StrAction> out;
    auto atom = [](const std::string& p, std::initializer_list<std::string> args) {
        std::string s = "(" + p;
        for (const auto& a : args) s += " " + a;
        return s + ")";
    };
    for (const auto& x : blocks) {
        out.push_back({"(pickup " + x + ")",
                       {atom("clear", {x}), atom("on-table", {x}), "(arm-empty)"},
                       {atom("holding", {x})},
                       {atom("clear", {x}), atom("on-table", {x}), "(arm-empty)"}});
        out.push_back({"(putdown " + x + ")",
                       {atom("holding", {x})},
                       {atom("clear", {x}), atom("on-table", {x}), "(arm-empty)"},
                       {atom("holding", {x})}});
        for (const auto& y : blocks) {
            out.push_back({"(stack " + x + " " + y + ")",
                           {atom("holding", {x}), atom("clear", {y})},
                           {atom("clear", {x}), atom("on", {x, y}), "(arm-empty)"},
                           {atom("holding", {x}), atom("clear", {y})}});
            out.push_back({"(unstack " + x + " " + y + ")",
                           {atom("clear", {x}), atom("on", {x, y}), "(arm-empty)"},
                           {atom("holding", {x}), atom("clear", {y})},
                           {atom("clear", {x}), atom("on", {x, y}), "(arm-empty)"}});
        }
    }
    return out;
}

std::set<StrState> oracle_reachable(const StrState& init, const std::vector<StrAction>& actions) {
    std::set<StrState> seen{init};
    std::deque<StrState> queue{init};
    while (!queue.empty()) {
        StrState s = queue.front();
        queue.pop_front();
        for (const auto& a : actions) {
            if (!std::includes(s.begin(), s.end(), a.pre.begin(), a.pre.end())) continue;
            StrState next;
            std::set_difference(s.begin(), s.end(), a.del.begin(), a.del.end(),
                                std::inserter(next, next.end()));
            next.insert(a.add.begin(), a.add.end());
            if (seen.insert(next).second) queue.push_back(next);
        }
    }
    return seen;
}

StrState to_strings(const SymbolicState& s, const AtomTable& table) {
    StrState out;
    for (const auto& a : s.atoms(table)) out.insert(a.str());
    return out;
}

}  // namespace

TEST_CASE("domain parse extracts schemas, types, and predicates") {
    DomainDef d = parse_domain(kBlocksworld);
    CHECK(d.name == "blocksworld");
    CHECK(d.type_parent.at("block") == "object");
    CHECK(d.predicates.size() == 5);
    REQUIRE(d.actions.size() == 4);
    CHECK(d.actions[0].name == "pickup");
    CHECK(d.actions[0].params.size() == 1);
    CHECK(d.actions[0].preconditions.size() == 3);
    CHECK(d.actions[0].add_effects.size() == 1);
    CHECK(d.actions[0].del_effects.size() == 3);
    CHECK(d.is_subtype("block", "object"));
    CHECK_FALSE(d.is_subtype("object", "block"));
}

TEST_CASE("parse errors carry line and column") {
    SUBCASE("unclosed paren") {
        try {
            parse_domain("(define (domain d)\n  (:predicates (p)");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 2);
        }
    }
    SUBCASE("unknown predicate in action") {
        std::string text = R"((define (domain d)
  (:requirements :strips)
  (:predicates (p ?x))
  (:action a :parameters (?x) :precondition (and (q ?x)) :effect (and (p ?x)))))";
        CHECK_THROWS_AS(parse_domain(text), ParseError);
    }
    SUBCASE("arity mismatch in init") {
        DomainDef d = parse_domain(kBlocksworld);
        std::string text = R"((define (problem x) (:domain blocksworld)
  (:objects a - block) (:init (on a)) (:goal (and (clear a)))))";
        CHECK_THROWS_AS(parse_problem(text, d), ParseError);
    }
    SUBCASE("type mismatch in goal") {
        std::string dom = R"((define (domain d)
  (:requirements :strips :typing)
  (:types t1 t2 - object)
  (:predicates (p ?x - t1))))";
        DomainDef d = parse_domain(dom);
        std::string text = R"((define (problem x) (:domain d)
  (:objects o - t2) (:init) (:goal (and (p o)))))";
        CHECK_THROWS_AS(parse_problem(text, d), ParseError);
    }
    SUBCASE("unsupported requirement") {
        CHECK_THROWS_AS(parse_domain("(define (domain d) (:requirements :adl))"), ParseError);
    }
    SUBCASE("negative goal") {
        DomainDef d = parse_domain(kBlocksworld);
        std::string text = R"((define (problem x) (:domain blocksworld)
  (:objects a - block) (:init (clear a)) (:goal (and (not (clear a))))))";
        CHECK_THROWS_AS(parse_problem(text, d), ParseError);
    }
    SUBCASE("negative precondition without the requirement") {
        std::string text = R"((define (domain d)
  (:requirements :strips)
  (:predicates (p ?x))
  (:action a :parameters (?x) :precondition (and (not (p ?x))) :effect (and (p ?x)))))";
        CHECK_THROWS_AS(parse_domain(text), ParseError);
    }
}

TEST_CASE("emit then parse is a fixpoint") {
    DomainDef d1 = parse_domain(kBlocksworld);
    std::string e1 = emit_domain(d1);
    DomainDef d2 = parse_domain(e1);
    CHECK(emit_domain(d2) == e1);

    ProblemDef p1 = parse_problem(kTwoBlocks, d1);
    std::string ep1 = emit_problem(p1);
    ProblemDef p2 = parse_problem(ep1, d2);
    CHECK(emit_problem(p2) == ep1);
}

TEST_CASE("atom table enumerates the typed universe in lexicographic order") {
    DomainDef d = parse_domain(kBlocksworld);
    ProblemDef p = parse_problem(kTwoBlocks, d);
    AtomTable table = AtomTable::enumerate(d, p);

    // on: 4, on-table: 2, clear: 2, holding: 2, arm-empty: 1
    CHECK(table.size() == 11);
    for (int i = 1; i < table.size(); ++i) CHECK(table.atom(i - 1) < table.atom(i));
    CHECK(table.atom(0).str() == "(arm-empty)");
    CHECK(table.id(parse_atom("(on a b)")) >= 0);
    CHECK(table.id(parse_atom("(on b b)")) >= 0);
    CHECK(table.id(GroundAtom{"on", {"a", "c"}}) == -1);
}

TEST_CASE("grounding is ordered by schema then lexicographic bindings") {
    DomainDef d = parse_domain(kBlocksworld);
    ProblemDef p = parse_problem(kTwoBlocks, d);
    AtomTable table = AtomTable::enumerate(d, p);
    auto actions = ground(d, p, table);

    REQUIRE(actions.size() == 12);
    CHECK(actions[0].name == "(pickup a)");
    CHECK(actions[1].name == "(pickup b)");
    CHECK(actions[4].name == "(stack a a)");
    CHECK(actions[5].name == "(stack a b)");
    CHECK(actions[6].name == "(stack b a)");
    CHECK(actions[11].name == "(unstack b b)");
}

TEST_CASE("applicable and apply follow STRIPS semantics") {
    DomainDef d = parse_domain(kBlocksworld);
    ProblemDef p = parse_problem(kTwoBlocks, d);
    Task task = Task::make(d, p);

    const GroundAction* pickup_a = nullptr;
    for (const auto& a : task.actions)
        if (a.name == "(pickup a)") pickup_a = &a;
    REQUIRE(pickup_a);

    CHECK(applicable(task.init, *pickup_a));
    SymbolicState next = apply(task.init, *pickup_a);
    CHECK(to_strings(next, task.atoms) ==
          StrState{"(holding a)", "(on-table b)", "(clear b)"});
    CHECK_FALSE(applicable(next, *pickup_a));
    CHECK_THROWS_AS(apply(next, *pickup_a), std::invalid_argument);
}

TEST_CASE("reachable space matches the string-set oracle") {
    DomainDef d = parse_domain(kBlocksworld);
    ProblemDef p = parse_problem(kTwoBlocks, d);
    Task task = Task::make(d, p);

    auto oracle_actions = oracle_ground_blocksworld({"a", "b"});
    StrState init{"(on-table a)", "(on-table b)", "(clear a)", "(clear b)", "(arm-empty)"};
    auto want = oracle_reachable(init, oracle_actions);
    CHECK(want.size() == 5);

    std::set<StrState> got;
    std::deque<SymbolicState> queue{task.init};
    got.insert(to_strings(task.init, task.atoms));
    std::set<SymbolicState> seen{task.init};
    while (!queue.empty()) {
        SymbolicState s = queue.front();
        queue.pop_front();
        for (const auto& a : task.actions) {
            if (!applicable(s, a)) continue;
            SymbolicState next = apply(s, a);
            if (seen.insert(next).second) {
                got.insert(to_strings(next, task.atoms));
                queue.push_back(next);
            }
        }
    }
    CHECK(got == want);
}

TEST_CASE("goal ids are resolved and sorted") {
    DomainDef d = parse_domain(kBlocksworld);
    ProblemDef p = parse_problem(kTwoBlocks, d);
    Task task = Task::make(d, p);
    REQUIRE(task.goal_ids.size() == 1);
    CHECK(task.atoms.atom(task.goal_ids[0]).str() == "(on a b)");
    CHECK_FALSE(task.init.superset_of(task.goal_ids));
}

TEST_CASE("comments and mixed case are tolerated") {
    std::string text = R"(; header comment
(define (domain Mixed) ; inline
  (:requirements :STRIPS)
  (:predicates (P ?x))
  (:action Move :parameters (?x) :precondition (and (p ?x)) :effect (and (not (P ?x))))))";
    DomainDef d = parse_domain(text);
    CHECK(d.name == "mixed");
    CHECK(d.actions[0].name == "move");
    CHECK(d.actions[0].del_effects[0].pred == "p");
}
