#pragma once

namespace tamp::domains {

// Four-operator blocks domain. Kept in sync with the geometric executor:
// pickup/unstack grasp the first argument, putdown/stack place it.
inline constexpr const char* kBlocksworld = R"((define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x - block ?y - block)
               (on-table ?x - block)
               (clear ?x - block)
               (arm-empty)
               (holding ?x - block))
  (:action pickup
    :parameters (?x - block)
    :precondition (and (clear ?x) (on-table ?x) (arm-empty))
    :effect (and (holding ?x)
                 (not (clear ?x)) (not (on-table ?x)) (not (arm-empty))))
  (:action putdown
    :parameters (?x - block)
    :precondition (and (holding ?x))
    :effect (and (clear ?x) (on-table ?x) (arm-empty)
                 (not (holding ?x))))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (clear ?x) (on ?x ?y) (arm-empty)
                 (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (arm-empty))
    :effect (and (holding ?x) (clear ?y)
                 (not (on ?x ?y)) (not (clear ?x)) (not (arm-empty)))))
)";

// Counter-top cooking domain. clean and cook are appliance operations: the
// arm does not move, the executor only records the produced flag.
inline constexpr const char* kKitchen = R"((define (domain kitchen)
  (:requirements :strips :typing)
  (:types food region)
  (:predicates (at ?f - food ?r - region)
               (holding ?f - food)
               (arm-empty)
               (cleaned ?f - food)
               (cooked ?f - food)
               (is-sink ?r - region)
               (is-stove ?r - region))
  (:action pickup
    :parameters (?f - food ?r - region)
    :precondition (and (at ?f ?r) (arm-empty))
    :effect (and (holding ?f)
                 (not (at ?f ?r)) (not (arm-empty))))
  (:action putdown
    :parameters (?f - food ?r - region)
    :precondition (and (holding ?f))
    :effect (and (at ?f ?r) (arm-empty)
                 (not (holding ?f))))
  (:action clean
    :parameters (?f - food ?r - region)
    :precondition (and (at ?f ?r) (is-sink ?r) (arm-empty))
    :effect (and (cleaned ?f)))
  (:action cook
    :parameters (?f - food ?r - region)
    :precondition (and (at ?f ?r) (is-stove ?r) (cleaned ?f) (arm-empty))
    :effect (and (cooked ?f))))
)";

}  // namespace tamp::domains
