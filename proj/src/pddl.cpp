#include "tamp/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace tamp::pddl {

namespace {

struct Sexp {
    bool is_list = false;
    std::string token;
    std::vector<Sexp> kids;
    int line = 1, col = 1;

    bool is_symbol() const { return !is_list; }
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Sexp parse_one() {
        skip_ws();
        if (eof()) fail("unexpected end of input");
        if (peek() == '(') return parse_list();
        return parse_token();
    }

    void expect_eof() {
        skip_ws();
        if (!eof()) fail("trailing content after expression");
    }

  private:
    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    char take() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == ';') {
                while (!eof() && peek() != '\n') take();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

    Sexp parse_list() {
        Sexp node;
        node.is_list = true;
        node.line = line_;
        node.col = col_;
        take();  // '('
        while (true) {
            skip_ws();
            if (eof()) throw ParseError("unclosed '('", node.line, node.col);
            if (peek() == ')') {
                take();
                return node;
            }
            node.kids.push_back(parse_one());
        }
    }

    Sexp parse_token() {
        Sexp node;
        node.line = line_;
        node.col = col_;
        while (!eof() && peek() != '(' && peek() != ')' && peek() != ';' &&
               !std::isspace(static_cast<unsigned char>(peek()))) {
            node.token.push_back(
                static_cast<char>(std::tolower(static_cast<unsigned char>(take()))));
        }
        if (node.token.empty()) fail("empty token");
        return node;
    }
};

[[noreturn]] void fail_at(const Sexp& s, const std::string& msg) {
    throw ParseError(msg, s.line, s.col);
}

const Sexp& expect_list(const Sexp& s, const std::string& what) {
    if (!s.is_list) fail_at(s, "expected " + what + " list");
    return s;
}

const std::string& expect_symbol(const Sexp& s, const std::string& what) {
    if (s.is_list) fail_at(s, "expected " + what);
    return s.token;
}

// Parses "n1 n2 - t1 n3 - t2 n4" style typed lists; untyped names get
// "object".
std::vector<TypedName> parse_typed_list(const std::vector<Sexp>& items, std::size_t begin,
                                        const Sexp& ctx) {
    std::vector<TypedName> out;
    std::vector<std::string> pending;
    for (std::size_t i = begin; i < items.size(); ++i) {
        const std::string& tok = expect_symbol(items[i], "name in typed list");
        if (tok == "-") {
            if (pending.empty()) fail_at(items[i], "dangling '-' in typed list");
            if (i + 1 >= items.size()) fail_at(items[i], "missing type after '-'");
            const std::string& type = expect_symbol(items[i + 1], "type name");
            for (auto& n : pending) out.push_back({n, type});
            pending.clear();
            ++i;
        } else {
            pending.push_back(tok);
        }
    }
    for (auto& n : pending) out.push_back({n, "object"});
    (void)ctx;
    return out;
}

Literal parse_literal(const Sexp& s, bool allow_negated) {
    const Sexp& list = expect_list(s, "literal");
    if (list.kids.empty()) fail_at(s, "empty literal");
    const std::string& head = expect_symbol(list.kids[0], "predicate name");
    if (head == "not") {
        if (!allow_negated) fail_at(s, "negation not allowed here");
        if (list.kids.size() != 2) fail_at(s, "'not' takes exactly one literal");
        Literal inner = parse_literal(list.kids[1], false);
        inner.negated = true;
        return inner;
    }
    Literal lit;
    lit.pred = head;
    for (std::size_t i = 1; i < list.kids.size(); ++i)
        lit.args.push_back(expect_symbol(list.kids[i], "literal argument"));
    return lit;
}

std::vector<Literal> parse_condition(const Sexp& s, bool allow_negated) {
    const Sexp& list = expect_list(s, "condition");
    if (!list.kids.empty() && list.kids[0].is_symbol() && list.kids[0].token == "and") {
        std::vector<Literal> out;
        for (std::size_t i = 1; i < list.kids.size(); ++i) {
            auto sub = parse_condition(list.kids[i], allow_negated);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }
    return {parse_literal(s, allow_negated)};
}

void check_literal(const Sexp& at, const DomainDef& d, const ActionSchema& schema,
                   const Literal& lit) {
    const Predicate* pred = d.find_predicate(lit.pred);
    if (!pred) fail_at(at, "unknown predicate '" + lit.pred + "'");
    if (pred->params.size() != lit.args.size())
        fail_at(at, "predicate '" + lit.pred + "' expects " +
                        std::to_string(pred->params.size()) + " arguments");
    for (std::size_t i = 0; i < lit.args.size(); ++i) {
        const std::string& arg = lit.args[i];
        if (arg.empty() || arg[0] != '?')
            fail_at(at, "schema literal argument '" + arg + "' must be a parameter");
        auto it = std::find_if(schema.params.begin(), schema.params.end(),
                               [&](const TypedName& p) { return p.name == arg; });
        if (it == schema.params.end())
            fail_at(at, "unknown parameter '" + arg + "' in action '" + schema.name + "'");
        if (!d.is_subtype(it->type, pred->params[i].type))
            fail_at(at, "parameter '" + arg + "' of type '" + it->type +
                            "' does not fit predicate '" + lit.pred + "'");
    }
}

ActionSchema parse_action(const Sexp& s, const DomainDef& d, bool negative_ok) {
    ActionSchema schema;
    const auto& kids = s.kids;
    if (kids.size() < 2 || !kids[1].is_symbol()) fail_at(s, "action needs a name");
    schema.name = kids[1].token;

    for (std::size_t i = 2; i < kids.size(); i += 2) {
        const std::string& key = expect_symbol(kids[i], "action section keyword");
        if (i + 1 >= kids.size()) fail_at(kids[i], "missing value after " + key);
        const Sexp& val = kids[i + 1];
        if (key == ":parameters") {
            schema.params = parse_typed_list(expect_list(val, "parameters").kids, 0, val);
            for (const auto& p : schema.params) {
                if (p.name.empty() || p.name[0] != '?')
                    fail_at(val, "parameter '" + p.name + "' must start with '?'");
                if (p.type != "object" && !d.type_parent.count(p.type))
                    fail_at(val, "unknown type '" + p.type + "'");
            }
        } else if (key == ":precondition") {
            schema.preconditions = parse_condition(val, negative_ok);
        } else if (key == ":effect") {
            for (auto& lit : parse_condition(val, true)) {
                if (lit.negated) {
                    lit.negated = false;
                    schema.del_effects.push_back(lit);
                } else {
                    schema.add_effects.push_back(lit);
                }
            }
        } else {
            fail_at(kids[i], "unsupported action section '" + key + "'");
        }
    }
    for (std::size_t i = 0; i < schema.params.size(); ++i)
        for (std::size_t j = i + 1; j < schema.params.size(); ++j)
            if (schema.params[i].name == schema.params[j].name)
                fail_at(s, "duplicate parameter '" + schema.params[i].name + "'");

    for (const auto& lit : schema.preconditions) check_literal(s, d, schema, lit);
    for (const auto& lit : schema.add_effects) check_literal(s, d, schema, lit);
    for (const auto& lit : schema.del_effects) check_literal(s, d, schema, lit);
    return schema;
}

GroundAtom parse_ground_atom(const Sexp& s, const DomainDef& d,
                             const std::map<std::string, std::string>& object_type) {
    Literal lit = parse_literal(s, false);
    const Predicate* pred = d.find_predicate(lit.pred);
    if (!pred) fail_at(s, "unknown predicate '" + lit.pred + "'");
    if (pred->params.size() != lit.args.size())
        fail_at(s, "predicate '" + lit.pred + "' expects " +
                        std::to_string(pred->params.size()) + " arguments");
    for (std::size_t i = 0; i < lit.args.size(); ++i) {
        auto it = object_type.find(lit.args[i]);
        if (it == object_type.end()) fail_at(s, "unknown object '" + lit.args[i] + "'");
        if (!d.is_subtype(it->second, pred->params[i].type))
            fail_at(s, "object '" + lit.args[i] + "' does not fit predicate '" + lit.pred + "'");
    }
    return {lit.pred, lit.args};
}

void emit_typed(std::ostringstream& out, const std::vector<TypedName>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out << " ";
        out << names[i].name << " - " << names[i].type;
    }
}

void emit_literal(std::ostringstream& out, const Literal& lit, bool negated) {
    if (negated) out << "(not ";
    out << "(" << lit.pred;
    for (const auto& a : lit.args) out << " " << a;
    out << ")";
    if (negated) out << ")";
}

}  // namespace

bool DomainDef::is_subtype(const std::string& t, const std::string& ancestor) const {
    if (ancestor == "object") return true;
    std::string cur = t;
    for (int guard = 0; guard < 64; ++guard) {
        if (cur == ancestor) return true;
        if (cur == "object") return false;
        auto it = type_parent.find(cur);
        if (it == type_parent.end()) return false;
        cur = it->second;
    }
    return false;
}

const Predicate* DomainDef::find_predicate(const std::string& name) const {
    for (const auto& p : predicates)
        if (p.name == name) return &p;
    return nullptr;
}

std::string GroundAtom::str() const {
    std::string out = "(" + pred;
    for (const auto& a : args) out += " " + a;
    out += ")";
    return out;
}

GroundAtom parse_atom(const std::string& text) {
    Lexer lex(text);
    Sexp s = lex.parse_one();
    lex.expect_eof();
    Literal lit = parse_literal(s, false);
    return {lit.pred, lit.args};
}

DomainDef parse_domain(const std::string& text) {
    Lexer lex(text);
    Sexp root = lex.parse_one();
    lex.expect_eof();
    expect_list(root, "define");
    if (root.kids.empty() || !root.kids[0].is_symbol() || root.kids[0].token != "define")
        fail_at(root, "expected (define (domain ...) ...)");

    DomainDef d;
    bool negative_ok = false;
    std::vector<const Sexp*> action_nodes;
    for (std::size_t i = 1; i < root.kids.size(); ++i) {
        const Sexp& sec = expect_list(root.kids[i], "domain section");
        if (sec.kids.empty()) fail_at(sec, "empty domain section");
        const std::string& head = expect_symbol(sec.kids[0], "section keyword");
        if (head == "domain") {
            if (sec.kids.size() != 2) fail_at(sec, "(domain NAME)");
            d.name = expect_symbol(sec.kids[1], "domain name");
        } else if (head == ":requirements") {
            for (std::size_t j = 1; j < sec.kids.size(); ++j) {
                const std::string& req = expect_symbol(sec.kids[j], "requirement");
                if (req != ":strips" && req != ":typing" && req != ":negative-preconditions")
                    fail_at(sec.kids[j], "unsupported requirement '" + req + "'");
                if (req == ":negative-preconditions") negative_ok = true;
                d.requirements.push_back(req);
            }
        } else if (head == ":types") {
            for (const auto& t : parse_typed_list(sec.kids, 1, sec)) {
                if (d.type_parent.count(t.name)) fail_at(sec, "duplicate type '" + t.name + "'");
                d.type_parent[t.name] = t.type;
            }
            for (const auto& [t, parent] : d.type_parent)
                if (parent != "object" && !d.type_parent.count(parent))
                    fail_at(sec, "undeclared parent type '" + parent + "'");
        } else if (head == ":predicates") {
            for (std::size_t j = 1; j < sec.kids.size(); ++j) {
                const Sexp& pl = expect_list(sec.kids[j], "predicate");
                if (pl.kids.empty()) fail_at(pl, "empty predicate");
                Predicate pred;
                pred.name = expect_symbol(pl.kids[0], "predicate name");
                pred.params = parse_typed_list(pl.kids, 1, pl);
                for (const auto& p : pred.params) {
                    if (p.name.empty() || p.name[0] != '?')
                        fail_at(pl, "predicate parameter '" + p.name + "' must start with '?'");
                    if (p.type != "object" && !d.type_parent.count(p.type))
                        fail_at(pl, "unknown type '" + p.type + "'");
                }
                if (d.find_predicate(pred.name))
                    fail_at(pl, "duplicate predicate '" + pred.name + "'");
                d.predicates.push_back(std::move(pred));
            }
        } else if (head == ":action") {
            action_nodes.push_back(&sec);  // parsed after predicates/types are known
        } else {
            fail_at(sec, "unsupported domain section '" + head + "'");
        }
    }
    if (d.name.empty()) fail_at(root, "missing (domain NAME)");
    for (const Sexp* node : action_nodes) {
        ActionSchema schema = parse_action(*node, d, negative_ok);
        for (const auto& existing : d.actions)
            if (existing.name == schema.name)
                fail_at(*node, "duplicate action '" + schema.name + "'");
        d.actions.push_back(std::move(schema));
    }
    return d;
}

ProblemDef parse_problem(const std::string& text, const DomainDef& domain) {
    Lexer lex(text);
    Sexp root = lex.parse_one();
    lex.expect_eof();
    expect_list(root, "define");
    if (root.kids.empty() || !root.kids[0].is_symbol() || root.kids[0].token != "define")
        fail_at(root, "expected (define (problem ...) ...)");

    ProblemDef p;
    std::map<std::string, std::string> object_type;
    const Sexp* init_node = nullptr;
    const Sexp* goal_node = nullptr;
    for (std::size_t i = 1; i < root.kids.size(); ++i) {
        const Sexp& sec = expect_list(root.kids[i], "problem section");
        if (sec.kids.empty()) fail_at(sec, "empty problem section");
        const std::string& head = expect_symbol(sec.kids[0], "section keyword");
        if (head == "problem") {
            if (sec.kids.size() != 2) fail_at(sec, "(problem NAME)");
            p.name = expect_symbol(sec.kids[1], "problem name");
        } else if (head == ":domain") {
            if (sec.kids.size() != 2) fail_at(sec, "(:domain NAME)");
            p.domain_name = expect_symbol(sec.kids[1], "domain name");
            if (p.domain_name != domain.name)
                fail_at(sec, "problem requires domain '" + p.domain_name + "'");
        } else if (head == ":objects") {
            p.objects = parse_typed_list(sec.kids, 1, sec);
            for (const auto& o : p.objects) {
                if (o.type != "object" && !domain.type_parent.count(o.type))
                    fail_at(sec, "unknown type '" + o.type + "'");
                if (object_type.count(o.name)) fail_at(sec, "duplicate object '" + o.name + "'");
                object_type[o.name] = o.type;
            }
        } else if (head == ":init") {
            init_node = &sec;
        } else if (head == ":goal") {
            goal_node = &sec;
        } else {
            fail_at(sec, "unsupported problem section '" + head + "'");
        }
    }
    if (p.name.empty()) fail_at(root, "missing (problem NAME)");
    if (p.domain_name.empty()) fail_at(root, "missing (:domain NAME)");
    if (init_node) {
        for (std::size_t j = 1; j < init_node->kids.size(); ++j)
            p.init.push_back(parse_ground_atom(init_node->kids[j], domain, object_type));
    }
    if (goal_node) {
        if (goal_node->kids.size() != 2) fail_at(*goal_node, "(:goal CONDITION)");
        const Sexp& cond = expect_list(goal_node->kids[1], "goal condition");
        std::vector<const Sexp*> atom_nodes;
        if (!cond.kids.empty() && cond.kids[0].is_symbol() && cond.kids[0].token == "and") {
            for (std::size_t j = 1; j < cond.kids.size(); ++j) atom_nodes.push_back(&cond.kids[j]);
        } else {
            atom_nodes.push_back(&cond);
        }
        for (const Sexp* node : atom_nodes) {
            if (node->is_list && !node->kids.empty() && node->kids[0].is_symbol() &&
                node->kids[0].token == "not")
                fail_at(*node, "goals must be positive conjunctions");
            p.goal.push_back(parse_ground_atom(*node, domain, object_type));
        }
    }
    std::sort(p.init.begin(), p.init.end());
    p.init.erase(std::unique(p.init.begin(), p.init.end()), p.init.end());
    std::sort(p.goal.begin(), p.goal.end());
    p.goal.erase(std::unique(p.goal.begin(), p.goal.end()), p.goal.end());
    return p;
}

std::string emit_domain(const DomainDef& d) {
    std::ostringstream out;
    out << "(define (domain " << d.name << ")\n";
    if (!d.requirements.empty()) {
        out << "  (:requirements";
        for (const auto& r : d.requirements) out << " " << r;
        out << ")\n";
    }
    if (!d.type_parent.empty()) {
        out << "  (:types";
        for (const auto& [t, parent] : d.type_parent) out << " " << t << " - " << parent;
        out << ")\n";
    }
    out << "  (:predicates";
    for (const auto& pred : d.predicates) {
        out << "\n    (" << pred.name;
        if (!pred.params.empty()) {
            out << " ";
            emit_typed(out, pred.params);
        }
        out << ")";
    }
    out << ")\n";
    for (const auto& a : d.actions) {
        out << "  (:action " << a.name << "\n    :parameters (";
        emit_typed(out, a.params);
        out << ")\n    :precondition (and";
        for (const auto& lit : a.preconditions) {
            out << " ";
            emit_literal(out, lit, lit.negated);
        }
        out << ")\n    :effect (and";
        for (const auto& lit : a.add_effects) {
            out << " ";
            emit_literal(out, lit, false);
        }
        for (const auto& lit : a.del_effects) {
            out << " ";
            emit_literal(out, lit, true);
        }
        out << "))\n";
    }
    out << ")\n";
    return out.str();
}

std::string emit_problem(const ProblemDef& p) {
    std::ostringstream out;
    out << "(define (problem " << p.name << ")\n  (:domain " << p.domain_name << ")\n";
    out << "  (:objects ";
    emit_typed(out, p.objects);
    out << ")\n  (:init";
    for (const auto& a : p.init) out << " " << a.str();
    out << ")\n  (:goal (and";
    for (const auto& a : p.goal) out << " " << a.str();
    out << ")))\n";
    return out.str();
}

AtomTable AtomTable::enumerate(const DomainDef& d, const ProblemDef& p) {
    AtomTable table;
    std::vector<std::string> sorted_objects;
    for (const auto& o : p.objects) sorted_objects.push_back(o.name);
    std::sort(sorted_objects.begin(), sorted_objects.end());
    std::map<std::string, std::string> object_type;
    for (const auto& o : p.objects) object_type[o.name] = o.type;

    for (const auto& pred : d.predicates) {
        std::vector<std::vector<std::string>> candidates;
        for (const auto& param : pred.params) {
            std::vector<std::string> fit;
            for (const auto& name : sorted_objects)
                if (d.is_subtype(object_type[name], param.type)) fit.push_back(name);
            candidates.push_back(std::move(fit));
        }
        std::vector<std::size_t> idx(pred.params.size(), 0);
        while (true) {
            GroundAtom atom{pred.name, {}};
            bool done = false;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                if (candidates[i].empty()) {
                    done = true;
                    break;
                }
                atom.args.push_back(candidates[i][idx[i]]);
            }
            if (done) break;
            table.atoms_.push_back(std::move(atom));
            if (idx.empty()) break;
            std::size_t k = idx.size();
            while (k > 0) {
                --k;
                if (++idx[k] < candidates[k].size()) break;
                idx[k] = 0;
                if (k == 0) {
                    k = idx.size() + 1;
                    break;
                }
            }
            if (k == idx.size() + 1) break;
        }
    }
    std::sort(table.atoms_.begin(), table.atoms_.end());
    table.atoms_.erase(std::unique(table.atoms_.begin(), table.atoms_.end()), table.atoms_.end());
    for (std::size_t i = 0; i < table.atoms_.size(); ++i)
        table.index_[table.atoms_[i]] = static_cast<int>(i);
    return table;
}

int AtomTable::id(const GroundAtom& a) const {
    auto it = index_.find(a);
    return it == index_.end() ? -1 : it->second;
}

SymbolicState::SymbolicState(std::vector<int> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool SymbolicState::contains(int id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id);
}

bool SymbolicState::superset_of(std::span<const int> ids) const {
    return std::includes(ids_.begin(), ids_.end(), ids.begin(), ids.end());
}

std::vector<GroundAtom> SymbolicState::atoms(const AtomTable& table) const {
    std::vector<GroundAtom> out;
    out.reserve(ids_.size());
    for (int id : ids_) out.push_back(table.atom(id));
    return out;
}

std::string SymbolicState::str(const AtomTable& table) const {
    std::string out;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (i) out += " ";
        out += table.atom(ids_[i]).str();
    }
    return out;
}

std::vector<GroundAction> ground(const DomainDef& d, const ProblemDef& p,
                                 const AtomTable& table) {
    std::vector<std::string> sorted_objects;
    for (const auto& o : p.objects) sorted_objects.push_back(o.name);
    std::sort(sorted_objects.begin(), sorted_objects.end());
    std::map<std::string, std::string> object_type;
    for (const auto& o : p.objects) object_type[o.name] = o.type;

    std::vector<GroundAction> out;
    for (std::size_t si = 0; si < d.actions.size(); ++si) {
        const ActionSchema& schema = d.actions[si];
        std::vector<std::vector<std::string>> candidates;
        for (const auto& param : schema.params) {
            std::vector<std::string> fit;
            for (const auto& name : sorted_objects)
                if (d.is_subtype(object_type[name], param.type)) fit.push_back(name);
            candidates.push_back(std::move(fit));
        }

        std::map<std::string, std::size_t> param_index;
        for (std::size_t i = 0; i < schema.params.size(); ++i)
            param_index[schema.params[i].name] = i;

        auto instantiate = [&](const std::vector<std::string>& binding) {
            GroundAction ga;
            ga.schema_index = static_cast<int>(si);
            ga.binding = binding;
            ga.name = "(" + schema.name;
            for (const auto& b : binding) ga.name += " " + b;
            ga.name += ")";
            auto ground_lit = [&](const Literal& lit) {
                GroundAtom atom{lit.pred, {}};
                for (const auto& arg : lit.args) atom.args.push_back(binding[param_index[arg]]);
                int id = table.id(atom);
                if (id < 0) throw std::logic_error("grounded atom missing from table");
                return id;
            };
            for (const auto& lit : schema.preconditions)
                (lit.negated ? ga.pre_neg : ga.pre_pos).push_back(ground_lit(lit));
            for (const auto& lit : schema.add_effects) ga.add.push_back(ground_lit(lit));
            for (const auto& lit : schema.del_effects) ga.del.push_back(ground_lit(lit));
            for (auto* v : {&ga.pre_pos, &ga.pre_neg, &ga.add, &ga.del}) {
                std::sort(v->begin(), v->end());
                v->erase(std::unique(v->begin(), v->end()), v->end());
            }
            out.push_back(std::move(ga));
        };

        std::vector<std::string> binding(schema.params.size());
        std::vector<std::size_t> idx(schema.params.size(), 0);
        if (schema.params.empty()) {
            instantiate(binding);
            continue;
        }
        bool any_empty = std::any_of(candidates.begin(), candidates.end(),
                                     [](const auto& c) { return c.empty(); });
        if (any_empty) continue;
        while (true) {
            for (std::size_t i = 0; i < idx.size(); ++i) binding[i] = candidates[i][idx[i]];
            instantiate(binding);
            std::size_t k = idx.size();
            bool rolled = true;
            while (k > 0) {
                --k;
                if (++idx[k] < candidates[k].size()) {
                    rolled = false;
                    break;
                }
                idx[k] = 0;
            }
            if (rolled) break;
        }
    }
    return out;
}

bool applicable(const SymbolicState& s, const GroundAction& a) {
    if (!s.superset_of(a.pre_pos)) return false;
    for (int id : a.pre_neg)
        if (s.contains(id)) return false;
    return true;
}

SymbolicState apply(const SymbolicState& s, const GroundAction& a) {
    if (!applicable(s, a)) throw std::invalid_argument("action " + a.name + " is not applicable");
    std::vector<int> next;
    next.reserve(s.ids().size() + a.add.size());
    std::set_difference(s.ids().begin(), s.ids().end(), a.del.begin(), a.del.end(),
                        std::back_inserter(next));
    std::vector<int> merged;
    merged.reserve(next.size() + a.add.size());
    std::set_union(next.begin(), next.end(), a.add.begin(), a.add.end(),
                   std::back_inserter(merged));
    return SymbolicState(std::move(merged));
}

Task Task::make(DomainDef d, ProblemDef p) {
    Task t;
    t.domain = std::move(d);
    t.problem = std::move(p);
    t.atoms = AtomTable::enumerate(t.domain, t.problem);
    t.actions = ground(t.domain, t.problem, t.atoms);
    std::vector<int> init_ids;
    for (const auto& a : t.problem.init) init_ids.push_back(t.atoms.id(a));
    t.init = SymbolicState(std::move(init_ids));
    for (const auto& a : t.problem.goal) t.goal_ids.push_back(t.atoms.id(a));
    std::sort(t.goal_ids.begin(), t.goal_ids.end());
    return t;
}

}  // namespace tamp::pddl
