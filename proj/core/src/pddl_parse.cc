// PDDL reading and writing for the STRIPS subset.

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>
#include <unordered_set>

#include "plansel/pddl.h"

namespace plansel {

namespace {

const std::unordered_set<std::string> kUnsupportedFormulaHeads = {
    "or",     "imply",     "forall",   "exists",   "when",
    "=",      "<",         ">",        "<=",       ">=",
    "either", "increase",  "decrease", "assign",   "scale-up",
    "scale-down", "preference",
};

// `at` and `over` are ordinary predicate names unless used as temporal
// qualifiers: (at start (p)), (at end (p)), (over all (p)).
bool IsTemporalQualifier(const SExpr& expr) {
  if (!expr.is_list || expr.items.size() != 3) return false;
  if (!expr.items[0].IsAtom() || !expr.items[1].IsAtom() ||
      !expr.items[2].is_list) {
    return false;
  }
  const std::string& head = expr.items[0].atom;
  const std::string& when = expr.items[1].atom;
  return (head == "at" && (when == "start" || when == "end")) ||
         (head == "over" && when == "all");
}

[[noreturn]] void Fail(const SExpr& where, const std::string& message) {
  std::ostringstream ss;
  ss << where.pos.line << ":" << where.pos.column << ": " << message;
  throw PddlError(ss.str());
}

const std::string& ExpectAtom(const SExpr& expr, const char* what) {
  if (!expr.IsAtom()) Fail(expr, std::string("expected ") + what);
  return expr.atom;
}

const SExpr& ExpectList(const SExpr& expr, const char* what) {
  if (!expr.is_list) Fail(expr, std::string("expected ") + what);
  return expr;
}

bool IsVariable(std::string_view term) {
  return !term.empty() && term.front() == '?';
}

std::vector<TypedName> ParseTypedList(const SExpr& list, size_t begin) {
  std::vector<TypedName> out;
  size_t untyped_from = out.size();
  for (size_t i = begin; i < list.items.size(); ++i) {
    const SExpr& item = list.items[i];
    if (item.is_list) {
      if (item.HasHead("either")) throw UnsupportedConstructError("either");
      Fail(item, "unexpected list in typed list");
    }
    if (item.atom == "-") {
      if (i + 1 >= list.items.size()) Fail(item, "missing type after '-'");
      const SExpr& type = list.items[++i];
      if (type.HasHead("either")) throw UnsupportedConstructError("either");
      const std::string& type_name = ExpectAtom(type, "type name");
      for (size_t j = untyped_from; j < out.size(); ++j) {
        out[j].type = type_name;
      }
      untyped_from = out.size();
      continue;
    }
    out.push_back({item.atom, "object"});
  }
  return out;
}

Atom ParseAtom(const SExpr& expr) {
  ExpectList(expr, "atom");
  if (expr.items.empty()) Fail(expr, "empty atom");
  const SExpr& head = expr.items.front();
  if (head.is_list) Fail(head, "atom head must be a name");
  if (kUnsupportedFormulaHeads.count(head.atom) > 0 ||
      IsTemporalQualifier(expr)) {
    throw UnsupportedConstructError(head.atom);
  }
  Atom atom;
  atom.predicate = head.atom;
  for (size_t i = 1; i < expr.items.size(); ++i) {
    const SExpr& arg = expr.items[i];
    if (arg.is_list) {
      if (!arg.items.empty() && arg.items.front().IsAtom()) {
        const std::string& h = arg.items.front().atom;
        if (kUnsupportedFormulaHeads.count(h) > 0 || IsTemporalQualifier(arg) ||
            h == "and" || h == "not") {
          throw UnsupportedConstructError(h);
        }
      }
      Fail(arg, "nested term in atom (function terms are not supported)");
    }
    atom.args.push_back(arg.atom);
  }
  return atom;
}

// Conjunction of literals; nested 'and' is flattened.
void ParseConjunction(const SExpr& expr, std::vector<Literal>* out) {
  ExpectList(expr, "formula");
  if (expr.items.empty()) return;
  if (expr.HasHead("and")) {
    for (size_t i = 1; i < expr.items.size(); ++i) {
      ParseConjunction(expr.items[i], out);
    }
    return;
  }
  if (expr.HasHead("not")) {
    if (expr.items.size() != 2) Fail(expr, "'not' takes one argument");
    const SExpr& inner = ExpectList(expr.items[1], "atom under 'not'");
    if (inner.HasHead("and") || inner.HasHead("not")) {
      throw UnsupportedConstructError("not over a compound formula");
    }
    out->push_back({ParseAtom(inner), true});
    return;
  }
  out->push_back({ParseAtom(expr), false});
}

void ParseEffect(const SExpr& expr, std::vector<Atom>* adds,
                 std::vector<Atom>* deletes) {
  ExpectList(expr, "effect");
  if (expr.items.empty()) return;
  if (expr.HasHead("and")) {
    for (size_t i = 1; i < expr.items.size(); ++i) {
      ParseEffect(expr.items[i], adds, deletes);
    }
    return;
  }
  if (expr.HasHead("not")) {
    if (expr.items.size() != 2) Fail(expr, "'not' takes one argument");
    const SExpr& inner = ExpectList(expr.items[1], "atom under 'not'");
    if (inner.HasHead("and") || inner.HasHead("not")) {
      throw UnsupportedConstructError("not over a compound effect");
    }
    deletes->push_back(ParseAtom(inner));
    return;
  }
  adds->push_back(ParseAtom(expr));
}

void ParseTypes(const SExpr& section, Domain* domain) {
  for (const TypedName& t : ParseTypedList(section, 1)) {
    if (t.name == "object") continue;
    domain->types[t.name] = t.type;
  }
  // Types mentioned only as parents are declared implicitly.
  std::vector<std::string> parents;
  for (const auto& [name, parent] : domain->types) parents.push_back(parent);
  for (const std::string& parent : parents) {
    if (parent != "object" && domain->types.count(parent) == 0) {
      domain->types[parent] = "object";
    }
  }
}

ActionSchema ParseAction(const SExpr& section) {
  if (section.items.size() < 2) Fail(section, "action without a name");
  ActionSchema schema;
  schema.name = ExpectAtom(section.items[1], "action name");
  for (size_t i = 2; i < section.items.size(); ++i) {
    const SExpr& key = section.items[i];
    const std::string& keyword = ExpectAtom(key, "action keyword");
    if (i + 1 >= section.items.size()) Fail(key, "missing value for " + keyword);
    const SExpr& value = section.items[++i];
    if (keyword == ":parameters") {
      schema.parameters = ParseTypedList(ExpectList(value, "parameter list"), 0);
    } else if (keyword == ":precondition") {
      ParseConjunction(value, &schema.preconditions);
    } else if (keyword == ":effect") {
      ParseEffect(value, &schema.add_list, &schema.delete_list);
    } else {
      throw UnsupportedConstructError(keyword);
    }
  }
  return schema;
}

void ExpectDefine(const SExpr& root, const char* kind) {
  if (!root.HasHead("define")) Fail(root, "expected (define ...)");
  if (root.items.size() < 2 || !root.items[1].HasHead(kind) ||
      root.items[1].items.size() != 2) {
    Fail(root, std::string("expected (") + kind + " <name>)");
  }
}

void CheckAtomAgainstDomain(const Domain& domain, const Atom& atom,
                            const std::string& context) {
  const PredicateDecl* decl = domain.FindPredicate(atom.predicate);
  if (decl == nullptr) {
    throw PddlError(context + ": undeclared predicate '" + atom.predicate +
                    "'");
  }
  if (decl->arity() != atom.args.size()) {
    throw PddlError(context + ": predicate '" + atom.predicate + "' expects " +
                    std::to_string(decl->arity()) + " arguments, got " +
                    std::to_string(atom.args.size()));
  }
}

void AppendTypedList(std::ostringstream& os,
                     const std::vector<TypedName>& names, bool typed) {
  for (size_t i = 0; i < names.size(); ++i) {
    if (i > 0) os << ' ';
    os << names[i].name;
    if (typed) {
      const bool last_of_type =
          i + 1 == names.size() || names[i + 1].type != names[i].type;
      if (last_of_type) os << " - " << names[i].type;
    }
  }
}

bool UsesTyping(const std::vector<TypedName>& names) {
  return std::any_of(names.begin(), names.end(),
                     [](const TypedName& n) { return n.type != "object"; });
}

void AppendConjunction(std::ostringstream& os,
                       const std::vector<Literal>& literals) {
  os << "(and";
  for (const Literal& literal : literals) os << ' ' << ToString(literal);
  os << ')';
}

}  // namespace

UnsupportedConstructError::UnsupportedConstructError(
    const std::string& construct)
    : PddlError("unsupported PDDL construct: " + construct),
      construct_(construct) {}

std::string ToString(const Atom& atom) {
  std::string out = "(" + atom.predicate;
  for (const std::string& arg : atom.args) out += " " + arg;
  return out + ")";
}

std::string ToString(const Literal& literal) {
  return literal.negated ? "(not " + ToString(literal.atom) + ")"
                         : ToString(literal.atom);
}

std::ostream& operator<<(std::ostream& os, const Atom& atom) {
  return os << ToString(atom);
}

std::ostream& operator<<(std::ostream& os, const Literal& literal) {
  return os << ToString(literal);
}

std::string ToString(const GroundAction& action) {
  std::string out = "(" + action.schema_name;
  for (const std::string& arg : action.arguments) out += " " + arg;
  return out + ")";
}

const ActionSchema* Domain::FindSchema(std::string_view schema_name) const {
  for (const ActionSchema& schema : action_schemas) {
    if (schema.name == schema_name) return &schema;
  }
  return nullptr;
}

const PredicateDecl* Domain::FindPredicate(std::string_view predicate) const {
  for (const PredicateDecl& decl : predicates) {
    if (decl.name == predicate) return &decl;
  }
  return nullptr;
}

const TypedName* Domain::FindConstant(std::string_view constant) const {
  for (const TypedName& c : constants) {
    if (c.name == constant) return &c;
  }
  return nullptr;
}

bool Domain::IsSubtype(std::string_view type, std::string_view ancestor) const {
  if (ancestor == "object") return true;
  std::string current(type);
  // Bounded walk guards against cyclic declarations.
  for (size_t hops = 0; hops <= types.size(); ++hops) {
    if (current == ancestor) return true;
    auto it = types.find(current);
    if (it == types.end()) return false;
    current = it->second;
  }
  return false;
}

void Domain::Check() const {
  std::set<std::string> seen;
  for (const PredicateDecl& decl : predicates) {
    if (!seen.insert(decl.name).second) {
      throw PddlError("duplicate predicate '" + decl.name + "'");
    }
  }
  seen.clear();
  for (const ActionSchema& schema : action_schemas) {
    if (!seen.insert(schema.name).second) {
      throw PddlError("duplicate action schema '" + schema.name + "'");
    }
    std::set<std::string> params;
    for (const TypedName& p : schema.parameters) {
      if (!IsVariable(p.name)) {
        throw PddlError("action '" + schema.name + "': parameter '" + p.name +
                        "' is not a variable");
      }
      if (!params.insert(p.name).second) {
        throw PddlError("action '" + schema.name +
                        "': duplicate parameter '" + p.name + "'");
      }
    }
    auto check_atom = [&](const Atom& atom) {
      CheckAtomAgainstDomain(*this, atom, "action '" + schema.name + "'");
      for (const std::string& term : atom.args) {
        if (IsVariable(term)) {
          if (params.count(term) == 0) {
            throw PddlError("action '" + schema.name + "': variable '" +
                            term + "' is not a parameter");
          }
        } else if (FindConstant(term) == nullptr) {
          throw PddlError("action '" + schema.name + "': unknown constant '" +
                          term + "'");
        }
      }
    };
    for (const Literal& literal : schema.preconditions) check_atom(literal.atom);
    for (const Atom& atom : schema.add_list) check_atom(atom);
    for (const Atom& atom : schema.delete_list) check_atom(atom);
    for (const Atom& atom : schema.add_list) {
      if (std::find(schema.delete_list.begin(), schema.delete_list.end(),
                    atom) != schema.delete_list.end()) {
        throw PddlError("action '" + schema.name + "': " + ToString(atom) +
                        " is both added and deleted");
      }
    }
  }
}

const TypedName* Problem::FindObject(std::string_view object) const {
  for (const TypedName& o : objects) {
    if (o.name == object) return &o;
  }
  return nullptr;
}

Domain ParseDomain(std::string_view text) {
  const SExpr root = ParseSExpr(text);
  ExpectDefine(root, "domain");
  Domain domain;
  domain.name = ExpectAtom(root.items[1].items[1], "domain name");
  for (size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = ExpectList(root.items[i], "domain section");
    if (section.items.empty() || section.items.front().is_list) {
      Fail(section, "malformed domain section");
    }
    const std::string& key = section.items.front().atom;
    if (key == ":requirements") {
      for (size_t j = 1; j < section.items.size(); ++j) {
        domain.requirements.push_back(
            ExpectAtom(section.items[j], "requirement flag"));
      }
    } else if (key == ":types") {
      ParseTypes(section, &domain);
    } else if (key == ":constants") {
      domain.constants = ParseTypedList(section, 1);
    } else if (key == ":predicates") {
      for (size_t j = 1; j < section.items.size(); ++j) {
        const SExpr& p = ExpectList(section.items[j], "predicate declaration");
        if (p.items.empty()) Fail(p, "empty predicate declaration");
        PredicateDecl decl;
        decl.name = ExpectAtom(p.items.front(), "predicate name");
        decl.params = ParseTypedList(p, 1);
        domain.predicates.push_back(std::move(decl));
      }
    } else if (key == ":action") {
      domain.action_schemas.push_back(ParseAction(section));
    } else if (key == ":functions" || key == ":durative-action" ||
               key == ":derived" || key == ":process" || key == ":event") {
      throw UnsupportedConstructError(key);
    } else {
      Fail(section, "unknown domain section '" + key + "'");
    }
  }
  domain.Check();
  return domain;
}

namespace {

Problem ParseProblemUnchecked(std::string_view text) {
  const SExpr root = ParseSExpr(text);
  ExpectDefine(root, "problem");
  Problem problem;
  problem.name = ExpectAtom(root.items[1].items[1], "problem name");
  for (size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = ExpectList(root.items[i], "problem section");
    if (section.items.empty() || section.items.front().is_list) {
      Fail(section, "malformed problem section");
    }
    const std::string& key = section.items.front().atom;
    if (key == ":domain") {
      if (section.items.size() != 2) Fail(section, "expected (:domain <name>)");
      problem.domain_name = ExpectAtom(section.items[1], "domain name");
    } else if (key == ":requirements") {
      // Informational only.
    } else if (key == ":objects") {
      problem.objects = ParseTypedList(section, 1);
    } else if (key == ":init") {
      for (size_t j = 1; j < section.items.size(); ++j) {
        const SExpr& fact = section.items[j];
        if (fact.HasHead("not")) Fail(fact, "negated atom in :init");
        problem.init.insert(ParseAtom(fact));
      }
    } else if (key == ":goal") {
      if (section.items.size() != 2) Fail(section, "expected (:goal <formula>)");
      ParseConjunction(section.items[1], &problem.goal);
    } else if (key == ":metric" || key == ":constraints") {
      throw UnsupportedConstructError(key);
    } else {
      Fail(section, "unknown problem section '" + key + "'");
    }
  }
  return problem;
}

void CheckProblemObjects(const Problem& problem, const Domain* domain) {
  std::set<std::string> seen;
  for (const TypedName& o : problem.objects) {
    if (!seen.insert(o.name).second) {
      throw PddlError("duplicate object '" + o.name + "'");
    }
  }
  auto check_terms = [&](const Atom& atom, const char* where) {
    for (const std::string& term : atom.args) {
      if (IsVariable(term)) {
        throw PddlError(std::string(where) + ": variable '" + term +
                        "' in ground atom " + ToString(atom));
      }
      if (problem.FindObject(term) == nullptr &&
          (domain == nullptr || domain->FindConstant(term) == nullptr)) {
        throw PddlError(std::string(where) + ": undeclared object '" + term +
                        "' in " + ToString(atom));
      }
    }
  };
  for (const Atom& atom : problem.init) check_terms(atom, ":init");
  for (const Literal& literal : problem.goal) check_terms(literal.atom, ":goal");
}

}  // namespace

Problem ParseProblem(std::string_view text) {
  Problem problem = ParseProblemUnchecked(text);
  CheckProblemObjects(problem, nullptr);
  return problem;
}

Problem ParseProblem(std::string_view text, const Domain& domain) {
  Problem problem = ParseProblemUnchecked(text);
  CheckProblem(domain, problem);
  return problem;
}

void CheckProblem(const Domain& domain, const Problem& problem) {
  CheckProblemObjects(problem, &domain);
  for (const Atom& atom : problem.init) {
    CheckAtomAgainstDomain(domain, atom, ":init");
  }
  for (const Literal& literal : problem.goal) {
    CheckAtomAgainstDomain(domain, literal.atom, ":goal");
  }
}

Plan ParsePlan(std::string_view text) {
  Plan plan;
  for (const SExpr& expr : ParseSExprs(text)) {
    if (!expr.is_list) Fail(expr, "expected a parenthesized action");
    if (expr.items.empty()) Fail(expr, "empty action");
    GroundAction action;
    for (size_t i = 0; i < expr.items.size(); ++i) {
      const SExpr& item = expr.items[i];
      if (item.is_list) Fail(item, "nested list inside action");
      if (i == 0) {
        action.schema_name = item.atom;
      } else {
        action.arguments.push_back(item.atom);
      }
    }
    plan.steps.push_back(std::move(action));
  }
  return plan;
}

Plan ParsePlanTolerant(std::string_view text, const Domain* domain) {
  // Drop ';' comments first so strict and tolerant parsing agree.
  std::string stripped;
  stripped.reserve(text.size());
  bool in_comment = false;
  for (char c : text) {
    if (c == ';') in_comment = true;
    if (c == '\n') in_comment = false;
    if (!in_comment) stripped.push_back(c);
  }
  static const std::regex kGroup(R"(\(\s*([^\s()]+)((?:\s+[^\s()]+)*)\s*\))");
  Plan plan;
  for (auto it = std::sregex_iterator(stripped.begin(), stripped.end(), kGroup);
       it != std::sregex_iterator(); ++it) {
    GroundAction action;
    action.schema_name = ToLower((*it)[1].str());
    std::istringstream args((*it)[2].str());
    std::string arg;
    while (args >> arg) action.arguments.push_back(ToLower(arg));
    if (domain != nullptr && domain->FindSchema(action.schema_name) == nullptr) {
      continue;
    }
    plan.steps.push_back(std::move(action));
  }
  return plan;
}

std::string ToPddl(const Domain& domain) {
  std::ostringstream os;
  os << "(define (domain " << domain.name << ")\n";
  if (!domain.requirements.empty()) {
    os << "  (:requirements";
    for (const std::string& r : domain.requirements) os << ' ' << r;
    os << ")\n";
  }
  if (!domain.types.empty()) {
    std::vector<TypedName> types;
    for (const auto& [name, parent] : domain.types) types.push_back({name, parent});
    std::stable_sort(types.begin(), types.end(),
                     [](const TypedName& a, const TypedName& b) {
                       return a.type < b.type;
                     });
    os << "  (:types ";
    AppendTypedList(os, types, true);
    os << ")\n";
  }
  if (!domain.constants.empty()) {
    os << "  (:constants ";
    AppendTypedList(os, domain.constants, UsesTyping(domain.constants));
    os << ")\n";
  }
  os << "  (:predicates";
  for (const PredicateDecl& p : domain.predicates) {
    os << "\n    (" << p.name;
    if (!p.params.empty()) {
      os << ' ';
      AppendTypedList(os, p.params, UsesTyping(p.params));
    }
    os << ')';
  }
  os << ")\n";
  for (const ActionSchema& a : domain.action_schemas) {
    os << "  (:action " << a.name << "\n    :parameters (";
    AppendTypedList(os, a.parameters, UsesTyping(a.parameters));
    os << ")\n    :precondition ";
    AppendConjunction(os, a.preconditions);
    os << "\n    :effect (and";
    for (const Atom& atom : a.add_list) os << ' ' << ToString(atom);
    for (const Atom& atom : a.delete_list) os << " (not " << ToString(atom) << ')';
    os << "))\n";
  }
  os << ")\n";
  return os.str();
}

std::string ToPddl(const Problem& problem) {
  std::ostringstream os;
  os << "(define (problem " << problem.name << ")\n";
  if (!problem.domain_name.empty()) {
    os << "  (:domain " << problem.domain_name << ")\n";
  }
  os << "  (:objects ";
  AppendTypedList(os, problem.objects, UsesTyping(problem.objects));
  os << ")\n  (:init";
  for (const Atom& atom : problem.init) os << "\n    " << ToString(atom);
  os << ")\n  (:goal ";
  AppendConjunction(os, problem.goal);
  os << "))\n";
  return os.str();
}

std::string ToText(const Plan& plan) {
  std::string out;
  for (const GroundAction& step : plan.steps) out += ToString(step) + "\n";
  return out;
}

}  // namespace plansel
