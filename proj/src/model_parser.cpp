#include "rmcodec/model.hpp"

#include "rmcodec/lexer.hpp"
#include "rmcodec/ocl_parser.hpp"

#include <set>
#include <sstream>

namespace rmc::model {

const AttributeDecl* EntityDecl::attribute(const std::string& n) const {
    for (const auto& a : attributes) {
        if (a.name == n) return &a;
    }
    return nullptr;
}

const AssociationEnd* EntityDecl::end(const std::string& n) const {
    for (const auto& e : ends) {
        if (e.name == n) return &e;
    }
    return nullptr;
}

bool EnumDecl::has_literal(const std::string& lit) const {
    for (const auto& l : literals) {
        if (l == lit) return true;
    }
    return false;
}

const EntityDecl* RequirementModel::entity(const std::string& name) const {
    for (const auto& e : entities) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

const EnumDecl* RequirementModel::enumeration(const std::string& name) const {
    for (const auto& e : enums) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

const ContractDecl* RequirementModel::contract_for(const std::string& operation) const {
    for (const auto& c : contracts) {
        if (c.operation == operation) return &c;
    }
    return nullptr;
}

const ServiceDecl* RequirementModel::service(const std::string& name) const {
    for (const auto& s : services) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

namespace {

// ---------------------------------------------------------------- syntax ---

class ModelParser {
public:
    ModelParser(const std::vector<Token>& toks, Diagnostics& diags, RequirementModel& out)
        : toks_(toks), diags_(diags), out_(out) {}

    void run() {
        while (!at(Tok::End)) {
            switch (peek().kind) {
                case Tok::KwEnum: parse_enum(); break;
                case Tok::KwEntity: parse_entity(); break;
                case Tok::KwActor: parse_actor(); break;
                case Tok::KwService: parse_service(); break;
                case Tok::KwContract: parse_contract(); break;
                default:
                    error("expected a declaration (enum, entity, actor, service, contract)");
                    recover();
            }
        }
    }

private:
    const std::vector<Token>& toks_;
    Diagnostics& diags_;
    RequirementModel& out_;
    std::size_t pos_ = 0;

    const Token& peek() const { return toks_[pos_]; }
    const Token& peek2() const { return pos_ + 1 < toks_.size() ? toks_[pos_ + 1] : toks_.back(); }
    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at(Tok k) const { return peek().kind == k; }
    bool accept(Tok k) {
        if (!at(k)) return false;
        take();
        return true;
    }
    bool expect(Tok k, const char* where) {
        if (accept(k)) return true;
        error(std::string("expected ") + token_name(k) + " " + where + ", found " +
              token_name(peek().kind));
        return false;
    }
    void error(const std::string& msg) { diags_.add(Code::SyntaxError, peek().span, msg); }

    // Skip to the next top-level declaration keyword.
    void recover() {
        int depth = 0;
        while (!at(Tok::End)) {
            if (at(Tok::LBrace)) ++depth;
            if (at(Tok::RBrace) && depth > 0) --depth;
            else if (depth == 0) {
                switch (peek().kind) {
                    case Tok::KwEnum:
                    case Tok::KwEntity:
                    case Tok::KwActor:
                    case Tok::KwService:
                    case Tok::KwContract:
                        return;
                    default: break;
                }
            }
            take();
        }
    }

    bool ident(std::string& name, Span& span, const char* what) {
        if (!at(Tok::Identifier)) {
            error(std::string("expected ") + what);
            return false;
        }
        Token t = take();
        name = t.text;
        span = t.span;
        return true;
    }

    // Type names stay unresolved strings at syntax time; the resolver maps them.
    bool type_name(std::string& name, Span& span) {
        if (accept(Tok::KwSet)) {
            span = toks_[pos_ - 1].span;
            std::string elem;
            Span es;
            if (!expect(Tok::LParen, "after Set")) return false;
            if (!ident(elem, es, "entity name in Set(...)")) return false;
            if (!expect(Tok::RParen, "to close Set(...)")) return false;
            name = "Set(" + elem + ")";
            return true;
        }
        return ident(name, span, "type name");
    }

    void parse_enum() {
        Span sp = take().span;
        EnumDecl decl;
        decl.span = sp;
        if (!ident(decl.name, sp, "enum name")) return recover();
        if (!expect(Tok::LBrace, "after enum name")) return recover();
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            std::string lit;
            Span ls;
            if (!ident(lit, ls, "enum literal")) return recover();
            decl.literals.push_back(lit);
            if (!accept(Tok::Comma) && !at(Tok::RBrace)) {
                error("expected ',' or '}' in enum body");
                return recover();
            }
        }
        expect(Tok::RBrace, "to close enum");
        out_.enums.push_back(std::move(decl));
    }

    void parse_entity() {
        Span sp = take().span;
        EntityDecl decl;
        decl.span = sp;
        if (!ident(decl.name, sp, "entity name")) return recover();
        if (!expect(Tok::LBrace, "after entity name")) return recover();
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            if (accept(Tok::Semicolon)) continue;
            std::string name;
            Span ns;
            if (!ident(name, ns, "attribute or association name")) return recover();
            if (!expect(Tok::Colon, "after member name")) return recover();
            if (at(Tok::KwOne) || at(Tok::KwMany)) {
                AssociationEnd end;
                end.name = name;
                end.span = ns;
                end.mult = take().kind == Tok::KwOne ? Mult::One : Mult::Many;
                Span ts;
                if (!ident(end.target, ts, "target entity")) return recover();
                if (!expect(Tok::KwInverse, "in association declaration")) return recover();
                Span is;
                if (!ident(end.inverse, is, "inverse end name")) return recover();
                if (!at(Tok::KwOne) && !at(Tok::KwMany)) {
                    error("expected inverse multiplicity ('one' or 'many')");
                    return recover();
                }
                end.inverse_mult = take().kind == Tok::KwOne ? Mult::One : Mult::Many;
                end.declared = true;
                decl.ends.push_back(std::move(end));
            } else {
                AttributeDecl attr;
                attr.name = name;
                attr.span = ns;
                std::string tname;
                Span ts;
                if (!type_name(tname, ts)) return recover();
                // stored as a placeholder; resolver maps names to types
                attr.type = StaticType{StaticType::Kind::Invalid, tname};
                decl.attributes.push_back(std::move(attr));
            }
        }
        expect(Tok::RBrace, "to close entity");
        out_.entities.push_back(std::move(decl));
    }

    void parse_actor() {
        Span sp = take().span;
        ActorDecl decl;
        decl.span = sp;
        if (!ident(decl.name, sp, "actor name")) return recover();
        if (!expect(Tok::LBrace, "after actor name")) return recover();
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            if (accept(Tok::Semicolon)) continue;
            if (!expect(Tok::KwUsecase, "in actor body")) return recover();
            UseCaseDecl uc;
            if (!ident(uc.name, uc.span, "use case name")) return recover();
            decl.usecases.push_back(std::move(uc));
        }
        expect(Tok::RBrace, "to close actor");
        out_.actors.push_back(std::move(decl));
    }

    void parse_service() {
        Span sp = take().span;
        ServiceDecl decl;
        decl.span = sp;
        if (!ident(decl.name, sp, "service name")) return recover();
        if (!expect(Tok::LBrace, "after service name")) return recover();
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            if (accept(Tok::Semicolon)) continue;
            if (!expect(Tok::KwOperation, "in service body")) return recover();
            OperationRef op;
            if (!ident(op.name, op.span, "operation name")) return recover();
            decl.operations.push_back(std::move(op));
        }
        expect(Tok::RBrace, "to close service");
        out_.services.push_back(std::move(decl));
    }

    void parse_contract() {
        Span sp = take().span;
        ContractDecl decl;
        decl.span = sp;
        Span osp;
        if (!ident(decl.operation, osp, "operation name")) return recover();
        decl.span = osp;
        if (!expect(Tok::LParen, "after operation name")) return recover();
        if (!at(Tok::RParen)) {
            do {
                ParamDecl p;
                if (!ident(p.name, p.span, "parameter name")) return recover();
                if (!expect(Tok::Colon, "after parameter name")) return recover();
                std::string tname;
                Span ts;
                if (!type_name(tname, ts)) return recover();
                p.type = StaticType{StaticType::Kind::Invalid, tname};
                decl.inputs.push_back(std::move(p));
            } while (accept(Tok::Comma));
        }
        if (!expect(Tok::RParen, "to close parameter list")) return recover();
        if (!expect(Tok::Colon, "before output type")) return recover();
        std::string out_name;
        Span out_span;
        if (!type_name(out_name, out_span)) return recover();
        decl.output = StaticType{StaticType::Kind::Invalid, out_name};
        if (!expect(Tok::LBrace, "to open contract body")) return recover();

        if (accept(Tok::KwDefinition)) {
            if (!expect(Tok::Colon, "after 'definition'")) return recover();
            while (at(Tok::Identifier)) {
                DefinitionBinding binding;
                Span ns;
                ident(binding.name, ns, "definition name");
                binding.span = ns;
                if (!expect(Tok::Eq, "after definition name")) return recover();
                binding.expr = ocl::parse_expression_tokens(toks_, pos_, diags_);
                if (!binding.expr) return recover();
                decl.definitions.push_back(std::move(binding));
                accept(Tok::Semicolon);
            }
        }
        if (!expect(Tok::KwPrecondition, "in contract body")) return recover();
        if (!expect(Tok::Colon, "after 'precondition'")) return recover();
        decl.precondition = ocl::parse_expression_tokens(toks_, pos_, diags_);
        if (!decl.precondition) return recover();
        accept(Tok::Semicolon);
        if (!expect(Tok::KwPostcondition, "in contract body")) return recover();
        if (!expect(Tok::Colon, "after 'postcondition'")) return recover();
        decl.postcondition = ocl::parse_expression_tokens(toks_, pos_, diags_);
        if (!decl.postcondition) return recover();
        accept(Tok::Semicolon);
        expect(Tok::RBrace, "to close contract");
        out_.contracts.push_back(std::move(decl));
    }
};

// -------------------------------------------------------------- resolver ---

// Freshly parsed types carry their source name with kind Invalid; re-resolving
// an already-resolved model maps the type back to its name first.
std::string unresolved_name(const StaticType& t) {
    return t.kind == StaticType::Kind::Invalid ? t.name : render_type(t);
}

StaticType resolve_type_name(const std::string& name, const RequirementModel& m, const Span& span,
                             Diagnostics& diags) {
    if (name == "Integer") return integer_type();
    if (name == "Real") return real_type();
    if (name == "Boolean") return boolean_type();
    if (name == "String") return string_type();
    if (name == "Date") return date_type();
    if (name.rfind("Set(", 0) == 0 && name.back() == ')') {
        std::string elem = name.substr(4, name.size() - 5);
        if (!m.entity(elem)) {
            diags.add(Code::ResolutionError, span, "unknown entity '" + elem + "' in Set(...)");
            return StaticType{};
        }
        return set_type(elem);
    }
    if (m.enumeration(name)) return enum_type(name);
    if (m.entity(name)) return object_type(name);
    diags.add(Code::ResolutionError, span, "unknown type '" + name + "'");
    return StaticType{};
}

// Postcondition prepass: a conjunct `E.allInstances()->includes(v)` with `v`
// otherwise unbound declares a created object. Conjunct positions are the
// and-chain plus both branches of conditional conjuncts.
void infer_created_vars(const ocl::Expr& e, const ocl::TypeEnv& env, ContractDecl& contract,
                        std::vector<std::pair<std::string, StaticType>>& created) {
    if (const auto* bin = ocl::as<ocl::BoolBin>(e)) {
        if (bin->op == ocl::BoolKind::And) {
            infer_created_vars(*bin->lhs, env, contract, created);
            infer_created_vars(*bin->rhs, env, contract, created);
        }
        return;
    }
    if (const auto* ife = ocl::as<ocl::IfExpr>(e)) {
        infer_created_vars(*ife->then_branch, env, contract, created);
        infer_created_vars(*ife->else_branch, env, contract, created);
        return;
    }
    if (const auto* let = ocl::as<ocl::LetExpr>(e)) {
        infer_created_vars(*let->body, env, contract, created);
        return;
    }
    const auto* coll = ocl::as<ocl::CollectionOp>(e);
    if (!coll || coll->op != ocl::CollOp::Includes || !coll->arg) return;
    const auto* all = ocl::as<ocl::AllInstances>(*coll->source);
    const auto* var = ocl::as<ocl::VarRef>(*coll->arg);
    if (!all || !var) return;
    if (var->name == "result" || env.lookup(var->name)) return;
    for (const auto& [name, type] : created) {
        if (name == var->name) return;
    }
    created.emplace_back(var->name, object_type(all->entity));
    contract.created_vars.emplace_back(var->name, all->entity);
}

void resolve_contract(ContractDecl& c, RequirementModel& m, Diagnostics& diags) {
    c.created_vars.clear();

    ocl::TypeEnv env;
    env.model = &m;
    env.vars["today"] = date_type();

    std::set<std::string> input_names;
    for (ParamDecl& p : c.inputs) {
        if (p.name == "today" || p.name == "result") {
            diags.add(Code::DuplicateError, p.span, "'" + p.name + "' is a reserved name");
            continue;
        }
        if (!input_names.insert(p.name).second) {
            diags.add(Code::DuplicateError, p.span,
                      "duplicate input '" + p.name + "' in contract '" + c.operation + "'");
            continue;
        }
        p.type = resolve_type_name(unresolved_name(p.type), m, p.span, diags);
        if (p.type.kind == StaticType::Kind::Object || p.type.kind == StaticType::Kind::Set) {
            diags.add(Code::ResolutionError, p.span,
                      "object-typed inputs are not supported; pass a key and look the object up");
            continue;
        }
        if (p.type.kind != StaticType::Kind::Invalid) env.vars[p.name] = p.type;
    }

    c.output = resolve_type_name(unresolved_name(c.output), m, c.span, diags);

    for (DefinitionBinding& b : c.definitions) {
        if (b.name == "today" || b.name == "result") {
            diags.add(Code::DuplicateError, b.span, "'" + b.name + "' is a reserved name");
            continue;
        }
        if (env.vars.count(b.name)) {
            diags.add(Code::DuplicateError, b.span,
                      "definition '" + b.name + "' redefines an existing name");
            continue;
        }
        if (!b.expr) continue;
        if (ocl::type_check(*b.expr, env, ocl::ExprContext::Definition, diags)) {
            env.vars[b.name] = b.expr->type;
        }
    }

    // Created objects become visible in both conditions; the classifier pins
    // down where they may legally appear.
    if (c.postcondition) {
        std::vector<std::pair<std::string, StaticType>> created;
        infer_created_vars(*c.postcondition, env, c, created);
        for (auto& [name, type] : created) env.vars[name] = type;
    }

    if (c.precondition) {
        ocl::type_check(*c.precondition, env, ocl::ExprContext::Precondition, diags);
    }
    if (c.postcondition) {
        if (c.output.kind != StaticType::Kind::Boolean &&
            c.output.kind != StaticType::Kind::Invalid) {
            env.vars["result"] = c.output;
        }
        ocl::type_check(*c.postcondition, env, ocl::ExprContext::Postcondition, diags);
    }
}

void resolve(RequirementModel& m, Diagnostics& diags) {
    // Type namespace: entities and enums together.
    std::set<std::string> type_names;
    for (const EnumDecl& e : m.enums) {
        if (!type_names.insert(e.name).second) {
            diags.add(Code::DuplicateError, e.span, "duplicate type name '" + e.name + "'");
        }
        if (e.literals.empty()) {
            diags.add(Code::ResolutionError, e.span, "enum '" + e.name + "' has no literals");
        }
        std::set<std::string> lits;
        for (const std::string& l : e.literals) {
            if (!lits.insert(l).second) {
                diags.add(Code::DuplicateError, e.span,
                          "duplicate literal '" + l + "' in enum '" + e.name + "'");
            }
        }
    }
    for (const EntityDecl& e : m.entities) {
        if (!type_names.insert(e.name).second) {
            diags.add(Code::DuplicateError, e.span, "duplicate type name '" + e.name + "'");
        }
    }

    // Re-resolution starts from the declared sides only.
    for (EntityDecl& e : m.entities) {
        std::erase_if(e.ends, [](const AssociationEnd& end) { return !end.declared; });
    }

    // Attribute types and per-entity member namespaces.
    for (EntityDecl& e : m.entities) {
        std::set<std::string> members;
        for (AttributeDecl& a : e.attributes) {
            if (!members.insert(a.name).second) {
                diags.add(Code::DuplicateError, a.span,
                          "duplicate member '" + a.name + "' in entity '" + e.name + "'");
            }
            a.type = resolve_type_name(unresolved_name(a.type), m, a.span, diags);
            if (a.type.kind == StaticType::Kind::Object || a.type.kind == StaticType::Kind::Set) {
                diags.add(Code::ResolutionError, a.span,
                          "attribute '" + a.name + "' has entity type; declare an association");
            }
        }
        for (AssociationEnd& end : e.ends) {
            if (!members.insert(end.name).second) {
                diags.add(Code::DuplicateError, end.span,
                          "duplicate member '" + end.name + "' in entity '" + e.name + "'");
            }
        }
    }

    // Materialize inverse ends on target entities, in declaration order.
    for (EntityDecl& e : m.entities) {
        for (const AssociationEnd& end : e.ends) {
            if (!end.declared) continue;
            EntityDecl* target = nullptr;
            for (EntityDecl& t : m.entities) {
                if (t.name == end.target) target = &t;
            }
            if (!target) {
                diags.add(Code::ResolutionError, end.span,
                          "association '" + end.name + "' targets unknown entity '" + end.target +
                              "'");
                continue;
            }
            if (target->attribute(end.inverse) || target->end(end.inverse)) {
                diags.add(Code::DuplicateError, end.span,
                          "inverse end '" + end.inverse + "' collides with a member of entity '" +
                              target->name + "'");
                continue;
            }
            AssociationEnd inv;
            inv.name = end.inverse;
            inv.target = e.name;
            inv.mult = end.inverse_mult;
            inv.inverse = end.name;
            inv.inverse_mult = end.mult;
            inv.declared = false;
            inv.span = end.span;
            target->ends.push_back(std::move(inv));
        }
    }

    std::set<std::string> actor_names;
    for (const ActorDecl& a : m.actors) {
        if (!actor_names.insert(a.name).second) {
            diags.add(Code::DuplicateError, a.span, "duplicate actor '" + a.name + "'");
        }
    }

    // Services and the operation namespace.
    std::set<std::string> service_names;
    std::map<std::string, const ServiceDecl*> operation_owner;
    for (const ServiceDecl& s : m.services) {
        if (!service_names.insert(s.name).second) {
            diags.add(Code::DuplicateError, s.span, "duplicate service '" + s.name + "'");
        }
        for (const OperationRef& op : s.operations) {
            auto [it, inserted] = operation_owner.emplace(op.name, &s);
            if (!inserted) {
                diags.add(Code::DuplicateError, op.span,
                          "operation '" + op.name + "' is already arranged into service '" +
                              it->second->name + "'");
            }
        }
    }

    // Use cases map 1:1 onto operations by name.
    for (const ActorDecl& a : m.actors) {
        for (const UseCaseDecl& uc : a.usecases) {
            if (!operation_owner.count(uc.name)) {
                diags.add(Code::ResolutionError, uc.span,
                          "use case '" + uc.name + "' has no corresponding service operation");
            }
        }
    }

    // Contract arity: every service operation has exactly one contract.
    std::map<std::string, int> contract_count;
    for (ContractDecl& c : m.contracts) {
        ++contract_count[c.operation];
    }
    for (const ServiceDecl& s : m.services) {
        for (const OperationRef& op : s.operations) {
            int n = contract_count.count(op.name) ? contract_count[op.name] : 0;
            if (n == 0) {
                diags.add(Code::ContractArityError, op.span,
                          "operation '" + op.name + "' has no contract");
            }
        }
    }
    for (ContractDecl& c : m.contracts) {
        if (contract_count[c.operation] > 1) {
            diags.add(Code::ContractArityError, c.span,
                      "operation '" + c.operation + "' has more than one contract");
            continue;
        }
        auto owner = operation_owner.find(c.operation);
        if (owner == operation_owner.end()) {
            diags.add(Code::ResolutionError, c.span,
                      "contract '" + c.operation + "' is not arranged into any service");
        } else {
            c.service = owner->second->name;
        }
    }

    for (ContractDecl& c : m.contracts) {
        resolve_contract(c, m, diags);
    }
}

std::unique_ptr<RequirementModel> parse_units(
    const std::vector<std::pair<std::string, std::string>>& sources, Diagnostics& diags) {
    auto model = std::make_unique<RequirementModel>();
    for (const auto& [origin, text] : sources) {
        std::vector<Token> toks = lex(text, origin, diags);
        ModelParser parser(toks, diags, *model);
        parser.run();
    }
    if (diags.has_errors()) return nullptr;
    resolve(*model, diags);
    if (diags.has_errors()) return nullptr;
    return model;
}

ContractDecl clone_contract(const ContractDecl& c) {
    ContractDecl out;
    out.operation = c.operation;
    out.service = c.service;
    out.inputs = c.inputs;
    out.output = c.output;
    for (const DefinitionBinding& b : c.definitions) {
        out.definitions.push_back(DefinitionBinding{b.name, ocl::clone_expr(*b.expr), b.span});
    }
    out.precondition = c.precondition ? ocl::clone_expr(*c.precondition) : nullptr;
    out.postcondition = c.postcondition ? ocl::clone_expr(*c.postcondition) : nullptr;
    out.created_vars = c.created_vars;
    out.span = c.span;
    return out;
}

RequirementModel clone_model(const RequirementModel& m) {
    RequirementModel out;
    out.enums = m.enums;
    out.entities = m.entities;
    out.actors = m.actors;
    out.services = m.services;
    for (const ContractDecl& c : m.contracts) {
        out.contracts.push_back(clone_contract(c));
    }
    return out;
}

} // namespace

std::unique_ptr<RequirementModel> parse_model(std::string_view source, const std::string& origin,
                                              Diagnostics& diags) {
    return parse_units({{origin, std::string(source)}}, diags);
}

std::unique_ptr<RequirementModel> parse_model_files(
    const std::vector<std::pair<std::string, std::string>>& sources, Diagnostics& diags) {
    return parse_units(sources, diags);
}

std::vector<Diagnostic> validate_model(const RequirementModel& model) {
    RequirementModel copy = clone_model(model);
    Diagnostics diags;
    resolve(copy, diags);
    return diags.sorted();
}

// ---------------------------------------------------------- pretty print ---

namespace {

std::string type_text(const StaticType& t) { return render_type(t); }

} // namespace

std::string pretty_print(const RequirementModel& m) {
    std::ostringstream os;
    for (const EnumDecl& e : m.enums) {
        os << "enum " << e.name << " { ";
        for (std::size_t i = 0; i < e.literals.size(); ++i) {
            if (i) os << ", ";
            os << e.literals[i];
        }
        os << " }\n\n";
    }
    for (const EntityDecl& e : m.entities) {
        os << "entity " << e.name << " {\n";
        for (const AttributeDecl& a : e.attributes) {
            os << "  " << a.name << " : " << type_text(a.type) << "\n";
        }
        for (const AssociationEnd& end : e.ends) {
            if (!end.declared) continue;
            os << "  " << end.name << " : " << (end.mult == Mult::One ? "one" : "many") << " "
               << end.target << " inverse " << end.inverse << " "
               << (end.inverse_mult == Mult::One ? "one" : "many") << "\n";
        }
        os << "}\n\n";
    }
    for (const ActorDecl& a : m.actors) {
        os << "actor " << a.name << " {\n";
        for (const UseCaseDecl& uc : a.usecases) {
            os << "  usecase " << uc.name << "\n";
        }
        os << "}\n\n";
    }
    for (const ServiceDecl& s : m.services) {
        os << "service " << s.name << " {\n";
        for (const OperationRef& op : s.operations) {
            os << "  operation " << op.name << "\n";
        }
        os << "}\n\n";
    }
    for (const ContractDecl& c : m.contracts) {
        os << "contract " << c.operation << "(";
        for (std::size_t i = 0; i < c.inputs.size(); ++i) {
            if (i) os << ", ";
            os << c.inputs[i].name << " : " << type_text(c.inputs[i].type);
        }
        os << ") : " << type_text(c.output) << " {\n";
        if (!c.definitions.empty()) {
            os << "  definition:\n";
            for (const DefinitionBinding& b : c.definitions) {
                os << "    " << b.name << " = " << ocl::render_expr(*b.expr) << "\n";
            }
        }
        os << "  precondition:\n    " << ocl::render_expr(*c.precondition) << "\n";
        os << "  postcondition:\n    " << ocl::render_expr(*c.postcondition) << "\n";
        os << "}\n\n";
    }
    return os.str();
}

// -------------------------------------------------------------- equality ---

namespace {

bool type_equal(const StaticType& a, const StaticType& b) { return a == b; }

bool ends_equal(const AssociationEnd& a, const AssociationEnd& b) {
    return a.name == b.name && a.target == b.target && a.mult == b.mult &&
           a.inverse == b.inverse && a.inverse_mult == b.inverse_mult && a.declared == b.declared;
}

} // namespace

bool model_equal(const RequirementModel& a, const RequirementModel& b) {
    if (a.enums.size() != b.enums.size() || a.entities.size() != b.entities.size() ||
        a.actors.size() != b.actors.size() || a.services.size() != b.services.size() ||
        a.contracts.size() != b.contracts.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.enums.size(); ++i) {
        if (a.enums[i].name != b.enums[i].name || a.enums[i].literals != b.enums[i].literals) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.entities.size(); ++i) {
        const EntityDecl& x = a.entities[i];
        const EntityDecl& y = b.entities[i];
        if (x.name != y.name || x.attributes.size() != y.attributes.size() ||
            x.ends.size() != y.ends.size()) {
            return false;
        }
        for (std::size_t j = 0; j < x.attributes.size(); ++j) {
            if (x.attributes[j].name != y.attributes[j].name ||
                !type_equal(x.attributes[j].type, y.attributes[j].type)) {
                return false;
            }
        }
        for (std::size_t j = 0; j < x.ends.size(); ++j) {
            if (!ends_equal(x.ends[j], y.ends[j])) return false;
        }
    }
    for (std::size_t i = 0; i < a.actors.size(); ++i) {
        if (a.actors[i].name != b.actors[i].name) return false;
        if (a.actors[i].usecases.size() != b.actors[i].usecases.size()) return false;
        for (std::size_t j = 0; j < a.actors[i].usecases.size(); ++j) {
            if (a.actors[i].usecases[j].name != b.actors[i].usecases[j].name) return false;
        }
    }
    for (std::size_t i = 0; i < a.services.size(); ++i) {
        if (a.services[i].name != b.services[i].name) return false;
        if (a.services[i].operations.size() != b.services[i].operations.size()) return false;
        for (std::size_t j = 0; j < a.services[i].operations.size(); ++j) {
            if (a.services[i].operations[j].name != b.services[i].operations[j].name) return false;
        }
    }
    for (std::size_t i = 0; i < a.contracts.size(); ++i) {
        const ContractDecl& x = a.contracts[i];
        const ContractDecl& y = b.contracts[i];
        if (x.operation != y.operation || x.service != y.service ||
            x.inputs.size() != y.inputs.size() || !type_equal(x.output, y.output) ||
            x.definitions.size() != y.definitions.size() ||
            x.created_vars != y.created_vars) {
            return false;
        }
        for (std::size_t j = 0; j < x.inputs.size(); ++j) {
            if (x.inputs[j].name != y.inputs[j].name ||
                !type_equal(x.inputs[j].type, y.inputs[j].type)) {
                return false;
            }
        }
        for (std::size_t j = 0; j < x.definitions.size(); ++j) {
            if (x.definitions[j].name != y.definitions[j].name ||
                !ocl::expr_equal(*x.definitions[j].expr, *y.definitions[j].expr)) {
                return false;
            }
        }
        if (!ocl::expr_equal(*x.precondition, *y.precondition)) return false;
        if (!ocl::expr_equal(*x.postcondition, *y.postcondition)) return false;
    }
    return true;
}

} // namespace rmc::model
