#include "rmcodec/emitter.hpp"

#include <sstream>

namespace rmc::metrics {

using actions::ActionKind;
using actions::AtomicAction;
using actions::EffectConditional;
using actions::EffectItem;
using actions::EffectLet;
using actions::GuardTree;

namespace {

std::string find_statement(const AtomicAction& a) {
    std::ostringstream os;
    os << a.var << " = ";
    if (a.kind == ActionKind::FindAssociationObject ||
        a.kind == ActionKind::FindAssociationObjects) {
        os << action_kind_name(a.kind) << '(' << a.entity_var << '.' << a.member << ')';
        return os.str();
    }
    os << action_kind_name(a.kind) << '(' << a.entity;
    for (const actions::FindCondition& c : a.conditions) {
        os << ", " << c.attribute << ' ' << ocl::cmp_op_text(c.op) << ' '
           << ocl::render_expr(*c.value);
    }
    os << ')';
    return os.str();
}

// Single-line guard rendering used for branch conditions and short guards.
std::string guard_inline(const GuardTree& tree, const std::vector<AtomicAction>& leaves) {
    switch (tree.kind) {
        case GuardTree::Kind::True:
            return "true";
        case GuardTree::Kind::Leaf:
            return render_action(leaves[tree.leaf]);
        case GuardTree::Kind::And:
        case GuardTree::Kind::Or: {
            std::string sep = tree.kind == GuardTree::Kind::And ? " and " : " or ";
            std::string out;
            for (std::size_t i = 0; i < tree.children.size(); ++i) {
                if (i) out += sep;
                const GuardTree& child = tree.children[i];
                bool wrap = child.kind == GuardTree::Kind::And ||
                            child.kind == GuardTree::Kind::Or ||
                            child.kind == GuardTree::Kind::If;
                if (wrap) out += '(';
                out += guard_inline(child, leaves);
                if (wrap) out += ')';
            }
            return out;
        }
        case GuardTree::Kind::Not:
            return "not (" + guard_inline(tree.children[0], leaves) + ')';
        case GuardTree::Kind::If:
            return "if " + guard_inline(tree.children[0], leaves) + " then " +
                   guard_inline(tree.children[1], leaves) + " else " +
                   guard_inline(tree.children[2], leaves) + " endif";
    }
    return "true";
}

// Multi-line guard block: one leaf per line, and/or prefixes, parenthesized
// groups on their own lines.
void guard_lines(const GuardTree& tree, const std::vector<AtomicAction>& leaves, int indent,
                 const std::string& prefix, std::ostringstream& os) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    switch (tree.kind) {
        case GuardTree::Kind::True:
            os << pad << prefix << "true\n";
            return;
        case GuardTree::Kind::Leaf:
            os << pad << prefix << render_action(leaves[tree.leaf]) << "\n";
            return;
        case GuardTree::Kind::And:
        case GuardTree::Kind::Or: {
            const char* op = tree.kind == GuardTree::Kind::And ? "and " : "or ";
            for (std::size_t i = 0; i < tree.children.size(); ++i) {
                const GuardTree& child = tree.children[i];
                std::string child_prefix = i == 0 ? prefix : op;
                bool wrap = child.kind == GuardTree::Kind::And ||
                            child.kind == GuardTree::Kind::Or;
                if (wrap) {
                    os << pad << child_prefix << "(\n";
                    guard_lines(child, leaves, indent + 1, "", os);
                    os << pad << ")\n";
                } else {
                    guard_lines(child, leaves, indent, child_prefix, os);
                }
            }
            return;
        }
        case GuardTree::Kind::Not:
            os << pad << prefix << "not (\n";
            guard_lines(tree.children[0], leaves, indent + 1, "", os);
            os << pad << ")\n";
            return;
        case GuardTree::Kind::If:
            os << pad << prefix << guard_inline(tree, leaves) << "\n";
            return;
    }
}

void effect_lines(const std::vector<EffectItem>& items, int indent, std::ostringstream& os) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    for (const EffectItem& item : items) {
        if (const auto* a = std::get_if<AtomicAction>(&item)) {
            if (a->kind == ActionKind::CreateObject) {
                os << pad << a->var << " = createObject(" << a->entity << ")\n";
            } else {
                os << pad << render_action(*a) << "\n";
            }
        } else if (const auto* cond = std::get_if<EffectConditional>(&item)) {
            os << pad << "if [" << guard_inline(cond->condition, cond->condition_actions)
               << "] then\n";
            effect_lines(cond->then_items, indent + 1, os);
            if (!cond->else_items.empty()) {
                os << pad << "else\n";
                effect_lines(cond->else_items, indent + 1, os);
            }
        } else {
            const auto& let = std::get<EffectLet>(item);
            for (const auto& [name, value] : let.bindings) {
                os << pad << "let " << name << " = " << ocl::render_expr(*value) << "\n";
            }
            effect_lines(let.items, indent, os);
        }
    }
}

} // namespace

std::string emit_listing(const logic::BusinessLogicUnit& unit) {
    std::ostringstream os;
    os << "operation " << unit.signature.operation << '(';
    for (std::size_t i = 0; i < unit.signature.inputs.size(); ++i) {
        if (i) os << ", ";
        os << unit.signature.inputs[i].name << " : "
           << render_type(unit.signature.inputs[i].type);
    }
    os << ") : " << render_type(unit.signature.output) << "\n";

    for (const AtomicAction& a : unit.definition_block) {
        os << "  " << find_statement(a) << "\n";
    }

    if (unit.guard.kind == GuardTree::Kind::True) {
        os << "  if [true] then\n";
    } else {
        os << "  if [\n";
        guard_lines(unit.guard, unit.guard_actions, 2, "", os);
        os << "  ] then\n";
    }

    effect_lines(unit.effect_block, 2, os);
    if (unit.result_expr) {
        os << "    return " << ocl::render_expr(*unit.result_expr) << "\n";
    } else {
        os << "    return true\n";
    }
    os << "  else raise " << unit.failure.exception_name << '(' << unit.failure.operation
       << ")\n";
    return os.str();
}

std::vector<Listing> emit_listings(const logic::ApplicationUnit& app) {
    std::vector<Listing> out;
    for (const logic::ServiceUnit& s : app.services) {
        for (const logic::BusinessLogicUnit& u : s.units) {
            Listing listing;
            listing.service = s.name;
            listing.operation = u.signature.operation;
            listing.text = emit_listing(u);
            listing.loc = count_loc(listing.text);
            out.push_back(std::move(listing));
        }
    }
    return out;
}

int count_loc(const std::string& listing_text) {
    int loc = 0;
    std::istringstream is(listing_text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) ++loc;
    }
    return loc;
}

} // namespace rmc::metrics
