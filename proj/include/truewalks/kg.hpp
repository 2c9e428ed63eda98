#pragma once
// In-memory knowledge graph with statement polarity.
//
// The graph is a directed labeled multigraph over IRIs, blank nodes and
// literal leaves. Each statement carries a polarity flag; negative polarity
// is only legal on assertion edges (instance -> class), never on subclass
// edges. Subclass edges get direction-dependent traversal: upward
// (subclass -> superclass) for positive-status walks, downward for
// negative-status walks. Built single-writer, then read-only.

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace truewalks {

namespace vocab {
inline constexpr std::string_view kSubClassOf = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kNegativeAssertion = "http://www.w3.org/2002/07/owl#NegativePropertyAssertion";
inline constexpr std::string_view kSourceIndividual = "http://www.w3.org/2002/07/owl#sourceIndividual";
inline constexpr std::string_view kAssertionProperty = "http://www.w3.org/2002/07/owl#assertionProperty";
inline constexpr std::string_view kTargetIndividual = "http://www.w3.org/2002/07/owl#targetIndividual";
inline constexpr std::string_view kSomeValuesFrom = "http://www.w3.org/2002/07/owl#someValuesFrom";
inline constexpr std::string_view kOnProperty = "http://www.w3.org/2002/07/owl#onProperty";
}  // namespace vocab

// Walk tokens for the two subclass traversal directions.
inline constexpr std::string_view kSubClassOfToken = "subClassOf";
inline constexpr std::string_view kSuperClassOfToken = "superClassOf";

enum class NodeKind { Iri, BlankNode, Literal };
enum class Polarity { Positive, Negative };

struct NodeId {
    NodeKind kind = NodeKind::Iri;
    std::string value;

    static NodeId iri(std::string v) { return {NodeKind::Iri, std::move(v)}; }
    static NodeId blank(std::string label) { return {NodeKind::BlankNode, std::move(label)}; }
    static NodeId literal(std::string text) { return {NodeKind::Literal, std::move(text)}; }

    /// Stable walk/vocabulary token. Blank nodes render as "_:label".
    std::string token() const {
        if (kind == NodeKind::BlankNode) return "_:" + value;
        return value;
    }

    auto operator<=>(const NodeId&) const = default;
};

struct EdgeLabel {
    std::string predicate;

    bool is_subclass() const { return predicate == vocab::kSubClassOf; }

    auto operator<=>(const EdgeLabel&) const = default;
};

struct Statement {
    NodeId subject;
    EdgeLabel predicate;
    NodeId object;
    Polarity polarity = Polarity::Positive;

    auto operator<=>(const Statement&) const = default;
};

/// One direction-legal step out of a node: the edge token that would appear
/// in a walk, and the node reached.
struct Hop {
    std::string edge_token;
    NodeId node;

    auto operator<=>(const Hop&) const = default;
};

class KnowledgeGraph {
public:
    /// Inserts a statement; exact duplicates collapse to one edge.
    /// Throws std::invalid_argument for negative polarity on a subclass edge.
    void add_statement(const Statement& st) {
        if (st.polarity == Polarity::Negative && st.predicate.is_subclass())
            throw std::invalid_argument("negative polarity is not allowed on a subClassOf edge");
        auto [it, inserted] = statements_.insert(st);
        if (!inserted) return;
        const Statement* p = &*it;
        out_[st.subject].push_back(p);
        in_[st.object].push_back(p);
    }

    void add_root_entity(const NodeId& e) { roots_.insert(e); }

    const std::set<Statement>& statements() const { return statements_; }
    const std::set<NodeId>& root_entities() const { return roots_; }
    std::size_t statement_count() const { return statements_.size(); }

    bool has_node(const NodeId& n) const {
        return out_.contains(n) || in_.contains(n);
    }

    std::size_t out_degree(const NodeId& n) const {
        auto it = out_.find(n);
        return it == out_.end() ? 0 : it->second.size();
    }

    /// Outgoing statements of a node (unordered). Unknown node -> empty.
    std::vector<const Statement*> outgoing(const NodeId& n) const {
        auto it = out_.find(n);
        return it == out_.end() ? std::vector<const Statement*>{} : it->second;
    }

    std::vector<const Statement*> incoming(const NodeId& n) const {
        auto it = in_.find(n);
        return it == in_.end() ? std::vector<const Statement*>{} : it->second;
    }

    /// Direction-legal neighbor set of `node` for a walk of the given status,
    /// before any visited-memory filtering. Positive status: positive
    /// non-subclass out-edges plus subclass edges upward (token "subClassOf").
    /// Negative status: all non-subclass out-edges plus subclass edges
    /// downward (token "superClassOf"). Literal objects never appear.
    /// Ordered lexicographically by underlying predicate IRI, then node value.
    std::vector<Hop> neighbors(const NodeId& node, Polarity status) const {
        // sort key: (predicate IRI, node kind, node value); Hop itself carries
        // the direction token, which differs from the predicate for subclass edges
        std::vector<std::pair<const Statement*, Hop>> keyed;
        for (const Statement* st : outgoing(node)) {
            if (st->object.kind == NodeKind::Literal) continue;
            if (st->predicate.is_subclass()) {
                if (status == Polarity::Positive)
                    keyed.emplace_back(st, Hop{std::string(kSubClassOfToken), st->object});
            } else {
                if (status == Polarity::Positive && st->polarity != Polarity::Positive) continue;
                keyed.emplace_back(st, Hop{st->predicate.predicate, st->object});
            }
        }
        if (status == Polarity::Negative) {
            for (const Statement* st : incoming(node)) {
                if (!st->predicate.is_subclass()) continue;
                keyed.emplace_back(st, Hop{std::string(kSuperClassOfToken), st->subject});
            }
        }
        std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
            if (a.first->predicate.predicate != b.first->predicate.predicate)
                return a.first->predicate.predicate < b.first->predicate.predicate;
            return a.second.node < b.second.node;
        });
        std::vector<Hop> hops;
        hops.reserve(keyed.size());
        for (auto& [st, hop] : keyed) {
            if (hops.empty() || hops.back() != hop) hops.push_back(std::move(hop));
        }
        return hops;
    }

    /// First-hop candidates for a walk rooted at an instance: non-subclass
    /// out-edges whose polarity matches the walk status. Same ordering as
    /// neighbors().
    std::vector<Hop> assertion_hops(const NodeId& entity, Polarity status) const {
        std::vector<std::pair<std::string_view, Hop>> keyed;
        for (const Statement* st : outgoing(entity)) {
            if (st->predicate.is_subclass()) continue;
            if (st->polarity != status) continue;
            if (st->object.kind == NodeKind::Literal) continue;
            keyed.emplace_back(st->predicate.predicate, Hop{st->predicate.predicate, st->object});
        }
        std::sort(keyed.begin(), keyed.end());
        std::vector<Hop> hops;
        hops.reserve(keyed.size());
        for (auto& [k, hop] : keyed)
            if (hops.empty() || hops.back() != hop) hops.push_back(std::move(hop));
        return hops;
    }

    /// Classes entailed for an entity under reverse-inheritance semantics.
    /// Positive: directly asserted positive classes plus all superclasses
    /// (a protein performing iron ion binding also performs metal ion
    /// binding). Negative: directly asserted negative classes plus all
    /// subclasses (not performing iron ion binding rules out ferric iron
    /// binding). Reflexive-transitive; subclass cycles terminate via the
    /// visited set.
    std::set<NodeId> entailed_annotations(const NodeId& entity, Polarity polarity) const {
        std::set<NodeId> result;
        std::vector<NodeId> frontier;
        for (const Statement* st : outgoing(entity)) {
            if (st->predicate.is_subclass()) continue;
            if (st->polarity != polarity) continue;
            if (st->object.kind == NodeKind::Literal) continue;
            if (result.insert(st->object).second) frontier.push_back(st->object);
        }
        while (!frontier.empty()) {
            NodeId cur = std::move(frontier.back());
            frontier.pop_back();
            if (polarity == Polarity::Positive) {
                for (const Statement* st : outgoing(cur)) {
                    if (!st->predicate.is_subclass()) continue;
                    if (result.insert(st->object).second) frontier.push_back(st->object);
                }
            } else {
                for (const Statement* st : incoming(cur)) {
                    if (!st->predicate.is_subclass()) continue;
                    if (result.insert(st->subject).second) frontier.push_back(st->subject);
                }
            }
        }
        return result;
    }

private:
    std::set<Statement> statements_;
    std::map<NodeId, std::vector<const Statement*>> out_;
    std::map<NodeId, std::vector<const Statement*>> in_;
    std::set<NodeId> roots_;
};

}  // namespace truewalks
