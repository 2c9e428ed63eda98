#pragma once
// Shared test fixtures and brute-force oracles.

#include <truewalks/kg.hpp>
#include <truewalks/rng.hpp>

#include <set>
#include <string>
#include <vector>

namespace twt {

using truewalks::EdgeLabel;
using truewalks::KnowledgeGraph;
using truewalks::NodeId;
using truewalks::Polarity;
using truewalks::Statement;

inline Statement stmt(const std::string& s, const std::string& p, const std::string& o,
                      Polarity pol = Polarity::Positive) {
    return Statement{NodeId::iri(s), EdgeLabel{p}, NodeId::iri(o), pol};
}

inline Statement subclass(const std::string& sub, const std::string& super) {
    return stmt(sub, std::string(truewalks::vocab::kSubClassOf), super);
}

// The ion-binding fragment: F1 = iron ion binding, F2 = metal ion binding
// (superclass of F1), F3 = ferric iron binding (subclass of F1). P1 performs
// F1 and F3; P2 explicitly does not perform F1.
inline KnowledgeGraph ion_binding_kg() {
    KnowledgeGraph kg;
    kg.add_statement(subclass("F1", "F2"));
    kg.add_statement(subclass("F3", "F1"));
    kg.add_statement(stmt("P1", "hasFunction", "F1"));
    kg.add_statement(stmt("P1", "hasFunction", "F3"));
    kg.add_statement(stmt("P2", "hasFunction", "F1", Polarity::Negative));
    kg.add_root_entity(NodeId::iri("P1"));
    kg.add_root_entity(NodeId::iri("P2"));
    return kg;
}

// Extended variant where both entities carry both polarities: adds a fourth
// class F4 (calcium ion binding, subclass of F2), a positive annotation for
// P2 and a negative one for P1.
inline KnowledgeGraph ion_binding_kg_extended() {
    KnowledgeGraph kg = ion_binding_kg();
    kg.add_statement(subclass("F4", "F2"));
    kg.add_statement(stmt("P2", "hasFunction", "F2"));
    kg.add_statement(stmt("P1", "hasFunction", "F4", Polarity::Negative));
    return kg;
}

struct RandomKgConfig {
    std::size_t n_classes = 8;
    std::size_t n_entities = 3;
    std::size_t n_subclass_edges = 8;
    std::size_t n_assertions = 6;
};

// Random ontology-shaped graph: a subclass DAG (edges only from higher to
// lower index, so acyclic) plus positive/negative assertions from entities
// to classes.
inline KnowledgeGraph random_kg(truewalks::Rng& rng, const RandomKgConfig& cfg = {}) {
    KnowledgeGraph kg;
    std::vector<std::string> classes;
    for (std::size_t i = 0; i < cfg.n_classes; ++i) classes.push_back("C" + std::to_string(i));
    for (std::size_t i = 0; i < cfg.n_subclass_edges; ++i) {
        std::size_t a = rng.below(cfg.n_classes);
        std::size_t b = rng.below(cfg.n_classes);
        if (a == b) continue;
        if (a < b) std::swap(a, b);  // subclass edge from higher index to lower
        kg.add_statement(subclass(classes[a], classes[b]));
    }
    for (std::size_t e = 0; e < cfg.n_entities; ++e) {
        std::string ent = "E" + std::to_string(e);
        kg.add_root_entity(NodeId::iri(ent));
        for (std::size_t i = 0; i < cfg.n_assertions; ++i) {
            std::size_t c = rng.below(cfg.n_classes);
            Polarity pol = rng.bernoulli(0.5) ? Polarity::Positive : Polarity::Negative;
            kg.add_statement(stmt(ent, "hasFeature", classes[c], pol));
        }
    }
    return kg;
}

// Single-step expansion until fixpoint; independent of the BFS closure in
// KnowledgeGraph::entailed_annotations.
inline std::set<NodeId> closure_fixpoint_oracle(const KnowledgeGraph& kg, const NodeId& entity,
                                                Polarity polarity) {
    std::set<NodeId> current;
    for (const Statement& st : kg.statements()) {
        if (st.subject != entity) continue;
        if (st.predicate.is_subclass()) continue;
        if (st.polarity != polarity) continue;
        if (st.object.kind == truewalks::NodeKind::Literal) continue;
        current.insert(st.object);
    }
    for (;;) {
        std::set<NodeId> next = current;
        for (const Statement& st : kg.statements()) {
            if (!st.predicate.is_subclass()) continue;
            if (polarity == Polarity::Positive) {
                if (current.contains(st.subject)) next.insert(st.object);
            } else {
                if (current.contains(st.object)) next.insert(st.subject);
            }
        }
        if (next == current) return current;
        current = std::move(next);
    }
}

}  // namespace twt
