#include <truewalks/kg.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

#include <algorithm>

using namespace truewalks;
using twt::ion_binding_kg;
using twt::stmt;
using twt::subclass;

TEST_CASE("add_statement inserts and indexes") {
    KnowledgeGraph kg;
    kg.add_statement(stmt("P1", "hasFunction", "F1"));
    REQUIRE(kg.statement_count() == 1);
    REQUIRE(kg.out_degree(NodeId::iri("P1")) == 1);
}

TEST_CASE("add_statement is idempotent on exact duplicates") {
    KnowledgeGraph kg;
    kg.add_statement(stmt("P1", "hasFunction", "F1"));
    kg.add_statement(stmt("P1", "hasFunction", "F1"));
    REQUIRE(kg.statement_count() == 1);
    REQUIRE(kg.out_degree(NodeId::iri("P1")) == 1);
}

TEST_CASE("statements differing only in polarity are distinct") {
    KnowledgeGraph kg;
    kg.add_statement(stmt("P1", "hasFunction", "F1", Polarity::Positive));
    kg.add_statement(stmt("P1", "hasFunction", "F1", Polarity::Negative));
    REQUIRE(kg.statement_count() == 2);
}

TEST_CASE("negative polarity on a subclass edge is rejected") {
    KnowledgeGraph kg;
    REQUIRE_THROWS_AS(
        kg.add_statement(Statement{NodeId::iri("F1"), EdgeLabel{std::string(vocab::kSubClassOf)},
                                   NodeId::iri("F2"), Polarity::Negative}),
        std::invalid_argument);
}

TEST_CASE("neighbors follows subclass edges upward for positive status") {
    KnowledgeGraph kg = ion_binding_kg();
    auto hops = kg.neighbors(NodeId::iri("F1"), Polarity::Positive);
    REQUIRE(std::count(hops.begin(), hops.end(),
                       Hop{std::string(kSubClassOfToken), NodeId::iri("F2")}) == 1);
    for (const auto& h : hops) REQUIRE(h.edge_token != kSuperClassOfToken);
}

TEST_CASE("neighbors follows subclass edges downward for negative status") {
    KnowledgeGraph kg = ion_binding_kg();
    auto hops = kg.neighbors(NodeId::iri("F1"), Polarity::Negative);
    REQUIRE(std::count(hops.begin(), hops.end(),
                       Hop{std::string(kSuperClassOfToken), NodeId::iri("F3")}) == 1);
    for (const auto& h : hops) REQUIRE(h.node != NodeId::iri("F2"));
}

TEST_CASE("neighbors of an unknown or isolated node is empty") {
    KnowledgeGraph kg = ion_binding_kg();
    REQUIRE(kg.neighbors(NodeId::iri("nowhere"), Polarity::Positive).empty());
    REQUIRE(kg.neighbors(NodeId::iri("nowhere"), Polarity::Negative).empty());
}

TEST_CASE("neighbors excludes negative assertion edges for positive status") {
    KnowledgeGraph kg = ion_binding_kg();
    auto pos = kg.neighbors(NodeId::iri("P2"), Polarity::Positive);
    REQUIRE(pos.empty());
    auto neg = kg.neighbors(NodeId::iri("P2"), Polarity::Negative);
    REQUIRE(neg == std::vector<Hop>{Hop{"hasFunction", NodeId::iri("F1")}});
}

TEST_CASE("neighbors skips literal objects") {
    KnowledgeGraph kg;
    kg.add_statement(Statement{NodeId::iri("C"), EdgeLabel{"label"},
                               NodeId::literal("a class"), Polarity::Positive});
    kg.add_statement(stmt("C", "partOf", "D"));
    auto hops = kg.neighbors(NodeId::iri("C"), Polarity::Positive);
    REQUIRE(hops == std::vector<Hop>{Hop{"partOf", NodeId::iri("D")}});
}

TEST_CASE("neighbor ordering is lexicographic by predicate then node") {
    KnowledgeGraph kg;
    kg.add_statement(stmt("X", "b", "N2"));
    kg.add_statement(stmt("X", "a", "N9"));
    kg.add_statement(stmt("X", "b", "N1"));
    auto hops = kg.neighbors(NodeId::iri("X"), Polarity::Positive);
    REQUIRE(hops == std::vector<Hop>{{"a", NodeId::iri("N9")},
                                     {"b", NodeId::iri("N1")},
                                     {"b", NodeId::iri("N2")}});
}

TEST_CASE("entailed annotations: positive closure climbs, negative descends") {
    KnowledgeGraph kg = ion_binding_kg();

    auto pos = kg.entailed_annotations(NodeId::iri("P1"), Polarity::Positive);
    REQUIRE(pos == std::set<NodeId>{NodeId::iri("F1"), NodeId::iri("F2"), NodeId::iri("F3")});
    REQUIRE(pos.contains(NodeId::iri("F2")));  // inherited upward

    auto neg = kg.entailed_annotations(NodeId::iri("P2"), Polarity::Negative);
    REQUIRE(neg == std::set<NodeId>{NodeId::iri("F1"), NodeId::iri("F3")});
    REQUIRE_FALSE(neg.contains(NodeId::iri("F2")));  // negation must not climb

    REQUIRE(kg.entailed_annotations(NodeId::iri("P2"), Polarity::Positive).empty());
}

TEST_CASE("entailed annotations of an entity with no statements is empty") {
    KnowledgeGraph kg = ion_binding_kg();
    kg.add_root_entity(NodeId::iri("P3"));
    REQUIRE(kg.entailed_annotations(NodeId::iri("P3"), Polarity::Positive).empty());
    REQUIRE(kg.entailed_annotations(NodeId::iri("P3"), Polarity::Negative).empty());
}

TEST_CASE("closures terminate on subclass cycles") {
    KnowledgeGraph kg;
    kg.add_statement(subclass("A", "B"));
    kg.add_statement(subclass("B", "A"));  // equivalence modeled as a 2-cycle
    kg.add_statement(stmt("E", "hasFeature", "A"));
    auto pos = kg.entailed_annotations(NodeId::iri("E"), Polarity::Positive);
    REQUIRE(pos == std::set<NodeId>{NodeId::iri("A"), NodeId::iri("B")});
}

TEST_CASE("closure matches single-step fixpoint oracle on random graphs") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(mix_seed(900, seed));
        KnowledgeGraph kg = twt::random_kg(rng);
        for (const NodeId& e : kg.root_entities()) {
            for (Polarity pol : {Polarity::Positive, Polarity::Negative}) {
                INFO("seed " << seed << " entity " << e.value);
                REQUIRE(kg.entailed_annotations(e, pol) ==
                        twt::closure_fixpoint_oracle(kg, e, pol));
            }
        }
    }
}

TEST_CASE("direction soundness on random graphs") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(mix_seed(901, seed));
        KnowledgeGraph kg = twt::random_kg(rng);
        std::set<NodeId> nodes;
        for (const Statement& st : kg.statements()) {
            nodes.insert(st.subject);
            nodes.insert(st.object);
        }
        for (const NodeId& n : nodes) {
            for (const Hop& h : kg.neighbors(n, Polarity::Positive)) {
                if (h.edge_token == kSubClassOfToken) {
                    REQUIRE(kg.statements().contains(
                        Statement{n, EdgeLabel{std::string(vocab::kSubClassOf)}, h.node,
                                  Polarity::Positive}));
                }
                REQUIRE(h.edge_token != kSuperClassOfToken);
            }
            for (const Hop& h : kg.neighbors(n, Polarity::Negative)) {
                if (h.edge_token == kSuperClassOfToken) {
                    REQUIRE(kg.statements().contains(
                        Statement{h.node, EdgeLabel{std::string(vocab::kSubClassOf)}, n,
                                  Polarity::Positive}));
                }
                REQUIRE(h.edge_token != kSubClassOfToken);
            }
        }
    }
}

TEST_CASE("rebuilding indexes from the statement multiset preserves neighbor answers") {
    Rng rng(mix_seed(902, 1));
    KnowledgeGraph kg = twt::random_kg(rng);
    KnowledgeGraph rebuilt;
    std::vector<Statement> sts(kg.statements().begin(), kg.statements().end());
    rng.shuffle(sts);
    for (const Statement& st : sts) rebuilt.add_statement(st);
    std::set<NodeId> nodes;
    for (const Statement& st : kg.statements()) {
        nodes.insert(st.subject);
        nodes.insert(st.object);
    }
    for (const NodeId& n : nodes) {
        REQUIRE(kg.neighbors(n, Polarity::Positive) == rebuilt.neighbors(n, Polarity::Positive));
        REQUIRE(kg.neighbors(n, Polarity::Negative) == rebuilt.neighbors(n, Polarity::Negative));
    }
}
