#pragma once

// On-disk input handling: an N-Triples subset parser, recognition of reified
// negative property assertions, TSV annotation/pair readers, and the matching
// writers. Parsers are total: malformed input yields located errors, never
// exceptions. Errors carry 1-based line/column positions.
//
// Grammar accepted per line:  subject predicate object .
//   subject:   <IRI> | _:label
//   predicate: <IRI>
//   object:    <IRI> | _:label | "literal" with \" \\ \n \r \t escapes and an
//              optional ^^<datatype> suffix captured opaquely into the value.
// `#` as the first non-blank character starts a comment line. Language tags
// are outside the subset and rejected.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "truewalks/kg.hpp"

namespace truewalks {

struct RawTriple {
  NodeId subject;
  std::string predicate;
  NodeId object;
  std::size_t line = 0;  // 1-based source line; 0 for synthetic triples

  bool operator==(const RawTriple& o) const {
    return subject == o.subject && predicate == o.predicate && object == o.object;
  }
};

struct ParseError {
  std::size_t line = 0;
  std::size_t column = 0;  // 0 when the error is not tied to a column
  std::string message;
};

struct TripleParse {
  std::vector<RawTriple> triples;
  std::vector<ParseError> errors;
  bool ok() const { return errors.empty(); }
};

namespace detail {

inline bool is_blank_label_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '-' || c == '.';
}

// Parses one statement line. Column numbers index into `ln` 1-based.
inline void parse_triple_line(std::string_view ln, std::size_t line_no, TripleParse& out) {
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < ln.size() && (ln[i] == ' ' || ln[i] == '\t')) ++i;
  };
  bool failed = false;
  auto err = [&](std::size_t col, std::string msg) {
    if (!failed) out.errors.push_back({line_no, col, std::move(msg)});
    failed = true;
  };

  // allow_literal/allow_blank gate which term kinds are legal at this position.
  auto term = [&](bool allow_literal, bool allow_blank) -> std::optional<NodeId> {
    skip_ws();
    if (i >= ln.size()) {
      err(ln.size() + 1, "missing object/terminator");
      return std::nullopt;
    }
    const char c = ln[i];
    if (c == '<') {
      const std::size_t open = i++;
      std::string value;
      while (i < ln.size() && ln[i] != '>') {
        if (ln[i] == ' ' || ln[i] == '\t' || ln[i] == '<') {
          err(i + 1, "malformed IRI");
          return std::nullopt;
        }
        value.push_back(ln[i++]);
      }
      if (i >= ln.size() || value.empty()) {
        err(open + 1, "malformed IRI");
        return std::nullopt;
      }
      ++i;  // '>'
      return NodeId::iri(value);
    }
    if (c == '_' && i + 1 < ln.size() && ln[i + 1] == ':') {
      if (!allow_blank) {
        err(i + 1, "blank node not allowed here");
        return std::nullopt;
      }
      const std::size_t open = i;
      i += 2;
      std::string label;
      while (i < ln.size() && ln[i] != ' ' && ln[i] != '\t') {
        if (!is_blank_label_char(ln[i])) {
          err(i + 1, "malformed blank node label");
          return std::nullopt;
        }
        label.push_back(ln[i++]);
      }
      if (label.empty()) {
        err(open + 1, "malformed blank node label");
        return std::nullopt;
      }
      return NodeId::blank(label);
    }
    if (c == '"') {
      const std::size_t open = i++;
      if (!allow_literal) {
        err(open + 1, "literal not allowed here");
        return std::nullopt;
      }
      std::string value;
      bool closed = false;
      while (i < ln.size()) {
        const char ch = ln[i];
        if (ch == '"') {
          closed = true;
          ++i;
          break;
        }
        if (ch == '\\') {
          if (i + 1 >= ln.size()) {
            err(i + 1, "unterminated literal");
            return std::nullopt;
          }
          const char esc = ln[i + 1];
          switch (esc) {
            case '\\': value.push_back('\\'); break;
            case '"': value.push_back('"'); break;
            case 'n': value.push_back('\n'); break;
            case 'r': value.push_back('\r'); break;
            case 't': value.push_back('\t'); break;
            default:
              err(i + 2, "bad escape sequence");
              return std::nullopt;
          }
          i += 2;
          continue;
        }
        value.push_back(ch);
        ++i;
      }
      if (!closed) {
        err(open + 1, "unterminated literal");
        return std::nullopt;
      }
      if (i < ln.size() && ln[i] == '@') {
        err(i + 1, "language tags unsupported");
        return std::nullopt;
      }
      if (i + 1 < ln.size() && ln[i] == '^' && ln[i + 1] == '^') {
        // Opaque datatype capture: the raw suffix rides along in the value.
        if (i + 2 >= ln.size() || ln[i + 2] != '<') {
          err(i + 1, "malformed datatype suffix");
          return std::nullopt;
        }
        std::size_t j = i + 3;
        while (j < ln.size() && ln[j] != '>') ++j;
        if (j >= ln.size()) {
          err(i + 1, "malformed datatype suffix");
          return std::nullopt;
        }
        value.append(ln.substr(i, j + 1 - i));
        i = j + 1;
      }
      return NodeId::literal(value);
    }
    err(i + 1, "malformed term");
    return std::nullopt;
  };

  auto subject = term(false, true);
  if (!subject) return;
  auto predicate = term(false, false);
  if (!predicate) return;
  auto object = term(true, true);
  if (!object) return;
  skip_ws();
  if (i >= ln.size() || ln[i] != '.') {
    err(i + 1, "missing final '.'");
    return;
  }
  ++i;
  skip_ws();
  if (i < ln.size()) {
    err(i + 1, "trailing content after '.'");
    return;
  }
  out.triples.push_back({std::move(*subject), std::move(predicate->value), std::move(*object), line_no});
}

}  // namespace detail

inline TripleParse parse_ntriples(std::string_view text) {
  TripleParse out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view ln = text.substr(pos, eol - pos);
    if (!ln.empty() && ln.back() == '\r') ln.remove_suffix(1);
    ++line_no;
    pos = eol + 1;

    std::size_t first = 0;
    while (first < ln.size() && (ln[first] == ' ' || ln[first] == '\t')) ++first;
    if (first == ln.size() || ln[first] == '#') continue;
    detail::parse_triple_line(ln, line_no, out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reified negative assertions

struct FoldResult {
  std::vector<Statement> statements;
  std::vector<ParseError> errors;
  bool ok() const { return errors.empty(); }
};

// Folds every complete cluster
//   {(_:x, rdf:type, owl:NegativePropertyAssertion),
//    (_:x, owl:sourceIndividual, s), (_:x, owl:assertionProperty, p),
//    (_:x, owl:targetIndividual, o)}
// into one Statement (s, p, o, Negative), consuming all four triples. Every
// remaining triple becomes a Positive statement in input order; the folded
// statement takes the position of its type triple. Incomplete, conflicting,
// or stray reification fragments are rejected with errors naming the node;
// nothing from a bad cluster leaks through as a positive statement.
inline FoldResult fold_negative_assertions(const std::vector<RawTriple>& triples) {
  FoldResult out;

  struct Cluster {
    std::optional<NodeId> source;
    std::optional<std::string> property;
    std::optional<NodeId> target;
    std::size_t type_line = 0;
    bool bad = false;
  };
  std::map<NodeId, Cluster> clusters;

  auto is_type_triple = [](const RawTriple& t) {
    return t.predicate == vocab::kRdfType &&
           t.object == NodeId::iri(std::string(vocab::kNegativeAssertion));
  };
  auto reification_role = [](std::string_view pred) {
    return pred == vocab::kSourceIndividual || pred == vocab::kAssertionProperty ||
           pred == vocab::kTargetIndividual;
  };

  for (const auto& t : triples) {
    if (!is_type_triple(t)) continue;
    if (t.subject.kind != NodeKind::BlankNode) {
      out.errors.push_back({t.line, 0, "negative assertion subject must be a blank node: " + t.subject.token()});
      continue;
    }
    auto& c = clusters[t.subject];
    if (c.type_line != 0) continue;  // duplicate type triple collapses
    c.type_line = t.line;
  }

  auto fail = [&](Cluster& c, std::size_t line, std::string msg) {
    if (!c.bad) out.errors.push_back({line, 0, std::move(msg)});
    c.bad = true;
  };

  for (const auto& t : triples) {
    auto it = clusters.find(t.subject);
    if (it == clusters.end()) continue;
    auto& c = it->second;
    const std::string label = t.subject.token();
    if (is_type_triple(t)) continue;
    if (t.predicate == vocab::kSourceIndividual) {
      if (t.object.kind == NodeKind::Literal) {
        fail(c, t.line, "negative assertion source must be a node: " + label);
      } else if (c.source && *c.source != t.object) {
        fail(c, t.line, "ambiguous negative assertion " + label);
      } else {
        c.source = t.object;
      }
    } else if (t.predicate == vocab::kAssertionProperty) {
      if (t.object.kind != NodeKind::Iri) {
        fail(c, t.line, "negative assertion property must be an IRI: " + label);
      } else if (c.property && *c.property != t.object.value) {
        fail(c, t.line, "ambiguous negative assertion " + label);
      } else {
        c.property = t.object.value;
      }
    } else if (t.predicate == vocab::kTargetIndividual) {
      if (c.target && *c.target != t.object) {
        fail(c, t.line, "ambiguous negative assertion " + label);
      } else {
        c.target = t.object;
      }
    } else {
      fail(c, t.line, "unexpected triple on negative assertion " + label);
    }
  }

  for (auto& [node, c] : clusters) {
    if (c.bad) continue;
    if (!c.source || !c.property || !c.target) {
      out.errors.push_back({c.type_line, 0, "incomplete negative assertion " + node.token()});
      c.bad = true;
    } else if (*c.property == vocab::kSubClassOf) {
      out.errors.push_back({c.type_line, 0, "negative subclass assertion " + node.token()});
      c.bad = true;
    }
  }

  for (const auto& t : triples) {
    auto it = clusters.find(t.subject);
    if (it != clusters.end()) {
      // Cluster triples are consumed either way; the statement lands at the
      // type triple's slot so file order is preserved.
      if (!it->second.bad && is_type_triple(t)) {
        const auto& c = it->second;
        out.statements.push_back({*c.source, {*c.property}, *c.target, Polarity::Negative});
      }
      continue;
    }
    if (is_type_triple(t)) continue;  // already rejected in the first pass
    if (reification_role(t.predicate)) {
      out.errors.push_back({t.line, 0, "unmatched reification fragment on " + t.subject.token()});
      continue;
    }
    out.statements.push_back({t.subject, {t.predicate}, t.object, Polarity::Positive});
  }
  return out;
}

// ---------------------------------------------------------------------------
// TSV inputs

struct AnnotationRecord {
  std::string entity;
  std::string property;
  std::string cls;
  Polarity polarity = Polarity::Positive;
  std::size_t line = 0;

  bool operator==(const AnnotationRecord& o) const {
    return entity == o.entity && property == o.property && cls == o.cls && polarity == o.polarity;
  }
};

struct AnnotationParse {
  std::vector<AnnotationRecord> records;
  std::vector<ParseError> errors;
  bool ok() const { return errors.empty(); }
};

struct PairRecord {
  std::string a;
  std::string b;
  int label = 0;  // 1 = positive pair, 0 = negative pair
  std::size_t line = 0;

  bool operator==(const PairRecord& o) const { return a == o.a && b == o.b && label == o.label; }
};

struct PairParse {
  std::vector<PairRecord> pairs;
  std::vector<ParseError> errors;
  bool ok() const { return errors.empty(); }
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view ln) {
  std::vector<std::string_view> cols;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = ln.find('\t', pos);
    if (tab == std::string_view::npos) {
      cols.push_back(ln.substr(pos));
      return cols;
    }
    cols.push_back(ln.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

// Walks a TSV stream: validates the exact header, then hands each non-empty
// data line to `row` as (columns, line_no).
template <typename RowFn>
inline void for_tsv_rows(std::string_view text, std::string_view header,
                         std::vector<ParseError>& errors, RowFn row) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view ln = text.substr(pos, eol - pos);
    if (!ln.empty() && ln.back() == '\r') ln.remove_suffix(1);
    ++line_no;
    pos = eol + 1;
    if (ln.empty()) continue;
    if (!saw_header) {
      if (ln != header) {
        errors.push_back({line_no, 1, "missing or malformed header"});
        return;
      }
      saw_header = true;
      continue;
    }
    row(split_tabs(ln), line_no);
  }
  if (!saw_header) errors.push_back({1, 1, "missing or malformed header"});
}

}  // namespace detail

inline AnnotationParse parse_annotations(std::string_view text) {
  AnnotationParse out;
  detail::for_tsv_rows(text, "entity\tproperty\tclass\tpolarity", out.errors,
                       [&](const std::vector<std::string_view>& cols, std::size_t line_no) {
    if (cols.size() != 4) {
      out.errors.push_back({line_no, 1, "expected 4 tab-separated columns, got " + std::to_string(cols.size())});
      return;
    }
    for (std::size_t k = 0; k < 3; ++k) {
      if (cols[k].empty()) {
        out.errors.push_back({line_no, 1, "empty field"});
        return;
      }
    }
    Polarity pol;
    if (cols[3] == "pos") {
      pol = Polarity::Positive;
    } else if (cols[3] == "neg") {
      pol = Polarity::Negative;
    } else {
      out.errors.push_back({line_no, 1, "unknown polarity token '" + std::string(cols[3]) + "'"});
      return;
    }
    out.records.push_back({std::string(cols[0]), std::string(cols[1]), std::string(cols[2]), pol, line_no});
  });
  return out;
}

inline PairParse parse_pairs(std::string_view text) {
  PairParse out;
  std::set<std::pair<std::string_view, std::string_view>> seen;
  detail::for_tsv_rows(text, "entityA\tentityB\tlabel", out.errors,
                       [&](const std::vector<std::string_view>& cols, std::size_t line_no) {
    if (cols.size() != 3) {
      out.errors.push_back({line_no, 1, "expected 3 tab-separated columns, got " + std::to_string(cols.size())});
      return;
    }
    if (cols[0].empty() || cols[1].empty()) {
      out.errors.push_back({line_no, 1, "empty field"});
      return;
    }
    int label;
    if (cols[2] == "0") {
      label = 0;
    } else if (cols[2] == "1") {
      label = 1;
    } else {
      out.errors.push_back({line_no, 1, "label must be 0 or 1, got '" + std::string(cols[2]) + "'"});
      return;
    }
    out.pairs.push_back({std::string(cols[0]), std::string(cols[1]), label, line_no});
  });
  // Detect duplicate unordered pairs against the stored (stable) strings.
  for (const auto& p : out.pairs) {
    auto key = std::minmax(std::string_view(p.a), std::string_view(p.b));
    if (!seen.insert({key.first, key.second}).second) {
      out.errors.push_back({p.line, 1, "duplicate pair " + p.a + " / " + p.b});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assembly

struct AssembledKg {
  KnowledgeGraph kg;
  std::vector<std::string> warnings;
};

// Merges ontology statements and annotation edges into one graph. Annotation
// entities become the root entity set. An annotation class missing from the
// ontology is a warning, not an error: the edge is still added and the class
// becomes a fresh node.
inline AssembledKg assemble_kg(const std::vector<Statement>& ontology,
                               const std::vector<AnnotationRecord>& annotations) {
  AssembledKg out;
  std::set<std::string> ontology_nodes;
  for (const auto& s : ontology) {
    if (s.subject.kind == NodeKind::Iri) ontology_nodes.insert(s.subject.value);
    if (s.object.kind == NodeKind::Iri) ontology_nodes.insert(s.object.value);
    try {
      out.kg.add_statement(s);
    } catch (const std::invalid_argument& e) {
      out.warnings.push_back(std::string("dropped ontology statement: ") + e.what());
    }
  }
  for (const auto& a : annotations) {
    if (!ontology_nodes.count(a.cls)) {
      out.warnings.push_back("annotation class " + a.cls + " not in ontology");
    }
    try {
      out.kg.add_statement({NodeId::iri(a.entity), {a.property}, NodeId::iri(a.cls), a.polarity});
    } catch (const std::invalid_argument& e) {
      out.warnings.push_back(std::string("dropped annotation: ") + e.what());
    }
    out.kg.add_root_entity(NodeId::iri(a.entity));
  }
  return out;
}

struct LoadedKg {
  KnowledgeGraph kg;
  std::vector<ParseError> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// parse -> fold -> assemble, accumulating every diagnostic.
inline LoadedKg load_kg(std::string_view ontology_text, std::string_view annotations_text) {
  LoadedKg out;
  auto parsed = parse_ntriples(ontology_text);
  out.errors = std::move(parsed.errors);
  auto folded = fold_negative_assertions(parsed.triples);
  out.errors.insert(out.errors.end(), folded.errors.begin(), folded.errors.end());
  auto ann = parse_annotations(annotations_text);
  out.errors.insert(out.errors.end(), ann.errors.begin(), ann.errors.end());
  auto assembled = assemble_kg(folded.statements, ann.records);
  out.kg = std::move(assembled.kg);
  out.warnings = std::move(assembled.warnings);
  return out;
}

// ---------------------------------------------------------------------------
// Writers

namespace detail {

inline std::string quote_literal(std::string_view value) {
  // A trailing ^^<...> datatype suffix was captured opaquely; emit it raw.
  std::string_view body = value;
  std::string_view suffix;
  if (value.size() >= 5 && value.back() == '>') {
    std::size_t mark = value.rfind("^^<");
    if (mark != std::string_view::npos) {
      body = value.substr(0, mark);
      suffix = value.substr(mark);
    }
  }
  std::string out = "\"";
  for (char c : body) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  out.append(suffix);
  return out;
}

inline std::string term_text(const NodeId& n) {
  switch (n.kind) {
    case NodeKind::Iri: return "<" + n.value + ">";
    case NodeKind::BlankNode: return "_:" + n.value;
    case NodeKind::Literal: return quote_literal(n.value);
  }
  return {};
}

}  // namespace detail

// Serializes statements to the N-Triples subset. Negative statements are
// written as 4-triple reification clusters with fresh blank labels that stay
// clear of any blank label already used by the statements, so the output
// re-parses and re-folds to the same statement multiset.
inline std::string write_ntriples(const std::vector<Statement>& statements) {
  std::set<std::string> used;
  for (const auto& s : statements) {
    if (s.subject.kind == NodeKind::BlankNode) used.insert(s.subject.value);
    if (s.object.kind == NodeKind::BlankNode) used.insert(s.object.value);
  }
  std::size_t counter = 0;
  auto fresh_blank = [&] {
    std::string label;
    do {
      label = "n" + std::to_string(counter++);
    } while (used.count(label));
    used.insert(label);
    return label;
  };

  std::string out;
  for (const auto& s : statements) {
    if (s.polarity == Polarity::Positive) {
      out += detail::term_text(s.subject) + " <" + s.predicate.predicate + "> " +
             detail::term_text(s.object) + " .\n";
      continue;
    }
    const std::string x = "_:" + fresh_blank();
    out += x + " <" + std::string(vocab::kRdfType) + "> <" + std::string(vocab::kNegativeAssertion) + "> .\n";
    out += x + " <" + std::string(vocab::kSourceIndividual) + "> " + detail::term_text(s.subject) + " .\n";
    out += x + " <" + std::string(vocab::kAssertionProperty) + "> <" + s.predicate.predicate + "> .\n";
    out += x + " <" + std::string(vocab::kTargetIndividual) + "> " + detail::term_text(s.object) + " .\n";
  }
  return out;
}

inline std::string write_annotations(const std::vector<AnnotationRecord>& records) {
  std::string out = "entity\tproperty\tclass\tpolarity\n";
  for (const auto& r : records) {
    out += r.entity + "\t" + r.property + "\t" + r.cls + "\t" +
           (r.polarity == Polarity::Positive ? "pos" : "neg") + "\n";
  }
  return out;
}

inline std::string write_pairs(const std::vector<PairRecord>& pairs) {
  std::string out = "entityA\tentityB\tlabel\n";
  for (const auto& p : pairs) {
    out += p.a + "\t" + p.b + "\t" + std::to_string(p.label) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// File helpers

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace truewalks
