#include <cctype>
#include <istream>
#include <memory>
#include <string>
#include <vector>

#include "dhpp/errors.hpp"
#include "dhpp/topology.hpp"
#include "topology_io.hpp"

// GML as published by the Topology Zoo: a tree of `key value` pairs where a
// value is a number, a quoted string, or a bracketed list. Node coordinates
// live in per-node `Latitude`/`Longitude` keys (matched case-insensitively);
// an edge may carry an explicit latency via a `latency`/`delay` key.

namespace dhpp {
namespace detail {

bool iequals(const std::string& a, const char* b) {
  std::size_t i = 0;
  for (; i < a.size() && b[i] != '\0'; ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return i == a.size() && b[i] == '\0';
}

namespace {

struct GmlValue;
using GmlEntry = std::pair<std::string, GmlValue>;

struct GmlValue {
  enum class Kind { number, string, list } kind = Kind::number;
  double number = 0.0;
  std::string text;
  std::vector<GmlEntry> list;
};

class GmlLexer {
 public:
  explicit GmlLexer(std::istream& in) : in_(in) {}

  struct Token {
    enum class Kind { key, number, string, open, close, end } kind = Kind::end;
    std::string text;
    double number = 0.0;
  };

  Token next() {
    skip_space_and_comments();
    int c = in_.get();
    if (c == EOF) return {Token::Kind::end, "", 0.0};
    if (c == '[') return {Token::Kind::open, "[", 0.0};
    if (c == ']') return {Token::Kind::close, "]", 0.0};
    if (c == '"') {
      std::string s;
      while (true) {
        c = in_.get();
        if (c == EOF) throw ParseError("unterminated string in GML document");
        if (c == '"') break;
        s.push_back(static_cast<char>(c));
      }
      return {Token::Kind::string, s, 0.0};
    }
    if (c == '-' || c == '+' || c == '.' || std::isdigit(c)) {
      std::string s(1, static_cast<char>(c));
      while (true) {
        c = in_.peek();
        if (c == EOF) break;
        if (std::isdigit(c) || c == '.' || c == '-' || c == '+' || c == 'e' || c == 'E') {
          s.push_back(static_cast<char>(in_.get()));
        } else {
          break;
        }
      }
      try {
        return {Token::Kind::number, s, std::stod(s)};
      } catch (const std::exception&) {
        throw ParseError("malformed number '" + s + "' in GML document");
      }
    }
    if (std::isalpha(c) || c == '_') {
      std::string s(1, static_cast<char>(c));
      while (true) {
        c = in_.peek();
        if (c == EOF) break;
        if (std::isalnum(c) || c == '_' || c == '.') {
          s.push_back(static_cast<char>(in_.get()));
        } else {
          break;
        }
      }
      return {Token::Kind::key, s, 0.0};
    }
    throw ParseError(std::string("unexpected character '") + static_cast<char>(c) +
                     "' in GML document");
  }

 private:
  void skip_space_and_comments() {
    while (true) {
      int c = in_.peek();
      if (c == EOF) return;
      if (std::isspace(c)) {
        in_.get();
        continue;
      }
      if (c == '#') {
        while (c != EOF && c != '\n') c = in_.get();
        continue;
      }
      return;
    }
  }

  std::istream& in_;
};

// Parses entries until the matching close bracket (or end of input at depth 0).
std::vector<GmlEntry> parse_entries(GmlLexer& lex, bool top_level) {
  std::vector<GmlEntry> entries;
  while (true) {
    auto tok = lex.next();
    if (tok.kind == GmlLexer::Token::Kind::end) {
      if (!top_level) throw ParseError("unexpected end of GML document inside a list");
      return entries;
    }
    if (tok.kind == GmlLexer::Token::Kind::close) {
      if (top_level) throw ParseError("unbalanced ']' in GML document");
      return entries;
    }
    if (tok.kind != GmlLexer::Token::Kind::key) {
      throw ParseError("expected key in GML document");
    }
    const std::string key = tok.text;
    auto val = lex.next();
    GmlValue value;
    switch (val.kind) {
      case GmlLexer::Token::Kind::number:
        value.kind = GmlValue::Kind::number;
        value.number = val.number;
        value.text = val.text;
        break;
      case GmlLexer::Token::Kind::string:
        value.kind = GmlValue::Kind::string;
        value.text = val.text;
        break;
      case GmlLexer::Token::Kind::open:
        value.kind = GmlValue::Kind::list;
        value.list = parse_entries(lex, false);
        break;
      default:
        throw ParseError("key '" + key + "' has no value in GML document");
    }
    entries.emplace_back(key, std::move(value));
  }
}

const GmlValue* find_entry(const std::vector<GmlEntry>& entries, const char* key) {
  for (const auto& [k, v] : entries) {
    if (iequals(k, key)) return &v;
  }
  return nullptr;
}

std::string value_as_id(const GmlValue& v) {
  if (v.kind == GmlValue::Kind::string) return v.text;
  if (v.kind == GmlValue::Kind::number) {
    // Preserve the literal spelling so integer ids round-trip exactly.
    return v.text;
  }
  throw ParseError("id value must be a scalar");
}

}  // namespace
}  // namespace detail

Topology Topology::parse_gml(std::istream& in, const std::string& name) {
  using namespace detail;
  GmlLexer lex(in);
  auto top = parse_entries(lex, true);
  const GmlValue* graph = find_entry(top, "graph");
  if (graph == nullptr || graph->kind != GmlValue::Kind::list) {
    throw ParseError("GML document has no 'graph' list");
  }

  std::vector<RawNode> nodes;
  std::vector<RawEdge> edges;
  for (const auto& [key, value] : graph->list) {
    if (iequals(key, "node")) {
      if (value.kind != GmlValue::Kind::list) throw ParseError("'node' must be a list");
      RawNode n;
      const GmlValue* id = find_entry(value.list, "id");
      if (id == nullptr) throw ParseError("node without id");
      n.source_id = value_as_id(*id);
      if (const GmlValue* label = find_entry(value.list, "label")) {
        n.label = label->kind == GmlValue::Kind::string ? label->text : label->text;
      }
      if (const GmlValue* lat = find_entry(value.list, "Latitude");
          lat != nullptr && lat->kind == GmlValue::Kind::number) {
        n.latitude = lat->number;
        n.has_lat = true;
      }
      if (const GmlValue* lon = find_entry(value.list, "Longitude");
          lon != nullptr && lon->kind == GmlValue::Kind::number) {
        n.longitude = lon->number;
        n.has_lon = true;
      }
      nodes.push_back(std::move(n));
    } else if (iequals(key, "edge")) {
      if (value.kind != GmlValue::Kind::list) throw ParseError("'edge' must be a list");
      RawEdge e;
      const GmlValue* source = find_entry(value.list, "source");
      const GmlValue* target = find_entry(value.list, "target");
      if (source == nullptr || target == nullptr) throw ParseError("edge without source/target");
      e.source = value_as_id(*source);
      e.target = value_as_id(*target);
      for (const char* key_name : {"latency", "delay"}) {
        if (const GmlValue* latency = find_entry(value.list, key_name);
            latency != nullptr && latency->kind == GmlValue::Kind::number) {
          e.latency_ms = latency->number;
          e.has_latency = true;
          break;
        }
      }
      edges.push_back(std::move(e));
    }
  }
  return assemble_topology(std::move(nodes), std::move(edges), name);
}

}  // namespace dhpp
