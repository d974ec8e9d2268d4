#include <cctype>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "dhpp/errors.hpp"
#include "dhpp/topology.hpp"
#include "topology_io.hpp"

// Minimal GraphML reader: enough XML for <key>, <graph>, <node>, <edge> and
// <data> elements as emitted by the Topology Zoo and common graph tools.
// Namespaces, DTDs and general entities are out of scope.

namespace dhpp {
namespace detail {
namespace {

struct XmlTag {
  enum class Kind { open, close, self_close, end } kind = Kind::end;
  std::string name;
  std::map<std::string, std::string> attrs;
  std::string leading_text;  // text content seen before this tag
};

std::string decode_entities(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string::npos) throw ParseError("unterminated entity in GraphML document");
    const std::string ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") {
      out.push_back('&');
    } else if (ent == "lt") {
      out.push_back('<');
    } else if (ent == "gt") {
      out.push_back('>');
    } else if (ent == "quot") {
      out.push_back('"');
    } else if (ent == "apos") {
      out.push_back('\'');
    } else {
      throw ParseError("unsupported entity '&" + ent + ";' in GraphML document");
    }
    i = semi;
  }
  return out;
}

class XmlPull {
 public:
  explicit XmlPull(std::istream& in) : in_(in) {}

  XmlTag next() {
    XmlTag tag;
    std::string text;
    while (true) {
      int c = in_.get();
      if (c == EOF) {
        tag.kind = XmlTag::Kind::end;
        tag.leading_text = decode_entities(text);
        return tag;
      }
      if (c != '<') {
        text.push_back(static_cast<char>(c));
        continue;
      }
      // Comments, processing instructions, declarations.
      if (in_.peek() == '!') {
        skip_markup_declaration();
        continue;
      }
      if (in_.peek() == '?') {
        skip_until("?>");
        continue;
      }
      tag.leading_text = decode_entities(text);
      parse_tag(tag);
      return tag;
    }
  }

 private:
  void skip_markup_declaration() {
    in_.get();  // '!'
    if (in_.peek() == '-') {
      skip_until("-->");
    } else {
      int depth = 1;
      while (depth > 0) {
        const int c = in_.get();
        if (c == EOF) throw ParseError("unterminated declaration in GraphML document");
        if (c == '<') ++depth;
        if (c == '>') --depth;
      }
    }
  }

  void skip_until(const char* end) {
    std::string window;
    const std::string target(end);
    while (true) {
      const int c = in_.get();
      if (c == EOF) throw ParseError("unterminated markup in GraphML document");
      window.push_back(static_cast<char>(c));
      if (window.size() > target.size()) window.erase(window.begin());
      if (window == target) return;
    }
  }

  void parse_tag(XmlTag& tag) {
    int c = in_.get();
    if (c == '/') {
      tag.kind = XmlTag::Kind::close;
      tag.name = read_name(in_.get());
      while (c != '>' && c != EOF) c = in_.get();
      return;
    }
    tag.kind = XmlTag::Kind::open;
    tag.name = read_name(c);
    while (true) {
      c = in_.get();
      if (c == EOF) throw ParseError("unterminated tag in GraphML document");
      if (std::isspace(c)) continue;
      if (c == '/') {
        tag.kind = XmlTag::Kind::self_close;
        continue;
      }
      if (c == '>') return;
      std::string attr = read_name(c);
      while (std::isspace(in_.peek())) in_.get();
      if (in_.get() != '=') throw ParseError("attribute '" + attr + "' missing '='");
      while (std::isspace(in_.peek())) in_.get();
      const int quote = in_.get();
      if (quote != '"' && quote != '\'') throw ParseError("attribute value must be quoted");
      std::string value;
      while (true) {
        const int vc = in_.get();
        if (vc == EOF) throw ParseError("unterminated attribute value");
        if (vc == quote) break;
        value.push_back(static_cast<char>(vc));
      }
      tag.attrs.emplace(std::move(attr), decode_entities(value));
    }
  }

  std::string read_name(int first) {
    if (first == EOF) throw ParseError("unexpected end of GraphML document");
    std::string name(1, static_cast<char>(first));
    while (true) {
      const int c = in_.peek();
      if (c == EOF) break;
      if (std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == ':') {
        name.push_back(static_cast<char>(in_.get()));
      } else {
        break;
      }
    }
    return name;
  }

  std::istream& in_;
};

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("malformed ") + what + " value '" + s + "'");
  }
}

}  // namespace
}  // namespace detail

Topology Topology::parse_graphml(std::istream& in, const std::string& name) {
  using namespace detail;
  XmlPull pull(in);

  enum class AttrKind { latitude, longitude, label, latency, other };
  std::map<std::string, AttrKind> key_kinds;  // GraphML key id -> meaning

  std::vector<RawNode> nodes;
  std::vector<RawEdge> edges;
  enum class Where { outside, in_node, in_edge } where = Where::outside;
  std::string pending_data_key;
  bool in_data = false;
  bool saw_graphml = false;

  auto classify = [](const std::string& attr_name) {
    if (iequals(attr_name, "latitude")) return AttrKind::latitude;
    if (iequals(attr_name, "longitude")) return AttrKind::longitude;
    if (iequals(attr_name, "label") || iequals(attr_name, "name")) return AttrKind::label;
    if (iequals(attr_name, "latency") || iequals(attr_name, "delay")) return AttrKind::latency;
    return AttrKind::other;
  };

  auto apply_data = [&](const std::string& key_id, const std::string& raw_text) {
    const auto it = key_kinds.find(key_id);
    const AttrKind kind = it == key_kinds.end() ? AttrKind::other : it->second;
    if (kind == AttrKind::other) return;
    if (where == Where::in_node) {
      RawNode& n = nodes.back();
      switch (kind) {
        case AttrKind::latitude:
          n.latitude = parse_double(raw_text, "latitude");
          n.has_lat = true;
          break;
        case AttrKind::longitude:
          n.longitude = parse_double(raw_text, "longitude");
          n.has_lon = true;
          break;
        case AttrKind::label:
          n.label = raw_text;
          break;
        default:
          break;
      }
    } else if (where == Where::in_edge && kind == AttrKind::latency) {
      edges.back().latency_ms = parse_double(raw_text, "latency");
      edges.back().has_latency = true;
    }
  };

  while (true) {
    XmlTag tag = pull.next();
    if (in_data && !pending_data_key.empty()) {
      apply_data(pending_data_key, tag.leading_text);
      pending_data_key.clear();
    }
    if (tag.kind == XmlTag::Kind::end) break;

    const std::string& el = tag.name;
    if (tag.kind == XmlTag::Kind::close) {
      if (el == "node" || el == "edge") where = Where::outside;
      if (el == "data") in_data = false;
      continue;
    }
    if (el == "graphml") saw_graphml = true;
    if (el == "key") {
      const auto id = tag.attrs.find("id");
      const auto attr_name = tag.attrs.find("attr.name");
      if (id != tag.attrs.end() && attr_name != tag.attrs.end()) {
        key_kinds[id->second] = classify(attr_name->second);
      }
    } else if (el == "node") {
      const auto id = tag.attrs.find("id");
      if (id == tag.attrs.end()) throw ParseError("GraphML node without id");
      RawNode n;
      n.source_id = id->second;
      nodes.push_back(std::move(n));
      where = tag.kind == XmlTag::Kind::self_close ? Where::outside : Where::in_node;
    } else if (el == "edge") {
      const auto source = tag.attrs.find("source");
      const auto target = tag.attrs.find("target");
      if (source == tag.attrs.end() || target == tag.attrs.end()) {
        throw ParseError("GraphML edge without source/target");
      }
      RawEdge e;
      e.source = source->second;
      e.target = target->second;
      edges.push_back(std::move(e));
      where = tag.kind == XmlTag::Kind::self_close ? Where::outside : Where::in_edge;
    } else if (el == "data" && tag.kind == XmlTag::Kind::open) {
      const auto key = tag.attrs.find("key");
      pending_data_key = key == tag.attrs.end() ? "" : key->second;
      in_data = true;
    }
  }
  if (!saw_graphml) throw ParseError("not a GraphML document");
  return assemble_topology(std::move(nodes), std::move(edges), name);
}

}  // namespace dhpp
