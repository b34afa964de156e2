// Copyright 2022-2024  atcdp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ATCDP_ANNOTATION_HPP
#define ATCDP_ANNOTATION_HPP

#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atcdp/cnet.hpp"
#include "atcdp/entity.hpp"
#include "atcdp/error.hpp"
#include "atcdp/textnorm.hpp"

namespace atcdp::formats {

/// One annotated sample: timing, speaker channel, free-text role label,
/// transcript with inline entity markup, and correctness flags. The flags'
/// interaction is not interpreted, they are carried as-is.
struct AnnSegment {
  double start = 0.0;
  double end = 0.0;
  std::string speaker = "UNK";      // channel letter or UNK
  std::string speaker_label;        // e.g. "pilot", "ATCO approach"
  std::string text;                 // transcript with inline [#tag] markup
  int correct = 0;
  int correct_transcript = 0;
  int correct_tagging = 0;
  int non_english = 0;
  std::string start_raw;
  std::string end_raw;
};

struct AnnotationDoc {
  std::vector<AnnSegment> segments;
};

/// A transcript split into tokens with its entity markup lifted out into
/// token-index spans. [unk] counts as a token.
struct MarkupText {
  std::vector<std::string> tokens;
  std::vector<EntitySpan> spans;
};

/// Parses inline entity markup: `[#tag]words[/#tag]` with tag in
/// {callsign, command, value}, plus the bare [unk] token. Any other
/// bracketed token, nesting, or an unbalanced tag is an error.
inline MarkupText markup_to_spans(std::string_view text) {
  MarkupText out;
  std::optional<EntityLabel> open;
  size_t open_start = 0;
  for (const auto& tok : textnorm::detail::tokenize_with_markup(text)) {
    if (textnorm::detail::is_open_marker(tok)) {
      auto label = label_from_name(std::string_view(tok).substr(2, tok.size() - 3));
      if (!label) throw ParseError("unknown entity tag: " + tok);
      if (open) throw ParseError("nested entity tag: " + tok);
      open = *label;
      open_start = out.tokens.size();
    } else if (textnorm::detail::is_close_marker(tok)) {
      auto label = label_from_name(std::string_view(tok).substr(3, tok.size() - 4));
      if (!label) throw ParseError("unknown entity tag: " + tok);
      if (!open || open != label) throw ParseError("unbalanced entity tag: " + tok);
      if (out.tokens.size() == open_start) throw ParseError("empty entity span: " + tok);
      out.spans.push_back(EntitySpan{*label, open_start, out.tokens.size()});
      open.reset();
    } else if (tok == "[unk]") {
      out.tokens.push_back(tok);
    } else if (tok.find('[') != std::string::npos || tok.find(']') != std::string::npos) {
      throw ParseError("stray bracket token: " + tok);
    } else {
      out.tokens.push_back(tok);
    }
  }
  if (open) throw ParseError("entity tag not closed");
  return out;
}

/// Renders tokens plus spans back into inline markup; spans must be sorted
/// and non-overlapping.
inline std::string spans_to_markup(const std::vector<std::string>& tokens,
                                   const std::vector<EntitySpan>& spans) {
  size_t prev_end = 0;
  for (const auto& s : spans) {
    if (s.start_token >= s.end_token || s.end_token > tokens.size() || s.start_token < prev_end)
      throw InvalidInput("spans must be sorted, non-overlapping and within the token range");
    prev_end = s.end_token;
  }
  std::string out;
  size_t span_idx = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (!out.empty()) out += ' ';
    if (span_idx < spans.size() && spans[span_idx].start_token == i) {
      out += "[#";
      out += label_name(spans[span_idx].label);
      out += ']';
    }
    out += tokens[i];
    if (span_idx < spans.size() && spans[span_idx].end_token == i + 1) {
      out += "[/#";
      out += label_name(spans[span_idx].label);
      out += ']';
      ++span_idx;
    }
  }
  return out;
}

namespace xml {

struct Node {
  std::string name;
  std::string text;
  std::vector<Node> children;

  const Node* child(std::string_view n) const {
    for (const auto& c : children)
      if (c.name == n) return &c;
    return nullptr;
  }
};

namespace detail {

inline void skip_ws(std::string_view s, size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
}

inline std::string unescape(std::string_view s) {
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      if (s.substr(i, 5) == "&amp;") { out += '&'; i += 5; continue; }
      if (s.substr(i, 4) == "&lt;") { out += '<'; i += 4; continue; }
      if (s.substr(i, 4) == "&gt;") { out += '>'; i += 4; continue; }
      if (s.substr(i, 6) == "&quot;") { out += '"'; i += 6; continue; }
      if (s.substr(i, 6) == "&apos;") { out += '\''; i += 6; continue; }
      throw ParseError("unknown XML entity near: " + std::string(s.substr(i, 8)));
    }
    out += s[i++];
  }
  return out;
}

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string trim(std::string s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline Node parse_element(std::string_view s, size_t& i) {
  if (i >= s.size() || s[i] != '<') throw ParseError("expected element");
  ++i;
  Node node;
  while (i < s.size() && s[i] != '>' && s[i] != '/' && !std::isspace(static_cast<unsigned char>(s[i])))
    node.name += s[i++];
  if (node.name.empty()) throw ParseError("empty element name");
  // attributes are accepted and ignored
  while (i < s.size() && s[i] != '>' && s[i] != '/') ++i;
  if (i < s.size() && s[i] == '/') {  // self-closing
    ++i;
    if (i >= s.size() || s[i] != '>') throw ParseError("bad self-closing tag: " + node.name);
    ++i;
    return node;
  }
  if (i >= s.size()) throw ParseError("unterminated tag: " + node.name);
  ++i;  // '>'

  std::string text;
  while (true) {
    if (i >= s.size()) throw ParseError("unexpected end inside element: " + node.name);
    if (s[i] == '<') {
      if (s.substr(i, 4) == "<!--") {
        size_t close = s.find("-->", i);
        if (close == std::string_view::npos) throw ParseError("unterminated comment");
        i = close + 3;
        continue;
      }
      if (i + 1 < s.size() && s[i + 1] == '/') {
        i += 2;
        std::string name;
        while (i < s.size() && s[i] != '>') name += s[i++];
        if (i >= s.size()) throw ParseError("unterminated closing tag");
        ++i;
        if (trim(name) != node.name)
          throw ParseError("mismatched closing tag: " + name + " for " + node.name);
        break;
      }
      node.children.push_back(parse_element(s, i));
    } else {
      text += s[i++];
    }
  }
  node.text = unescape(trim(text));
  return node;
}

}  // namespace detail

/// Parses one document (declaration optional) and returns the root element.
inline Node parse_document(std::string_view s) {
  size_t i = 0;
  detail::skip_ws(s, i);
  if (s.substr(i, 5) == "<?xml") {
    size_t close = s.find("?>", i);
    if (close == std::string_view::npos) throw ParseError("unterminated XML declaration");
    i = close + 2;
    detail::skip_ws(s, i);
  }
  while (s.substr(i, 4) == "<!--") {
    size_t close = s.find("-->", i);
    if (close == std::string_view::npos) throw ParseError("unterminated comment");
    i = close + 3;
    detail::skip_ws(s, i);
  }
  Node root = detail::parse_element(s, i);
  detail::skip_ws(s, i);
  if (i != s.size()) throw ParseError("trailing content after root element");
  return root;
}

}  // namespace xml

namespace detail {

// Shortest decimal representation that parses back to the same double.
inline std::string format_seconds(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline int parse_flag(const xml::Node& tags, std::string_view name) {
  const xml::Node* n = tags.child(name);
  if (!n) return 0;
  return n->text == "1" ? 1 : 0;
}

}  // namespace detail

/// Parses the annotation XML schema (root `data`, one `segment` element per
/// sample). Inline entity markup is validated but preserved verbatim in the
/// segment text; use markup_to_spans to get token spans.
inline AnnotationDoc parse_annotation_xml(std::string_view document) {
  xml::Node root = xml::parse_document(document);
  if (root.name != "data") throw ParseError("root element must be <data>, got <" + root.name + ">");

  AnnotationDoc doc;
  long seg_index = 0;
  for (const auto& seg : root.children) {
    if (seg.name != "segment") continue;
    ++seg_index;
    AnnSegment s;
    const xml::Node* start = seg.child("start");
    const xml::Node* end = seg.child("end");
    const xml::Node* speaker = seg.child("speaker");
    const xml::Node* label = seg.child("speaker_label");
    const xml::Node* text = seg.child("text");
    const xml::Node* tags = seg.child("tags");
    if (!start || !end || !speaker || !label || !text || !tags)
      throw ParseError("segment missing required child element", seg_index);
    s.start_raw = start->text;
    s.end_raw = end->text;
    if (!detail::parse_double(start->text, s.start) || s.start < 0.0)
      throw ParseError("bad start time '" + start->text + "'", seg_index);
    if (!detail::parse_double(end->text, s.end) || !(s.start < s.end))
      throw ParseError("bad segment times '" + start->text + "','" + end->text + "'", seg_index);
    s.speaker = speaker->text.empty() ? "UNK" : speaker->text;
    s.speaker_label = label->text;
    s.text = text->text;
    try {
      (void)markup_to_spans(s.text);  // validates balance and the tag set
    } catch (const ParseError& e) {
      throw ParseError(std::string("segment text markup: ") + e.what(), seg_index);
    }
    s.correct = detail::parse_flag(*tags, "correct");
    s.correct_transcript = detail::parse_flag(*tags, "correct_transcript");
    s.correct_tagging = detail::parse_flag(*tags, "correct_tagging");
    s.non_english = detail::parse_flag(*tags, "non_english");
    doc.segments.push_back(std::move(s));
  }
  return doc;
}

/// Serializes the annotation document; element order is fixed as
/// start, end, speaker, speaker_label, text, tags.
inline std::string write_annotation_xml(const AnnotationDoc& doc) {
  std::string out = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<data>\n";
  for (const auto& s : doc.segments) {
    out += "\t<segment>\n";
    out += "\t\t<start>" +
           (s.start_raw.empty() ? detail::format_seconds(s.start) : s.start_raw) + "</start>\n";
    out += "\t\t<end>" + (s.end_raw.empty() ? detail::format_seconds(s.end) : s.end_raw) +
           "</end>\n";
    out += "\t\t<speaker>" + xml::detail::escape(s.speaker) + "</speaker>\n";
    out += "\t\t<speaker_label>" + xml::detail::escape(s.speaker_label) + "</speaker_label>\n";
    out += "\t\t<text>" + xml::detail::escape(s.text) + "</text>\n";
    out += "\t\t<tags>\n";
    out += "\t\t\t<correct>" + std::to_string(s.correct) + "</correct>\n";
    out += "\t\t\t<correct_transcript>" + std::to_string(s.correct_transcript) +
           "</correct_transcript>\n";
    out += "\t\t\t<correct_tagging>" + std::to_string(s.correct_tagging) + "</correct_tagging>\n";
    out += "\t\t\t<non_english>" + std::to_string(s.non_english) + "</non_english>\n";
    out += "\t\t</tags>\n";
    out += "\t</segment>\n";
  }
  out += "</data>\n";
  return out;
}

/// Structural equality for round-trip checks (raw strings ignored).
inline bool structurally_equal(const AnnotationDoc& a, const AnnotationDoc& b) {
  if (a.segments.size() != b.segments.size()) return false;
  for (size_t i = 0; i < a.segments.size(); ++i) {
    const AnnSegment& x = a.segments[i];
    const AnnSegment& y = b.segments[i];
    if (x.start != y.start || x.end != y.end) return false;
    if (x.speaker != y.speaker || x.speaker_label != y.speaker_label || x.text != y.text)
      return false;
    if (x.correct != y.correct || x.correct_transcript != y.correct_transcript ||
        x.correct_tagging != y.correct_tagging || x.non_english != y.non_english)
      return false;
  }
  return true;
}

}  // namespace atcdp::formats

#endif  // ATCDP_ANNOTATION_HPP
