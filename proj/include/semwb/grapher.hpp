#pragma once

// Structure grapher: description strings, layout, SVG and ASCII output.
//
//   element := '{' tag item* '}'
//   item    := element | "quoted string"      (\" and \\ escape)
//
// Built-in tags:
//   {plain-text "s"}        one line of text
//   {tree M D1 ... Dn}      mother M centred over daughters
//   {drs U C1 ... Cn}       universe row, rule, stacked conditions, in a box
//   {avm "f" V ...}         feature/value rows in a bracketed box
//   {hbox A ...} {vbox A ...}   abutted with a gap, centred across
//   {frame A}               box drawn around A
//   {active "action" A}     A's boxes carry the action id
// More tags can be registered through TagRegistry.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "term_io.hpp"

namespace semwb {

struct DescNode {
  struct Item;
  std::string tag;
  std::vector<Item> args;

  static DescNode text(std::string s);
  static DescNode make(std::string tag, std::vector<DescNode> kids);
  static DescNode active(std::string action, DescNode child);

  std::vector<const DescNode*> elements() const;
  /// String argument i ("" if missing or not a string).
  std::string str_arg(size_t i) const;

  friend bool operator==(const DescNode& a, const DescNode& b);
};

struct DescNode::Item : std::variant<DescNode, std::string> {
  using variant::variant;
  bool is_string() const { return std::holds_alternative<std::string>(*this); }
  const DescNode& node() const { return std::get<DescNode>(*this); }
  const std::string& string() const { return std::get<std::string>(*this); }
};

inline DescNode DescNode::text(std::string s) { return DescNode{"plain-text", {Item{std::move(s)}}}; }
inline DescNode DescNode::make(std::string tag, std::vector<DescNode> kids) {
  DescNode d{std::move(tag), {}};
  for (auto& k : kids) d.args.emplace_back(std::move(k));
  return d;
}
inline DescNode DescNode::active(std::string action, DescNode child) {
  return DescNode{"active", {Item{std::move(action)}, Item{std::move(child)}}};
}
inline std::vector<const DescNode*> DescNode::elements() const {
  std::vector<const DescNode*> out;
  for (const auto& a : args)
    if (!a.is_string()) out.push_back(&a.node());
  return out;
}
inline std::string DescNode::str_arg(size_t i) const {
  return i < args.size() && args[i].is_string() ? args[i].string() : std::string();
}
inline bool operator==(const DescNode& a, const DescNode& b) {
  if (a.tag != b.tag || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (a.args[i].is_string() != b.args[i].is_string()) return false;
    if (a.args[i].is_string() ? a.args[i].string() != b.args[i].string() : !(a.args[i].node() == b.args[i].node()))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Layout primitives

struct Style {
  double char_width = 8;
  double line_height = 16;
  double hgap = 16;   // between tree daughters and hbox children
  double vgap = 8;    // between vbox children
  double level_gap = 24;
  double pad = 4;     // inside rects
  double font_size = 13;
};

struct LayoutBox {
  enum class Kind { Text, Line, Rect };
  Kind kind;
  double x = 0, y = 0, width = 0, height = 0;  // lines: (x,y) -> (x+width, y+height)
  std::string text;
  std::vector<int> source;  // argument indices from the root DescNode
  std::string action;

  double x2() const { return x + width; }
  double y2() const { return y + height; }
};

/// A laid-out element in local coordinates, with its top anchor (where a
/// tree line attaches).
struct Laid {
  double width = 0, height = 0;
  double anchor = 0;
  std::vector<LayoutBox> boxes;

  void shift(double dx, double dy) {
    for (auto& b : boxes) {
      b.x += dx;
      b.y += dy;
    }
  }
  void absorb(Laid other, double dx, double dy) {
    other.shift(dx, dy);
    boxes.insert(boxes.end(), other.boxes.begin(), other.boxes.end());
  }
};

class TagRegistry;

struct LayoutContext {
  const Style& style;
  const TagRegistry& tags;
  std::vector<int> path;

  Laid layout(const DescNode& d, int arg_index) const;
  Laid layout_self(const DescNode& d) const;
};

struct TagSpec {
  /// Describes what is wrong with the arguments, or nullopt.
  std::function<std::optional<std::string>(const DescNode&)> check;
  std::function<Laid(const DescNode&, const LayoutContext&)> layout;
};

class TagRegistry {
 public:
  void add(const std::string& tag, TagSpec spec) { specs_[tag] = std::move(spec); }
  const TagSpec* find(const std::string& tag) const {
    auto it = specs_.find(tag);
    return it == specs_.end() ? nullptr : &it->second;
  }
  std::vector<std::string> tags() const {
    std::vector<std::string> out;
    for (const auto& [t, _] : specs_) out.push_back(t);
    return out;
  }

  static const TagRegistry& builtin();

 private:
  std::map<std::string, TagSpec> specs_;
};

inline Laid LayoutContext::layout(const DescNode& d, int arg_index) const {
  LayoutContext sub{style, tags, path};
  sub.path.push_back(arg_index);
  return sub.layout_self(d);
}

inline Laid LayoutContext::layout_self(const DescNode& d) const {
  const TagSpec* spec = tags.find(d.tag);
  if (!spec) throw Error(ErrorCode::SyntaxError, "unknown tag '" + d.tag + "'");
  return spec->layout(d, *this);
}

namespace grapher_detail {

/// Display width in characters: UTF-8 continuation bytes do not count.
inline size_t text_columns(const std::string& s) {
  size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

/// Splits UTF-8 text into one string per character.
inline std::vector<std::string> glyphs(const std::string& s) {
  std::vector<std::string> out;
  for (unsigned char c : s) {
    if ((c & 0xC0) == 0x80 && !out.empty()) out.back().push_back(static_cast<char>(c));
    else out.emplace_back(1, static_cast<char>(c));
  }
  return out;
}

inline LayoutBox box(LayoutBox::Kind k, double x, double y, double w, double h, const std::vector<int>& src,
                     std::string text = "") {
  LayoutBox b{k, x, y, w, h, std::move(text), src, ""};
  return b;
}

/// Element arguments with their positions in the argument list.
inline std::vector<std::pair<int, const DescNode*>> element_args(const DescNode& d, size_t from = 0) {
  std::vector<std::pair<int, const DescNode*>> out;
  for (size_t i = from; i < d.args.size(); ++i)
    if (!d.args[i].is_string()) out.emplace_back(static_cast<int>(i), &d.args[i].node());
  return out;
}

inline std::optional<std::string> only_elements(const DescNode& d, size_t min, size_t max = SIZE_MAX) {
  for (const auto& a : d.args)
    if (a.is_string()) return d.tag + " takes elements only";
  if (d.args.size() < min) return d.tag + " needs at least " + std::to_string(min) + " element(s)";
  if (d.args.size() > max) return d.tag + " takes at most " + std::to_string(max) + " element(s)";
  return std::nullopt;
}

inline Laid stack(const DescNode& d, const LayoutContext& ctx, bool horizontal) {
  Laid out;
  double pos = 0;
  auto kids = element_args(d);
  std::vector<Laid> parts;
  for (const auto& [i, k] : kids) parts.push_back(ctx.layout(*k, i));
  double cross = 0;
  for (const auto& p : parts) cross = std::max(cross, horizontal ? p.height : p.width);
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) pos += horizontal ? ctx.style.hgap : ctx.style.vgap;
    if (horizontal) {
      double dy = (cross - parts[i].height) / 2;
      double w = parts[i].width;
      out.absorb(std::move(parts[i]), pos, dy);
      pos += w;
    } else {
      double h = parts[i].height;
      double dx = (cross - parts[i].width) / 2;
      out.absorb(std::move(parts[i]), dx, pos);
      pos += h;
    }
  }
  out.width = horizontal ? pos : cross;
  out.height = horizontal ? cross : pos;
  out.anchor = out.width / 2;
  return out;
}

inline Laid frame_around(Laid inner, const LayoutContext& ctx) {
  double p = ctx.style.pad;
  Laid out;
  out.width = inner.width + 2 * p;
  out.height = inner.height + 2 * p;
  out.anchor = inner.anchor + p;
  out.boxes.push_back(box(LayoutBox::Kind::Rect, 0, 0, out.width, out.height, ctx.path));
  out.absorb(std::move(inner), p, p);
  return out;
}

inline TagRegistry make_builtin() {
  using K = LayoutBox::Kind;
  TagRegistry r;

  r.add("plain-text", {[](const DescNode& d) -> std::optional<std::string> {
                         if (d.args.size() != 1 || !d.args[0].is_string()) return "plain-text takes one string";
                         return std::nullopt;
                       },
                       [](const DescNode& d, const LayoutContext& ctx) {
                         Laid out;
                         std::string s = d.str_arg(0);
                         out.width = static_cast<double>(text_columns(s)) * ctx.style.char_width;
                         out.height = ctx.style.line_height;
                         out.anchor = out.width / 2;
                         out.boxes.push_back(box(K::Text, 0, 0, out.width, out.height, ctx.path, s));
                         return out;
                       }});

  r.add("tree", {[](const DescNode& d) { return only_elements(d, 1); },
                 [](const DescNode& d, const LayoutContext& ctx) {
                   auto kids = element_args(d);
                   Laid mother = ctx.layout(*kids[0].second, kids[0].first);
                   if (kids.size() == 1) return mother;
                   std::vector<Laid> ds;
                   double joint = 0;
                   for (size_t i = 1; i < kids.size(); ++i) {
                     ds.push_back(ctx.layout(*kids[i].second, kids[i].first));
                     joint += ds.back().width + (i > 1 ? ctx.style.hgap : 0);
                   }
                   Laid out;
                   out.width = std::max(mother.width, joint);
                   double dx0 = (out.width - joint) / 2;  // daughters block
                   double center = dx0 + joint / 2;
                   double mx = center - mother.width / 2;
                   double top = mother.height + ctx.style.level_gap;
                   double m_anchor = mx + mother.anchor;
                   double m_bottom = mother.height;
                   out.anchor = m_anchor;
                   out.absorb(std::move(mother), mx, 0);
                   double x = dx0, bottom = top;
                   for (auto& dl : ds) {
                     double w = dl.width, a = dl.anchor, h = dl.height;
                     out.boxes.push_back(box(K::Line, m_anchor, m_bottom, x + a - m_anchor, top - m_bottom, ctx.path));
                     out.absorb(std::move(dl), x, top);
                     bottom = std::max(bottom, top + h);
                     x += w + ctx.style.hgap;
                   }
                   out.height = bottom;
                   return out;
                 }});

  r.add("drs", {[](const DescNode& d) { return only_elements(d, 1); },
                [](const DescNode& d, const LayoutContext& ctx) {
                  auto kids = element_args(d);
                  double p = ctx.style.pad;
                  Laid universe = ctx.layout(*kids[0].second, kids[0].first);
                  std::vector<Laid> conds;
                  double inner = universe.width;
                  for (size_t i = 1; i < kids.size(); ++i) {
                    conds.push_back(ctx.layout(*kids[i].second, kids[i].first));
                    inner = std::max(inner, conds.back().width);
                  }
                  Laid out;
                  out.width = inner + 2 * p;
                  double rule_y = p + universe.height + p;
                  double y = rule_y + p;
                  std::vector<std::pair<Laid, double>> placed;
                  for (auto& c : conds) {
                    double h = c.height;
                    placed.emplace_back(std::move(c), y);
                    y += h + ctx.style.vgap;
                  }
                  if (!placed.empty()) y -= ctx.style.vgap;
                  out.height = y + p;
                  out.anchor = out.width / 2;
                  out.boxes.push_back(box(K::Rect, 0, 0, out.width, out.height, ctx.path));
                  out.boxes.push_back(box(K::Line, 0, rule_y, out.width, 0, ctx.path));
                  out.absorb(std::move(universe), p, p);
                  for (auto& [c, cy] : placed) out.absorb(std::move(c), p, cy);
                  return out;
                }});

  r.add("avm", {[](const DescNode& d) -> std::optional<std::string> {
                  if (d.args.size() % 2) return "avm takes feature/value pairs";
                  for (size_t i = 0; i < d.args.size(); i += 2)
                    if (!d.args[i].is_string() || d.args[i + 1].is_string()) return "avm takes \"feature\" {value} pairs";
                  return std::nullopt;
                },
                [](const DescNode& d, const LayoutContext& ctx) {
                  Laid rows;
                  double y = 0, width = 0;
                  size_t label_chars = 0;
                  for (size_t i = 0; i < d.args.size(); i += 2) label_chars = std::max(label_chars, text_columns(d.args[i].string()) + 1);
                  double label_w = static_cast<double>(label_chars) * ctx.style.char_width;
                  for (size_t i = 0; i < d.args.size(); i += 2) {
                    Laid value = ctx.layout(d.args[i + 1].node(), static_cast<int>(i + 1));
                    std::vector<int> src = ctx.path;
                    src.push_back(static_cast<int>(i));
                    std::string label = d.args[i].string() + ":";
                    double row_h = std::max(ctx.style.line_height, value.height);
                    rows.boxes.push_back(box(K::Text, 0, y, static_cast<double>(text_columns(label)) * ctx.style.char_width,
                                             ctx.style.line_height, src, label));
                    width = std::max(width, label_w + ctx.style.char_width + value.width);
                    rows.absorb(std::move(value), label_w + ctx.style.char_width, y);
                    y += row_h + (i + 2 < d.args.size() ? ctx.style.vgap : 0);
                  }
                  rows.width = width;
                  rows.height = d.args.empty() ? ctx.style.line_height : y;
                  rows.anchor = width / 2;
                  return frame_around(std::move(rows), ctx);
                }});

  r.add("hbox", {[](const DescNode& d) { return only_elements(d, 1); },
                 [](const DescNode& d, const LayoutContext& ctx) { return stack(d, ctx, true); }});
  r.add("vbox", {[](const DescNode& d) { return only_elements(d, 1); },
                 [](const DescNode& d, const LayoutContext& ctx) { return stack(d, ctx, false); }});
  r.add("frame", {[](const DescNode& d) { return only_elements(d, 1, 1); },
                  [](const DescNode& d, const LayoutContext& ctx) {
                    return frame_around(ctx.layout(d.args[0].node(), 0), ctx);
                  }});
  r.add("active", {[](const DescNode& d) -> std::optional<std::string> {
                     if (d.args.size() != 2 || !d.args[0].is_string() || d.args[1].is_string())
                       return "active takes an action string and one element";
                     return std::nullopt;
                   },
                   [](const DescNode& d, const LayoutContext& ctx) {
                     Laid inner = ctx.layout(d.args[1].node(), 1);
                     for (auto& b : inner.boxes)
                       if (b.action.empty()) b.action = d.args[0].string();
                     return inner;
                   }});
  return r;
}

}  // namespace grapher_detail

inline const TagRegistry& TagRegistry::builtin() {
  static const TagRegistry r = grapher_detail::make_builtin();
  return r;
}

// ---------------------------------------------------------------------------
// Parsing and printing

namespace grapher_detail {

inline bool tag_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; }

inline std::string quoted(io::Cursor& cur) {
  cur.expect('"');
  std::string out;
  std::string_view text = cur.text();
  size_t p = cur.pos();
  while (true) {
    if (p >= text.size()) {
      cur.seek(p);
      cur.fail("closing '\"'");
    }
    char c = text[p++];
    if (c == '"') break;
    if (c == '\\') {
      if (p >= text.size() || (text[p] != '"' && text[p] != '\\')) {
        cur.seek(p);
        cur.fail("'\\\"' or '\\\\' after a backslash");
      }
      c = text[p++];
    }
    out.push_back(c);
  }
  cur.seek(p);
  return out;
}

inline DescNode element(io::Cursor& cur, const TagRegistry& tags) {
  cur.expect('{');
  cur.skip_ws();
  std::string_view text = cur.text();
  size_t start = cur.pos(), p = start;
  while (p < text.size() && tag_char(text[p])) ++p;
  if (p == start) cur.fail("a tag");
  DescNode d{std::string(text.substr(start, p - start)), {}};
  if (!tags.find(d.tag)) cur.fail("a known tag");
  cur.seek(p);
  while (true) {
    char c = cur.peek();
    if (c == '}') break;
    if (c == '{') d.args.emplace_back(element(cur, tags));
    else if (c == '"') d.args.emplace_back(quoted(cur));
    else cur.fail("'{', '\"' or '}'");
  }
  if (auto problem = tags.find(d.tag)->check(d)) cur.fail("arguments valid for " + d.tag + " (" + *problem + ")");
  cur.expect('}');
  return d;
}

inline void print(const DescNode& d, std::ostream& os, int indent, bool pretty) {
  os << "{" << d.tag;
  for (const auto& a : d.args) {
    if (a.is_string()) {
      os << " \"";
      for (char c : a.string()) {
        if (c == '"' || c == '\\') os << '\\';
        os << c;
      }
      os << "\"";
    } else {
      if (pretty) {
        os << "\n" << std::string(static_cast<size_t>(indent + 2), ' ');
      } else {
        os << " ";
      }
      print(a.node(), os, indent + 2, pretty);
    }
  }
  os << "}";
}

}  // namespace grapher_detail

inline DescNode parse_desc(std::string_view text, const TagRegistry& tags = TagRegistry::builtin()) {
  io::Cursor cur(text);
  DescNode d = grapher_detail::element(cur, tags);
  if (!cur.at_end()) cur.fail("end of input");
  return d;
}

/// Single-line form; `pretty` puts element arguments on indented lines.
inline std::string print_desc(const DescNode& d, bool pretty = false) {
  std::ostringstream os;
  grapher_detail::print(d, os, 0, pretty);
  return os.str();
}

inline std::vector<LayoutBox> layout(const DescNode& d, const Style& style = {},
                                     const TagRegistry& tags = TagRegistry::builtin()) {
  LayoutContext ctx{style, tags, {}};
  return ctx.layout_self(d).boxes;
}

// ---------------------------------------------------------------------------
// Output

namespace grapher_detail {

inline std::string num(double v) {
  double r = std::round(v * 100) / 100;
  if (r == 0) r = 0;  // no "-0"
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << r;
  std::string s = os.str();
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Bounds {
  double w = 0, h = 0;
};

inline Bounds bounds(const std::vector<LayoutBox>& boxes) {
  Bounds b;
  for (const auto& x : boxes) {
    b.w = std::max({b.w, x.x, x.x2()});
    b.h = std::max({b.h, x.y, x.y2()});
  }
  return b;
}

}  // namespace grapher_detail

inline std::string render_svg(const std::vector<LayoutBox>& boxes, const Style& style = {}) {
  using grapher_detail::num;
  using grapher_detail::xml_escape;
  const double margin = 2;
  auto b = grapher_detail::bounds(boxes);
  double w = boxes.empty() ? 0 : b.w + 2 * margin;
  double h = boxes.empty() ? 0 : b.h + 2 * margin;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n";
  if (!boxes.empty()) os << "<g transform=\"translate(" << num(margin) << "," << num(margin) << ")\">\n";
  for (const auto& x : boxes) {
    std::string act = x.action.empty() ? "" : " data-action=\"" + xml_escape(x.action) + "\"";
    switch (x.kind) {
      case LayoutBox::Kind::Text:
        os << "<text x=\"" << num(x.x) << "\" y=\"" << num(x.y + style.line_height * 0.75)
           << "\" font-family=\"monospace\" font-size=\"" << num(style.font_size) << "\"" << act << ">"
           << xml_escape(x.text) << "</text>\n";
        break;
      case LayoutBox::Kind::Line:
        os << "<line x1=\"" << num(x.x) << "\" y1=\"" << num(x.y) << "\" x2=\"" << num(x.x2()) << "\" y2=\""
           << num(x.y2()) << "\" stroke=\"black\"" << act << "/>\n";
        break;
      case LayoutBox::Kind::Rect:
        os << "<rect x=\"" << num(x.x) << "\" y=\"" << num(x.y) << "\" width=\"" << num(x.width) << "\" height=\""
           << num(x.height) << "\" fill=\"none\" stroke=\"black\"" << act << "/>\n";
        break;
    }
  }
  if (!boxes.empty()) os << "</g>\n";
  os << "</svg>\n";
  return os.str();
}

/// Character-grid approximation: one column per char width, one row per
/// half line height.
inline std::string render_ascii(const std::vector<LayoutBox>& boxes, const Style& style = {}) {
  auto b = grapher_detail::bounds(boxes);
  double rh = style.line_height / 2;
  auto col = [&](double x) { return static_cast<int>(std::lround(x / style.char_width)); };
  auto row = [&](double y) { return static_cast<int>(std::lround(y / rh)); };
  int cols = col(b.w) + 2, rows = row(b.h) + 2;
  std::vector<std::vector<std::string>> grid(static_cast<size_t>(rows),
                                             std::vector<std::string>(static_cast<size_t>(cols), " "));
  auto put = [&](int r, int c, const std::string& ch) {
    if (r >= 0 && r < rows && c >= 0 && c < cols) grid[static_cast<size_t>(r)][static_cast<size_t>(c)] = ch;
  };
  for (const auto& x : boxes) {
    if (x.kind == LayoutBox::Kind::Rect) {
      int c0 = col(x.x), c1 = col(x.x2()), r0 = row(x.y), r1 = row(x.y2());
      for (int c = c0; c <= c1; ++c) put(r0, c, "-"), put(r1, c, "-");
      for (int r = r0; r <= r1; ++r) put(r, c0, "|"), put(r, c1, "|");
      put(r0, c0, "+"), put(r0, c1, "+"), put(r1, c0, "+"), put(r1, c1, "+");
    } else if (x.kind == LayoutBox::Kind::Line) {
      int c0 = col(x.x), c1 = col(x.x2()), r0 = row(x.y), r1 = row(x.y2());
      if (r0 == r1) {
        for (int c = std::min(c0, c1); c <= std::max(c0, c1); ++c) put(r0, c, "-");
        continue;
      }
      std::string ch = c1 == c0 ? "|" : (c1 > c0) == (r1 > r0) ? "\\" : "/";
      int steps = std::max(std::abs(r1 - r0), 1);
      for (int i = 1; i < steps; ++i) put(r0 + (r1 - r0) * i / steps, c0 + (c1 - c0) * i / steps, ch);
    }
  }
  for (const auto& x : boxes) {
    if (x.kind != LayoutBox::Kind::Text) continue;
    int r = row(x.y + style.line_height / 2) - 1, c = col(x.x);
    auto gs = grapher_detail::glyphs(x.text);
    for (size_t i = 0; i < gs.size(); ++i) put(r < 0 ? 0 : r, c + static_cast<int>(i), gs[i]);
  }
  std::string out;
  for (const auto& cells : grid) {
    std::string line;
    for (const auto& cell : cells) line += cell;
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  while (out.size() > 1 && out[out.size() - 1] == '\n' && out[out.size() - 2] == '\n') out.pop_back();
  return out;
}

}  // namespace semwb
