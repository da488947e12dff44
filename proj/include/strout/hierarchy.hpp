#ifndef STROUT_HIERARCHY_HPP
#define STROUT_HIERARCHY_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "strout/errors.hpp"
#include "strout/utf8.hpp"

namespace strout {

using NodeId = std::uint32_t;

/// Declared form of a character class tree, before validation.
///
/// A node's class is `chars`, every code point in `ranges`, and the classes
/// of its children. A class declared through `ranges` is closed: a child
/// reaching outside it is a coverage error. Characters covered by a node but
/// by none of its children become synthesized singleton leaves.
struct ClassDecl {
    std::string label;
    std::u32string chars;
    std::vector<std::pair<char32_t, char32_t>> ranges;
    std::vector<ClassDecl> children;
};

struct HierarchyDecl {
    ClassDecl root;
    /// Label of the class that absorbs characters first seen in a dataset;
    /// empty means the root.
    std::string rest_anchor;
};

/// A validated hierarchical partition of an alphabet.
///
/// Nodes are stored in preorder with children sorted by their smallest code
/// point, so node ids are structural: two hierarchies built from equivalent
/// declarations assign the same ids. The object is immutable after
/// construction.
class Hierarchy {
public:
    struct Node {
        std::string label;
        std::vector<char32_t> charset;  // sorted
        std::optional<NodeId> parent;
        std::vector<NodeId> children;
        unsigned depth = 0;
        NodeId enter = 0;  // preorder interval, used for O(1) nesting tests
        NodeId leave = 0;
        bool is_leaf() const noexcept { return children.empty(); }
    };

    NodeId root() const noexcept { return 0; }
    NodeId rest_anchor() const noexcept { return rest_anchor_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    const std::string& label(NodeId id) const { return nodes_.at(id).label; }
    unsigned depth(NodeId id) const { return nodes_[id].depth; }

    /// Every character that has a singleton leaf.
    const std::vector<char32_t>& alphabet() const noexcept { return nodes_[0].charset; }

    bool knows(char32_t c) const { return find_leaf(c).has_value(); }

    std::optional<NodeId> find_leaf(char32_t c) const {
        if (c < ascii_leaf_.size()) {
            const NodeId id = ascii_leaf_[c];
            if (id == kNoNode) return std::nullopt;
            return id;
        }
        auto it = leaf_of_.find(c);
        if (it == leaf_of_.end()) return std::nullopt;
        return it->second;
    }

    NodeId leaf(char32_t c) const {
        if (auto id = find_leaf(c)) return *id;
        throw UnknownCharacter("character '" + utf8::encode(c) + "' (U+" + hex(c) +
                               ") has no leaf in the hierarchy");
    }

    /// True iff class `inner` is a subset of (or equal to) class `outer`.
    bool is_subset(NodeId inner, NodeId outer) const {
        // Preorder ids: a subtree is the id range [outer, leave(outer)].
        return outer <= inner && inner <= nodes_[outer].leave;
    }

    bool is_strict_subset(NodeId inner, NodeId outer) const {
        return inner != outer && is_subset(inner, outer);
    }

    /// Mutually non-nested; by the partition property this means disjoint.
    bool is_disjoint(NodeId a, NodeId b) const {
        return !is_subset(a, b) && !is_subset(b, a);
    }

    bool contains(NodeId cls, char32_t c) const {
        auto id = find_leaf(c);
        return id && is_subset(*id, cls);
    }

    NodeId lca(NodeId a, NodeId b) const {
        while (!is_subset(b, a)) a = *nodes_[a].parent;
        return a;
    }

    /// Number of edges on the tree path between the leaves of two characters.
    unsigned tree_distance(char32_t c1, char32_t c2) const {
        const NodeId a = leaf(c1);
        const NodeId b = leaf(c2);
        if (a == b) return 0;
        return depth(a) + depth(b) - 2 * depth(lca(a, b));
    }

    /// Node ids from `id` up to and including the root.
    std::vector<NodeId> ancestors(NodeId id) const {
        std::vector<NodeId> out;
        for (std::optional<NodeId> cur = id; cur; cur = nodes_.at(*cur).parent) {
            out.push_back(*cur);
        }
        return out;
    }

    std::optional<NodeId> find_label(std::string_view label) const {
        for (NodeId i = 0; i < nodes_.size(); ++i) {
            if (!nodes_[i].is_leaf() && nodes_[i].label == label) return i;
        }
        return std::nullopt;
    }

    /// Canonical text form; two hierarchies are equal iff these are equal.
    std::string canonical() const {
        std::string out;
        canonical_into(0, out);
        return out;
    }

    friend bool operator==(const Hierarchy& a, const Hierarchy& b) {
        return a.canonical() == b.canonical() && a.rest_anchor_ == b.rest_anchor_;
    }

    /// Declaration that reproduces this hierarchy (synthesized leaves omitted).
    HierarchyDecl to_decl() const {
        HierarchyDecl d;
        d.root = decl_of(0);
        if (rest_anchor_ != 0) d.rest_anchor = nodes_[rest_anchor_].label;
        return d;
    }

    friend Hierarchy validate_partition(const HierarchyDecl& decl);
    friend Hierarchy extend_alphabet(const Hierarchy& h, const std::vector<std::u32string>& data);

private:
    static constexpr NodeId kNoNode = 0xFFFFFFFFu;

    static std::string hex(char32_t c) {
        std::ostringstream os;
        os << std::uppercase << std::hex << static_cast<std::uint32_t>(c);
        std::string s = os.str();
        while (s.size() < 4) s.insert(s.begin(), '0');
        return s;
    }

    void canonical_into(NodeId id, std::string& out) const {
        const Node& n = nodes_[id];
        if (n.is_leaf()) {
            out += "'" + utf8::encode(n.charset.front()) + "'";
            return;
        }
        out += "(" + n.label + ":";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) out += ",";
            canonical_into(n.children[i], out);
        }
        out += ")";
    }

    ClassDecl decl_of(NodeId id) const {
        const Node& n = nodes_[id];
        ClassDecl d;
        d.label = n.label;
        if (n.is_leaf()) {
            d.chars.push_back(n.charset.front());
            return d;
        }
        for (NodeId c : n.children) {
            if (nodes_[c].is_leaf()) {
                d.chars.push_back(nodes_[c].charset.front());
            } else {
                d.children.push_back(decl_of(c));
            }
        }
        return d;
    }

    std::vector<Node> nodes_;
    std::unordered_map<char32_t, NodeId> leaf_of_;
    std::vector<NodeId> ascii_leaf_;
    NodeId rest_anchor_ = 0;
};

namespace detail {

// Intermediate tree used while validating and canonicalizing.
struct BuildNode {
    std::string label;
    std::set<char32_t> charset;
    std::vector<BuildNode> children;
    bool is_rest_anchor = false;
};

inline std::string describe_chars(const std::set<char32_t>& cs) {
    std::string out;
    std::size_t shown = 0;
    for (char32_t c : cs) {
        if (shown++ == 8) {
            out += "...";
            break;
        }
        out += utf8::encode(c);
    }
    return "{" + out + "}";
}

inline std::set<char32_t> own_chars(const ClassDecl& d) {
    std::set<char32_t> cs(d.chars.begin(), d.chars.end());
    for (auto [lo, hi] : d.ranges) {
        if (lo > hi) throw DeclarationError("range " + utf8::encode(lo) + "-" +
                                            utf8::encode(hi) + " is reversed");
        for (char32_t c = lo; c <= hi; ++c) cs.insert(c);
    }
    return cs;
}

inline BuildNode build(const ClassDecl& d, bool is_root, const std::string& anchor_label) {
    BuildNode n;
    n.label = d.label;
    const std::set<char32_t> own = own_chars(d);

    for (const ClassDecl& c : d.children) n.children.push_back(build(c, false, anchor_label));

    // Sibling classes must be disjoint.
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        for (std::size_t j = i + 1; j < n.children.size(); ++j) {
            for (char32_t c : n.children[i].charset) {
                if (n.children[j].charset.count(c)) {
                    throw OverlapError("classes '" + n.children[i].label + "' and '" +
                                       n.children[j].label + "' share character '" +
                                       utf8::encode(c) + "'");
                }
            }
        }
    }

    std::set<char32_t> from_children;
    for (const BuildNode& c : n.children) from_children.insert(c.charset.begin(), c.charset.end());

    // A class declared through ranges is closed: children may not add to it.
    if (!d.ranges.empty()) {
        for (char32_t c : from_children) {
            if (!own.count(c)) {
                throw CoverageError("class '" + d.label + "' does not cover character '" +
                                    utf8::encode(c) + "' of one of its children");
            }
        }
    }
    n.charset = own;
    n.charset.insert(from_children.begin(), from_children.end());
    if (n.charset.empty()) {
        throw EmptyClassError("class '" + d.label + "' has an empty character set");
    }
    for (const BuildNode& c : n.children) {
        if (c.charset == n.charset && c.charset.size() > 1) {
            throw CoverageError("class '" + c.label + "' duplicates its parent '" + d.label + "'");
        }
    }

    // Synthesize singleton leaves for covered characters no child claims.
    const bool is_declared_leaf = !is_root && n.children.empty() && n.charset.size() == 1;
    if (!is_declared_leaf) {
        for (char32_t c : n.charset) {
            if (!from_children.count(c)) {
                BuildNode leaf;
                leaf.label = utf8::encode(c);
                leaf.charset = {c};
                n.children.push_back(std::move(leaf));
            }
        }
    }
    if (n.label.empty()) {
        n.label = is_declared_leaf ? utf8::encode(*n.charset.begin()) : describe_chars(n.charset);
    }
    if (!anchor_label.empty() && n.label == anchor_label && !n.children.empty()) {
        n.is_rest_anchor = true;
    }
    std::sort(n.children.begin(), n.children.end(),
              [](const BuildNode& a, const BuildNode& b) {
                  return *a.charset.begin() < *b.charset.begin();
              });
    return n;
}

}  // namespace detail

/// Validates a declaration and builds the canonical hierarchy.
inline Hierarchy validate_partition(const HierarchyDecl& decl) {
    detail::BuildNode root = detail::build(decl.root, true, decl.rest_anchor);
    if (root.label.empty()) root.label = "Σ";

    Hierarchy h;
    NodeId anchor = 0;
    bool anchor_found = decl.rest_anchor.empty();

    // Preorder flattening.
    struct Frame {
        const detail::BuildNode* node;
        std::optional<NodeId> parent;
        unsigned depth;
    };
    std::vector<Frame> stack{{&root, std::nullopt, 0}};
    std::vector<std::pair<NodeId, const detail::BuildNode*>> order;
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        const auto id = static_cast<NodeId>(h.nodes_.size());
        Hierarchy::Node n;
        n.label = f.node->label;
        n.charset.assign(f.node->charset.begin(), f.node->charset.end());
        n.parent = f.parent;
        n.depth = f.depth;
        n.enter = id;
        h.nodes_.push_back(std::move(n));
        if (f.parent) h.nodes_[*f.parent].children.push_back(id);
        if (f.node->is_rest_anchor) {
            anchor = id;
            anchor_found = true;
        }
        for (auto it = f.node->children.rbegin(); it != f.node->children.rend(); ++it) {
            stack.push_back({&*it, id, f.depth + 1});
        }
    }
    if (!anchor_found) {
        throw DeclarationError("rest anchor '" + decl.rest_anchor + "' is not an internal class");
    }
    // Preorder intervals: a node's subtree is the contiguous id range [enter, leave].
    for (NodeId i = static_cast<NodeId>(h.nodes_.size()); i-- > 0;) {
        auto& n = h.nodes_[i];
        n.leave = n.children.empty() ? i : h.nodes_[n.children.back()].leave;
    }
    {
        std::set<std::string> labels;
        for (const auto& n : h.nodes_) {
            if (!n.is_leaf() && !labels.insert(n.label).second) {
                throw DeclarationError("class label '" + n.label + "' is used twice");
            }
        }
    }
    h.ascii_leaf_.assign(128, Hierarchy::kNoNode);
    for (NodeId i = 0; i < h.nodes_.size(); ++i) {
        const auto& n = h.nodes_[i];
        if (!n.is_leaf()) continue;
        const char32_t c = n.charset.front();
        if (h.leaf_of_.count(c)) {
            throw OverlapError("character '" + utf8::encode(c) + "' has two leaves");
        }
        h.leaf_of_[c] = i;
        if (c < 128) h.ascii_leaf_[c] = i;
    }
    h.rest_anchor_ = anchor;
    return h;
}

/// Adds a singleton leaf under the rest anchor for every dataset character
/// the hierarchy does not know yet. Node ids may change; expressions learned
/// over the old hierarchy must be re-learned (or re-parsed by label).
inline Hierarchy extend_alphabet(const Hierarchy& h, const std::vector<std::u32string>& data) {
    std::set<char32_t> unseen;
    for (const auto& s : data) {
        for (char32_t c : s) {
            if (!h.knows(c)) unseen.insert(c);
        }
    }
    if (unseen.empty()) return h;

    HierarchyDecl decl = h.to_decl();
    const std::string anchor_label = h.label(h.rest_anchor());
    // Walk the declaration to the anchor class.
    std::vector<ClassDecl*> stack{&decl.root};
    ClassDecl* target = nullptr;
    if (h.rest_anchor() == h.root()) {
        target = &decl.root;
    } else {
        while (!stack.empty() && !target) {
            ClassDecl* d = stack.back();
            stack.pop_back();
            if (d->label == anchor_label && (!d->children.empty() || d->chars.size() > 1)) {
                target = d;
                break;
            }
            for (auto& c : d->children) stack.push_back(&c);
        }
    }
    if (!target) throw DeclarationError("rest anchor '" + anchor_label + "' vanished");
    for (char32_t c : unseen) target->chars.push_back(c);
    return validate_partition(decl);
}

// ---------------------------------------------------------------------------
// JSON declaration format
//
//   { "label": "a-z", "ranges": [["a", "z"]], "chars": "xyz", "children": [...] }
//
// optionally wrapped as { "root": {...}, "rest_anchor": "<label>" }.

namespace detail {

inline char32_t single_char(const nlohmann::json& j) {
    const std::u32string s = utf8::decode(j.get<std::string>());
    if (s.size() != 1) throw DeclarationError("range bound must be one character: " + j.dump());
    return s[0];
}

inline ClassDecl class_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DeclarationError("class declaration must be an object");
    ClassDecl d;
    d.label = j.value("label", std::string{});
    if (j.contains("chars")) d.chars = utf8::decode(j.at("chars").get<std::string>());
    if (j.contains("ranges")) {
        for (const auto& r : j.at("ranges")) {
            if (!r.is_array() || r.size() != 2) {
                throw DeclarationError("range must be a two-element array: " + r.dump());
            }
            d.ranges.emplace_back(single_char(r[0]), single_char(r[1]));
        }
    }
    if (j.contains("children")) {
        for (const auto& c : j.at("children")) d.children.push_back(class_from_json(c));
    }
    return d;
}

inline nlohmann::json class_to_json(const ClassDecl& d) {
    nlohmann::json j;
    j["label"] = d.label;
    if (!d.chars.empty()) j["chars"] = utf8::encode(d.chars);
    if (!d.ranges.empty()) {
        auto arr = nlohmann::json::array();
        for (auto [lo, hi] : d.ranges) arr.push_back({utf8::encode(lo), utf8::encode(hi)});
        j["ranges"] = arr;
    }
    if (!d.children.empty()) {
        auto arr = nlohmann::json::array();
        for (const auto& c : d.children) arr.push_back(class_to_json(c));
        j["children"] = arr;
    }
    return j;
}

}  // namespace detail

inline HierarchyDecl hierarchy_decl_from_json(const nlohmann::json& j) {
    HierarchyDecl decl;
    if (j.contains("root")) {
        decl.root = detail::class_from_json(j.at("root"));
        decl.rest_anchor = j.value("rest_anchor", std::string{});
    } else {
        decl.root = detail::class_from_json(j);
    }
    return decl;
}

inline nlohmann::json hierarchy_decl_to_json(const HierarchyDecl& decl) {
    nlohmann::json j;
    j["root"] = detail::class_to_json(decl.root);
    if (!decl.rest_anchor.empty()) j["rest_anchor"] = decl.rest_anchor;
    return j;
}

/// Declaration of the hierarchy tailored to date strings: letters and digits
/// nested into alphanumerics, date punctuation next to them, everything else
/// hanging directly off the root.
inline HierarchyDecl date_default_decl() {
    ClassDecl lower{"a-z", U"", {{U'a', U'z'}}, {}};
    ClassDecl upper{"A-Z", U"", {{U'A', U'Z'}}, {}};
    ClassDecl digits{"0-9", U"", {{U'0', U'9'}}, {}};
    ClassDecl alpha{"a-zA-Z", U"", {}, {lower, upper}};
    ClassDecl alnum{"a-zA-Z0-9", U"", {}, {alpha, digits}};
    ClassDecl punct{" .,-", U" .,-", {}, {}};
    ClassDecl top{"a-zA-Z0-9 .,-", U"", {}, {alnum, punct}};
    ClassDecl root{"Σ", U"@+\"", {}, {top}};
    return {root, ""};
}

inline const Hierarchy& date_default() {
    static const Hierarchy h = validate_partition(date_default_decl());
    return h;
}

/// Resolves `date-default` or loads a JSON declaration file.
inline Hierarchy load_hierarchy(const std::string& name_or_path) {
    if (name_or_path.empty() || name_or_path == "date-default") return date_default();
    std::ifstream in(name_or_path);
    if (!in) throw ConfigError("cannot open hierarchy file '" + name_or_path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("hierarchy file '" + name_or_path + "': " + e.what());
    }
    return validate_partition(hierarchy_decl_from_json(j));
}

}  // namespace strout

#endif  // STROUT_HIERARCHY_HPP
