#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "strout/hierarchy.hpp"

using namespace strout;

namespace {

bool charset_within(const Hierarchy& h, NodeId a, NodeId b) {
    const auto& x = h.node(a).charset;
    const auto& y = h.node(b).charset;
    return std::includes(y.begin(), y.end(), x.begin(), x.end());
}

}  // namespace

TEST(Hierarchy, DateDefaultShape) {
    const Hierarchy& h = date_default();
    EXPECT_EQ(h.label(h.root()), "Σ");
    // 26 + 26 + 10 letters/digits, 4 punctuation, 3 root-level characters.
    EXPECT_EQ(h.alphabet().size(), 69u);
    ASSERT_TRUE(h.find_label("a-z"));
    ASSERT_TRUE(h.find_label("0-9"));
    EXPECT_TRUE(h.is_subset(*h.find_label("a-z"), *h.find_label("a-zA-Z0-9")));
    EXPECT_TRUE(h.is_disjoint(*h.find_label("0-9"), *h.find_label(" .,-")));
    EXPECT_FALSE(h.find_label("a"));  // leaves are looked up by character
}

TEST(Hierarchy, TreeDistances) {
    const Hierarchy& h = date_default();
    EXPECT_EQ(h.tree_distance(U'1', U'2'), 2u);
    EXPECT_EQ(h.tree_distance(U'0', U't'), 5u);
    EXPECT_EQ(h.tree_distance(U'-', U'h'), 6u);
    EXPECT_EQ(h.tree_distance(U'-', U' '), 2u);
    EXPECT_EQ(h.tree_distance(U'x', U'x'), 0u);
    EXPECT_EQ(h.tree_distance(U'@', U'a'), 6u);
}

// Preorder ids make nesting an interval test; it must agree with set
// inclusion of the character sets, and lca must be the smallest common class.
TEST(Hierarchy, PreorderAgreesWithCharsets) {
    for (const Hierarchy& h : {date_default(), oracle::abc()}) {
        for (NodeId a = 0; a < h.size(); ++a) {
            for (NodeId b = 0; b < h.size(); ++b) {
                ASSERT_EQ(h.is_subset(a, b), charset_within(h, a, b)) << a << " " << b;
                const NodeId l = h.lca(a, b);
                EXPECT_TRUE(charset_within(h, a, l) && charset_within(h, b, l));
                for (NodeId c = 0; c < h.size(); ++c) {
                    if (charset_within(h, a, c) && charset_within(h, b, c)) {
                        EXPECT_TRUE(charset_within(h, l, c));
                    }
                }
            }
        }
    }
}

TEST(Hierarchy, AncestorsEndAtRoot) {
    const Hierarchy& h = date_default();
    const auto up = h.ancestors(h.leaf(U'q'));
    ASSERT_EQ(up.size(), 6u);
    EXPECT_EQ(up.back(), h.root());
    for (std::size_t i = 1; i < up.size(); ++i) EXPECT_EQ(h.depth(up[i]) + 1, h.depth(up[i - 1]));
}

TEST(Hierarchy, UnknownCharacter) {
    EXPECT_THROW(date_default().leaf(U'ü'), UnknownCharacter);
    EXPECT_FALSE(date_default().knows(U'#'));
}

TEST(Hierarchy, ExtendAlphabetAddsLeavesUnderRoot) {
    const Hierarchy h = extend_alphabet(date_default(), {U"naïve/#", U"abc"});
    for (char32_t c : std::u32string(U"ï/#")) {
        ASSERT_TRUE(h.knows(c));
        EXPECT_EQ(h.node(h.leaf(c)).parent, h.root());
    }
    EXPECT_EQ(h.alphabet().size(), date_default().alphabet().size() + 3);
    EXPECT_EQ(extend_alphabet(date_default(), {U"2020-01-01"}), date_default());
}

TEST(Hierarchy, ExtendAlphabetHonoursRestAnchor) {
    HierarchyDecl d = date_default_decl();
    d.rest_anchor = " .,-";
    const Hierarchy h = extend_alphabet(validate_partition(d), {U"1/2"});
    EXPECT_EQ(h.node(h.leaf(U'/')).parent, h.find_label(" .,-"));
}

TEST(Hierarchy, JsonRoundTrip) {
    const HierarchyDecl d = date_default_decl();
    const auto j = hierarchy_decl_to_json(d);
    const Hierarchy back = validate_partition(hierarchy_decl_from_json(nlohmann::json::parse(j.dump())));
    EXPECT_EQ(back, date_default());
    EXPECT_EQ(back.canonical(), date_default().canonical());
}

TEST(Hierarchy, DeclarationOrderDoesNotMatter) {
    HierarchyDecl a;
    a.root = {"S", U"xyz", {}, {{"pq", U"pq", {}, {}}, {"0-9", U"", {{U'0', U'9'}}, {}}}};
    HierarchyDecl b;
    b.root = {"S", U"zyx", {}, {{"0-9", U"", {{U'0', U'9'}}, {}}, {"pq", U"qp", {}, {}}}};
    EXPECT_EQ(validate_partition(a).canonical(), validate_partition(b).canonical());
}

TEST(Hierarchy, RejectsOverlap) {
    HierarchyDecl d;
    d.root = {"S", U"", {}, {{"ab", U"ab", {}, {}}, {"bc", U"bc", {}, {}}}};
    EXPECT_THROW(validate_partition(d), OverlapError);
}

TEST(Hierarchy, RejectsChildOutsideClosedRange) {
    HierarchyDecl d;
    d.root = {"S", U"", {}, {{"0-4", U"", {{U'0', U'4'}}, {{"x", U"7", {}, {}}}}}};
    EXPECT_THROW(validate_partition(d), CoverageError);
}

TEST(Hierarchy, RejectsEmptyClass) {
    HierarchyDecl d;
    d.root = {"S", U"ab", {}, {{"none", U"", {}, {}}}};
    EXPECT_THROW(validate_partition(d), EmptyClassError);
}

TEST(Hierarchy, RejectsDuplicateLabels) {
    HierarchyDecl d;
    d.root = {"S", U"", {}, {{"X", U"ab", {}, {}}, {"X", U"cd", {}, {}}}};
    EXPECT_THROW(validate_partition(d), DeclarationError);
}

TEST(Hierarchy, RejectsBadRestAnchor) {
    HierarchyDecl d = date_default_decl();
    d.rest_anchor = "no-such-class";
    EXPECT_THROW(validate_partition(d), DeclarationError);
}

TEST(Hierarchy, LoadRejectsMissingFile) {
    EXPECT_THROW(load_hierarchy("/nonexistent/h.json"), ConfigError);
    EXPECT_EQ(load_hierarchy("date-default"), date_default());
}
