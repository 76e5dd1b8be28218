#include <gtest/gtest.h>

#include "memax/parser.hpp"
#include "memax/resolver.hpp"
#include "support/generators.hpp"
#include "support/golden.hpp"

using namespace memax;

namespace {

std::vector<ResolvedQuery> resolve_src(std::string_view s, const ResolveOptions& o = {}) {
    return resolve(parse(lex(s)), o);
}

ResolvedQuery one(std::string_view s) { return resolve_src(s).at(0); }

Error resolve_error(std::string_view s) {
    try {
        resolve_src(s);
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "no error for " << s;
    return Error(Stage::Lex, "");
}

std::string column(const ResolvedQuery& q, const Expr& e) {
    const auto* c = e.as<ColumnRef>();
    if (!c) return "<not a column>";
    return q.instances.at(c->instance).alias() + "." + (c->star ? "*" : c->column);
}

}  // namespace

TEST(Resolver, ScalarFilter) {
    const auto q = one(golden::kScalarSource);
    ASSERT_EQ(q.instances.size(), 1u);
    EXPECT_EQ(q.instances[0].table, "movies");
    EXPECT_EQ(q.instances[0].introduced_at, Coordinate::from_high({0, 0, 2}));
    ASSERT_EQ(q.projections.size(), 2u);
    EXPECT_EQ(column(q, q.projections[0].expr), "t0.year");
    EXPECT_EQ(column(q, q.projections[1].expr), "t0.title");
    ASSERT_EQ(q.predicates.size(), 1u);
    EXPECT_EQ(column(q, q.predicates[0].lhs), "t0.year");
    EXPECT_EQ(q.predicates[0].cmp, Comparator::Lt);
    ASSERT_EQ(q.predicates[0].rhs.size(), 1u);
    EXPECT_EQ(q.predicates[0].rhs[0].as<Literal>()->value, LiteralValue(std::int64_t{1970}));
    EXPECT_FALSE(q.grouped());
}

TEST(Resolver, WildcardAddsNoConstraint) {
    const auto q = one("movies title _;;");
    ASSERT_EQ(q.projections.size(), 1u);
    EXPECT_EQ(column(q, q.projections[0].expr), "t0.title");
    EXPECT_TRUE(q.predicates.empty());
}

TEST(Resolver, CostarSelfJoin) {
    const auto q = one(golden::kCostarSource);
    ASSERT_EQ(q.instances.size(), 2u);
    EXPECT_EQ(q.instances[1].table, "roles");
    EXPECT_EQ(q.instances[1].alias(), "t1");
    std::vector<std::string> cols;
    for (const auto& p : q.projections) cols.push_back(column(q, p.expr));
    EXPECT_EQ(cols, (std::vector<std::string>{"t0.actor", "t0.movie", "t1.movie", "t1.actor"}));
    ASSERT_EQ(q.predicates.size(), 3u);
    EXPECT_EQ(q.predicates[0].rhs[0].as<Literal>()->value, LiteralValue(std::string("Bruce Willis")));
    EXPECT_EQ(column(q, q.predicates[1].lhs), "t1.movie");
    EXPECT_EQ(column(q, q.predicates[1].rhs[0]), "t0.movie");
    EXPECT_EQ(column(q, q.predicates[2].lhs), "t1.actor");
    EXPECT_EQ(q.predicates[2].cmp, Comparator::Ne);
    EXPECT_EQ(column(q, q.predicates[2].rhs[0]), "t0.actor");
}

TEST(Resolver, GroupedJoin) {
    const auto q = one(golden::kGroupedSource);
    ASSERT_EQ(q.instances.size(), 2u);
    EXPECT_EQ(q.instances[1].table, "roles");
    ASSERT_EQ(q.projections.size(), 5u);
    EXPECT_EQ(q.projections[0].aggregate, FuncTag::Last);
    EXPECT_EQ(q.projections[1].aggregate, FuncTag::Last);
    EXPECT_TRUE(q.projections[2].grouping);
    EXPECT_FALSE(q.projections[2].aggregate.has_value());
    EXPECT_EQ(q.projections[3].aggregate, FuncTag::Last);
    EXPECT_EQ(q.projections[4].aggregate, FuncTag::Min);
    EXPECT_TRUE(q.projections[1].expr.as<BinaryExpr>());
    ASSERT_EQ(q.order.size(), 1u);
    EXPECT_EQ(q.order[0].projection, 4u);
    EXPECT_TRUE(q.order[0].descending);
    EXPECT_EQ(q.meta.lim, 12);
    EXPECT_EQ(q.params, std::vector<std::string>{"sim"});
    // roles.movie = the grouped movies.title
    EXPECT_EQ(column(q, q.predicates[2].lhs), "t1.movie");
    EXPECT_EQ(column(q, q.predicates[2].rhs[0]), "t0.title");
}

TEST(Resolver, CosineOrdering) {
    const auto q = one(golden::kCosineSource);
    ASSERT_EQ(q.projections.size(), 2u);
    const auto* b = q.projections[0].expr.as<BinaryExpr>();
    ASSERT_TRUE(b);
    EXPECT_EQ(b->op, "<=>");
    EXPECT_EQ(b->rhs->as<EmbedText>()->text, "robot");
    ASSERT_EQ(q.order.size(), 1u);
    EXPECT_FALSE(q.order[0].descending);
    EXPECT_EQ(q.predicates.at(0).lhs, q.projections[0].expr);
    EXPECT_EQ(q.predicates[0].rhs[0].as<Literal>()->value, LiteralValue(Decimal{"0.35"}));
}

TEST(Resolver, SameTableAttachesDifferentTableIntroduces) {
    const auto q = one("movies year _;movies title _;roles actor _;;");
    ASSERT_EQ(q.instances.size(), 2u);
    EXPECT_EQ(column(q, q.projections[1].expr), "t0.title");
    EXPECT_EQ(column(q, q.projections[2].expr), "t1.actor");
}

TEST(Resolver, CarriedTableIsIdempotent) {
    EXPECT_EQ(one("movies year <1970;movies title _;;").projections,
              one("movies year <1970;title _;;").projections);
    EXPECT_EQ(one("movies year <1970;movies title _;;").instances, one("movies year <1970;title _;;").instances);
}

TEST(Resolver, StarProjection) {
    const auto q = one("movies year <1970;_;;");
    ASSERT_EQ(q.projections.size(), 2u);
    EXPECT_EQ(column(q, q.projections[1].expr), "t0.*");
    const auto s = one("movies _ _;;");
    EXPECT_EQ(column(s, s.projections[0].expr), "t0.*");
}

TEST(Resolver, ColumnSameCopiesColumn) {
    const auto q = one("movies year >1;roles @ _;;");
    EXPECT_EQ(column(q, q.projections[1].expr), "t1.year");
}

TEST(Resolver, DisjunctionKeepsAllOperands) {
    const auto q = one("movies title \"a\",\"b\";;");
    ASSERT_EQ(q.predicates.size(), 1u);
    EXPECT_EQ(q.predicates[0].rhs.size(), 2u);
}

TEST(Resolver, MatrixSameUsesPreviousMatrix) {
    const auto q = resolve_src("movies title \"Alien\";; ^ ^ ^;;");
    ASSERT_EQ(q.size(), 2u);
    EXPECT_EQ(q[1].instances[0].table, "movies");
    EXPECT_EQ(column(q[1], q[1].projections[0].expr), "t0.title");
    EXPECT_EQ(q[1].predicates.at(0).rhs[0].as<Literal>()->value, LiteralValue(std::string("Alien")));
}

TEST(Resolver, MetaSimOverridesRuntimeSim) {
    const auto q = one("movies description <=>\"x\"<$sim;%m sim 0.2;;");
    EXPECT_EQ(q.predicates.at(0).rhs[0].as<Literal>()->value, LiteralValue(Decimal{"0.2"}));
    EXPECT_TRUE(q.params.empty());
}

TEST(Resolver, RuntimeParamsFromOptions) {
    ResolveOptions o;
    o.runtime_params.insert("floor");
    const auto q = resolve_src("movies year >$floor;;", o).at(0);
    EXPECT_EQ(q.predicates.at(0).rhs[0].as<RuntimeParam>()->name, "floor");
    EXPECT_EQ(q.params, std::vector<std::string>{"floor"});
}

TEST(Resolver, LaterBindingShadows) {
    const auto q = one("roles actor :$a;movie :$a;title !=$a;;");
    EXPECT_EQ(column(q, q.predicates.at(0).rhs[0]), "t0.movie");
}

TEST(Resolver, Errors) {
    const auto unbound = resolve_error("roles actor !=$zzz;;");
    EXPECT_EQ(unbound.stage(), Stage::Resolve);
    EXPECT_STREQ(unbound.what(), "unbound variable $zzz");
    EXPECT_EQ(unbound.span(), (Span{14, 18}));

    EXPECT_EQ(resolve_error("@ year _;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("movies year @;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("movies @ _;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("^ title _;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("title _;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("_ title _;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("$t title _;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("movies $c _;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("movies title :grp:sum;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("movies title :grp;_;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("movies _ =3;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("movies description <=>5<1;;").stage(), Stage::Resolve);
    EXPECT_EQ(resolve_error("movies year 99999999999999999999;;").stage(), Stage::Resolve);
    // ^ refers to something other than a literal: not parameterizable.
    EXPECT_EQ(resolve_error("movies title _;; ^ ^ ^;;").stage(), Stage::Compile);
}

TEST(CompleteGrouping, UngroupedUnchanged) {
    const auto q = one(golden::kScalarSource);
    EXPECT_EQ(complete_grouping(q), q);
}

TEST(CompleteGrouping, RejectsGrpWithAggregate) {
    auto q = one("movies title :grp;year :sum;;");
    q.projections[0].aggregate = FuncTag::Sum;
    EXPECT_THROW(complete_grouping(q), Error);
}

TEST(ResolveValueSame, FirstVectorHasNoPrior) {
    EXPECT_THROW(resolve_value_same(nullptr, Span{0, 1}), Error);
}

TEST(ResolverProperty, RandomQueriesResolveDeterministically) {
    testkit::Rng rng(5);
    for (int i = 0; i < 300; ++i) {
        const auto src = testkit::random_query(rng);
        std::vector<ResolvedQuery> a;
        try {
            a = resolve_src(src);
        } catch (const Error& e) {
            FAIL() << src << "\n" << e.describe();
        }
        EXPECT_EQ(a, resolve_src(src)) << src;
        for (const auto& q : a) {
            for (std::size_t k = 0; k < q.instances.size(); ++k) EXPECT_EQ(q.instances[k].ordinal, k);
            if (!q.grouped()) continue;
            std::size_t keys = 0, aggregated = 0;
            for (const auto& p : q.projections) {
                keys += p.grouping ? 1 : 0;
                aggregated += p.aggregate ? 1 : 0;
                EXPECT_NE(p.grouping, p.aggregate.has_value()) << src;
            }
            EXPECT_EQ(keys + aggregated, q.projections.size()) << src;
        }
    }
}
