#include "doctest.h"

#include <map>
#include <sstream>

#include "support.hpp"
#include "ttergm/ingestion.hpp"
#include "ttergm/serialize.hpp"

using namespace ttergm;

namespace {

std::string event_line(const std::string& type, const std::string& ts,
                       const std::string& actor, const std::string& repo) {
    return R"({"type":")" + type + R"(","created_at":")" + ts + R"(","actor":{"id":")" +
           actor + R"("},"repo":{"id":")" + repo + R"("}})";
}

IngestConfig range_2017_07_08(std::int64_t repos = 100, std::int64_t influencers = 10) {
    IngestConfig cfg;
    cfg.start_ts = *parse_date_utc("2017-07-01");
    cfg.end_ts = *parse_date_utc("2017-08-31") + 86399;
    cfg.top_k_repos = repos;
    cfg.top_k_influencers = influencers;
    return cfg;
}

NodeId node_of(const Universe& u, const std::string& name) {
    for (NodeId v = 0; v < u.n(); ++v)
        if (u.names[static_cast<std::size_t>(v)] == name)
            return v;
    FAIL("node not found: " << name);
    return -1;
}

} // namespace

TEST_CASE("calendar parsing") {
    CHECK(*parse_iso8601_utc("2017-07-01T00:00:00Z") == 1498867200);
    CHECK(*parse_iso8601_utc("1970-01-01T00:00:01Z") == 1);
    CHECK(*parse_date_utc("2017-07-01") == 1498867200);
    CHECK(!parse_iso8601_utc("2017-07-01 00:00:00"));
    CHECK(!parse_iso8601_utc("2017-13-01T00:00:00Z"));
    CHECK(!parse_iso8601_utc("2017-02-30T00:00:00Z"));
    CHECK(!parse_date_utc("not-a-date"));
    CHECK(month_label_of(1498867200) == "2017-07");
    CHECK(month_label_of(1498867199) == "2017-06");
    CHECK(month_index_of(*parse_date_utc("2017-01-15")) ==
          month_index_of(*parse_date_utc("2017-01-01")));
    CHECK(month_index_of(*parse_date_utc("2017-02-01")) ==
          month_index_of(*parse_date_utc("2017-01-01")) + 1);
}

TEST_CASE("event categories partition the taxonomy") {
    int receptive = 0, contributive = 0;
    for (std::size_t i = 0; i < kEventTypeCount; ++i) {
        const auto t = static_cast<EventType>(i);
        CHECK(event_type_from_name(event_type_name(t)) == t);
        (event_category(t) == EventCategory::Receptive ? receptive : contributive)++;
    }
    CHECK(receptive == 6);
    CHECK(contributive == 8);
    CHECK(event_category(EventType::WatchEvent) == EventCategory::Receptive);
    CHECK(event_category(EventType::PushEvent) == EventCategory::Contributive);
}

TEST_CASE("event log parsing") {
    SUBCASE("empty input") {
        std::istringstream in("");
        const auto log = parse_event_log(in);
        CHECK(log.events.empty());
        CHECK(log.rejections.count == 0);
    }
    SUBCASE("three lines with one malformed") {
        std::istringstream in(
            event_line("WatchEvent", "2017-07-01T10:00:00Z", "alice", "r1") + "\n" +
            "{this is not json\n" +
            event_line("PushEvent", "2017-07-02T10:00:00Z", "bob", "r1") + "\n");
        const auto log = parse_event_log(in);
        REQUIRE(log.events.size() == 2);
        CHECK(log.rejections.count == 1);
        REQUIRE(log.rejections.samples.size() == 1);
        CHECK(log.rejections.samples[0] == "{this is not json");
        CHECK(log.events[0].type == EventType::WatchEvent);
        CHECK(log.events[0].actor == "alice");
        CHECK(log.events[0].repo == "r1");
        CHECK(log.events[1].type == EventType::PushEvent);
    }
    SUBCASE("unknown event types are rejected") {
        std::istringstream in(event_line("FooEvent", "2017-07-01T10:00:00Z", "a", "r"));
        const auto log = parse_event_log(in);
        CHECK(log.events.empty());
        CHECK(log.rejections.count == 1);
    }
    SUBCASE("numeric ids are normalized to strings") {
        std::istringstream in(
            R"({"type":"WatchEvent","created_at":"2017-07-01T10:00:00Z","actor":{"id":42},"repo":{"id":7}})");
        const auto log = parse_event_log(in);
        REQUIRE(log.events.size() == 1);
        CHECK(log.events[0].actor == "42");
        CHECK(log.events[0].repo == "7");
    }
    SUBCASE("member payload becomes the target user") {
        std::istringstream in(
            R"({"type":"MemberEvent","created_at":"2017-07-01T10:00:00Z","actor":{"id":"a"},"repo":{"id":"r"},"payload":{"member":{"id":"b"}}})");
        const auto log = parse_event_log(in);
        REQUIRE(log.events.size() == 1);
        REQUIRE(log.events[0].target_user.has_value());
        CHECK(*log.events[0].target_user == "b");
    }
    SUBCASE("missing fields and bad timestamps are rejected") {
        std::istringstream in(
            R"({"type":"WatchEvent","created_at":"yesterday","actor":{"id":"a"},"repo":{"id":"r"}})"
            "\n"
            R"({"type":"WatchEvent","actor":{"id":"a"},"repo":{"id":"r"}})"
            "\n");
        const auto log = parse_event_log(in);
        CHECK(log.events.empty());
        CHECK(log.rejections.count == 2);
    }
    SUBCASE("rejection report keeps only the first ten samples") {
        std::ostringstream big;
        for (int i = 0; i < 15; ++i)
            big << "broken line " << i << "\n";
        std::istringstream in(big.str());
        const auto log = parse_event_log(in);
        CHECK(log.rejections.count == 15);
        CHECK(log.rejections.samples.size() == 10);
        CHECK(log.rejections.samples[0] == "broken line 0");
    }
}

TEST_CASE("influencer selection") {
    // Anonymized follower-count fixture.
    const std::map<std::string, std::int64_t> counts = {
        {"lBMOoXAjxIN_Dc3alQNLZQ", 52722}, {"BhQS5KA8AvmQJXbsVeusdw", 30161},
        {"s0jAeLRt2onrivaUCqdJrg", 25827}, {"QFB1aZ8GXkNYHyfWe7aEeA", 24604},
        {"jAGnWUFUmnBc9ydeQbIfDQ", 24510}, {"hXalEIoEWnEbCSfiQI1LNA", 23076},
        {"eUnkVgArKJiNOBhb0w53_Q", 18522}, {"VRyyOPSJUCS5jRlDtwjefA", 15755},
        {"wNDkYd6NACSuvLCnxog23w", 15396}, {"wHfAzUFXU8D186qTl9c54w", 14928},
    };
    SUBCASE("ranks follow the counts") {
        const auto top = select_influencers(counts, 10);
        REQUIRE(top.size() == 10);
        CHECK(top[0] == "lBMOoXAjxIN_Dc3alQNLZQ"); // 52722 followers
        CHECK(top[1] == "BhQS5KA8AvmQJXbsVeusdw"); // 30161
        CHECK(top[2] == "s0jAeLRt2onrivaUCqdJrg"); // 25827
        CHECK(top[9] == "wHfAzUFXU8D186qTl9c54w"); // 14928
    }
    SUBCASE("k larger than the table returns everyone sorted") {
        const auto top = select_influencers({{"u", 4}, {"v", 9}}, 10);
        CHECK(top == std::vector<std::string>{"v", "u"});
    }
    SUBCASE("ties break toward the smaller id") {
        const auto top = select_influencers({{"zed", 100}, {"amy", 100}}, 1);
        CHECK(top == std::vector<std::string>{"amy"});
    }
}

TEST_CASE("follower proxy counts the contributor's audience") {
    std::istringstream in(
        event_line("PushEvent", "2017-07-01T09:00:00Z", "u", "r") + "\n" +
        event_line("WatchEvent", "2017-07-02T09:00:00Z", "v", "r") + "\n" +
        event_line("IssueCommentEvent", "2017-07-03T09:00:00Z", "w", "r") + "\n");
    const auto log = parse_event_log(in);
    const auto proxy = derive_follower_proxy(log.events, 0, 4102444800LL);
    CHECK(proxy.at("u") == 2); // v and w acted on u's repository
    CHECK(proxy.at("v") == 0); // starring is not contributive
    CHECK(proxy.at("w") == 0);
}

TEST_CASE("influence network construction") {
    SUBCASE("a single star event yields one user->repo edge") {
        std::istringstream in(event_line("WatchEvent", "2017-07-05T10:00:00Z", "A", "R"));
        const auto log = parse_event_log(in);
        IngestConfig cfg;
        cfg.start_ts = *parse_date_utc("2017-07-01");
        cfg.end_ts = *parse_date_utc("2017-07-31") + 86399;
        const auto result =
            build_influence_network(log.events, cfg, {{"A", 10}});
        REQUIRE(result.network.snapshots.size() == 1);
        CHECK(result.network.snapshots[0].label == "2017-07");
        const auto& u = result.network.universe;
        REQUIRE(u.n() == 2);
        const auto a = node_of(u, "A");
        const auto r = node_of(u, "R");
        CHECK(u.covariates[static_cast<std::size_t>(a)].kind == NodeKind::User);
        CHECK(u.covariates[static_cast<std::size_t>(r)].kind == NodeKind::Repo);
        CHECK(result.network.snapshots[0].graph.edge_count() == 1);
        CHECK(result.network.snapshots[0].graph.has_edge(a, r));
    }
    SUBCASE("a follower acting after the influencer gains an influence edge") {
        std::istringstream in(
            event_line("PushEvent", "2017-07-03T08:00:00Z", "I", "R") + "\n" +
            event_line("WatchEvent", "2017-07-04T08:00:00Z", "F", "R") + "\n");
        const auto log = parse_event_log(in);
        const auto result = build_influence_network(log.events, range_2017_07_08(100, 1),
                                                    {{"I", 50}, {"F", 1}});
        const auto& u = result.network.universe;
        const auto i = node_of(u, "I");
        const auto f = node_of(u, "F");
        CHECK(u.covariates[static_cast<std::size_t>(i)].is_influencer);
        CHECK(!u.covariates[static_cast<std::size_t>(f)].is_influencer);
        const auto& july = result.network.snapshots[0].graph;
        CHECK(july.has_edge(i, f));
        CHECK(!july.has_edge(f, i));
    }
    SUBCASE("acting before the influencer earns no influence edge") {
        std::istringstream in(
            event_line("WatchEvent", "2017-07-02T08:00:00Z", "F", "R") + "\n" +
            event_line("PushEvent", "2017-07-03T08:00:00Z", "I", "R") + "\n");
        const auto log = parse_event_log(in);
        const auto result = build_influence_network(log.events, range_2017_07_08(100, 1),
                                                    {{"I", 50}, {"F", 1}});
        const auto& u = result.network.universe;
        CHECK(!result.network.snapshots[0].graph.has_edge(node_of(u, "I"),
                                                          node_of(u, "F")));
    }
    SUBCASE("the previous month still triggers, two months back does not") {
        std::istringstream in(
            event_line("PushEvent", "2017-07-03T08:00:00Z", "I", "R") + "\n" +
            event_line("WatchEvent", "2017-08-04T08:00:00Z", "F", "R") + "\n" +
            event_line("WatchEvent", "2017-09-04T08:00:00Z", "G", "R") + "\n");
        const auto log = parse_event_log(in);
        IngestConfig cfg;
        cfg.start_ts = *parse_date_utc("2017-07-01");
        cfg.end_ts = *parse_date_utc("2017-09-30") + 86399;
        cfg.top_k_influencers = 1;
        const auto result = build_influence_network(
            log.events, cfg, {{"I", 50}, {"F", 1}, {"G", 1}});
        const auto& u = result.network.universe;
        REQUIRE(result.network.snapshots.size() == 3);
        const auto i = node_of(u, "I");
        // August: influencer acted in July (previous month), edge exists.
        CHECK(result.network.snapshots[1].graph.has_edge(i, node_of(u, "F")));
        // September: influencer act is two months old, no edge.
        CHECK(!result.network.snapshots[2].graph.has_edge(i, node_of(u, "G")));
    }
    SUBCASE("no events yields empty snapshots for every month in range") {
        const auto result = build_influence_network({}, range_2017_07_08(), {{"A", 1}});
        REQUIRE(result.network.snapshots.size() == 2);
        CHECK(result.network.snapshots[0].label == "2017-07");
        CHECK(result.network.snapshots[1].label == "2017-08");
        for (const auto& s : result.network.snapshots)
            CHECK(s.graph.edge_count() == 0);
    }
    SUBCASE("repo popularity ties break toward the smaller id") {
        std::istringstream in(
            event_line("WatchEvent", "2017-07-01T08:00:00Z", "a", "r3") + "\n" +
            event_line("WatchEvent", "2017-07-01T09:00:00Z", "a", "r2") + "\n");
        const auto log = parse_event_log(in);
        const auto result =
            build_influence_network(log.events, range_2017_07_08(1, 1), {{"a", 1}});
        CHECK(result.top_repos == std::vector<std::string>{"r2"});
    }
    SUBCASE("ingestion is deterministic") {
        std::vector<EventRecord> events;
        Rng rng(60);
        for (int i = 0; i < 200; ++i) {
            EventRecord e;
            e.type = static_cast<EventType>(rng.next_below(kEventTypeCount));
            e.timestamp = *parse_date_utc("2017-07-01") +
                          static_cast<std::int64_t>(rng.next_below(50LL * 86400));
            e.actor = "u" + std::to_string(rng.next_below(12));
            e.repo = "r" + std::to_string(rng.next_below(6));
            events.push_back(e);
        }
        const auto cfg = range_2017_07_08(3, 2);
        const auto followers = derive_follower_proxy(events, cfg.start_ts, cfg.end_ts);
        const auto a = build_influence_network(events, cfg, followers);
        const auto b = build_influence_network(events, cfg, followers);
        REQUIRE(a.network.snapshots.size() == b.network.snapshots.size());
        CHECK(covariates_to_json(a.network.universe) ==
              covariates_to_json(b.network.universe));
        for (std::size_t s = 0; s < a.network.snapshots.size(); ++s)
            CHECK(a.network.snapshots[s].graph == b.network.snapshots[s].graph);
    }
}

TEST_CASE("connection features") {
    SUBCASE("star and chain fixtures") {
        TemporalNetwork tn;
        tn.universe = test::universe_of(test::user_covariates(4, {0}));
        tn.snapshots.push_back(
            {test::graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}}), "2017-01"});
        tn.snapshots.push_back({test::graph_from_edges(4, {{0, 1}, {1, 2}}), "2017-02"});
        const auto features = extract_connection_features(tn, {0});
        REQUIRE(features.size() == 2);
        CHECK(features[0].per_influencer[0].direct_links == 3);
        CHECK(features[0].per_influencer[0].path2_links == 0);
        CHECK(features[0].per_influencer[0].influencer_triangles == 0);
        CHECK(features[1].per_influencer[0].direct_links == 1);
        CHECK(features[1].per_influencer[0].path2_links == 1);
        CHECK(features[1].per_influencer[0].path3_links == 0);
    }
    SUBCASE("matches a brute-force path enumeration on random graphs") {
        Rng rng(321);
        for (int rep = 0; rep < 10; ++rep) {
            const NodeId n = 8;
            TemporalNetwork tn;
            tn.universe = test::universe_of(test::user_covariates(n, {0, 1}));
            tn.snapshots.push_back({test::random_graph(n, 0.35, rng), "2017-01"});
            tn.snapshots.push_back({test::random_graph(n, 0.35, rng), "2017-02"});
            const auto& cov = tn.universe.covariates;
            const auto features = extract_connection_features(tn, {0, 1});

            for (std::size_t s = 0; s < 2; ++s) {
                const auto& g = tn.snapshots[s].graph;
                const DirectedGraph* prev = s > 0 ? &tn.snapshots[s - 1].graph : nullptr;
                for (std::size_t fi = 0; fi < 2; ++fi) {
                    const NodeId r = static_cast<NodeId>(fi);
                    auto inf = [&](NodeId v) {
                        return cov[static_cast<std::size_t>(v)].is_influencer;
                    };
                    std::int64_t direct = 0, p2 = 0, p3 = 0, tri = 0;
                    for (NodeId x = 0; x < n; ++x)
                        if (x != r && !inf(x) && g.has_edge(r, x))
                            ++direct;
                    for (NodeId a = 0; a < n; ++a)
                        for (NodeId x = 0; x < n; ++x) {
                            if (a == r || x == r || x == a)
                                continue;
                            if (!inf(x) && g.has_edge(r, a) && g.has_edge(a, x))
                                ++p2;
                        }
                    for (NodeId a = 0; a < n; ++a)
                        for (NodeId b = 0; b < n; ++b)
                            for (NodeId x = 0; x < n; ++x) {
                                if (a == r || b == r || x == r || a == b || a == x ||
                                    b == x)
                                    continue;
                                if (!inf(x) && g.has_edge(r, a) && g.has_edge(a, b) &&
                                    g.has_edge(b, x))
                                    ++p3;
                            }
                    if (prev != nullptr)
                        for (NodeId f = 0; f < n; ++f)
                            for (NodeId x = 0; x < n; ++x) {
                                if (f == r || x == r || x == f)
                                    continue;
                                if (g.has_edge(r, f) && g.has_edge(r, x) &&
                                    g.has_edge(f, x) && prev->has_edge(r, x))
                                    ++tri;
                            }
                    const auto& got = features[s].per_influencer[fi];
                    REQUIRE(got.direct_links == direct);
                    REQUIRE(got.path2_links == p2);
                    REQUIRE(got.path3_links == p3);
                    REQUIRE(got.influencer_triangles == tri);
                }
            }
        }
    }
    SUBCASE("direct links never exceed the user-user edge total") {
        Rng rng(654);
        TemporalNetwork tn;
        tn.universe = test::universe_of(test::user_covariates(10, {0, 1, 2}));
        tn.snapshots.push_back({test::random_graph(10, 0.3, rng), "2017-01"});
        const auto features = extract_connection_features(tn, {0, 1, 2});
        std::int64_t total_direct = 0;
        for (const auto& f : features[0].per_influencer)
            total_direct += f.direct_links;
        CHECK(total_direct <= tn.snapshots[0].graph.edge_count());
    }
}
