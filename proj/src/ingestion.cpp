#include "ttergm/ingestion.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"

namespace ttergm {

namespace {

const std::array<std::string, kEventTypeCount> kEventNames = {
    "WatchEvent",
    "PullRequestReviewCommentEvent",
    "IssueCommentEvent",
    "MemberEvent",
    "IssuesEvent",
    "GollumEvent",
    "ForkEvent",
    "ReleaseEvent",
    "PublicEvent",
    "PullRequestEvent",
    "PushEvent",
    "DeleteEvent",
    "CommitCommentEvent",
    "CreateEvent",
};

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yy + (m <= 2);
}

bool valid_clock(unsigned hh, unsigned mm, unsigned ss) {
    return hh < 24 && mm < 60 && ss < 60;
}

bool valid_date(int year, unsigned month, unsigned day) {
    if (month < 1 || month > 12 || day < 1 || day > 31)
        return false;
    static const unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    unsigned len = lengths[month - 1];
    if (month == 2 && (year % 4 == 0 && (year % 100 != 0 || year % 400 == 0)))
        len = 29;
    return day <= len;
}

// Id fields may be JSON strings or integers; either is normalized to text.
std::optional<std::string> id_as_string(const nlohmann::json& j) {
    if (j.is_string())
        return j.get<std::string>();
    if (j.is_number_integer())
        return std::to_string(j.get<std::int64_t>());
    return std::nullopt;
}

} // namespace

const std::string& event_type_name(EventType t) {
    return kEventNames[static_cast<std::size_t>(t)];
}

std::optional<EventType> event_type_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kEventNames.size(); ++i)
        if (kEventNames[i] == name)
            return static_cast<EventType>(i);
    return std::nullopt;
}

EventCategory event_category(EventType t) {
    switch (t) {
    case EventType::WatchEvent:
    case EventType::PullRequestReviewCommentEvent:
    case EventType::IssueCommentEvent:
    case EventType::MemberEvent:
    case EventType::IssuesEvent:
    case EventType::GollumEvent:
        return EventCategory::Receptive;
    default:
        return EventCategory::Contributive;
    }
}

std::optional<std::int64_t> parse_iso8601_utc(const std::string& s) {
    int year = 0;
    unsigned month = 0, day = 0, hh = 0, mm = 0, ss = 0;
    char zone = '\0';
    char tail = '\0';
    const int got = std::sscanf(s.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c%c", &year, &month,
                                &day, &hh, &mm, &ss, &zone, &tail);
    if (got != 7 || zone != 'Z' || !valid_date(year, month, day) || !valid_clock(hh, mm, ss))
        return std::nullopt;
    return days_from_civil(year, month, day) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::optional<std::int64_t> parse_date_utc(const std::string& s) {
    int year = 0;
    unsigned month = 0, day = 0;
    char tail = '\0';
    const int got = std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &year, &month, &day, &tail);
    if (got != 3 || !valid_date(year, month, day))
        return std::nullopt;
    return days_from_civil(year, month, day) * 86400;
}

std::string month_label_of(std::int64_t ts) {
    std::int64_t days = ts / 86400;
    if (ts < 0 && ts % 86400 != 0)
        --days;
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u", static_cast<long long>(y), m);
    return buf;
}

std::int64_t month_index_of(std::int64_t ts) {
    std::int64_t days = ts / 86400;
    if (ts < 0 && ts % 86400 != 0)
        --days;
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    return y * 12 + static_cast<std::int64_t>(m) - 1;
}

ParsedLog parse_event_log(std::istream& in) {
    if (!in)
        throw IoError("event log stream is not readable");

    ParsedLog log;
    std::string line;
    auto reject = [&log](const std::string& raw) {
        ++log.rejections.count;
        if (log.rejections.samples.size() < 10)
            log.rejections.samples.push_back(raw);
    };

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;

        const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            reject(line);
            continue;
        }

        if (!j.contains("type") || !j["type"].is_string() || !j.contains("created_at") ||
            !j["created_at"].is_string() || !j.contains("actor") ||
            !j["actor"].is_object() || !j["actor"].contains("id") || !j.contains("repo") ||
            !j["repo"].is_object() || !j["repo"].contains("id")) {
            reject(line);
            continue;
        }

        const auto type = event_type_from_name(j["type"].get<std::string>());
        const auto ts = parse_iso8601_utc(j["created_at"].get<std::string>());
        const auto actor = id_as_string(j["actor"]["id"]);
        const auto repo = id_as_string(j["repo"]["id"]);
        if (!type || !ts || !actor || !repo) {
            reject(line);
            continue;
        }

        EventRecord rec;
        rec.type = *type;
        rec.timestamp = *ts;
        rec.actor = *actor;
        rec.repo = *repo;
        if (j.contains("payload") && j["payload"].is_object() &&
            j["payload"].contains("member") && j["payload"]["member"].is_object() &&
            j["payload"]["member"].contains("id")) {
            rec.target_user = id_as_string(j["payload"]["member"]["id"]);
        }
        log.events.push_back(std::move(rec));
    }

    if (in.bad())
        throw IoError("event log stream failed mid-read");
    return log;
}

std::vector<std::string> select_influencers(
    const std::map<std::string, std::int64_t>& follower_counts, std::int64_t k) {
    if (k < 1)
        throw ConfigError("influencer count must be >= 1");
    std::vector<std::pair<std::string, std::int64_t>> ranked(follower_counts.begin(),
                                                             follower_counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    if (static_cast<std::int64_t>(ranked.size()) > k)
        ranked.resize(static_cast<std::size_t>(k));
    std::vector<std::string> ids;
    ids.reserve(ranked.size());
    for (auto& [id, count] : ranked)
        ids.push_back(id);
    return ids;
}

std::map<std::string, std::int64_t> derive_follower_proxy(
    const std::vector<EventRecord>& events, std::int64_t start_ts, std::int64_t end_ts) {
    // repo -> all active users, and user -> repos they contributed to
    std::map<std::string, std::set<std::string>> repo_users;
    std::map<std::string, std::set<std::string>> contributed;
    for (const auto& e : events) {
        if (e.timestamp < start_ts || e.timestamp > end_ts)
            continue;
        repo_users[e.repo].insert(e.actor);
        if (event_category(e.type) == EventCategory::Contributive)
            contributed[e.actor].insert(e.repo);
    }

    std::map<std::string, std::int64_t> proxy;
    for (const auto& [user, repos] : contributed) {
        std::set<std::string> audience;
        for (const auto& r : repos)
            for (const auto& other : repo_users[r])
                if (other != user)
                    audience.insert(other);
        proxy[user] = static_cast<std::int64_t>(audience.size());
    }
    // Users with no contributive events still appear, with an empty audience.
    for (const auto& [repo, users] : repo_users)
        for (const auto& u : users)
            proxy.emplace(u, 0);
    return proxy;
}

IngestResult build_influence_network(const std::vector<EventRecord>& events,
                                     const IngestConfig& cfg,
                                     const std::map<std::string, std::int64_t>& follower_counts) {
    cfg.validate();

    std::vector<EventRecord> in_range;
    for (const auto& e : events)
        if (e.timestamp >= cfg.start_ts && e.timestamp <= cfg.end_ts)
            in_range.push_back(e);

    // Repository popularity: distinct starring users within the range.
    std::map<std::string, std::set<std::string>> watchers;
    for (const auto& e : in_range)
        if (e.type == EventType::WatchEvent)
            watchers[e.repo].insert(e.actor);
    std::vector<std::pair<std::string, std::int64_t>> repo_rank;
    for (const auto& [repo, who] : watchers)
        repo_rank.emplace_back(repo, static_cast<std::int64_t>(who.size()));
    std::stable_sort(repo_rank.begin(), repo_rank.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    if (static_cast<std::int64_t>(repo_rank.size()) > cfg.top_k_repos)
        repo_rank.resize(static_cast<std::size_t>(cfg.top_k_repos));

    IngestResult result;
    for (auto& [repo, count] : repo_rank)
        result.top_repos.push_back(repo);
    std::set<std::string> top_repo_set(result.top_repos.begin(), result.top_repos.end());

    result.influencers = select_influencers(follower_counts, cfg.top_k_influencers);
    result.influencer_note =
        "influencers are the top-k users by follower count (ties broken by id); "
        "k sits where the follower-count curve drops off sharply";
    std::set<std::string> influencer_set(result.influencers.begin(),
                                         result.influencers.end());

    // Universe: influencers, users active on top repositories, and the top
    // repositories themselves. Users first, then repositories, each sorted.
    std::set<std::string> users(influencer_set);
    for (const auto& e : in_range)
        if (top_repo_set.count(e.repo))
            users.insert(e.actor);

    Universe universe;
    std::map<std::string, NodeId> user_id;
    std::map<std::string, NodeId> repo_id;
    for (const auto& u : users) {
        NodeCovariates c;
        c.kind = NodeKind::User;
        c.is_influencer = influencer_set.count(u) > 0;
        const auto it = follower_counts.find(u);
        c.follower_count = it != follower_counts.end() ? it->second : 0;
        user_id[u] = universe.n();
        universe.covariates.push_back(c);
        universe.names.push_back(u);
    }
    std::vector<std::string> sorted_repos(result.top_repos);
    std::sort(sorted_repos.begin(), sorted_repos.end());
    for (const auto& r : sorted_repos) {
        NodeCovariates c;
        c.kind = NodeKind::Repo;
        repo_id[r] = universe.n();
        universe.covariates.push_back(c);
        universe.names.push_back(r);
    }

    const std::int64_t first_month = month_index_of(cfg.start_ts);
    const std::int64_t last_month = month_index_of(cfg.end_ts);

    // Event times per (top repo, user), for the influence rule.
    std::map<std::pair<std::string, std::string>, std::vector<std::int64_t>> repo_user_times;
    for (const auto& e : in_range)
        if (top_repo_set.count(e.repo))
            repo_user_times[{e.repo, e.actor}].push_back(e.timestamp);
    for (auto& [key, times] : repo_user_times)
        std::sort(times.begin(), times.end());

    TemporalNetwork& tn = result.network;
    tn.universe = universe;
    for (std::int64_t mi = first_month; mi <= last_month; ++mi) {
        Snapshot snap;
        snap.graph = DirectedGraph(universe.n());
        {
            // Month label from the index.
            const std::int64_t y = mi / 12;
            const unsigned m = static_cast<unsigned>(mi % 12) + 1;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%04lld-%02u", static_cast<long long>(y), m);
            snap.label = buf;
        }

        // User -> repo activity edges.
        for (const auto& [key, times] : repo_user_times) {
            const auto& [repo, user] = key;
            const bool active_this_month =
                std::any_of(times.begin(), times.end(), [&](std::int64_t t) {
                    return month_index_of(t) == mi;
                });
            if (active_this_month)
                snap.graph.add_edge(user_id.at(user), repo_id.at(repo));
        }

        // Influencer -> user edges: the user acted on a top repository
        // strictly after the influencer's earliest act on it within this or
        // the previous month.
        for (const auto& inf : result.influencers) {
            for (const auto& repo : result.top_repos) {
                const auto it = repo_user_times.find({repo, inf});
                if (it == repo_user_times.end())
                    continue;
                std::int64_t t1 = -1;
                for (std::int64_t t : it->second) {
                    const std::int64_t m = month_index_of(t);
                    if (m == mi || m == mi - 1) {
                        t1 = t;
                        break;
                    }
                }
                if (t1 < 0)
                    continue;
                for (const auto& [key, times] : repo_user_times) {
                    if (key.first != repo || key.second == inf)
                        continue;
                    const bool triggered =
                        std::any_of(times.begin(), times.end(), [&](std::int64_t t2) {
                            return month_index_of(t2) == mi && t2 > t1;
                        });
                    if (triggered)
                        snap.graph.add_edge(user_id.at(inf), user_id.at(key.second));
                }
            }
        }

        tn.snapshots.push_back(std::move(snap));
    }

    tn.validate();
    return result;
}

std::vector<SnapshotFeatures> extract_connection_features(
    const TemporalNetwork& tn, const std::vector<NodeId>& influencers) {
    tn.validate();
    const auto& cov = tn.universe.covariates;
    auto non_influencer = [&](NodeId v) {
        return !cov[static_cast<std::size_t>(v)].is_influencer;
    };

    std::vector<SnapshotFeatures> out;
    for (std::size_t s = 0; s < tn.snapshots.size(); ++s) {
        const DirectedGraph& g = tn.snapshots[s].graph;
        const DirectedGraph* prev = s > 0 ? &tn.snapshots[s - 1].graph : nullptr;
        SnapshotFeatures sf;
        sf.label = tn.snapshots[s].label;
        for (NodeId r : influencers) {
            if (!cov[static_cast<std::size_t>(r)].is_influencer)
                throw DataError("connection features requested for a non-influencer node");
            ConnectionFeatures f;
            f.influencer = r;
            for (NodeId x : g.out_neighbors(r))
                if (non_influencer(x))
                    ++f.direct_links;
            for (NodeId a : g.out_neighbors(r)) {
                for (NodeId x : g.out_neighbors(a))
                    if (non_influencer(x))
                        ++f.path2_links;
                for (NodeId b : g.out_neighbors(a)) {
                    if (b == r)
                        continue;
                    for (NodeId x : g.out_neighbors(b))
                        if (non_influencer(x) && x != a)
                            ++f.path3_links;
                }
            }
            if (prev != nullptr)
                for (NodeId f2 : g.out_neighbors(r))
                    for (NodeId x : g.out_neighbors(f2))
                        if (g.has_edge(r, x) && prev->has_edge(r, x))
                            ++f.influencer_triangles;
            sf.per_influencer.push_back(f);
        }
        out.push_back(std::move(sf));
    }
    return out;
}

} // namespace ttergm
