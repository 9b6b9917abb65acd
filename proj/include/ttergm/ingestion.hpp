#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttergm/graph.hpp"

namespace ttergm {

// The closed set of platform event types accepted by the parser.
enum class EventType : std::uint8_t {
    WatchEvent,
    PullRequestReviewCommentEvent,
    IssueCommentEvent,
    MemberEvent,
    IssuesEvent,
    GollumEvent,
    ForkEvent,
    ReleaseEvent,
    PublicEvent,
    PullRequestEvent,
    PushEvent,
    DeleteEvent,
    CommitCommentEvent,
    CreateEvent,
};

inline constexpr std::size_t kEventTypeCount = 14;

const std::string& event_type_name(EventType t);
std::optional<EventType> event_type_from_name(const std::string& name);

// Every event type belongs to exactly one category; starring counts as
// receptive only.
enum class EventCategory : std::uint8_t { Receptive, Contributive };
EventCategory event_category(EventType t);

struct EventRecord {
    std::int64_t timestamp = 0; // UTC seconds
    EventType type = EventType::WatchEvent;
    std::string actor;
    std::string repo;
    std::optional<std::string> target_user; // e.g. MemberEvent invitee
};

struct RejectionReport {
    std::int64_t count = 0;
    std::vector<std::string> samples; // first 10 rejected lines, verbatim
};

struct ParsedLog {
    std::vector<EventRecord> events;
    RejectionReport rejections;
};

// Newline-delimited JSON, one event per line with fields `type`,
// `created_at` (ISO-8601 UTC), `actor.id`, `repo.id` and optional
// `payload.member.id`. Malformed lines and unknown event types are counted
// and sampled; blank lines are ignored.
ParsedLog parse_event_log(std::istream& in);

// Top-k users by follower count; ties broken by lexicographically smaller id.
std::vector<std::string> select_influencers(
    const std::map<std::string, std::int64_t>& follower_counts, std::int64_t k);

// Audience-size proxy used when no follower table is supplied: the number of
// distinct other users active on any repository where the user produced
// contributive events inside the date range.
std::map<std::string, std::int64_t> derive_follower_proxy(
    const std::vector<EventRecord>& events, std::int64_t start_ts, std::int64_t end_ts);

struct IngestConfig {
    std::int64_t start_ts = 0; // inclusive
    std::int64_t end_ts = 0;   // inclusive
    std::int64_t top_k_repos = 100;
    std::int64_t top_k_influencers = 10;

    void validate() const {
        if (start_ts >= end_ts)
            throw ConfigError("date range start must precede end");
        if (top_k_repos < 1 || top_k_influencers < 1)
            throw ConfigError("top-k parameters must be >= 1");
    }
};

struct IngestResult {
    TemporalNetwork network;
    std::vector<std::string> influencers; // selected ids in rank order
    std::vector<std::string> top_repos;   // selected ids in rank order
    std::string influencer_note;          // selection rationale, echoed to outputs
};

// Builds one snapshot per calendar month in the date range over the
// universe of selected influencers, users active on the top-k repositories,
// and the repositories themselves. A user->repo edge records any event by
// the user on that repository within the month; an influencer->user edge
// records the user acting on a top repository strictly after the influencer
// did, within the same or the previous month.
IngestResult build_influence_network(const std::vector<EventRecord>& events,
                                     const IngestConfig& cfg,
                                     const std::map<std::string, std::int64_t>& follower_counts);

struct ConnectionFeatures {
    NodeId influencer = 0;
    std::int64_t direct_links = 0;
    std::int64_t path2_links = 0;
    std::int64_t path3_links = 0;
    std::int64_t influencer_triangles = 0;
};

struct SnapshotFeatures {
    std::string label;
    std::vector<ConnectionFeatures> per_influencer;
};

// Per-influencer connection features per snapshot, using the statistic
// module's counting conventions restricted to one source node. Triangles
// need a previous snapshot and are zero on the first one.
std::vector<SnapshotFeatures> extract_connection_features(
    const TemporalNetwork& tn, const std::vector<NodeId>& influencers);

// Calendar helpers (UTC, proleptic Gregorian).
std::optional<std::int64_t> parse_iso8601_utc(const std::string& s);
std::optional<std::int64_t> parse_date_utc(const std::string& s); // YYYY-MM-DD, midnight
std::string month_label_of(std::int64_t ts);
std::int64_t month_index_of(std::int64_t ts); // year*12 + month-1

} // namespace ttergm
