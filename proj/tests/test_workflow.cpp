#include <doctest.h>

#include <functional>
#include <map>
#include <random>

#include "support/workflow_oracle.hpp"
#include "tai/error.hpp"
#include "tai/workflow.hpp"

using namespace tai;
using namespace tai::testing;

namespace {

const Timestamp kAt = parse_rfc3339("2024-03-01T12:00:00Z");

WorkItem apply(const WorkItem& item, Ev e, int serial = 0) { return transition(item, make_event(e, serial), kAt); }

WorkItem awaiting_item() { return apply(apply(fresh_item(), Ev::Start), Ev::DraftReady); }

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

// Plain recursive definition, memoized; independent of the two-row DP.
std::size_t levenshtein_oracle(const std::u32string& a, const std::u32string& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == 0) return j;
        if (j == 0) return i;
        if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
        const std::size_t r = std::min({d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1])});
        memo[{i, j}] = r;
        return r;
    };
    return d(a.size(), b.size());
}

}  // namespace

TEST_CASE("NEW -> GENERATING on StartGeneration") {
    const WorkItem next = apply(fresh_item(), Ev::Start);
    CHECK(next.state == ItemState::Generating);
    CHECK(next.attempts == 1);
    CHECK(next.version == 1);
    REQUIRE(next.transitions.size() == 1);
    CHECK(next.transitions[0].event == "StartGeneration");
}

TEST_CASE("approve appends an APPROVE action") {
    const WorkItem next = apply(awaiting_item(), Ev::Approve);
    CHECK(next.state == ItemState::Approved);
    REQUIRE(next.actions.size() == 1);
    CHECK(next.actions[0].kind == ActionKind::Approve);
    CHECK(next.actions[0].actor_id == "ta-approver");
    CHECK(next.actions[0].draft_index == 0);
}

TEST_CASE("edit mutates the latest draft in place and records distance") {
    const WorkItem item = awaiting_item();
    const WorkItem next = transition(item, event::Edit{"ta", "draft text 1", std::nullopt}, kAt);
    CHECK(next.state == ItemState::AwaitingReview);
    CHECK(next.drafts.size() == 1);
    CHECK(next.drafts[0].edited_output == "draft text 1");
    CHECK(next.drafts[0].raw_output == "draft text 0");
    REQUIRE(next.actions.back().edit_payload);
    CHECK(next.actions.back().edit_payload->distance == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("reprompt returns to GENERATING and the next draft gets the next index") {
    WorkItem item = apply(awaiting_item(), Ev::Reprompt);
    CHECK(item.state == ItemState::Generating);
    CHECK(item.attempts == 1);
    REQUIRE(pending_reprompt(item));
    item = apply(item, Ev::DraftReady, 1);
    REQUIRE(item.drafts.size() == 2);
    CHECK(item.drafts[1].index == 1);
    CHECK(item.drafts[1].raw_output == "draft text 1");
}

TEST_CASE("illegal transitions, stale versions and exhausted attempts") {
    const WorkItem item = fresh_item();
    CHECK(code_of([&] { apply(item, Ev::Approve); }) == ErrorCode::IllegalTransition);
    CHECK(code_of([&] { transition(item, event::StartGeneration{}, 7, kAt); }) == ErrorCode::StaleVersion);

    WorkItem failing = apply(apply(item, Ev::Start), Ev::GenFailed);
    failing = apply(apply(failing, Ev::Start), Ev::GenFailed);
    failing = apply(apply(failing, Ev::Start), Ev::GenFailed);
    CHECK(failing.attempts == 3);
    CHECK(code_of([&] { apply(failing, Ev::Start); }) == ErrorCode::AttemptsExhausted);
    const WorkItem dismissed = apply(failing, Ev::Dismiss);
    CHECK(dismissed.state == ItemState::Dismissed);
    CHECK_FALSE(dismissed.actions.back().draft_index.has_value());
}

TEST_CASE("review actions need a human actor and valid payloads") {
    const WorkItem item = awaiting_item();
    CHECK(code_of([&] { transition(item, event::Approve{"", std::nullopt}, kAt); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { transition(item, event::Edit{"ta", "   ", std::nullopt}, kAt); }) == ErrorCode::InvalidArgument);
    RepromptOptions blank;
    blank.custom_instructions = " \t";
    CHECK(code_of([&] { transition(item, event::Reprompt{"ta", blank, std::nullopt}, kAt); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("reprompt after approval is rejected") {
    const WorkItem approved = apply(awaiting_item(), Ev::Approve);
    CHECK(code_of([&] { apply(approved, Ev::Reprompt); }) == ErrorCode::IllegalTransition);
    CHECK(code_of([&] { apply(approved, Ev::Edit); }) == ErrorCode::IllegalTransition);
}

TEST_CASE("publish failure keeps APPROVED but bumps the version") {
    const WorkItem approved = apply(awaiting_item(), Ev::Approve);
    const WorkItem retried = apply(approved, Ev::PubFail);
    CHECK(retried.state == ItemState::Approved);
    CHECK(retried.version == approved.version + 1);
    CHECK(retried.actions == approved.actions);
}

TEST_CASE("final_text") {
    WorkItem item = fresh_item();
    item = apply(item, Ev::Start);
    Draft d;
    d.raw_output = "use a loop";
    item = transition(item, event::DraftReady{d}, kAt);
    CHECK(code_of([&] { final_text(item); }) == ErrorCode::NotApproved);

    CHECK(final_text(apply(item, Ev::Approve)) == "use a loop");
    const WorkItem edited = transition(item, event::Edit{"ta", "use a for loop", std::nullopt}, kAt);
    CHECK(final_text(apply(edited, Ev::Approve)) == "use a for loop");
}

TEST_CASE("edit distance examples") {
    CHECK(compute_edit_distance("abc", "abc") == 0.0);
    CHECK(compute_edit_distance("", "abcd") == 1.0);
    CHECK(compute_edit_distance("", "") == 0.0);
    CHECK(compute_edit_distance("kitten", "sitting") == doctest::Approx(3.0 / 7.0));
    CHECK(compute_edit_distance("use a loop", "use a for loop") == doctest::Approx(4.0 / 14.0));
    // Code points, not bytes.
    CHECK(compute_edit_distance("caf\xC3\xA9", "cafe") == doctest::Approx(0.25));
}

TEST_CASE("levenshtein matches the recursive oracle; symmetric; triangle inequality") {
    std::mt19937 rng(7);
    const std::u32string alphabet = U"abcé";
    auto random_word = [&] {
        std::u32string w;
        const int len = static_cast<int>(rng() % 7);
        for (int i = 0; i < len; ++i) w.push_back(alphabet[rng() % alphabet.size()]);
        return w;
    };
    auto utf8 = [](const std::u32string& w) {
        std::string out;
        for (char32_t c : w) {
            if (c < 0x80) {
                out.push_back(static_cast<char>(c));
            } else {
                out.push_back(static_cast<char>(0xC0 | (c >> 6)));
                out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
            }
        }
        return out;
    };
    for (int i = 0; i < 300; ++i) {
        const auto a = random_word(), b = random_word(), c = random_word();
        const auto sa = utf8(a), sb = utf8(b), sc = utf8(c);
        CHECK(levenshtein(sa, sb) == levenshtein_oracle(a, b));
        CHECK(compute_edit_distance(sa, sb) == compute_edit_distance(sb, sa));
        CHECK(levenshtein(sa, sc) <= levenshtein(sa, sb) + levenshtein(sb, sc));
        const double d = compute_edit_distance(sa, sb);
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("every legal sequence up to length 5 matches the transition-table oracle") {
    std::size_t explored = 0;
    std::function<void(const WorkItem&, OracleState, int)> walk = [&](const WorkItem& item, OracleState o, int depth) {
        if (depth == 5) return;
        for (Ev e : kAllEvents) {
            ++explored;
            const auto expected = oracle_step(o, e);
            std::optional<WorkItem> got;
            try {
                got = transition(item, make_event(e, depth), kAt);
            } catch (const Error&) {
            }
            REQUIRE(got.has_value() == expected.has_value());
            if (!got) continue;
            REQUIRE(got->state == expected->state);
            REQUIRE(got->attempts == expected->attempts);
            REQUIRE(got->version == item.version + 1);
            walk(*got, *expected, depth + 1);
        }
    };
    walk(fresh_item(), OracleState{}, 0);
    CHECK(explored > 9);
}

TEST_CASE("rejected transitions leave the item untouched") {
    const WorkItem item = awaiting_item();
    const WorkItem copy = item;
    for (Ev e : {Ev::Start, Ev::DraftReady, Ev::GenFailed, Ev::PubOk, Ev::PubFail}) {
        CHECK_THROWS_AS(apply(item, e), Error);
        CHECK(item == copy);
    }
}
