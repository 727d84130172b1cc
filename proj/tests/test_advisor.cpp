#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

#include "tamp/advisor.hpp"

using namespace tamp::advisor;
using nlohmann::json;

namespace {

SuccessorQuery fixture_query() {
    SuccessorQuery q;
    q.node_id = 7;
    q.goal = "(and (on red green))";
    q.tree_json = R"({"nodes":[{"id":0},{"id":7}]})";
    q.candidates = {{3, "(pickup red)", 2, 0.0031},
                    {4, "(pickup blue)", std::nullopt, 0.0},
                    {5, "(unstack red green)", 1, 0.012}};
    return q;
}

BacktrackQuery fixture_backtrack() {
    BacktrackQuery q;
    q.current_node = 7;
    q.goal = "(and (on red green))";
    q.tree_json = R"({"nodes":[]})";
    q.feedback = {"grasp of red missed, gripper ended 22.0 mm from the grasp point"};
    q.open = {{0, 0, 3, 2}, {2, 1, 2, 1}};
    return q;
}

std::string chat_response(const std::string& content) {
    return json{{"choices", json::array({json{{"message", json{{"content", content}}}}})}}
        .dump();
}

void write_cassette(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream f(path, std::ios::trunc);
    for (const auto& [req, resp] : entries)
        f << json{{"request", req}, {"response", resp}}.dump() << "\n";
}

struct CannedTransport : ChatTransport {
    std::vector<std::string> responses;
    std::size_t n = 0;
    std::string post_chat(const std::string&) override {
        REQUIRE(n < responses.size());
        return responses[n++];
    }
};

}  // namespace

TEST_CASE("heuristic advisor prefers closer, calmer, earlier") {
    HeuristicAdvisor h;
    CHECK(h.select_successor(fixture_query()) == 5);  // distance 1 beats 2 and unknown

    SuccessorQuery tie;
    tie.candidates = {{1, "a", 2, 0.5}, {2, "b", 2, 0.1}, {3, "c", 2, 0.1}};
    CHECK(h.select_successor(tie) == 2);  // displacement, then first listed

    SuccessorQuery unknowns;
    unknowns.candidates = {{10, "a", std::nullopt, 0.4}, {11, "b", std::nullopt, 0.2}};
    CHECK(h.select_successor(unknowns) == 11);

    CHECK(h.select_backtrack(fixture_backtrack()) == 0);
    BacktrackQuery empty;
    CHECK(h.select_backtrack(empty) == -1);
}

TEST_CASE("scripted advisor consumes its queue and then defers") {
    ScriptedAdvisor s({3, 99, -1});
    CHECK(s.select_successor(fixture_query()) == 3);   // scripted and valid
    CHECK(s.select_successor(fixture_query()) == 5);   // 99 invalid, heuristic
    CHECK(s.select_backtrack(fixture_backtrack()) == -1);  // scripted give-up
    CHECK(s.select_successor(fixture_query()) == 5);   // exhausted, heuristic
}

TEST_CASE("base64 known answers") {
    auto b64 = [](const std::string& s) {
        return base64(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
    };
    CHECK(b64("Man") == "TWFu");
    CHECK(b64("Ma") == "TWE=");
    CHECK(b64("M") == "TQ==");
    CHECK(b64("") == "");
    CHECK(b64("light work.") == "bGlnaHQgd29yay4=");
}

TEST_CASE("choice parsing takes the last marker") {
    CHECK(parse_choice("I considered CHOICE: 3 but settle on\nCHOICE: 5") == 5);
    CHECK(parse_choice("CHOICE:  12") == 12);
    CHECK(parse_choice("CHOICE: -1") == -1);
    CHECK_THROWS(parse_choice("no marker here"));
    CHECK_THROWS(parse_choice("CHOICE: nothing numeric"));
}

TEST_CASE("successor request carries prompt, metadata, and images") {
    SuccessorQuery q = fixture_query();
    RemoteOptions opts;
    json j = json::parse(build_successor_request(q, opts));
    CHECK(j.at("model") == "gpt-4o");
    CHECK(j.at("temperature") == 0.0);
    REQUIRE(j.at("messages").size() == 2);
    CHECK(j["messages"][0]["role"] == "system");
    std::string text = j["messages"][1]["content"][0]["text"];
    CHECK(text.find("(unstack red green)") != std::string::npos);
    CHECK(text.find("node 7") != std::string::npos);
    CHECK(text.find(q.tree_json) != std::string::npos);
    CHECK(text.find("CHOICE:") != std::string::npos);

    q.images.push_back({"front view", tamp::render::Image{2, 2, std::vector<std::uint8_t>(12, 9)}});
    json with_img = json::parse(build_successor_request(q, opts));
    auto& content = with_img["messages"][1]["content"];
    REQUIRE(content.size() == 3);
    CHECK(content[1]["text"] == "front view:");
    std::string url = content[2]["image_url"]["url"];
    CHECK(url.rfind("data:image/png;base64,", 0) == 0);
    CHECK(url.size() > 30);
}

TEST_CASE("remote advisor replays a cassette and validates the answer") {
    const std::string path = "test_advisor_cassette.jsonl";
    SuccessorQuery q = fixture_query();
    RemoteOptions opts;
    write_cassette(path, {{build_successor_request(q, opts), chat_response("I pick\nCHOICE: 4")},
                          {build_successor_request(q, opts), chat_response("CHOICE: 77")},
                          {build_backtrack_request(fixture_backtrack(), opts),
                           chat_response("hopeless\nCHOICE: -1")}});

    RemoteAdvisor adv(CassetteTransport::replay(path), opts);
    CHECK(adv.wants_images());
    CHECK(adv.select_successor(q) == 4);   // remote answer honored
    CHECK(adv.select_successor(q) == 5);   // 77 not a candidate, heuristic fallback
    CHECK(adv.select_backtrack(fixture_backtrack()) == -1);
    CHECK(adv.select_successor(q) == 5);   // cassette exhausted, fallback
    std::remove(path.c_str());
}

TEST_CASE("cassette records exchanges and replays them verbatim") {
    const std::string path = "test_advisor_record.jsonl";
    auto canned = std::make_unique<CannedTransport>();
    canned->responses = {"resp-one", "resp-two"};
    auto rec = CassetteTransport::record(path, std::move(canned));
    CHECK(rec->post_chat("req-one") == "resp-one");
    CHECK(rec->post_chat("req-two") == "resp-two");

    auto rep = CassetteTransport::replay(path);
    CHECK(rep->post_chat("req-one") == "resp-one");
    CHECK_THROWS(rep->post_chat("req-mismatch"));
    std::remove(path.c_str());
}

TEST_CASE("http transport talks to a live chat endpoint") {
    httplib::Server svr;
    svr.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        CHECK(req.get_header_value("Authorization") == "Bearer k123");
        json body = json::parse(req.body);
        CHECK(body.at("model") == "gpt-4o");
        res.set_content(chat_response("server says\nCHOICE: 3"), "application/json");
    });
    int port = svr.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server([&] { svr.listen_after_bind(); });
    for (int i = 0; i < 1000 && !svr.is_running(); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    REQUIRE(svr.is_running());

    SuccessorQuery q = fixture_query();
    RemoteAdvisor adv(std::make_unique<HttpTransport>("http://127.0.0.1:" + std::to_string(port),
                                                      "/v1/chat/completions", "k123", 5));
    CHECK(adv.select_successor(q) == 3);

    svr.stop();
    server.join();

    // Endpoint gone: the advisor silently falls back to the heuristic.
    RemoteAdvisor down(std::make_unique<HttpTransport>("http://127.0.0.1:" + std::to_string(port),
                                                       "/v1/chat/completions", "k123", 1));
    CHECK(down.select_successor(q) == 5);
}
