#include "tamp/advisor.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace tamp::advisor {

using nlohmann::json;

namespace {

std::string fixed4(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << x;
    return os.str();
}

json image_items(const std::vector<LabeledImage>& images) {
    json items = json::array();
    for (const auto& [label, image] : images) {
        items.push_back({{"type", "text"}, {"text", label + ":"}});
        auto png = render::encode_png(image);
        items.push_back(
            {{"type", "image_url"},
             {"image_url",
              {{"url", "data:image/png;base64," + base64(png.data(), png.size())}}}});
    }
    return items;
}

json chat_body(const RemoteOptions& opts, const std::string& system_prompt,
               const std::string& user_text, const std::vector<LabeledImage>& images) {
    json content = json::array();
    content.push_back({{"type", "text"}, {"text", user_text}});
    for (auto& item : image_items(images)) content.push_back(std::move(item));
    return json{{"model", opts.model},
                {"temperature", opts.temperature},
                {"messages",
                 json::array({json{{"role", "system"}, {"content", system_prompt}},
                              json{{"role", "user"}, {"content", content}}})}};
}

}  // namespace

int HeuristicAdvisor::select_successor(const SuccessorQuery& q) {
    if (q.candidates.empty()) throw std::runtime_error("successor query with no candidates");
    std::size_t best = 0;
    auto key = [&](const Candidate& c) {
        return std::pair<int, double>(
            c.distance_to_goal.value_or(std::numeric_limits<int>::max()), c.displacement);
    };
    for (std::size_t i = 1; i < q.candidates.size(); ++i)
        if (key(q.candidates[i]) < key(q.candidates[best])) best = i;
    return q.candidates[best].node_id;
}

int HeuristicAdvisor::select_backtrack(const BacktrackQuery& q) {
    return q.open.empty() ? -1 : q.open.front().node_id;
}

int ScriptedAdvisor::select_successor(const SuccessorQuery& q) {
    if (!script_.empty()) {
        int id = script_.front();
        script_.pop_front();
        for (const auto& c : q.candidates)
            if (c.node_id == id) return id;
    }
    return fallback_.select_successor(q);
}

int ScriptedAdvisor::select_backtrack(const BacktrackQuery& q) {
    if (!script_.empty()) {
        int id = script_.front();
        script_.pop_front();
        if (id == -1) return -1;
        for (const auto& n : q.open)
            if (n.node_id == id) return id;
    }
    return fallback_.select_backtrack(q);
}

std::string base64(const std::uint8_t* data, std::size_t len) {
    static const char* k = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
        if (i + 1 < len) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
        if (i + 2 < len) chunk |= data[i + 2];
        out.push_back(k[(chunk >> 18) & 63]);
        out.push_back(k[(chunk >> 12) & 63]);
        out.push_back(i + 1 < len ? k[(chunk >> 6) & 63] : '=');
        out.push_back(i + 2 < len ? k[chunk & 63] : '=');
    }
    return out;
}

std::string build_successor_request(const SuccessorQuery& q, const RemoteOptions& opts) {
    std::ostringstream text;
    text << "A robot arm is working toward this goal:\n" << q.goal << "\n\n";
    text << "The planner expanded node " << q.node_id
         << " and executed these candidate actions, each leading to a child node:\n";
    for (const auto& c : q.candidates) {
        text << "- node " << c.node_id << ": " << c.action << " | distance to goal: ";
        if (c.distance_to_goal)
            text << *c.distance_to_goal;
        else
            text << "unknown";
        text << " | objects displaced: " << fixed4(c.displacement) << " m\n";
    }
    text << "\nSearch tree so far:\n" << q.tree_json << "\n";
    text << "\nPick the child node to continue from. Reason briefly, then end "
            "with a final line of the form CHOICE: <node id>";
    return chat_body(opts,
                     "You steer a task-and-motion planner for a tabletop robot. "
                     "Always finish your reply with 'CHOICE: <id>'.",
                     text.str(), q.images)
        .dump();
}

std::string build_backtrack_request(const BacktrackQuery& q, const RemoteOptions& opts) {
    std::ostringstream text;
    text << "A robot arm is working toward this goal:\n" << q.goal << "\n\n";
    text << "The search is stuck at node " << q.current_node
         << ". Every recent attempt failed for these reasons:\n";
    for (const auto& f : q.feedback) text << "- " << f << "\n";
    text << "\nNodes that can be resumed (breadth-first order):\n";
    for (const auto& n : q.open) {
        text << "- node " << n.node_id << ": depth " << n.depth << ", distance to goal ";
        if (n.distance_to_goal)
            text << *n.distance_to_goal;
        else
            text << "unknown";
        text << ", untried actions " << n.untried_actions << "\n";
    }
    text << "\nSearch tree so far:\n" << q.tree_json << "\n";
    text << "\nPick the node to resume from, or -1 to give up. Reason briefly, "
            "then end with a final line of the form CHOICE: <node id>";
    return chat_body(opts,
                     "You steer a task-and-motion planner for a tabletop robot. "
                     "Always finish your reply with 'CHOICE: <id>'.",
                     text.str(), q.images)
        .dump();
}

int parse_choice(const std::string& completion_text) {
    static const std::string kMarker = "CHOICE:";
    std::size_t pos = completion_text.rfind(kMarker);
    if (pos == std::string::npos)
        throw std::runtime_error("completion has no CHOICE marker");
    const char* p = completion_text.c_str() + pos + kMarker.size();
    char* end = nullptr;
    long v = std::strtol(p, &end, 10);
    if (end == p) throw std::runtime_error("CHOICE marker not followed by an id");
    return static_cast<int>(v);
}

HttpTransport::HttpTransport(std::string base_url, std::string path, std::string api_key,
                             int timeout_s)
    : base_url_(std::move(base_url)), path_(std::move(path)), api_key_(std::move(api_key)),
      timeout_s_(timeout_s) {
    if (api_key_.empty())
        if (const char* env = std::getenv("TAMP_API_KEY")) api_key_ = env;
}

std::string HttpTransport::post_chat(const std::string& request_json) {
    httplib::Client cli(base_url_);
    cli.set_connection_timeout(timeout_s_, 0);
    cli.set_read_timeout(timeout_s_, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = cli.Post(path_, headers, request_json, "application/json");
    if (!res) throw std::runtime_error("chat endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw std::runtime_error("chat endpoint returned status " + std::to_string(res->status));
    return res->body;
}

std::unique_ptr<CassetteTransport> CassetteTransport::record(std::string path,
                                                             std::unique_ptr<ChatTransport> inner) {
    auto t = std::unique_ptr<CassetteTransport>(new CassetteTransport());
    t->path_ = std::move(path);
    t->inner_ = std::move(inner);
    std::ofstream truncate(t->path_, std::ios::trunc);
    if (!truncate) throw std::runtime_error("cannot open cassette " + t->path_);
    return t;
}

std::unique_ptr<CassetteTransport> CassetteTransport::replay(std::string path) {
    auto t = std::unique_ptr<CassetteTransport>(new CassetteTransport());
    t->path_ = std::move(path);
    std::ifstream f(t->path_);
    if (!f) throw std::runtime_error("cannot open cassette " + t->path_);
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        t->entries_.emplace_back(j.at("request").get<std::string>(),
                                 j.at("response").get<std::string>());
    }
    return t;
}

std::string CassetteTransport::post_chat(const std::string& request_json) {
    if (inner_) {  // record mode
        std::string response = inner_->post_chat(request_json);
        std::ofstream f(path_, std::ios::app);
        f << json{{"request", request_json}, {"response", response}}.dump() << "\n";
        return response;
    }
    if (cursor_ >= entries_.size())
        throw std::runtime_error("cassette " + path_ + " exhausted at call " +
                                 std::to_string(cursor_));
    if (entries_[cursor_].first != request_json)
        throw std::runtime_error("cassette " + path_ + " request mismatch at entry " +
                                 std::to_string(cursor_));
    return entries_[cursor_++].second;
}

RemoteAdvisor::RemoteAdvisor(std::unique_ptr<ChatTransport> transport, RemoteOptions opts)
    : transport_(std::move(transport)), opts_(std::move(opts)) {}

int RemoteAdvisor::select_successor(const SuccessorQuery& q) {
    try {
        std::string response = transport_->post_chat(build_successor_request(q, opts_));
        json j = json::parse(response);
        int id = parse_choice(
            j.at("choices").at(0).at("message").at("content").get<std::string>());
        for (const auto& c : q.candidates)
            if (c.node_id == id) return id;
        throw std::runtime_error("chose node outside the candidate set");
    } catch (const std::exception&) {
        return fallback_.select_successor(q);
    }
}

int RemoteAdvisor::select_backtrack(const BacktrackQuery& q) {
    try {
        std::string response = transport_->post_chat(build_backtrack_request(q, opts_));
        json j = json::parse(response);
        int id = parse_choice(
            j.at("choices").at(0).at("message").at("content").get<std::string>());
        if (id == -1) return -1;
        for (const auto& n : q.open)
            if (n.node_id == id) return id;
        throw std::runtime_error("chose node outside the open set");
    } catch (const std::exception&) {
        return fallback_.select_backtrack(q);
    }
}

}  // namespace tamp::advisor
