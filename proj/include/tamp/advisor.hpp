#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tamp/render.hpp"

namespace tamp::advisor {

struct LabeledImage {
    std::string label;
    render::Image image;
};

// One freshly expanded child of the current search node.
struct Candidate {
    int node_id = -1;
    std::string action;
    std::optional<int> distance_to_goal;
    double displacement = 0.0;  // objects displaced while executing it
};

struct SuccessorQuery {
    int node_id = -1;  // node that was just expanded
    std::string goal;
    std::string tree_json;
    std::vector<Candidate> candidates;  // never empty
    std::vector<LabeledImage> images;   // filled only when the advisor wants them
};

// A node the search may resume from, in breadth-first order.
struct OpenNode {
    int node_id = -1;
    int depth = 0;
    std::optional<int> distance_to_goal;
    int untried_actions = 0;
};

struct BacktrackQuery {
    int current_node = -1;
    std::string goal;
    std::string tree_json;
    std::vector<std::string> feedback;  // deduplicated violation summaries
    std::vector<OpenNode> open;         // may be empty: nothing left to try
    std::vector<LabeledImage> images;
};

// Strategy that steers the hybrid search: which child to descend into after
// an expansion, and where to resume after a dead end. Implementations must
// return an id from the query (or -1 to give up on backtracks); the planner
// treats anything else as a malformed answer and falls back.
struct Advisor {
    virtual ~Advisor() = default;
    virtual std::string name() const = 0;
    virtual bool wants_images() const { return false; }
    virtual int select_successor(const SuccessorQuery& q) = 0;
    virtual int select_backtrack(const BacktrackQuery& q) = 0;
};

// Greedy baseline: nearest to goal in the discrete graph, then least
// disturbance, then first listed. Backtracks to the shallowest open node.
struct HeuristicAdvisor : Advisor {
    std::string name() const override { return "heuristic"; }
    int select_successor(const SuccessorQuery& q) override;
    int select_backtrack(const BacktrackQuery& q) override;
};

// Plays back a fixed id sequence, one per query; ids missing from the query
// (or an exhausted script) defer to the heuristic.
struct ScriptedAdvisor : Advisor {
    explicit ScriptedAdvisor(std::vector<int> script)
        : script_(script.begin(), script.end()) {}
    std::string name() const override { return "scripted"; }
    int select_successor(const SuccessorQuery& q) override;
    int select_backtrack(const BacktrackQuery& q) override;

  private:
    std::deque<int> script_;
    HeuristicAdvisor fallback_;
};

// --- remote advisor over an OpenAI-style chat completion endpoint ---

struct ChatTransport {
    virtual ~ChatTransport() = default;
    // Sends the request body, returns the raw response body. Throws on any
    // transport-level failure.
    virtual std::string post_chat(const std::string& request_json) = 0;
};

// POSTs to <base_url><path> with a bearer token taken from api_key (or the
// TAMP_API_KEY environment variable when empty).
class HttpTransport : public ChatTransport {
  public:
    explicit HttpTransport(std::string base_url, std::string path = "/v1/chat/completions",
                           std::string api_key = "", int timeout_s = 30);
    std::string post_chat(const std::string& request_json) override;

  private:
    std::string base_url_, path_, api_key_;
    int timeout_s_;
};

// Records exchanges through an inner transport to a jsonl file, or replays a
// previously recorded file; replay verifies requests byte for byte so a
// drifting prompt fails loudly instead of answering the wrong question.
class CassetteTransport : public ChatTransport {
  public:
    static std::unique_ptr<CassetteTransport> record(std::string path,
                                                     std::unique_ptr<ChatTransport> inner);
    static std::unique_ptr<CassetteTransport> replay(std::string path);
    std::string post_chat(const std::string& request_json) override;

  private:
    CassetteTransport() = default;
    std::string path_;
    std::unique_ptr<ChatTransport> inner_;
    std::vector<std::pair<std::string, std::string>> entries_;
    std::size_t cursor_ = 0;
};

struct RemoteOptions {
    std::string model = "gpt-4o";
    double temperature = 0.0;
};

// Asks the remote model to pick; any transport error, unparsable reply, or
// out-of-query id falls back to the heuristic so planning always proceeds.
class RemoteAdvisor : public Advisor {
  public:
    RemoteAdvisor(std::unique_ptr<ChatTransport> transport, RemoteOptions opts = {});
    std::string name() const override { return "remote"; }
    bool wants_images() const override { return true; }
    int select_successor(const SuccessorQuery& q) override;
    int select_backtrack(const BacktrackQuery& q) override;

  private:
    std::unique_ptr<ChatTransport> transport_;
    RemoteOptions opts_;
    HeuristicAdvisor fallback_;
};

// Request bodies sent by RemoteAdvisor, exposed for golden tests.
std::string build_successor_request(const SuccessorQuery& q, const RemoteOptions& opts);
std::string build_backtrack_request(const BacktrackQuery& q, const RemoteOptions& opts);

// Extracts the id after the last "CHOICE:" marker in the completion text.
// Throws std::runtime_error when the marker or integer is missing.
int parse_choice(const std::string& completion_text);

std::string base64(const std::uint8_t* data, std::size_t len);

}  // namespace tamp::advisor
