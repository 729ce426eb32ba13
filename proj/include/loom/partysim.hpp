// Copyright 2026 The Loom Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// In-process multiparty harness: rooted-tree topology, per-pair FIFO
// transport, traffic counters and a transcript for the communication
// accounting checks. The transport contract is small on purpose so a
// socket-backed implementation could replace it.

#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "loom/errors.hpp"
#include "loom/numth.hpp"
#include "loom/prng.hpp"

namespace loom {

enum class Protocol : uint8_t {
  kKeygenPk = 1,
  kKeygenRlk = 2,
  kKeygenRtk = 3,
  kCombine = 4,
  kBroadcast = 5,
  kBootShare = 6,
  kBootResult = 7,
  kDecShare = 8,
  kKeySwitchShare = 9,
  kPrediction = 10,
};

inline const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::kKeygenPk: return "keygen-pk";
    case Protocol::kKeygenRlk: return "keygen-rlk";
    case Protocol::kKeygenRtk: return "keygen-rtk";
    case Protocol::kCombine: return "combine";
    case Protocol::kBroadcast: return "broadcast";
    case Protocol::kBootShare: return "boot-share";
    case Protocol::kBootResult: return "boot-result";
    case Protocol::kDecShare: return "dec-share";
    case Protocol::kKeySwitchShare: return "keyswitch-share";
    case Protocol::kPrediction: return "prediction";
  }
  return "unknown";
}

// Rooted tree over party ids 0..n-1. The root plays DP_R.
struct Topology {
  std::vector<int> parent;  // parent[root] == -1
  int root = 0;

  size_t size() const { return parent.size(); }

  std::vector<int> children(int p) const {
    std::vector<int> out;
    for (size_t i = 0; i < parent.size(); ++i)
      if (parent[i] == p) out.push_back(int(i));
    return out;
  }

  // Children-before-parent order (for aggregations up the tree).
  std::vector<int> up_order() const {
    std::vector<int> order;
    std::vector<int> stack{root};
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      order.push_back(p);
      for (int c : children(p)) stack.push_back(c);
    }
    std::reverse(order.begin(), order.end());
    return order;
  }

  // Parent-before-children order (for broadcasts down the tree).
  std::vector<int> down_order() const {
    auto order = up_order();
    std::reverse(order.begin(), order.end());
    return order;
  }

  void validate() const {
    if (parent.empty()) throw ParameterError("empty topology");
    int roots = 0;
    for (size_t i = 0; i < parent.size(); ++i) {
      if (parent[i] == -1) {
        ++roots;
        if (int(i) != root) throw ParameterError("root mismatch");
      } else if (parent[i] < 0 || parent[i] >= int(parent.size())) {
        throw ParameterError("parent out of range");
      }
    }
    if (roots != 1) throw ParameterError("topology must have one root");
    // Acyclic + connected: every node must reach the root.
    for (size_t i = 0; i < parent.size(); ++i) {
      int cur = int(i);
      size_t hops = 0;
      while (cur != root) {
        cur = parent[cur];
        if (++hops > parent.size()) throw ParameterError("topology has a cycle");
      }
    }
  }

  static Topology star(size_t n, int root = 0) {
    Topology t;
    t.root = root;
    t.parent.assign(n, root);
    t.parent[root] = -1;
    t.validate();
    return t;
  }

  static Topology chain(size_t n, int root = 0) {
    Topology t;
    t.root = root;
    t.parent.assign(n, -1);
    std::vector<int> label = relabel(n, root);
    for (size_t i = 1; i < n; ++i) t.parent[label[i]] = label[i - 1];
    t.validate();
    return t;
  }

  static Topology binary(size_t n, int root = 0) {
    Topology t;
    t.root = root;
    t.parent.assign(n, -1);
    // Heap layout over a relabeling that places `root` first.
    std::vector<int> label = relabel(n, root);
    for (size_t i = 1; i < n; ++i) t.parent[label[i]] = label[(i - 1) / 2];
    t.validate();
    return t;
  }

  static std::vector<int> relabel(size_t n, int root) {
    std::vector<int> label(n);
    label[0] = root;
    int next = 0;
    for (size_t i = 1; i < n; ++i) {
      if (next == root) ++next;
      label[i] = next++;
    }
    return label;
  }
};

struct Envelope {
  int sender = 0;
  int receiver = 0;
  Protocol protocol = Protocol::kCombine;
  int round = 0;
  size_t bytes = 0;
  std::vector<uint8_t> payload;
};

struct ProtocolTraffic {
  u64 messages = 0;
  u64 bytes = 0;
};

struct TranscriptLine {
  int sender;
  int receiver;
  Protocol protocol;
  int round;
  size_t bytes;
};

class Transport {
 public:
  explicit Transport(size_t n_parties) : n_(n_parties) {}

  size_t parties() const { return n_; }

  void deliver(Envelope env) {
    if (env.sender < 0 || env.sender >= int(n_) || env.receiver < 0 ||
        env.receiver >= int(n_))
      throw ProtocolAbort("unreachable party in " +
                          std::string(protocol_name(env.protocol)));
    env.bytes = env.payload.size();
    traffic_[env.protocol].messages += 1;
    traffic_[env.protocol].bytes += env.bytes;
    transcript_.push_back(
        {env.sender, env.receiver, env.protocol, env.round, env.bytes});
    queues_[{env.sender, env.receiver}].push_back(std::move(env));
  }

  void send(int from, int to, Protocol proto, int round,
            std::vector<uint8_t> payload) {
    Envelope env;
    env.sender = from;
    env.receiver = to;
    env.protocol = proto;
    env.round = round;
    env.payload = std::move(payload);
    deliver(std::move(env));
  }

  // FIFO per ordered pair; no loss.
  std::vector<uint8_t> recv(int from, int to) {
    auto it = queues_.find({from, to});
    if (it == queues_.end() || it->second.empty())
      throw ProtocolAbort("missing message from party " + std::to_string(from));
    std::vector<uint8_t> payload = std::move(it->second.front().payload);
    it->second.pop_front();
    return payload;
  }

  bool pending(int from, int to) const {
    auto it = queues_.find({from, to});
    return it != queues_.end() && !it->second.empty();
  }

  const std::map<Protocol, ProtocolTraffic>& traffic() const { return traffic_; }

  ProtocolTraffic traffic_for(Protocol p) const {
    auto it = traffic_.find(p);
    return it == traffic_.end() ? ProtocolTraffic{} : it->second;
  }

  const std::vector<TranscriptLine>& transcript() const { return transcript_; }

  // One line per envelope: sender, receiver, protocol, round, bytes.
  void dump_transcript(std::ostream& os) const {
    for (const auto& line : transcript_)
      os << line.sender << ' ' << line.receiver << ' '
         << protocol_name(line.protocol) << ' ' << line.round << ' '
         << line.bytes << '\n';
  }

  void reset_counters() {
    traffic_.clear();
    transcript_.clear();
  }

 private:
  size_t n_;
  std::map<std::pair<int, int>, std::deque<Envelope>> queues_;
  std::map<Protocol, ProtocolTraffic> traffic_;
  std::vector<TranscriptLine> transcript_;
};

// Deterministic round-robin scheduler: applies `body` to each party in a
// fixed order. The randomized variant exists for robustness tests; protocol
// results must not depend on the order.
template <typename Fn>
void run_round(const std::vector<int>& order, Fn&& body) {
  for (int p : order) body(p);
}

template <typename Fn>
void run_round_randomized(std::vector<int> order, Prng& prng, Fn&& body) {
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[prng.uniform_below(i)]);
  for (int p : order) body(p);
}

}  // namespace loom
