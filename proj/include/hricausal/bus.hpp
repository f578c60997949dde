#pragma once

#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "hricausal/causal_model.hpp"
#include "hricausal/state.hpp"

namespace hricausal {

enum class MessageKind { RobotState, HumanState, CausalModel };

std::string_view to_string(MessageKind kind);

/// A typed payload. Robot and human states share the AgentState layout and
/// are told apart by the kind tag.
struct Message {
  MessageKind kind = MessageKind::RobotState;
  std::variant<AgentState, CausalModel> body;

  static Message robot(AgentState state) { return {MessageKind::RobotState, std::move(state)}; }
  static Message human(AgentState state) { return {MessageKind::HumanState, std::move(state)}; }
  static Message model(CausalModel model) { return {MessageKind::CausalModel, std::move(model)}; }

  const AgentState& agent_state() const { return std::get<AgentState>(body); }
  const CausalModel& causal_model() const { return std::get<CausalModel>(body); }
};

struct Envelope {
  double publish_time = 0.0;
  Message payload;
};

struct Topic {
  std::string name;
  MessageKind kind = MessageKind::RobotState;
};

inline constexpr std::size_t kDefaultQueueCapacity = 64;

namespace detail {

struct SubscriptionQueue {
  explicit SubscriptionQueue(std::size_t cap) : capacity(cap) {}

  std::mutex mutex;
  std::deque<Envelope> queue;
  std::size_t capacity;
  std::size_t dropped = 0;
};

struct TopicEntry {
  Topic topic;
  std::mutex mutex;
  std::vector<std::weak_ptr<SubscriptionQueue>> subscribers;
  double last_publish_time = 0.0;
  bool has_published = false;
};

}  // namespace detail

/// Receiving end of a topic. Destroying it detaches it from the bus.
class Subscription {
 public:
  Subscription() = default;

  /// Returns queued envelopes in publish order and empties the queue.
  std::vector<Envelope> drain();

  std::size_t size() const;
  std::size_t capacity() const;
  /// Messages discarded because the queue was full.
  std::size_t dropped() const;
  const std::string& topic_name() const { return topic_name_; }
  bool valid() const { return queue_ != nullptr; }

 private:
  friend class Bus;
  Subscription(std::string topic_name, std::shared_ptr<detail::SubscriptionQueue> queue)
      : topic_name_(std::move(topic_name)), queue_(std::move(queue)) {}

  std::string topic_name_;
  std::shared_ptr<detail::SubscriptionQueue> queue_;
};

/// In-process publish/subscribe bus with named, single-kind topics.
///
/// Thread-safe. Publishes on one topic are serialized; there is no ordering
/// guarantee between topics. Subscribers see only traffic published after
/// they subscribed, and a full queue drops its oldest envelope.
class Bus {
 public:
  Bus() = default;
  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  Topic create_topic(std::string name, MessageKind kind);
  /// Throws TopicError for unknown names.
  Topic topic(std::string_view name) const;
  bool has_topic(std::string_view name) const;

  /// Throws TopicError for unknown topics, KindMismatchError when the payload
  /// kind differs from the topic kind and ValidationError when `time` goes
  /// backwards on the topic.
  void publish(const Topic& topic, Message payload, double time);
  void publish(std::string_view topic_name, Message payload, double time);

  Subscription subscribe(const Topic& topic, std::size_t capacity = kDefaultQueueCapacity);
  Subscription subscribe(std::string_view topic_name,
                         std::size_t capacity = kDefaultQueueCapacity);

 private:
  std::shared_ptr<detail::TopicEntry> find(std::string_view name) const;

  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<detail::TopicEntry>> topics_;
};

/// Registers the three pipeline topics if they are not present yet.
void register_pipeline_topics(Bus& bus);

}  // namespace hricausal
