#include "hricausal/bus.hpp"

#include <algorithm>

#include "hricausal/error.hpp"

namespace hricausal {

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::RobotState: return "RobotState";
    case MessageKind::HumanState: return "HumanState";
    case MessageKind::CausalModel: return "CausalModel";
  }
  return "unknown";
}

std::vector<Envelope> Subscription::drain() {
  if (!queue_) return {};
  std::lock_guard lock(queue_->mutex);
  std::vector<Envelope> out(std::make_move_iterator(queue_->queue.begin()),
                            std::make_move_iterator(queue_->queue.end()));
  queue_->queue.clear();
  return out;
}

std::size_t Subscription::size() const {
  if (!queue_) return 0;
  std::lock_guard lock(queue_->mutex);
  return queue_->queue.size();
}

std::size_t Subscription::capacity() const { return queue_ ? queue_->capacity : 0; }

std::size_t Subscription::dropped() const {
  if (!queue_) return 0;
  std::lock_guard lock(queue_->mutex);
  return queue_->dropped;
}

Topic Bus::create_topic(std::string name, MessageKind kind) {
  if (name.empty()) throw TopicError("topic name must not be empty");
  std::unique_lock lock(mutex_);
  if (topics_.contains(name)) throw TopicError("topic already registered: " + name);
  auto entry = std::make_shared<detail::TopicEntry>();
  entry->topic = Topic{name, kind};
  topics_.emplace(std::move(name), entry);
  return entry->topic;
}

std::shared_ptr<detail::TopicEntry> Bus::find(std::string_view name) const {
  std::shared_lock lock(mutex_);
  auto it = topics_.find(std::string(name));
  if (it == topics_.end()) throw TopicError("unknown topic: " + std::string(name));
  return it->second;
}

Topic Bus::topic(std::string_view name) const { return find(name)->topic; }

bool Bus::has_topic(std::string_view name) const {
  std::shared_lock lock(mutex_);
  return topics_.contains(std::string(name));
}

void Bus::publish(const Topic& topic, Message payload, double time) {
  publish(std::string_view(topic.name), std::move(payload), time);
}

void Bus::publish(std::string_view topic_name, Message payload, double time) {
  auto entry = find(topic_name);
  if (payload.kind != entry->topic.kind) {
    throw KindMismatchError("cannot publish " + std::string(to_string(payload.kind)) +
                            " on " + entry->topic.name + " (expects " +
                            std::string(to_string(entry->topic.kind)) + ")");
  }

  std::lock_guard lock(entry->mutex);
  if (entry->has_published && time < entry->last_publish_time) {
    throw ValidationError("publish time went backwards on " + entry->topic.name);
  }
  entry->has_published = true;
  entry->last_publish_time = time;

  auto& subs = entry->subscribers;
  std::erase_if(subs, [](const auto& weak) { return weak.expired(); });
  for (const auto& weak : subs) {
    auto queue = weak.lock();
    if (!queue) continue;
    std::lock_guard qlock(queue->mutex);
    if (queue->queue.size() >= queue->capacity) {
      queue->queue.pop_front();
      ++queue->dropped;
    }
    queue->queue.push_back(Envelope{time, payload});
  }
}

Subscription Bus::subscribe(const Topic& topic, std::size_t capacity) {
  return subscribe(std::string_view(topic.name), capacity);
}

Subscription Bus::subscribe(std::string_view topic_name, std::size_t capacity) {
  if (capacity == 0) throw ValidationError("subscription capacity must be positive");
  auto entry = find(topic_name);
  auto queue = std::make_shared<detail::SubscriptionQueue>(capacity);
  {
    std::lock_guard lock(entry->mutex);
    entry->subscribers.push_back(queue);
  }
  return Subscription(entry->topic.name, std::move(queue));
}

void register_pipeline_topics(Bus& bus) {
  if (!bus.has_topic(kRobotTopic)) bus.create_topic(std::string(kRobotTopic), MessageKind::RobotState);
  if (!bus.has_topic(kHumanTopic)) bus.create_topic(std::string(kHumanTopic), MessageKind::HumanState);
  if (!bus.has_topic(kCausalModelTopic)) {
    bus.create_topic(std::string(kCausalModelTopic), MessageKind::CausalModel);
  }
}

}  // namespace hricausal
