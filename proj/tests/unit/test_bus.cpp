#include <doctest.h>

#include <thread>

#include "hricausal/bus.hpp"
#include "hricausal/error.hpp"

using namespace hricausal;

namespace {

AgentState at(double x) {
  AgentState s;
  s.agent_id = "r";
  s.pose.x = x;
  return s;
}

std::vector<double> xs(const std::vector<Envelope>& envs) {
  std::vector<double> out;
  for (const auto& e : envs) out.push_back(e.payload.agent_state().pose.x);
  return out;
}

}  // namespace

TEST_SUITE("bus") {
  TEST_CASE("create_topic registers names once") {
    Bus bus;
    auto robot = bus.create_topic("/roscausal/robot", MessageKind::RobotState);
    CHECK(robot.name == "/roscausal/robot");
    CHECK(robot.kind == MessageKind::RobotState);
    auto model = bus.create_topic("/roscausal/causal_model", MessageKind::CausalModel);
    CHECK(model.kind == MessageKind::CausalModel);
    CHECK(bus.has_topic("/roscausal/robot"));
    CHECK_THROWS_AS(bus.create_topic("/roscausal/robot", MessageKind::RobotState), TopicError);
    CHECK_THROWS_AS(bus.topic("/nope"), TopicError);
  }

  TEST_CASE("publish without subscribers is a no-op") {
    Bus bus;
    auto t = bus.create_topic("/roscausal/robot", MessageKind::RobotState);
    CHECK_NOTHROW(bus.publish(t, Message::robot(at(1)), 0.0));
  }

  TEST_CASE("capacity 2 keeps the newest two") {
    Bus bus;
    auto t = bus.create_topic("/roscausal/robot", MessageKind::RobotState);
    auto sub = bus.subscribe(t, 2);
    for (int i = 1; i <= 3; ++i) bus.publish(t, Message::robot(at(i)), i);
    CHECK(sub.size() == 2);
    CHECK(sub.dropped() == 1);
    CHECK(xs(sub.drain()) == std::vector<double>{2, 3});
  }

  TEST_CASE("kind mismatch is rejected") {
    Bus bus;
    auto t = bus.create_topic("/roscausal/robot", MessageKind::RobotState);
    CHECK_THROWS_AS(bus.publish(t, Message::human(at(1)), 0.0), KindMismatchError);
    CHECK_THROWS_AS(bus.publish(t, Message::model(CausalModel{}), 0.0), KindMismatchError);
  }

  TEST_CASE("subscribe semantics: no replay, fan-out, unknown topic") {
    Bus bus;
    auto t = bus.create_topic("/roscausal/robot", MessageKind::RobotState);
    bus.publish(t, Message::robot(at(1)), 0.0);
    auto late = bus.subscribe(t);
    CHECK(late.drain().empty());

    auto a = bus.subscribe(t);
    auto b = bus.subscribe(t);
    bus.publish(t, Message::robot(at(7)), 1.0);
    CHECK(xs(a.drain()) == std::vector<double>{7});
    CHECK(xs(b.drain()) == std::vector<double>{7});
    CHECK_THROWS_AS(bus.subscribe("/missing"), TopicError);
    CHECK_THROWS_AS(bus.subscribe(t, 0), ValidationError);
  }

  TEST_CASE("drain is FIFO, empties the queue and is isolated per subscriber") {
    Bus bus;
    auto t = bus.create_topic("/roscausal/human", MessageKind::HumanState);
    auto a = bus.subscribe(t, 8);
    auto b = bus.subscribe(t, 8);
    CHECK(a.drain().empty());
    for (int i = 1; i <= 3; ++i) bus.publish(t, Message::human(at(i)), 0.5 * i);
    auto envs = a.drain();
    CHECK(xs(envs) == std::vector<double>{1, 2, 3});
    CHECK(envs[0].publish_time == 0.5);
    CHECK(a.drain().empty());
    CHECK(b.size() == 3);
  }

  TEST_CASE("publish time may not go backwards on a topic") {
    Bus bus;
    auto t = bus.create_topic("/roscausal/robot", MessageKind::RobotState);
    bus.publish(t, Message::robot(at(1)), 2.0);
    CHECK_NOTHROW(bus.publish(t, Message::robot(at(1)), 2.0));
    CHECK_THROWS_AS(bus.publish(t, Message::robot(at(1)), 1.0), ValidationError);
  }

  TEST_CASE("a dropped subscription stops receiving") {
    Bus bus;
    auto t = bus.create_topic("/roscausal/robot", MessageKind::RobotState);
    { auto gone = bus.subscribe(t); }
    CHECK_NOTHROW(bus.publish(t, Message::robot(at(1)), 0.0));
  }

  TEST_CASE("pipeline topics") {
    Bus bus;
    register_pipeline_topics(bus);
    register_pipeline_topics(bus);
    CHECK(bus.topic(kRobotTopic).kind == MessageKind::RobotState);
    CHECK(bus.topic(kHumanTopic).kind == MessageKind::HumanState);
    CHECK(bus.topic(kCausalModelTopic).kind == MessageKind::CausalModel);
  }

  TEST_CASE("concurrent publishers keep per-topic order and capacity") {
    Bus bus;
    auto r = bus.create_topic("/roscausal/robot", MessageKind::RobotState);
    auto h = bus.create_topic("/roscausal/human", MessageKind::HumanState);
    auto rs = bus.subscribe(r, 10000);
    auto hs = bus.subscribe(h, 16);
    std::thread t1([&] { for (int i = 0; i < 2000; ++i) bus.publish(r, Message::robot(at(i)), i); });
    std::thread t2([&] { for (int i = 0; i < 2000; ++i) bus.publish(h, Message::human(at(i)), i); });
    t1.join();
    t2.join();
    auto got = xs(rs.drain());
    REQUIRE(got.size() == 2000);
    for (int i = 0; i < 2000; ++i) CHECK(got[i] == i);
    auto last = xs(hs.drain());
    REQUIRE(last.size() == 16);
    CHECK(last.front() == 1984);
    CHECK(last.back() == 1999);
  }
}
