#include "generators.hpp"

#include "mirrorcast/error.hpp"
#include "mirrorcast/replay.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace mirrorcast;
using namespace mirrorcast::replay;
using namespace std::chrono_literals;

TEST(ReplayQueue, PreservesSubmissionOrder) {
    ReplayQueue q;
    gen::Rng rng(17);
    std::vector<wire::InputEvent> model;
    for (std::uint64_t s = 2; s < 500; ++s) {
        auto e = gen::input_event(rng);
        if (e.kind == wire::InputKind::TextChanged) continue;  // coalescing has its own test
        q.submit(e, s);
        model.push_back(e);
    }
    auto all = q.take_all();
    ASSERT_EQ(all.size(), model.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(all[i].event, model[i]);
        if (i) EXPECT_GT(all[i].sequence, all[i - 1].sequence);
    }
    EXPECT_TRUE(q.empty());
}

TEST(ReplayQueue, CoalescesConsecutiveTextForSameElement) {
    ReplayQueue q;
    q.submit(wire::InputEvent::text_changed("e1", "J"), 2);
    q.submit(wire::InputEvent::text_changed("e1", "Jo"), 3);
    q.submit(wire::InputEvent::text_changed("e1", "John"), 4);
    q.submit(wire::InputEvent::text_changed("e2", "x"), 5);
    q.submit(wire::InputEvent::click(1, 1), 6);
    q.submit(wire::InputEvent::text_changed("e2", "xy"), 7);
    auto all = q.take_all();
    ASSERT_EQ(all.size(), 4u);
    EXPECT_EQ(all[0].event.text, "John");
    EXPECT_EQ(all[0].sequence, 4u);
    EXPECT_EQ(all[1].event.text, "x");
    EXPECT_EQ(all[2].event.kind, wire::InputKind::Click);
    EXPECT_EQ(all[3].event.text, "xy");
}

// Replaying the coalesced queue against a field model gives the same final
// values as replaying every event.
TEST(ReplayQueue, CoalescingPreservesFinalFieldValues) {
    gen::Rng rng(23);
    for (int round = 0; round < 200; ++round) {
        ReplayQueue q;
        std::map<std::string, std::string> direct;
        for (std::uint64_t s = 2; s < 40; ++s) {
            wire::InputEvent e = gen::coin(rng)
                                     ? wire::InputEvent::text_changed("e" + std::to_string(gen::uniform(rng, 1, 3)),
                                                                      gen::ascii(rng, 5))
                                     : wire::InputEvent::click(gen::coord(rng), gen::coord(rng));
            if (e.kind == wire::InputKind::TextChanged) direct[e.elementId] = e.text;
            q.submit(e, s);
        }
        std::map<std::string, std::string> replayed;
        for (auto& e : q.take_all())
            if (e.event.kind == wire::InputKind::TextChanged) replayed[e.event.elementId] = e.event.text;
        EXPECT_EQ(replayed, direct);
    }
}

TEST(ReplayQueue, ClosedQueueRejectsSubmissions) {
    ReplayQueue q;
    q.submit(wire::InputEvent::click(1, 1), 2);
    q.close();
    EXPECT_TRUE(q.closed());
    try {
        q.submit(wire::InputEvent::click(1, 1), 3);
        FAIL() << "submit after close";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::QueueClosed);
    }
    EXPECT_EQ(q.take_all().size(), 1u);
}

TEST(ReplayQueue, LastExecutedIsMonotonic) {
    ReplayQueue q;
    q.mark_executed(5);
    q.mark_executed(3);
    EXPECT_EQ(q.last_executed(), 5u);
    q.mark_executed(9);
    EXPECT_EQ(q.last_executed(), 9u);
}

TEST(ReplayQueue, WaitWakesOnSubmitAndClose) {
    ReplayQueue q;
    auto t0 = std::chrono::steady_clock::now();
    EXPECT_FALSE(q.wait_for(50ms));
    EXPECT_GE(std::chrono::steady_clock::now() - t0, 45ms);

    std::thread producer([&] {
        std::this_thread::sleep_for(30ms);
        q.submit(wire::InputEvent::click(1, 1), 2);
    });
    EXPECT_TRUE(q.wait_for(5s));
    producer.join();
    q.take_all();

    std::thread closer([&] {
        std::this_thread::sleep_for(30ms);
        q.close();
    });
    t0 = std::chrono::steady_clock::now();
    EXPECT_FALSE(q.wait_for(5s));
    EXPECT_LT(std::chrono::steady_clock::now() - t0, 2s);
    closer.join();
}

TEST(ReplayQueue, ConcurrentProducerKeepsOrder) {
    ReplayQueue q;
    constexpr std::uint64_t n = 5000;
    std::thread producer([&] {
        for (std::uint64_t s = 1; s <= n; ++s) q.submit(wire::InputEvent::key_press("a"), s);
        q.close();
    });
    std::uint64_t expect = 1;
    while (true) {
        bool pending = q.wait_for(1s);
        for (auto& e : q.take_all()) EXPECT_EQ(e.sequence, expect++);
        if (!pending && q.closed() && q.empty()) break;
    }
    producer.join();
    EXPECT_EQ(expect, n + 1);
}
