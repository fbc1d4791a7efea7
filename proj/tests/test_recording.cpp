#include "fixtures.hpp"
#include "mycosim/recording.hpp"

#include <doctest.h>

using namespace mycosim;

TEST_CASE("valid CSV loads") {
    const auto rec = parse_recording_csv("time_s,V1,V2\n0,0.5,-1\n1,0.25,2\n2,0,3\n");
    CHECK(rec.length() == 3);
    CHECK(rec.labels == std::vector<std::string>{"V1", "V2"});
    CHECK(rec.interval_s == 1.0);
    CHECK(rec.channels[1][2] == 3.0);
    CHECK(rec.channel_index("V2") == 1);
    CHECK_THROWS_AS(rec.channel_index("V9"), NotFoundError);
    CHECK(parse_recording_csv(format_recording_csv(rec)) == rec);
}

TEST_CASE("non-default intervals and offsets round-trip") {
    Recording rec;
    rec.labels = {"a"};
    rec.start_s = 100.0;
    rec.interval_s = 0.5;
    rec.channels = {{1.0, 2.0, 3.0, 4.0}};
    const auto back = parse_recording_csv(format_recording_csv(rec));
    CHECK(back == rec);
    CHECK(back.time_at(3) == 101.5);

    const auto dir = fixtures::scratch("recording");
    save_recording(rec, dir / "r.csv");
    CHECK(load_recording(dir / "r.csv") == rec);
}

TEST_CASE("malformed recordings are rejected with a location") {
    auto expect = [](const std::string& text, std::size_t line) {
        try {
            parse_recording_csv(text);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
        }
    };
    expect("time_s,V1\n0,1\n1,2000\n", 3);
    expect("0,1\n1,2\n", 1);
    expect("", 1);
    expect("time_s,V1,V2\n0,1,2\n1,2\n", 3);
    expect("time_s,V1\n0,1\n0,2\n", 3);
    expect("time_s,V1\n0,1\n1,2\n3,2\n", 4);
    expect("time_s,V1\n0,abc\n", 2);
    CHECK_THROWS_AS(load_recording("missing.csv"), FileError);
}

TEST_CASE("recording invariants") {
    Recording rec;
    rec.labels = {"a", "b"};
    rec.channels = {{1.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(rec.validate(), DomainError);
    rec.channels = {{1.0}, {1300.0}};
    CHECK_THROWS_AS(rec.validate(), DomainError);
    rec.channels = {{1.0}, {2.0}};
    rec.interval_s = 0.0;
    CHECK_THROWS_AS(rec.validate(), DomainError);
}

TEST_CASE("stimulus annotations") {
    const auto a = parse_annotations_csv("time_s,kind,duration_s\n100,thermal-short,5\n900,thermal-long,60\n");
    REQUIRE(a.size() == 2);
    CHECK(a[1] == StimulusAnnotation{900.0, "thermal-long", 60.0});
    CHECK_THROWS_AS(parse_annotations_csv("time,kind\n"), ParseError);
    CHECK_THROWS_AS(parse_annotations_csv("time_s,kind,duration_s\n1,x,-1\n"), ParseError);
    CHECK(parse_annotations_csv("time_s,kind,duration_s\n").empty());
}
