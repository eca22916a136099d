#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ddsim/sequence.hpp"

using namespace ddsim;
using namespace ddsim::sequence;

TEST_SUITE_BEGIN("sequence");

TEST_CASE("cpmg timing") {
  const double T = 1.7;
  const auto t1 = cpmg_times(1, T);
  REQUIRE(t1.instants.size() == 1);
  CHECK(t1.instants[0] == doctest::Approx(T / 2).epsilon(1e-15));

  const auto t2 = cpmg_times(2, T);
  CHECK(t2.instants[0] == doctest::Approx(T / 4).epsilon(1e-15));
  CHECK(t2.instants[1] == doctest::Approx(3 * T / 4).epsilon(1e-15));

  const auto t4 = cpmg_times(4, 1.0);
  const double expect4[] = {0.125, 0.375, 0.625, 0.875};
  for (int j = 0; j < 4; ++j) CHECK(t4.instants[j] == doctest::Approx(expect4[j]).epsilon(1e-15));

  CHECK_THROWS_AS(cpmg_times(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cpmg_times(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cpmg_times(3, -1.0), std::invalid_argument);
}

TEST_CASE("udd timing") {
  SUBCASE("orders 1 and 2 coincide with CPMG") {
    for (double T : {0.5, 1.0, 0.0281904}) {
      for (int n : {1, 2}) {
        const auto u = udd_times(n, T);
        const auto c = cpmg_times(n, T);
        for (int j = 0; j < n; ++j) {
          CHECK(std::abs(u.instants[j] - c.instants[j]) < 1e-12 * T);
        }
      }
    }
  }

  SUBCASE("UDD-7 at the paper block duration") {
    // independent high-precision evaluation of T sin^2(pi j/16), T = 7 x 4.0272 ms
    const double expect[] = {0.0010729332133469109, 0.0041283884978193753,
                             0.0087012004841275866, 0.0140952,
                             0.019489199515872413,  0.024062011502180625,
                             0.027117466786653089};
    const auto u = udd_times(7, 0.0281904);
    for (int j = 0; j < 7; ++j) {
      CHECK(u.instants[j] == doctest::Approx(expect[j]).epsilon(1e-13));
    }
    // the four-decimal table (1.0729, 4.1285, 8.7015, 14.0952, 19.4889,
    // 24.0619, 27.1175 ms) carries rounded intermediates; agree to 5e-4 ms
    const double table_ms[] = {1.0729, 4.1285, 8.7015, 14.0952, 19.4889, 24.0619, 27.1175};
    for (int j = 0; j < 7; ++j) {
      CHECK(std::abs(u.instants[j] * 1e3 - table_ms[j]) < 5e-4);
    }
  }

  SUBCASE("symmetry and monotonicity up to order 100") {
    const double T = 0.37;
    for (int n = 1; n <= 100; ++n) {
      const auto u = udd_times(n, T);
      REQUIRE(static_cast<int>(u.instants.size()) == n);
      for (int j = 0; j < n; ++j) {
        CHECK(u.instants[j] > 0);
        CHECK(u.instants[j] < T);
        if (j > 0) CHECK(u.instants[j] > u.instants[j - 1]);
        CHECK(std::abs(u.instants[j] + u.instants[n - 1 - j] - T) < 1e-12 * T);
      }
    }
  }

  SUBCASE("differs from CPMG for order >= 3") {
    for (int n : {3, 5, 9}) {
      const auto u = udd_times(n, 1.0);
      const auto c = cpmg_times(n, 1.0);
      double maxdev = 0;
      for (int j = 0; j < n; ++j) maxdev = std::max(maxdev, std::abs(u.instants[j] - c.instants[j]));
      CHECK(maxdev > 1e-3);
    }
  }
}

TEST_CASE("block duration law") {
  CHECK(block_duration(7, 2e-3, 27.2e-6) == doctest::Approx(0.0281904).epsilon(1e-14));
  CHECK(block_duration(1, 2e-3, 27.2e-6) == doctest::Approx(0.0040272).epsilon(1e-14));
  CHECK(block_duration(3, 1e-3, 0.0) == doctest::Approx(0.006).epsilon(1e-14));
  CHECK_THROWS_AS(block_duration(0, 1e-3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(block_duration(2, 0.0, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(block_duration(2, 1e-3, -1e-6), std::invalid_argument);
}

TEST_CASE("timeline compilation") {
  PulseParams pulse;
  pulse.pi_duration = 27.2e-6;
  pulse.nominal_amplitude = pi_calibrated_amplitude(27.2e-6);

  SUBCASE("paper CPMG unit [tau - pi - tau]") {
    const auto tl = compile(cpmg_times(1, block_duration(1, 2e-3, 27.2e-6)), pulse, 1);
    REQUIRE(tl.segments.size() == 3);
    CHECK(tl.segments[0].kind == SegmentKind::delay);
    CHECK(tl.segments[0].duration == doctest::Approx(2e-3).epsilon(1e-12));
    CHECK(tl.segments[1].kind == SegmentKind::pulse);
    CHECK(tl.segments[1].duration == doctest::Approx(27.2e-6).epsilon(1e-12));
    CHECK(tl.segments[2].duration == doctest::Approx(2e-3).epsilon(1e-12));
    CHECK_NOTHROW(validate(tl));
  }

  SUBCASE("pulse centers reproduce the instants") {
    for (int n : {1, 2, 5, 9}) {
      const double T = block_duration(n, 2e-3, 27.2e-6);
      for (const auto& tv : {cpmg_times(n, T), udd_times(n, T)}) {
        const auto tl = compile(tv, pulse, 3);
        const auto centers = pulse_centers(tl);
        REQUIRE(centers.size() == tv.instants.size());
        for (std::size_t j = 0; j < centers.size(); ++j) {
          CHECK(std::abs(centers[j] - tv.instants[j]) < 1e-12 * T);
        }
        double sum = 0;
        for (const auto& seg : tl.segments) sum += seg.duration;
        CHECK(std::abs(sum - T) < 1e-12 * T);
        CHECK(tl.repeats == 3);
      }
    }
  }

  SUBCASE("zero-gap rejected") {
    PulseParams wide;
    wide.pi_duration = 0.5;  // equals the UDD-2 gap exactly
    wide.nominal_amplitude = 1.0;
    CHECK_THROWS_AS(compile(udd_times(2, 1.0), wide, 1), OverlapError);
  }

  SUBCASE("smallest overlapping UDD order by brute force") {
    // independent oracle: scan the validation predicate on the raw instants
    const double tau_cpmg = 2e-3, tau_pi = 27.2e-6;
    int first_bad = -1;
    for (int n = 1; n <= 1200; ++n) {
      const double T = block_duration(n, tau_cpmg, tau_pi);
      const auto tv = udd_times(n, T);
      bool ok = tv.instants.front() > tau_pi / 2 && T - tv.instants.back() > tau_pi / 2;
      for (std::size_t j = 0; j + 1 < tv.instants.size() && ok; ++j) {
        ok = tv.instants[j + 1] - tv.instants[j] > tau_pi;
      }
      if (!ok) {
        first_bad = n;
        break;
      }
    }
    REQUIRE(first_bad == 729);

    PulseParams p;
    p.pi_duration = tau_pi;
    p.nominal_amplitude = pi_calibrated_amplitude(tau_pi);
    CHECK_THROWS_AS(
        compile(udd_times(first_bad, block_duration(first_bad, tau_cpmg, tau_pi)), p, 1),
        OverlapError);
    CHECK_NOTHROW(
        compile(udd_times(first_bad - 1, block_duration(first_bad - 1, tau_cpmg, tau_pi)), p, 1));
  }

  SUBCASE("ideal zero-width pulses") {
    PulseParams ideal;  // tau_pi = 0
    const auto tl = compile(udd_times(5, 0.01), ideal, 1);
    int pulses = 0;
    for (const auto& seg : tl.segments) {
      if (seg.kind == SegmentKind::pulse) {
        ++pulses;
        CHECK(seg.duration == 0.0);
      } else {
        CHECK(seg.duration > 0);
      }
    }
    CHECK(pulses == 5);
    CHECK(flip_angle(ideal) == doctest::Approx(std::numbers::pi));
  }
}

TEST_CASE("sequence spec text format") {
  const auto spec = parse_sequence_spec("udd order=7 tau_cpmg=2ms tau_pi=27.2us repeats=100");
  CHECK(spec.scheme == Scheme::udd);
  CHECK(spec.order == 7);
  CHECK(spec.tau_cpmg == doctest::Approx(2e-3).epsilon(1e-15));
  CHECK(spec.tau_pi == doctest::Approx(27.2e-6).epsilon(1e-15));
  CHECK(spec.repeats == 100);
  CHECK(spec.label() == "udd-7");
  CHECK(spec.period() == doctest::Approx(0.0281904).epsilon(1e-14));

  CHECK_THROWS_AS(parse_sequence_spec("cpmg order=0 tau_cpmg=2ms tau_pi=27.2us repeats=1"),
                  std::invalid_argument);

  SUBCASE("missing unit is a syntax error with position") {
    try {
      parse_sequence_spec("udd order=7 tau_cpmg=2 tau_pi=27.2us repeats=1", 5);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 5);
      CHECK(e.col > 1);
    }
  }

  CHECK_THROWS_AS(parse_sequence_spec("xyz order=1 tau_cpmg=2ms tau_pi=0s"), ParseError);
  CHECK_THROWS_AS(parse_sequence_spec("udd order=1 tau_cpmg=2ms"), ParseError);
  CHECK_THROWS_AS(parse_sequence_spec(""), ParseError);
  CHECK_THROWS_AS(parse_sequence_spec("udd order=1 tau_cpmg=2ms tau_pi=1s bogus=3"), ParseError);

  SUBCASE("round trip over randomized specs") {
    std::mt19937_64 eng(23);
    std::uniform_int_distribution<int> order(1, 40);
    std::uniform_int_distribution<int> reps(1, 1000);
    std::uniform_real_distribution<double> logtau(-5, -1);
    std::uniform_int_distribution<int> phase_deg(0, 359);
    std::uniform_int_distribution<int> scheme(0, 2);
    for (int k = 0; k < 300; ++k) {
      SequenceSpec s;
      s.scheme = scheme(eng) == 0 ? Scheme::cpmg : scheme(eng) == 1 ? Scheme::udd : Scheme::none;
      s.order = order(eng);
      s.tau_cpmg = std::pow(10.0, logtau(eng));
      s.tau_pi = std::pow(10.0, logtau(eng) - 2);
      s.repeats = reps(eng);
      s.phase = phase_deg(eng) * std::numbers::pi / 180.0;
      const auto back = parse_sequence_spec(format_sequence_spec(s));
      CHECK(back.scheme == s.scheme);
      CHECK(back.order == s.order);
      CHECK(back.tau_cpmg == s.tau_cpmg);  // shortest repr + unit "s" is lossless
      CHECK(back.tau_pi == s.tau_pi);
      CHECK(back.repeats == s.repeats);
      CHECK(back.phase == doctest::Approx(s.phase).epsilon(1e-14));
      // canonical form is a fixed point
      CHECK(format_sequence_spec(back) == format_sequence_spec(s));
    }
  }

  SUBCASE("no-decoupling control") {
    const auto none = parse_sequence_spec("none order=7 tau_cpmg=2ms tau_pi=27.2us repeats=3");
    const auto tl = compile(none);
    REQUIRE(tl.segments.size() == 1);
    CHECK(tl.segments[0].kind == SegmentKind::delay);
    CHECK(tl.block_duration == doctest::Approx(0.0281904).epsilon(1e-14));
    CHECK(times_for(none).instants.empty());
  }
}

TEST_SUITE_END();
